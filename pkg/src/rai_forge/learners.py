"""Weighted weak learners and the best-response step.

Three hypothesis families:

* ``Stump`` — axis-aligned decision stumps, trained by an exact scan over
  all (feature, threshold, label pair) candidates for the weighted
  zero-one loss,
* ``Linear`` — multiclass linear scorer,
* ``Mlp`` — one hidden rectifier layer,

the latter two trained by minibatch SGD on the weighted multiclass
logistic surrogate, with sample i's gradient scaled by n * w_i.  The
adversary and all evaluation use zero-one loss throughout; the surrogate
only steers the gradient steps.
"""

from dataclasses import dataclass

import numpy as np

from . import rng


class LearnerError(ValueError):
    pass


LEARNER_KINDS = ("stump", "linear", "mlp")


# ---------------------------------------------------------------------------
# hypothesis types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Stump:
    """Predict ``left`` where x[feature] <= threshold, else ``right``.

    A constant hypothesis is a stump with left == right (threshold 0.0 so
    the field stays finite).  Polarity is subsumed by swapping the labels.
    """
    feature: int
    threshold: float
    left: int
    right: int
    kind = "stump"

    def __post_init__(self):
        if not np.isfinite(self.threshold):
            raise LearnerError("stump threshold must be finite")
        if self.feature < 0 or self.left < 0 or self.right < 0:
            raise LearnerError("stump indices must be nonnegative")

    def predict(self, X):
        X = _check_features(X, min_dim=self.feature + 1)
        return np.where(X[:, self.feature] <= self.threshold,
                        self.left, self.right).astype(np.int64)


class Linear:
    """Multiclass linear scorer: scores(x) = W x + b, W of shape (C, d)."""

    kind = "linear"

    def __init__(self, weights, bias):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise LearnerError("linear parameter shapes inconsistent")

    def scores(self, X):
        X = _check_features(X, exact_dim=self.weights.shape[1])
        return X @ self.weights.T + self.bias

    def predict(self, X):
        return np.argmax(self.scores(X), axis=1).astype(np.int64)


class Mlp:
    """One hidden rectifier layer: scores = W2 relu(W1 x + b1) + b2."""

    kind = "mlp"

    def __init__(self, w1, b1, w2, b2):
        self.w1 = np.asarray(w1, dtype=np.float64)
        self.b1 = np.asarray(b1, dtype=np.float64)
        self.w2 = np.asarray(w2, dtype=np.float64)
        self.b2 = np.asarray(b2, dtype=np.float64)
        h = self.w1.shape[0]
        if (self.w1.ndim != 2 or self.b1.shape != (h,)
                or self.w2.ndim != 2 or self.w2.shape[1] != h
                or self.b2.shape != (self.w2.shape[0],)):
            raise LearnerError("mlp parameter shapes inconsistent")

    def scores(self, X):
        X = _check_features(X, exact_dim=self.w1.shape[1])
        hidden = np.maximum(X @ self.w1.T + self.b1, 0.0)
        return hidden @ self.w2.T + self.b2

    def predict(self, X):
        return np.argmax(self.scores(X), axis=1).astype(np.int64)


def _check_features(X, exact_dim=None, min_dim=None):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise LearnerError("features must be a vector or matrix")
    if exact_dim is not None and X.shape[1] != exact_dim:
        raise LearnerError(
            f"feature dimension {X.shape[1]} != expected {exact_dim}")
    if min_dim is not None and X.shape[1] < min_dim:
        raise LearnerError("feature dimension too small for this stump")
    return X


def loss_row(hypothesis, dataset):
    """Per-sample zero-one losses of the hypothesis — one payoff row."""
    pred = hypothesis.predict(dataset.features)
    return (pred != dataset.labels).astype(np.float64)


# ---------------------------------------------------------------------------
# JSON codec
# ---------------------------------------------------------------------------

def hypothesis_to_json(h):
    if h.kind == "stump":
        return {"kind": "stump", "feature": int(h.feature),
                "threshold": float(h.threshold),
                "left": int(h.left), "right": int(h.right)}
    if h.kind == "linear":
        return {"kind": "linear", "weights": h.weights.tolist(),
                "bias": h.bias.tolist()}
    if h.kind == "mlp":
        return {"kind": "mlp",
                "weights": [h.w1.tolist(), h.w2.tolist()],
                "biases": [h.b1.tolist(), h.b2.tolist()]}
    raise LearnerError(f"unknown hypothesis kind {h.kind!r}")


def hypothesis_from_json(obj):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise LearnerError("hypothesis must be an object with a 'kind'")
    kind = obj["kind"]
    allowed = {"stump": {"feature", "threshold", "left", "right"},
               "linear": {"weights", "bias"},
               "mlp": {"weights", "biases"}}
    if kind not in allowed:
        raise LearnerError(f"unknown hypothesis kind {kind!r}")
    extra = set(obj) - {"kind"} - allowed[kind]
    if extra:
        raise LearnerError(f"unknown keys {sorted(extra)} in hypothesis")
    missing = allowed[kind] - set(obj)
    if missing:
        raise LearnerError(f"missing keys {sorted(missing)} in hypothesis")
    try:
        if kind == "stump":
            return Stump(int(obj["feature"]), float(obj["threshold"]),
                         int(obj["left"]), int(obj["right"]))
        if kind == "linear":
            return Linear(obj["weights"], obj["bias"])
        w1, w2 = obj["weights"]
        b1, b2 = obj["biases"]
        return Mlp(w1, b1, w2, b2)
    except (TypeError, ValueError) as exc:
        raise LearnerError(f"malformed {kind} hypothesis: {exc}") from exc


# ---------------------------------------------------------------------------
# exact stump fitting
# ---------------------------------------------------------------------------

def fit_stump(dataset, w):
    """Exact weighted zero-one minimizer over all stump candidates.

    Candidates: the constant hypothesis plus, per feature, thresholds at
    midpoints of consecutive distinct sorted values with the best left and
    right labels chosen from prefix class-mass sums.  Ties keep the
    earliest candidate in scan order (constant, then feature-major,
    thresholds ascending), so results are deterministic.
    """
    X, y = dataset.features, dataset.labels
    n, d = X.shape
    C = dataset.n_classes
    w = np.asarray(w, dtype=np.float64)
    totals = np.bincount(y, weights=w, minlength=C)
    best_label = int(np.argmax(totals))
    best_correct = totals[best_label]
    best = Stump(0, 0.0, best_label, best_label)
    for j in range(d):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        masses = np.zeros((n, C))
        masses[np.arange(n), y[order]] = w[order]
        prefix = np.cumsum(masses, axis=0)
        cut = np.nonzero(xs[:-1] < xs[1:])[0]
        if cut.size == 0:
            continue
        left_mass = prefix[cut]
        right_mass = totals - left_mass
        correct = left_mass.max(axis=1) + right_mass.max(axis=1)
        k = int(np.argmax(correct))
        if correct[k] > best_correct + 1e-15:
            i = cut[k]
            best_correct = correct[k]
            best = Stump(j, float(0.5 * (xs[i] + xs[i + 1])),
                         int(np.argmax(left_mass[k])),
                         int(np.argmax(right_mass[k])))
    return best


# ---------------------------------------------------------------------------
# SGD on the weighted logistic surrogate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrainBudget:
    iterations: int = 1000
    batch_size: int = 32
    learning_rate: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise LearnerError("iterations must be >= 1")
        if self.batch_size < 1:
            raise LearnerError("batch_size must be >= 1")
        if not (np.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise LearnerError("learning_rate must be positive")


def _weighted_logistic_loss(scores, y, a):
    # a = n*w importance factors; mean over samples of a_i * CE_i
    z = scores - scores.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    return float(-(a * logp[np.arange(y.size), y]).mean())


def _sgd(dataset, w, params, score_grad, budget):
    """Generic minibatch SGD loop.  ``params`` is a list of arrays updated
    in place; ``score_grad(X, y, a, params)`` returns (loss grads list).
    Returns the last iterate; if minibatch noise left it worse than the
    initialization on the full-data weighted loss, falls back to the best
    checkpoint so the result never does worse than where it started."""
    X, y = dataset.features, dataset.labels
    n = dataset.n
    if budget.batch_size > n:
        raise LearnerError("batch_size exceeds dataset size")
    a = n * np.asarray(w, dtype=np.float64)
    stream = rng.CounterStream(rng.derive_seed(budget.seed, 0xB41C))

    def full_loss():
        return _weighted_logistic_loss(_scores_of(params, X), y, a)

    init_loss = full_loss()
    best_loss = init_loss
    best_params = [p.copy() for p in params]
    check_every = max(1, budget.iterations // 20)
    for step in range(budget.iterations):
        idx = stream.integers(n, budget.batch_size)
        grads = score_grad(X[idx], y[idx], a[idx], params)
        for p, g in zip(params, grads):
            p -= budget.learning_rate * g
        if (step + 1) % check_every == 0 or step + 1 == budget.iterations:
            cur = full_loss()
            if cur < best_loss:
                best_loss = cur
                best_params = [p.copy() for p in params]
    if full_loss() > init_loss:
        for p, bp in zip(params, best_params):
            p[...] = bp
    return params


def _scores_of(params, X):
    if len(params) == 2:
        W, b = params
        return X @ W.T + b
    w1, b1, w2, b2 = params
    return np.maximum(X @ w1.T + b1, 0.0) @ w2.T + b2


def _softmax_rows(Z):
    E = np.exp(Z - Z.max(axis=1, keepdims=True))
    return E / E.sum(axis=1, keepdims=True)


def _linear_grad(Xb, yb, ab, params):
    W, b = params
    P = _softmax_rows(Xb @ W.T + b)
    P[np.arange(yb.size), yb] -= 1.0
    G = P * ab[:, None] / yb.size
    return [G.T @ Xb, G.sum(axis=0)]


def _mlp_grad(Xb, yb, ab, params):
    w1, b1, w2, b2 = params
    pre = Xb @ w1.T + b1
    hid = np.maximum(pre, 0.0)
    P = _softmax_rows(hid @ w2.T + b2)
    P[np.arange(yb.size), yb] -= 1.0
    G = P * ab[:, None] / yb.size
    g_hid = (G @ w2) * (pre > 0)
    return [g_hid.T @ Xb, g_hid.sum(axis=0), G.T @ hid, G.sum(axis=0)]


def _init_uniform(stream, shape, fan_in):
    scale = 1.0 / np.sqrt(fan_in)
    u = stream.uniforms(int(np.prod(shape))).reshape(shape)
    return (2.0 * u - 1.0) * scale


def best_response(dataset, w, learner_kind, budget=None, hidden=4):
    """Train a hypothesis approximately minimizing E_w of the loss.

    Stumps minimize weighted zero-one exactly; linear/mlp run SGD on the
    weighted logistic surrogate.  Deterministic given budget.seed.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (dataset.n,):
        raise LearnerError("weight vector length must match dataset")
    if (w < -1e-9).any() or abs(w.sum() - 1.0) > 1e-7:
        raise LearnerError("weights must lie on the simplex")
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    if learner_kind == "stump":
        return fit_stump(dataset, w)
    if budget is None:
        budget = TrainBudget()
    d, C = dataset.dim, dataset.n_classes
    stream = rng.CounterStream(rng.derive_seed(budget.seed, 0x1247))
    if learner_kind == "linear":
        params = [_init_uniform(stream, (C, d), d), np.zeros(C)]
        params = _sgd(dataset, w, params, _linear_grad, budget)
        return Linear(params[0], params[1])
    if learner_kind == "mlp":
        params = [_init_uniform(stream, (hidden, d), d), np.zeros(hidden),
                  _init_uniform(stream, (C, hidden), hidden), np.zeros(C)]
        params = _sgd(dataset, w, params, _mlp_grad, budget)
        return Mlp(*params)
    raise LearnerError(f"unknown learner kind {learner_kind!r}")
