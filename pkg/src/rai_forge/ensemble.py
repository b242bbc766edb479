"""Randomized ensembles, derandomization, and reported metrics.

An ensemble is a finite distribution over hypotheses.  Its randomized
robust risk is the uncertainty-set maximum of the member-averaged
per-sample zero-one loss; the deterministic counterpart first collapses
the ensemble to plurality-vote predictions.  Vote ties break toward the
lowest label id everywhere, which keeps the derandomization identities
exact in tests.
"""

import json

import numpy as np

from . import learners, uncertainty


class EnsembleError(ValueError):
    pass


class Ensemble:
    """Hypotheses with nonnegative masses; ``normalized`` marks unit mass."""

    def __init__(self, hypotheses, masses, normalized=False):
        self.hypotheses = tuple(hypotheses)
        self.masses = np.asarray(masses, dtype=np.float64)
        if self.masses.shape != (len(self.hypotheses),):
            raise EnsembleError("one mass per hypothesis required")
        if len(self.hypotheses) == 0:
            raise EnsembleError("ensemble must have at least one member")
        if (self.masses < 0).any() or not np.all(np.isfinite(self.masses)):
            raise EnsembleError("masses must be finite and nonnegative")
        if self.masses.sum() <= 0:
            raise EnsembleError("masses must not all be zero")
        if normalized and abs(self.masses.sum() - 1.0) > 1e-9:
            raise EnsembleError("normalized flag set but masses do not sum to 1")
        self.normalized = bool(normalized)

    def __len__(self):
        return len(self.hypotheses)

    def normalize(self):
        if self.normalized:
            return self
        return Ensemble(self.hypotheses, self.masses / self.masses.sum(),
                        normalized=True)

    def vote_shares(self, X, n_classes=None):
        """Per-sample distribution of the ensemble's predicted labels,
        shape (n, n_classes).  Scale-invariant in the masses."""
        X = np.asarray(X, dtype=np.float64)
        preds = np.stack([h.predict(X) for h in self.hypotheses])
        if n_classes is None:
            n_classes = int(preds.max()) + 1
        shares = np.zeros((X.shape[0], n_classes))
        q = self.masses / self.masses.sum()
        for k, h in enumerate(self.hypotheses):
            np.add.at(shares, (np.arange(X.shape[0]), preds[k]), q[k])
        return shares

    def mean_loss_vector(self, dataset):
        q = self.masses / self.masses.sum()
        rows = np.stack([learners.loss_row(h, dataset)
                         for h in self.hypotheses])
        return q @ rows


def ensemble_to_json(ens):
    return {"members": [{"mass": float(m),
                         "hypothesis": learners.hypothesis_to_json(h)}
                        for h, m in zip(ens.hypotheses, ens.masses)],
            "normalized": bool(ens.normalized)}


def ensemble_from_json(obj):
    if not isinstance(obj, dict) or set(obj) != {"members", "normalized"}:
        raise EnsembleError("ensemble object must have members + normalized")
    members = obj["members"]
    if not isinstance(members, list) or not members:
        raise EnsembleError("members must be a nonempty list")
    hyps, masses = [], []
    for m in members:
        if not isinstance(m, dict) or set(m) != {"mass", "hypothesis"}:
            raise EnsembleError("each member needs exactly mass + hypothesis")
        hyps.append(learners.hypothesis_from_json(m["hypothesis"]))
        masses.append(float(m["mass"]))
    return Ensemble(hyps, masses, normalized=bool(obj["normalized"]))


def save_ensemble(ens, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ensemble_to_json(ens), fh, indent=1)
        fh.write("\n")


def load_ensemble(path):
    with open(path, encoding="utf-8") as fh:
        return ensemble_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# risks
# ---------------------------------------------------------------------------

def randomized_risk(ens, dataset, spec):
    """max_w E_{h~Q} E_w loss — oracle applied to the Q-mean loss vector."""
    mean = ens.mean_loss_vector(dataset)
    value, _ = uncertainty.linear_max_oracle(spec, mean, groups=dataset.groups)
    return value


def derandomize_predict(ens, X, n_classes=None):
    """Plurality-vote labels; ties go to the lowest label id."""
    shares = ens.vote_shares(X, n_classes=n_classes)
    return np.argmax(shares, axis=1).astype(np.int64)


def deterministic_loss_row(ens, dataset):
    pred = derandomize_predict(ens, dataset.features,
                               n_classes=dataset.n_classes)
    return (pred != dataset.labels).astype(np.float64)


def deterministic_risk(ens, dataset, spec):
    row = deterministic_loss_row(ens, dataset)
    value, _ = uncertainty.linear_max_oracle(spec, row, groups=dataset.groups)
    return value


def gamma_q(ens, dataset):
    """1 / min_i max_y (vote share for y at x_i); <= n_classes always."""
    shares = ens.vote_shares(dataset.features, n_classes=dataset.n_classes)
    worst = shares.max(axis=1).min()
    if worst <= 0:
        raise EnsembleError("zero plurality share")
    return float(1.0 / worst)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

class MetricsReport:
    """Zero-one losses of the derandomized ensemble (percent), overall,
    per class, per group, plus the randomized/deterministic robust risks
    and gamma_Q.  Group fields are absent on ungrouped data."""

    def __init__(self, average, per_class, per_group, randomized,
                 deterministic, gamma):
        self.average = average
        self.per_class = per_class
        self.per_group = per_group
        self.randomized_risk = randomized
        self.deterministic_risk = deterministic
        self.gamma = gamma

    @property
    def worst_class(self):
        return max(self.per_class)

    @property
    def worst_group(self):
        return max(self.per_group) if self.per_group is not None else None

    def to_json(self):
        obj = {"average": self.average,
               "worst_class": self.worst_class,
               "per_class": self.per_class,
               "randomized_risk": self.randomized_risk,
               "deterministic_risk": self.deterministic_risk,
               "gamma_q": self.gamma}
        if self.per_group is not None:
            obj["worst_group"] = self.worst_group
            obj["per_group"] = self.per_group
        return obj


def _mean_or_zero(values):
    return float(values.mean()) if values.size else 0.0


def metrics(ens, dataset, spec):
    row = deterministic_loss_row(ens, dataset)
    per_class = [100.0 * _mean_or_zero(row[dataset.labels == c])
                 for c in range(dataset.n_classes)]
    per_group = None
    if dataset.groups is not None:
        per_group = [100.0 * _mean_or_zero(row[dataset.groups == g])
                     for g in range(dataset.n_groups)]
    return MetricsReport(
        average=100.0 * float(row.mean()),
        per_class=per_class,
        per_group=per_group,
        randomized=100.0 * randomized_risk(ens, dataset, spec),
        deterministic=100.0 * deterministic_risk(ens, dataset, spec),
        gamma=gamma_q(ens, dataset),
    )
