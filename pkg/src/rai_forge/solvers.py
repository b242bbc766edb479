"""Solvers for the robust min-max ensemble game.

Two families plus baselines:

* ``game_play_solve`` — repeated play: the adversary follows the
  entropy-regularized leader on cumulative losses, the learner best
  responds; the ensemble is the uniform average of the responses.
* ``fw_solve`` / ``gen_adaboost_solve`` — greedy descent on the smoothed
  objective: each round re-weights samples through the regularized argmax
  at the current ensemble, best responds, and steps by a convex
  combination (FW) or by adding unnormalized mass (generalized AdaBoost).
* baselines — single-model ERM, classic AdaBoost, online group DRO.

``matrix_game_play`` / ``matrix_fw`` run the same updates against a fixed
finite hypothesis pool (best response = exact row argmin), which makes the
equilibrium-gap certificate computable.
"""

import csv
import json
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng, uncertainty
from .data import train_test_split
from .ensemble import Ensemble
from .learners import TrainBudget, best_response, loss_row

ALGORITHMS = ("game_play", "frank_wolfe", "gen_adaboost",
              "erm", "adaboost", "online_gdro")
ETA_SCHEDULES = ("constant", "linear_in_round")
_BR_STREAM = 0x600D
_VAL_STREAM = 0x7A1


class SolverError(RuntimeError):
    pass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LineSearch:
    mode: str = "none"  # none | ball_around_inverse_t | unit_interval | exact
    radius_fraction: float = 0.5

    def __post_init__(self):
        if self.mode not in ("none", "ball_around_inverse_t",
                             "unit_interval", "exact"):
            raise ConfigError(f"unknown line-search mode {self.mode!r}")
        if not 0.0 < self.radius_fraction < 1.0:
            raise ConfigError("radius fraction must lie in (0, 1)")


@dataclass(frozen=True)
class SolverConfig:
    algorithm: str
    set_spec: object
    rounds: int
    eta: float = 1.0
    eta_growth: float = 2.0
    eta_schedule: str = "constant"
    learner_kind: str = "stump"
    budget: TrainBudget = field(default_factory=TrainBudget)
    hidden: int = 4
    line_search: LineSearch = field(default_factory=LineSearch)
    seed: int = 0
    warmup_rounds: int = 0
    validation_fraction: float = 0.0
    alpha_schedule: str = "default"  # FW only: default 2/(t+2), or inverse_t
    gdro_step: float = 0.1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.rounds < 1:
            raise ConfigError("rounds must be >= 1")
        if not (np.isfinite(self.eta) and self.eta > 0):
            raise ConfigError("eta must be positive")
        if self.eta_growth < 1.0:
            raise ConfigError("eta_growth must be >= 1")
        if self.eta_schedule not in ETA_SCHEDULES:
            raise ConfigError(f"unknown eta schedule {self.eta_schedule!r}")
        if self.alpha_schedule not in ("default", "inverse_t"):
            raise ConfigError(f"unknown alpha schedule {self.alpha_schedule!r}")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError("validation fraction must lie in [0, 1)")


_CONFIG_KEYS = {"algorithm", "set", "rounds", "eta", "eta_growth",
                "eta_schedule", "learner_kind", "budget", "hidden",
                "line_search", "seed", "warmup_rounds",
                "validation_fraction", "alpha_schedule", "gdro_step"}
_BUDGET_KEYS = {"iterations", "batch_size", "learning_rate"}


def config_from_json(obj):
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    extra = set(obj) - _CONFIG_KEYS
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")
    for key in ("algorithm", "set", "rounds"):
        if key not in obj:
            raise ConfigError(f"config missing required key {key!r}")
    try:
        spec = uncertainty.set_spec_from_json(obj["set"])
    except uncertainty.UncertaintySetError as exc:
        raise ConfigError(str(exc)) from exc
    budget_obj = obj.get("budget", {})
    if not isinstance(budget_obj, dict) or set(budget_obj) - _BUDGET_KEYS:
        raise ConfigError("budget accepts iterations/batch_size/learning_rate")
    ls_obj = obj.get("line_search", {"mode": "none"})
    if not isinstance(ls_obj, dict) or set(ls_obj) - {"mode", "radius_fraction"}:
        raise ConfigError("line_search accepts mode and radius_fraction")
    try:
        budget = TrainBudget(
            iterations=int(budget_obj.get("iterations", 1000)),
            batch_size=int(budget_obj.get("batch_size", 32)),
            learning_rate=float(budget_obj.get("learning_rate", 0.1)),
            seed=int(obj.get("seed", 0)))
        ls = LineSearch(mode=str(ls_obj.get("mode", "none")),
                        radius_fraction=float(ls_obj.get("radius_fraction", 0.5)))
        if ls.mode == "exact":
            raise ConfigError("exact line search is API-only")
        return SolverConfig(
            algorithm=str(obj["algorithm"]), set_spec=spec,
            rounds=int(obj["rounds"]), eta=float(obj.get("eta", 1.0)),
            eta_growth=float(obj.get("eta_growth", 2.0)),
            eta_schedule=str(obj.get("eta_schedule", "constant")),
            learner_kind=str(obj.get("learner_kind", "stump")),
            budget=budget, hidden=int(obj.get("hidden", 4)),
            line_search=ls, seed=int(obj.get("seed", 0)),
            warmup_rounds=int(obj.get("warmup_rounds", 0)),
            validation_fraction=float(obj.get("validation_fraction", 0.0)),
            alpha_schedule=str(obj.get("alpha_schedule", "default")),
            gdro_step=float(obj.get("gdro_step", 0.1)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed config: {exc}") from exc


def config_to_json(config):
    return {"algorithm": config.algorithm,
            "set": uncertainty.set_spec_to_json(config.set_spec),
            "rounds": config.rounds, "eta": config.eta,
            "eta_growth": config.eta_growth,
            "eta_schedule": config.eta_schedule,
            "learner_kind": config.learner_kind,
            "budget": {"iterations": config.budget.iterations,
                       "batch_size": config.budget.batch_size,
                       "learning_rate": config.budget.learning_rate},
            "hidden": config.hidden,
            "line_search": {"mode": config.line_search.mode,
                            "radius_fraction": config.line_search.radius_fraction},
            "seed": config.seed, "warmup_rounds": config.warmup_rounds,
            "validation_fraction": config.validation_fraction,
            "alpha_schedule": config.alpha_schedule,
            "gdro_step": config.gdro_step}


# ---------------------------------------------------------------------------
# trace
# ---------------------------------------------------------------------------

@dataclass
class TraceRecord:
    round: int
    train_obj: float
    val_obj: float
    alpha: float
    eta: float
    ne_gap: float = None


def write_trace_csv(records, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["round", "train_obj", "val_obj", "alpha", "eta",
                         "ne_gap"])
        for r in records:
            gap = "" if r.ne_gap is None else f"{r.ne_gap:.17g}"
            writer.writerow([r.round, f"{r.train_obj:.17g}",
                             f"{r.val_obj:.17g}", f"{r.alpha:.17g}",
                             f"{r.eta:.17g}", gap])


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------

class _Run:
    """Bookkeeping shared by the iterative solvers: train/validation split,
    per-round best-response budgets, objective evaluation, eta adaptation."""

    def __init__(self, config, dataset):
        self.config = config
        self.spec = config.set_spec
        if config.validation_fraction > 0.0:
            split_seed = rng.derive_seed(config.seed, _VAL_STREAM)
            self.train, self.val = train_test_split(
                dataset, 1.0 - config.validation_fraction, split_seed)
        else:
            self.train, self.val = dataset, None
        self.eta = config.eta
        self.prev_val = None
        self.records = []

    def strength(self, t):
        """Regularizer strength for round t.  The linear-in-round schedule
        scales with the number of accumulated loss rows (t - 1), which is
        what makes repeated play match the 1/t Frank-Wolfe iterates."""
        if self.config.eta_schedule == "linear_in_round":
            return self.eta * max(t - 1, 1)
        return self.eta

    def respond(self, w, t):
        budget = replace(self.config.budget,
                         seed=rng.derive_seed(self.config.seed, _BR_STREAM + t))
        return best_response(self.train, w, self.config.learner_kind,
                             budget, hidden=self.config.hidden)

    def objective(self, ens, dataset):
        mean = ens.mean_loss_vector(dataset)
        value, _ = uncertainty.linear_max_oracle(self.spec, mean,
                                                 groups=dataset.groups)
        return value

    def record(self, t, ens, alpha):
        ens = ens.normalize()
        train_obj = self.objective(ens, self.train)
        val_obj = (self.objective(ens, self.val)
                   if self.val is not None else train_obj)
        if not (np.isfinite(train_obj) and np.isfinite(val_obj)):
            raise SolverError("objective became non-finite")
        # adaptive heuristic: grow eta whenever the monitored objective rises
        monitored = val_obj
        if self.config.eta_growth > 1.0 and self.prev_val is not None \
                and monitored > self.prev_val + 1e-12:
            self.eta *= self.config.eta_growth
        self.prev_val = monitored
        self.records.append(TraceRecord(round=t, train_obj=train_obj,
                                        val_obj=val_obj, alpha=alpha,
                                        eta=self.eta))

    def adversary_weights(self, cum, t, scale=1.0):
        w = uncertainty.regularized_argmax(
            self.spec, cum, self.strength(t) * scale,
            groups=self.train.groups)
        ok, violations = uncertainty.membership_check(
            self.spec, w, groups=self.train.groups)
        if not ok:
            raise SolverError(f"adversary weights left the set: {violations}")
        return w


def _grid_candidates(mode, radius_fraction, t):
    if mode == "unit_interval":
        return np.arange(1, 22) / 22.0
    center = 1.0 / t
    r = radius_fraction * center
    lo = max(1e-6, center - r)
    hi = min(1.0, center + r)
    return np.linspace(lo, hi, 21)


def line_search_alpha(evaluate, mode, t, radius_fraction=0.5):
    """Pick the step minimizing ``evaluate(alpha)`` over the mode's grid.

    FW ball mode: 21 points in [max(1e-6, 1/t - r), min(1, 1/t + r)] with
    r = radius_fraction/t.  Unit-interval mode: 21 points k/22.  Exact
    mode: golden-section over [0, 1] (API use).  Ties -> smallest alpha.
    """
    if mode == "exact":
        return _golden_min(evaluate, 0.0, 1.0)
    grid = _grid_candidates(mode, radius_fraction, t)
    if grid.size == 0:
        raise ConfigError("line-search grid is empty")
    values = [evaluate(a) for a in grid]
    return float(grid[int(np.argmin(values))])


def _golden_min(f, a, b, tol=1e-10):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    # the minimum may sit at an endpoint of the original interval
    mid = 0.5 * (a + b)
    best = min([0.0, mid, 1.0], key=f)
    return float(best)


def smoothed_objective(ens, dataset, spec, eta):
    """max_w <w, Q-mean loss> + eta * Reg(w) via the regularized argmax."""
    mean = ens.normalize().mean_loss_vector(dataset)
    w = uncertainty.regularized_argmax(spec, mean, eta, groups=dataset.groups)
    return float(w @ mean) + eta * uncertainty.regularizer_value(spec, w)


# ---------------------------------------------------------------------------
# solver family 1: repeated game play
# ---------------------------------------------------------------------------

def game_play_solve(config, dataset):
    """FTRL adversary vs best-response learner; returns (ensemble, trace).

    Round t: w^t = regularized_argmax(set, cumulative losses, eta_t);
    h^t = best_response(w^t); final ensemble is uniform over h^1..h^T.
    """
    run = _Run(config, dataset)
    n = run.train.n
    cum = np.zeros(n)
    hyps = []
    for t in range(1, config.rounds + 1):
        if t <= config.warmup_rounds:
            w = np.full(n, 1.0 / n)
        else:
            w = run.adversary_weights(cum, t)
        h = run.respond(w, t)
        hyps.append(h)
        cum += loss_row(h, run.train)
        ens = Ensemble(hyps, np.ones(len(hyps)))
        run.record(t, ens, alpha=1.0 / t)
    return Ensemble(hyps, np.full(len(hyps), 1.0 / len(hyps)),
                    normalized=True), run.records


# ---------------------------------------------------------------------------
# solver family 2: greedy (Frank-Wolfe and generalized AdaBoost)
# ---------------------------------------------------------------------------

def fw_solve(config, dataset):
    """Frank-Wolfe on the smoothed objective.

    The gradient in Q is the adversary's regularized argmax at the current
    mixture; the step is 2/(t+2) by default, 1/t under the inverse_t
    schedule (whose iterates coincide with game play exactly), or chosen
    by grid line search on the unregularized objective.
    """
    run = _Run(config, dataset)
    n = run.train.n
    inverse_t = config.alpha_schedule == "inverse_t"
    cum = np.zeros(n)        # mass-weighted loss rows, unnormalized
    mass_total = 0.0
    hyps, masses, rows = [], [], []
    for t in range(1, config.rounds + 1):
        if t == 1:
            w = run.adversary_weights(np.zeros(n), 1)
        else:
            # argmax of <w, cum> + eta*mass_total*H(w) equals the gradient
            # at the normalized mixture; keeping the accumulator
            # unnormalized preserves exact equality with game play
            w = run.adversary_weights(cum, 1, scale=max(mass_total, 1.0))
        h = run.respond(w, t)
        row = loss_row(h, run.train)
        if t == 1:
            alpha = 1.0
        elif inverse_t:
            alpha = 1.0 / t
        elif run.config.line_search.mode == "none":
            alpha = 2.0 / (t + 2.0)
        else:
            mean_prev = cum / mass_total
            mode = run.config.line_search.mode
            if mode == "exact":
                # minimizing the smoothed objective (alpha = 0 is a
                # candidate) makes L_eta non-increasing round over round
                def evaluate(a):
                    mixed = (1.0 - a) * mean_prev + a * row
                    w_a = uncertainty.regularized_argmax(
                        run.spec, mixed, run.eta, groups=run.train.groups)
                    return float(w_a @ mixed) + run.eta * \
                        uncertainty.regularizer_value(run.spec, w_a)
            else:
                def evaluate(a):
                    mixed = (1.0 - a) * mean_prev + a * row
                    value, _ = uncertainty.linear_max_oracle(
                        run.spec, mixed, groups=run.train.groups)
                    return value
            alpha = line_search_alpha(evaluate, mode, t,
                                      run.config.line_search.radius_fraction)
        if inverse_t:
            # uniform averaging: integer masses keep the accumulator exact
            masses.append(1.0)
            cum += row
            mass_total += 1.0
        else:
            masses = [m * (1.0 - alpha) for m in masses]
            masses.append(alpha)
            cum = (1.0 - alpha) * cum + alpha * row
            mass_total = 1.0
        hyps.append(h)
        rows.append(row)
        run.record(t, Ensemble(hyps, np.array(masses)), alpha=alpha)
    ens = Ensemble(hyps, np.array(masses)).normalize()
    return ens, run.records


def _ga_exact_mass(spec, cum, row, eta, groups):
    """Mass c > 0 at which the adversary's response to cum + c*row puts
    expected loss exactly 1/2 on the new hypothesis (the first-order
    optimum of the coordinate step).  Closed form on the simplex,
    bisection elsewhere (the derivative is monotone by convexity)."""
    def edge(c):
        w = uncertainty.regularized_argmax(spec, cum + c * row, eta,
                                           groups=groups)
        return float(w @ row)
    if spec.kind == "simplex":
        w = uncertainty.regularized_argmax(spec, cum, eta, groups=groups)
        eps = float(w @ row)
        eps = min(max(eps, 1e-12), 1.0 - 1e-12)
        return max(eta * math.log((1.0 - eps) / eps), 0.0)
    if edge(0.0) >= 0.5:
        return 0.0
    hi = max(eta, 1.0)
    cap = 50.0 * max(eta, 1.0)
    while edge(hi) < 0.5:
        hi *= 2.0
        if hi > cap:
            return cap
    lo = 0.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if edge(mid) < 0.5:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gen_adaboost_solve(config, dataset):
    """Generalized AdaBoost: unnormalized masses, adversary weights from
    the regularized argmax at the cumulative mass-weighted losses.

    With the simplex set and default (exact) stepping this reproduces
    classic AdaBoost: weights exp(sum_s alpha_s loss_s / eta) and
    coefficients eta*ln((1-eps)/eps)."""
    run = _Run(config, dataset)
    n = run.train.n
    cum = np.zeros(n)
    hyps, masses = [], []
    for t in range(1, config.rounds + 1):
        w = run.adversary_weights(cum, 1)  # constant-strength argmax
        h = run.respond(w, t)
        row = loss_row(h, run.train)
        mode = run.config.line_search.mode
        if mode in ("none", "exact"):
            c = _ga_exact_mass(run.spec, cum, row, run.eta,
                               run.train.groups)
        else:
            total = sum(masses)
            def evaluate(a):
                # fraction a of total mass -> raw mass a/(1-a)*total
                c_try = a / (1.0 - a) * total if total > 0 else a
                trial = Ensemble(hyps + [h], np.array(masses + [c_try]))
                return run.objective(trial.normalize(), run.train)
            a = line_search_alpha(evaluate, "unit_interval", t)
            c = a / (1.0 - a) * total if total > 0 else a
        if t == 1 and c <= 0.0:
            c = 1.0  # keep the first member so the ensemble is well formed
        hyps.append(h)
        masses.append(c)
        cum += c * row
        run.record(t, Ensemble(hyps, np.array(masses)), alpha=c)
    ens = Ensemble(hyps, np.array(masses)).normalize()
    return ens, run.records


# ---------------------------------------------------------------------------
# baselines
# ---------------------------------------------------------------------------

def erm_solve(config, dataset):
    """Single model trained on the empirical distribution."""
    run = _Run(config, dataset)
    n = run.train.n
    h = run.respond(np.full(n, 1.0 / n), 1)
    ens = Ensemble([h], np.array([1.0]), normalized=True)
    run.record(1, ens, alpha=1.0)
    return ens, run.records


def adaboost_solve(config, dataset):
    """Classic AdaBoost on weighted zero-one errors (binary or multiclass
    via the same exponential reweighting)."""
    run = _Run(config, dataset)
    n = run.train.n
    w = np.full(n, 1.0 / n)
    hyps, masses = [], []
    for t in range(1, config.rounds + 1):
        h = run.respond(w, t)
        row = loss_row(h, run.train)
        eps = float(w @ row)
        if eps <= 0.0:
            alpha = math.log(1e9)  # coefficient cap for a perfect round
        elif eps >= 0.5:
            warnings.warn("adaboost stopped early: weak error >= 1/2")
            if not hyps:
                hyps.append(h)
                masses.append(1.0)
                run.record(t, Ensemble(hyps, np.array(masses)), alpha=1.0)
            break
        else:
            alpha = 0.5 * math.log((1.0 - eps) / eps)
        hyps.append(h)
        masses.append(alpha)
        w = w * np.exp(alpha * (2.0 * row - 1.0))
        w = w / w.sum()
        run.record(t, Ensemble(hyps, np.array(masses)), alpha=alpha)
        if eps <= 0.0:
            break
    ens = Ensemble(hyps, np.array(masses)).normalize()
    return ens, run.records


def online_gdro_solve(config, dataset):
    """Online group DRO: exponentiated-gradient ascent over group weights,
    best response per round, uniform ensemble of the responses."""
    run = _Run(config, dataset)
    train = run.train
    if train.groups is None:
        raise ConfigError("online_gdro requires grouped data")
    g = train.groups
    k = train.n_groups
    sizes = np.bincount(g, minlength=k).astype(np.float64)
    lam = np.full(k, 1.0 / k)
    hyps = []
    for t in range(1, config.rounds + 1):
        w = (lam / sizes)[g]
        h = run.respond(w, t)
        row = loss_row(h, train)
        group_loss = np.bincount(g, weights=row, minlength=k) / sizes
        lam = lam * np.exp(config.gdro_step * group_loss)
        lam = lam / lam.sum()
        hyps.append(h)
        run.record(t, Ensemble(hyps, np.ones(len(hyps))), alpha=1.0 / t)
    ens = Ensemble(hyps, np.full(len(hyps), 1.0 / len(hyps)),
                   normalized=True)
    return ens, run.records


_SOLVERS = {"game_play": game_play_solve, "frank_wolfe": fw_solve,
            "gen_adaboost": gen_adaboost_solve, "erm": erm_solve,
            "adaboost": adaboost_solve, "online_gdro": online_gdro_solve}


def solve(config, dataset):
    """Dispatch on config.algorithm; returns (normalized ensemble, trace)."""
    if uncertainty.needs_groups(config.set_spec) and dataset.groups is None:
        raise ConfigError("set spec requires grouped data")
    return _SOLVERS[config.algorithm](config, dataset)


# ---------------------------------------------------------------------------
# finite-pool matrix games (exact best response, NE-gap certificates)
# ---------------------------------------------------------------------------

def _pool_best_response(rows, w):
    values = rows @ w
    return int(np.argmin(values))


def ne_gap(spec, rows, q_bar, w_bar, groups=None):
    """Exploitability of the averaged pair: how much the adversary can
    still gain against mean-Q minus how much the learner could still cut
    against mean-w.  Nonnegative, zero exactly at equilibrium."""
    mean_loss = q_bar @ rows
    adv, _ = uncertainty.linear_max_oracle(spec, mean_loss, groups=groups)
    learner = float((rows @ w_bar).min())
    return adv - learner


def matrix_game_play(rows, spec, eta, rounds, eta_schedule="linear_in_round",
                     groups=None, track_gap=True):
    """Repeated play against a fixed pool.  Returns (weight history,
    pool-index history, gap history)."""
    rows = np.asarray(rows, dtype=np.float64)
    H, n = rows.shape
    cum = np.zeros(n)
    w_hist, picks, gaps = [], [], []
    w_sum = np.zeros(n)
    counts = np.zeros(H)
    for t in range(1, rounds + 1):
        strength = eta * max(t - 1, 1) if eta_schedule == "linear_in_round" \
            else eta
        w = uncertainty.regularized_argmax(spec, cum, strength, groups=groups)
        k = _pool_best_response(rows, w)
        cum += rows[k]
        w_sum += w
        counts[k] += 1.0
        w_hist.append(w)
        picks.append(k)
        if track_gap:
            gaps.append(ne_gap(spec, rows, counts / t, w_sum / t,
                               groups=groups))
    return w_hist, picks, gaps


def matrix_fw(rows, spec, eta, rounds, groups=None):
    """Frank-Wolfe with alpha_t = 1/t against a fixed pool; the integer
    accumulator makes its weight sequence bit-identical to
    matrix_game_play with the linear-in-round schedule."""
    rows = np.asarray(rows, dtype=np.float64)
    H, n = rows.shape
    cum = np.zeros(n)
    w_hist, picks = [], []
    for t in range(1, rounds + 1):
        strength = eta * max(t - 1, 1)
        w = uncertainty.regularized_argmax(spec, cum, strength, groups=groups)
        k = _pool_best_response(rows, w)
        cum += rows[k]
        w_hist.append(w)
        picks.append(k)
    return w_hist, picks


def save_config(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_json(config), fh, indent=1)
        fh.write("\n")


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return config_from_json(json.load(fh))
