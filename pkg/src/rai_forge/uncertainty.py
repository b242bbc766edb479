"""Uncertainty sets over sample weights and their maximization oracles.

Everything the adversary does lives here:

* declarative set descriptions (ERM point, full simplex, KL ball, CVaR cap,
  chi-squared ball, group mixtures, intersections) with a strict JSON codec,
* ``regularized_argmax`` — the entropy-regularized follow-the-leader update
  ``argmax_{w in W} <w, cum> + eta * H(w)`` (maximizing sign: weights grow
  with cumulative loss),
* ``linear_max_oracle`` — exact unregularized maximization used for risk
  evaluation and equilibrium-gap certificates,
* ``cvar_capped_projection`` — the sort + binary-search solver for the
  capped-simplex argmax,
* ``membership_check`` — feasibility certification with violation report.

Divergences are taken against the empirical distribution (uniform over the
n samples).  The chi-squared divergence is fixed as
``D(w) = (1/n) * sum f(n w_i)`` with ``f(t) = (t-1)^2 / 2``; the KL ball is
``sum w_i log(n w_i) <= rho``.

Numeric policy: exponentials are evaluated after subtracting the max,
entries below 1e-300 are flushed to zero, weights are renormalized once at
the end, and vertex ties are broken toward the lowest index.
"""

from dataclasses import dataclass, field

import numpy as np

TOL = 1e-8
_FLUSH = 1e-300
_MAX_ITER = 10_000


class UncertaintySetError(ValueError):
    pass


class InfeasibleSetError(UncertaintySetError):
    pass


# ---------------------------------------------------------------------------
# set specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErmSet:
    kind = "erm"


@dataclass(frozen=True)
class SimplexSet:
    kind = "simplex"


@dataclass(frozen=True)
class KlBall:
    rho: float
    kind = "kl"

    def __post_init__(self):
        if not np.isfinite(self.rho) or self.rho < 0:
            raise UncertaintySetError("KL radius must be finite and >= 0")


@dataclass(frozen=True)
class Cvar:
    alpha: float
    kind = "cvar"

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise UncertaintySetError("CVaR level must lie in (0, 1]")


@dataclass(frozen=True)
class Chi2Ball:
    rho: float
    kind = "chi2"

    def __post_init__(self):
        if not np.isfinite(self.rho) or self.rho < 0:
            raise UncertaintySetError("chi2 radius must be finite and >= 0")


@dataclass(frozen=True)
class GroupDro:
    kind = "group"


@dataclass(frozen=True)
class Intersection:
    members: tuple = field(default_factory=tuple)
    kind = "intersection"

    def __post_init__(self):
        flat = []
        for m in self.members:
            if isinstance(m, Intersection):
                flat.extend(m.members)
            else:
                flat.append(m)
        object.__setattr__(self, "members", tuple(flat))
        kinds = [m.kind for m in self.members]
        if len(set(kinds)) < 2:
            raise UncertaintySetError(
                "intersection needs at least two distinct member kinds")
        if kinds.count("group") > 1:
            raise UncertaintySetError(
                "intersection admits at most one group member")


def set_spec_to_json(spec):
    if spec.kind == "cvar":
        return {"kind": "cvar", "alpha": spec.alpha}
    if spec.kind in ("chi2", "kl"):
        return {"kind": spec.kind, "rho": spec.rho}
    if spec.kind == "intersection":
        return {"kind": "intersection",
                "members": [set_spec_to_json(m) for m in spec.members]}
    return {"kind": spec.kind}


def set_spec_from_json(obj):
    """Parse a set spec from a JSON-decoded dict.  Unknown keys rejected."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise UncertaintySetError("set spec must be an object with a 'kind'")
    kind = obj["kind"]
    allowed = {"erm": set(), "simplex": set(), "group": set(),
               "cvar": {"alpha"}, "chi2": {"rho"}, "kl": {"rho"},
               "intersection": {"members"}}
    if kind not in allowed:
        raise UncertaintySetError(f"unknown set kind {kind!r}")
    extra = set(obj) - {"kind"} - allowed[kind]
    if extra:
        raise UncertaintySetError(
            f"unknown keys {sorted(extra)} in {kind!r} set spec")
    missing = allowed[kind] - set(obj)
    if missing:
        raise UncertaintySetError(
            f"missing keys {sorted(missing)} in {kind!r} set spec")
    if kind == "erm":
        return ErmSet()
    if kind == "simplex":
        return SimplexSet()
    if kind == "group":
        return GroupDro()
    if kind == "cvar":
        return Cvar(float(obj["alpha"]))
    if kind == "chi2":
        return Chi2Ball(float(obj["rho"]))
    if kind == "kl":
        return KlBall(float(obj["rho"]))
    members = tuple(set_spec_from_json(m) for m in obj["members"])
    return Intersection(members)


def needs_groups(spec):
    if spec.kind == "group":
        return True
    if spec.kind == "intersection":
        return any(needs_groups(m) for m in spec.members)
    return False


# ---------------------------------------------------------------------------
# small shared pieces
# ---------------------------------------------------------------------------

def entropy(w):
    """Shannon entropy in nats with the 0 log 0 = 0 convention."""
    w = np.asarray(w, dtype=np.float64)
    pos = w[w > 0]
    return float(-(pos * np.log(pos)).sum())


def kl_to_uniform(w):
    w = np.asarray(w, dtype=np.float64)
    n = w.size
    pos = w[w > 0]
    return float((pos * np.log(n * pos)).sum())


def chi2_to_uniform(w):
    w = np.asarray(w, dtype=np.float64)
    n = w.size
    return float(((n * w - 1.0) ** 2).sum() / (2.0 * n))


def regularizer_value(spec, w):
    """Entropy term entering the smoothed objective; 0 for the ERM point
    (the regularizer of a singleton is a constant, normalized away)."""
    if spec.kind == "erm":
        return 0.0
    return entropy(w)


def _finish(w):
    w = np.where(w < _FLUSH, 0.0, w)
    s = w.sum()
    if not np.isfinite(s) or s <= 0:
        raise UncertaintySetError("weight normalization failed")
    return w / s


def _softmax(z):
    e = np.exp(z - z.max())
    return _finish(e)


def _check_losses(losses):
    L = np.asarray(losses, dtype=np.float64)
    if L.ndim != 1 or L.size == 0:
        raise UncertaintySetError("losses must be a nonempty vector")
    if not np.all(np.isfinite(L)):
        raise UncertaintySetError("losses must be finite")
    return L


def _group_index(groups, n):
    if groups is None:
        raise UncertaintySetError("group set needs group ids")
    g = np.asarray(groups, dtype=np.int64)
    if g.shape != (n,):
        raise UncertaintySetError("group vector length must match losses")
    k = int(g.max()) + 1
    sizes = np.bincount(g, minlength=k).astype(np.float64)
    if (sizes == 0).any():
        raise UncertaintySetError("every group id below the max must occur")
    return g, k, sizes


def _group_means(L, g, k, sizes):
    return np.bincount(g, weights=L, minlength=k) / sizes


# ---------------------------------------------------------------------------
# CVaR capped projection (sort + binary search)
# ---------------------------------------------------------------------------

def cvar_capped_projection(scores, cap):
    """Solve  w_i = min(c * scores_i, cap)  with the unique c giving sum 1.

    This is the capped-simplex argmax of the entropy-regularized update for
    the CVaR set.  Sort the scores descending; with m entries capped the
    total mass at the critical scaling c_m = cap/scores_(m) is
    S_m = m*cap + c_m * tail_sum(m), nondecreasing in m, so the correct
    count of capped entries is the largest m with S_m <= 1 (binary search).
    """
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 1 or s.size == 0:
        raise UncertaintySetError("scores must be a nonempty vector")
    if not np.all(np.isfinite(s)) or (s <= 0).any():
        raise UncertaintySetError("scores must be finite and positive")
    n = s.size
    v = float(cap)
    if v * n < 1.0 - 1e-12:
        raise InfeasibleSetError(f"cap {v} infeasible: n*cap < 1")
    w0 = s / s.sum()
    if w0.max() <= v:
        return _finish(w0)
    order = np.argsort(-s, kind="stable")
    y = s[order]
    tail = np.concatenate([np.cumsum(y[::-1])[::-1][1:], [0.0]])
    m_vals = np.arange(1, n + 1, dtype=np.float64)
    total = m_vals * v + (v / y[m_vals.astype(int) - 1]) * tail
    # S_1 < 1 is guaranteed when the uncapped normalization violates the cap
    m = int(np.searchsorted(total > 1.0, True))  # count of S_m <= 1
    if m >= n:
        w = np.full(n, v)
    else:
        c = (1.0 - m * v) / tail[m - 1]
        w = np.minimum(c * s, v)
    return _finish(w)


# ---------------------------------------------------------------------------
# Euclidean projections used by the iterative solvers
# ---------------------------------------------------------------------------

def _project_simplex(z):
    """Euclidean projection onto the probability simplex."""
    z = np.asarray(z, dtype=np.float64)
    u = np.sort(z)[::-1]
    css = (np.cumsum(u) - 1.0) / np.arange(1, z.size + 1)
    k = np.nonzero(u > css)[0][-1]
    return np.clip(z - css[k], 0.0, None)


# ---------------------------------------------------------------------------
# intersection engine
#
# With a group member present the feasible region is parameterized by group
# masses v (w uniform within groups); without one the "atoms" are the
# samples themselves (sizes all 1).  Either way the problem is
#   maximize  <v, m> + eta * (-sum v log(v / sizes))
# over the atom simplex cut by per-atom caps (from CVaR/ERM members) and
# divergence balls.  All single-ball cases are solved exactly through
# their KKT systems: caps alone reduce to a capped water-fill, a KL ball
# only shifts the softmax temperature (one dual bisection), and a chi2
# ball adds a per-atom stationarity equation solved by Newton inside two
# nested dual bisections.  Mixing KL and chi2 balls falls back to SLSQP.
# ---------------------------------------------------------------------------

def _log_capped_waterfill(log_scores, caps):
    """Exact solution of  v_i = min(c * exp(log_scores_i), caps_i)  with
    sum v = 1, stable for log-scores spanning thousands of nats.

    Atoms saturate in order of log(cap) - log(score).  The total mass at
    the k-th breakpoint (atoms before k at their caps, c touching atom
    k's cap) is nondecreasing in k, so the crossing segment is found by
    binary search; each evaluation re-centers the exponentials on the
    segment's own scale, so no ordering is ever lost to underflow.
    """
    ls = np.asarray(log_scores, dtype=np.float64)
    caps = np.minimum(np.asarray(caps, dtype=np.float64), 1.0)
    n = ls.size
    if caps.sum() < 1.0 - 1e-9:
        raise InfeasibleSetError("caps sum to less than 1")
    order = np.argsort(np.log(caps) - ls, kind="stable")
    ls_s, caps_s = ls[order], caps[order]
    prefix = np.concatenate([[0.0], np.cumsum(caps_s)])

    def total(k):
        tail = np.exp(ls_s[k:] - ls_s[k])
        return prefix[k] + caps_s[k] * float(tail.sum())

    if total(0) >= 1.0:
        k = 0
    elif total(n - 1) < 1.0:
        k = n
    else:
        lo, hi = 0, n - 1  # total(lo) < 1 <= total(hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if total(mid) < 1.0:
                lo = mid
            else:
                hi = mid
        k = hi
    w = np.empty(n)
    if k == n:
        w[order] = caps_s  # everything saturated; feasibility checked above
        return w
    resid = 1.0 - prefix[k]
    tail = np.exp(ls_s[k:] - ls_s[k:].max())
    w[order[:k]] = caps_s[:k]
    w[order[k:]] = resid * tail / tail.sum()
    return w


def _capped_linear_max(m, caps):
    """max <v, m> over the capped simplex: fill caps in descending order
    of m (ties toward the lowest index)."""
    caps = np.minimum(caps, 1.0)
    order = np.argsort(-m, kind="stable")
    v = np.zeros_like(m)
    remaining = 1.0
    for i in order:
        take = min(caps[i], remaining)
        v[i] = take
        remaining -= take
        if remaining <= 1e-15:
            break
    if remaining > 1e-9:
        raise InfeasibleSetError("caps sum to less than 1")
    return v


class _Atoms:
    """Atom-space view of an intersection's members."""

    def __init__(self, members, L, groups, n):
        if any(m.kind == "group" for m in members):
            if groups is None:
                raise UncertaintySetError("group set needs group ids")
            g, k, sizes = _group_index(groups, n)
            self.expand = lambda v: (v / sizes)[g]
            self.m = _group_means(L, g, k, sizes)
            self.sizes = sizes
        else:
            self.expand = lambda v: v
            self.m = L
            self.sizes = np.ones(n)
        self.base = self.sizes / n  # atom masses of the empirical point
        self.caps = np.minimum(np.ones_like(self.base), 1.0)
        self.chi2_radius2 = None  # ball form: sum (v-base)^2/sizes <= r2
        self.kl_rho = None        # ball form: sum v log(v/base) <= rho
        for mem in members:
            if mem.kind in ("group", "simplex"):
                continue
            if mem.kind == "erm":
                self.caps = np.minimum(self.caps, self.base)
            elif mem.kind == "cvar":
                self.caps = np.minimum(self.caps, self.sizes / (mem.alpha * n))
            elif mem.kind == "chi2":
                r2 = 2.0 * mem.rho / n
                self.chi2_radius2 = r2 if self.chi2_radius2 is None \
                    else min(self.chi2_radius2, r2)
            elif mem.kind == "kl":
                self.kl_rho = mem.rho if self.kl_rho is None \
                    else min(self.kl_rho, mem.rho)
            else:
                raise UncertaintySetError(
                    f"unsupported intersection member {mem.kind!r}")
        if (self.base > self.caps + TOL).any():
            raise InfeasibleSetError(
                "intersection excludes the empirical point")

    def kl_value(self, v):
        pos = v > 0
        return float((v[pos] * np.log(v[pos] / self.base[pos])).sum())

    def chi2_value(self, v):
        d = v - self.base
        return float((d * d / self.sizes).sum())

    def objective(self, v, eta):
        lin = float(v @ self.m)
        if eta == 0.0:
            return lin
        pos = v > 0
        ent = float(-(v[pos] * np.log(v[pos] / self.sizes[pos])).sum())
        return lin + eta * ent

    def softmax_fill(self, t):
        """Capped water-fill of scores sizes*exp(m/t) — the exact KKT
        family for entropy/KL-tempered maximization under caps."""
        g = (self.m - self.m.max()) / t + np.log(self.sizes)
        return _log_capped_waterfill(g, self.caps)


def _atoms_kl_solve(at, eta):
    """Exact argmax with a KL ball: temperature bisection on eta + mu."""
    v0 = at.softmax_fill(eta) if eta > 0 else _capped_linear_max(at.m, at.caps)
    if at.kl_value(v0) <= at.kl_rho:
        return v0
    lo = 0.0 if eta > 0 else 1e-12
    hi = max(eta, 1.0)
    while at.kl_value(at.softmax_fill(eta + hi)) > at.kl_rho:
        hi *= 2.0
        if hi > 1e300:
            return at.base.copy()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if at.kl_value(at.softmax_fill(eta + mid)) > at.kl_rho:
            lo = mid
        else:
            hi = mid
    return at.softmax_fill(eta + hi)


def _atoms_chi2_solve(at, eta):
    """Exact argmax with a chi2 ball via its KKT system.

    With ball multiplier mu and sum multiplier theta, stationarity at an
    interior coordinate reads
        eta*log(v) + (mu/sizes)*v = m - theta - eta + eta*log(sizes)
                                    + mu*base/sizes
    (for eta = 0 it is linear in v); the box [0, caps] clips the root.
    The total mass is decreasing in theta and the ball value decreasing
    in mu, giving two nested monotone bisections.  The per-coordinate
    root is found by Newton in u = log v, where the left side is convex
    and increasing, so iterating from a point above the root converges
    monotonically.
    """
    m, s, b, caps, r2 = at.m, at.sizes, at.base, at.caps, at.chi2_radius2

    # mu = 0: plain caps-only solution; accept if inside the ball
    v0 = at.softmax_fill(eta) if eta > 0 else _capped_linear_max(m, caps)
    if at.chi2_value(v0) <= r2:
        return v0

    log_caps = np.log(caps)

    def v_of(mu, theta):
        if eta == 0.0:
            return np.clip(b + s * (m - theta) / mu, 0.0, caps)
        c = m - theta - eta + eta * np.log(s) + mu * b / s
        u = np.minimum(c / eta, log_caps)
        for _ in range(40):
            e = (mu / s) * np.exp(u)
            u = np.minimum(u - (eta * u + e - c) / (eta + e), 700.0)
        return np.minimum(np.exp(u), caps)

    def mass_root(mu):
        """theta solving sum v(mu, theta) = 1 (mass decreasing in theta)."""
        lo, hi = float(m.min()) - eta - 1.0, float(m.max()) + 1.0
        for _ in range(60):
            if v_of(mu, lo).sum() >= 1.0:
                break
            lo = 2.0 * lo - hi
        for _ in range(60):
            if v_of(mu, hi).sum() <= 1.0:
                break
            hi = 2.0 * hi - lo
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            if v_of(mu, mid).sum() > 1.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def solved(mu):
        return v_of(mu, mass_root(mu))

    lo, hi = 0.0, 1.0
    while at.chi2_value(solved(hi)) > r2:
        hi *= 2.0
        if hi > 1e300:
            return at.base.copy()
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if at.chi2_value(solved(mid)) > r2:
            lo = mid
        else:
            hi = mid
    return solved(hi)


def _atoms_slsqp(at, eta):
    """General fallback when KL and chi2 balls are both present."""
    from scipy.optimize import minimize
    from scipy.special import xlogy

    def neg_obj(v):
        return -(float(v @ at.m)
                 - eta * float(xlogy(v, v / at.sizes).sum()))

    cons = [{"type": "eq", "fun": lambda v: v.sum() - 1.0}]
    if at.kl_rho is not None:
        cons.append({"type": "ineq",
                     "fun": lambda v: at.kl_rho
                     - float(xlogy(v, v / at.base).sum())})
    if at.chi2_radius2 is not None:
        cons.append({"type": "ineq",
                     "fun": lambda v: at.chi2_radius2 - at.chi2_value(v)})
    bounds = [(0.0, float(c)) for c in at.caps]
    res = minimize(neg_obj, at.base.copy(), method="SLSQP", bounds=bounds,
                   constraints=cons, options={"maxiter": 500, "ftol": 1e-12})
    if not res.success and not np.isfinite(neg_obj(res.x)):
        raise UncertaintySetError(f"intersection solve failed: {res.message}")
    return np.clip(res.x, 0.0, None)


def _intersection_solve(spec, L, eta, groups):
    """Shared engine: eta = 0 gives the linear oracle, eta > 0 the
    regularized argmax.  Returns the weight vector over samples."""
    at = _Atoms(list(spec.members), L, groups, L.size)
    has_kl = at.kl_rho is not None
    has_chi2 = at.chi2_radius2 is not None
    if has_kl and has_chi2:
        v = _atoms_slsqp(at, eta)
    elif has_kl:
        v = _atoms_kl_solve(at, eta)
    elif has_chi2:
        v = _atoms_chi2_solve(at, eta)
    elif eta > 0:
        v = at.softmax_fill(eta)
    else:
        v = _capped_linear_max(at.m, at.caps)
    return _finish(at.expand(v))


# ---------------------------------------------------------------------------
# regularized argmax (FTRL update)
# ---------------------------------------------------------------------------

def regularized_argmax(spec, cum_losses, eta, groups=None):
    """argmax over the set of  <w, cum_losses> + eta * H(w).

    Maximizing sign convention: weights increase with cumulative loss.
    Closed forms for ERM / simplex / CVaR / group mixtures; 1-D dual
    bisection for the KL ball; exact KKT solves for the chi2 ball and
    intersections.
    """
    L = _check_losses(cum_losses)
    if not (np.isfinite(eta) and eta > 0):
        raise UncertaintySetError("regularization strength must be positive")
    n = L.size
    kind = spec.kind
    if kind == "erm":
        return np.full(n, 1.0 / n)
    if kind == "simplex":
        return _softmax(L / eta)
    if kind == "cvar":
        # same capped fill as cvar_capped_projection, but evaluated in log
        # space so tiny eta cannot underflow the score ordering away
        w = _log_capped_waterfill((L - L.max()) / eta,
                                  np.full(n, 1.0 / (spec.alpha * n)))
        return _finish(w)
    if kind == "group":
        g, k, sizes = _group_index(groups, n)
        m = _group_means(L, g, k, sizes)
        # per-sample closed form: u_i = exp(mean_{g(i)}/eta), normalized over
        # samples, i.e. group masses proportional to size_k * exp(mean_k/eta)
        u = np.exp((m[g] - m.max()) / eta)
        return _finish(u)
    if kind == "kl":
        w0 = _softmax(L / eta)
        if kl_to_uniform(w0) <= spec.rho:
            return w0
        # tighten with an extra multiplier: w(mu) = softmax(L/(eta+mu)),
        # KL decreasing in mu
        lo, hi = 0.0, max(eta, 1.0)
        while kl_to_uniform(_softmax(L / (eta + hi))) > spec.rho:
            hi *= 2.0
            if hi > 1e300:
                return np.full(n, 1.0 / n)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if kl_to_uniform(_softmax(L / (eta + mid))) > spec.rho:
                lo = mid
            else:
                hi = mid
        return _softmax(L / (eta + hi))
    if kind == "chi2":
        return _chi2_argmax(L, spec.rho, eta)
    if kind == "intersection":
        return _intersection_solve(spec, L, eta, groups)
    raise UncertaintySetError(f"unknown set kind {kind!r}")


def _chi2_argmax(L, rho, eta):
    """Exact chi2-ball argmax: the single-ball, cap-free instance of the
    intersection KKT solver."""
    at = _Atoms([Chi2Ball(rho)], L, None, L.size)
    return _finish(_atoms_chi2_solve(at, eta))


# ---------------------------------------------------------------------------
# linear maximization oracle
# ---------------------------------------------------------------------------

def linear_max_oracle(spec, losses, groups=None):
    """max over the set of <w, losses>, returned as (value, attaining w)."""
    L = _check_losses(losses)
    n = L.size
    kind = spec.kind
    if kind == "erm":
        w = np.full(n, 1.0 / n)
        return float(L.mean()), w
    if kind == "simplex":
        idx = int(np.argmax(L))
        w = np.zeros(n)
        w[idx] = 1.0
        return float(L[idx]), w
    if kind == "cvar":
        cap = 1.0 / (spec.alpha * n)
        order = np.argsort(-L, kind="stable")
        w = np.zeros(n)
        remaining = 1.0
        for i in order:
            m = min(cap, remaining)
            w[i] = m
            remaining -= m
            if remaining <= 0:
                break
        return float(w @ L), w
    if kind == "group":
        g, k, sizes = _group_index(groups, n)
        means = _group_means(L, g, k, sizes)
        worst = int(np.argmax(means))
        w = np.where(g == worst, 1.0 / sizes[worst], 0.0)
        return float(means[worst]), w
    if kind == "kl":
        return _kl_linear(L, spec.rho)
    if kind == "chi2":
        return _chi2_linear(L, spec.rho)
    if kind == "intersection":
        w = _intersection_solve(spec, L, 0.0, groups)
        return float(w @ L), w
    raise UncertaintySetError(f"unknown set kind {kind!r}")


def _kl_linear(L, rho):
    """KL-ball linear oracle via golden-section on the 1-D dual
    lambda * log E exp(L/lambda) + lambda * rho."""
    n = L.size
    if rho == 0.0 or np.ptp(L) == 0.0:
        return float(L.mean()), np.full(n, 1.0 / n)

    shifted = L - L.max()

    def dual(lam):
        # lam*log((1/n) sum e^{L/lam}) + lam*rho, stabilized by the shift
        return (L.max() + lam * (np.log(np.exp(shifted / lam).sum()) -
                                 np.log(n)) + lam * rho)

    lo, hi = 1e-9, 1.0
    while dual(2.0 * hi) < dual(hi):
        hi *= 2.0
        if hi > 1e12:
            break
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, 2.0 * hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = dual(c), dual(d)
    while b - a > 1e-8 * max(1.0, b):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = dual(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = dual(d)
    lam = 0.5 * (a + b)
    w = _softmax(L / lam)
    if kl_to_uniform(w) > rho + 1e-10:
        # polish feasibility: KL(softmax(L/lam)) is decreasing in lam
        lo2, hi2 = lam, max(2.0 * lam, 1.0)
        while kl_to_uniform(_softmax(L / hi2)) > rho:
            hi2 *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo2 + hi2)
            if kl_to_uniform(_softmax(L / mid)) > rho:
                lo2 = mid
            else:
                hi2 = mid
        w = _softmax(L / hi2)
    return float(w @ L), w


def _chi2_linear(L, rho):
    """Chi2-ball linear oracle: closed form when nothing clips, otherwise
    bisection on tau in the family w ∝ relu(L - tau)."""
    n = L.size
    if rho == 0.0 or np.ptp(L) == 0.0:
        return float(L.mean()), np.full(n, 1.0 / n)
    centered = L - L.mean()
    norm2 = float((centered ** 2).sum())
    t = np.sqrt(2.0 * rho / (n * norm2))
    w = 1.0 / n + t * centered
    if w.min() >= 0.0:
        return float(w @ L), w
    # vertex-mixture check: can the ball afford uniform-on-argmax?
    m = int((L == L.max()).sum())
    top = np.where(L == L.max(), 1.0 / m, 0.0)
    if chi2_to_uniform(top) <= rho:
        return float(L.max()), top

    def w_of(tau):
        p = np.clip(L - tau, 0.0, None)
        return p / p.sum()

    lo = float(L.min()) - np.ptp(L) - 1.0
    while chi2_to_uniform(w_of(lo)) > rho:
        lo = float(L.min()) - 2.0 * (float(L.min()) - lo) - 1.0
    hi = float(L.max()) - 1e-15 * max(1.0, abs(float(L.max())))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if chi2_to_uniform(w_of(mid)) > rho:
            hi = mid
        else:
            lo = mid
    w = _finish(w_of(lo))
    return float(w @ L), w


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def membership_check(spec, w, groups=None):
    """Certify w ∈ W within tolerance 1e-8.

    Returns (ok, violations) where violations is a list of
    (constraint description, slack) pairs for everything that failed.
    """
    w = np.asarray(w, dtype=np.float64)
    n = w.size
    violations = []
    if (w < -TOL).any():
        violations.append(("nonnegative", float(-w.min())))
    if abs(w.sum() - 1.0) > 1e-9:
        violations.append(("sums to 1", float(abs(w.sum() - 1.0))))

    def check(spec):
        kind = spec.kind
        if kind in ("simplex",):
            return
        if kind == "erm":
            dev = float(np.max(np.abs(w - 1.0 / n)))
            if dev > TOL:
                violations.append(("equals empirical point", dev))
        elif kind == "cvar":
            cap = 1.0 / (spec.alpha * n)
            excess = float((w - cap).max())
            if excess > TOL:
                violations.append((f"cap 1/(alpha*n)={cap:.6g}", excess))
        elif kind == "kl":
            d = kl_to_uniform(np.clip(w, 0.0, None))
            if d > spec.rho + TOL:
                violations.append((f"KL <= {spec.rho}", d - spec.rho))
        elif kind == "chi2":
            d = chi2_to_uniform(w)
            if d > spec.rho + TOL:
                violations.append((f"chi2 <= {spec.rho}", d - spec.rho))
        elif kind == "group":
            g, k, sizes = _group_index(groups, n)
            masses = np.bincount(g, weights=w, minlength=k)
            dev = float(np.max(np.abs(w - (masses / sizes)[g])))
            if dev > TOL:
                violations.append(("uniform within groups", dev))
        elif kind == "intersection":
            for m in spec.members:
                check(m)
        else:
            raise UncertaintySetError(f"unknown set kind {kind!r}")

    check(spec)
    return (not violations), violations
