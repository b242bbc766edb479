"""Solvers: config codec, traces, the two solver families, baselines,
and the repeated-play / Frank-Wolfe equivalence on finite pools."""

import json
import math

import numpy as np
import pytest

from rai_forge.data import Dataset
from rai_forge.ensemble import Ensemble, ensemble_to_json
from rai_forge.learners import Stump, TrainBudget
from rai_forge.solvers import (
    ConfigError, LineSearch, SolverConfig, TraceRecord, _Run,
    adaboost_solve, config_from_json, config_to_json, erm_solve, fw_solve,
    game_play_solve, gen_adaboost_solve, line_search_alpha, load_config,
    matrix_fw, matrix_game_play, ne_gap, online_gdro_solve, save_config,
    smoothed_objective, solve, write_trace_csv,
)
from rai_forge.uncertainty import (
    Chi2Ball, Cvar, ErmSet, GroupDro, Intersection, KlBall, SimplexSet,
    linear_max_oracle, regularized_argmax,
)


def _alternating():
    return Dataset([[0.0], [1.0], [2.0], [3.0]], [0, 1, 1, 0])


def _separable():
    return Dataset([[0.0], [1.0], [5.0], [6.0]], [0, 0, 1, 1])


def _xor_corners():
    return Dataset([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]],
                   [0, 1, 1, 0])


def _cfg(**kw):
    base = dict(algorithm="game_play", set_spec=SimplexSet(), rounds=3,
                eta=0.5, eta_growth=1.0)
    base.update(kw)
    return SolverConfig(**base)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ConfigError):
        _cfg(algorithm="sgd")
    with pytest.raises(ConfigError):
        _cfg(rounds=0)
    with pytest.raises(ConfigError):
        _cfg(eta=0.0)
    with pytest.raises(ConfigError):
        _cfg(eta=float("inf"))
    with pytest.raises(ConfigError):
        _cfg(eta_growth=0.5)
    with pytest.raises(ConfigError):
        _cfg(eta_schedule="sqrt")
    with pytest.raises(ConfigError):
        _cfg(alpha_schedule="harmonic")
    with pytest.raises(ConfigError):
        _cfg(validation_fraction=1.0)


def test_line_search_validation():
    with pytest.raises(ConfigError):
        LineSearch(mode="bisect")
    with pytest.raises(ConfigError):
        LineSearch(mode="unit_interval", radius_fraction=0.0)
    with pytest.raises(ConfigError):
        LineSearch(radius_fraction=1.0)


def test_config_json_round_trip():
    config = SolverConfig(
        algorithm="frank_wolfe",
        set_spec=Cvar(alpha=0.7),
        rounds=12, eta=0.25, eta_growth=2.0,
        eta_schedule="linear_in_round", learner_kind="linear",
        budget=TrainBudget(iterations=200, batch_size=16,
                           learning_rate=0.05, seed=3),
        hidden=6, line_search=LineSearch(mode="unit_interval"),
        seed=3, warmup_rounds=1, validation_fraction=0.2,
        alpha_schedule="inverse_t", gdro_step=0.2)
    assert config_from_json(config_to_json(config)) == config


def test_config_json_defaults():
    config = config_from_json(
        {"algorithm": "erm", "set": {"kind": "erm"}, "rounds": 1, "seed": 7})
    assert config.eta == 1.0
    assert config.budget.seed == 7
    assert config.line_search.mode == "none"
    assert config.learner_kind == "stump"


def test_config_json_strict():
    good = {"algorithm": "erm", "set": {"kind": "erm"}, "rounds": 1}
    with pytest.raises(ConfigError, match="unknown config keys"):
        config_from_json({**good, "verbose": True})
    with pytest.raises(ConfigError, match="missing required"):
        config_from_json({"algorithm": "erm", "rounds": 1})
    with pytest.raises(ConfigError):
        config_from_json({**good, "budget": {"steps": 5}})
    with pytest.raises(ConfigError):
        config_from_json({**good, "line_search": {"mode": "none", "k": 1}})
    with pytest.raises(ConfigError, match="malformed"):
        config_from_json({**good, "rounds": "many"})
    with pytest.raises(ConfigError):
        config_from_json({**good, "set": {"kind": "ball"}})
    with pytest.raises(ConfigError):
        config_from_json(["not", "an", "object"])


def test_exact_line_search_is_api_only():
    good = {"algorithm": "frank_wolfe", "set": {"kind": "simplex"},
            "rounds": 2, "line_search": {"mode": "exact"}}
    with pytest.raises(ConfigError, match="API-only"):
        config_from_json(good)
    # ... but the API accepts it.
    _cfg(line_search=LineSearch(mode="exact"))


def test_config_save_load(tmp_path):
    config = _cfg(set_spec=KlBall(rho=0.3), rounds=5)
    path = tmp_path / "config.json"
    save_config(config, path)
    assert load_config(path) == config


# ---------------------------------------------------------------------------
# trace csv
# ---------------------------------------------------------------------------

def test_trace_csv_format(tmp_path):
    records = [TraceRecord(round=1, train_obj=1 / 3, val_obj=0.5,
                           alpha=1.0, eta=0.25),
               TraceRecord(round=2, train_obj=0.25, val_obj=0.125,
                           alpha=0.5, eta=0.25, ne_gap=1e-3)]
    path = tmp_path / "trace.csv"
    write_trace_csv(records, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "round,train_obj,val_obj,alpha,eta,ne_gap"
    assert lines[1].endswith(",")  # missing gap -> empty field
    first = lines[1].split(",")
    assert float(first[1]) == 1 / 3  # %.17g round-trips doubles
    assert lines[2].split(",")[5] == "0.001"
    assert len(lines) == 3


# ---------------------------------------------------------------------------
# smoothed objective and line search
# ---------------------------------------------------------------------------

def _pennies_pair():
    """Two hypotheses whose loss rows are (0,1) and (1,0)."""
    ds = Dataset([[0.0], [1.0]], [0, 1])
    h_right = Stump(0, 0.5, 0, 0)   # errs on sample 1
    h_left = Stump(0, 0.5, 1, 1)    # errs on sample 0
    return ds, h_right, h_left


def test_smoothed_objective_toy_pair():
    ds, h_a, h_b = _pennies_pair()
    ens = Ensemble([h_a, h_b], [0.5, 0.5])
    # mean loss (1/2, 1/2): linear part 1/2, entropy maximal at ln 2
    assert smoothed_objective(ens, ds, SimplexSet(), 1.0) \
        == pytest.approx(0.5 + math.log(2.0), rel=1e-12)


def test_smoothed_objective_vanishing_eta_limit():
    gen = np.random.default_rng(3)
    ds = Dataset(gen.normal(size=(6, 1)), gen.integers(0, 2, size=6),
                 n_classes=2)
    ens = Ensemble([Stump(0, float(gen.normal()), 0, 1) for _ in range(3)],
                   gen.uniform(0.2, 1.0, size=3))
    for spec in (SimplexSet(), Cvar(alpha=0.5)):
        mean = ens.normalize().mean_loss_vector(ds)
        exact, _ = linear_max_oracle(spec, mean)
        assert abs(smoothed_objective(ens, ds, spec, 1e-6) - exact) <= 1e-3


def test_smoothing_sandwich():
    """L <= L_eta <= L + eta*ln(n) for the entropy-regularized sets."""
    gen = np.random.default_rng(8)
    for _ in range(40):
        n = int(gen.integers(2, 7))
        ds = Dataset(gen.normal(size=(n, 1)), gen.integers(0, 2, size=n),
                     n_classes=2)
        ens = Ensemble([Stump(0, float(gen.normal()), 0, 1)
                        for _ in range(3)], gen.uniform(0.1, 1.0, size=3))
        eta = float(gen.uniform(0.05, 1.0))
        mean = ens.normalize().mean_loss_vector(ds)
        for spec in (SimplexSet(), Cvar(alpha=0.6)):
            plain, _ = linear_max_oracle(spec, mean)
            smooth = smoothed_objective(ens, ds, spec, eta)
            assert plain - 1e-12 <= smooth <= plain + eta * math.log(n) + 1e-12


def test_smoothed_objective_simplex_is_logsumexp():
    ds = Dataset([[0.0], [1.0]], [0, 1])
    ens = Ensemble([Stump(0, 5.0, 0, 0)], [1.0])  # mean loss [0, 1]
    eta = 0.5
    want = eta * math.log(math.exp(0.0) + math.exp(1.0 / eta))
    assert smoothed_objective(ens, ds, SimplexSet(), eta) \
        == pytest.approx(want, rel=1e-12)


def test_smoothed_objective_erm_is_mean():
    ds = Dataset([[0.0], [1.0]], [0, 1])
    ens = Ensemble([Stump(0, 5.0, 0, 0)], [1.0])
    assert smoothed_objective(ens, ds, ErmSet(), 0.7) == pytest.approx(0.5)


def test_line_search_unit_interval_grid():
    got = line_search_alpha(lambda a: abs(a - 3.0 / 22.0), "unit_interval", 5)
    assert got == pytest.approx(3.0 / 22.0, abs=1e-15)


def test_line_search_ball_grid():
    # t=2: center 1/2, radius 1/4 -> grid linspace(1/4, 3/4, 21)
    got = line_search_alpha(lambda a: (a - 0.5) ** 2,
                            "ball_around_inverse_t", 2, radius_fraction=0.5)
    assert got == pytest.approx(0.5, abs=1e-12)
    lo = line_search_alpha(lambda a: a, "ball_around_inverse_t", 2,
                           radius_fraction=0.5)
    assert lo == pytest.approx(0.25, abs=1e-12)


def test_line_search_tie_prefers_smallest():
    got = line_search_alpha(lambda a: 0.0, "unit_interval", 3)
    assert got == pytest.approx(1.0 / 22.0, abs=1e-15)


def test_line_search_exact_mode():
    got = line_search_alpha(lambda a: (a - 0.3) ** 2, "exact", 1)
    assert got == pytest.approx(0.3, abs=1e-6)
    assert line_search_alpha(lambda a: a, "exact", 1) == 0.0
    assert line_search_alpha(lambda a: -a, "exact", 1) == 1.0


def test_line_search_ball_grid_stays_positive_at_round_one():
    # t=1: the candidate interval is [max(1e-6, 1 - r), 1]
    got = line_search_alpha(lambda a: a, "ball_around_inverse_t", 1,
                            radius_fraction=0.5)
    assert got == pytest.approx(0.5, abs=1e-12)
    tiny = line_search_alpha(lambda a: a, "ball_around_inverse_t", 1,
                             radius_fraction=0.999999999)
    assert tiny >= 1e-6


def test_line_search_decreasing_objective_takes_largest():
    got = line_search_alpha(lambda a: -a, "unit_interval", 4)
    assert got == pytest.approx(21.0 / 22.0, abs=1e-15)


# ---------------------------------------------------------------------------
# game play
# ---------------------------------------------------------------------------

def test_game_play_uniform_ensemble():
    ens, records = game_play_solve(_cfg(rounds=4), _alternating())
    assert len(ens) == 4
    assert ens.normalized
    np.testing.assert_allclose(ens.masses, 0.25)
    assert [r.round for r in records] == [1, 2, 3, 4]
    assert [r.alpha for r in records] == [1.0, 0.5, 1 / 3, 0.25]
    assert all(np.isfinite(r.train_obj) for r in records)


def test_game_play_warmup_keeps_uniform_weights():
    # With warmup over every round the adversary never moves, so the
    # best response is the same stump each time.
    config = _cfg(rounds=3, eta=0.05, warmup_rounds=3)
    ens, _ = game_play_solve(config, _alternating())
    assert len(set(ens.hypotheses)) == 1
    moved, _ = game_play_solve(_cfg(rounds=3, eta=0.05), _alternating())
    assert len(set(moved.hypotheses)) > 1


def test_game_play_validation_split():
    gen = np.random.default_rng(2)
    ds = Dataset(gen.normal(size=(8, 2)), gen.integers(0, 2, size=8),
                 n_classes=2)
    run = _Run(_cfg(validation_fraction=0.25), ds)
    assert run.train.n == 6
    assert run.val.n == 2
    ens, records = game_play_solve(_cfg(validation_fraction=0.25), ds)
    assert all(np.isfinite(r.val_obj) for r in records)


def test_eta_adaptation_on_rising_objective():
    ds = Dataset([[0.0], [1.0]], [0, 1])
    run = _Run(_cfg(eta=0.5, eta_growth=2.0), ds)
    perfect = Ensemble([Stump(0, 0.5, 0, 1)], [1.0])
    bad = Ensemble([Stump(0, 5.0, 0, 0)], [1.0])
    run.record(1, perfect, alpha=1.0)
    assert run.eta == 0.5
    run.record(2, bad, alpha=0.5)
    assert run.eta == 1.0
    assert run.records[1].eta == 1.0


def test_eta_adaptation_disabled_at_growth_one():
    ds = Dataset([[0.0], [1.0]], [0, 1])
    run = _Run(_cfg(eta=0.5, eta_growth=1.0), ds)
    run.record(1, Ensemble([Stump(0, 0.5, 0, 1)], [1.0]), alpha=1.0)
    run.record(2, Ensemble([Stump(0, 5.0, 0, 0)], [1.0]), alpha=0.5)
    assert run.eta == 0.5


# ---------------------------------------------------------------------------
# frank-wolfe
# ---------------------------------------------------------------------------

def test_fw_default_schedule_masses():
    ens, records = fw_solve(_cfg(algorithm="frank_wolfe", rounds=3),
                            _alternating())
    # alpha_1 = 1, alpha_t = 2/(t+2) afterwards
    assert [r.alpha for r in records] == [1.0, 0.5, 0.4]
    np.testing.assert_allclose(ens.masses.sum(), 1.0)
    np.testing.assert_allclose(ens.masses, [0.5 * 0.6, 0.5 * 0.6, 0.4])


def test_fw_inverse_t_matches_game_play():
    """The 1/t-averaged greedy iterates coincide with repeated play under
    the linear-in-round regularizer schedule."""
    game_cfg = _cfg(rounds=6, eta=0.2, eta_schedule="linear_in_round")
    fw_cfg = _cfg(algorithm="frank_wolfe", rounds=6, eta=0.2,
                  alpha_schedule="inverse_t")
    for ds in (_alternating(), _separable()):
        ens_g, rec_g = game_play_solve(game_cfg, ds)
        ens_f, rec_f = fw_solve(fw_cfg, ds)
        assert ens_g.hypotheses == ens_f.hypotheses
        np.testing.assert_array_equal(ens_g.masses, ens_f.normalize().masses)
        assert [r.train_obj for r in rec_g] == [r.train_obj for r in rec_f]


def test_fw_line_search_steps_stay_in_ball():
    config = _cfg(algorithm="frank_wolfe", rounds=5, eta=0.2,
                  line_search=LineSearch(mode="ball_around_inverse_t",
                                         radius_fraction=0.5))
    _, records = fw_solve(config, _alternating())
    for r in records[1:]:
        center = 1.0 / r.round
        assert center * 0.5 - 1e-12 <= r.alpha <= center * 1.5 + 1e-12


def test_fw_exact_line_search_runs():
    config = _cfg(algorithm="frank_wolfe", rounds=3, eta=0.2,
                  line_search=LineSearch(mode="exact"))
    ens, records = fw_solve(config, _alternating())
    assert len(ens) == 3
    assert all(0.0 <= r.alpha <= 1.0 for r in records)


def test_fw_exact_line_search_smoothed_monotone():
    """Exact line search minimizes the smoothed objective with alpha = 0 a
    candidate, so L_eta can never increase between rounds."""
    config = _cfg(algorithm="frank_wolfe", rounds=6, eta=0.3,
                  set_spec=Cvar(alpha=0.6),
                  line_search=LineSearch(mode="exact"))
    ds = _alternating()
    ens, records = fw_solve(config, ds)
    alphas = [r.alpha for r in records]
    values = []
    for t in range(1, len(alphas) + 1):
        masses = []
        for s in range(t):
            m = alphas[s]
            for u in range(s + 1, t):
                m *= 1.0 - alphas[u]
            masses.append(m)
        partial = Ensemble(ens.hypotheses[:t], np.array(masses))
        values.append(smoothed_objective(partial, ds, config.set_spec,
                                         config.eta))
    for prev, cur in zip(values, values[1:]):
        assert cur <= prev + 1e-12


# ---------------------------------------------------------------------------
# generalized adaboost
# ---------------------------------------------------------------------------

def test_gen_adaboost_simplex_closed_form_mass():
    config = _cfg(algorithm="gen_adaboost", rounds=1, eta=0.5)
    ds = _alternating()
    ens, records = gen_adaboost_solve(config, ds)
    # Round 1 sees uniform weights; the best stump errs on one of four
    # samples, so eps = 1/4 and the mass is eta * ln(3).
    assert records[0].alpha == pytest.approx(0.5 * math.log(3.0), rel=1e-12)
    np.testing.assert_allclose(ens.masses, [1.0])  # normalized single member


def test_gen_adaboost_zero_mass_fallback():
    # No stump beats chance on XOR corners: the closed form gives mass 0,
    # which the first round replaces with 1 to keep the ensemble valid.
    config = _cfg(algorithm="gen_adaboost", rounds=1, eta=0.5)
    _, records = gen_adaboost_solve(config, _xor_corners())
    assert records[0].alpha == 1.0


def test_gen_adaboost_cvar_mass_hits_half_edge():
    # alpha=0.3 leaves the per-sample cap at 1/(0.3*4) > 1/2, so the
    # half-edge equation has an interior solution each round.
    config = _cfg(algorithm="gen_adaboost", rounds=2, eta=0.4,
                  set_spec=Cvar(alpha=0.3))
    ds = _alternating()
    ens, records = gen_adaboost_solve(config, ds)
    assert len(ens) == 2
    raw, c = records[0].alpha, records[1].alpha
    assert 0.0 < c < 50.0
    row1 = (ens.hypotheses[0].predict(ds.features) != ds.labels).astype(float)
    row2 = (ens.hypotheses[1].predict(ds.features) != ds.labels).astype(float)
    w = regularized_argmax(Cvar(alpha=0.3), raw * row1 + c * row2, 0.4)
    assert float(w @ row2) == pytest.approx(0.5, abs=1e-6)


def test_gen_adaboost_mass_saturates_under_tight_cap():
    # At alpha=0.8 no single-sample row can reach expected loss 1/2
    # (cap 0.3125), so the mass search stops at its 50*max(eta,1) ceiling.
    config = _cfg(algorithm="gen_adaboost", rounds=1, eta=0.4,
                  set_spec=Cvar(alpha=0.8))
    _, records = gen_adaboost_solve(config, _alternating())
    assert records[0].alpha == pytest.approx(50.0)


def test_gen_adaboost_grid_mode_runs():
    config = _cfg(algorithm="gen_adaboost", rounds=3, eta=0.5,
                  line_search=LineSearch(mode="unit_interval"))
    ens, records = gen_adaboost_solve(config, _alternating())
    assert len(ens) == 3
    assert all(r.alpha >= 0.0 for r in records)


# ---------------------------------------------------------------------------
# baselines
# ---------------------------------------------------------------------------

def test_erm_single_member():
    ens, records = erm_solve(_cfg(algorithm="erm", rounds=1), _separable())
    assert len(ens) == 1
    assert ens.normalized
    assert len(records) == 1
    assert records[0].train_obj == 0.0


def test_adaboost_caps_coefficient_on_perfect_fit():
    ens, records = adaboost_solve(_cfg(algorithm="adaboost", rounds=10),
                                  _separable())
    assert len(ens) == 1
    assert records[0].alpha == pytest.approx(math.log(1e9))


def test_adaboost_warns_and_keeps_first_member_at_chance():
    with pytest.warns(UserWarning, match="weak error"):
        ens, records = adaboost_solve(_cfg(algorithm="adaboost", rounds=10),
                                      _xor_corners())
    assert len(ens) == 1
    assert len(records) == 1
    assert records[0].alpha == 1.0


def test_adaboost_runs_all_rounds_when_learnable():
    ens, records = adaboost_solve(_cfg(algorithm="adaboost", rounds=3),
                                  _alternating())
    assert len(ens) == 3
    assert all(r.alpha > 0 for r in records)


def test_game_play_erm_trains_fresh_members_each_round():
    gen = np.random.default_rng(6)
    ds = Dataset(gen.normal(size=(10, 2)), gen.integers(0, 2, size=10),
                 n_classes=2)
    config = _cfg(set_spec=ErmSet(), rounds=2, learner_kind="linear",
                  budget=TrainBudget(iterations=30, batch_size=4))
    ens, _ = game_play_solve(config, ds)
    a, b = ens.hypotheses
    assert not np.array_equal(a.weights, b.weights)  # per-round seeds


def test_online_gdro_requires_groups():
    with pytest.raises(ConfigError, match="grouped"):
        online_gdro_solve(_cfg(algorithm="online_gdro"), _alternating())


def test_online_gdro_uniform_ensemble():
    ds = Dataset([[0.0], [1.0], [2.0], [3.0]], [0, 1, 1, 0],
                 groups=[0, 0, 1, 1])
    ens, records = online_gdro_solve(
        _cfg(algorithm="online_gdro", rounds=3, gdro_step=0.5), ds)
    assert len(ens) == 3
    np.testing.assert_allclose(ens.masses, 1 / 3)
    assert [r.alpha for r in records] == [1.0, 0.5, 1 / 3]


def test_online_gdro_dominant_group_takes_over(monkeypatch):
    """With constant group losses (0.9, 0.1) the exponentiated-gradient
    weights concentrate monotonically on the lossy group."""
    import rai_forge.solvers as solvers_mod

    n = 20
    gen = np.random.default_rng(0)
    groups = np.array([0] * 10 + [1] * 10)
    wrong = np.zeros(n, dtype=np.int64)
    wrong[:9] = 1   # 9 of 10 in group 0 mispredicted
    wrong[10] = 1   # 1 of 10 in group 1 mispredicted
    ds = Dataset(gen.normal(size=(n, 1)), np.zeros(n, dtype=np.int64),
                 groups=groups, n_classes=2)

    class FixedHyp:
        kind = "stump"
        def predict(self, X):
            return wrong[:X.shape[0]].copy()

    seen = []
    def fake_best_response(dataset, w, kind, budget=None, hidden=4):
        seen.append(float(np.sum(w[groups == 0])))
        return FixedHyp()

    monkeypatch.setattr(solvers_mod, "best_response", fake_best_response)
    online_gdro_solve(_cfg(algorithm="online_gdro", rounds=50,
                           gdro_step=0.1), ds)
    assert seen[0] == pytest.approx(0.5)
    assert all(b > a for a, b in zip(seen, seen[1:]))
    assert seen[-1] > 0.95


def test_solve_dispatch_and_group_guard():
    ens, _ = solve(_cfg(rounds=2), _alternating())
    assert len(ens) == 2
    with pytest.raises(ConfigError, match="grouped"):
        solve(_cfg(set_spec=GroupDro()), _alternating())
    nested = Intersection(members=(Chi2Ball(rho=0.5), GroupDro()))
    with pytest.raises(ConfigError, match="grouped"):
        solve(_cfg(set_spec=nested), _alternating())


def test_solver_determinism_with_sgd_learner():
    gen = np.random.default_rng(4)
    ds = Dataset(gen.normal(size=(12, 2)), gen.integers(0, 2, size=12),
                 n_classes=2)
    config = _cfg(rounds=2, learner_kind="linear", seed=5,
                  budget=TrainBudget(iterations=40, batch_size=4, seed=5))
    a, rec_a = game_play_solve(config, ds)
    b, rec_b = game_play_solve(config, ds)
    assert json.dumps(ensemble_to_json(a)) == json.dumps(ensemble_to_json(b))
    assert [r.train_obj for r in rec_a] == [r.train_obj for r in rec_b]


# ---------------------------------------------------------------------------
# finite-pool matrix games
# ---------------------------------------------------------------------------

def test_ne_gap_pinned():
    rows = np.array([[0.0, 1.0], [1.0, 0.0]])
    q = np.array([0.5, 0.5])
    w = np.array([0.5, 0.5])
    assert ne_gap(SimplexSet(), rows, q, w) == pytest.approx(0.0)
    assert ne_gap(SimplexSet(), rows, np.array([1.0, 0.0]), w) \
        == pytest.approx(0.5)


def test_matrix_game_play_gap_nonnegative_and_shrinking():
    rows = np.array([[0.0, 1.0], [1.0, 0.0]])
    _, _, gaps = matrix_game_play(rows, SimplexSet(), eta=0.05, rounds=300)
    assert len(gaps) == 300
    assert all(g >= -1e-12 for g in gaps)
    assert gaps[-1] < gaps[4]


def test_matrix_game_value_approaches_half():
    # Symmetric 2x2 game: the averaged ensemble's randomized risk tends
    # to the game value 1/2.
    rows = np.array([[0.0, 1.0], [1.0, 0.0]])
    _, picks, _ = matrix_game_play(rows, SimplexSet(), eta=0.05, rounds=200,
                                   track_gap=False)
    q_bar = np.bincount(picks, minlength=2) / 200.0
    value = float((q_bar @ rows).max())
    assert value == pytest.approx(0.5, abs=0.02)


def test_matrix_fw_matches_matrix_game_play():
    gen = np.random.default_rng(9)
    rows = gen.uniform(size=(5, 6))
    groups = np.array([0, 0, 1, 1, 2, 2])
    for spec, g in ((ErmSet(), None), (SimplexSet(), None),
                    (Cvar(alpha=0.6), None), (GroupDro(), groups)):
        w_g, picks_g, _ = matrix_game_play(rows, spec, eta=0.1, rounds=10,
                                           groups=g, track_gap=False)
        w_f, picks_f = matrix_fw(rows, spec, eta=0.1, rounds=10, groups=g)
        assert picks_g == picks_f, spec.kind
        for a, b in zip(w_g, w_f):
            np.testing.assert_array_equal(a, b)
