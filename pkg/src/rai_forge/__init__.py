"""Robust ensemble training as a min-max game over sample weights.

An adversary re-weights training samples inside a chosen uncertainty set
(CVaR caps, KL or chi-squared divergence balls, group mixtures,
intersections); a learner greedily grows an ensemble against the
re-weighted data.  Both repeated-play and Frank-Wolfe/boosting-style
solvers are provided, along with derandomization and the usual
robust-risk metrics.
"""

from .data import (Dataset, DatasetError, gen_dataset_1, gen_dataset_2,
                   load_csv, save_csv, train_test_split)
from .ensemble import (Ensemble, EnsembleError, MetricsReport,
                       derandomize_predict, deterministic_risk,
                       ensemble_from_json, ensemble_to_json, gamma_q,
                       load_ensemble, metrics, randomized_risk,
                       save_ensemble)
from .learners import (LearnerError, Linear, Mlp, Stump, TrainBudget,
                       best_response, fit_stump, hypothesis_from_json,
                       hypothesis_to_json, loss_row)
from .solvers import (ConfigError, LineSearch, SolverConfig, SolverError,
                      TraceRecord, adaboost_solve, config_from_json,
                      config_to_json, erm_solve, fw_solve,
                      game_play_solve, gen_adaboost_solve,
                      line_search_alpha, load_config, matrix_fw,
                      matrix_game_play, ne_gap, online_gdro_solve,
                      save_config, smoothed_objective, solve,
                      write_trace_csv)
from .uncertainty import (Chi2Ball, Cvar, ErmSet, GroupDro,
                          InfeasibleSetError, Intersection, KlBall,
                          SimplexSet, UncertaintySetError,
                          cvar_capped_projection, entropy,
                          linear_max_oracle, membership_check,
                          regularized_argmax, set_spec_from_json,
                          set_spec_to_json)

__version__ = "0.1.0"
