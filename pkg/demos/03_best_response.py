"""
Weak learners as best responses
===============================

The learner side of the game only ever answers one question: given a
distribution w over training samples, return a hypothesis with small
weighted error.  Stumps answer it exactly; linear and MLP models answer
through SGD on a weighted logistic surrogate.
"""

import numpy as np

from rai_forge.data import SYNTHETIC_GENERATORS
from rai_forge.learners import TrainBudget, best_response, loss_row

ds = SYNTHETIC_GENERATORS["I"](600, seed=3)
uniform = np.full(ds.n, 1.0 / ds.n)


def weighted_error(h, w):
    return float(w @ loss_row(h, ds))


# Under the uniform distribution the best stump carves off the one
# satellite cluster an axis cut can reach and writes off the other two.
stump = best_response(ds, uniform, "stump")
print("stump, uniform weights:  error =", round(weighted_error(stump, uniform), 4))
print("  ", stump)

# Tilt the distribution toward the minority class far enough and the exact
# fitter gives up on thresholds entirely: the optimum is the constant
# minority predictor (left == right below).
tilted = np.where(ds.labels == 1, 2.0, 0.35)
tilted /= tilted.sum()
stump2 = best_response(ds, tilted, "stump")
print("stump, tilted weights:   error =", round(weighted_error(stump2, tilted), 4))
print("  ", stump2)

# Gradient-trained responses take a budget.  Same data, same weights, same
# seed => bitwise identical parameters, which is what makes the ensemble
# solvers replayable.
budget = TrainBudget(iterations=800, batch_size=32, learning_rate=0.2, seed=11)
mlp_a = best_response(ds, tilted, "mlp", budget=budget, hidden=2)
mlp_b = best_response(ds, tilted, "mlp", budget=budget, hidden=2)
assert all(np.array_equal(p, q) for p, q in
           zip((mlp_a.w1, mlp_a.b1, mlp_a.w2, mlp_a.b2),
               (mlp_b.w1, mlp_b.b1, mlp_b.w2, mlp_b.b2)))
print("mlp, tilted weights:     error =", round(weighted_error(mlp_a, tilted), 4),
      "(deterministic replay verified)")

# Per-class view of the same three hypotheses.
rows = loss_row(mlp_a, ds)
for c in range(ds.n_classes):
    mask = ds.labels == c
    print(f"  mlp error on class {c}: {rows[mask].mean():.3f}")
