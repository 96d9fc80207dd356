"""Fidelity kernel plus a hand-written SMO solver on Werner states.

Trains on one Bell-state Werner family and tests on another.
Run with ``python3 demos/02_kernel_and_svm.py`` (about half a minute).
"""
# %%
import numpy as np

from xdomain_qsvm.harness import compute_metrics, feature_matrix, labels_for
from xdomain_qsvm.qkernel import FeatureMapConfig, encode, gram_matrix
from xdomain_qsvm.states import FamilySpec, sample_family
from xdomain_qsvm.svm import predict, predict_proba, train_smo, with_platt

# %% [markdown]
# Each density matrix becomes 16 real features: four diagonal entries and
# the real and imaginary parts of the six upper off-diagonal entries. The
# feature map loads them onto 16 qubits. The kernel is the squared overlap
# of the encoded states.

# %%
train = sample_family(FamilySpec("werner", bell="psi_minus"), 100, seed=0)
test = sample_family(FamilySpec("werner", bell="psi_plus"), 50, seed=1000)
Xtr, Xte = feature_matrix(train, "dm16"), feature_matrix(test, "dm16")
ytr, yte = labels_for(train, "entanglement"), labels_for(test, "entanglement")
cfg = FeatureMapConfig(alpha=np.pi, reps=2)
print("statevector length", encode(Xtr[0], cfg).shape[0])

# %%
K = gram_matrix(Xtr, cfg=cfg)
K_cross = gram_matrix(Xtr, Xte, cfg=cfg)
print("Gram diagonal spread", np.ptp(np.diag(K)), " min eigenvalue", np.linalg.eigvalsh(K)[0])

# %% [markdown]
# SMO solves the dual problem. Platt scaling then turns decision values
# into probabilities.

# %%
model = with_platt(train_smo(K, ytr, C=10.0), K, ytr)
pred = predict(model, K_cross)
prob = predict_proba(model, K_cross)
m = compute_metrics(yte, pred)
print(f"support vectors {len(model.support_idx)}, test accuracy {m.accuracy:.2f}, precision {m.precision:.2f}")

# %% [markdown]
# Errors cluster near the entanglement edge p = 1/3.

# %%
for r, y, yhat, pr in sorted(zip(test, yte, pred, prob), key=lambda z: z[0].family.p):
    if y != yhat:
        print(f"p={r.family.p:.3f} true {y:+d} predicted {yhat:+d} P(entangled)={pr:.2f}")
