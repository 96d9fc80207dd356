"""Two-qubit state families and their exact entanglement / discord labels.

Run with ``python3 demos/01_states_and_labels.py``.
"""
# %%
import numpy as np

from xdomain_qsvm.measures import concurrence, geometric_discord
from xdomain_qsvm.states import FamilySpec, make_werner, rotate_records, sample_family, to_bloch

# %% [markdown]
# A Werner state mixes a Bell state with white noise. Its concurrence is
# (3p - 1)/2 above p = 1/3 and zero below, so p = 1/3 is the entanglement edge.

# %%
for p in (0.0, 0.2, 1 / 3, 0.5, 1.0):
    rho = make_werner("psi_minus", p)
    print(f"p={p:.3f}  concurrence={concurrence(rho):.6f}  closed form={max(0.0, (3 * p - 1) / 2):.6f}")

# %% [markdown]
# The correlation matrix of a Bell state is diagonal with entries of
# modulus one. The signs tell the four Bell states apart.

# %%
for bell in ("psi_minus", "psi_plus", "phi_minus", "phi_plus"):
    print(bell, np.round(np.diag(to_bloch(make_werner(bell, 1.0)).t), 12))

# %% [markdown]
# Sampled records carry their labels. Every Werner state with p > 0 has
# non-zero geometric discord p^2/2, while only p > 1/3 is entangled.

# %%
recs = sample_family(FamilySpec("werner", bell="psi_minus"), 8, seed=0)
for r in recs:
    print(f"id={r.id} p={r.family.p:.3f} ent={r.label_ent:+d} discord={r.label_discord:+d} "
          f"D={geometric_discord(r.dm):.4f}")

# %% [markdown]
# Local unitaries change the density matrix but not the concurrence.

# %%
rotated = rotate_records(recs, seed=1)
shift = max(abs(concurrence(a.dm) - concurrence(b.dm)) for a, b in zip(recs, rotated))
change = max(np.abs(a.dm - b.dm).max() for a, b in zip(recs, rotated))
print(f"largest matrix change {change:.3f}, largest concurrence change {shift:.1e}")

# %% [markdown]
# Bell-diagonal states are fixed by three correlation coefficients. States
# with only one non-zero coefficient carry no discord.

# %%
zero = sample_family(FamilySpec("bell-diagonal", zero_discord=True), 5, seed=2)
mixed = sample_family(FamilySpec("bell-diagonal"), 5, seed=3)
for r in zero + mixed:
    f = r.family
    print(f"t=({f.t11:+.3f}, {f.t22:+.3f}, {f.t33:+.3f})  discord label {r.label_discord:+d}")
