"""Two-qubit state families, Bloch decomposition, feature vectors and dataset records.

Bell-state naming follows the convention

    psi_pm = (|00> +- |11>) / sqrt(2),    phi_pm = (|01> +- |10>) / sqrt(2)

in the computational basis order |00>, |01>, |10>, |11>. Under this naming the
correlation matrices are

    psi_minus: diag(-1, +1, +1)      psi_plus: diag(+1, -1, +1)
    phi_minus: diag(-1, -1, -1)      phi_plus: diag(+1, +1, -1)
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .exceptions import ContractError, InfeasiblePointError, ParameterError, SamplingExhaustedError

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
SIMPLEX_TOL = 1e-12
BD_SLACK = 1e-12
REJECTION_BUDGET = 10**6
_REJECTION_BATCH = 4096

BELL_KINDS = ("psi_minus", "psi_plus", "phi_minus", "phi_plus")
_S = 1 / np.sqrt(2)
_BELL_VECTORS = {
    "psi_minus": np.array([_S, 0, 0, -_S], dtype=complex),
    "psi_plus": np.array([_S, 0, 0, _S], dtype=complex),
    "phi_minus": np.array([0, _S, -_S, 0], dtype=complex),
    "phi_plus": np.array([0, _S, _S, 0], dtype=complex),
}

# upper off-diagonal slots in dm16 order
_OFF_DIAG = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
FEATURE_SCHEMES = ("dm16", "bloch15")


def bell_kind(name: str) -> str:
    """Normalize ``psi-minus`` / ``psi_minus`` spellings and reject unknown names."""
    kind = name.replace("-", "_").lower()
    if kind not in _BELL_VECTORS:
        raise ParameterError(f"unknown Bell state {name!r}; expected one of {BELL_KINDS}")
    return kind


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


def check_density_matrix(rho) -> np.ndarray:
    """Return ``rho`` as a read-only 4x4 complex array after checking the state invariants."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ContractError(f"expected a 4x4 density matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise ContractError("density matrix is not Hermitian within 1e-12")
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        raise ContractError(f"density matrix trace {np.trace(rho).real!r} differs from 1")
    if np.linalg.eigvalsh(rho)[0] < PSD_TOL:
        raise ContractError("density matrix has a negative eigenvalue below -1e-10")
    return _frozen(rho)


def make_bell(kind: str) -> np.ndarray:
    v = _BELL_VECTORS[bell_kind(kind)]
    return _frozen(np.outer(v, v.conj()))


def _check_probability(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"mixing weight p={p!r} outside [0, 1]")
    return p


def make_werner(kind: str, p: float) -> np.ndarray:
    """``p |bell><bell| + (1 - p) I / 4``."""
    p = _check_probability(p)
    return _frozen(p * make_bell(kind) + (1 - p) / 4 * np.eye(4))


def make_horodecki(kind: str, p: float) -> np.ndarray:
    """``p |bell><bell| + (1 - p) |00><00|``."""
    p = _check_probability(p)
    ground = np.zeros((4, 4), dtype=complex)
    ground[0, 0] = 1
    return _frozen(p * make_bell(kind) + (1 - p) * ground)


def make_mems(q: float, r: float, s: float, t: float, lam: float) -> np.ndarray:
    parts = np.array([q, r, s, t, lam], dtype=float)
    if np.any(parts < 0):
        raise ParameterError(f"MEMS parameters must be non-negative, got {parts.tolist()}")
    if abs(parts.sum() - 1) > SIMPLEX_TOL:
        raise ParameterError(f"MEMS parameters sum to {parts.sum()!r}, not 1")
    rho = np.array(
        [
            [q + lam / 2, 0, 0, lam / 2],
            [0, s, 0, 0],
            [0, 0, t, 0],
            [lam / 2, 0, 0, r + lam / 2],
        ],
        dtype=complex,
    )
    return _frozen(rho)


BD_CONSTRAINTS = (
    ("1 - t11 + t22 + t33 >= 0", np.array([-1, 1, 1])),
    ("1 + t11 - t22 + t33 >= 0", np.array([1, -1, 1])),
    ("1 + t11 + t22 - t33 >= 0", np.array([1, 1, -1])),
    ("1 - t11 - t22 - t33 >= 0", np.array([-1, -1, -1])),
)
_BD_SIGNS = np.array([c for _, c in BD_CONSTRAINTS], dtype=float)


def bell_diagonal_feasible(t: np.ndarray) -> np.ndarray:
    """Vectorized positivity test for correlation triples, shape (..., 3) -> (...)."""
    return np.all(1 + np.asarray(t) @ _BD_SIGNS.T >= -BD_SLACK, axis=-1)


def make_bell_diagonal(t11: float, t22: float, t33: float) -> np.ndarray:
    t = np.array([t11, t22, t33], dtype=float)
    for name, signs in BD_CONSTRAINTS:
        if 1 + signs @ t < -BD_SLACK:
            raise InfeasiblePointError(f"Bell-diagonal point {t.tolist()} violates {name}")
    rho = np.eye(4, dtype=complex)
    for ti, sigma in zip(t, PAULIS):
        rho = rho + ti * np.kron(sigma, sigma)
    return _frozen(rho / 4)


@dataclass(frozen=True)
class BlochForm:
    a: np.ndarray
    b: np.ndarray
    t: np.ndarray


# Pauli products indexed [i, j] with i, j in {I, X, Y, Z}
_PAULI_PRODUCTS = np.array([[np.kron(si, sj) for sj in (IDENTITY2, *PAULIS)] for si in (IDENTITY2, *PAULIS)])


def to_bloch(rho) -> BlochForm:
    rho = np.asarray(rho, dtype=complex)
    # tr(rho P) = sum_kl rho_kl P_lk
    c = np.einsum("kl,ijlk->ij", rho, _PAULI_PRODUCTS).real
    return BlochForm(c[1:, 0].copy(), c[0, 1:].copy(), c[1:, 1:].copy())


def from_bloch(bf: BlochForm) -> np.ndarray:
    rho = np.kron(IDENTITY2, IDENTITY2)
    for i, si in enumerate(PAULIS):
        rho = rho + bf.a[i] * np.kron(si, IDENTITY2) + bf.b[i] * np.kron(IDENTITY2, si)
        for j, sj in enumerate(PAULIS):
            rho = rho + bf.t[i][j] * np.kron(si, sj)
    rho = rho / 4
    if np.linalg.eigvalsh(rho)[0] < PSD_TOL:
        raise InfeasiblePointError("Bloch parameters do not give a positive semidefinite state")
    return _frozen(rho)


@dataclass(frozen=True)
class LocalUnitary:
    theta1: float
    theta2: float

    @staticmethod
    def rotation(theta: float) -> np.ndarray:
        c, s = np.cos(theta), np.sin(theta)
        return np.array([[c, -s], [s, c]], dtype=complex)

    def matrix(self) -> np.ndarray:
        return np.kron(self.rotation(self.theta1), self.rotation(self.theta2))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "LocalUnitary":
        th = rng.uniform(0.0, 2 * np.pi, size=2)
        return cls(float(th[0]), float(th[1]))


def apply_local_unitary(rho, u: LocalUnitary) -> np.ndarray:
    m = u.matrix()
    out = m @ np.asarray(rho, dtype=complex) @ m.conj().T
    # restore exact hermiticity lost to round-off
    return _frozen(0.5 * (out + out.conj().T))


def features(rho, scheme: str = "dm16") -> np.ndarray:
    """Real feature vector of a density matrix.

    ``dm16``: the four diagonal populations, then real and imaginary parts of
    the upper off-diagonal entries (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).
    ``bloch15``: ``a``, ``b`` and the row-major correlation matrix ``T``.
    """
    rho = np.asarray(rho, dtype=complex)
    if scheme == "dm16":
        out = [rho[i, i].real for i in range(4)]
        for i, j in _OFF_DIAG:
            out += [rho[i, j].real, rho[i, j].imag]
        return np.array(out, dtype=float)
    if scheme == "bloch15":
        bf = to_bloch(rho)
        return np.concatenate([bf.a, bf.b, bf.t.ravel()])
    raise ContractError(f"unknown feature scheme {scheme!r}; expected one of {FEATURE_SCHEMES}")


def dm_from_features(vec: Sequence[float]) -> np.ndarray:
    """Inverse of the ``dm16`` feature map for Hermitian matrices."""
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (16,):
        raise ContractError(f"dm16 vectors have 16 entries, got {vec.shape}")
    rho = np.diag(vec[:4]).astype(complex)
    for k, (i, j) in enumerate(_OFF_DIAG):
        rho[i, j] = vec[4 + 2 * k] + 1j * vec[5 + 2 * k]
        rho[j, i] = np.conj(rho[i, j])
    return rho


# -- family parameters --------------------------------------------------------


@dataclass(frozen=True)
class Werner:
    bell: str
    p: float
    tag = "werner"

    def density_matrix(self) -> np.ndarray:
        return make_werner(self.bell, self.p)

    def to_dict(self) -> dict:
        return {"tag": self.tag, "bell": self.bell, "p": self.p}


@dataclass(frozen=True)
class Horodecki:
    bell: str
    p: float
    tag = "horodecki"

    def density_matrix(self) -> np.ndarray:
        return make_horodecki(self.bell, self.p)

    def to_dict(self) -> dict:
        return {"tag": self.tag, "bell": self.bell, "p": self.p}


@dataclass(frozen=True)
class Mems:
    q: float
    r: float
    s: float
    t: float
    lam: float
    tag = "mems"

    def density_matrix(self) -> np.ndarray:
        return make_mems(self.q, self.r, self.s, self.t, self.lam)

    def to_dict(self) -> dict:
        return {"tag": self.tag, "q": self.q, "r": self.r, "s": self.s, "t": self.t, "lambda": self.lam}


@dataclass(frozen=True)
class BellDiagonal:
    t11: float
    t22: float
    t33: float
    tag = "bell-diagonal"

    def density_matrix(self) -> np.ndarray:
        return make_bell_diagonal(self.t11, self.t22, self.t33)

    def to_dict(self) -> dict:
        return {"tag": self.tag, "t11": self.t11, "t22": self.t22, "t33": self.t33}


FamilyParams = Union[Werner, Horodecki, Mems, BellDiagonal]


def family_from_dict(d: dict) -> FamilyParams:
    tag = d["tag"]
    if tag == "werner":
        return Werner(bell_kind(d["bell"]), float(d["p"]))
    if tag == "horodecki":
        return Horodecki(bell_kind(d["bell"]), float(d["p"]))
    if tag == "mems":
        return Mems(float(d["q"]), float(d["r"]), float(d["s"]), float(d["t"]), float(d["lambda"]))
    if tag == "bell-diagonal":
        return BellDiagonal(float(d["t11"]), float(d["t22"]), float(d["t33"]))
    raise ParameterError(f"unknown state family {tag!r}")


# -- records ------------------------------------------------------------------


@dataclass(frozen=True)
class StateRecord:
    id: int
    family: FamilyParams
    dm: np.ndarray = field(repr=False)
    label_ent: int | None = None
    label_discord: int | None = None
    rotation: LocalUnitary | None = None

    def to_json_dict(self) -> dict:
        fam = self.family.to_dict()
        if self.rotation is not None:
            fam["rotation"] = {"theta1": self.rotation.theta1, "theta2": self.rotation.theta2}
        flat = np.stack([self.dm.real, self.dm.imag], axis=-1).ravel()
        return {
            "id": self.id,
            "family": fam,
            "dm": [float(x) for x in flat],
            "label_ent": self.label_ent,
            "label_discord": self.label_discord,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "StateRecord":
        flat = np.asarray(d["dm"], dtype=float)
        if flat.shape != (32,):
            raise ContractError(f"record {d.get('id')}: dm must hold 32 reals")
        dm = flat.reshape(4, 4, 2)
        rot = d["family"].get("rotation")
        return cls(
            id=int(d["id"]),
            family=family_from_dict(d["family"]),
            dm=check_density_matrix(dm[..., 0] + 1j * dm[..., 1]),
            label_ent=d.get("label_ent"),
            label_discord=d.get("label_discord"),
            rotation=None if rot is None else LocalUnitary(float(rot["theta1"]), float(rot["theta2"])),
        )


def write_jsonl(records: Iterable[StateRecord], path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json_dict()) + "\n")


def read_jsonl(path) -> list[StateRecord]:
    path = Path(path)
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                try:
                    out.append(StateRecord.from_json_dict(json.loads(line)))
                except (KeyError, ValueError) as exc:
                    raise type(exc)(f"{path}:{lineno}: {exc}") from exc
    return out


# -- sampling -----------------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    """Which family to draw from and over what parameter domain.

    ``p_range`` applies to Werner and Horodecki states, ``t_range`` to the
    Bell-diagonal hypercube. ``zero_discord`` switches Bell-diagonal sampling
    to the single-axis (zero-discord) construction.
    """

    family: str
    bell: str = "psi_minus"
    p_range: tuple[float, float] = (0.0, 1.0)
    t_range: tuple[float, float] = (-1.0, 1.0)
    zero_discord: bool = False

    def __post_init__(self):
        if self.family not in ("werner", "horodecki", "mems", "bell-diagonal"):
            raise ParameterError(f"unknown state family {self.family!r}")
        object.__setattr__(self, "bell", bell_kind(self.bell))
        lo, hi = self.p_range
        if not 0 <= lo <= hi <= 1:
            raise ParameterError(f"p_range {self.p_range} must lie inside [0, 1]")
        lo, hi = self.t_range
        if not -1 <= lo <= hi <= 1:
            raise ParameterError(f"t_range {self.t_range} must lie inside [-1, 1]")


def record_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one record, so output does not depend on worker count."""
    return np.random.default_rng([int(seed), int(index)])


def rejection_sample_bell_diagonal(t_range, rng: np.random.Generator, budget: int = REJECTION_BUDGET):
    """Draw one feasible correlation triple uniformly from the cube ``t_range**3``.

    Returns the triple and the number of draws consumed.
    """
    lo, hi = t_range
    used = 0
    while used < budget:
        m = min(_REJECTION_BATCH, budget - used)
        cand = rng.uniform(lo, hi, size=(m, 3))
        ok = np.flatnonzero(bell_diagonal_feasible(cand))
        if ok.size:
            k = ok[0]
            return cand[k], used + k + 1
        used += m
    raise SamplingExhaustedError(
        f"no feasible Bell-diagonal point in t-range {tuple(t_range)} after {budget} draws"
    )


def _uniform_simplex(rng: np.random.Generator, k: int) -> np.ndarray:
    cuts = np.sort(rng.uniform(size=k - 1))
    return np.diff(np.concatenate([[0.0], cuts, [1.0]]))


def _draw_family(spec: FamilySpec, rng: np.random.Generator) -> FamilyParams:
    if spec.family in ("werner", "horodecki"):
        p = float(rng.uniform(*spec.p_range))
        return (Werner if spec.family == "werner" else Horodecki)(spec.bell, p)
    if spec.family == "mems":
        q, r, s, t, lam = (float(x) for x in _uniform_simplex(rng, 5))
        return Mems(q, r, s, t, lam)
    if spec.zero_discord:
        t = np.zeros(3)
        t[rng.integers(3)] = rng.uniform(*spec.t_range)
    else:
        t, _ = rejection_sample_bell_diagonal(spec.t_range, rng)
    return BellDiagonal(*(float(x) for x in t))


def make_record(rec_id: int, family: FamilyParams, label: bool = True) -> StateRecord:
    dm = family.density_matrix()
    rec = StateRecord(rec_id, family, dm)
    return label_record(rec) if label else rec


def label_record(rec: StateRecord) -> StateRecord:
    from .measures import discord_label, entanglement_label

    return replace(
        rec,
        label_ent=entanglement_label(rec.dm).value,
        label_discord=discord_label(rec.dm).value,
    )


def sample_family(spec: FamilySpec, n: int, seed: int, start_id: int = 0, label: bool = True) -> list[StateRecord]:
    """Draw ``n`` labelled records; record ``i`` uses the stream ``(seed, start_id + i)``."""
    if n < 1:
        raise ParameterError(f"need at least one sample, got n={n}")
    out = []
    for i in range(start_id, start_id + n):
        out.append(make_record(i, _draw_family(spec, record_rng(seed, i)), label))
    return out


def sample_zero_discord_bd(t_range, n: int, seed: int, start_id: int = 0, label: bool = True) -> list[StateRecord]:
    spec = FamilySpec("bell-diagonal", t_range=tuple(t_range), zero_discord=True)
    return sample_family(spec, n, seed, start_id, label)


def rotate_records(records: Iterable[StateRecord], seed: int) -> list[StateRecord]:
    """Apply a fresh random local rotation to every record; labels are carried over."""
    out = []
    for rec in records:
        u = LocalUnitary.random(record_rng(seed, rec.id))
        out.append(replace(rec, dm=apply_local_unitary(rec.dm, u), rotation=u))
    return out
