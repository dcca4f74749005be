"""XY-type qudit chains with engineered couplings.

The chain Hamiltonian couples neighboring sites through every off-diagonal
generator pair:

    H = sum_i (J_i / 2) sum_{1 <= k < j <= d} [ theta^{kj}_i theta^{kj}_{i+1}
                                              + beta^{kj}_i beta^{kj}_{i+1} ]

With J_i = sqrt(i (N - i)) / 2 a single excitation of any level hops on the
tridiagonal angular-momentum matrix, and the end-to-end transfer amplitude
reaches 1 at t = pi independent of N. Site 1 is the most significant tensor
factor: basis index = sum_s value_s * d^(N - s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .generators import beta, theta
from .linalg import embed_operator, hermitian_defect, matexp_i

MAX_DIM = 4096


@dataclass
class ChainSpec:
    """Uniform local dimension d on n sites, plus n-1 nearest-neighbor couplings."""

    d: int
    n: int
    couplings: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError("local dimension must be at least 2")
        if self.n < 2:
            raise ValueError("chain needs at least 2 sites")
        if self.d ** self.n > MAX_DIM:
            raise ValueError(
                f"register dimension {self.d ** self.n} exceeds the supported {MAX_DIM}"
            )
        if self.couplings is None:
            self.couplings = default_couplings(self.n)
        else:
            self.couplings = np.asarray(self.couplings, dtype=float)
            if self.couplings.shape != (self.n - 1,):
                raise ValueError(f"need {self.n - 1} couplings, got {self.couplings.shape}")

    @property
    def dim(self) -> int:
        return self.d ** self.n

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.d,) * self.n


@dataclass
class QuantumState:
    """State of the full register, either a ket or a density matrix."""

    kind: str
    dims: list[int]
    data: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        dim = int(np.prod(self.dims))
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.kind == "pure":
            if self.data.shape != (dim,):
                raise ValueError(f"ket shape {self.data.shape} does not match dims {self.dims}")
            norm = float(np.linalg.norm(self.data))
            if abs(norm - 1.0) > 1e-10:
                raise ValueError(f"ket norm deviates from 1 by {abs(norm - 1.0):.3e}")
        elif self.kind == "mixed":
            if self.data.shape != (dim, dim):
                raise ValueError(f"operator shape {self.data.shape} does not match dims {self.dims}")
            if hermitian_defect(self.data) > 1e-10:
                raise ValueError("density matrix is not Hermitian")
            tr = np.trace(self.data).real
            if abs(tr - 1.0) > 1e-8:
                raise ValueError(f"density matrix trace deviates from 1 by {abs(tr - 1.0):.3e}")
        else:
            raise ValueError(f"unknown state kind {self.kind!r}")

    @classmethod
    def pure(cls, vector: np.ndarray, dims: list[int]) -> "QuantumState":
        return cls(kind="pure", dims=list(dims), data=vector)

    @classmethod
    def density(cls, matrix: np.ndarray, dims: list[int]) -> "QuantumState":
        return cls(kind="mixed", dims=list(dims), data=matrix)

    def to_density(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return self.data


def default_couplings(n: int) -> np.ndarray:
    """Engineered profile J_i = sqrt(i (n - i)) / 2, i = 1..n-1."""
    if n < 2:
        raise ValueError("chain needs at least 2 sites")
    i = np.arange(1, n, dtype=float)
    return np.sqrt(i * (n - i)) / 2.0


def embed_pair(op_left: np.ndarray, op_right: np.ndarray, site: int, spec: ChainSpec) -> np.ndarray:
    """Place a two-site operator on sites (site, site+1), 1-based, identity elsewhere."""
    if not (1 <= site <= spec.n - 1):
        raise ValueError(f"bond site must lie in 1..{spec.n - 1}, got {site}")
    d = spec.d
    if op_left.shape != (d, d) or op_right.shape != (d, d):
        raise ValueError("pair operators must match the local dimension")
    factors = [np.eye(d ** (site - 1)), np.kron(op_left, op_right), np.eye(d ** (spec.n - site - 1))]
    return reduce(np.kron, factors)


def _bond_term(d: int) -> np.ndarray:
    """sum_{k<j} theta (x) theta + beta (x) beta on one bond; real symmetric."""
    out = np.zeros((d * d, d * d), dtype=np.complex128)
    for k in range(1, d + 1):
        for j in range(k + 1, d + 1):
            th = theta(k, j, d)
            be = beta(k, j, d)
            out += np.kron(th, th) + np.kron(be, be)
    return out


def build_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Assemble the full-register Hamiltonian (dense, Hermitian, real)."""
    d, n = spec.d, spec.n
    bond = _bond_term(d)
    h = np.zeros((spec.dim, spec.dim), dtype=np.complex128)
    for i in range(1, n):
        left = np.eye(d ** (i - 1))
        right = np.eye(d ** (n - i - 1))
        h += (spec.couplings[i - 1] / 2.0) * reduce(np.kron, [left, bond, right])
    return h


def level_counters(spec: ChainSpec) -> list[np.ndarray]:
    """Summed diagonal generators sum_i eta^r_(i), r = 1..d-1; each commutes with H."""
    from .generators import eta

    return [
        sum(embed_operator(eta(r, spec.d), s, spec.dims) for s in range(spec.n))
        for r in range(1, spec.d)
    ]


def commutator_defect(spec: ChainSpec) -> list[float]:
    """Frobenius norms of [H, sum_i eta^r_(i)] for r = 1..d-1."""
    h = build_hamiltonian(spec)
    out = []
    for counter in level_counters(spec):
        comm = h @ counter - counter @ h
        out.append(float(np.linalg.norm(comm)))
    return out


def propagator(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i t H) of a Hermitian Hamiltonian."""
    return matexp_i(h, t)


def basis_index(values: list[int], d: int) -> int:
    """Register basis index of per-site level values, site 1 most significant."""
    idx = 0
    for v in values:
        idx = idx * d + v
    return idx


def excitation_index(spec: ChainSpec, site: int, level: int) -> int:
    """Index of the state with one site at `level` and every other site at 0 (1-based site)."""
    if not (1 <= site <= spec.n):
        raise ValueError(f"site must lie in 1..{spec.n}, got {site}")
    if not (1 <= level <= spec.d - 1):
        raise ValueError(f"level must lie in 1..{spec.d - 1}, got {level}")
    values = [0] * spec.n
    values[site - 1] = level
    return basis_index(values, spec.d)


class _TransferAmplitudes:
    """End-to-end transfer amplitudes per excitation level, from one eigh call."""

    def __init__(self, spec: ChainSpec):
        h = build_hamiltonian(spec)
        self.eigvals, eigvecs = np.linalg.eigh(h)
        self.weights = np.empty((spec.d - 1, spec.dim), dtype=np.complex128)
        for level in range(1, spec.d):
            src = excitation_index(spec, 1, level)
            dst = excitation_index(spec, spec.n, level)
            self.weights[level - 1] = eigvecs[dst, :] * eigvecs[src, :].conj()

    def complex_amplitudes(self, t: np.ndarray | float) -> np.ndarray:
        """<e_N | U_t | e_1> per level; shape (d-1,) + shape of t."""
        t = np.asarray(t, dtype=float)
        phases = np.exp(-1j * np.multiply.outer(self.eigvals, t))
        return np.tensordot(self.weights, phases, axes=(1, 0))

    def amplitudes(self, t: np.ndarray | float) -> np.ndarray:
        """|<e_N | U_t | e_1>| per level; shape (d-1,) + shape of t."""
        return np.abs(self.complex_amplitudes(t))

    def worst_level(self, t: np.ndarray | float) -> np.ndarray:
        return self.amplitudes(t).min(axis=0)


def excitation_transfer_amplitude(spec: ChainSpec, t: float, level: int = 1) -> float:
    """|<e_N| exp(-i t H) |e_1>| for one excitation level."""
    if not (1 <= level <= spec.d - 1):
        raise ValueError(f"level must lie in 1..{spec.d - 1}, got {level}")
    amp = _TransferAmplitudes(spec).amplitudes(float(t))
    return float(amp[level - 1])


def find_pst_time(
    spec: ChainSpec,
    t_max: float = 2.0 * math.pi,
    grid_points: int = 2000,
    tol: float = 1e-10,
) -> tuple[float, float]:
    """Locate the time maximizing the worst-level transfer amplitude.

    Coarse scan over [0, t_max] followed by golden-section refinement of the
    best bracket; ties resolve to the earliest time. Returns (t_star, amplitude).
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if grid_points < 3:
        raise ValueError("grid needs at least 3 points")
    amps = _TransferAmplitudes(spec)
    ts = np.linspace(0.0, t_max, grid_points)
    vals = amps.worst_level(ts)
    best = int(np.argmax(vals))
    # earliest index within 1e-12 of the maximum
    near = np.nonzero(vals >= vals[best] - 1e-12)[0]
    best = int(near[0])
    lo = ts[max(best - 1, 0)]
    hi = ts[min(best + 1, grid_points - 1)]
    t_star = _golden_max(lambda t: float(amps.worst_level(t)), lo, hi, tol)
    return t_star, float(amps.worst_level(t_star))


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section maximization on a bracket; returns the midpoint at tol width."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)
