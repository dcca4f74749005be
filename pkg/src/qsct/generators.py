"""Traceless Hermitian generator families for d-level systems.

Three suites built from the matrix units |k><j|: symmetric off-diagonal,
antisymmetric off-diagonal, and diagonal, d*d - 1 matrices in total,
normalized so tr(G_a G_b) = 2 delta_ab. For d = 2 this is the Pauli set
{X, Y, Z}; for d = 3 the Gell-Mann set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def projector(k: int, j: int, d: int) -> np.ndarray:
    """Matrix unit |k><j| on a d-level system, levels counted from 1."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if not (1 <= k <= d and 1 <= j <= d):
        raise ValueError(f"levels must lie in 1..{d}, got ({k}, {j})")
    out = np.zeros((d, d), dtype=np.complex128)
    out[k - 1, j - 1] = 1.0
    return out


def theta(k: int, j: int, d: int) -> np.ndarray:
    """Symmetric generator |k><j| + |j><k| for k < j."""
    _check_pair(k, j, d)
    return projector(k, j, d) + projector(j, k, d)


def beta(k: int, j: int, d: int) -> np.ndarray:
    """Antisymmetric generator -i(|k><j| - |j><k|) for k < j."""
    _check_pair(k, j, d)
    return -1j * (projector(k, j, d) - projector(j, k, d))


def eta(r: int, d: int) -> np.ndarray:
    """Diagonal generator sqrt(2/(r(r+1))) (sum_{j<=r} |j><j| - r |r+1><r+1|)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if not (1 <= r <= d - 1):
        raise ValueError(f"r must lie in 1..{d - 1}, got {r}")
    diag = np.zeros(d)
    diag[:r] = 1.0
    diag[r] = -float(r)
    return np.sqrt(2.0 / (r * (r + 1))) * np.diag(diag).astype(np.complex128)


def _check_pair(k: int, j: int, d: int) -> None:
    if d < 2:
        raise ValueError("d must be at least 2")
    if not (1 <= k < j <= d):
        raise ValueError(f"need 1 <= k < j <= {d}, got ({k}, {j})")


@dataclass
class GeneratorSet:
    """Complete generator family for one local dimension."""

    d: int
    thetas: dict[tuple[int, int], np.ndarray] = field(repr=False)
    betas: dict[tuple[int, int], np.ndarray] = field(repr=False)
    etas: dict[int, np.ndarray] = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.thetas) + len(self.betas) + len(self.etas)

    def matrices(self) -> list[np.ndarray]:
        """All generators in a fixed order: thetas, betas, then etas."""
        pairs = sorted(self.thetas)
        return (
            [self.thetas[p] for p in pairs]
            + [self.betas[p] for p in pairs]
            + [self.etas[r] for r in sorted(self.etas)]
        )


def generator_set(d: int) -> GeneratorSet:
    """Build the full family: d(d-1)/2 thetas, d(d-1)/2 betas, d-1 etas."""
    if d < 2:
        raise ValueError("d must be at least 2")
    pairs = [(k, j) for k in range(1, d + 1) for j in range(k + 1, d + 1)]
    return GeneratorSet(
        d=d,
        thetas={p: theta(*p, d) for p in pairs},
        betas={p: beta(*p, d) for p in pairs},
        etas={r: eta(r, d) for r in range(1, d)},
    )
