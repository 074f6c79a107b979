"""Matrix product states with periodic boundary conditions.

A state on N sites is defined by per-site families {A_k : k = 0..d-1} of
m-by-m matrices; the coefficient of the word k1..kN is the trace of the
ordered product A_{k1}^[1] ... A_{kN}^[N].  No normalization is applied:
the raw trace coefficients are returned and the norm is reported separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ehmm import DEFAULT_SIZE_CAP, _check_cap
from .linalg import TensorVector, as_matrix

GAUGE_TOL = 1e-12

__all__ = [
    "GAUGE_TOL",
    "SiteTensorSet",
    "GaugeReport",
    "gauge_check",
    "require_gauge",
    "coefficient",
    "build_state",
    "state_norm",
]


@dataclass(frozen=True)
class SiteTensorSet:
    """Per-site families of m x m matrices indexed by physical symbol.

    ``sites[l][k]`` is A_k at site l+1.  A translation-invariant set stores a
    single family and serves it for every site.
    """

    sites: tuple[tuple[np.ndarray, ...], ...] = field(repr=False)
    translation_invariant: bool = False

    def __post_init__(self) -> None:
        sites = tuple(tuple(as_matrix(a) for a in fam) for fam in self.sites)
        if not sites or not sites[0]:
            raise ValueError("tensor set needs at least one site with one symbol")
        m = sites[0][0].shape[0]
        d = len(sites[0])
        for l, fam in enumerate(sites, start=1):
            if len(fam) != d:
                raise ValueError(f"site {l} has {len(fam)} symbols, expected {d}")
            for k, a in enumerate(fam):
                if a.shape != (m, m):
                    raise ValueError(
                        f"site {l} symbol {k} has shape {a.shape}, expected ({m}, {m})"
                    )
        object.__setattr__(self, "sites", sites)

    @property
    def m(self) -> int:
        return self.sites[0][0].shape[0]

    @property
    def d(self) -> int:
        return len(self.sites[0])

    @property
    def n_sites(self) -> int | None:
        return None if self.translation_invariant else len(self.sites)

    def family_at(self, site: int) -> tuple[np.ndarray, ...]:
        """Matrix family at 1-based site index."""
        if site < 1:
            raise ValueError(f"site index {site} must be >= 1")
        if self.translation_invariant:
            return self.sites[0]
        if site > len(self.sites):
            raise ValueError(f"site {site} exceeds {len(self.sites)} stored sites")
        return self.sites[site - 1]

    def compatible_length(self, n: int) -> bool:
        return self.translation_invariant or n <= len(self.sites)


@dataclass(frozen=True)
class GaugeReport:
    """Per-site Frobenius deviation of sum_k A_k A_k^dag from the identity."""

    deviations: tuple[float, ...]
    tol: float

    @property
    def passes(self) -> tuple[bool, ...]:
        return tuple(dev <= self.tol for dev in self.deviations)

    @property
    def ok(self) -> bool:
        return all(self.passes)

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)


def gauge_check(t: SiteTensorSet, tol: float = GAUGE_TOL) -> GaugeReport:
    """Measure the gauge condition sum_k A_k A_k^dag = I at every stored site."""
    eye = np.eye(t.m)
    devs = []
    for fam in t.sites:
        acc = sum(a @ a.conj().T for a in fam)
        devs.append(float(np.linalg.norm(acc - eye)))
    return GaugeReport(tuple(devs), tol)


def require_gauge(t: SiteTensorSet, tol: float = GAUGE_TOL) -> None:
    report = gauge_check(t, tol)
    if not report.ok:
        worst = max(range(len(report.deviations)), key=report.deviations.__getitem__)
        raise ValueError(
            f"gauge condition fails at site {worst + 1}: "
            f"deviation {report.deviations[worst]:.3e} > {tol:.1e}"
        )


def coefficient(t: SiteTensorSet, word: Sequence[int]) -> complex:
    """Trace of the ordered matrix product selected by the symbol word."""
    n = len(word)
    if n < 1:
        raise ValueError("word must be nonempty")
    if not t.compatible_length(n):
        raise ValueError(f"word length {n} exceeds {len(t.sites)} stored sites")
    prod = np.eye(t.m, dtype=np.complex128)
    for l, k in enumerate(word, start=1):
        k = int(k)
        if not 0 <= k < t.d:
            raise ValueError(f"symbol {k} out of range 0..{t.d - 1}")
        prod = prod @ t.family_at(l)[k]
    return complex(np.trace(prod))


def build_state(
    t: SiteTensorSet, n_sites: int, size_cap: int = DEFAULT_SIZE_CAP
) -> TensorVector:
    """Dense state over d^N words, entry at word w = coefficient(t, w).

    Evaluated word by word with a running matrix product; this route is
    deliberately independent of the transfer-operator route in `state_norm`.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    if not t.compatible_length(n_sites):
        raise ValueError(f"{n_sites} sites exceed {len(t.sites)} stored sites")
    _check_cap(t.d**n_sites, size_cap)
    entries = np.empty(t.d**n_sites, dtype=np.complex128)
    for idx, word in enumerate(np.ndindex(*(t.d,) * n_sites)):
        entries[idx] = coefficient(t, word)
    return TensorVector((t.d,) * n_sites, entries)


def state_norm(t: SiteTensorSet, n_sites: int) -> float:
    """Norm of the periodic state via the transfer operator, without the dense state.

    The row-major matrix of M |-> sum_k A_k M A_k^dag is sum_k A_k (x) conj(A_k);
    the squared norm is the trace of the product of these site matrices.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    if not t.compatible_length(n_sites):
        raise ValueError(f"{n_sites} sites exceed {len(t.sites)} stored sites")
    prod = np.eye(t.m * t.m, dtype=np.complex128)
    for l in range(1, n_sites + 1):
        transfer = sum(np.kron(a, a.conj()) for a in t.family_at(l))
        prod = prod @ transfer
    norm_sq = complex(np.trace(prod))
    return math.sqrt(max(norm_sq.real, 0.0))
