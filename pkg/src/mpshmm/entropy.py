"""Density matrices, quantum relative entropy, and the divergence lower bound.

Two observation density matrices are built for the same object: a transfer
formula chaining Schur products of site tensors, and the literal partial
trace of the joint pure state over all hidden factors.  They agree whenever
the tensors come from a model, and the pair doubles as a cross-check.

The lower bound compares the periodic-MPS density (1/m)|psi><psi| against
the observation density: dephasing both in the word basis turns the relative
entropy into a classical divergence between |Tr prod A|^2 / m and the
diagonal transfer weights, which is exactly the closed-form right-hand side
evaluated here.  Natural logarithms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bridge import tensors_from_ehmm
from .ehmm import DEFAULT_SIZE_CAP, EhmmModel, _check_cap, build_psi_hon, is_unitary
from .linalg import SUPPORT_EPS, as_matrix, hermitian_eig, partial_trace
from .mps import SiteTensorSet, build_state

BOUND_SLACK = 1e-8
HERMITIAN_TOL = 1e-10
EIGEN_FLOOR = -1e-10
PAIR_CAP = 2**13

__all__ = [
    "BOUND_SLACK",
    "DensityMatrix",
    "BoundReport",
    "mps_density",
    "observation_density_formula",
    "observation_density_trace",
    "diagonal_channel",
    "relative_entropy",
    "bound_rhs",
    "check_bound",
]


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian PSD matrix with its factorization and recorded (not forced) trace."""

    matrix: np.ndarray = field(repr=False)
    factor_dims: tuple[int, ...]
    trace_value: float = field(init=False, default=0.0)

    def __post_init__(self) -> None:
        mat = as_matrix(self.matrix)
        dims = tuple(int(x) for x in self.factor_dims)
        if mat.shape != (math.prod(dims), math.prod(dims)):
            raise ValueError(f"matrix shape {mat.shape} incompatible with factors {dims}")
        scale = max(1.0, float(np.linalg.norm(mat)))
        if float(np.linalg.norm(mat - mat.conj().T)) > HERMITIAN_TOL * scale:
            raise ValueError("density matrix is not Hermitian within tolerance")
        low = float(np.linalg.eigvalsh(mat).min())
        if low < EIGEN_FLOOR * scale:
            raise ValueError(f"density matrix has eigenvalue {low}, not PSD")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "factor_dims", dims)
        object.__setattr__(self, "trace_value", float(np.trace(mat).real))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def normalized(self) -> "DensityMatrix":
        if self.trace_value <= 0.0:
            raise ValueError("cannot normalize a traceless density matrix")
        return DensityMatrix(self.matrix / self.trace_value, self.factor_dims)


def mps_density(
    t: SiteTensorSet, n_sites: int, size_cap: int = DEFAULT_SIZE_CAP
) -> DensityMatrix:
    """The literal (1/m) |psi_N><psi_N|; trace equals |psi|^2 / m, recorded as is."""
    psi = build_state(t, n_sites, size_cap)
    mat = np.outer(psi.entries, psi.entries.conj()) / t.m
    return DensityMatrix(mat, psi.factor_dims)


def observation_density_formula(
    t: SiteTensorSet,
    pi: np.ndarray,
    n_sites: int,
    pair_cap: int = PAIR_CAP,
) -> DensityMatrix:
    """Observation density via the Schur-product transfer formula.

    Entry at (word, word') is sqrt(m) * pi^T (prod_l A_{k_l} o conj(A_{k'_l})) e
    with e the normalized all-ones vector; bra and ket words each run over
    all d^N values independently.
    """
    pi = np.asarray(pi, dtype=np.float64).reshape(-1)
    if pi.size != t.m:
        raise ValueError(f"pi has length {pi.size}, expected {t.m}")
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    n_words = t.d**n_sites
    if n_words * n_words > pair_cap:
        raise ValueError(
            f"{n_words}^2 word pairs exceed cap {pair_cap}; reduce sites or raise cap"
        )
    if not t.compatible_length(n_sites):
        raise ValueError(f"{n_sites} sites exceed {len(t.sites)} stored sites")

    # per stored site, all d*d Schur products A_k o conj(A_k')
    schur_tables = []
    for l in range(1, n_sites + 1):
        fam = t.family_at(l)
        schur_tables.append(
            [[a * b.conj() for b in fam] for a in fam]
        )
    e_vec = np.ones(t.m) / math.sqrt(t.m)
    root_m = math.sqrt(t.m)
    words = list(np.ndindex(*(t.d,) * n_sites))
    mat = np.empty((n_words, n_words), dtype=np.complex128)
    for a, word in enumerate(words):
        for b, word_p in enumerate(words):
            prod = np.eye(t.m, dtype=np.complex128)
            for l in range(n_sites):
                prod = prod @ schur_tables[l][word[l]][word_p[l]]
            mat[a, b] = root_m * (pi @ prod @ e_vec)
    return DensityMatrix(mat, (t.d,) * n_sites)


def observation_density_trace(
    model: EhmmModel, n_sites: int, size_cap: int = DEFAULT_SIZE_CAP
) -> DensityMatrix:
    """Observation density as the partial trace of the joint pure state."""
    psi = build_psi_hon(model, n_sites, size_cap)
    _check_cap(psi.dim * psi.dim, size_cap)
    rho = np.outer(psi.entries, psi.entries.conj())
    keep = range(n_sites + 1, 2 * n_sites + 1)
    reduced = partial_trace(rho, psi.factor_dims, keep)
    return DensityMatrix(reduced, (model.d,) * n_sites)


def diagonal_channel(rho: DensityMatrix) -> DensityMatrix:
    """Dephase in the word basis: zero all off-diagonal entries."""
    return DensityMatrix(np.diag(np.diag(rho.matrix)), rho.factor_dims)


def relative_entropy(
    rho: DensityMatrix, sigma: DensityMatrix, eps: float = SUPPORT_EPS
) -> float:
    """Tr(rho log rho) - Tr(rho log sigma) on supports; +inf if supports split.

    Eigenvalues at or below eps count as zero.  An eigenvector of rho with
    eigenvalue above eps overlapping the null space of sigma by more than eps
    makes the divergence infinite.
    """
    r = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    s = sigma.matrix if isinstance(sigma, DensityMatrix) else as_matrix(sigma)
    if r.shape != s.shape:
        raise ValueError(f"shape mismatch {r.shape} vs {s.shape}")
    spec_r = hermitian_eig(r)
    spec_s = hermitian_eig(s)
    if spec_r.eigenvalues.min() < -eps or spec_s.eigenvalues.min() < -eps:
        raise ValueError("inputs must be positive semidefinite within eps")

    lam = spec_r.eigenvalues
    mu = spec_s.eigenvalues
    overlap = np.abs(spec_r.eigenvectors.conj().T @ spec_s.eigenvectors) ** 2
    r_support = lam > eps
    s_null = mu <= eps
    if np.any(s_null):
        null_mass = overlap[:, s_null].sum(axis=1)
        if np.any(null_mass[r_support] > eps):
            return math.inf

    term_r = float(np.sum(lam[r_support] * np.log(lam[r_support])))
    s_support = ~s_null
    log_mu = np.log(mu[s_support])
    term_s = float(lam[r_support] @ overlap[np.ix_(r_support, s_support)] @ log_mu)
    return term_r - term_s


def bound_rhs(
    t: SiteTensorSet,
    pi: np.ndarray,
    n_sites: int,
    eps: float = SUPPORT_EPS,
    trace_normalized: bool = False,
) -> float:
    """Closed-form lower bound for the MPS-vs-observation relative entropy.

    (1/m) sum_words |Tr prod A|^2 * log(|Tr prod A|^2 / (m^{3/2} pi^T
    (prod A o conj A) e)).  Zero numerators contribute nothing; a nonzero
    numerator over a vanishing denominator gives +inf.  With
    ``trace_normalized`` the word weights are rescaled to the unit-trace
    version of the MPS density.
    """
    pi = np.asarray(pi, dtype=np.float64).reshape(-1)
    if pi.size != t.m:
        raise ValueError(f"pi has length {pi.size}, expected {t.m}")
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    if not t.compatible_length(n_sites):
        raise ValueError(f"{n_sites} sites exceed {len(t.sites)} stored sites")
    m = t.m
    e_vec = np.ones(m) / math.sqrt(m)
    words = list(np.ndindex(*(t.d,) * n_sites))

    numerators = np.empty(len(words))
    denominators = np.empty(len(words))
    for idx, word in enumerate(words):
        prod = np.eye(m, dtype=np.complex128)
        prod_sq = np.eye(m, dtype=np.complex128)
        for l, k in enumerate(word, start=1):
            a = t.family_at(l)[k]
            prod = prod @ a
            prod_sq = prod_sq @ (a * a.conj())
        numerators[idx] = abs(complex(np.trace(prod))) ** 2
        denominators[idx] = (m ** 1.5) * float((pi @ prod_sq @ e_vec).real)

    scale = float(numerators.sum()) / m if trace_normalized else 1.0
    if trace_normalized and scale <= 0.0:
        raise ValueError("cannot trace-normalize a zero state")
    total = 0.0
    for num, den in zip(numerators, denominators):
        if num <= eps:
            continue
        if den <= eps:
            return math.inf
        if trace_normalized:
            total += (num / (m * scale)) * math.log(num / (scale * den))
        else:
            total += (num / m) * math.log(num / den)
    return float(total)


@dataclass(frozen=True)
class BoundReport:
    """Everything measured while checking the entropy lower bound.

    Literal quantities use the density (1/m)|psi><psi| exactly as defined even
    when its trace is not 1; the *_normalized fields rescale it to unit trace
    first.  ``holds`` compares the literal pair, ``holds_normalized`` the
    rescaled one; an infinite divergence satisfies the bound trivially.
    """

    s_value: float
    rhs_value: float
    s_diag: float
    holds: bool
    trace_rho: float
    trace_sigma: float
    s_value_normalized: float
    rhs_value_normalized: float
    s_diag_normalized: float
    holds_normalized: bool
    support_violation: bool
    hidden_unitary: bool

    @property
    def trace_deviation(self) -> float:
        return abs(self.trace_rho - 1.0)


def check_bound(
    model: EhmmModel,
    n_sites: int,
    eps: float = SUPPORT_EPS,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> BoundReport:
    """Run the full lower-bound pipeline for a model at N sites."""
    t = tensors_from_ehmm(model, require_unitary=False)
    hidden_unitary = all(is_unitary(u) for u in model.hidden)
    rho = mps_density(t, n_sites, size_cap)
    sigma = observation_density_trace(model, n_sites, size_cap)

    s_value = relative_entropy(rho, sigma, eps)
    s_diag = relative_entropy(diagonal_channel(rho), diagonal_channel(sigma), eps)
    rhs_value = bound_rhs(t, model.pi, n_sites, eps)

    rho_hat = rho.normalized()
    s_norm = relative_entropy(rho_hat, sigma, eps)
    s_diag_norm = relative_entropy(diagonal_channel(rho_hat), diagonal_channel(sigma), eps)
    rhs_norm = bound_rhs(t, model.pi, n_sites, eps, trace_normalized=True)

    return BoundReport(
        s_value=s_value,
        rhs_value=rhs_value,
        s_diag=s_diag,
        holds=bool(s_value >= rhs_value - BOUND_SLACK),
        trace_rho=rho.trace_value,
        trace_sigma=sigma.trace_value,
        s_value_normalized=s_norm,
        rhs_value_normalized=rhs_norm,
        s_diag_normalized=s_diag_norm,
        holds_normalized=bool(s_norm >= rhs_norm - BOUND_SLACK),
        support_violation=math.isinf(s_value),
        hidden_unitary=bool(hidden_unitary),
    )
