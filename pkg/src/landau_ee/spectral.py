"""Eigendecomposition, Fermi/Riesz spectral projections, resolvent-expansion
and contour-resolution identity checks, and Schatten p-(quasi-)norms.

Riesz projections use the trapezoid rule on a circle — spectrally accurate
for the analytic resolvent — with one dense LU solve per node and an
estimated condition number guarding against contours grazing the spectrum.

The contour-resolution check compares the order-k term of the perturbation
series of the Riesz projection against its algebraic resolution into level
projections P_l and reduced resolvents T_l. Because the integrand has a
pole of order up to k+1 inside the contour, the correct resolution is the
full sum over compositions nu of k into k+1 non-negative parts,

  -(1/2 pi i) oint R0 (Heps R0)^k dzeta
      = sum_{|nu|=k} (-1)^{z(nu)+1} S^(nu_1) Heps S^(nu_2) ... Heps S^(nu_{k+1}),

with S^(0) = P_l, S^(j) = T_l^j and z(nu) the number of zero parts. For
k <= 1 this reduces to the familiar sum_m (T Heps)^m P (Heps T)^{k-m}; from
k = 2 on, the terms carrying repeated projections (e.g. P Heps P Heps T^2)
are required — dropping them leaves an O(1) discrepancy (see the regression
test pinning this).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.linalg.lapack import zgecon
from scipy.special import logsumexp

from .assembly import HermitianMatrix, as_matrix, assemble_heps, default_grid
from .errors import ContourError, DomainError, EndpointError
from .landau import ALL_LEVELS, CofiniteLevelSet, m_resolvent_diag

#: linear-solve condition estimate beyond which a contour is rejected
CONDITION_LIMIT = 1e12
#: residual tolerances for projection invariants
PROJECTION_TOL = 1e-11


@dataclass
class EigenDecomposition:
    """Full Hermitian eigendecomposition with verified invariants."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        v = np.asarray(self.eigenvectors)
        ortho = np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1])))
        if ortho > 1e-10:
            raise DomainError(f"eigenvectors not orthonormal ({ortho:.2e})")
        if np.any(np.diff(lam) < 0):
            raise DomainError("eigenvalues must be ascending")
        self.eigenvalues = lam
        self.eigenvectors = v


def eigendecompose(h):
    """Eigendecomposition of a Hermitian matrix with residual checks."""
    m = as_matrix(h)
    lam, v = np.linalg.eigh(m)
    scale = np.linalg.norm(m)
    resid = np.max(np.abs(m @ v - v * lam[None, :]))
    if scale > 0 and resid > 1e-9 * scale:
        raise DomainError(f"eigendecomposition residual {resid:.2e} too large")
    return EigenDecomposition(lam, v)


@dataclass(frozen=True)
class ContourSpec:
    """Circle in the complex energy plane, traversed once counterclockwise."""

    center: float
    radius: float
    n_nodes: int = 64

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("contour radius must be positive")
        if self.n_nodes < 2 or self.n_nodes % 2:
            raise DomainError("contour needs an even number of nodes >= 2")

    def nodes(self):
        theta = 2.0 * math.pi * np.arange(self.n_nodes) / self.n_nodes
        return self.center + self.radius * np.exp(1j * theta)

    def weights(self):
        """Trapezoid weights for -(1/2 pi i) oint f(zeta) d zeta."""
        theta = 2.0 * math.pi * np.arange(self.n_nodes) / self.n_nodes
        return -(self.radius / self.n_nodes) * np.exp(1j * theta)


@dataclass
class SchattenReport:
    p: float
    value: float
    singular_values: np.ndarray = field(repr=False, default=None)


def _default_gap_tol(h_norm, b0=None):
    scale = b0 if b0 is not None else 1.0
    return max(1e-8 * scale, 1e-12 * h_norm)


def fermi_projection(h, interval, b0=None):
    """Spectral projection 1_[a,b](H).

    The endpoints must stay clear of the spectrum by
    max(1e-8 * B0, 1e-12 * ||H||) — projections with endpoints inside an
    eigenvalue cluster are physically meaningless here, so this raises an
    ``EndpointError`` listing the offending eigenvalues.
    """
    a, b = interval
    if not a < b:
        raise DomainError(f"interval must satisfy a < b, got [{a}, {b}]")
    m = as_matrix(h)
    dec = eigendecompose(m)
    gap_tol = _default_gap_tol(float(np.linalg.norm(m)), b0)
    for name, endpoint in (("a", a), ("b", b)):
        dist = np.abs(dec.eigenvalues - endpoint)
        if dist.size and dist.min() <= gap_tol:
            near = dec.eigenvalues[np.argsort(dist)[:3]]
            raise EndpointError(
                f"interval endpoint {name}={endpoint} within gap tolerance "
                f"{gap_tol:.2e} of the spectrum",
                nearest=list(near),
            )
    inside = (dec.eigenvalues >= a) & (dec.eigenvalues <= b)
    v = dec.eigenvectors[:, inside]
    return HermitianMatrix(v @ v.conj().T)


def occupied_frame(h, interval, b0=None):
    """Orthonormal eigenvector columns of H with eigenvalue in [a, b]."""
    a, b = interval
    m = as_matrix(h)
    dec = eigendecompose(m)
    gap_tol = _default_gap_tol(float(np.linalg.norm(m)), b0)
    for name, endpoint in (("a", a), ("b", b)):
        dist = np.abs(dec.eigenvalues - endpoint)
        if dist.size and dist.min() <= gap_tol:
            near = dec.eigenvalues[np.argsort(dist)[:3]]
            raise EndpointError(
                f"interval endpoint {name}={endpoint} within gap tolerance "
                f"{gap_tol:.2e} of the spectrum",
                nearest=list(near),
            )
    inside = (dec.eigenvalues >= a) & (dec.eigenvalues <= b)
    return dec.eigenvectors[:, inside]


def _resolvent_factors(m, nodes):
    """LU factorizations of (H - zeta_j) with condition screening."""
    out = []
    for zeta in nodes:
        a = m - zeta * np.eye(m.shape[0])
        anorm = np.linalg.norm(a, 1)
        lu, piv = lu_factor(a)
        rcond, info = zgecon(lu, anorm, norm="1")
        if info != 0 or rcond <= 0 or 1.0 / rcond > CONDITION_LIMIT:
            cond = math.inf if rcond <= 0 else 1.0 / rcond
            raise ContourError(
                f"resolvent solve at zeta={zeta:.6g} has condition estimate "
                f"{cond:.2e} > {CONDITION_LIMIT:g}; contour too close to the spectrum"
            )
        out.append((lu, piv))
    return out


def riesz_projection(h, contour):
    """-(1/2 pi i) oint (H - zeta)^{-1} d zeta by the trapezoid rule.

    Equals the spectral projection onto the eigenvalues enclosed by the
    contour, with exponentially small quadrature error in n_nodes.
    """
    m = as_matrix(h)
    dim = m.shape[0]
    nodes = contour.nodes()
    weights = contour.weights()
    factors = _resolvent_factors(m, nodes)
    eye = np.eye(dim, dtype=complex)
    acc = np.zeros((dim, dim), dtype=complex)
    for j in range(contour.n_nodes):  # fixed order: deterministic summation
        acc += weights[j] * lu_solve(factors[j], eye)
    asym = float(np.max(np.abs(acc - acc.conj().T)))
    return HermitianMatrix(0.5 * (acc + acc.conj().T), asym)


def resolvent_expansion_residual(h0, heps, zeta, n):
    """Relative Frobenius residual of the iterated resolvent identity

    (H-z)^-1 = sum_{k=0}^{2n-1} (-1)^k R0 (Heps R0)^k + (R0 Heps)^n (H-z)^-1 (Heps R0)^n

    with R0 = (H0 - z)^-1 and H = H0 + Heps; zero up to rounding for every n.
    """
    if n < 1:
        raise DomainError("expansion order n must be >= 1")
    m0 = as_matrix(h0)
    me = as_matrix(heps)
    dim = m0.shape[0]
    ev0 = np.linalg.eigvalsh(m0)
    ev = np.linalg.eigvalsh(m0 + me)
    gap = min(np.abs(ev0 - zeta).min(), np.abs(ev - zeta).min())
    tol = _default_gap_tol(float(np.linalg.norm(m0 + me)))
    if gap <= tol:
        raise EndpointError(
            f"zeta={zeta} within {gap:.2e} of a spectrum (tolerance {tol:.2e})",
            nearest=[],
        )
    eye = np.eye(dim)
    r0 = np.linalg.solve(m0 - zeta * eye, eye.astype(complex))
    r = np.linalg.solve(m0 + me - zeta * eye, eye.astype(complex))
    series = np.zeros_like(r0)
    term = r0.copy()
    for k in range(2 * n):
        series += (-1) ** k * term
        term = term @ (me @ r0)
    left = np.linalg.matrix_power(r0 @ me, n)
    right = np.linalg.matrix_power(me @ r0, n)
    rhs = series + left @ r @ right
    return float(np.linalg.norm(r - rhs) / np.linalg.norm(r))


def _compositions(total, parts):
    """All tuples of `parts` non-negative integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def contour_term_identity(spec, fields, potential, l, k, contour=None, grid=None):
    """Order-k term of the Riesz perturbation series vs its algebraic resolution.

    LHS: trapezoid quadrature of -(1/2 pi i) oint R0 (Heps R0)^k d zeta with
    the diagonal H0-resolvent, contour = circle of radius B0 around the
    level energy B0(2l+1). RHS: the composition sum over products of P_l,
    powers of T_l, and Heps described in the module docstring. Returns
    (lhs, rhs, frobenius_diff).
    """
    if l > spec.l_max - 2:
        raise DomainError("contour check needs l_max >= l + 2")
    if contour is None:
        contour = ContourSpec(spec.b0 * (2 * l + 1), spec.b0, 96)
    energy = spec.b0 * (2.0 * spec.level_index() + 1.0)
    nodes = contour.nodes()
    for zeta in nodes:
        if np.abs(energy - zeta).min() <= 1e-8 * spec.b0:
            raise ContourError(f"contour node {zeta:.6g} hits the spectrum")
    heps = assemble_heps(spec, fields, potential, grid=grid or default_grid(spec)).matrix

    weights = contour.weights()
    lhs = np.zeros_like(heps)
    for j in range(contour.n_nodes):
        d = 1.0 / (energy - nodes[j])
        term = np.diag(d).astype(complex)
        for _ in range(k):
            term = term @ (heps * d[None, :])
        lhs += weights[j] * term

    p_diag = np.where(spec.level_index() == l, 1.0, 0.0)
    t_diag = m_resolvent_diag(spec, CofiniteLevelSet(frozenset({l})), spec.b0 * (2 * l + 1))
    rhs = np.zeros_like(heps)
    for nu in _compositions(k, k + 1):
        sign = (-1.0) ** (sum(1 for part in nu if part == 0) + 1)
        factor = p_diag if nu[0] == 0 else t_diag**nu[0]
        chain = np.diag(factor).astype(complex)
        for part in nu[1:]:
            factor = p_diag if part == 0 else t_diag**part
            chain = (chain @ heps) * factor[None, :]
        rhs += sign * chain
    return lhs, rhs, float(np.linalg.norm(lhs - rhs))


def schatten_pnorm(m, p):
    """Schatten p-(quasi-)norm (sum_k s_k^p)^(1/p); p = inf gives s_1.

    Singular values below the numerical-rank threshold s_1 * max(m,n) * eps
    are treated as exact zeros — they are SVD noise, and quasi-norms (p < 1)
    amplify that noise into the leading digits. Retained p < 1 values are
    accumulated in log-space: the singular values here decay exponentially
    and naive powers underflow.
    """
    if not p > 0:
        raise DomainError(f"Schatten order must be positive, got {p}")
    m = np.asarray(m)
    s = np.linalg.svd(m, compute_uv=False)
    if math.isinf(p):
        value = float(s[0]) if s.size else 0.0
        return SchattenReport(p, value, s)
    if s.size:
        s = s[s > s[0] * max(m.shape) * np.finfo(float).eps]
    if s.size == 0:
        return SchattenReport(p, 0.0, s)
    if p >= 1:
        top = float(s[0])
        value = top * float(np.sum((s / top) ** p)) ** (1.0 / p)
    else:
        value = float(np.exp(logsumexp(p * np.log(s)) / p))
    return SchattenReport(p, value, s)


# ---------------------------------------------------------------------------
# Schatten property suite


@dataclass
class PropertyResult:
    name: str
    trials: int
    failures: int
    min_slack: float

    @property
    def passed(self):
        return self.failures == 0


def _rand_complex(rng, shape):
    m = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return m / np.linalg.norm(m)


def _rand_psd(rng, n):
    m = _rand_complex(rng, (n, n))
    h = m @ m.conj().T
    return h / np.linalg.norm(h)


def _sv(m, p):
    return schatten_pnorm(m, p).value


def schatten_property_suite(seed=0, trials=100):
    """Randomized verification of the Schatten-norm toolbox.

    Each property is exercised on `trials` random complex matrices (dims
    5-40) and reports its worst slack (negative slack = violation); the
    suite never raises on a violation, callers inspect the report.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    slacks = {name: [] for name in _PROPERTY_ORDER}

    for _ in range(trials):
        n = int(rng.integers(5, 41))
        s_mat = _rand_complex(rng, (n, n))
        t_mat = _rand_complex(rng, (n, n))
        p_small = float(rng.uniform(0.2, 1.0))
        p_big = float(rng.uniform(1.0, 4.0))
        p_any = float(rng.uniform(0.3, 4.0))
        q_any = float(rng.uniform(0.3, 4.0))

        # Monotonicity I: p <= q implies ||S||_p >= ||S||_q
        lo, hi = min(p_any, q_any), max(p_any, q_any)
        slacks["monotonicity_in_p"].append(_sv(s_mat, lo) - _sv(s_mat, hi))

        # Monotonicity II: 0 <= T <= S implies ||S||_p >= ||T||_p
        t_psd = _rand_psd(rng, n)
        gap_psd = _rand_psd(rng, n)
        slacks["monotonicity_in_order"].append(
            _sv(t_psd + gap_psd, p_any) - _sv(t_psd, p_any)
        )

        # Triangle inequality for p >= 1
        slacks["triangle"].append(
            _sv(s_mat, p_big) + _sv(t_mat, p_big) - _sv(s_mat + t_mat, p_big)
        )

        # p-triangle inequality for p <= 1 (p-th powers)
        slacks["p_triangle"].append(
            _sv(s_mat, p_small) ** p_small
            + _sv(t_mat, p_small) ** p_small
            - _sv(s_mat + t_mat, p_small) ** p_small
        )

        # Powers: ||S^p||_q^q = ||S^q||_p^p for PSD S
        s_psd = _rand_psd(rng, n)
        lam, vec = np.linalg.eigh(s_psd)
        lam = np.clip(lam, 0.0, None)
        sp = (vec * lam[None, :] ** p_any) @ vec.conj().T
        sq = (vec * lam[None, :] ** q_any) @ vec.conj().T
        slacks["powers"].append(
            -abs(_sv(sp, q_any) ** q_any - _sv(sq, p_any) ** p_any)
        )

        # Square: ||S||_p^2 = ||S* S||_{p/2}
        slacks["square"].append(
            -abs(_sv(s_mat, p_any) ** 2 - _sv(s_mat.conj().T @ s_mat, p_any / 2))
        )

        # Adjoint: ||S*||_p = ||S||_p
        slacks["adjoint"].append(-abs(_sv(s_mat.conj().T, p_any) - _sv(s_mat, p_any)))

        # Hoelder I: 1/r = 1/p + 1/q
        r = 1.0 / (1.0 / p_any + 1.0 / q_any)
        slacks["hoelder"].append(
            _sv(s_mat, p_any) * _sv(t_mat, q_any) - _sv(s_mat @ t_mat, r)
        )

        # Hoelder II (interpolation): 1/r = a/p + (1-a)/q
        a = float(rng.uniform(0.1, 0.9))
        r2 = 1.0 / (a / p_any + (1.0 - a) / q_any)
        slacks["interpolation"].append(
            _sv(s_mat, p_any) ** a * _sv(s_mat, q_any) ** (1.0 - a) - _sv(s_mat, r2)
        )

        # Hilbert-Schmidt: ||M||_2^2 equals the entrywise square sum
        slacks["hilbert_schmidt"].append(
            -abs(_sv(s_mat, 2.0) ** 2 - float(np.sum(np.abs(s_mat) ** 2)))
        )

        # Orthogonality: S* T = 0 implies ||S||_p <= ||S + T||_p
        k = int(rng.integers(1, n))
        basis = np.linalg.qr(_rand_complex(rng, (n, n)))[0]
        s_orth = basis[:, :k] @ _rand_complex(rng, (k, n))
        t_orth = basis[:, k:] @ _rand_complex(rng, (n - k, n))
        slacks["orthogonality"].append(
            _sv(s_orth + t_orth, p_any) - _sv(s_orth, p_any)
        )

    report = []
    for name in _PROPERTY_ORDER:
        vals = np.asarray(slacks[name])
        report.append(
            PropertyResult(
                name=name,
                trials=trials,
                failures=int(np.sum(vals < -1e-9)),
                min_slack=float(vals.min()),
            )
        )
    return report


_PROPERTY_ORDER = (
    "monotonicity_in_p",
    "monotonicity_in_order",
    "triangle",
    "p_triangle",
    "powers",
    "square",
    "adjoint",
    "hoelder",
    "interpolation",
    "hilbert_schmidt",
    "orthogonality",
)


def heps_resolvent_schatten(specs, fields, potential, zeta, p):
    """||Heps M_{N, zeta}||_p across a sequence of truncations.

    The values must stabilize as (l_max, m_max) grow — the operator lives in
    the p-th Schatten class for p at least 4 n0 of the field's tameness.
    """
    values = []
    for spec in specs:
        heps = assemble_heps(spec, fields, potential).matrix
        diag = m_resolvent_diag(spec, ALL_LEVELS, zeta)
        values.append(schatten_pnorm(heps * diag[None, :], p).value)
    return np.asarray(values)
