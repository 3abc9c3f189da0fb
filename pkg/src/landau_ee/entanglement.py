"""Entanglement spectra of spatially restricted Fermi projections, Rényi
entropies, cross-operator Schatten norms, and area-law scaling scans.

The central reduction: with C an orthonormal frame for the range of the
Fermi projection Pi and O the region overlap matrix, the eigenvalues of
C* O C are the entanglement spectrum — the spectrum of 1_R Pi 1_R away from
trivial zeros. Entropies are spectral sums of the binary Rényi function
h_alpha; every local_entropy call cross-checks the equivalent route through
g_alpha(4 lambda (1 - lambda)) (the two functions agree on spectra of
restricted projections by an exact operator identity).

Cross-region Schatten norms of a single projection come exactly from the
spectrum: |1_Rc Pi 1_R|^2 has eigenvalues lambda (1 - lambda). Only the
difference of two projections needs an honest compressed SVD.
"""

import math
from dataclasses import dataclass

import numpy as np

from .assembly import (
    as_matrix,
    assemble_full_h,
    assemble_h0,
    assemble_overlap,
    auto_m_max,
    default_grid,
)
from .errors import DomainError, TruncationInadequacyError
from .fields import zero_field, zero_potential
from .landau import LandauBasisSpec
from .special import renyi_h, g_of_t
from .spectral import occupied_frame, schatten_pnorm

#: eigenvalues may stray this far outside [0, 1] before clipping
CLIP_TOL = 1e-8
#: beyond this the truncation is declared inadequate
CLIP_HARD_TOL = 1e-6
#: dual-formula agreement required of every entropy evaluation
DUAL_ROUTE_TOL = 1e-10


@dataclass
class EntanglementSpectrum:
    """Eigenvalues of a restricted projection, descending in [0, 1]."""

    lambdas: np.ndarray
    clip_count: int
    trace: float


@dataclass
class EntropyResult:
    L: float
    alpha: float
    S: float
    hamiltonian_tag: str = "unperturbed"

    def __post_init__(self):
        if self.S < 0:
            raise DomainError(f"entropy must be non-negative, got {self.S}")


def _clip_spectrum(raw):
    lam = np.sort(np.real(raw))[::-1]
    worst = max(float(-lam.min(initial=0.0)), float(lam.max(initial=0.0) - 1.0), 0.0)
    if worst > CLIP_HARD_TOL:
        raise TruncationInadequacyError(
            f"restricted-projection eigenvalue strays {worst:.3e} outside [0,1]; "
            "the basis truncation does not contain the region"
        )
    clip_count = int(np.sum((lam < 0.0) | (lam > 1.0)))
    return np.clip(lam, 0.0, 1.0), clip_count


def entanglement_spectrum(pi, overlap, frame=None):
    """Spectrum of the restricted projection from Pi and the overlap O.

    ``frame`` short-circuits the eigendecomposition of Pi with a known
    orthonormal basis of its range (columns); otherwise the frame is read
    off the eigenvectors of Pi with eigenvalue near 1.
    """
    o = as_matrix(overlap)
    if frame is None:
        p = as_matrix(pi)
        lam, vec = np.linalg.eigh(p)
        if lam.size and (lam.min() < -1e-8 or lam.max() > 1.0 + 1e-8):
            raise DomainError("input is not a projection (eigenvalues off {0,1})")
        frame = vec[:, lam > 0.5]
        trace_po = float(np.real(np.trace(p @ o)))
    else:
        trace_po = float(np.real(np.trace(frame.conj().T @ o @ frame)))
    compressed = frame.conj().T @ o @ frame
    lam, clip_count = _clip_spectrum(np.linalg.eigvalsh(compressed))
    spectrum = EntanglementSpectrum(lam, clip_count, float(np.sum(lam)))
    gap = abs(spectrum.trace - trace_po)
    if gap > 1e-8 * max(1.0, abs(trace_po)):
        raise TruncationInadequacyError(
            f"trace of restricted projection ({spectrum.trace:.12g}) disagrees "
            f"with tr(Pi O) ({trace_po:.12g}) by {gap:.3e}"
        )
    return spectrum


def local_entropy(es, alpha, L=1.0, tag="unperturbed"):
    """Rényi entropy S_alpha = sum_k h_alpha(lambda_k).

    Every call verifies the dual route sum_k g_alpha(4 lambda_k (1-lambda_k))
    to 1e-10 — the identity behind the cross-norm bounds.
    """
    lam = np.asarray(es.lambdas)
    s_h = float(np.sum(renyi_h(alpha, lam)))
    s_g = float(np.sum(g_of_t(alpha, 4.0 * lam * (1.0 - lam))))
    if abs(s_h - s_g) > DUAL_ROUTE_TOL * max(1.0, abs(s_h)):
        raise DomainError(
            f"entropy routes disagree: h-sum {s_h!r} vs g-sum {s_g!r}"
        )
    return EntropyResult(L=L, alpha=alpha, S=s_h, hamiltonian_tag=tag)


def cross_schatten_from_spectrum(es, p):
    """||1_Rc Pi 1_R||_p^p computed exactly from the entanglement spectrum.

    The operator |1_Rc Pi 1_R|^2 shares the nonzero spectrum of
    lambda (1 - lambda), so the p-th power of the norm is
    sum_k (lambda_k (1 - lambda_k))^{p/2} with no extra compression error.
    """
    if not p > 0:
        raise DomainError(f"Schatten order must be positive, got {p}")
    lam = np.asarray(es.lambdas)
    prod = lam * (1.0 - lam)
    prod = prod[prod > 0.0]
    if prod.size == 0:
        return 0.0
    return float(np.sum(prod ** (0.5 * p)))


def difference_cross_norm(pi_unpert, pi_pert, overlap, p):
    """p-th power of ||O (Pi_pert - Pi_unpert) (I - O)||_p via SVD."""
    o = as_matrix(overlap)
    delta = as_matrix(pi_pert) - as_matrix(pi_unpert)
    eye = np.eye(o.shape[0])
    compressed = o @ delta @ (eye - o)
    return schatten_pnorm(compressed, p).value ** p


# ---------------------------------------------------------------------------
# area-law scan


@dataclass(frozen=True)
class TruncationPolicy:
    """auto: m_max from the scaled region per level count l_max."""

    mode: str = "auto"
    l_max: int = 4
    m_max: int = 0

    def __post_init__(self):
        if self.mode not in ("auto", "explicit"):
            raise DomainError(f"unknown truncation mode {self.mode!r}")
        if self.mode == "explicit" and self.m_max < 1:
            raise DomainError("explicit truncation needs m_max >= 1")

    def spec_for(self, b0, region, scale):
        if self.mode == "explicit":
            return LandauBasisSpec(b0, self.l_max, self.m_max)
        m_max = auto_m_max(b0, region.circumradius * scale)
        return LandauBasisSpec(b0, self.l_max, m_max)


@dataclass
class ScanRow:
    L: float
    alpha: float
    s_unpert: float
    s_pert: float
    cross_norms: dict
    diff_norms: dict


@dataclass
class ScanTable:
    rows: list
    alphas: tuple
    p_values: tuple

    def column(self, name, alpha=None):
        rows = [r for r in self.rows if alpha is None or r.alpha == alpha]
        if alpha is None:
            seen = set()
            rows = [r for r in rows if r.L not in seen and not seen.add(r.L)]
        if name == "L":
            return np.array([r.L for r in rows])
        if name == "S_unpert":
            return np.array([r.s_unpert for r in rows])
        if name == "S_pert":
            return np.array([r.s_pert for r in rows])
        if name.startswith("cross_p"):
            return np.array([r.cross_norms[float(name[7:])] for r in rows])
        if name.startswith("diff_p"):
            return np.array([r.diff_norms[float(name[6:])] for r in rows])
        raise DomainError(f"unknown scan column {name!r}")


def _analytic_frame(spec, interval):
    """Orthonormal occupied frame of H0: the level blocks inside [a, b]."""
    energies = spec.b0 * (2.0 * np.arange(spec.l_max + 1) + 1.0)
    cols = []
    for l, e in enumerate(energies):
        if interval[0] <= e <= interval[1]:
            cols.extend(range(l * spec.m_max, (l + 1) * spec.m_max))
    frame = np.zeros((spec.dim, len(cols)), dtype=complex)
    for j, c in enumerate(cols):
        frame[c, j] = 1.0
    return frame


def scan_row(b0, field, potential, region, scale, alphas, interval, p_values,
             policy=None, theta_offset=0.0, quadrature=None):
    """One L-row of the area-law scan: entropies for both Hamiltonians plus
    cross/difference norms.

    A perturbation that is identically zero short-circuits the perturbed
    side to the unperturbed frame, making the two columns bitwise equal.
    """
    policy = policy or TruncationPolicy()
    spec = policy.spec_for(b0, region, scale)
    grid = default_grid(spec, theta_offset=theta_offset, overrides=quadrature)
    overlap = assemble_overlap(spec, region, scale, grid=grid)

    frame0 = _analytic_frame(spec, interval)
    es0 = entanglement_spectrum(None, overlap, frame=frame0)

    trivial = field.amplitude == 0.0 and potential.amplitude == 0.0
    if trivial:
        es1 = es0
        pi0 = pi1 = None
    else:
        h = assemble_full_h(spec, field, potential, grid=grid)
        frame1 = occupied_frame(h, interval, b0=b0)
        es1 = entanglement_spectrum(None, overlap, frame=frame1)
        pi0 = frame0 @ frame0.conj().T
        pi1 = frame1 @ frame1.conj().T

    rows = []
    cross = {p: cross_schatten_from_spectrum(es1, p) for p in p_values}
    if trivial:
        diff = {p: 0.0 for p in p_values}
    else:
        diff = {p: difference_cross_norm(pi0, pi1, overlap, p) for p in p_values}
    for alpha in alphas:
        s0 = local_entropy(es0, alpha, L=scale).S
        s1 = s0 if trivial else local_entropy(es1, alpha, L=scale, tag="perturbed").S
        rows.append(ScanRow(scale, alpha, s0, s1, cross, diff))
    return rows


def area_law_scan(b0, field, potential, region, l_grid, alphas, interval,
                  p_values=(1.0,), policy=None, jobs=1, quadrature=None):
    """ScanTable over the scale grid; rows computed independently per L."""
    scales = sorted(float(s) for s in l_grid)
    if len(set(scales)) != len(scales):
        raise DomainError("scale grid contains repeated values")
    args = [
        (b0, field, potential, region, s, tuple(alphas), tuple(interval),
         tuple(p_values), policy, 0.0, quadrature)
        for s in scales
    ]
    if jobs > 1 and len(scales) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_scan_row_star, args))
    else:
        chunks = [_scan_row_star(a) for a in args]
    rows = [row for chunk in chunks for row in chunk]  # ascending-L merge
    return ScanTable(rows, tuple(alphas), tuple(p_values))


def _scan_row_star(args):
    return scan_row(*args)


# ---------------------------------------------------------------------------
# fits


def fit_slope(table, column, window, alpha=None):
    """OLS fit of `column` against L over the top-`window` scales.

    Returns (slope, intercept, r_squared); needs >= 3 points.
    """
    x = table.column("L", alpha=alpha)
    y = table.column(column, alpha=alpha)
    if window > x.size:
        window = x.size
    if window < 3:
        raise DomainError("fit window needs at least 3 points")
    x, y = x[-window:], y[-window:]
    if np.ptp(x) == 0:
        raise DomainError("degenerate fit window: all scales equal")
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r_squared


def pnorm_scaling_exponent(table, which, p):
    """Least-squares slope of log(norm^p) against log(L)."""
    if which not in ("same", "difference"):
        raise DomainError(f"`which` must be 'same' or 'difference', got {which!r}")
    x = table.column("L")
    col = ("cross_p" if which == "same" else "diff_p") + repr(float(p))
    y = table.column(col)
    if np.any(y <= 0):
        raise DomainError(
            f"{which} norm column contains non-positive values; "
            "cannot fit a log-log exponent"
        )
    if x.size < 2:
        raise DomainError("exponent fit needs at least 2 scales")
    slope = np.polyfit(np.log(x), np.log(y), 1)[0]
    return float(slope)
