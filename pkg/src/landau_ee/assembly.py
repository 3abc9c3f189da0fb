"""Quadrature grids and assembly of H0, H_eps, H = H0 + H_eps, and region
overlap matrices in the truncated Landau basis.

The workhorse is a factorized polar Galerkin rule: on a tensor grid
(Gauss-Legendre radii) x (uniform angles), a matrix element of a
multiplication operator f splits as

    <phi_i | f | phi_j> = 2 pi sum_r w_r r conj(R_i(r)) R_j(r) fhat_{q_i-q_j}(r),

where fhat_k are the angular Fourier coefficients of f on the grid (an FFT —
an exact rearrangement of the full 2D trapezoid-in-angle sum, since the
angular rule is uniform). Radial fields populate only a handful of modes, so
the assembly reduces to a few small matrix products per angular-momentum
block pair.

The covariant-derivative part of H_eps uses the ladder identities
(-i grad - A0)_1 = sqrt(B0)(a_+ + a_-)/2 and
(-i grad - A0)_2 = sqrt(B0)(a_+ - a_-)/(2i), which turn
2 A.(-i grad - A0) phi_{l,m} into sqrt(B0) [ sqrt(2l+2) A_- phi_{l+1,m}
+ sqrt(2l) A_+ phi_{l-1,m} ] with A_pm = A_1 +- i A_2. The raised function at
l_max + 1 is kept exactly (radial tables extend one level past the frame), so
the assembled matrix is the exact Galerkin compression and its residual
asymmetry measures pure quadrature error.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .errors import DomainError, QuadratureInadequacyError
from .fields import gauge_convolve
from .landau import LandauBasisSpec, radial_table

#: assembled matrices may deviate from Hermitian by at most this much
ASYMMETRY_TOL = 1e-6
#: spectral range slack allowed for overlap matrices before a hard error
OVERLAP_RANGE_TOL = 1e-6
#: eigenvalues within this of [0, 1] are clipped back onto it
OVERLAP_CLIP_TOL = 1e-8


@dataclass(frozen=True)
class QuadratureGrid:
    """Polar product rule: Gauss-Legendre on [0, r_max] x uniform angles.

    ``theta_offset`` rotates the angular grid; physical results must be
    invariant under it (rotational-symmetry checks exploit this).
    """

    n_radial: int
    n_angular: int
    r_max: float
    theta_offset: float = 0.0

    def __post_init__(self):
        if self.n_radial < 1 or self.n_angular < 1 or not self.r_max > 0:
            raise DomainError("quadrature grid needs positive node counts and radius")

    def radial(self):
        nodes, weights = roots_legendre(self.n_radial)
        r = 0.5 * self.r_max * (nodes + 1.0)
        w = 0.5 * self.r_max * weights
        return r, w

    def angles(self):
        return self.theta_offset + np.arange(self.n_angular) * (
            2.0 * math.pi / self.n_angular
        )

    @property
    def total_weight(self):
        """Integral of 1 over the disk of radius r_max under this rule."""
        r, w = self.radial()
        return 2.0 * math.pi * float(np.sum(w * r))

    def points(self):
        """Grid points, shape (n_radial, n_angular, 2)."""
        r, _ = self.radial()
        th = self.angles()
        return np.stack(
            [r[:, None] * np.cos(th)[None, :], r[:, None] * np.sin(th)[None, :]],
            axis=-1,
        )


def default_grid(spec, theta_offset=0.0, l_top=None, overrides=None):
    """Grid policy sized to the frame: covers the outermost orbital plus
    eight magnetic lengths of Gaussian tail, resolves the
    polynomial-times-Gaussian radial integrands and every angular harmonic
    the frame (including the raised level) can produce.

    `overrides` may replace any of n_radial / n_angular / r_max; the
    assembly-time health checks still apply, so an inadequate override
    fails loudly rather than degrading results.
    """
    if l_top is None:
        l_top = spec.l_max + 1
    lb = 1.0 / math.sqrt(spec.b0)
    sizes = {
        "n_radial": 2 * spec.m_max + 40,
        "n_angular": 4 * (l_top + spec.m_max) + 20,
        "r_max": math.sqrt(2.0 * spec.m_max / spec.b0) + 8.0 * lb,
    }
    if overrides:
        unknown = set(overrides) - set(sizes)
        if unknown:
            raise DomainError(f"unknown grid override(s) {sorted(unknown)}")
        sizes.update(overrides)
    return QuadratureGrid(
        int(sizes["n_radial"]), int(sizes["n_angular"]),
        float(sizes["r_max"]), theta_offset,
    )


def auto_m_max(b0, scaled_radius):
    """Angular cutoff policy: contain a region of radius r plus four magnetic
    lengths of margin (the LLL orbital m extends to about sqrt(2(m+1)/B0))."""
    return int(math.ceil(0.5 * b0 * (scaled_radius + 4.0 / math.sqrt(b0)) ** 2)) + 10


@dataclass
class HermitianMatrix:
    """Dense Hermitian operator in the truncated frame.

    ``matrix`` holds the hermitized entries; ``asymmetry`` records
    max |raw - raw*| before hermitization (a quadrature health metric).
    """

    matrix: np.ndarray
    asymmetry: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("HermitianMatrix needs a square matrix")
        herm_gap = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if herm_gap > 1e-10:
            raise DomainError(f"matrix not Hermitian after hermitization ({herm_gap:.2e})")

    @property
    def dim(self):
        return self.matrix.shape[0]


def as_matrix(h):
    """Accept HermitianMatrix or a plain ndarray."""
    return h.matrix if isinstance(h, HermitianMatrix) else np.asarray(h)


def _hermitize(raw, what):
    asym = float(np.max(np.abs(raw - raw.conj().T))) if raw.size else 0.0
    if asym > ASYMMETRY_TOL:
        raise QuadratureInadequacyError(
            f"{what}: asymmetry {asym:.3e} exceeds {ASYMMETRY_TOL:g}; "
            "the quadrature grid does not resolve the integrands"
        )
    return HermitianMatrix(0.5 * (raw + raw.conj().T), asym)


@dataclass(frozen=True)
class RegionSpec:
    """Bounded region containing the origin: disk(radius) or square(side)."""

    shape: str
    radius: float = 0.0
    side: float = 0.0

    def __post_init__(self):
        if self.shape == "disk":
            if not self.radius > 0:
                raise DomainError("disk region needs a positive radius")
        elif self.shape == "square":
            if not self.side > 0:
                raise DomainError("square region needs a positive side")
        else:
            raise DomainError(f"unknown region shape {self.shape!r}")

    @property
    def circumradius(self):
        return self.radius if self.shape == "disk" else self.side / math.sqrt(2.0)

    def perimeter(self, scale=1.0):
        if self.shape == "disk":
            return 2.0 * math.pi * self.radius * scale
        return 4.0 * self.side * scale


def disk_region(radius):
    return RegionSpec("disk", radius=radius)


def square_region(side):
    return RegionSpec("square", side=side)


# ---------------------------------------------------------------------------
# factorized multiplication-operator assembly


def _frame_arrays(spec, grid, l_top):
    """(q, rad) for the lexicographic (l, m) frame up to level l_top."""
    r, _ = grid.radial()
    tab = radial_table(spec, r, l_top=l_top)  # (l_top+1, m_max, nr)
    rad = tab.reshape((l_top + 1) * spec.m_max, r.size)
    l = np.repeat(np.arange(l_top + 1), spec.m_max)
    m = np.tile(np.arange(spec.m_max), l_top + 1)
    return l - m, rad


def _angular_modes(grid, f_grid):
    """Fourier coefficients fhat_k(r) of f on the angular grid.

    f_grid has shape (n_radial, n_angular); returns the same array FFT'd so
    that column k holds (1/2pi) int f e^{-ik theta} d theta for k mod n.
    """
    n = grid.n_angular
    fhat = np.fft.fft(np.asarray(f_grid, dtype=complex), axis=1) / n
    if grid.theta_offset != 0.0:
        k = np.arange(n)
        k = np.where(k <= n // 2, k, k - n)  # signed harmonics
        fhat *= np.exp(-1j * k[None, :] * grid.theta_offset)
    return fhat


def _mult_matrix(grid, fhat, row_q, row_rad, col_q, col_rad):
    """Galerkin matrix of the multiplication operator with angular modes fhat."""
    r, w = grid.radial()
    wr = 2.0 * math.pi * w * r
    n = grid.n_angular
    mode_scale = np.max(np.abs(fhat), axis=0)
    tol = 1e-16 * float(np.max(mode_scale)) if np.any(mode_scale) else 0.0
    out = np.zeros((len(row_q), len(col_q)), dtype=complex)
    row_groups = {q: np.flatnonzero(row_q == q) for q in np.unique(row_q)}
    col_groups = {q: np.flatnonzero(col_q == q) for q in np.unique(col_q)}
    for qa, ia in row_groups.items():
        ra = row_rad[ia].conj()
        for qb, ib in col_groups.items():
            k = int(qa - qb) % n
            if mode_scale[k] <= tol:
                continue
            out[np.ix_(ia, ib)] = (ra * (wr * fhat[:, k])[None, :]) @ col_rad[ib].T
    return out


def gram_matrix(spec, grid=None):
    """Gram matrix of the frame under the grid; must be the identity to 1e-8
    for the default policy (this gates every other assembly)."""
    grid = grid or default_grid(spec)
    q, rad = _frame_arrays(spec, grid, spec.l_max)
    ones = np.ones((grid.n_radial, grid.n_angular))
    fhat = _angular_modes(grid, ones)
    return _mult_matrix(grid, fhat, q, rad, q, rad)


# ---------------------------------------------------------------------------
# operator assembly


def assemble_h0(spec):
    """H0 in the frame: diagonal with entries B0 (2l + 1)."""
    lev = spec.level_index()
    return HermitianMatrix(np.diag(spec.b0 * (2.0 * lev + 1.0)).astype(complex))


def number_operator(spec):
    """Matrix of a_+ a_- (diagonal, entries 2l): ladder consistency helper."""
    lev = spec.level_index()
    return np.diag(2.0 * lev).astype(complex)


def assemble_heps(spec, field, potential, grid=None, pseudo=None):
    """Perturbation H_eps = 2 A_eps . (-i grad - A0) + W_eps in the frame.

    Parameters
    ----------
    spec : LandauBasisSpec
    field : FieldFamily
    potential : PotentialFamily
    grid : QuadratureGrid, optional
        Default: the policy grid for the frame.
    pseudo : callable, optional
        Override for the scalar part W(x) evaluated on (..., 2) points;
        used by diagnostics (e.g. a constant test potential). Default is
        |A_eps|^2 + V_eps.

    Returns
    -------
    HermitianMatrix
        Exact Galerkin compression up to quadrature error; raises
        ``QuadratureInadequacyError`` when the pre-hermitization asymmetry
        exceeds 1e-6.
    """
    grid = grid or default_grid(spec)
    pts = grid.points()
    a = gauge_convolve(field, pts)
    if pseudo is None:
        w = a[..., 0] ** 2 + a[..., 1] ** 2 + potential.value(pts)
    else:
        w = np.broadcast_to(np.asarray(pseudo(pts), dtype=float), pts.shape[:2])

    row_q, row_rad = _frame_arrays(spec, grid, spec.l_max)
    ext_q, ext_rad = _frame_arrays(spec, grid, spec.l_max + 1)

    raw = _mult_matrix(grid, _angular_modes(grid, w), row_q, row_rad, row_q, row_rad)

    if np.any(a):
        a_minus = a[..., 0] - 1j * a[..., 1]
        a_plus = a[..., 0] + 1j * a[..., 1]
        t_minus = _mult_matrix(
            grid, _angular_modes(grid, a_minus), row_q, row_rad, ext_q, ext_rad
        )
        t_plus = _mult_matrix(
            grid, _angular_modes(grid, a_plus), row_q, row_rad, ext_q, ext_rad
        )
        sb = math.sqrt(spec.b0)
        deriv = np.zeros((spec.dim, spec.dim), dtype=complex)
        for l in range(spec.l_max + 1):
            cols = spec.level_block(l)
            up = slice((l + 1) * spec.m_max, (l + 2) * spec.m_max)
            deriv[:, cols] += sb * math.sqrt(2 * l + 2) * t_minus[:, up]
            if l > 0:
                down = slice((l - 1) * spec.m_max, l * spec.m_max)
                deriv[:, cols] += sb * math.sqrt(2 * l) * t_plus[:, down]
        raw = raw + deriv

    return _hermitize(raw, "assemble_heps")


def assemble_full_h(spec, field, potential, grid=None):
    """H = H0 + H_eps."""
    heps = assemble_heps(spec, field, potential, grid=grid)
    return HermitianMatrix(assemble_h0(spec).matrix + heps.matrix, heps.asymmetry)


# ---------------------------------------------------------------------------
# region overlap


def assemble_overlap(spec, region, scale, grid=None):
    """Overlap matrix <phi_i | 1_{L Lambda} | phi_j> for the scaled region.

    Disk regions integrate on a dedicated Gauss-Legendre rule over
    [0, L r0] per angular-momentum block (the matrix is exactly block
    diagonal in q = l - m); squares use a tensor Gauss-Legendre rule.
    Eigenvalues must land in [-1e-6, 1 + 1e-6]; excursions within 1e-8 are
    clipped back onto [0, 1].
    """
    if scale < 0:
        raise DomainError(f"region scale must be >= 0, got {scale}")
    if scale == 0.0:
        return HermitianMatrix(np.zeros((spec.dim, spec.dim), dtype=complex))
    grid = grid or default_grid(spec, l_top=spec.l_max)
    if region.shape == "disk":
        raw = _overlap_disk(spec, region.radius * scale, grid.n_radial)
    else:
        raw = _overlap_square(spec, region.side * scale)
    out = _hermitize(raw, "assemble_overlap")
    evals, evecs = np.linalg.eigh(out.matrix)
    if evals.min() < -OVERLAP_RANGE_TOL or evals.max() > 1.0 + OVERLAP_RANGE_TOL:
        raise QuadratureInadequacyError(
            "overlap spectrum outside [0,1] beyond tolerance: "
            f"[{evals.min():.3e}, {evals.max():.3e}]"
        )
    if evals.min() < 0.0 or evals.max() > 1.0:
        clipped = np.clip(evals, 0.0, 1.0)
        out = HermitianMatrix(
            (evecs * clipped[None, :]) @ evecs.conj().T, out.asymmetry
        )
    return out


def _overlap_disk(spec, r_cut, n_radial):
    nodes, weights = roots_legendre(n_radial)
    r = 0.5 * r_cut * (nodes + 1.0)
    w = 0.5 * r_cut * weights
    tab = radial_table(spec, r)  # (l_max+1, m_max, nr)
    rad = tab.reshape(spec.dim, r.size)
    q = spec.angular_index()
    wr = 2.0 * math.pi * w * r
    out = np.zeros((spec.dim, spec.dim), dtype=complex)
    for qv in np.unique(q):
        ix = np.flatnonzero(q == qv)
        block = (rad[ix].conj() * wr[None, :]) @ rad[ix].T
        out[np.ix_(ix, ix)] = block
    return out


def _overlap_square(spec, side, n_1d=None, chunk=4096):
    half = 0.5 * side
    if n_1d is None:
        n_1d = max(
            80, spec.m_max + 20, int(math.ceil(6.0 * half * math.sqrt(spec.b0)))
        )
    nodes, weights = roots_legendre(n_1d)
    g = half * nodes
    wg = half * weights
    X, Y = np.meshgrid(g, g, indexing="ij")
    W = np.outer(wg, wg).ravel()
    pts = np.stack([X.ravel(), Y.ravel()], axis=-1)
    r = np.hypot(pts[:, 0], pts[:, 1])
    th = np.arctan2(pts[:, 1], pts[:, 0])
    q = spec.angular_index()
    out = np.zeros((spec.dim, spec.dim), dtype=complex)
    for start in range(0, len(pts), chunk):
        sl = slice(start, min(start + chunk, len(pts)))
        tab = radial_table(spec, r[sl]).reshape(spec.dim, -1)
        phi = tab * np.exp(1j * q[:, None] * th[sl][None, :])
        out += (phi.conj() * W[sl][None, :]) @ phi.T
    return out
