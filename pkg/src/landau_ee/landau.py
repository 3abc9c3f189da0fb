"""Symmetric-gauge Landau eigenbasis, projection and generating kernels,
ladder algebra, and the diagonal resolvent family M_{I,zeta}.

Conventions
-----------
The magnetic strength is ``B0 > 0`` and the unperturbed Hamiltonian is the
symmetric-gauge Landau operator with vector potential ``A0(x) = (B0/2) J x``,
``J = [[0, 1], [-1, 0]]``, so that its spectrum is ``B0 (2l+1)``, l = 0, 1, ...
All kernels carry the phase ``exp(i (B0/2) <x|J y>)`` with
``<x|J y> = x1 y2 - x2 y1``.

The computational frame truncates to levels ``l <= l_max`` and to ``m_max``
guiding-center states per level. The eigenfunctions are realized in polar
coordinates as

    phi_{l,m}(r, theta) = i^(l+m) (-1)^min(l,m)
        * sqrt(B0 * min(l,m)! / (2 pi * max(l,m)!))
        * u^(|m-l|/2) L^(|m-l|)_min(l,m)(u) e^(-u/2) e^(i (l-m) theta),

with ``u = B0 r^2 / 2``. The angular factor ``e^(i(l-m)theta)`` and the global
phase are pinned down jointly by two requirements: the level sums
``sum_m phi_{l,m}(x) conj(phi_{l,m}(y))`` must reproduce ``pl_kernel`` (the
lowest level is anti-holomorphic under this sign of the kernel phase), and the
inter-level ladder coefficients must come out real and positive.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad as _quad

from .errors import AccuracyError, DomainError, SingularityError
from .special import laguerre_eval

#: Default distance (in units of B0) that zeta must keep from B0(2I+1).
ZETA_GAP_TOL = 1e-6


def jrot(x):
    """Apply J = [[0,1],[-1,0]]: (x1, x2) -> (x2, -x1), on (..., 2) arrays."""
    x = np.asarray(x, dtype=float)
    return np.stack((x[..., 1], -x[..., 0]), axis=-1)


def _cross(x, y):
    """<x|Jy> = x1 y2 - x2 y1 on broadcast (..., 2) arrays."""
    return x[..., 0] * y[..., 1] - x[..., 1] * y[..., 0]


# ---------------------------------------------------------------------------
# basis frame


@dataclass(frozen=True)
class LandauBasisSpec:
    """Finite computational frame: levels 0..l_max, m = 0..m_max-1 per level.

    Indices enumerate (l, m) pairs lexicographically, so index(l, m) =
    l * m_max + m and dim = (l_max + 1) * m_max.
    """

    b0: float
    l_max: int
    m_max: int

    def __post_init__(self):
        if not self.b0 > 0:
            raise DomainError(f"B0 must be positive, got {self.b0}")
        if self.l_max < 0 or self.m_max < 1:
            raise DomainError(
                f"need l_max >= 0 and m_max >= 1, got ({self.l_max}, {self.m_max})"
            )

    @property
    def dim(self):
        return (self.l_max + 1) * self.m_max

    def index(self, l, m):
        if not (0 <= l <= self.l_max and 0 <= m < self.m_max):
            raise DomainError(
                f"basis index (l={l}, m={m}) outside frame "
                f"(l_max={self.l_max}, m_max={self.m_max})"
            )
        return l * self.m_max + m

    def pair(self, i):
        return divmod(i, self.m_max)

    def level_index(self):
        """Level l of every frame index, shape (dim,)."""
        return np.repeat(np.arange(self.l_max + 1), self.m_max)

    def angular_index(self):
        """Angular quantum number q = l - m of every frame index."""
        l = self.level_index()
        m = np.tile(np.arange(self.m_max), self.l_max + 1)
        return l - m

    def level_block(self, l):
        """slice of frame indices belonging to level l."""
        return slice(l * self.m_max, (l + 1) * self.m_max)


def _ladder_phase(l, m):
    """i^(l+m) (-1)^min(l,m): makes both ladder coefficient families real > 0."""
    return 1j ** ((l + m) % 4) * (-1) ** min(l, m)


def _norm_laguerre(a, n_top, u):
    """Normalized Laguerre table f_n(u) = sqrt(n!/(n+a)!) u^(a/2) e^(-u/2) L_n^(a)(u).

    Returns shape (n_top+1, len(u)). The recurrence is run directly on the
    normalized functions, whose coefficients stay O(1), so neither the
    factorial ratio nor u^(a/2) is ever formed (both overflow long before the
    frame sizes used here).
    """
    u = np.asarray(u, dtype=float)
    out = np.empty((n_top + 1, u.size))
    if a == 0:
        cur = np.exp(-0.5 * u)
    else:
        with np.errstate(divide="ignore"):
            logu = np.where(u > 0.0, np.log(np.where(u > 0.0, u, 1.0)), -np.inf)
        cur = np.exp(0.5 * a * logu - 0.5 * u - 0.5 * math.lgamma(a + 1))
    prev = np.zeros_like(cur)
    out[0] = cur
    for n in range(n_top):
        c1 = (2 * n + 1 + a - u) / math.sqrt((n + 1) * (n + 1 + a))
        c2 = math.sqrt(n * (n + a) / ((n + 1) * (n + 1 + a)))
        prev, cur = cur, c1 * cur - c2 * prev
        out[n + 1] = cur
    return out


def radial_table(spec, r, l_top=None, m_top=None):
    """Radial parts of the basis on a radius grid.

    Parameters
    ----------
    spec : LandauBasisSpec
    r : ndarray
        Radii, shape (nr,).
    l_top, m_top : int, optional
        Evaluate levels 0..l_top and angular indices 0..m_top-1; default the
        frame cutoffs. Assembly passes l_top = l_max + 1 for the functions
        reached by the raising operator.

    Returns
    -------
    ndarray, complex, shape (l_top+1, m_top, nr)
        R[l, m] such that phi_{l,m}(x) = R[l, m](r) * exp(i (l-m) theta);
        includes normalization and the fixed ladder phase.
    """
    if l_top is None:
        l_top = spec.l_max
    if m_top is None:
        m_top = spec.m_max
    r = np.asarray(r, dtype=float)
    u = 0.5 * spec.b0 * r**2
    pref = math.sqrt(spec.b0 / (2.0 * math.pi))
    out = np.zeros((l_top + 1, m_top, r.size), dtype=complex)
    for a in range(max(l_top + 1, m_top)):
        # pairs with |l - m| = a: (n, n+a) and (n+a, n), n = min(l, m)
        n_lo = min(l_top, m_top - 1 - a) if m_top - 1 - a >= 0 else -1
        n_hi = min(l_top - a, m_top - 1) if l_top - a >= 0 else -1
        n_top = max(n_lo, n_hi)
        if n_top < 0:
            continue
        f = _norm_laguerre(a, n_top, u)
        for n in range(n_lo + 1):
            out[n, n + a] = _ladder_phase(n, n + a) * pref * f[n]
        if a > 0:
            for n in range(n_hi + 1):
                out[n + a, n] = _ladder_phase(n + a, n) * pref * f[n]
    return out


def basis_eval(spec, idx, x):
    """Evaluate one basis function phi_{l,m} at point(s) x.

    idx is a (l, m) pair; x has shape (..., 2). Raises ``DomainError`` when
    the index falls outside the frame.
    """
    l, m = idx
    spec.index(l, m)  # validates
    x = np.asarray(x, dtype=float)
    r = np.hypot(x[..., 0], x[..., 1])
    theta = np.arctan2(x[..., 1], x[..., 0])
    u = 0.5 * spec.b0 * r**2
    a = abs(l - m)
    n = min(l, m)
    f = _norm_laguerre(a, n, u.ravel())[n].reshape(u.shape)
    pref = math.sqrt(spec.b0 / (2.0 * math.pi))
    val = _ladder_phase(l, m) * pref * f * np.exp(1j * (l - m) * theta)
    return complex(val) if val.ndim == 0 else val


# ---------------------------------------------------------------------------
# kernels


def pl_kernel(b0, l, x, y):
    """Integral kernel of the level-l projection P_l.

    p_l(x, y) = (B0/2pi) exp(-(B0/4)|x-y|^2 + i(B0/2)<x|Jy>) L_l(B0|x-y|^2/2),
    on broadcast (..., 2) points.
    """
    if l < 0:
        raise DomainError(f"level must be >= 0, got {l}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    u = 0.5 * b0 * np.sum(d * d, axis=-1)
    val = (
        (b0 / (2.0 * math.pi))
        * np.exp(-0.5 * u + 1j * (0.5 * b0) * _cross(x, y))
        * laguerre_eval(l, u)
    )
    return complex(val) if np.ndim(val) == 0 else val


def qt_kernel(b0, t, x, y):
    """Kernel of the generating operator Q_t = sum_l t^l P_l, 0 <= t < 1."""
    if not 0.0 <= t < 1.0:
        raise DomainError(f"qt_kernel needs 0 <= t < 1, got t={t}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    dd = np.sum(d * d, axis=-1)
    val = (b0 / (2.0 * math.pi * (1.0 - t))) * np.exp(
        -(b0 * (1.0 + t) / (4.0 * (1.0 - t))) * dd + 1j * (0.5 * b0) * _cross(x, y)
    )
    return complex(val) if np.ndim(val) == 0 else val


def qt_covariant_gradient(b0, t, x, y):
    """(-i grad_x - (B0/2) J x) q_t(x, y) as a complex 2-vector.

    Equals ((i B0 (1+t) / (2(1-t))) (x-y) - (B0/2) J (x-y)) * q_t(x, y).
    """
    if not 0.0 <= t < 1.0:
        raise DomainError(f"qt_covariant_gradient needs 0 <= t < 1, got t={t}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    q = qt_kernel(b0, t, x, y)
    vec = (1j * b0 * (1.0 + t) / (2.0 * (1.0 - t))) * d - (0.5 * b0) * jrot(d)
    return vec * np.asarray(q)[..., None]


# ---------------------------------------------------------------------------
# ladder algebra


def ladder_apply(spec, direction, v):
    """Apply the inter-level ladder a_+ (raise) or a_- (lower) to coefficients.

    Parameters
    ----------
    spec : LandauBasisSpec
    direction : {"raise", "lower"}
    v : array_like, shape (dim,)

    Returns
    -------
    (ndarray, bool)
        The image coefficients and a truncation flag: True when raising moved
        weight off the top level l_max (that component is dropped). Lowering
        from l = 0 is genuine annihilation, not truncation.

    With the fixed phases, a_+ e_{l,m} = sqrt(2l+2) e_{l+1,m} and
    a_- e_{l,m} = sqrt(2l) e_{l-1,m}.
    """
    v = np.asarray(v, dtype=complex)
    if v.shape != (spec.dim,):
        raise DomainError(f"coefficient vector must have shape ({spec.dim},)")
    blocks = v.reshape(spec.l_max + 1, spec.m_max)
    out = np.zeros_like(blocks)
    truncated = False
    if direction == "raise":
        for l in range(spec.l_max):
            out[l + 1] = math.sqrt(2 * l + 2) * blocks[l]
        truncated = bool(np.any(blocks[spec.l_max] != 0))
    elif direction == "lower":
        for l in range(1, spec.l_max + 1):
            out[l - 1] = math.sqrt(2 * l) * blocks[l]
    else:
        raise DomainError(f"direction must be 'raise' or 'lower', got {direction!r}")
    return out.ravel(), truncated


# ---------------------------------------------------------------------------
# the resolvent-like diagonal family M_{I, zeta}


@dataclass(frozen=True)
class CofiniteLevelSet:
    """Cofinite set of Landau levels I = N \\ excluded."""

    excluded: frozenset = frozenset()

    def __post_init__(self):
        excl = frozenset(int(l) for l in self.excluded)
        if any(l < 0 for l in excl):
            raise DomainError("excluded levels must be natural numbers")
        object.__setattr__(self, "excluded", excl)

    def contains(self, l):
        return l >= 0 and l not in self.excluded


ALL_LEVELS = CofiniteLevelSet()


def m_resolvent_diag(spec, levels, zeta, gap_tol=None):
    """Diagonal of M_{I,zeta} = sum_{l in I} P_l / (B0(2l+1) - zeta) in the frame.

    Returns the diagonal as a complex vector of length spec.dim (entries are
    constant on level blocks; excluded levels get 0). ``gap_tol`` defaults to
    ``ZETA_GAP_TOL * B0``; a frame level of I closer than that to zeta raises
    ``SingularityError`` naming the level.
    """
    if gap_tol is None:
        gap_tol = ZETA_GAP_TOL * spec.b0
    zeta = complex(zeta)
    diag = np.zeros(spec.dim, dtype=complex)
    for l in range(spec.l_max + 1):
        if not levels.contains(l):
            continue
        den = spec.b0 * (2 * l + 1) - zeta
        if abs(den) <= gap_tol:
            raise SingularityError(
                f"zeta={zeta} within gap tolerance {gap_tol:g} of level l={l} "
                f"(eigenvalue {spec.b0 * (2 * l + 1)})",
                level=l,
            )
        diag[spec.level_block(l)] = 1.0 / den
    return diag


@dataclass(frozen=True)
class QuadSpec1D:
    """Adaptive 1D quadrature request (absolute/relative target, max splits)."""

    epsabs: float = 1e-10
    epsrel: float = 1e-10
    limit: int = 200


def m_kernel_via_integral(b0, levels, zeta, x, y, quadspec=None):
    """Kernel of M_{I,zeta} at (x, y), x != y, by the 1D integral representation.

    B0 M_{I,zeta} = int_0^1 t^(-zeta/B0) (Q_{t^2} - sum_{l<=l0} t^{2l} P_l) dt
                    + sum_{l in I, l <= l0} P_l / (2l + 1 - zeta/B0),

    with l0 at least max(excluded) and Re((zeta+B0)/(2B0)) (two extra safety
    levels are added, keeping the integrand ~ t^3 or flatter at 0).

    Raises ``SingularityError`` at x == y (logarithmic diagonal singularity)
    and ``AccuracyError`` when the adaptive quadrature cannot reach the
    requested tolerance; the achieved estimate is attached.
    """
    if quadspec is None:
        quadspec = QuadSpec1D()
    zeta = complex(zeta)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.all(x == y):
        raise SingularityError("m_kernel_via_integral requires x != y (diagonal diverges)")

    l0 = math.ceil(max((zeta.real / b0 + 1.0) / 2.0, 0.0))
    if levels.excluded:
        l0 = max(l0, max(levels.excluded))
    l0 += 2

    p_vals = np.array([pl_kernel(b0, l, x, y) for l in range(l0 + 1)])
    ells = np.arange(l0 + 1)
    expo = -zeta / b0

    def integrand(t):
        if t <= 0.0:
            return 0.0j
        q = qt_kernel(b0, t * t, x, y) if t < 1.0 else 0.0j
        if t == 1.0:
            q = 0.0j
        return np.exp(expo * math.log(t)) * (q - np.dot(p_vals, t ** (2 * ells)))

    results = []
    achieved = 0.0
    for part in (np.real, np.imag):
        res = _quad(
            lambda t: part(integrand(t)),
            0.0,
            1.0,
            epsabs=quadspec.epsabs,
            epsrel=quadspec.epsrel,
            limit=quadspec.limit,
            full_output=1,
        )
        val, err = res[0], res[1]
        achieved = max(achieved, err)
        if len(res) > 3 or err > 10.0 * max(quadspec.epsabs, quadspec.epsrel * abs(val)):
            raise AccuracyError(
                f"kernel quadrature did not converge (error estimate {err:.3e})",
                achieved=err,
            )
        results.append(val)
    integral = results[0] + 1j * results[1]

    explicit = 0.0j
    for l in range(l0 + 1):
        if levels.contains(l):
            explicit += p_vals[l] / (2 * l + 1 - zeta / b0)
    return (integral + explicit) / b0
