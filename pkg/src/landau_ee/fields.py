"""Tame perturbation families B_eps / V_eps, the Coulomb gauge A_eps, and the
pseudo potential W_eps = |A_eps|^2 + V_eps.

All families are radial profiles, optionally shifted (only the gaussian bump
carries a center): ``zero``, ``gaussian_bump`` (amplitude * exp(-r^2/sigma^2))
and ``power_law`` (amplitude * (1+r^2)^(-q/2), smooth at the origin so global
regularity holds). The magnetic field family must decay like
(1+|x|)^(-(1+eps)), the potential family like (1+|x|)^(-eps).

The gauge is the convolution A(x) = int B(x-y) Jy/(2pi |y|^2) dy. For a
radial profile this collapses to the enclosed-flux closed form
A(x) = Phi(r) Jx / (2 pi r^2) with Phi the flux through the disk of radius r
(shifted along with the profile center); the generic polar quadrature path is
kept as an independent cross-check. In polar coordinates around the
singularity the integrand is bounded: dy = rho drho dphi cancels the 1/rho.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError
from .landau import jrot

_KINDS = ("zero", "gaussian_bump", "power_law")


@dataclass(frozen=True)
class TamenessParams:
    """Differentiability order gamma and decay exponent eps in (0,1).

    n0 is the smallest integer with n0 > 1/(2 eps); the decay theory breaks
    at eps >= 1, so that range is rejected outright.
    """

    gamma: int = 2
    eps: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise DomainError(
                f"decay exponent eps must lie in (0,1), got {self.eps} "
                "(the estimates degenerate at eps >= 1)"
            )
        if self.gamma < 0:
            raise DomainError(f"gamma must be a natural number, got {self.gamma}")

    @property
    def n0(self):
        return int(math.floor(1.0 / (2.0 * self.eps))) + 1


def _profile(kind, amplitude, width, exponent, r):
    """Radial profile value at distance r from the family center."""
    r = np.asarray(r, dtype=float)
    if kind == "zero":
        return np.zeros_like(r)
    if kind == "gaussian_bump":
        return amplitude * np.exp(-((r / width) ** 2))
    # power_law
    return amplitude * (1.0 + r * r) ** (-0.5 * exponent)


def _flux(kind, amplitude, width, exponent, r):
    """Enclosed flux Phi(r) = 2 pi int_0^r profile(s) s ds."""
    r = np.asarray(r, dtype=float)
    if kind == "zero":
        return np.zeros_like(r)
    if kind == "gaussian_bump":
        return amplitude * math.pi * width**2 * (-np.expm1(-((r / width) ** 2)))
    if exponent == 2.0:
        return amplitude * math.pi * np.log1p(r * r)
    return (
        2.0
        * math.pi
        * amplitude
        * ((1.0 + r * r) ** (1.0 - 0.5 * exponent) - 1.0)
        / (2.0 - exponent)
    )


class _RadialFamily:
    """Shared behaviour of field and potential families (radial profiles)."""

    def _dist(self, x):
        x = np.asarray(x, dtype=float)
        d = x - np.asarray(self.center, dtype=float)
        return x, np.hypot(d[..., 0], d[..., 1])

    def value(self, x):
        _, r = self._dist(x)
        out = _profile(self.kind, self.amplitude, self.width, self.exponent, r)
        return float(out) if out.ndim == 0 else out

    def decay_constant(self):
        """A true bound C with |value(x)| <= C (1+|x|)^(-decay_power).

        sup_x |f(x)| (1+|x|)^p <= sup_d profile(d) (1+|c|+d)^p since
        |x| <= |c| + d on the sphere at distance d from the center; the 1D
        sup is taken over a dense log grid plus the analytic tail limit.
        """
        if self.kind == "zero":
            return 0.0
        p = self.decay_power
        shift = float(np.hypot(*self.center))
        d = np.concatenate([[0.0], np.logspace(-3, 6, 4000)])
        prof = np.abs(_profile(self.kind, self.amplitude, self.width, self.exponent, d))
        return float(np.max(prof * (1.0 + shift + d) ** p)) * (1.0 + 1e-9)


@dataclass(frozen=True)
class FieldFamily(_RadialFamily):
    """Perturbing magnetic field B_eps; must decay like (1+|x|)^-(1+eps)."""

    kind: str
    tameness: TamenessParams
    amplitude: float = 0.0
    width: float = 1.0
    center: tuple = (0.0, 0.0)
    exponent: float = 0.0

    def __post_init__(self):
        _validate_family(self, min_exponent=1.0 + self.tameness.eps, what="field")

    @property
    def decay_power(self):
        return 1.0 + self.tameness.eps


@dataclass(frozen=True)
class PotentialFamily(_RadialFamily):
    """Perturbing electric potential V_eps; must decay like (1+|x|)^-eps."""

    kind: str
    tameness: TamenessParams
    amplitude: float = 0.0
    width: float = 1.0
    center: tuple = (0.0, 0.0)
    exponent: float = 0.0

    def __post_init__(self):
        _validate_family(self, min_exponent=self.tameness.eps, what="potential")

    @property
    def decay_power(self):
        return self.tameness.eps


def _validate_family(f, min_exponent, what):
    if f.kind not in _KINDS:
        raise DomainError(f"unknown {what} kind {f.kind!r}; expected one of {_KINDS}")
    if f.kind == "gaussian_bump" and not f.width > 0:
        raise DomainError(f"gaussian width must be positive, got {f.width}")
    if f.kind == "power_law":
        if tuple(f.center) != (0.0, 0.0):
            raise DomainError("power_law families are centered at the origin")
        if f.exponent < min_exponent:
            raise DomainError(
                f"power_law {what} exponent {f.exponent} below the tame decay "
                f"requirement {min_exponent} (eps={f.tameness.eps})"
            )


def zero_field(tameness=None):
    return FieldFamily("zero", tameness or TamenessParams())


def gaussian_bump(amplitude, width, center=(0.0, 0.0), tameness=None):
    return FieldFamily(
        "gaussian_bump", tameness or TamenessParams(), amplitude, width, tuple(center)
    )


def power_law_field(amplitude, exponent, tameness=None):
    return FieldFamily(
        "power_law", tameness or TamenessParams(), amplitude, exponent=exponent
    )


def zero_potential(tameness=None):
    return PotentialFamily("zero", tameness or TamenessParams())


def gaussian_potential(amplitude, width, center=(0.0, 0.0), tameness=None):
    return PotentialFamily(
        "gaussian_bump", tameness or TamenessParams(), amplitude, width, tuple(center)
    )


def power_law_potential(amplitude, exponent, tameness=None):
    return PotentialFamily(
        "power_law", tameness or TamenessParams(), amplitude, exponent=exponent
    )


# ---------------------------------------------------------------------------
# evaluation


def field_eval(f, x):
    """Pointwise family value B_eps(x) (or V_eps(x)); broadcasts over (..., 2)."""
    return f.value(x)


def decay_audit(f, radii=(1.0, 10.0, 100.0), n_angles=20):
    """max over the audit circles of |f(x)| (1+|x|)^decay_power.

    Returns (observed_sup, reported_constant); the family constant is a true
    bound, so observed <= reported always holds.
    """
    phis = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
    ring = np.stack([np.cos(phis), np.sin(phis)], axis=-1)
    worst = 0.0
    for r in radii:
        vals = np.abs(f.value(r * ring)) * (1.0 + r) ** f.decay_power
        worst = max(worst, float(np.max(vals)))
    return worst, f.decay_constant()


# ---------------------------------------------------------------------------
# the Coulomb gauge


def gauge_flux(f, r):
    """Enclosed flux Phi(r) of the field profile about its own center."""
    return _flux(f.kind, f.amplitude, f.width, f.exponent, r)


def _gauge_closed(f, x):
    x = np.asarray(x, dtype=float)
    d = x - np.asarray(f.center, dtype=float)
    r2 = np.sum(d * d, axis=-1)
    r = np.sqrt(r2)
    phi = _flux(f.kind, f.amplitude, f.width, f.exponent, r)
    with np.errstate(invalid="ignore", divide="ignore"):
        coef = np.where(r2 > 0.0, phi / (2.0 * math.pi * np.where(r2 > 0.0, r2, 1.0)), 0.0)
    return coef[..., None] * jrot(d)


@dataclass(frozen=True)
class ConvolutionQuad:
    """Polar quadrature request for the generic gauge path.

    Geometric radial panels ([0, first_panel], growing by ``growth``) out to
    ``r_max`` (auto when None: far enough that the analytic tail estimate
    drops below the tolerances), Gauss-Legendre with ``n_radial`` nodes per
    panel, ``n_angular`` uniform angles.
    """

    n_radial: int = 24
    n_angular: int = 128
    first_panel: float = 0.5
    growth: float = 1.8
    r_max: float = None
    abs_tol: float = 1e-9
    rel_tol: float = 1e-8


def _auto_r_max(f, x):
    dist = float(np.hypot(*(np.asarray(x, float) - np.asarray(f.center, float))))
    if f.kind == "gaussian_bump":
        return dist + 14.0 * f.width
    if f.kind == "power_law":
        # tail of the convolution ~ |b| |x| q rho^(-q) / q at radius rho
        q = f.exponent
        target = 1e-10 / max(abs(f.amplitude) * (1.0 + dist), 1e-300)
        return max(50.0, target ** (-1.0 / q))
    return 10.0


def gauge_convolve(f, x, quad=None, method="auto"):
    """Coulomb gauge A_eps at x.

    Parameters
    ----------
    f : FieldFamily
    x : array_like shape (..., 2)
    quad : ConvolutionQuad, optional
        Only consulted on the quadrature path.
    method : {"auto", "closed", "quadrature"}
        "auto"/"closed" use the enclosed-flux closed form (exact for the
        radial families here); "quadrature" integrates the convolution in
        polar coordinates around the kernel singularity and raises
        ``AccuracyError`` when the tail estimate exceeds the tolerance.

    Returns
    -------
    ndarray shape (..., 2)
    """
    if method in ("auto", "closed"):
        return _gauge_closed(f, x)
    if method != "quadrature":
        raise DomainError(f"unknown gauge method {method!r}")
    quad = quad or ConvolutionQuad()
    x = np.asarray(x, dtype=float)
    if x.shape == (2,):
        return _gauge_quadrature(f, x, quad)
    flat = x.reshape(-1, 2)
    return np.array([_gauge_quadrature(f, p, quad) for p in flat]).reshape(x.shape)


def _gauge_quadrature(f, x, quad):
    from scipy.special import roots_legendre

    if f.kind == "zero":
        return np.zeros(2)
    r_max = quad.r_max if quad.r_max is not None else _auto_r_max(f, x)
    nodes, weights = roots_legendre(quad.n_radial)
    phis = np.arange(quad.n_angular) * (2.0 * math.pi / quad.n_angular)
    u = np.stack([np.cos(phis), np.sin(phis)], axis=-1)  # (na, 2)
    ju = jrot(u)
    dphi = 2.0 * math.pi / quad.n_angular

    edges = [0.0, quad.first_panel]
    while edges[-1] < r_max:
        edges.append(min(edges[-1] * quad.growth + quad.first_panel, r_max))
    total = np.zeros(2)
    last = np.zeros(2)
    for a, b in zip(edges[:-1], edges[1:]):
        rho = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        w = 0.5 * (b - a) * weights
        pts = x[None, None, :] - rho[:, None, None] * u[None, :, :]  # (nr, na, 2)
        bvals = f.value(pts)
        last = (dphi / (2.0 * math.pi)) * np.einsum("r,ra,ak->k", w, bvals, ju)
        total += last
    tail = float(np.hypot(*last))
    if tail > max(quad.abs_tol, quad.rel_tol * float(np.hypot(*total))):
        raise AccuracyError(
            f"gauge quadrature tail estimate {tail:.3e} above tolerance; "
            "increase r_max or panel count",
            achieved=tail,
        )
    return total


def gauge_decay_constant(f):
    """True bound C with |A_eps(x)| <= C (1+|x|)^(-eps), by 1D envelope sup."""
    if f.kind == "zero":
        return 0.0
    shift = float(np.hypot(*f.center))
    d = np.logspace(-4, 7, 6000)
    amp = np.abs(_flux(f.kind, f.amplitude, f.width, f.exponent, d)) / (2.0 * math.pi * d)
    return float(np.max(amp * (1.0 + shift + d) ** f.tameness.eps)) * (1.0 + 1e-9)


def curl_div_check(f, x, h):
    """Central-difference curl/div consistency of the gauge at x.

    Returns (|curl A - B(x)|, |div A|) at step h, with the orientation
    curl g = d2 g1 - d1 g2 (the one under which curl of (B0/2)Jx is +B0).
    """
    if not h > 0:
        raise DomainError(f"step must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    e1 = np.array([h, 0.0])
    e2 = np.array([0.0, h])
    a = lambda p: gauge_convolve(f, p)
    d1 = (a(x + e1) - a(x - e1)) / (2.0 * h)
    d2 = (a(x + e2) - a(x - e2)) / (2.0 * h)
    curl = d2[0] - d1[1]
    div = d1[0] + d2[1]
    return abs(curl - f.value(x)), abs(div)


def pseudo_potential(f, v, x):
    """W_eps(x) = |A_eps(x)|^2 + V_eps(x)."""
    a = gauge_convolve(f, x)
    w = np.sum(a * a, axis=-1) + v.value(x)
    return float(w) if np.ndim(w) == 0 else w
