"""Scalar special functions.

Laguerre polynomials (with their generating function) and the Renyi entropy
function ``h_alpha`` together with its auxiliary transform ``g_alpha``. All
functions are pure and accept scalars or numpy arrays where it makes sense.
"""

import math

import numpy as np

from .errors import DomainError

#: Inputs within this distance outside [0, 1] are clamped onto the interval;
#: anything further out is a hard domain error. Eigenvalues of numerically
#: Hermitian matrices routinely land a few ulp outside.
CLIP_TOL = 1e-8


def laguerre_eval(l, t):
    """Laguerre polynomial L_l(t) by the stable three-term recurrence.

    Parameters
    ----------
    l : int
        Degree, l >= 0.
    t : float or ndarray
        Evaluation point(s), t >= 0.

    Returns
    -------
    float or ndarray
        L_l(t) = sum_k C(l,k) (-t)^k / k!, evaluated via
        (k+1) L_{k+1} = (2k+1-t) L_k - k L_{k-1}, which keeps full accuracy
        where the alternating sum loses every digit (l, t around 30).
    """
    if l < 0:
        raise DomainError(f"Laguerre degree must be >= 0, got {l}")
    t = np.asarray(t, dtype=float)
    prev = np.zeros_like(t)
    cur = np.ones_like(t)
    for k in range(l):
        prev, cur = cur, ((2 * k + 1 - t) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def laguerre_sum(l, t):
    """L_l(t) by the explicit alternating sum; low-degree reference only.

    Evaluated in exact rational arithmetic (floats are dyadic rationals) with
    a single rounding at the end, so it can serve as an oracle: the float
    alternating sum itself loses all digits near l, t around 30.
    """
    from fractions import Fraction

    def one(tv):
        tf = Fraction(tv)
        acc = Fraction(0)
        for k in range(l + 1):
            acc += Fraction((-1) ** k * math.comb(l, k), math.factorial(k)) * tf**k
        return float(acc)

    t = np.asarray(t, dtype=float)
    if t.ndim == 0:
        return one(float(t))
    return np.array([one(float(tv)) for tv in t.ravel()]).reshape(t.shape)


def laguerre_genfun(s, t):
    """Generating function sum_l t^l L_l(s) = exp(-ts/(1-t)) / (1-t).

    Requires |t| < 1; raises ``DomainError`` otherwise.
    """
    if not abs(t) < 1:
        raise DomainError(f"generating function needs |t| < 1, got t={t}")
    if np.any(np.asarray(s) < 0):
        raise DomainError("generating function argument s must be >= 0")
    s = np.asarray(s, dtype=float)
    out = np.exp(-t * s / (1.0 - t)) / (1.0 - t)
    return out if out.ndim else float(out)


def _clip_unit(x, what):
    x = np.asarray(x, dtype=float)
    if np.any(x < -CLIP_TOL) or np.any(x > 1.0 + CLIP_TOL):
        worst = float(np.max(np.abs(x - np.clip(x, 0.0, 1.0))))
        raise DomainError(
            f"{what} outside [0,1] by {worst:.3e}, beyond the clip tolerance {CLIP_TOL:g}"
        )
    return np.clip(x, 0.0, 1.0)


def renyi_h(alpha, x):
    """Renyi entropy function h_alpha on [0, 1].

    Parameters
    ----------
    alpha : float
        Renyi order, alpha > 0.
    x : float or ndarray
        Occupation(s) in [0, 1]; values within ``CLIP_TOL`` outside are
        clamped.

    Returns
    -------
    float or ndarray
        (1/(1-alpha)) ln(x^alpha + (1-x)^alpha) for alpha != 1 and the
        Shannon branch -x ln x - (1-x) ln(1-x) at alpha = 1, with
        h(0) = h(1) = 0. Evaluated through expm1/log1p so the limit
        alpha -> 1 and the endpoints are reached without cancellation.
    """
    if not alpha > 0:
        raise DomainError(f"Renyi order must be positive, got alpha={alpha}")
    x = _clip_unit(x, "renyi_h argument")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    inside = (x > 0.0) & (x < 1.0)
    xi = x[inside]
    if alpha == 1.0:
        out[inside] = -xi * np.log(xi) - (1.0 - xi) * np.log1p(-xi)
    else:
        # x^a + (1-x)^a = 1 + u with u built from expm1 terms that vanish
        # smoothly as alpha -> 1 or x -> {0, 1}.
        u = xi * np.expm1((alpha - 1.0) * np.log(xi)) + (1.0 - xi) * np.expm1(
            (alpha - 1.0) * np.log1p(-xi)
        )
        out[inside] = np.log1p(u) / (1.0 - alpha)
    return float(out[0]) if scalar else out


def g_of_t(alpha, t):
    """Auxiliary entropy transform g_alpha with g_alpha(4x(1-x)) = h_alpha(x).

    g_alpha(t) = h_alpha((1 - sqrt(1-t))/2); the inner argument is computed
    as t / (2 (1 + sqrt(1-t))) to stay accurate near t = 0.
    """
    t = _clip_unit(t, "g_of_t argument")
    x = t / (2.0 * (1.0 + np.sqrt(1.0 - t)))
    return renyi_h(alpha, x)
