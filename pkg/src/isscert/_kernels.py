"""Scalar numeric kernels shared by the stats, decline and mapping modules.

Everything here is plain ``math`` on floats so that the same source runs
compiled (numba) or interpreted (fallback).  Argument validation lives in the
public wrappers; kernels assume valid input.
"""

import math

from ._jit import jit

SQRT2 = 1.4142135623730951
SQRT_2PI = 2.5066282746310002
LN_SQRT_2PI = 0.91893853320467274178
EPS = 2.220446049250313e-16
FPMIN = 1e-300
CF_MAXIT = 20000
INV_MAXIT = 200

ABSOLUTE = 0
RELATIVE = 1


# ---------------------------------------------------------------------------
# standard normal
# ---------------------------------------------------------------------------

@jit
def ndtr(x):
    return 0.5 * math.erfc(-x / SQRT2)


@jit
def _ppnd16(p):
    # Wichura's AS241 (PPND16), accurate to about 1e-16 relative.
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                    + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
                  + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
                + 1.3314166789178437745e2) * r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                    + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
                  + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
                + 4.2313330701600911252e1) * r + 1.0)
        return q * num / den
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                    + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                  + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
                + 4.63033784615654529590e0) * r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                    + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                  + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                + 2.05319162663775882187e0) * r + 1.0)
    else:
        r -= 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                  + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
                + 5.46378491116411436990e0) * r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                    + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
                  + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
                + 5.99832206555887937690e-1) * r + 1.0)
    val = num / den
    if q < 0.0:
        val = -val
    return val


@jit
def _ndtri_lower(p):
    # p <= 0.5; the lower tail keeps full relative precision in ndtr.
    x = _ppnd16(p)
    if x > -37.0:
        e = ndtr(x) - p
        u = e * SQRT_2PI * math.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


@jit
def ndtri(p):
    if p <= 0.0:
        return -math.inf
    if p >= 1.0:
        return math.inf
    if p > 0.5:
        # 1 - p is exact for p in [0.5, 1]
        return -_ndtri_lower(1.0 - p)
    return _ndtri_lower(p)


# ---------------------------------------------------------------------------
# log beta
# ---------------------------------------------------------------------------

@jit
def lgamma_corr(x):
    """lgamma(x) - Stirling's formula, for x >= 10."""
    z = 1.0 / (x * x)
    s = (1.0 / 156.0)
    s = s * z - 691.0 / 360360.0
    s = s * z + 1.0 / 1188.0
    s = s * z - 1.0 / 1680.0
    s = s * z + 1.0 / 1260.0
    s = s * z - 1.0 / 360.0
    s = s * z + 1.0 / 12.0
    return s / x


@jit
def lbeta(a, b):
    p = min(a, b)
    q = max(a, b)
    if p >= 10.0:
        corr = lgamma_corr(p) + lgamma_corr(q) - lgamma_corr(p + q)
        return (-0.5 * math.log(q) + LN_SQRT_2PI + corr
                + (p - 0.5) * math.log(p / (p + q)) + q * math.log1p(-p / (p + q)))
    if q >= 10.0:
        corr = lgamma_corr(q) - lgamma_corr(p + q)
        return (math.lgamma(p) + corr + p - p * math.log(p + q)
                + (q - 0.5) * math.log1p(-p / (p + q)))
    return math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q)


# ---------------------------------------------------------------------------
# regularized incomplete beta and its inverse
# ---------------------------------------------------------------------------

@jit
def _betacf(a, b, x):
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAXIT + 1):
        m2 = 2.0 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            break
    return h


@jit
def _incbeta_front(a, b, x):
    # x^a (1-x)^b / (a B(a, b)), in logs
    return math.exp(a * math.log(x) + b * math.log1p(-x) - lbeta(a, b)) / a


@jit
def incbeta(a, b, x):
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    if x < (a + 1.0) / (a + b + 2.0):
        return _incbeta_front(a, b, x) * _betacf(a, b, x)
    y = 1.0 - x
    return 1.0 - _incbeta_front(b, a, y) * _betacf(b, a, y)


@jit
def _beta_logpdf(a, b, x):
    return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - lbeta(a, b)


@jit
def _incbeta_inv_guess(q, a, b):
    if a >= 1.0 and b >= 1.0:
        z = -ndtri(q)
        al = (z * z - 3.0) / 6.0
        h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0))
        w = (z * math.sqrt(al + h) / h
             - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h)))
        if 2.0 * w > 700.0:
            return a / b * math.exp(-2.0 * w)
        return a / (a + b * math.exp(2.0 * w))
    lna = math.log(a / (a + b))
    lnb = math.log(b / (a + b))
    t = math.exp(a * lna) / a
    u = math.exp(b * lnb) / b
    w = t + u
    if q < t / w:
        return math.pow(a * w * q, 1.0 / a)
    return 1.0 - math.pow(b * w * (1.0 - q), 1.0 / b)


@jit
def incbeta_inv(q, a, b):
    """x with I_x(a, b) = q, by bracketed Newton with bisection fallback."""
    if q <= 0.0:
        return 0.0
    if q >= 1.0:
        return 1.0
    if b == 1.0:
        return math.exp(math.log(q) / a)
    if a == 1.0:
        return -math.expm1(math.log1p(-q) / b)
    lo = 0.0
    hi = 1.0
    x = _incbeta_inv_guess(q, a, b)
    if not (x > 0.0 and x < 1.0):
        x = 0.5
    ftol = 1e-15 * min(q, 1.0 - q)
    for _ in range(INV_MAXIT):
        f = incbeta(a, b, x) - q
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        if abs(f) <= ftol:
            return x
        logpdf = _beta_logpdf(a, b, x)
        xn = -1.0
        if logpdf > -700.0:
            xn = x - f / math.exp(logpdf)
        if not (xn > lo and xn < hi):
            xn = 0.5 * (lo + hi)
        if xn == x or hi - lo <= 2.0 * EPS * hi:
            return xn
        x = xn
    return x


# ---------------------------------------------------------------------------
# Clopper-Pearson bounds and radii
# ---------------------------------------------------------------------------

@jit
def cp_lower(alpha, k_a, k):
    if k_a <= 0.0:
        return 0.0
    return incbeta_inv(alpha, k_a, k - k_a + 1.0)


@jit
def cp_upper(alpha, k_a, k):
    """Upper Clopper-Pearson endpoint at level ``1 - alpha``."""
    if k_a >= k:
        return 1.0
    return incbeta_inv(1.0 - alpha, k_a + 1.0, k - k_a)


@jit
def radius_hat(k, p, sigma, alpha):
    """sigma * Phi^-1(B(alpha; p k, k - p k + 1)); -inf when the bound is 0."""
    pl = cp_lower(alpha, p * k, k)
    if pl <= 0.0:
        return -math.inf
    return sigma * ndtri(pl)


@jit
def decline(kind, r_bar, r_k):
    # +inf when r_k is undefined so that any budget test fails
    if r_k == -math.inf:
        return math.inf
    if kind == ABSOLUTE:
        return r_bar - r_k
    return 1.0 - r_k / r_bar


@jit
def _within(kind, bound, k, k_bar, p, sigma, alpha, r_bar):
    if k == k_bar:
        return True
    return decline(kind, r_bar, radius_hat(float(k), p, sigma, alpha)) <= bound


@jit
def psi(p, kind, bound, k_bar, sigma, alpha):
    """Smallest k in [1, k_bar] whose decline at ratio p stays within ``bound``.

    Returns 0 when the budgeted radius floor is nonpositive or undefined.
    """
    if kind == RELATIVE:
        sigma = 1.0
    r_bar = radius_hat(float(k_bar), p, sigma, alpha)
    if r_bar == -math.inf:
        return 0
    if kind == ABSOLUTE:
        floor = r_bar - bound
    else:
        floor = (1.0 - bound) * r_bar
    if floor <= 0.0:
        return 0
    if _within(kind, bound, 1, k_bar, p, sigma, alpha, r_bar):
        return 1
    lo = 1
    hi = k_bar
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _within(kind, bound, mid, k_bar, p, sigma, alpha, r_bar):
            hi = mid
        else:
            lo = mid
    # guard against rounding-level non-monotonicity just below the boundary
    for j in range(max(2, hi - 3), hi - 1):
        if (_within(kind, bound, j, k_bar, p, sigma, alpha, r_bar)
                and not _within(kind, bound, j - 1, k_bar, p, sigma, alpha, r_bar)):
            return j
    return hi


@jit
def build_sizes(n_steps, kind, bound, k_bar, sigma, alpha, out):
    for n in range(n_steps + 1):
        out[n] = psi(n / n_steps, kind, bound, k_bar, sigma, alpha)
    return out
