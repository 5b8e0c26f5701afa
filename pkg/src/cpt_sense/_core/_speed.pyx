# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the scalar kernels in ``_pure``.

Same signatures, same semantics, same error behavior.  Any change here must
be mirrored there (and vice versa); ``tests/test_backends.py`` enforces
agreement.
"""

from libc.math cimport exp as c_exp, log as c_log, pow as c_pow

from cpt_sense.errors import InvalidScenarioError, SingularPointError

EXP_CLAMP = 700.0

cdef double _EXP_CLAMP = 700.0


cdef inline double _logistic(double delta) nogil:
    if delta > _EXP_CLAMP:
        delta = _EXP_CLAMP
    elif delta < -_EXP_CLAMP:
        delta = -_EXP_CLAMP
    return 1.0 / (1.0 + c_exp(delta))


cdef inline double _prelec(double p, double alpha) nogil:
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    return c_exp(-c_pow(-c_log(p), alpha))


cdef inline double _value(double u, double reference, double beta, double lam) nogil:
    cdef double d
    if u >= reference:
        d = u - reference
        return 0.0 if d == 0.0 else c_pow(d, beta)
    return -lam * c_pow(reference - u, beta)


def prelec_weight(double p, double alpha):
    """Distorted probability exp(-(-ln p)^alpha), endpoints fixed by definition."""
    return _prelec(p, alpha)


def cpt_value(double u, double reference, double beta, double lam):
    """Reference-dependent subjective value, zero exactly at the reference."""
    return _value(u, reference, beta, lam)


def rank_weights(double p_worst, double alpha, bint low_is_loss, bint high_is_gain):
    """Rank-dependent decision weights (w_low, w_high) for a two-point prospect."""
    cdef double w_low, w_high
    if low_is_loss:
        w_low = _prelec(p_worst, alpha)
    else:
        w_low = 1.0 - _prelec(1.0 - p_worst, alpha)
    if high_is_gain:
        w_high = _prelec(1.0 - p_worst, alpha)
    else:
        w_high = 1.0 - _prelec(p_worst, alpha)
    return w_low, w_high


def acceptance_from_utilities(double u_low, double u_high, double u_alt,
                              double reference, double alpha, double beta,
                              double lam, double p_worst):
    """Acceptance probability via the full weight/value/logistic chain."""
    cdef double w_low, w_high, u_s, a_s
    if u_low < reference:
        w_low = _prelec(p_worst, alpha)
    else:
        w_low = 1.0 - _prelec(1.0 - p_worst, alpha)
    if u_high >= reference:
        w_high = _prelec(1.0 - p_worst, alpha)
    else:
        w_high = 1.0 - _prelec(p_worst, alpha)
    u_s = w_low * _value(u_low, reference, beta, lam) \
        + w_high * _value(u_high, reference, beta, lam)
    a_s = _value(u_alt, reference, beta, lam)
    return _logistic(a_s - u_s)


def bestcase_revenue(double gamma, double u0, double x_low, double x_high,
                     double b, double alpha, double beta, double lam,
                     double p_worst):
    """Closed-form expected revenue under the best-case reference."""
    cdef double big_g = x_high + b * gamma - u0
    if big_g < 0.0:
        raise InvalidScenarioError(
            "alternative utility exceeds the best ride outcome at gamma=%r" % gamma)
    cdef double big_d = x_high - x_low
    cdef double w = _prelec(p_worst, alpha)
    cdef double z = lam * (w * c_pow(big_d, beta) - c_pow(big_g, beta))
    return gamma * _logistic(z)


def bestcase_revenue_gradient(double gamma, double u0, double x_low,
                              double x_high, double b, double alpha,
                              double beta, double lam, double p_worst):
    """d/dgamma of bestcase_revenue, closed form."""
    cdef double big_g = x_high + b * gamma - u0
    if big_g < 0.0:
        raise InvalidScenarioError(
            "alternative utility exceeds the best ride outcome at gamma=%r" % gamma)
    if big_g == 0.0 and beta < 1.0:
        raise SingularPointError(
            "(x_high + b*gamma - u0)**(beta-1) is singular at a zero base")
    cdef double big_d = x_high - x_low
    cdef double w = _prelec(p_worst, alpha)
    cdef double z = lam * (w * c_pow(big_d, beta) - c_pow(big_g, beta))
    cdef double sig = _logistic(z)
    cdef double s1 = -sig * (1.0 - sig)
    cdef double z_g = -lam * beta * b * c_pow(big_g, beta - 1.0)
    return sig + gamma * s1 * z_g


def bestcase_partials(double gamma, double u0, double x_low, double x_high,
                      double b, double alpha, double beta, double lam,
                      double p_worst):
    """First and second partials of the best-case revenue; see the pure twin."""
    cdef double big_g = x_high + b * gamma - u0
    if big_g < 0.0:
        raise InvalidScenarioError(
            "alternative utility exceeds the best ride outcome at gamma=%r" % gamma)
    if big_g == 0.0:
        raise SingularPointError(
            "log(x_high + b*gamma - u0) is singular at a zero base")
    cdef double big_d = x_high - x_low

    cdef double r = -c_log(p_worst)
    cdef double q = c_pow(r, alpha)
    cdef double ln_r = c_log(r)
    cdef double w = c_exp(-q)

    cdef double d_be = c_pow(big_d, beta)
    cdef double g_be = c_pow(big_g, beta)
    cdef double ln_d = c_log(big_d) if big_d > 0.0 else 0.0
    cdef double ln_g = c_log(big_g)

    cdef double z = lam * (w * d_be - g_be)
    cdef double sig = _logistic(z)
    cdef double s1 = -sig * (1.0 - sig)
    cdef double s2 = s1 * (2.0 * sig - 1.0)

    cdef double g_bem1 = c_pow(big_g, beta - 1.0)
    cdef double z_g = -lam * beta * b * g_bem1
    cdef double z_gg = -lam * beta * (beta - 1.0) * b * b * c_pow(big_g, beta - 2.0)

    cdef double w_a = -w * q * ln_r
    cdef double w_aa = w * q * ln_r * ln_r * (q - 1.0)
    cdef double w_p = w * alpha * c_pow(r, alpha - 1.0) / p_worst
    cdef double w_pp = (alpha * w / (p_worst * p_worst)) * (
        alpha * c_pow(r, 2.0 * alpha - 2.0)
        - (alpha - 1.0) * c_pow(r, alpha - 2.0)
        - c_pow(r, alpha - 1.0))

    cdef double z_a = lam * d_be * w_a
    cdef double z_aa = lam * d_be * w_aa
    cdef double z_b = lam * (w * d_be * ln_d - g_be * ln_g)
    cdef double z_bb = lam * (w * d_be * ln_d * ln_d - g_be * ln_g * ln_g)
    cdef double z_l = w * d_be - g_be
    cdef double z_p = lam * d_be * w_p
    cdef double z_pp = lam * d_be * w_pp
    cdef double z_gb = -lam * b * g_bem1 * (1.0 + beta * ln_g)
    cdef double z_gl = -beta * b * g_bem1

    cdef double f = gamma * sig
    cdef double f_g = sig + gamma * s1 * z_g
    cdef double f_gg = 2.0 * s1 * z_g + gamma * (s2 * z_g * z_g + s1 * z_gg)

    cdef double f_a = gamma * s1 * z_a
    cdef double f_ga = s1 * z_a + gamma * s2 * z_g * z_a
    cdef double f_aa = gamma * (s2 * z_a * z_a + s1 * z_aa)

    cdef double f_b = gamma * s1 * z_b
    cdef double f_gb = s1 * z_b + gamma * (s2 * z_g * z_b + s1 * z_gb)
    cdef double f_bb = gamma * (s2 * z_b * z_b + s1 * z_bb)

    cdef double f_l = gamma * s1 * z_l
    cdef double f_gl = s1 * z_l + gamma * (s2 * z_g * z_l + s1 * z_gl)
    cdef double f_ll = gamma * s2 * z_l * z_l

    cdef double f_p = gamma * s1 * z_p
    cdef double f_gp = s1 * z_p + gamma * s2 * z_g * z_p
    cdef double f_pp = gamma * (s2 * z_p * z_p + s1 * z_pp)

    return (f, f_g, f_gg,
            f_a, f_ga, f_aa,
            f_b, f_gb, f_bb,
            f_l, f_gl, f_ll,
            f_p, f_gp, f_pp)
