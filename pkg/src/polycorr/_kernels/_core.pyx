# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=False
"""Compiled state-evaluation kernels.

Mirror of _pure.py: every floating-point statement matches the pure
implementation so both backends return bit-identical tuples (the
extension is compiled with -ffp-contract=off for that reason). Keep the
two files in sync when editing; tests/test_kernels.py enforces parity.
"""
from libc.math cimport acos, copysign, cos, fabs, isfinite, log, pow, sqrt

R = 8314.3
T_DATUM = 298.15
P_DATUM = 1.0e5

cdef double _R = 8314.3
cdef double _T_DATUM = 298.15
cdef double _P_DATUM = 1.0e5
cdef double _SQRT2 = sqrt(2.0)

DEF MAX_COMPONENTS = 16

BACKEND_NAME = "compiled"


cdef inline double _cbrt(double value):
    return copysign(pow(fabs(value), 1.0 / 3.0), value)


cdef double _solve_cubic_vapor(double c2, double c1, double c0):
    cdef double p, q, disc, s, t, rr, arg, z, f, fp
    cdef int it
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0
    disc = 0.25 * q * q + p * p * p / 27.0
    if disc > 0.0:
        s = sqrt(disc)
        t = _cbrt(-0.5 * q + s) + _cbrt(-0.5 * q - s)
    else:
        rr = 2.0 * sqrt(-p / 3.0)
        if rr > 0.0:
            arg = 3.0 * q / (p * rr)
            if arg > 1.0:
                arg = 1.0
            if arg < -1.0:
                arg = -1.0
            t = rr * cos(acos(arg) / 3.0)
        else:
            t = 0.0
    z = t - c2 / 3.0
    for it in range(2):
        f = ((z + c2) * z + c1) * z + c0
        fp = (3.0 * z + 2.0 * c2) * z + c1
        if fp != 0.0:
            z = z - f / fp
    return z


def eval_state_real(double P, double T, double[::1] x, double[::1] mw,
                    double[::1] tc, double[::1] pc, double[::1] omega,
                    double[::1] kij, double[::1] cpc):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef double ai[MAX_COMPONENTS]
    cdef double dai[MAX_COMPONENTS]
    cdef double d2ai[MAX_COMPONENTS]
    cdef double mw_mix, om, kap, ac, sq, g, dg, d2g, b
    cdef double a, da, d2a, w, s, u, ds, d2s
    cdef double big_a, big_b, c2, c1, c0, z, vm, sep
    cdef double dPdT_v, dPdV_t, dVdT_p, dVdP_t, dz_dT, dz_dP, x_fun, y_fun
    cdef double cp_ig, h_ig, s_ig, a0, a1, a2, a3
    cdef double lam, cv_dep, cp_m, h_m, s_m, cv_m, k_fun

    if n > MAX_COMPONENTS:
        raise ValueError("too many components for the compiled kernel")

    mw_mix = 0.0
    for i in range(n):
        mw_mix += x[i] * mw[i]

    b = 0.0
    for i in range(n):
        om = omega[i]
        kap = 0.37464 + 1.54226 * om - 0.26992 * om * om
        ac = 0.45724 * _R * _R * tc[i] * tc[i] / pc[i]
        sq = sqrt(T / tc[i])
        g = 1.0 + kap * (1.0 - sq)
        dg = -kap / (2.0 * sqrt(T * tc[i]))
        d2g = kap / (4.0 * T * sqrt(T * tc[i]))
        ai[i] = ac * g * g
        dai[i] = 2.0 * ac * g * dg
        d2ai[i] = 2.0 * ac * (dg * dg + g * d2g)
        b += x[i] * 0.07780 * _R * tc[i] / pc[i]

    a = 0.0
    da = 0.0
    d2a = 0.0
    for i in range(n):
        for j in range(n):
            w = x[i] * x[j] * (1.0 - kij[i * n + j])
            s = sqrt(ai[i] * ai[j])
            if s > 0.0:
                u = dai[i] * ai[j] + ai[i] * dai[j]
                ds = u / (2.0 * s)
                d2s = (d2ai[i] * ai[j] + 2.0 * dai[i] * dai[j] + ai[i] * d2ai[j]) / (2.0 * s) \
                    - u * u / (4.0 * s * s * s)
                a += w * s
                da += w * ds
                d2a += w * d2s

    big_a = a * P / (_R * _R * T * T)
    big_b = b * P / (_R * T)
    c2 = big_b - 1.0
    c1 = big_a - 3.0 * big_b * big_b - 2.0 * big_b
    c0 = big_b * big_b + big_b * big_b * big_b - big_a * big_b
    z = _solve_cubic_vapor(c2, c1, c0)
    if not (z > big_b) or not isfinite(z):
        raise ValueError("no physical vapor root")

    vm = z * _R * T / P
    sep = vm * vm + 2.0 * b * vm - b * b
    dPdT_v = _R / (vm - b) - da / sep
    dPdV_t = -_R * T / ((vm - b) * (vm - b)) + a * (2.0 * vm + 2.0 * b) / (sep * sep)
    if dPdV_t >= 0.0:
        raise ValueError("mechanically unstable root")
    dVdT_p = -dPdT_v / dPdV_t
    dVdP_t = 1.0 / dPdV_t
    dz_dT = (z / vm) * dVdT_p - z / T
    dz_dP = z / P + (z / vm) * dVdP_t
    x_fun = (T / z) * dz_dT
    y_fun = 1.0 - (P / z) * dz_dP

    cp_ig = 0.0
    h_ig = 0.0
    s_ig = 0.0
    for i in range(n):
        a0 = cpc[i * 4]
        a1 = cpc[i * 4 + 1]
        a2 = cpc[i * 4 + 2]
        a3 = cpc[i * 4 + 3]
        cp_ig += x[i] * (a0 + a1 * T + a2 * T * T + a3 * T * T * T)
        h_ig += x[i] * (a0 * (T - _T_DATUM)
                        + a1 * (T * T - _T_DATUM * _T_DATUM) / 2.0
                        + a2 * (T * T * T - _T_DATUM * _T_DATUM * _T_DATUM) / 3.0
                        + a3 * (T * T * T * T - _T_DATUM * _T_DATUM * _T_DATUM * _T_DATUM) / 4.0)
        s_ig += x[i] * (a0 * log(T / _T_DATUM)
                        + a1 * (T - _T_DATUM)
                        + a2 * (T * T - _T_DATUM * _T_DATUM) / 2.0
                        + a3 * (T * T * T - _T_DATUM * _T_DATUM * _T_DATUM) / 3.0)

    lam = log((vm + (1.0 + _SQRT2) * b) / (vm + (1.0 - _SQRT2) * b))
    cv_dep = T * d2a * lam / (2.0 * _SQRT2 * b)
    cp_m = cp_ig + cv_dep + T * dPdT_v * dVdT_p - _R
    h_m = h_ig + _R * T * (z - 1.0) + (T * da - a) * lam / (2.0 * _SQRT2 * b)
    s_m = s_ig - _R * log(P / _P_DATUM) + _R * log(z - big_b) \
        + da * lam / (2.0 * _SQRT2 * b)

    cv_m = cp_m - T * dPdT_v * dVdT_p
    if cv_m <= 0.0 or cp_m <= 0.0:
        raise ValueError("non-positive heat capacity")
    k_fun = cp_m / cv_m

    return (z, cp_m / mw_mix, h_m / mw_mix, s_m / mw_mix, vm / mw_mix,
            dz_dT, dz_dP, dPdT_v, dVdT_p / mw_mix, x_fun, y_fun, k_fun, mw_mix)


def eval_state_ideal(double P, double T, double[::1] x, double[::1] mw,
                     double[::1] cpc):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i
    cdef double mw_mix, cp_ig, h_ig, s_ig, a0, a1, a2, a3, cv_m, vm, s_m

    mw_mix = 0.0
    for i in range(n):
        mw_mix += x[i] * mw[i]

    cp_ig = 0.0
    h_ig = 0.0
    s_ig = 0.0
    for i in range(n):
        a0 = cpc[i * 4]
        a1 = cpc[i * 4 + 1]
        a2 = cpc[i * 4 + 2]
        a3 = cpc[i * 4 + 3]
        cp_ig += x[i] * (a0 + a1 * T + a2 * T * T + a3 * T * T * T)
        h_ig += x[i] * (a0 * (T - _T_DATUM)
                        + a1 * (T * T - _T_DATUM * _T_DATUM) / 2.0
                        + a2 * (T * T * T - _T_DATUM * _T_DATUM * _T_DATUM) / 3.0
                        + a3 * (T * T * T * T - _T_DATUM * _T_DATUM * _T_DATUM * _T_DATUM) / 4.0)
        s_ig += x[i] * (a0 * log(T / _T_DATUM)
                        + a1 * (T - _T_DATUM)
                        + a2 * (T * T - _T_DATUM * _T_DATUM) / 2.0
                        + a3 * (T * T * T - _T_DATUM * _T_DATUM * _T_DATUM) / 3.0)

    cv_m = cp_ig - _R
    if cv_m <= 0.0:
        raise ValueError("non-positive heat capacity")
    vm = _R * T / P
    s_m = s_ig - _R * log(P / _P_DATUM)

    return (1.0, cp_ig / mw_mix, h_ig / mw_mix, s_m / mw_mix, vm / mw_mix,
            0.0, 0.0, P / T, vm / (T * mw_mix), 0.0, 1.0, cp_ig / cv_m, mw_mix)
