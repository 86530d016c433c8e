"""Pure-Python state-evaluation kernels.

These are the fallback for the compiled extension (_core.pyx). Both
implementations execute the same floating-point operations in the same
order, so for any input they produce bit-identical results; keep every
arithmetic statement in sync with _core.pyx when editing.

A state evaluation returns the 13-tuple
    (z, cp, h, s, v, dz_dT, dz_dP, dP_dT, dv_dT, X, Y, k, mw)
with specific (per-kg) caloric quantities, SI units throughout, and the
h/s datum at 298.15 K, 1 bar (ideal gas, per composition).

Peng-Robinson with van der Waals one-fluid mixing; vapor root (largest
real root of the cubic). Derivatives and departure functions are closed
form, not finite differences.
"""
import math

R = 8314.3          # gas constant, J/(kmol K)
T_DATUM = 298.15    # enthalpy/entropy datum temperature, K
P_DATUM = 1.0e5     # entropy datum pressure, Pa
SQRT2 = math.sqrt(2.0)

BACKEND_NAME = "python"


def _cbrt(value):
    return math.copysign(abs(value) ** (1.0 / 3.0), value)


def _solve_cubic_vapor(c2, c1, c0):
    """Largest real root of z^3 + c2 z^2 + c1 z + c0, Newton-polished."""
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0
    disc = 0.25 * q * q + p * p * p / 27.0
    if disc > 0.0:
        s = math.sqrt(disc)
        t = _cbrt(-0.5 * q + s) + _cbrt(-0.5 * q - s)
    else:
        rr = 2.0 * math.sqrt(-p / 3.0)
        if rr > 0.0:
            arg = 3.0 * q / (p * rr)
            if arg > 1.0:
                arg = 1.0
            if arg < -1.0:
                arg = -1.0
            t = rr * math.cos(math.acos(arg) / 3.0)
        else:
            t = 0.0
    z = t - c2 / 3.0
    for _ in range(2):
        f = ((z + c2) * z + c1) * z + c0
        fp = (3.0 * z + 2.0 * c2) * z + c1
        if fp != 0.0:
            z = z - f / fp
    return z


def eval_state_real(P, T, x, mw, tc, pc, omega, kij, cpc):
    # plain Python floats throughout: same IEEE doubles as the compiled
    # kernel, faster than numpy scalar arithmetic, and clean repr()
    x = [float(v) for v in x]
    mw = [float(v) for v in mw]
    tc = [float(v) for v in tc]
    pc = [float(v) for v in pc]
    omega = [float(v) for v in omega]
    kij = [float(v) for v in kij]
    cpc = [float(v) for v in cpc]
    P = float(P)
    T = float(T)
    n = len(x)
    mw_mix = 0.0
    for i in range(n):
        mw_mix += x[i] * mw[i]

    ai = [0.0] * n
    dai = [0.0] * n
    d2ai = [0.0] * n
    b = 0.0
    for i in range(n):
        om = omega[i]
        kap = 0.37464 + 1.54226 * om - 0.26992 * om * om
        ac = 0.45724 * R * R * tc[i] * tc[i] / pc[i]
        sq = math.sqrt(T / tc[i])
        g = 1.0 + kap * (1.0 - sq)
        dg = -kap / (2.0 * math.sqrt(T * tc[i]))
        d2g = kap / (4.0 * T * math.sqrt(T * tc[i]))
        ai[i] = ac * g * g
        dai[i] = 2.0 * ac * g * dg
        d2ai[i] = 2.0 * ac * (dg * dg + g * d2g)
        b += x[i] * 0.07780 * R * tc[i] / pc[i]

    a = 0.0
    da = 0.0
    d2a = 0.0
    for i in range(n):
        for j in range(n):
            w = x[i] * x[j] * (1.0 - kij[i * n + j])
            s = math.sqrt(ai[i] * ai[j])
            if s > 0.0:
                u = dai[i] * ai[j] + ai[i] * dai[j]
                ds = u / (2.0 * s)
                d2s = (d2ai[i] * ai[j] + 2.0 * dai[i] * dai[j] + ai[i] * d2ai[j]) / (2.0 * s) \
                    - u * u / (4.0 * s * s * s)
                a += w * s
                da += w * ds
                d2a += w * d2s

    big_a = a * P / (R * R * T * T)
    big_b = b * P / (R * T)
    c2 = big_b - 1.0
    c1 = big_a - 3.0 * big_b * big_b - 2.0 * big_b
    c0 = big_b * big_b + big_b * big_b * big_b - big_a * big_b
    z = _solve_cubic_vapor(c2, c1, c0)
    if not (z > big_b) or not math.isfinite(z):
        raise ValueError("no physical vapor root")

    vm = z * R * T / P
    sep = vm * vm + 2.0 * b * vm - b * b
    dPdT_v = R / (vm - b) - da / sep
    dPdV_t = -R * T / ((vm - b) * (vm - b)) + a * (2.0 * vm + 2.0 * b) / (sep * sep)
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
        h_ig += x[i] * (a0 * (T - T_DATUM)
                        + a1 * (T * T - T_DATUM * T_DATUM) / 2.0
                        + a2 * (T * T * T - T_DATUM * T_DATUM * T_DATUM) / 3.0
                        + a3 * (T * T * T * T - T_DATUM * T_DATUM * T_DATUM * T_DATUM) / 4.0)
        s_ig += x[i] * (a0 * math.log(T / T_DATUM)
                        + a1 * (T - T_DATUM)
                        + a2 * (T * T - T_DATUM * T_DATUM) / 2.0
                        + a3 * (T * T * T - T_DATUM * T_DATUM * T_DATUM) / 3.0)

    lam = math.log((vm + (1.0 + SQRT2) * b) / (vm + (1.0 - SQRT2) * b))
    cv_dep = T * d2a * lam / (2.0 * SQRT2 * b)
    cp_m = cp_ig + cv_dep + T * dPdT_v * dVdT_p - R
    h_m = h_ig + R * T * (z - 1.0) + (T * da - a) * lam / (2.0 * SQRT2 * b)
    s_m = s_ig - R * math.log(P / P_DATUM) + R * math.log(z - big_b) \
        + da * lam / (2.0 * SQRT2 * b)

    cv_m = cp_m - T * dPdT_v * dVdT_p
    if cv_m <= 0.0 or cp_m <= 0.0:
        raise ValueError("non-positive heat capacity")
    k_fun = cp_m / cv_m

    return (z, cp_m / mw_mix, h_m / mw_mix, s_m / mw_mix, vm / mw_mix,
            dz_dT, dz_dP, dPdT_v, dVdT_p / mw_mix, x_fun, y_fun, k_fun, mw_mix)


def eval_state_ideal(P, T, x, mw, cpc):
    x = [float(v) for v in x]
    mw = [float(v) for v in mw]
    cpc = [float(v) for v in cpc]
    P = float(P)
    T = float(T)
    n = len(x)
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
        h_ig += x[i] * (a0 * (T - T_DATUM)
                        + a1 * (T * T - T_DATUM * T_DATUM) / 2.0
                        + a2 * (T * T * T - T_DATUM * T_DATUM * T_DATUM) / 3.0
                        + a3 * (T * T * T * T - T_DATUM * T_DATUM * T_DATUM * T_DATUM) / 4.0)
        s_ig += x[i] * (a0 * math.log(T / T_DATUM)
                        + a1 * (T - T_DATUM)
                        + a2 * (T * T - T_DATUM * T_DATUM) / 2.0
                        + a3 * (T * T * T - T_DATUM * T_DATUM * T_DATUM) / 3.0)

    cv_m = cp_ig - R
    if cv_m <= 0.0:
        raise ValueError("non-positive heat capacity")
    vm = R * T / P
    s_m = s_ig - R * math.log(P / P_DATUM)

    return (1.0, cp_ig / mw_mix, h_ig / mw_mix, s_m / mw_mix, vm / mw_mix,
            0.0, 0.0, P / T, vm / (T * mw_mix), 0.0, 1.0, cp_ig / cv_m, mw_mix)
