#!/usr/bin/env python3
"""Independent reference values frozen into the Rust test suites.

Uses mpmath (arbitrary precision) and numpy/scipy; nothing here shares code
with the Rust implementation. Run: python3 scripts/oracles.py
"""
import mpmath as mp
import numpy as np
from numpy.polynomial.legendre import leggauss

mp.mp.dps = 40


def ai(x):
    return mp.airyai(x), mp.airyai(x, derivative=1)


def ai_tail(x):
    # int_x^inf Ai = 1/3 - int_0^x Ai
    return mp.mpf(1) / 3 - mp.quad(mp.airyai, [0, x])


def psi(n, m, x):
    m = mp.mpf(m)
    t = 2 * mp.sqrt(m) + x * m ** (-mp.mpf(1) / 6)
    he = mp.hermite(n, t / mp.sqrt(2)) * mp.mpf(2) ** (-mp.mpf(n) / 2)
    phi = mp.exp(-t * t / 4) * he / mp.sqrt(mp.sqrt(2 * mp.pi) * mp.factorial(n))
    return m ** (mp.mpf(1) / 12) * phi


def psi_total(n, m):
    if n % 2:
        return mp.mpf(0)
    k = n // 2
    tot = 2 * mp.sqrt(mp.pi) * mp.sqrt(mp.factorial(n)) / (2 ** k * mp.factorial(k)) / (2 * mp.pi) ** 0.25
    return mp.mpf(m) ** 0.25 * tot


def eps_psi(n, m, x):
    hi = 60
    return psi_total(n, m) / 2 - mp.quad(lambda u: psi(n, m, u), mp.linspace(x, hi, 40))


def kn_sum(n, x, y):
    s = sum(psi(k, n, x) * psi(k, n, y) for k in range(n))
    return s / mp.mpf(n) ** (mp.mpf(1) / 3)


def k_airy(x, y):
    a, ap = ai(x)
    b, bp = ai(y)
    if x == y:
        return ap * ap - x * a * a
    return (a * bp - ap * b) / (x - y)


def extended(s, x, t, y):
    if s <= t:
        return mp.quad(lambda v: mp.exp(-(t - s) * v / 2) * mp.airyai(x + v) * mp.airyai(y + v), [0, 5, 20, mp.inf])
    return -mp.quad(lambda u: mp.exp((t - s) * u / 2) * mp.airyai(x - u) * mp.airyai(y - u), [0, 5, 20, 60, mp.inf])


def tw2(s, order=120, length=14.0):
    from scipy.special import airy
    z, w = leggauss(order)
    x = s + (z + 1) * length / 2
    w = w * length / 2
    a, ap, _, _ = airy(x)
    X, Y = np.meshgrid(x, x, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        K = (np.outer(a, ap) - np.outer(ap, a)) / (X - Y)
    K[np.diag_indices(order)] = ap * ap - x * a * a
    sw = np.sqrt(w)
    return np.linalg.det(np.eye(order) - sw[:, None] * K * sw[None, :])


def main():
    print("# Airy values (x, Ai, Ai')")
    for x in [-50, -30, -10, -4.5, -2, 0, 1, 4.5, 5, 10, 20]:
        a, ap = ai(x)
        print(f"({x}_f64, {mp.nstr(a, 20)}, {mp.nstr(ap, 20)}),")
    print("# Airy tail integral")
    for x in [-20, -5, -1, 0, 2, 6]:
        print(f"({x}_f64, {mp.nstr(ai_tail(x), 20)}),")
    print("# psi (n, m, x, value)")
    for (n, m, x) in [(0, 1, -2), (6, 6, -3), (6, 6, 1.5), (17, 17, -4), (50, 50, 3), (400, 400, -20), (2000, 2000, -5), (2000, 2000, -100)]:
        print(f"({n}, {m}, {x}_f64, {mp.nstr(psi(n, m, mp.mpf(x)), 20)}),")
    print("# psi totals (n, m, total)")
    for (n, m) in [(40, 40), (80, 80), (160, 160), (6, 6), (12, 8)]:
        print(f"({n}, {m}, {mp.nstr(psi_total(n, m), 20)}),")
    print("# eps psi (n, m, x, value)")
    for (n, m, x) in [(6, 6, -1), (5, 5, 0), (7, 6, -2), (9, 8, -3.5)]:
        print(f"({n}, {m}, {x}_f64, {mp.nstr(eps_psi(n, m, mp.mpf(x)), 20)}),")
    print("# K_n sum form (n, x, y, value)")
    for (n, x, y) in [(8, 0.3, -1.2), (8, -2, -2), (32, 1, -4), (6, -1, 0.5)]:
        print(f"({n}, {x}_f64, {y}_f64, {mp.nstr(kn_sum(n, mp.mpf(x), mp.mpf(y)), 20)}),")
    print("# K_Ai (x, y, value)")
    for (x, y) in [(0, 0), (0.3, -1.2), (0, 20), (-5, -5), (2, -3)]:
        print(f"({x}_f64, {y}_f64, {mp.nstr(k_airy(mp.mpf(x), mp.mpf(y)), 20)}),")
    print("# extended kernel (s, x, t, y, value)")
    for (s, x, t, y) in [(0, 0, 2, 0), (0, 0.5, 1, -0.5), (1, 0.5, 0, -0.5), (2, -1, 0, 0.3)]:
        print(f"({s}_f64, {x}_f64, {t}_f64, {y}_f64, {mp.nstr(extended(s, mp.mpf(x), t, mp.mpf(y)), 16)}),")
    print("# F2 (s, value)")
    for s in [-4, -3, -2, -1, 0, 1, 2]:
        print(f"({s}_f64, {tw2(float(s)):.15e}),")


if __name__ == "__main__":
    main()
