"""Extended-precision reference values for the coincidence probability.

Evaluates the band integral directly (inner integral via the exact CDF,
outer integral by mpmath quadrature) at 40 significant digits. Values
printed here are frozen into tests/test_analytics.cpp.
"""
import mpmath as mp

mp.mp.dps = 40


def p_less(sigma, delay, window, delta):
    # t1 over [-window, window] around the left centre, t2 unrestricted,
    # right profile centred at +delay.
    s = mp.mpf(sigma)
    T = mp.mpf(delay)
    D = mp.mpf(window)
    d = mp.mpf(delta)
    f = lambda t: mp.sech(t / s) ** 2 / (2 * s)
    F = lambda t: (1 + mp.tanh(t / s)) / 2
    g = lambda t: f(t) * (F(t + d - T) - F(t - d - T))
    pts = [-D] + [k * s for k in (-64, -16, -4, -1, 0, 1, 4, 16, 64) if abs(k * s) < D] + [D]
    return mp.quad(g, pts)


def closed(sigma, delay, window, delta):
    s = mp.mpf(sigma)
    x = mp.mpf(window) / s
    tot = 0
    for n in (0, 1):
        A = (mp.mpf(delay) + (-1) ** (n + 1) * mp.mpf(delta)) / s
        tot += (-1) ** n * (mp.csch(A) ** 2 * mp.log(mp.cosh(A + x) / mp.cosh(A - x))
                            - 2 * mp.coth(A) * mp.tanh(x))
    return tot / 4


cases = [
    (1000, 3.3, 1e6, 0.1),
    (1000, 0.0, 1e6, 0.1),
    (1000, 0.1, 1e6, 0.1),
    (100, 10, 1e3, 0.01),
    (1e5, 10, 1e3, 0.01),
    (1000, 3.3, 2000, 0.1),
    (500, 50, 4000, 20),
]
for c in cases:
    q = p_less(*c)
    try:
        cf = closed(*c)
    except ZeroDivisionError:
        cf = None
    print(c, mp.nstr(q, 20), mp.nstr(cf, 20) if cf is not None else "-")
