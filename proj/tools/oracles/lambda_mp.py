"""Extended-precision reference values for the band-weighted integrals.

Lambda = alpha^2 * integral over |y| < dt of s(|y|/dt)^2 p(y) dy, with
s(x) = (exp(-r x) - exp(-r)) / (1 - exp(-r)) and p the density of
y = t1 - t2 restricted to t1 within the window around the left centre.
Also prints the ratio of the approximate to the exact coincidence
probability in the regime delta, T << sigma for a few window widths.
"""
import mpmath as mp

mp.mp.dps = 30


def density(sigma, delay, window, y):
    s = mp.mpf(sigma)
    f = lambda t: mp.sech(t / s) ** 2 / (2 * s)
    # t2 = t1 - y, right centre at +delay
    g = lambda t: f(t) * f(t - y - delay)
    pts = [-window] + [k * s for k in (-32, -8, -2, 0, 2, 8, 32) if abs(k * s) < window] + [window]
    return mp.quad(g, pts)


def shape(rate, x):
    r = mp.mpf(rate)
    return (mp.exp(-r * x) - mp.exp(-r)) / (1 - mp.exp(-r))


def band(sigma, delay, window, delta, weight):
    d = mp.mpf(delta)
    return mp.quad(lambda y: weight(abs(y) / d) * density(sigma, delay, window, y), [-d, 0, d])


def closed(sigma, delay, window, delta):
    s = mp.mpf(sigma)
    x = mp.mpf(window) / s
    tot = 0
    for n in (0, 1):
        A = (mp.mpf(delay) + (-1) ** (n + 1) * mp.mpf(delta)) / s
        tot += (-1) ** n * (mp.csch(A) ** 2 * mp.log(mp.cosh(A + x) / mp.cosh(A - x))
                            - 2 * mp.coth(A) * mp.tanh(x))
    return tot / 4


def approx(sigma, delay, window, delta):
    s = mp.mpf(sigma)
    return mp.tanh(mp.mpf(window) / s) / 2 * (mp.tanh((delay + mp.mpf(delta)) / s) - mp.tanh((delay - mp.mpf(delta)) / s))


alpha2 = mp.mpf(3) / 4
for case in [(1000, 3.3, 1e6, 0.1), (500, 50, 4000, 20)]:
    lam = alpha2 * band(*case, lambda x: shape(5, x) ** 2)
    p = band(*case, lambda x: 1)
    print("lambda", case, mp.nstr(lam, 20), "p_less", mp.nstr(p, 20))

for window in (1e-2, 1e3, 5e3, 1e6):
    c = (1000, 3.3, window, 0.1)
    print("approx/closed", c, mp.nstr(approx(*c) / closed(*c), 20))
