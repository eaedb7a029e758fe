"""Independent reference values frozen into the unit tests.

Nothing here imports the library: closed forms go through mpmath, lattice
probabilities through exact path counting, and whole-space Green values
through Fourier inversion with scipy.
"""

import itertools
import math
from fractions import Fraction

import mpmath as mp
from scipy import integrate

mp.mp.dps = 40


def cm_closed(alpha, m):
    return alpha * mp.gamma(m - alpha) / (mp.gamma(1 - alpha) * mp.factorial(m))


def c_renewal_closed(alpha, m):
    return mp.gamma(m + alpha) / (mp.gamma(alpha) * mp.factorial(m))


def srw_exact(d, m, x):
    """P(Z_m = x) by dynamic programming over exact rationals."""
    dist = {tuple([0] * d): Fraction(1)}
    for _ in range(m):
        nxt = {}
        for site, p in dist.items():
            for i in range(d):
                for s in (-1, 1):
                    y = list(site)
                    y[i] += s
                    y = tuple(y)
                    nxt[y] = nxt.get(y, 0) + p / (2 * d)
        dist = nxt
    return dist.get(tuple(x), Fraction(0))


def green_fourier_2d(alpha, x):
    # theta_i = pi v_i^2 removes the 1/|theta|^(2 alpha) singularity at the origin
    def f(v1, v2):
        t1, t2 = math.pi * v1 * v1, math.pi * v2 * v2
        lam = 1.0 - 0.5 * (math.cos(t1) + math.cos(t2))
        if lam == 0.0:
            return 0.0
        jac = (2 * math.pi * v1) * (2 * math.pi * v2)
        return math.cos(t1 * x[0]) * math.cos(t2 * x[1]) * jac / lam**alpha

    val, err = integrate.nquad(f, [[0, 1], [0, 1]], opts={"epsabs": 1e-13, "epsrel": 1e-11, "limit": 200})
    return val / math.pi**2, err / math.pi**2


def ball_count(d, n):
    r = math.ceil(n)
    return sum(1 for p in itertools.product(range(-r, r + 1), repeat=d) if sum(c * c for c in p) < n * n)


def main():
    print("phi mixture(2) =", mp.nstr((mp.mpf(2) ** 0.25 + mp.mpf(2) ** 0.75) / 2, 17))
    print("mu stable .5 at 1 =", mp.nstr(0.5 / mp.gamma(0.5), 17))
    print("u stable .5 at 1 =", mp.nstr(1 / mp.gamma(0.5), 17), " at 4 =", mp.nstr(mp.mpf(4) ** -0.5 / mp.gamma(0.5), 17))
    for a in (0.25, 0.5, 0.75):
        print(f"alpha={a}")
        for m in (1, 2, 10, 200, 2000):
            print(f"  c_{m} = {mp.nstr(cm_closed(mp.mpf(a), m), 17)}   c({m}) = {mp.nstr(c_renewal_closed(mp.mpf(a), m), 17)}")
        tail = 1 - mp.fsum(cm_closed(mp.mpf(a), m) for m in range(1, 201))
        print(f"  tail after 200 = {mp.nstr(tail, 17)}")
    x = mp.mpf(10) ** 4
    print("Gamma(x+1,x)/Gamma(x+1) at 1e4 =", mp.nstr(mp.gammainc(x + 1, x, mp.inf, regularized=True), 17))
    for d, m, site in ((1, 2, (0,)), (1, 2, (2,)), (2, 2, (0, 0)), (2, 10, (2, 2)), (3, 6, (1, 1, 0)), (3, 9, (2, 1, 0))):
        p = srw_exact(d, m, site)
        print(f"p(d={d}, m={m}, x={site}) = {p} = {float(p):.17g}")
    p200 = mp.binomial(200, 100) / mp.mpf(2) ** 200
    print("p(1,200,0) =", mp.nstr(p200, 17), " LCLT ratio =", mp.nstr(p200 / (2 * mp.sqrt(1 / (2 * mp.pi * 200))), 17))
    for site in ((0, 0), (1, 0), (1, 1), (3, 4)):
        v, e = green_fourier_2d(0.5, site)
        print(f"G_2d(alpha=.5, {site}) = {v:.15g} (+- {e:.1e})")
    for d, n in ((2, 1.5), (1, 3), (2, 10), (2, 8), (3, 4)):
        print(f"|B| d={d} n={n}: {ball_count(d, n)}")


if __name__ == "__main__":
    main()
