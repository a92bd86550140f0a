"""Independent reference evaluators used only by the tests.

Nothing here imports the evaluation code of the package: sums are plain
Python loops over a fixed cube with float characteristics, and the genus-one
values come from mpmath's Jacobi theta functions.
"""

import cmath
import itertools
import math

import mpmath

TWO_PI_I = 2j * math.pi


def _floats(v):
    return [float(x) for x in v]


def direct_sum(tau, z, eps, delta, radius=12):
    """Value, gradient and Hessian by brute-force summation over the cube
    |n_i| <= radius.  tau is a nested list or array of complex numbers."""
    g = len(tau)
    e, d = _floats(eps), _floats(delta)
    z = [0j] * g if z is None else [complex(x) for x in z]
    val = 0j
    grad = [0j] * g
    hess = [[0j] * g for _ in range(g)]
    for n in itertools.product(range(-radius, radius + 1), repeat=g):
        v = [n[i] + e[i] for i in range(g)]
        q = 0j
        for i in range(g):
            for j in range(g):
                q += 0.5 * v[i] * complex(tau[i][j]) * v[j]
            q += v[i] * (z[i] + d[i])
        t = cmath.exp(TWO_PI_I * q)
        val += t
        for i in range(g):
            grad[i] += TWO_PI_I * v[i] * t
            for j in range(g):
                hess[i][j] += TWO_PI_I**2 * v[i] * v[j] * t
    return val, grad, hess


def mp_theta(tau, z, eps, delta, deriv=0, dps=30):
    """Genus-one theta[eps, delta](tau, z) and its z-derivatives via

        theta[eps, delta](tau, z) = e(eps^2 tau / 2 + eps (z + delta)) theta_3(pi (z + delta + eps tau), q),

    q = exp(pi i tau).  Returns an mpmath complex number."""
    with mpmath.workdps(dps):
        tau = mpmath.mpc(tau)
        z = mpmath.mpc(z)
        e, d = mpmath.mpf(float(eps)), mpmath.mpf(float(delta))
        q = mpmath.exp(1j * mpmath.pi * tau)

        def f(x):
            pre = mpmath.exp(2j * mpmath.pi * (e * e * tau / 2 + e * (x + d)))
            return pre * mpmath.jtheta(3, mpmath.pi * (x + d + e * tau), q)

        if deriv == 0:
            return f(z)
        return mpmath.diff(f, z, deriv)


def mp_tau_derivative(tau, eps, delta, dps=30):
    """d/dtau theta[eps, delta](tau, 0) in genus one, by mpmath numerical differentiation."""
    with mpmath.workdps(dps):
        # explicit step; the inner evaluations run at twice the precision
        return mpmath.diff(lambda t: mp_theta(t, 0, eps, delta, dps=2 * dps), mpmath.mpc(tau), h=mpmath.mpf(10) ** (-dps // 3))


def classical_constants(tau, dps=30):
    """(theta00, theta10, theta01, theta'11) at z = 0 through mpmath."""
    return (
        mp_theta(tau, 0, 0, 0, dps=dps),
        mp_theta(tau, 0, 0.5, 0, dps=dps),
        mp_theta(tau, 0, 0, 0.5, dps=dps),
        mp_theta(tau, 0, 0.5, 0.5, deriv=1, dps=dps),
    )


def jacobi_constant(g, n, a, delta):
    """Closed form of the level-n Jacobi constant under the package conventions:

        c = g! (i / (2 pi n))^g e(-g a.delta),

    obtained by expanding both sides in the exponential basis with
    Cauchy-Binet.  Used only as a cross-check of the numerical estimate."""
    ad = sum(float(x) * float(y) for x, y in zip(a, delta))
    return math.factorial(g) * (1j / (2 * math.pi * n)) ** g * cmath.exp(-2j * math.pi * g * ad)


def chordal(u, v):
    """Phase-invariant distance of unit representatives (plain Python)."""
    nu = math.sqrt(sum(abs(x) ** 2 for x in u))
    nv = math.sqrt(sum(abs(x) ** 2 for x in v))
    u = [x / nu for x in u]
    v = [x / nv for x in v]
    ip = sum(b.conjugate() * a for a, b in zip(u, v))
    ph = ip / abs(ip) if abs(ip) else 1
    return math.sqrt(sum(abs(a - ph * b) ** 2 for a, b in zip(u, v)))
