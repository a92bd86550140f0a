"""Weighted tau-derivatives, Jacobi's derivative formula and its level-n form.

Fixed conventions
-----------------
* ``D`` acts on functions of tau with weight 1 on the diagonal and 1/2 off it,
  treating tau_jk = tau_kj as one variable.  For theta at argument 2n tau the
  chain factor 2n is included, so ``D theta(2n tau) = 2n * hessian / (4 pi i)``.
* The generalized identity is

      c * theta[0,delta](2n tau)^(2g) * det D(theta[a,delta](2n tau) / theta[0,delta](2n tau))
        = sum_{eps_1..eps_g} e(2 delta^t (eps_1 + ... + eps_g))
              * D([a/2 + eps_1, 0], ..., [a/2 + eps_g, 0])(4n tau)^2

  with ``D(...)`` the Jacobian determinant of :func:`moduli.jacobian_det`.
  The constant c is estimated numerically and is only meaningful under these
  conventions.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .characteristics import RationalVector, cexp, half_characteristics
from .errors import CharacteristicOrderError, CrossCheckError, InsufficientData, VanishingDenominator
from .identities import HALF
from .reports import DEFAULT_TOL, IdentityReport, compare, term_scale
from .theta import DEFAULT_POLICY, JetTable, PeriodMatrix, TruncationPolicy, theta_jet

DENOM_FLOOR = 1e-10
SIDE_FLOOR = 1e-12
CROSS_TOL = 1e-9
MIN_SAMPLES = 10


def _weights(g: int) -> np.ndarray:
    return 0.5 * (np.ones((g, g)) + np.eye(g))


@dataclass
class DOperatorResult:
    matrix: np.ndarray
    det: complex
    lhs: complex  # theta0^(2g) * det, the left side without the constant
    theta_a: complex
    theta_0: complex
    cross_residual: float
    degraded: bool = False


@dataclass
class ConstantEstimate:
    value: complex
    ratios: np.ndarray
    rel_std: float
    count: int
    indices: dict
    used: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        from .reports import jsonable

        return jsonable(
            {
                "value": self.value,
                "rel_std": self.rel_std,
                "count": self.count,
                "indices": self.indices,
                "used": self.used,
            }
        )


def _check_order(a: RationalVector, n: int) -> None:
    if not a.in_lattice(2 * n):
        raise CharacteristicOrderError(f"{a} is not in ((1/{2 * n})Z)^g")


def _two_routes(jet, n: int) -> tuple[np.ndarray, np.ndarray]:
    heat = 2 * n * jet.hessian / (4j * math.pi)
    series = 2 * n * jet.tau_deriv
    return heat, series


def d_operator_quotient(
    tau: PeriodMatrix,
    a: RationalVector,
    delta: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    *,
    table: JetTable | None = None,
) -> DOperatorResult:
    """D applied to theta[a,delta](2n tau) / theta[0,delta](2n tau).

    Each tau-derivative is formed from the heat equation and from the series
    directly; disagreement beyond 1e-9 (relative to max(1, |entries|)) raises.
    """
    _check_order(a, n)
    if not delta.is_half_integral():
        raise ValueError("delta must be half-integral")
    g = tau.genus
    table = table or JetTable(tau, policy)
    ja = table.jet(2 * n, a, delta)
    j0 = table.jet(2 * n, RationalVector.zeros(g), delta)
    if abs(j0.value) <= DENOM_FLOOR:
        raise VanishingDenominator(f"|theta[0,{delta}](2n tau)| = {abs(j0.value):.3g}")

    cross = 0.0
    routes = []
    for j in (ja, j0):
        h, s = _two_routes(j, n)
        cross = max(cross, float(np.abs(h - s).max()) / term_scale(h, s))
        routes.append(h)
    if cross > CROSS_TOL:
        raise CrossCheckError(f"heat and series tau-derivatives differ by {cross:.3g}")
    da, d0 = routes
    th_a, th_0 = ja.value, j0.value
    m = (da * th_0 - th_a * d0) / th_0**2
    m = 0.5 * (m + m.T)
    det = complex(np.linalg.det(m))
    return DOperatorResult(m, det, th_0 ** (2 * g) * det, th_a, th_0, cross, table.degraded)


def rhs_terms(
    tau: PeriodMatrix,
    a: RationalVector,
    delta: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    *,
    table: JetTable | None = None,
) -> list[complex]:
    """The 2^(g^2) phased squared Jacobian determinants, in lexicographic
    order of (eps_1, ..., eps_g)."""
    _check_order(a, n)
    g = tau.genus
    table = table or JetTable(tau, policy)
    zero = RationalVector.zeros(g)
    halves = half_characteristics(g)
    grads = [table.jet(4 * n, a * HALF + e, zero).gradient for e in halves]
    out = []
    for combo in itertools.product(range(len(halves)), repeat=g):
        s = RationalVector.zeros(g)
        for k in combo:
            s = s + halves[k]
        jac = np.linalg.det(np.array([grads[k] for k in combo])) / math.pi**g
        out.append(cexp((2 * delta).dot(s)) * jac**2)
    return out


def rhs_sum(tau, a, delta, n, policy=DEFAULT_POLICY, *, table=None) -> complex:
    return complex(sum(rhs_terms(tau, a, delta, n, policy, table=table)))


def _both_sides(tau, a, delta, n, policy):
    table = JetTable(tau, policy)
    d = d_operator_quotient(tau, a, delta, n, policy, table=table)
    terms = rhs_terms(tau, a, delta, n, policy, table=table)
    return d, complex(sum(terms)), terms, table.degraded


def estimate_constant(
    taus: Sequence[PeriodMatrix],
    a: RationalVector,
    delta: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> ConstantEstimate:
    """Median of RHS / LHS over samples where both sides exceed 1e-12."""
    g = taus[0].genus if taus else len(a)
    ratios, used = [], []
    for k, tau in enumerate(taus):
        try:
            d, rhs, _, _ = _both_sides(tau, a, delta, n, policy)
        except VanishingDenominator:
            continue
        if abs(d.lhs) > SIDE_FLOOR and abs(rhs) > SIDE_FLOOR:
            ratios.append(rhs / d.lhs)
            used.append(k)
    indices = {"a": a, "delta": delta, "n": n, "g": g}
    if len(ratios) < MIN_SAMPLES:
        raise InsufficientData(
            f"only {len(ratios)} of {len(taus)} samples have both sides above {SIDE_FLOOR:g} for {indices}"
        )
    r = np.array(ratios)
    est = complex(np.median(r.real), np.median(r.imag))
    spread = float(np.sqrt(np.mean(np.abs(r - r.mean()) ** 2)))
    return ConstantEstimate(est, r, spread / abs(est), len(r), indices, used)


def generalized_jacobi_residual(
    tau: PeriodMatrix,
    const: complex,
    a: RationalVector,
    delta: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tol: float = DEFAULT_TOL,
) -> IdentityReport:
    t0 = time.perf_counter()
    d, rhs, terms, degraded = _both_sides(tau, a, delta, n, policy)
    lhs = const * d.lhs
    rep = compare("jacobi-generalized", lhs, rhs, genus=tau.genus, level=n, terms=terms, tolerance=tol,
                  inputs={"tau": tau.digest(), "a": a, "delta": delta, "const": const}, degraded=degraded)
    rep.wall_time = time.perf_counter() - t0
    return rep


def classical_jacobi_residual(
    tau: PeriodMatrix, policy: TruncationPolicy = DEFAULT_POLICY, tol: float = 1e-9
) -> IdentityReport:
    """theta'[1/2,1/2](tau, 0) = -pi theta[0,0] theta[1/2,0] theta[0,1/2] (tau, 0)."""
    if tau.genus != 1:
        raise ValueError("the classical formula is a genus-one identity")
    t0 = time.perf_counter()
    h, z = RationalVector([HALF]), RationalVector([0])
    odd = theta_jet(tau, None, h, h, policy)
    evens = [theta_jet(tau, None, e, d, policy) for e, d in ((z, z), (h, z), (z, h))]
    lhs = odd.gradient[0]
    prod = evens[0].value * evens[1].value * evens[2].value
    rep = compare("jacobi-classical", lhs, -math.pi * prod, genus=1, tolerance=tol,
                  inputs={"tau": tau.digest()},
                  degraded=odd.degraded or any(e.degraded for e in evens))
    rep.wall_time = time.perf_counter() - t0
    return rep


def classical_consistency_residual(
    tau: PeriodMatrix,
    const: complex,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tol: float = DEFAULT_TOL,
) -> IdentityReport:
    """Tie the level-one genus-one case (a=1/2, delta=0) to the classical formula.

    At these indices the right side collapses to -theta'[1/2,1/2](tau)^2 / (8 pi^2),
    which the classical formula turns into -(theta00 theta10 theta01)^2 / 8.
    Both sides of the level-n identity, the left one with the fitted constant,
    are compared against that product.
    """
    if tau.genus != 1:
        raise ValueError("genus-one check")
    t0 = time.perf_counter()
    a, zero = RationalVector([HALF]), RationalVector([0])
    d, rhs, terms, degraded = _both_sides(tau, a, zero, 1, policy)
    h = RationalVector([HALF])
    prod = (theta_jet(tau, None, zero, zero, policy).value * theta_jet(tau, None, h, zero, policy).value
            * theta_jet(tau, None, zero, h, policy).value)
    target = -(prod**2) / 8
    lhs = const * d.lhs
    rep = compare("jacobi-classical-consistency", [lhs, rhs], [target, target], genus=1, level=1,
                  terms=terms, tolerance=tol, inputs={"tau": tau.digest(), "const": const},
                  degraded=degraded)
    rep.wall_time = time.perf_counter() - t0
    return rep


# -- finite-difference oracle -------------------------------------------------------


def fd_tau_derivative(
    tau: PeriodMatrix,
    z,
    eps: RationalVector,
    delta: RationalVector,
    policy: TruncationPolicy = DEFAULT_POLICY,
    step: float = 1e-5,
) -> np.ndarray:
    """Weighted tau-derivative of theta[eps,delta](tau, z) by central differences
    with one Richardson level (symmetric perturbation of tau_jk = tau_kj)."""
    g = tau.genus

    def f(t):
        return theta_jet(t, z, eps, delta, policy).value

    def central(j, k, h):
        return (f(tau.shifted(j, k, h)) - f(tau.shifted(j, k, -h))) / (2 * h)

    raw = np.zeros((g, g), dtype=complex)
    for j in range(g):
        for k in range(j, g):
            d1, d2 = central(j, k, step), central(j, k, step / 2)
            raw[j, k] = raw[k, j] = (4 * d2 - d1) / 3
    return _weights(g) * raw


def verify_tau_derivatives(
    tau: PeriodMatrix,
    z,
    eps: RationalVector,
    delta: RationalVector,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tol: float = 1e-9,
) -> IdentityReport:
    """Heat route, series route and finite differences must agree pairwise."""
    t0 = time.perf_counter()
    g = tau.genus
    j = theta_jet(tau, z, eps, delta, policy)
    heat = j.hessian / (4j * math.pi)
    fd = fd_tau_derivative(tau, z, eps, delta, policy)
    scale = term_scale(heat, j.tau_deriv, fd, j.value)
    diff = max(
        float(np.abs(heat - j.tau_deriv).max()),
        float(np.abs(heat - fd).max()),
        float(np.abs(j.tau_deriv - fd).max()),
    )
    zv = np.zeros(g, dtype=complex) if z is None else np.asarray(z, dtype=complex)
    rep = IdentityReport("heat-consistency", g, None, diff / scale, scale, tol, None,
                         {"tau": tau.digest(), "z": zv, "eps": eps, "delta": delta}, j.degraded)
    rep.wall_time = time.perf_counter() - t0
    return rep
