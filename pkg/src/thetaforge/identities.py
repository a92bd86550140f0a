"""Pairing matrices C and A, and residual checks of the theta identities.

Notation: ``theta[a, b](T, Z)`` with exact rational characteristics.  Lower
characteristics are used with the exact representative written in each
formula (``sigma + eps`` is *not* reduced mod 1); see
:mod:`thetaforge.characteristics`.

Every ``verify_*`` function returns an :class:`IdentityReport` whose residual is
``max |lhs - rhs| / max(1, max |term|)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .characteristics import RationalVector, cexp, grid, half_characteristics
from .reports import DEFAULT_TOL, IdentityReport, compare
from .theta import DEFAULT_POLICY, JetTable, PeriodMatrix, TruncationPolicy, theta_jet

HALF = Fraction(1, 2)


def _z(z, g):
    return np.zeros(g, dtype=complex) if z is None else np.asarray(z, dtype=complex).reshape(g)


def _timed(report: IdentityReport, t0: float) -> IdentityReport:
    report.wall_time = time.perf_counter() - t0
    return report


# -- shift formula ----------------------------------------------------------


def verify_shift(
    tau: PeriodMatrix,
    z,
    a: RationalVector,
    b: RationalVector,
    c: RationalVector,
    d: RationalVector,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tol: float = DEFAULT_TOL,
) -> IdentityReport:
    """theta[a,b](tau, z + tau c + d) = e(-1/2 c^t tau c - c^t (z + d + b)) theta[a+c, b+d](tau, z)."""
    t0 = time.perf_counter()
    g = tau.genus
    zv = _z(z, g)
    cf, df = c.as_float(), d.as_float()
    lhs_jet = theta_jet(tau, zv + tau.matrix @ cf + df, a, b, policy)
    rhs_jet = theta_jet(tau, zv, a + c, b + d, policy)
    # rational part of the phase is reduced exactly
    phase = cexp(-c.dot(d + b)) * np.exp(2j * np.pi * (-0.5 * cf @ tau.matrix @ cf - cf @ zv))
    rhs = phase * rhs_jet.value
    rep = compare(
        "shift",
        lhs_jet.value,
        rhs,
        genus=g,
        terms=[rhs_jet.value],
        tolerance=tol,
        inputs={"tau": tau.digest(), "z": zv, "a": a, "b": b, "c": c, "d": d},
        degraded=lhs_jet.degraded or rhs_jet.degraded,
    )
    return _timed(rep, t0)


# -- doubling lemma ---------------------------------------------------------


def verify_doubling(
    tau: PeriodMatrix,
    z,
    a: RationalVector,
    beta: RationalVector,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tol: float = DEFAULT_TOL,
) -> IdentityReport:
    """theta[a, beta](tau, 2z) = sum_eps e(beta^t (2 eps + a)) theta[eps + a/2, 0](4 tau, 4 z)."""
    if not beta.is_half_integral():
        raise ValueError("beta must be half-integral")
    t0 = time.perf_counter()
    g = tau.genus
    zv = _z(z, g)
    zero = RationalVector.zeros(g)
    lhs = theta_jet(tau, 2 * zv, a, beta, policy)
    tau4 = tau.scaled(4)
    terms, degraded = [], lhs.degraded
    for eps in half_characteristics(g):
        j = theta_jet(tau4, 4 * zv, eps + a * HALF, zero, policy)
        degraded |= j.degraded
        terms.append(cexp(beta.dot(2 * eps + a)) * j.value)
    rep = compare(
        "doubling",
        lhs.value,
        sum(terms),
        genus=g,
        terms=terms,
        tolerance=tol,
        inputs={"tau": tau.digest(), "z": zv, "a": a, "beta": beta},
        degraded=degraded,
    )
    return _timed(rep, t0)


# -- addition theorems --------------------------------------------------------


def _forward_terms(T: PeriodMatrix, Z, W, a, b, eps, policy):
    """Summands of 2^-g sum_sigma e(-2 a.sigma) theta[a+b, sigma+eps](T/2, (Z+W)/2)
    theta[a-b, sigma](T/2, (Z-W)/2), the right side of the product formula for
    theta[a, eps](T, Z) theta[b, eps](T, W)."""
    g = T.genus
    half = T.scaled(HALF)
    out, degraded = [], False
    for sigma in half_characteristics(g):
        j1 = theta_jet(half, (Z + W) / 2, a + b, sigma + eps, policy)
        j2 = theta_jet(half, (Z - W) / 2, a - b, sigma, policy)
        degraded |= j1.degraded or j2.degraded
        out.append(cexp(-2 * a.dot(sigma)) * j1.value * j2.value / 2**g)
    return out, degraded


def verify_addition_forward(
    tau: PeriodMatrix,
    z,
    w,
    a: RationalVector,
    b: RationalVector,
    eps: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tol: float = DEFAULT_TOL,
) -> IdentityReport:
    """theta[a,eps](4n tau, 4n z) theta[b,eps](4n tau, 4n w)
    = 2^-g sum_sigma e(-2 a.sigma) theta[a+b, sigma+eps](2n tau, 2n(z+w)) theta[a-b, sigma](2n tau, 2n(z-w))."""
    if not eps.is_half_integral():
        raise ValueError("eps must be half-integral")
    t0 = time.perf_counter()
    g = tau.genus
    zv, wv = _z(z, g), _z(w, g)
    T = tau.scaled(4 * n)
    j1 = theta_jet(T, 4 * n * zv, a, eps, policy)
    j2 = theta_jet(T, 4 * n * wv, b, eps, policy)
    terms, degraded = _forward_terms(T, 4 * n * zv, 4 * n * wv, a, b, eps, policy)
    lhs = j1.value * j2.value
    rep = compare(
        "addition-forward",
        lhs,
        sum(terms),
        genus=g,
        level=n,
        terms=terms,
        tolerance=tol,
        inputs={"tau": tau.digest(), "z": zv, "w": wv, "a": a, "b": b, "eps": eps},
        degraded=degraded or j1.degraded or j2.degraded,
    )
    return _timed(rep, t0)


def _converse_terms(tau, zv, wv, a, b, gamma, sigma, n, policy):
    g = tau.genus
    T = tau.scaled(4 * n)
    out, degraded = [], False
    for eps in half_characteristics(g):
        j1 = theta_jet(T, 2 * n * (zv + wv), eps + (a + b) * HALF, sigma, policy)
        j2 = theta_jet(T, 2 * n * (zv - wv), eps + (a - b) * HALF, sigma, policy)
        degraded |= j1.degraded or j2.degraded
        out.append(cexp((a + b + 2 * eps).dot(gamma)) * j1.value * j2.value)
    return out, degraded


def verify_addition_converse(
    tau: PeriodMatrix,
    z,
    w,
    a: RationalVector,
    b: RationalVector,
    gamma: RationalVector,
    sigma: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tol: float = DEFAULT_TOL,
) -> IdentityReport:
    """theta[a, gamma+sigma](2n tau, 2n z) theta[b, gamma](2n tau, 2n w)
    = sum_eps e((a+b+2 eps).gamma) theta[eps+(a+b)/2, sigma](4n tau, 2n(z+w)) theta[eps+(a-b)/2, sigma](4n tau, 2n(z-w))."""
    if not (gamma.is_half_integral() and sigma.is_half_integral()):
        raise ValueError("gamma and sigma must be half-integral")
    t0 = time.perf_counter()
    g = tau.genus
    zv, wv = _z(z, g), _z(w, g)
    T2 = tau.scaled(2 * n)
    j1 = theta_jet(T2, 2 * n * zv, a, gamma + sigma, policy)
    j2 = theta_jet(T2, 2 * n * wv, b, gamma, policy)
    terms, degraded = _converse_terms(tau, zv, wv, a, b, gamma, sigma, n, policy)
    rep = compare(
        "addition-converse",
        j1.value * j2.value,
        sum(terms),
        genus=g,
        level=n,
        terms=terms,
        tolerance=tol,
        inputs={"tau": tau.digest(), "z": zv, "w": wv, "a": a, "b": b, "gamma": gamma, "sigma": sigma},
        degraded=degraded or j1.degraded or j2.degraded,
    )
    return _timed(rep, t0)


def verify_converse_chain(
    tau: PeriodMatrix,
    z,
    w,
    a: RationalVector,
    b: RationalVector,
    gamma: RationalVector,
    sigma: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tol: float = DEFAULT_TOL,
) -> IdentityReport:
    """Walk the derivation of the converse addition formula step by step.

    s0  theta[a, gamma+sigma](2n tau, 2n z) theta[b, gamma](2n tau, 2n w)
    s1  theta[a, 0](2n tau, 2n z + gamma + sigma) theta[b, 0](2n tau, 2n w + gamma)
    s2  the product formula applied to s1 (sum over mu, at n tau)
    s3  the doubling lemma applied to both factors of s2 (sum over mu, eps, delta)
    s4  the final eps-sum after the character sum over mu collapses

    The residual is the largest deviation of any step from s0.
    """
    t0 = time.perf_counter()
    g = tau.genus
    zv, wv = _z(z, g), _z(w, g)
    zero = RationalVector.zeros(g)
    halves = half_characteristics(g)
    T2 = tau.scaled(2 * n)
    T4 = tau.scaled(4 * n)
    gf, sf = gamma.as_float(), sigma.as_float()
    jets = []

    def th(T, Z, e, d):
        j = theta_jet(T, Z, e, d, policy)
        jets.append(j)
        return j.value

    s0 = th(T2, 2 * n * zv, a, gamma + sigma) * th(T2, 2 * n * wv, b, gamma)
    Z1 = 2 * n * zv + gf + sf
    W1 = 2 * n * wv + gf
    s1 = th(T2, Z1, a, zero) * th(T2, W1, b, zero)
    s2_terms, deg2 = _forward_terms(T2, Z1, W1, a, b, zero, policy)
    s2 = sum(s2_terms)

    s3 = 0j
    for mu in halves:
        for eps in halves:
            for dl in halves:
                ph = cexp(-2 * a.dot(mu) + (2 * eps + a + b).dot(mu) + (2 * dl + a - b).dot(mu))
                s3 += ph * th(T4, 2 * n * (zv + wv) + 2 * gf + sf, eps + (a + b) * HALF, zero) * th(
                    T4, 2 * n * (zv - wv) + sf, dl + (a - b) * HALF, zero
                )
    s3 /= 2**g
    s4_terms, deg4 = _converse_terms(tau, zv, wv, a, b, gamma, sigma, n, policy)
    s4 = sum(s4_terms)
    steps = np.array([s1, s2, s3, s4])
    rep = compare(
        "addition-chain",
        np.full(4, s0),
        steps,
        genus=g,
        level=n,
        terms=s2_terms + s4_terms,
        tolerance=tol,
        inputs={"tau": tau.digest(), "z": zv, "w": wv, "a": a, "b": b, "gamma": gamma, "sigma": sigma},
        degraded=deg2 or deg4 or any(j.degraded for j in jets),
    )
    return _timed(rep, t0)


# -- C and A matrices ---------------------------------------------------------


@dataclass
class PairingMatrix:
    entries: np.ndarray
    kind: Literal["C", "A"]
    index_a: RationalVector
    index_b: RationalVector
    order_n: int
    tau_ref: PeriodMatrix | None = None
    lower_char: RationalVector | None = None
    degraded: bool = False

    @property
    def genus(self) -> int:
        return self.entries.shape[0]


def _c_matrix(ga: np.ndarray, gb: np.ndarray) -> np.ndarray:
    return 2 * np.outer(ga, gb) + 2 * np.outer(gb, ga)


def _a_matrix(ja, jb) -> np.ndarray:
    return ja.hessian * jb.value - ja.value * jb.hessian


def build_C(
    tau: PeriodMatrix,
    a: RationalVector,
    b: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    *,
    table: JetTable | None = None,
) -> PairingMatrix:
    """C^{ab}_{ij} = 2 d_i theta[a,0](4n tau) d_j theta[b,0](4n tau) + (i <-> j),
    gradients taken in the second argument with no rescaling."""
    table = table or JetTable(tau, policy)
    zero = RationalVector.zeros(tau.genus)
    ja = table.jet(4 * n, a, zero)
    jb = table.jet(4 * n, b, zero)
    return PairingMatrix(
        _c_matrix(ja.gradient, jb.gradient), "C", a, b, n, tau, None, ja.degraded or jb.degraded
    )


def build_A(
    tau: PeriodMatrix,
    a: RationalVector,
    b: RationalVector,
    eps: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    *,
    table: JetTable | None = None,
) -> PairingMatrix:
    """A^{ab}_eps = Hess theta[a,eps](2n tau) theta[b,eps](2n tau) - theta[a,eps] Hess theta[b,eps]."""
    if not eps.is_half_integral():
        raise ValueError("eps must be half-integral")
    table = table or JetTable(tau, policy)
    ja = table.jet(2 * n, a, eps)
    jb = table.jet(2 * n, b, eps)
    return PairingMatrix(_a_matrix(ja, jb), "A", a, b, n, tau, eps, ja.degraded or jb.degraded)


def c_from_a(tau, a, b, n, policy=DEFAULT_POLICY, *, table=None) -> tuple[np.ndarray, list]:
    """Right side of C^{ab} = 2^-g sum_sigma e(-2 a.sigma) A^{a+b, a-b}_sigma."""
    table = table or JetTable(tau, policy)
    g = tau.genus
    terms = [
        cexp(-2 * a.dot(s)) * build_A(tau, a + b, a - b, s, n, table=table).entries / 2**g
        for s in half_characteristics(g)
    ]
    return sum(terms), terms


def a_from_c(tau, a, b, delta, n, policy=DEFAULT_POLICY, *, table=None) -> tuple[np.ndarray, list]:
    """Right side of A^{ab}_delta = sum_eps e((a+b+2 eps).delta) C^{eps+(a+b)/2, eps+(a-b)/2}.

    The coefficient is 1: it follows from applying d_zi d_zj - d_wi d_wj at
    z = w = 0 to the converse addition formula.
    """
    table = table or JetTable(tau, policy)
    terms = [
        cexp((a + b + 2 * e).dot(delta))
        * build_C(tau, e + (a + b) * HALF, e + (a - b) * HALF, n, table=table).entries
        for e in half_characteristics(tau.genus)
    ]
    return sum(terms), terms


def admissible_pairs(n: int, g: int) -> list[tuple[RationalVector, RationalVector]]:
    """(a, b) in ((1/4n)Z/Z)^g squared with a + b in (1/2n)Z^g."""
    pts = grid(4 * n, g)
    return [(a, b) for a in pts for b in pts if (a + b).in_lattice(2 * n)]


def verify_AC(
    tau: PeriodMatrix,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    direction: Literal["a", "b"] = "a",
    *,
    indices: list | None = None,
    tol: float = DEFAULT_TOL,
) -> list[IdentityReport]:
    """Check the C <-> A correspondence on a list of index tuples.

    direction ``a``: tuples (a, b), default all of ((1/4n)Z/Z)^g squared.
    direction ``b``: tuples (a, b, delta), default all admissible (a, b) and all
    half-integral delta.
    """
    g = tau.genus
    table = JetTable(tau, policy)
    reports = []
    if direction == "a":
        if indices is None:
            pts = grid(4 * n, g)
            indices = [(a, b) for a in pts for b in pts]
        for a, b in indices:
            t0 = time.perf_counter()
            lhs = build_C(tau, a, b, n, table=table).entries
            rhs, terms = c_from_a(tau, a, b, n, table=table)
            rep = compare("ac-theorem-a", lhs, rhs, genus=g, level=n, terms=terms, tolerance=tol,
                          inputs={"tau": tau.digest(), "a": a, "b": b})
            reports.append(_timed(rep, t0))
    elif direction == "b":
        if indices is None:
            indices = [(a, b, d) for a, b in admissible_pairs(n, g) for d in half_characteristics(g)]
        for a, b, delta in indices:
            t0 = time.perf_counter()
            lhs = build_A(tau, a, b, delta, n, table=table).entries
            rhs, terms = a_from_c(tau, a, b, delta, n, table=table)
            rep = compare("ac-theorem-b", lhs, rhs, genus=g, level=n, terms=terms, tolerance=tol,
                          inputs={"tau": tau.digest(), "a": a, "b": b, "delta": delta})
            reports.append(_timed(rep, t0))
    else:
        raise ValueError("direction must be 'a' or 'b'")
    for r in reports:
        r.degraded = table.degraded
    return reports


def verify_ac_roundtrip(
    tau: PeriodMatrix,
    a: RationalVector,
    b: RationalVector,
    delta: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tol: float = DEFAULT_TOL,
) -> IdentityReport:
    """Substitute the C-from-A formula into the A-from-C formula and compare
    with A^{ab}_delta evaluated directly; exercises both normalizations."""
    t0 = time.perf_counter()
    g = tau.genus
    table = JetTable(tau, policy)
    lhs = build_A(tau, a, b, delta, n, table=table).entries
    terms = []
    for e in half_characteristics(g):
        c1, c2 = e + (a + b) * HALF, e + (a - b) * HALF
        inner, _ = c_from_a(tau, c1, c2, n, table=table)
        terms.append(cexp((a + b + 2 * e).dot(delta)) * inner)
    rep = compare("ac-roundtrip", lhs, sum(terms), genus=g, level=n, terms=terms, tolerance=tol,
                  inputs={"tau": tau.digest(), "a": a, "b": b, "delta": delta}, degraded=table.degraded)
    return _timed(rep, t0)


def verify_cyclic(
    tau: PeriodMatrix,
    a: RationalVector,
    b: RationalVector,
    c: RationalVector,
    eps: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tol: float = DEFAULT_TOL,
) -> IdentityReport:
    """A^{ab} theta[c] + A^{bc} theta[a] + A^{ca} theta[b] = 0 (all at 2n tau, lower eps)."""
    t0 = time.perf_counter()
    g = tau.genus
    table = JetTable(tau, policy)

    def th(x):
        return table.value(2 * n, x, eps)

    terms = [
        build_A(tau, a, b, eps, n, table=table).entries * th(c),
        build_A(tau, b, c, eps, n, table=table).entries * th(a),
        build_A(tau, c, a, eps, n, table=table).entries * th(b),
    ]
    rep = compare("cyclic", sum(terms), np.zeros((g, g)), genus=g, level=n, terms=terms, tolerance=tol,
                  inputs={"tau": tau.digest(), "a": a, "b": b, "c": c, "eps": eps}, degraded=table.degraded)
    return _timed(rep, t0)


def verify_heat(
    tau: PeriodMatrix,
    z,
    eps: RationalVector,
    delta: RationalVector,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tol: float = 1e-9,
) -> IdentityReport:
    """Term-wise tau-derivative against Hessian / (4 pi i)."""
    t0 = time.perf_counter()
    g = tau.genus
    j = theta_jet(tau, z, eps, delta, policy)
    heat = j.hessian / (4j * math.pi)
    rep = compare("heat", j.tau_deriv, heat, genus=g, terms=[j.value], tolerance=tol,
                  inputs={"tau": tau.digest(), "z": _z(z, g), "eps": eps, "delta": delta}, degraded=j.degraded)
    return _timed(rep, t0)


def rank_one_ratio(m: np.ndarray) -> float:
    """Second singular value over the first (0 for g = 1 or a zero matrix)."""
    s = np.linalg.svd(m, compute_uv=False)
    if s.size < 2 or s[0] == 0:
        return 0.0
    return float(s[1] / s[0])
