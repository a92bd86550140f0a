"""Theta functions with rational characteristics and their derivative jets.

The series

    theta[eps, delta](tau, z) = sum_n e( 1/2 (n+eps)^t tau (n+eps) + (n+eps)^t (z+delta) )

is summed over the box ``||n + eps||_inf <= R`` with ``R`` chosen from a proven
tail bound.  Value, gradient, Hessian and the weighted tau-derivative matrix all
come out of a single pass over the lattice.

tau-derivative convention: the stored ``tau_deriv`` is the weighted matrix
``D theta`` with ``d/dtau_jj`` on the diagonal and ``1/2 d/dtau_jk`` off the
diagonal, where the symmetric pair (tau_jk, tau_kj) is a single variable.  The
term-wise coefficient is then ``pi i v_j v_k`` everywhere and the heat equation
reads ``tau_deriv == hessian / (4 pi i)``.  The raw partial ``d/dtau_jk`` for
``j != k`` is twice the stored off-diagonal entry.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from .characteristics import RationalVector
from .errors import CharacteristicOrderError, InvalidPeriodMatrix, InvalidPolicy

TWO_PI_I = 2j * math.pi
MIN_IMAG_EIGENVALUE = 1e-3


class PeriodMatrix:
    """A point of the Siegel upper half-space.

    The matrix must be exactly symmetric as stored and its imaginary part
    positive definite.  Matrices with ``lambda_min(Im tau) < 1e-3`` are
    rejected unless ``allow_degenerate`` is set, since the summation radius
    blows up near the boundary.
    """

    __slots__ = ("_m", "lambda_min")

    def __init__(self, entries, *, allow_degenerate: bool = False):
        m = np.array(entries, dtype=complex)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise InvalidPeriodMatrix(f"period matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidPeriodMatrix("period matrix has non-finite entries")
        if not np.array_equal(m, m.T):
            raise InvalidPeriodMatrix("period matrix is not symmetric")
        lam = float(np.linalg.eigvalsh(m.imag).min())
        if lam <= 0:
            raise InvalidPeriodMatrix(f"Im(tau) is not positive definite (lambda_min={lam:.3g})")
        if lam < MIN_IMAG_EIGENVALUE and not allow_degenerate:
            raise InvalidPeriodMatrix(
                f"lambda_min(Im tau)={lam:.3g} below {MIN_IMAG_EIGENVALUE}; pass allow_degenerate=True to override"
            )
        m.setflags(write=False)
        self._m = m
        self.lambda_min = lam

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def genus(self) -> int:
        return self._m.shape[0]

    def scaled(self, factor) -> PeriodMatrix:
        return PeriodMatrix(self._m * factor, allow_degenerate=True)

    def shifted(self, j: int, k: int, h: complex) -> PeriodMatrix:
        """tau + h (E_jk + E_kj) for j != k, tau + h E_jj on the diagonal."""
        m = np.array(self._m)
        m[j, k] += h
        if j != k:
            m[k, j] += h
        return PeriodMatrix(m, allow_degenerate=True)

    def digest(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self._m).tobytes()).hexdigest()[:16]

    def tolist(self) -> list[list[list[float]]]:
        return [[[float(x.real), float(x.imag)] for x in row] for row in self._m]

    def __eq__(self, other) -> bool:
        return isinstance(other, PeriodMatrix) and np.array_equal(self._m, other._m)

    def __hash__(self) -> int:
        return hash(self._m.tobytes())

    def __repr__(self) -> str:
        return f"PeriodMatrix({self._m.tolist()!r})"


@dataclass(frozen=True)
class TruncationPolicy:
    tail_target: float = 1e-13
    max_radius: int = 60
    deriv_order: int = 2
    # 2 doubles the automatically chosen radius; used to certify that
    # residuals do not depend on truncation.
    radius_multiplier: int = 1

    def __post_init__(self):
        if not self.tail_target > 0:
            raise InvalidPolicy("tail_target must be positive")
        if self.max_radius < 1:
            raise InvalidPolicy("max_radius must be >= 1")
        if self.deriv_order not in (0, 1, 2):
            raise InvalidPolicy("deriv_order must be 0, 1 or 2")
        if self.radius_multiplier < 1:
            raise InvalidPolicy("radius_multiplier must be >= 1")

    def doubled(self) -> TruncationPolicy:
        return TruncationPolicy(
            self.tail_target, 2 * self.max_radius, self.deriv_order, 2 * self.radius_multiplier
        )


DEFAULT_POLICY = TruncationPolicy()


@dataclass
class ThetaJet:
    value: complex
    gradient: np.ndarray
    hessian: np.ndarray
    tau_deriv: np.ndarray
    degraded: bool = False
    radius: int = 0
    tail: float = 0.0
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def c(x):
            return [float(np.real(x)), float(np.imag(x))]

        return {
            "value": c(self.value),
            "gradient": [c(x) for x in self.gradient],
            "hessian": [[c(x) for x in row] for row in self.hessian],
            "tau_deriv": [[c(x) for x in row] for row in self.tau_deriv],
            "degraded": self.degraded,
            "radius": self.radius,
            "tail_bound": self.tail,
        }


def _as_z(z, g: int) -> np.ndarray:
    if z is None:
        return np.zeros(g, dtype=complex)
    arr = np.asarray(z, dtype=complex).reshape(-1)
    if arr.size == 1 and g > 1 and np.ndim(z) == 0:
        arr = np.full(g, arr[0])
    if arr.shape != (g,):
        raise ValueError(f"z must have length {g}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("z must be finite")
    return arr


def _poly(r: float, order: int) -> float:
    return sum((2 * math.pi * r) ** k for k in range(order + 1))


def tail_bound(tau: PeriodMatrix, z, eps: RationalVector, radius: int, deriv_order: int = 0) -> float:
    """Upper bound on the part of the series (and its derivatives up to
    ``deriv_order``) omitted by the box ``||n + eps||_inf <= radius``.

    Every omitted point has Euclidean norm r > k for some shell index
    k >= radius, the shell ``k < ||v||_inf <= k+1`` holds at most (2k+3)^g
    points, and each term is bounded by P(r) exp(-pi lam r^2 + 2 pi r |Im z|)
    with P(r) = sum_{j <= order} (2 pi r)^j.  The bound is nonincreasing in
    ``radius``.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    g = tau.genus
    lam = tau.lambda_min
    y = float(np.linalg.norm(_as_z(z, g).imag))
    d = deriv_order
    # beyond r_dec the majorant P(r) exp(...) is decreasing
    r_dec = (2 * math.pi * y + math.sqrt(4 * math.pi**2 * y**2 + 8 * math.pi * lam * d)) / (4 * math.pi * lam)
    peak = y / lam
    p_dec = _poly(r_dec, d)

    def log_majorant(k: float) -> float:
        if k >= r_dec:
            return math.log(_poly(k, d)) - math.pi * lam * k * k + 2 * math.pi * k * y
        r = max(k, peak)
        return math.log(p_dec) - math.pi * lam * r * r + 2 * math.pi * r * y

    total = 0.0
    k = radius
    prev = None
    while True:
        log_term = g * math.log(2 * k + 3) + log_majorant(k)
        term = math.exp(log_term) if log_term > -745 else 0.0
        total += term
        if k > r_dec and prev is not None:
            # ratios are decreasing past r_dec: once below 1/2 the remainder
            # is dominated by a geometric series with that ratio
            if term == 0.0 or (term < 0.5 * prev and term <= 1e-17 * total):
                total += term  # remainder <= term
                break
        prev = term
        k += 1
        if k > radius + 100000:
            return math.inf
    return total


def choose_radius(tau: PeriodMatrix, z, eps: RationalVector, policy: TruncationPolicy) -> tuple[int, float, bool]:
    """Smallest radius meeting the policy's tail target, capped at ``max_radius``."""
    lo, hi = 1, policy.max_radius
    if tail_bound(tau, z, eps, hi, policy.deriv_order) > policy.tail_target:
        return hi, tail_bound(tau, z, eps, hi, policy.deriv_order), True
    while lo < hi:
        mid = (lo + hi) // 2
        if tail_bound(tau, z, eps, mid, policy.deriv_order) <= policy.tail_target:
            hi = mid
        else:
            lo = mid + 1
    return lo, tail_bound(tau, z, eps, lo, policy.deriv_order), False


def _lattice_box(eps: np.ndarray, radius: int) -> np.ndarray:
    axes = [
        np.arange(math.ceil(-radius - e), math.floor(radius - e) + 1, dtype=np.int64) for e in eps
    ]
    return np.array(list(itertools.product(*axes)), dtype=np.int64).reshape(-1, len(eps))


def _exact_phase(n: np.ndarray, eps: RationalVector, delta: RationalVector) -> np.ndarray:
    """(n + eps)^t delta mod 1, reduced in exact integer arithmetic before
    conversion to floating point."""
    den = math.lcm(*(x.denominator for x in delta)) if len(delta) else 1
    num = np.array([int(x * den) for x in delta], dtype=np.int64)
    int_part = np.mod(n @ num, den).astype(float) / den
    const = eps.dot(delta)
    const -= math.floor(const)
    return np.mod(int_part + float(const), 1.0)


def _d_weights(g: int) -> np.ndarray:
    return 0.5 * (np.ones((g, g)) + np.eye(g))


def theta_jet(
    tau: PeriodMatrix,
    z,
    eps: RationalVector,
    delta: RationalVector,
    policy: TruncationPolicy = DEFAULT_POLICY,
    *,
    radius: int | None = None,
) -> ThetaJet:
    """Value, z-gradient, z-Hessian and weighted tau-derivative of
    theta[eps, delta](tau, z), from one pass over the lattice box."""
    g = tau.genus
    if len(eps) != g or len(delta) != g:
        raise ValueError(f"characteristics must have length {g}")
    zv = _as_z(z, g)
    upper = eps.mod1()
    degraded = False
    if radius is None:
        radius, tail, degraded = choose_radius(tau, zv, upper, policy)
        radius *= policy.radius_multiplier
        if policy.radius_multiplier > 1:
            tail = tail_bound(tau, zv, upper, radius, policy.deriv_order)
    else:
        tail = tail_bound(tau, zv, upper, radius, policy.deriv_order)

    e_float = upper.as_float()
    n = _lattice_box(e_float, radius)
    v = n + e_float
    tv = v @ tau.matrix
    q = 0.5 * np.einsum("ki,ki->k", tv, v) + v @ zv
    terms = np.exp(TWO_PI_I * q) * np.exp(TWO_PI_I * _exact_phase(n, upper, delta))

    value = complex(terms.sum())
    grad = TWO_PI_I * (v.T @ terms)
    w = TWO_PI_I * v
    hess = np.einsum("ki,kj,k->ij", w, w, terms)
    hess = 0.5 * (hess + hess.T)
    # series route: raw partials of e(1/2 v^t tau v) in the symmetric variables
    # tau_jk = tau_kj are pi i v_j^2 (diagonal) and 2 pi i v_j v_k (off), then
    # weighted by 1 and 1/2
    quad = np.einsum("ki,kj,k->ij", v, v, terms)
    raw = 1j * math.pi * (2.0 * quad - np.diag(np.diag(quad)))
    tau_deriv = _d_weights(g) * raw
    tau_deriv = 0.5 * (tau_deriv + tau_deriv.T)
    return ThetaJet(value, grad, hess, tau_deriv, degraded, radius, tail)


def theta_scaled_jet(
    tau: PeriodMatrix,
    z,
    a: RationalVector,
    order_m: int,
    z_scaling: Literal["full", "none"] = "full",
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> ThetaJet:
    """Jet of theta[a, 0](m tau, m z) (``full``) or theta[a, 0](m tau, z) (``none``).

    Derivatives are reported with respect to the caller's ``z`` and ``tau``:
    ``full`` multiplies gradient and Hessian by m and m^2.  ``tau_deriv`` is the
    weighted tau-derivative of the composite, so it carries a chain factor m
    (and the heat relation becomes tau_deriv = hessian / (4 pi i m) for
    ``full``, m * hessian / (4 pi i) for ``none``).
    """
    if order_m < 1:
        raise CharacteristicOrderError("order must be a positive integer")
    if order_m % a.order != 0:
        raise CharacteristicOrderError(f"characteristic {a} has order {a.order}, not dividing {order_m}")
    if z_scaling not in ("full", "none"):
        raise ValueError("z_scaling must be 'full' or 'none'")
    g = tau.genus
    zv = _as_z(z, g)
    arg = order_m * zv if z_scaling == "full" else zv
    jet = theta_jet(tau.scaled(order_m), arg, a, RationalVector.zeros(g), policy)
    s = order_m if z_scaling == "full" else 1
    jet.gradient = s * jet.gradient
    jet.hessian = s * s * jet.hessian
    jet.tau_deriv = order_m * jet.tau_deriv
    jet.meta = {"order": order_m, "z_scaling": z_scaling}
    return jet


class JetTable:
    """Per-call memo of theta jets at z = 0 for one period matrix.

    Local to a single verification call; never shared between threads.
    """

    def __init__(self, tau: PeriodMatrix, policy: TruncationPolicy = DEFAULT_POLICY):
        self.tau = tau
        self.policy = policy
        self.degraded = False
        self._scaled: dict = {}
        self._jets: dict = {}

    def jet(self, scale, eps: RationalVector, delta: RationalVector, z=None) -> ThetaJet:
        zkey = None if z is None else tuple(complex(x) for x in np.asarray(z, dtype=complex).reshape(-1))
        key = (Fraction(scale), eps.key(), delta.entries, zkey)
        hit = self._jets.get(key)
        if hit is None:
            t = self._scaled.get(scale)
            if t is None:
                t = self._scaled[scale] = self.tau.scaled(scale)
            hit = theta_jet(t, z, eps, delta, self.policy)
            self.degraded |= hit.degraded
            self._jets[key] = hit
        return hit

    def value(self, scale, eps, delta, z=None) -> complex:
        return self.jet(scale, eps, delta, z).value

