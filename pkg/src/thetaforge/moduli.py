"""Theta-constant and gradient maps, Pluecker coordinates and reconstruction.

Conventions
-----------
* ``th_map(tau, n)`` lists theta[a, 0](n tau, 0) for a in ((1/n)Z/Z)^g.
* ``phi_map(tau, n)`` is the g x (4n)^g frame whose column ``a`` is the
  z-gradient of theta[a, 0](4n tau, z) at z = 0, with no rescaling of z.
* Projective points are compared with the chordal distance
  ``min_phi || u - e^{i phi} v ||`` of unit representatives.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .characteristics import RationalVector, cexp, grid, half_characteristics
from .errors import (
    AdmissibilityError,
    AmbiguousReconstruction,
    DegenerateFrame,
    DegenerateProjectivePoint,
    DimensionShortfall,
)
from .identities import HALF
from .theta import DEFAULT_POLICY, JetTable, PeriodMatrix, TruncationPolicy, theta_jet

ZERO_FLOOR = 1e-12
RANK_RATIO = 1e-8
KERNEL_GAP = 1e4


def chordal_distance(u, v) -> float:
    u = np.asarray(u, dtype=complex).ravel()
    v = np.asarray(v, dtype=complex).ravel()
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise DegenerateProjectivePoint("chordal distance of a zero vector")
    u, v = u / nu, v / nv
    ip = np.vdot(v, u)
    phase = ip / abs(ip) if abs(ip) > 0 else 1.0
    return float(np.linalg.norm(u - phase * v))


@dataclass
class ProjectivePoint:
    """Point of projective space, scaled so its largest coordinate is 1."""

    coords: np.ndarray
    labels: list = field(default_factory=list)
    pivot: int = 0

    @classmethod
    def from_vector(cls, v, labels=None, floor: float = ZERO_FLOOR) -> ProjectivePoint:
        v = np.asarray(v, dtype=complex).ravel()
        if v.size == 0 or np.abs(v).max() < floor:
            raise DegenerateProjectivePoint(f"all coordinates below {floor:g} in modulus")
        k = int(np.argmax(np.abs(v)))
        return cls(v / v[k], list(labels or []), k)

    def distance(self, other) -> float:
        o = other.coords if isinstance(other, ProjectivePoint) else other
        return chordal_distance(self.coords, o)

    def __len__(self) -> int:
        return self.coords.size


@dataclass
class GradientFrame:
    matrix: np.ndarray
    chars: list[RationalVector]
    genus: int
    level: int
    degraded: bool = False

    def column(self, a: RationalVector) -> np.ndarray:
        return self.matrix[:, self._index()[a.key()]]

    def _index(self) -> dict:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {c.key(): k for k, c in enumerate(self.chars)}
            self.__dict__["_idx"] = idx
        return idx


@dataclass
class PlueckerVector:
    point: ProjectivePoint
    subsets: list[tuple[int, ...]]

    @property
    def coords(self) -> np.ndarray:
        return self.point.coords


def th_map(tau: PeriodMatrix, n: int, policy: TruncationPolicy = DEFAULT_POLICY) -> ProjectivePoint:
    if n < 1:
        raise ValueError("level must be >= 1")
    g = tau.genus
    zero = RationalVector.zeros(g)
    table = JetTable(tau, policy)
    chars = grid(n, g)
    vals = [table.value(n, a, zero) for a in chars]
    return ProjectivePoint.from_vector(vals, chars)


def phi_map(tau: PeriodMatrix, n: int, policy: TruncationPolicy = DEFAULT_POLICY) -> GradientFrame:
    if n < 1:
        raise ValueError("level must be >= 1")
    g = tau.genus
    zero = RationalVector.zeros(g)
    table = JetTable(tau, policy)
    chars = grid(4 * n, g)
    cols = [table.jet(4 * n, a, zero).gradient for a in chars]
    return GradientFrame(np.array(cols).T.reshape(g, len(chars)), chars, g, n, table.degraded)


def jacobian_det(
    tau_arg: PeriodMatrix,
    chars: Sequence[tuple[RationalVector, RationalVector]],
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> complex:
    """pi^-g det[grad theta[eps_k, delta_k](tau_arg, 0)]_k (rows are gradients)."""
    g = tau_arg.genus
    if len(chars) != g:
        raise ValueError(f"need exactly {g} characteristic pairs, got {len(chars)}")
    rows = [theta_jet(tau_arg, None, e, d, policy).gradient for e, d in chars]
    return complex(np.linalg.det(np.array(rows)) / math.pi**g)


def all_minors(m: np.ndarray) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    g, ncols = m.shape
    subsets = list(itertools.combinations(range(ncols), g))
    idx = np.array(subsets, dtype=np.int64)
    blocks = np.transpose(m[:, idx], (1, 0, 2))  # (K, g rows, g cols)
    return np.linalg.det(blocks), subsets


def pluecker(frame: GradientFrame) -> PlueckerVector:
    s = np.linalg.svd(frame.matrix, compute_uv=False)
    if s.size < frame.genus or s[0] == 0 or s[frame.genus - 1] / s[0] < ZERO_FLOOR:
        raise DegenerateFrame(f"frame rank below {frame.genus} (singular values {s})")
    minors, subsets = all_minors(frame.matrix)
    return PlueckerVector(ProjectivePoint.from_vector(minors, subsets, floor=0.0), subsets)


# -- rank lemma -----------------------------------------------------------------


@dataclass
class RankCheck:
    singular_values: np.ndarray
    ratio: float
    passed: bool
    matrix: np.ndarray


def shifted_chars(n: int, delta: RationalVector) -> list[RationalVector]:
    """a + delta/(2n) for a in ((1/2n)Z/Z)^g, lexicographic in a."""
    return [a + delta / (2 * n) for a in grid(2 * n, len(delta))]


def rank_check(
    tau: PeriodMatrix,
    n: int,
    eps: RationalVector,
    delta: RationalVector,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> RankCheck:
    """Singular values of the (2n)^g x (g(g+1)/2 + 1) matrix with rows
    (theta, d_i d_j theta for i <= j) of theta[a + delta/2n, eps](2n tau)."""
    g = tau.genus
    ncols = g * (g + 1) // 2 + 1
    nrows = (2 * n) ** g
    if nrows < ncols:
        raise DimensionShortfall(
            f"(2n)^g = {nrows} rows cannot have full column rank {ncols}; need (2n)^g >= g(g+1)/2 + 1"
        )
    table = JetTable(tau, policy)
    iu = np.triu_indices(g)
    rows = []
    for c in shifted_chars(n, delta):
        j = table.jet(2 * n, c, eps)
        rows.append(np.concatenate([[j.value], j.hessian[iu]]))
    m = np.array(rows)
    s = np.linalg.svd(m, compute_uv=False)
    ratio = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    return RankCheck(s, ratio, ratio > RANK_RATIO, m)


# -- reconstruction -------------------------------------------------------------


@dataclass
class Reconstruction:
    point: ProjectivePoint
    singular_values: np.ndarray
    kernel_dim: int
    method: str
    recovered_tau: PeriodMatrix | None = None


def _c_from_frame(frame: GradientFrame, a: RationalVector, b: RationalVector) -> np.ndarray:
    ga, gb = frame.column(a), frame.column(b)
    return 2 * np.outer(ga, gb) + 2 * np.outer(gb, ga)


def _a_from_frame(frame, a, b, gamma) -> np.ndarray:
    return sum(
        cexp((a + b + 2 * e).dot(gamma)) * _c_from_frame(frame, e + (a + b) * HALF, e + (a - b) * HALF)
        for e in half_characteristics(frame.genus)
    )


def _triples(count: int, limit: int, seed: int) -> list[tuple[int, int, int]]:
    if math.comb(count, 3) <= limit:
        return list(itertools.combinations(range(count), 3))
    rng = np.random.default_rng(seed)
    seen: set = set()
    while len(seen) < limit:
        t = tuple(sorted(rng.choice(count, 3, replace=False).tolist()))
        seen.add(t)
    return sorted(seen)


def cyclic_system(frame: GradientFrame, gamma: RationalVector, delta: RationalVector, n: int,
                  max_triples: int = 20000, seed: int = 0) -> tuple[np.ndarray, list[RationalVector]]:
    """Stack the cyclic relations A^{ab} x_c + A^{bc} x_a + A^{ca} x_b = 0,
    one row per upper-triangular matrix entry, with the A's built from the
    frame through the A-from-C formula."""
    g = frame.genus
    chars = shifted_chars(n, delta)
    count = len(chars)
    if count < 3:
        raise AmbiguousReconstruction("fewer than three unknowns; no cyclic relations")
    iu = np.triu_indices(g)
    amat = {}
    for i in range(count):
        for j in range(i + 1, count):
            m = _a_from_frame(frame, chars[i], chars[j], gamma)[iu]
            amat[i, j] = m
            amat[j, i] = -m
    blocks = []
    for i, j, k in _triples(count, max_triples, seed):
        blk = np.zeros((len(iu[0]), count), dtype=complex)
        blk[:, k] += amat[i, j]
        blk[:, i] += amat[j, k]
        blk[:, j] += amat[k, i]
        blocks.append(blk)
    return np.vstack(blocks), chars


def _kernel(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    _, s, vh = np.linalg.svd(m)
    ncols = m.shape[1]
    full = np.zeros(ncols)
    full[: s.size] = s
    smax = full[0] if full[0] > 0 else 1.0
    dim = int(np.sum(full <= 1e-9 * smax))
    return full, vh.conj().T, dim


def _g1_gradient_rows(ts: np.ndarray, n: int) -> np.ndarray:
    """Gradient rows of theta[k/4n, 0](4n t, z) at z=0 for many scalar t at once."""
    T = 4 * n * np.asarray(ts, dtype=complex).reshape(-1, 1, 1)
    radius = int(math.ceil(math.sqrt(40.0 / (math.pi * float(T.imag.min()))))) + 2
    m = np.arange(-radius, radius + 1).reshape(1, 1, -1)
    a = (np.arange(4 * n) / (4 * n)).reshape(1, -1, 1)
    v = m + a
    terms = np.exp(2j * math.pi * 0.5 * v * v * T)
    return 2j * math.pi * (v * terms).sum(axis=2)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def recover_period_genus_one(frame: GradientFrame, policy: TruncationPolicy = DEFAULT_POLICY) -> PeriodMatrix:
    """Find tau' in H_1 whose gradient frame is proportional to ``frame``.

    Multi-start grid search followed by least squares on the phase-aligned
    difference of unit vectors.  Raises AmbiguousReconstruction when no start
    converges to a chordal distance below 1e-9.
    """
    n = frame.level
    target = _unit(frame.matrix[0])
    res = np.linspace(-1.0, 1.0, 41)
    ims = np.geomspace(0.25, 4.0, 24)
    cand = (res[:, None] + 1j * ims[None, :]).ravel()
    rows = _unit(_g1_gradient_rows(cand, n))
    ips = rows.conj() @ target
    dists = np.sqrt(np.maximum(0.0, 2.0 - 2.0 * np.abs(ips)))

    def resid(p):
        row = _unit(_g1_gradient_rows(np.array([p[0] + 1j * p[1]]), n)[0])
        ip = np.vdot(row, target)
        diff = target - (ip / abs(ip)) * row
        return np.concatenate([diff.real, diff.imag])

    best = None
    for k in np.argsort(dists)[:8]:
        t0 = cand[k]
        sol = least_squares(resid, [t0.real, t0.imag], bounds=([-np.inf, 0.05], [np.inf, np.inf]),
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        t = sol.x[0] + 1j * sol.x[1]
        tau1 = PeriodMatrix([[t]], allow_degenerate=True)
        d = chordal_distance(phi_map(tau1, n, policy).matrix[0], frame.matrix[0])
        if best is None or d < best[0]:
            best = (d, tau1)
        if d < 1e-11:
            break
    if best is None or best[0] > 1e-9:
        raise AmbiguousReconstruction(
            f"genus-one frame: no period matches the frame (best distance {best[0] if best else 'n/a'})"
        )
    return best[1]


def reconstruct_constants_detailed(
    frame: GradientFrame,
    gamma: RationalVector,
    delta: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    *,
    max_triples: int = 20000,
    seed: int = 0,
) -> Reconstruction:
    if n != frame.level:
        raise ValueError(f"frame has level {frame.level}, asked for {n}")
    if not (gamma.is_half_integral() and delta.is_half_integral()):
        raise ValueError("gamma and delta must be half-integral")
    g = frame.genus
    system, chars = cyclic_system(frame, gamma, delta, n, max_triples, seed)
    s, basis, dim = _kernel(system)

    if g >= 2:
        gap_ok = s[-2] > KERNEL_GAP * s[-1]
        if dim != 1 or not gap_ok:
            raise AmbiguousReconstruction(
                f"cyclic system kernel has dimension {dim} (smallest singular values {s[-2]:.3g}, {s[-1]:.3g})"
            )
        return Reconstruction(ProjectivePoint.from_vector(basis[:, -1], chars), s, dim, "cyclic-kernel")

    # g = 1: the scalar relations are also solved by the second derivatives,
    # so the kernel is the tangent line span(x, x'') of the theta-constant
    # curve.  Pick the point of tangency by locating a period that reproduces
    # the frame, and project its constants onto the kernel.
    tau1 = recover_period_genus_one(frame, policy)
    table = JetTable(tau1, policy)
    direct = np.array([table.value(2 * n, c, gamma) for c in chars])
    k = basis[:, -max(dim, 1):]
    proj = k @ (k.conj().T @ direct)
    off = np.linalg.norm(direct - proj) / np.linalg.norm(direct)
    if off > 1e-6:
        raise AmbiguousReconstruction(f"genus-one candidate lies off the cyclic kernel (relative {off:.3g})")
    return Reconstruction(ProjectivePoint.from_vector(proj, chars), s, dim, "genus-one-tangency", tau1)


def reconstruct_constants(
    frame: GradientFrame,
    gamma: RationalVector,
    delta: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> ProjectivePoint:
    """Recover {theta[a + delta/2n, gamma](2n tau)}_a projectively from the frame alone."""
    return reconstruct_constants_detailed(frame, gamma, delta, n, policy).point


def direct_constants(tau: PeriodMatrix, gamma, delta, n, policy=DEFAULT_POLICY) -> ProjectivePoint:
    table = JetTable(tau, policy)
    chars = shifted_chars(n, delta)
    return ProjectivePoint.from_vector([table.value(2 * n, c, gamma) for c in chars], chars)


# -- products --------------------------------------------------------------------


def check_product_admissible(a: RationalVector, b: RationalVector, delta: RationalVector, n: int) -> None:
    if not (a.in_lattice(2 * n) and b.in_lattice(2 * n)):
        raise AdmissibilityError(f"a={a}, b={b} must lie in ((1/{2 * n})Z)^g")
    if not (a + b - delta / n).in_lattice(n):
        raise AdmissibilityError(f"a + b - delta/n = {a + b - delta / n} not in ((1/{n})Z)^g")


def admissible_product_pairs(n: int, delta: RationalVector) -> list[tuple[RationalVector, RationalVector]]:
    pts = grid(2 * n, len(delta))
    return [(a, b) for a in pts for b in pts if (a + b - delta / n).in_lattice(n)]


def product_reconstruction(
    frame: GradientFrame,
    a: RationalVector,
    b: RationalVector,
    sigma: RationalVector,
    delta: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> ProjectivePoint:
    """{theta[a, gamma+sigma](n tau) theta[b, gamma](n tau)}_gamma from the frame.

    Uses the converse addition formula at levels (n, 2n) on constants
    reconstructed with lower characteristic sigma.
    """
    if n < 2:
        raise AdmissibilityError("product reconstruction needs n > 1")
    check_product_admissible(a, b, delta, n)
    x = reconstruct_constants(frame, sigma, delta, n, policy)
    lookup = {c.key(): v for c, v in zip(x.labels, x.coords)}
    g = frame.genus
    gammas = half_characteristics(g)
    prods = []
    for gamma in gammas:
        total = 0j
        for e in half_characteristics(g):
            total += cexp((a + b + 2 * e).dot(gamma)) * lookup[(e + (a + b) * HALF).key()] * lookup[
                (e + (a - b) * HALF).key()
            ]
        prods.append(total)
    return ProjectivePoint.from_vector(prods, gammas)


def direct_products(tau, a, b, sigma, n, policy=DEFAULT_POLICY) -> np.ndarray:
    table = JetTable(tau, policy)
    return np.array(
        [table.value(n, a, gm + sigma) * table.value(n, b, gm) for gm in half_characteristics(tau.genus)]
    )


@dataclass
class NonvanishingWitness:
    a: RationalVector
    b: RationalVector
    value: complex


def find_nonvanishing_pair(
    tau: PeriodMatrix,
    gamma: RationalVector,
    sigma: RationalVector,
    delta: RationalVector,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> NonvanishingWitness:
    """Admissible (a, b) maximizing |theta[a, gamma+sigma](n tau) theta[b, gamma](n tau)|."""
    table = JetTable(tau, policy)
    best = None
    for a, b in admissible_product_pairs(n, delta):
        v = table.value(n, a, gamma + sigma) * table.value(n, b, gamma)
        if best is None or abs(v) > abs(best.value):
            best = NonvanishingWitness(a, b, v)
    if best is None or abs(best.value) <= ZERO_FLOOR:
        raise DegenerateProjectivePoint(f"no admissible pair with nonvanishing product for gamma={gamma}")
    return best


# -- separation ------------------------------------------------------------------


@dataclass
class SeparationResult:
    distance: float
    constants_distance: float | None
    details: dict


def separation_probe(
    tau1: PeriodMatrix,
    tau2: PeriodMatrix,
    n: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    *,
    with_constants: bool = True,
) -> SeparationResult:
    """Chordal distance between the Pluecker images of two gradient frames,
    plus the distance between constants reconstructed from each frame."""
    f1, f2 = phi_map(tau1, n, policy), phi_map(tau2, n, policy)
    p1, p2 = pluecker(f1), pluecker(f2)
    dist = p1.point.distance(p2.point)
    cdist = None
    if with_constants and n > 1:
        zero = RationalVector.zeros(tau1.genus)
        c1 = reconstruct_constants(f1, zero, zero, n, policy)
        c2 = reconstruct_constants(f2, zero, zero, n, policy)
        cdist = c1.distance(c2)
    return SeparationResult(
        dist,
        cdist,
        {"tau1": tau1.digest(), "tau2": tau2.digest(), "n": n, "pluecker_size": len(p1.point)},
    )
