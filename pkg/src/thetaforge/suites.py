"""Seeded verification suites and the aggregate run report.

Every sampled input is a pure function of (seed, suite name, genus, index),
so a configuration determines the report body byte for byte.  Timing and
version information live in a separate ``meta`` block.

Residual conventions: most reports compare two sides of an identity
(pass iff residual < tolerance).  Checks whose natural statement is a lower
bound are recast so the same rule applies:

* ``rank``: residual is the condition number sigma_max / sigma_min;
* ``separation``: residual is 1 / chordal distance;
* ``product-witness``: residual is 1 / |theta theta|.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable

import numpy as np
import scipy

from . import __version__
from .characteristics import RationalVector, grid, half_characteristics
from .errors import (
    DegenerateProjectivePoint,
    DimensionShortfall,
    InsufficientData,
    ThetaForgeError,
)
from .identities import (
    admissible_pairs,
    build_C,
    rank_one_ratio,
    verify_AC,
    verify_ac_roundtrip,
    verify_addition_converse,
    verify_addition_forward,
    verify_cyclic,
    verify_doubling,
    verify_shift,
)
from .jacobi import (
    classical_consistency_residual,
    classical_jacobi_residual,
    estimate_constant,
    generalized_jacobi_residual,
    rhs_sum,
    d_operator_quotient,
    verify_tau_derivatives,
)
from .moduli import (
    admissible_product_pairs,
    direct_constants,
    direct_products,
    find_nonvanishing_pair,
    phi_map,
    product_reconstruction,
    rank_check,
    reconstruct_constants,
    separation_probe,
)
from .reports import DEFAULT_TOL, IdentityReport, jsonable
from .sampling import default_seed, rng_for, sample_char, sample_point, sample_tau
from .theta import JetTable, TruncationPolicy

SUITES = (
    "shift",
    "doubling",
    "addition-forward",
    "addition-converse",
    "ac-theorem",
    "cyclic",
    "rank",
    "reconstruction",
    "product-reconstruction",
    "separation",
    "jacobi-classical",
    "jacobi-generalized",
    "heat-consistency",
)

DEFAULT_SAMPLES = {
    "shift": 64,
    "doubling": 64,
    "addition-forward": 64,
    "addition-converse": 64,
    "ac-theorem": 64,
    "cyclic": 64,
    "rank": 4,
    "reconstruction": 10,
    "product-reconstruction": 10,
    "separation": 20,
    "jacobi-classical": 100,
    "jacobi-generalized": 20,
    "heat-consistency": 16,
}

HELD_OUT = 10
PROJECTIVE_TOL = 1e-6
CONSTANCY_TOL = 1e-6
RANK_COND_TOL = 1e8
SEPARATION_TOL = 1e6
IDENTICAL_TOL = 1e-12
WITNESS_TOL = 1e12
DERIV_TOL = 1e-9
CLASSICAL_TOL = 1e-9
STABILITY_TOL = 1e-10
FAILED = float(np.finfo(float).max)  # residual of a computation that raised


class UnknownSuite(ThetaForgeError, ValueError):
    pass


@dataclass
class RunConfig:
    genus: list[int] = field(default_factory=lambda: [1, 2])
    levels: list[int] = field(default_factory=lambda: [1, 2])
    suites: list[str] = field(default_factory=list)
    samples: dict = field(default_factory=dict)
    seed: int = field(default_factory=default_seed)
    tol: float | None = None
    tail_bound: float = 1e-13
    max_radius: int = 60
    allow_degraded: bool = False
    all_suites: bool = False

    def __post_init__(self):
        if not self.genus or any(int(g) < 1 for g in self.genus):
            raise ValueError("genus values must be >= 1")
        if not self.levels or any(int(n) < 1 for n in self.levels):
            raise ValueError("levels must be >= 1")
        self.genus = [int(g) for g in self.genus]
        self.levels = [int(n) for n in self.levels]
        self.seed = int(self.seed)
        if not self.suites:
            raise UnknownSuite("no suites selected")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise UnknownSuite(f"unknown suite(s): {', '.join(bad)}; known: {', '.join(SUITES)}")
        bad = [s for s in self.samples if s not in SUITES]
        if bad:
            raise UnknownSuite(f"sample counts given for unknown suite(s): {', '.join(bad)}")
        TruncationPolicy(self.tail_bound, self.max_radius)  # validates

    @property
    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(tail_target=self.tail_bound, max_radius=self.max_radius)

    def count(self, suite: str) -> int:
        return int(self.samples.get(suite, DEFAULT_SAMPLES[suite]))

    def identity_tol(self) -> float:
        return DEFAULT_TOL if self.tol is None else float(self.tol)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        return cls(**d)


@dataclass
class SuiteSection:
    name: str
    reports: list[IdentityReport]
    skipped: list[str] = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.reports), default=0.0)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "reports": [r.to_dict() for r in self.reports],
            "max_residual": self.max_residual,
            "skipped": list(self.skipped),
            "notes": jsonable(self.notes),
            "pass": self.passed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> SuiteSection:
        return cls(d["name"], [IdentityReport.from_dict(r) for r in d["reports"]], list(d.get("skipped", [])),
                   d.get("notes", {}))


@dataclass
class SuiteReport:
    config: RunConfig
    suites: list[SuiteSection]
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.suites) and all(s.passed for s in self.suites)

    @property
    def max_residual(self) -> float:
        return max((s.max_residual for s in self.suites), default=0.0)

    def body(self) -> dict:
        return {
            "config": jsonable(self.config.to_dict()),
            "suites": [s.to_dict() for s in self.suites],
            "max_residual": self.max_residual,
            "pass": self.passed,
        }

    def body_json(self) -> str:
        return json.dumps(self.body(), sort_keys=True, indent=2, allow_nan=False)

    def to_json(self) -> str:
        d = self.body()
        d["meta"] = self.meta
        return json.dumps(d, sort_keys=True, indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> SuiteReport:
        d = json.loads(text)
        return cls(RunConfig.from_dict(d["config"]), [SuiteSection.from_dict(s) for s in d["suites"]],
                   d.get("meta", {}))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "identity", "genus", "level", "seed", "residual", "scale", "tolerance",
                    "degraded", "pass", "inputs"])
        for s in self.suites:
            for r in s.reports:
                d = r.to_dict()
                w.writerow([s.name, d["identity"], d["genus"], d["level"], d["seed"], repr(d["residual"]),
                            repr(d["scale"]), repr(d["tolerance"]), d["degraded"], d["pass"],
                            json.dumps(d["inputs"], sort_keys=True)])
        return buf.getvalue()


# -- helpers ------------------------------------------------------------------------


def _report(identity, genus, level, residual, tol, inputs, *, seed=None, scale=1.0, degraded=False):
    return IdentityReport(identity, genus, level, float(residual), float(scale), tol, seed, dict(inputs), degraded)


def _failure(identity, genus, level, tol, inputs, err, seed=None):
    inputs = dict(inputs)
    inputs["error"] = f"{type(err).__name__}: {err}"
    r = _report(identity, genus, level, FAILED, tol, inputs, seed=seed)
    r.passed = False
    return r


def _stream(cfg: RunConfig, suite: str, g: int, n: int, i: int):
    return rng_for(cfg.seed, suite, g, 100000 * n + i)


def _tau(cfg: RunConfig, g: int, i: int):
    return sample_tau(g, cfg.seed, i)


def _ge2(levels: Iterable[int]) -> list[int]:
    return [n for n in levels if n >= 2]


def _stability(r1: IdentityReport, r2: IdentityReport, label: str) -> IdentityReport:
    """Compare residuals computed at the chosen radius and at twice the radius."""
    return _report(
        f"{label}-radius-stability", r1.genus, r1.level, abs(r1.residual - r2.residual), STABILITY_TOL,
        {"base": r1.residual, "doubled": r2.residual, **r1.inputs}, seed=r1.seed,
        degraded=r1.degraded or r2.degraded,
    )


# -- the suites ---------------------------------------------------------------------


def _sampled_identity(cfg, suite, make) -> SuiteSection:
    """Generic loop for the pointwise identities: ``make(cfg, g, n, i, policy)``
    returns one IdentityReport; each sample is repeated at twice the radius."""
    reports = []
    for g in cfg.genus:
        for n in cfg.levels:
            for i in range(cfg.count(suite)):
                r1 = make(cfg, g, n, i, cfg.policy)
                r2 = make(cfg, g, n, i, cfg.policy.doubled())
                r1.seed = r2.seed = cfg.seed
                if r1.level is None:
                    r1.level = r2.level = n
                reports += [r1, _stability(r1, r2, suite)]
    return SuiteSection(suite, reports)


def _shift(cfg, g, n, i, policy):
    rng = _stream(cfg, "shift", g, n, i)
    z = sample_point(rng, g)
    a, b, c, d = (sample_char(rng, g, 2 * n) for _ in range(4))
    return verify_shift(_tau(cfg, g, i), z, a, b, c, d, policy, cfg.identity_tol())


def _doubling(cfg, g, n, i, policy):
    rng = _stream(cfg, "doubling", g, n, i)
    z = sample_point(rng, g)
    a, beta = sample_char(rng, g, 2 * n), sample_char(rng, g, 2)
    return verify_doubling(_tau(cfg, g, i), z, a, beta, policy, cfg.identity_tol())


def _forward(cfg, g, n, i, policy):
    rng = _stream(cfg, "addition-forward", g, n, i)
    z, w = sample_point(rng, g, 0.25), sample_point(rng, g, 0.25)
    a, b, eps = sample_char(rng, g, 4 * n), sample_char(rng, g, 4 * n), sample_char(rng, g, 2)
    return verify_addition_forward(_tau(cfg, g, i), z, w, a, b, eps, n, policy, cfg.identity_tol())


def _converse(cfg, g, n, i, policy):
    rng = _stream(cfg, "addition-converse", g, n, i)
    z, w = sample_point(rng, g, 0.25), sample_point(rng, g, 0.25)
    a, b = sample_char(rng, g, 2 * n), sample_char(rng, g, 2 * n)
    gamma, sigma = sample_char(rng, g, 2), sample_char(rng, g, 2)
    return verify_addition_converse(_tau(cfg, g, i), z, w, a, b, gamma, sigma, n, policy, cfg.identity_tol())


def suite_ac_theorem(cfg: RunConfig) -> SuiteSection:
    """Genus one: every index tuple on a few tau.  Higher genus: seeded
    admissible tuples spread over several tau."""
    reports = []
    tol = cfg.identity_tol()
    policy = cfg.policy
    per_tau = 16
    for g in cfg.genus:
        for n in cfg.levels:
            total = cfg.count("ac-theorem")
            if g == 1:
                for i in range(3):
                    tau = _tau(cfg, g, i)
                    reports += verify_AC(tau, n, policy, "a", tol=tol)
                    reports += verify_AC(tau, n, policy, "b", tol=tol)
                    for a, b in admissible_pairs(n, g):
                        for d in half_characteristics(g):
                            reports.append(verify_ac_roundtrip(tau, a, b, d, n, policy, tol))
                continue
            pts = grid(4 * n, g)
            pairs = admissible_pairs(n, g)
            halves = half_characteristics(g)
            for i in range(math.ceil(total / per_tau)):
                tau = _tau(cfg, g, i)
                rng = _stream(cfg, "ac-theorem", g, n, i)
                ia = [(pts[j], pts[k]) for j, k in rng.integers(0, len(pts), (per_tau, 2))]
                ib = [(*pairs[j], halves[k]) for j, k in
                      zip(rng.integers(0, len(pairs), per_tau), rng.integers(0, len(halves), per_tau))]
                reports += verify_AC(tau, n, policy, "a", indices=ia, tol=tol)
                reports += verify_AC(tau, n, policy, "b", indices=ib, tol=tol)
                for a, b, d in ib[:4]:
                    reports.append(verify_ac_roundtrip(tau, a, b, d, n, policy, tol))
    for r in reports:
        r.seed = cfg.seed
    return SuiteSection("ac-theorem", reports)


def suite_cyclic(cfg: RunConfig) -> SuiteSection:
    from .moduli import shifted_chars

    reports = []
    tol = cfg.identity_tol()
    for g in cfg.genus:
        for n in cfg.levels:
            halves = half_characteristics(g)
            if g == 1:
                for i in range(3):
                    tau = _tau(cfg, g, i)
                    for d in halves:
                        chars = shifted_chars(n, d)
                        for e in halves:
                            for a in chars:
                                for b in chars:
                                    for c in chars:
                                        reports.append(verify_cyclic(tau, a, b, c, e, n, cfg.policy, tol))
                continue
            for i in range(cfg.count("cyclic")):
                rng = _stream(cfg, "cyclic", g, n, i)
                d, e = halves[rng.integers(len(halves))], halves[rng.integers(len(halves))]
                chars = shifted_chars(n, d)
                a, b, c = (chars[k] for k in rng.integers(0, len(chars), 3))
                reports.append(verify_cyclic(_tau(cfg, g, i), a, b, c, e, n, cfg.policy, tol))
    for r in reports:
        r.seed = cfg.seed
    return SuiteSection("cyclic", reports)


def suite_rank(cfg: RunConfig) -> SuiteSection:
    """Full column rank for n >= 2.  At n = 1 the matrix may drop rank (even
    functions vanish at odd points); those ratios are recorded, not judged."""
    reports, skipped, notes = [], [], {}
    for g in cfg.genus:
        for n in cfg.levels:
            halves = half_characteristics(g)
            low = []
            for i in range(cfg.count("rank")):
                tau = _tau(cfg, g, i)
                for e in halves:
                    for d in halves:
                        inputs = {"tau": tau.digest(), "eps": e, "delta": d}
                        try:
                            rc = rank_check(tau, n, e, d, cfg.policy)
                        except DimensionShortfall as err:
                            skipped.append(f"g={g} n={n}: {err}")
                            break
                        if n < 2:
                            low.append(rc.ratio)
                            continue
                        cond = 1.0 / rc.ratio if rc.ratio > 0 else FAILED
                        inputs["ratio"] = rc.ratio
                        reports.append(_report("rank", g, n, cond, RANK_COND_TOL, inputs, seed=cfg.seed,
                                               scale=float(rc.singular_values[0])))
            if n < 2:
                skipped.append(f"g={g} n={n}: rank maximality is only claimed for n >= 2")
                notes[f"g={g},n={n},min_ratio"] = min(low, default=None)
    return SuiteSection("rank", reports, sorted(set(skipped)), notes)


def suite_reconstruction(cfg: RunConfig) -> SuiteSection:
    reports, skipped = [], [f"n={n}: needs n >= 2" for n in cfg.levels if n < 2]
    for g in cfg.genus:
        halves = half_characteristics(g)
        for n in _ge2(cfg.levels):
            for i in range(cfg.count("reconstruction")):
                tau = _tau(cfg, g, i)
                frame = phi_map(tau, n, cfg.policy)
                for gm in halves:
                    for d in halves:
                        inputs = {"tau": tau.digest(), "gamma": gm, "delta": d}
                        try:
                            got = reconstruct_constants(frame, gm, d, n, cfg.policy)
                            ref = direct_constants(tau, gm, d, n, cfg.policy)
                            reports.append(_report("reconstruction", g, n, got.distance(ref), PROJECTIVE_TOL,
                                                   inputs, seed=cfg.seed, degraded=frame.degraded))
                        except ThetaForgeError as err:
                            reports.append(_failure("reconstruction", g, n, PROJECTIVE_TOL, inputs, err, cfg.seed))
    return SuiteSection("reconstruction", reports, skipped)


def suite_products(cfg: RunConfig) -> SuiteSection:
    reports, skipped = [], [f"n={n}: needs n >= 2" for n in cfg.levels if n < 2]
    for g in cfg.genus:
        halves = half_characteristics(g)
        for n in _ge2(cfg.levels):
            for i in range(cfg.count("product-reconstruction")):
                tau = _tau(cfg, g, i)
                frame = phi_map(tau, n, cfg.policy)
                rng = _stream(cfg, "product-reconstruction", g, n, i)
                for d in halves:
                    pairs = admissible_product_pairs(n, d)
                    for s in halves:
                        witnesses = []
                        for gm in halves:
                            inputs = {"tau": tau.digest(), "gamma": gm, "sigma": s, "delta": d}
                            try:
                                w = find_nonvanishing_pair(tau, gm, s, d, n, cfg.policy)
                                witnesses.append(w)
                                inputs.update(a=w.a, b=w.b, value=w.value)
                                reports.append(_report("product-witness", g, n, 1.0 / abs(w.value), WITNESS_TOL,
                                                       inputs, seed=cfg.seed))
                            except DegenerateProjectivePoint as err:
                                reports.append(_failure("product-witness", g, n, WITNESS_TOL, inputs, err, cfg.seed))
                        chosen = [(witnesses[0].a, witnesses[0].b)] if witnesses else []
                        chosen.append(pairs[int(rng.integers(len(pairs)))])
                        for a, b in chosen:
                            inputs = {"tau": tau.digest(), "a": a, "b": b, "sigma": s, "delta": d}
                            ref = direct_products(tau, a, b, s, n, cfg.policy)
                            try:
                                got = product_reconstruction(frame, a, b, s, d, n, cfg.policy)
                                res = got.distance(ref)
                                reports.append(_report("product-reconstruction", g, n, res, PROJECTIVE_TOL, inputs,
                                                       seed=cfg.seed, degraded=frame.degraded))
                            except DegenerateProjectivePoint as err:
                                # legitimate only when the directly evaluated products vanish too
                                if np.abs(ref).max() < 1e-12:
                                    inputs["note"] = "products vanish identically"
                                    reports.append(_report("product-reconstruction", g, n, float(np.abs(ref).max()),
                                                           PROJECTIVE_TOL, inputs, seed=cfg.seed))
                                else:
                                    reports.append(_failure("product-reconstruction", g, n, PROJECTIVE_TOL,
                                                            inputs, err, cfg.seed))
                            except ThetaForgeError as err:
                                reports.append(_failure("product-reconstruction", g, n, PROJECTIVE_TOL, inputs,
                                                        err, cfg.seed))
    return SuiteSection("product-reconstruction", reports, skipped)


def suite_separation(cfg: RunConfig) -> SuiteSection:
    reports, skipped = [], [f"n={n}: needs n >= 2" for n in cfg.levels if n < 2]
    for g in cfg.genus:
        if g >= 3 and not cfg.all_suites:
            skipped.append(f"g={g}: excluded by default (cost); use --all")
            continue
        for n in _ge2(cfg.levels):
            for k in range(cfg.count("separation")):
                t1, t2 = _tau(cfg, g, 2 * k), _tau(cfg, g, 2 * k + 1)
                inputs = {"tau1": t1.digest(), "tau2": t2.digest()}
                try:
                    sp = separation_probe(t1, t2, n, cfg.policy)
                    inputs["constants_distance"] = sp.constants_distance
                    inputs["distance"] = sp.distance
                    res = 1.0 / sp.distance if sp.distance > 0 else FAILED
                    reports.append(_report("separation", g, n, res, SEPARATION_TOL, inputs, seed=cfg.seed))
                except ThetaForgeError as err:
                    reports.append(_failure("separation", g, n, SEPARATION_TOL, inputs, err, cfg.seed))
                same = separation_probe(t1, t1, n, cfg.policy, with_constants=False)
                reports.append(_report("separation-identical", g, n, same.distance, IDENTICAL_TOL,
                                       {"tau": t1.digest()}, seed=cfg.seed))
    return SuiteSection("separation", reports, skipped)


def suite_jacobi_classical(cfg: RunConfig) -> SuiteSection:
    reports, skipped, notes = [], [], {}
    if 1 not in cfg.genus:
        skipped.append("genus 1 not selected")
    else:
        for i in range(cfg.count("jacobi-classical")):
            r = classical_jacobi_residual(_tau(cfg, 1, i), cfg.policy, CLASSICAL_TOL)
            r.seed = cfg.seed
            reports.append(r)
        a, zero = RationalVector.parse("1/2"), RationalVector.zeros(1)
        taus = [_tau(cfg, 1, 1000 + i) for i in range(20 + HELD_OUT)]
        est = estimate_constant(taus[:20], a, zero, 1, cfg.policy)
        notes["constant"] = est.to_dict()
        for tau in taus[20:]:
            r = classical_consistency_residual(tau, est.value, cfg.policy, cfg.identity_tol())
            r.seed = cfg.seed
            reports.append(r)
    return SuiteSection("jacobi-classical", reports, skipped, notes)


def jacobi_tuples(cfg: RunConfig, g: int, n: int, limit: int = 12) -> list[tuple[RationalVector, RationalVector]]:
    """Nonzero a in ((1/2n)Z/Z)^g with half-integral delta; all of them in genus
    one, a seeded subset of ``limit`` otherwise."""
    tuples = [(a, d) for a in grid(2 * n, g) if any(a.entries) for d in half_characteristics(g)]
    if g == 1 or len(tuples) <= limit:
        return tuples
    rng = _stream(cfg, "jacobi-tuples", g, n, 0)
    pick = sorted(rng.choice(len(tuples), limit, replace=False).tolist())
    return [tuples[k] for k in pick]


def constants_table(cfg: RunConfig) -> list[dict]:
    """One constant estimate per (g, n, a, delta); identically vanishing tuples
    are listed with ``value: null``."""
    rows = []
    count = cfg.count("jacobi-generalized")
    for g in cfg.genus:
        taus = [_tau(cfg, g, 2000 + i) for i in range(count)]
        for n in cfg.levels:
            for a, d in jacobi_tuples(cfg, g, n):
                row = {"genus": g, "level": n, "a": a, "delta": d}
                try:
                    est = estimate_constant(taus, a, d, n, cfg.policy)
                    row.update(value=est.value, rel_std=est.rel_std, count=est.count)
                except InsufficientData as err:
                    row.update(value=None, rel_std=None, count=0, note=str(err))
                rows.append(jsonable(row))
    return rows


def suite_jacobi_generalized(cfg: RunConfig) -> SuiteSection:
    reports, notes = [], {"constants": []}
    tol = cfg.identity_tol()
    count = cfg.count("jacobi-generalized")
    for g in cfg.genus:
        taus = [_tau(cfg, g, 2000 + i) for i in range(count + HELD_OUT)]
        fit, held = taus[:count], taus[count:]
        for n in cfg.levels:
            zero = RationalVector.zeros(g)
            for a, d in jacobi_tuples(cfg, g, n):
                inputs = {"a": a, "delta": d}
                try:
                    est = estimate_constant(fit, a, d, n, cfg.policy)
                except InsufficientData:
                    # both sides must then vanish identically on every sample
                    worst = 0.0
                    for tau in fit:
                        table = JetTable(tau, cfg.policy)
                        lhs = d_operator_quotient(tau, a, d, n, cfg.policy, table=table).lhs
                        worst = max(worst, abs(lhs), abs(rhs_sum(tau, a, d, n, cfg.policy, table=table)))
                    reports.append(_report("jacobi-vanishing", g, n, worst, tol, inputs, seed=cfg.seed))
                    notes["constants"].append({"genus": g, "level": n, **inputs, "value": None})
                    continue
                notes["constants"].append({"genus": g, "level": n, **inputs, "value": est.value,
                                           "rel_std": est.rel_std})
                reports.append(_report("jacobi-constant", g, n, est.rel_std, CONSTANCY_TOL,
                                       {**inputs, "const": est.value, "count": est.count}, seed=cfg.seed))
                for tau in held:
                    r = generalized_jacobi_residual(tau, est.value, a, d, n, cfg.policy, tol)
                    r.seed = cfg.seed
                    reports.append(r)
            # rank-one premise for the Binet step: C^{cc} at 4n tau
            for tau in held:
                table = JetTable(tau, cfg.policy)
                for c in grid(4 * n, g):
                    grad = table.jet(4 * n, c, zero).gradient
                    if np.linalg.norm(grad) <= 1e-10:
                        continue
                    ratio = rank_one_ratio(build_C(tau, c, c, n, cfg.policy, table=table).entries)
                    reports.append(_report("binet-rank-one", g, n, ratio, cfg.identity_tol(),
                                           {"tau": tau.digest(), "c": c}, seed=cfg.seed))
    return SuiteSection("jacobi-generalized", reports, notes=notes)


def suite_heat(cfg: RunConfig) -> SuiteSection:
    reports = []
    for g in cfg.genus:
        for n in cfg.levels:
            for i in range(cfg.count("heat-consistency")):
                rng = _stream(cfg, "heat-consistency", g, n, i)
                tau = _tau(cfg, g, i)
                if i % 2:
                    tau = tau.scaled(n)
                z = sample_point(rng, g, 0.25) if i % 4 < 2 else None
                r = verify_tau_derivatives(tau, z, sample_char(rng, g, 2 * n), sample_char(rng, g, 2), cfg.policy,
                                           DERIV_TOL)
                r.level, r.seed = n, cfg.seed
                reports.append(r)
    return SuiteSection("heat-consistency", reports)


RUNNERS: dict[str, Callable[[RunConfig], SuiteSection]] = {
    "shift": lambda c: _sampled_identity(c, "shift", _shift),
    "doubling": lambda c: _sampled_identity(c, "doubling", _doubling),
    "addition-forward": lambda c: _sampled_identity(c, "addition-forward", _forward),
    "addition-converse": lambda c: _sampled_identity(c, "addition-converse", _converse),
    "ac-theorem": suite_ac_theorem,
    "cyclic": suite_cyclic,
    "rank": suite_rank,
    "reconstruction": suite_reconstruction,
    "product-reconstruction": suite_products,
    "separation": suite_separation,
    "jacobi-classical": suite_jacobi_classical,
    "jacobi-generalized": suite_jacobi_generalized,
    "heat-consistency": suite_heat,
}


def run_suite(cfg: RunConfig) -> SuiteReport:
    sections = []
    times = {}
    start = time.perf_counter()
    for name in cfg.suites:
        t0 = time.perf_counter()
        sec = RUNNERS[name](cfg)
        if not cfg.allow_degraded:
            for r in sec.reports:
                r.escalate_degraded()
        sec.wall_time = time.perf_counter() - t0
        times[name] = sec.wall_time
        sections.append(sec)
    meta = {
        "versions": {
            "thetaforge": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "wall_time": time.perf_counter() - start,
        "suite_wall_time": times,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    return SuiteReport(cfg, sections, meta)
