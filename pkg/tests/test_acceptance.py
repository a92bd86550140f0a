"""Acceptance criteria 1-12, each at its stated tolerance and sampling plan.

Every test records a one-line verdict (printed at the end of the pytest run,
or directly when this file is executed as a script).
"""

import functools
import itertools
import math
import time

import numpy as np

from acceptance_log import record
from thetaforge import RationalVector, theta_jet
from thetaforge.jacobi import classical_jacobi_residual, d_operator_quotient, rhs_sum
from thetaforge.sampling import sample_tau
from thetaforge.suites import HELD_OUT, RunConfig, jacobi_tuples, run_suite

SEED = 7


@functools.lru_cache(maxsize=None)
def suite(name, genus=(1, 2), levels=(2,), samples=None):
    cfg = RunConfig(genus=list(genus), levels=list(levels), suites=[name],
                    samples={name: samples} if samples else {}, seed=SEED)
    t0 = time.perf_counter()
    rep = run_suite(cfg)
    elapsed = time.perf_counter() - t0
    return rep.suites[0], elapsed, cfg


def worst(reports, identity=None):
    rs = [r.residual for r in reports if identity is None or r.identity == identity]
    return max(rs) if rs else float("nan")


def by(reports, identity):
    return [r for r in reports if r.identity == identity]


def _strict_classical(tau):
    h, z = RationalVector.parse("1/2"), RationalVector.zeros(1)
    lhs = theta_jet(tau, None, h, h).gradient[0]
    rhs = -math.pi * np.prod([theta_jet(tau, None, e, d).value for e, d in ((z, z), (h, z), (z, h))])
    return abs(lhs - rhs) / abs(rhs)


def test_c01_classical_jacobi():
    sec, elapsed, _ = suite("jacobi-classical", (1,), (1,), 100)
    base = by(sec.reports, "jacobi-classical")
    strict = max(_strict_classical(sample_tau(1, SEED, i)) for i in range(100))
    ok = len(base) == 100 and worst(base) < 1e-9 and strict < 1e-9 and elapsed < 300
    record(1, "classical Jacobi derivative formula, 100 tau, g=1", ok,
           f"max residual {worst(base):.1e}, strict relative {strict:.1e} (< 1e-9)")
    assert ok


def test_c02_shift_doubling_addition():
    lines, ok = [], True
    for name in ("shift", "doubling", "addition-forward", "addition-converse"):
        sec, elapsed, _ = suite(name, (1, 2), (1, 2), 64)
        base = by(sec.reports, name)
        stab = by(sec.reports, f"{name}-radius-stability")
        counts = {(g, n): sum(1 for r in base if r.genus == g and r.level == n) for g in (1, 2) for n in (1, 2)}
        good = (
            min(counts.values()) >= 64
            and all(r.residual < 1e-8 and r.passed for r in base)
            and all(r.residual < 1e-10 and r.passed for r in stab)
            and elapsed < 300
        )
        ok &= good
        lines.append(f"{name} max {worst(base):.1e}, radius drift {worst(stab):.1e}")
    record(2, "shift / doubling / addition formulas, g,n in {1,2}, 64 tuples each", ok, "; ".join(lines))
    assert ok


def test_c03_ac_theorem():
    sec, elapsed, _ = suite("ac-theorem")
    a, b, rt = by(sec.reports, "ac-theorem-a"), by(sec.reports, "ac-theorem-b"), by(sec.reports, "ac-roundtrip")
    g1a = [r for r in a if r.genus == 1]
    g2a, g2b = [r for r in a if r.genus == 2], [r for r in b if r.genus == 2]
    ok = (
        len(g1a) >= 64  # all (1/8)^2 index pairs per tau
        and len(g2a) >= 64 and len(g2b) >= 64
        and all(r.residual < 1e-8 for r in a + b + rt)
        and len(rt) > 0 and elapsed < 300
    )
    record(3, "C <-> A correspondence both ways and round trip, n=2", ok,
           f"(a) max {worst(a):.1e}, (b) max {worst(b):.1e}, round trip {worst(rt):.1e}; "
           f"g=2 tuples {len(g2a)}+{len(g2b)}")
    assert ok


def test_c04_cyclic():
    sec, elapsed, _ = suite("cyclic")
    g2 = [r for r in sec.reports if r.genus == 2]
    ok = len(g2) >= 64 and all(r.residual < 1e-8 for r in sec.reports) and elapsed < 300
    record(4, "cyclic relation of A-matrices, n=2", ok, f"{len(sec.reports)} tuples, max {worst(sec.reports):.1e}")
    assert ok


def test_c05_rank():
    sec, elapsed, _ = suite("rank")
    ratios = [r.inputs["ratio"] for r in sec.reports]
    expected = sum(4**g for g in (1, 2)) * 4  # all (eps, delta) pairs, 4 tau per genus
    ok = len(ratios) == expected and min(ratios) > 1e-8 and elapsed < 300
    record(5, "rank maximality, n=2, every half-integral (eps, delta)", ok,
           f"{len(ratios)} matrices, min sigma_min/sigma_max {min(ratios):.3f} (> 1e-8)")
    assert ok


def test_c06_reconstruction():
    sec, elapsed, _ = suite("reconstruction")
    taus = {(r.genus, r.inputs["tau"]) for r in sec.reports}
    ok = (
        all(sum(1 for g, _ in taus if g == gg) >= 10 for gg in (1, 2))
        and all(r.residual < 1e-6 and r.passed for r in sec.reports)
        and elapsed < 300
    )
    record(6, "theta constants recovered from the gradient frame, n=2", ok,
           f"{len(sec.reports)} reconstructions, max chordal {worst(sec.reports):.1e} (< 1e-6), {elapsed:.0f}s")
    assert ok


def test_c07_products_and_witness():
    sec, elapsed, _ = suite("product-reconstruction")
    prods = by(sec.reports, "product-reconstruction")
    wit = by(sec.reports, "product-witness")
    per_tau = {(r.genus, r.inputs["tau"]) for r in wit}
    # every (gamma, sigma, delta) has a witness on every tau
    expected = sum(8**g * 10 for g in (1, 2))
    ok = (
        len(per_tau) >= 20 and len(wit) == expected and all(r.passed for r in wit)
        and all(r.residual < 1e-6 and r.passed for r in prods) and elapsed < 300
    )
    smallest = min(1 / r.residual for r in wit)
    record(7, "products recovered from the frame; nonvanishing pair always found, n=2", ok,
           f"{len(prods)} products, max chordal {worst(prods):.1e}; {len(wit)} witnesses, "
           f"smallest |product| {smallest:.2e}; {elapsed:.0f}s")
    assert ok


def test_c08_separation():
    sec, elapsed, _ = suite("separation", samples=20)
    dist = by(sec.reports, "separation")
    same = by(sec.reports, "separation-identical")
    dmin = min(r.inputs["distance"] for r in dist)
    ok = (
        all(sum(1 for r in dist if r.genus == g) == 20 for g in (1, 2))
        and all(r.passed for r in dist) and dmin > 1e-6
        and all(r.residual < 1e-12 for r in same) and elapsed < 300
    )
    record(8, "separation probe, 20 distinct pairs per genus, n=2", ok,
           f"min Pluecker distance {dmin:.3f} (> 1e-6), identical max {worst(same):.1e} (< 1e-12)")
    assert ok


def _strict_held_out(cfg, notes):
    """|c L - R| / |R| on the held-out tau, without the max(1, .) floor."""
    out = 0.0
    count = cfg.count("jacobi-generalized")
    for row in notes["constants"]:
        if row["value"] is None:
            continue
        g, n = row["genus"], row["level"]
        a, d = RationalVector(row["a"]), RationalVector(row["delta"])
        c = complex(*row["value"]) if isinstance(row["value"], list) else complex(row["value"])
        for i in range(count, count + HELD_OUT):
            tau = sample_tau(g, SEED, 2000 + i)
            lhs = c * d_operator_quotient(tau, a, d, n).lhs
            rhs = rhs_sum(tau, a, d, n)
            out = max(out, abs(lhs - rhs) / abs(rhs))
    return out


def test_c09_generalized_jacobi():
    sec, elapsed, cfg = suite("jacobi-generalized", (1, 2), (1, 2))
    consts = by(sec.reports, "jacobi-constant")
    held = by(sec.reports, "jacobi-generalized")
    vanish = by(sec.reports, "jacobi-vanishing")
    strict = _strict_held_out(cfg, sec.notes)
    tested = {(g, n) for g in (1, 2) for n in (1, 2)}
    covered = {(r.genus, r.level) for r in consts}
    ok = (
        covered == tested
        and all(r.residual < 1e-6 for r in consts)
        and len(held) == HELD_OUT * len(consts)
        and all(r.residual < 1e-8 for r in held)
        and strict < 1e-8
        and all(r.passed for r in vanish)
        and elapsed < 300
    )
    record(9, "level-n Jacobi formula, g,n in {1,2}", ok,
           f"{len(consts)} tuples fitted, max rel. std {worst(consts):.1e} (< 1e-6); held-out max "
           f"{worst(held):.1e}, strict relative {strict:.1e} (< 1e-8); {len(vanish)} tuples vanish identically")
    assert ok


def test_c10_tau_derivatives():
    heat, elapsed, _ = suite("heat-consistency", (1, 2), (1, 2))
    # the generalized-Jacobi run raises on any heat/series disagreement above 1e-9
    jac, _, _ = suite("jacobi-generalized", (1, 2), (1, 2))
    cross = 0.0
    for g, n in itertools.product((1, 2), (1, 2)):
        a, d = jacobi_tuples(RunConfig(suites=["rank"], seed=SEED), g, n)[0]
        for i in range(5):
            cross = max(cross, d_operator_quotient(sample_tau(g, SEED, i), a, d, n).cross_residual)
    ok = all(r.residual < 1e-9 for r in heat.reports) and cross < 1e-9 and bool(jac.reports)
    record(10, "heat equation, series and finite-difference tau-derivatives agree", ok,
           f"{len(heat.reports)} jets, max three-way disagreement {worst(heat.reports):.1e}; "
           f"quotient cross-check {cross:.1e} (< 1e-9)")
    assert ok


def test_c11_rank_one():
    sec, _, _ = suite("jacobi-generalized", (1, 2), (1, 2))
    r1 = by(sec.reports, "binet-rank-one")
    g2 = [r for r in r1 if r.genus == 2]
    ok = bool(g2) and all(r.residual < 1e-8 for r in r1)
    record(11, "C^{aa} is rank one wherever the gradient is nonzero", ok,
           f"{len(r1)} matrices, max sigma_2/sigma_1 {worst(r1):.1e} (< 1e-8)")
    assert ok


def test_c12_determinism():
    cfg = dict(genus=[1, 2], levels=[1, 2], seed=SEED,
               suites=["shift", "ac-theorem", "rank", "jacobi-classical", "jacobi-generalized", "heat-consistency"],
               samples={"shift": 8, "ac-theorem": 16, "rank": 1, "jacobi-classical": 10, "jacobi-generalized": 12,
                        "heat-consistency": 4})
    a = run_suite(RunConfig(**cfg)).body_json()
    b = run_suite(RunConfig(**cfg)).body_json()
    ok = a == b
    record(12, "identical configuration gives byte-identical report body", ok, f"{len(a.encode())} bytes compared")
    assert ok


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except AssertionError:
                pass
