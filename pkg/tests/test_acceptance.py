"""End-to-end acceptance checks.

Each test exercises one headline guarantee of the package and prints a
single pass/fail summary line (run pytest with -s to see them).
"""
import json
import random
import time
from fractions import Fraction

from retislack import (brute_force, generate_random, make_curve,
                       oracle_min_period, parse_circuit, render_circuit,
                       run_pipeline, solve_mcf, ssp_oracle)
from retislack.cli import main
from retislack.power import scale_powers, shift_slacks
from retislack.retime import min_period
from retislack.transform import DualEdge, DualGraph, expand

from conftest import CURVE3_PAIRS, CURVE4_PAIRS, RING3_TEXT, curves_for
from test_mcf import random_net
from lp_oracle import relaxed_optimum

CURVES_TEXT = json.dumps({"default": CURVE4_PAIRS})


def _report(num, name, ok, detail):
    verdict = "PASS" if ok else "FAIL"
    print(f"criterion {num} ({name}): {verdict} — {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


def test_criterion_1_soundness(tmp_path):
    curves_path = tmp_path / "curves.json"
    curves_path.write_text(CURVES_TEXT)
    cases = 200
    worst = 0.0
    failures = 0
    for i in range(cases):
        n = 5 + (i * 7) % 36  # 5..40
        c = generate_random(n, edge_density=1.8, ff_prob=0.4, seed=1000 + i)
        ckt = tmp_path / f"c{i}.ckt"
        ckt.write_text(render_circuit(c))
        t0 = time.perf_counter()
        code = main(["budget", str(ckt), str(curves_path), "--check"])
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        if code != 0 or dt >= 1.0:
            failures += 1
    _report(1, "soundness", failures == 0 and worst < 1.0,
            f"{cases - failures}/{cases} verified budgets, "
            f"worst case {worst:.2f} s")


_TINY_CACHE: list = []


def _tiny_suite():
    if _TINY_CACHE:
        return _TINY_CACHE
    out = _TINY_CACHE
    for i in range(50):
        n = 4 + i % 7  # 4..10
        c = generate_random(n, edge_density=1.8, ff_prob=0.4, seed=2000 + i)
        curves = curves_for(c, CURVE3_PAIRS)
        res = run_pipeline(c, curves, check=True)
        opt = brute_force(c, res.period, curves)
        assert opt is not None
        out.append((res, opt))
    return out


def test_criterion_2_power_gap():
    suite = _tiny_suite()
    sound = all(res.total_power >= opt.power for res, opt in suite)
    excess = [float((res.total_power - opt.power) / opt.power)
              for res, opt in suite]
    avg = sum(excess) / len(excess)
    _report(2, "power vs oracle", sound and avg <= 0.40,
            f"never below the optimum, average excess {avg * 100.0:.1f}% "
            f"(bound 40%)")


def test_criterion_3_slack_retention():
    suite = _tiny_suite()
    ours = sum(res.total_slack for res, _ in suite)
    theirs = sum(opt.total_slack for _, opt in suite)
    ratio = ours / theirs
    _report(3, "slack retention", ratio >= 0.55,
            f"kept {ratio * 100.0:.0f}% of the oracle's total slack "
            f"(bound 55%)")


def test_criterion_4_min_period_exact():
    ring3 = parse_circuit(RING3_TEXT)
    t_ring, _ = min_period(ring3)
    matches = int(t_ring == 5 and oracle_min_period(ring3) == 5)
    cases = 1
    for i in range(100):
        n = 3 + i % 6  # 3..8
        c = generate_random(n, edge_density=1.6, ff_prob=0.5, seed=3000 + i)
        t, _ = min_period(c)
        matches += int(t == oracle_min_period(c))
        cases += 1
    _report(4, "minimum period", matches == cases,
            f"{matches}/{cases} exact matches against exhaustive retiming")


def test_criterion_5_solver_equivalence():
    rng = random.Random(4000)
    matches = 0
    cases = 100
    for _ in range(cases):
        n = rng.randint(2, 30)
        net = random_net(n, rng.randint(1, 3 * n), rng, cost_range=1000)
        matches += int(solve_mcf(net).cost == ssp_oracle(net).cost)
    _report(5, "flow solver cross-check", matches == cases,
            f"{matches}/{cases} identical optimal costs")


def _expanded_cost_matches_direct_minimum(curve):
    """Check the parallel-arc encoding of one costed edge, integer by integer."""
    g = DualGraph(1, 1, 1,
                  (DualEdge(0, 1, "E2", curve.slacks[0], curve.slacks[-1],
                            curve, 0),))
    net = expand(g)
    D = net.scale
    arcs = sorted((a for a in net.arcs if a.origin[0] == 0),
                  key=lambda a: a.origin[1])
    s, p = curve.slacks, curve.powers
    saturation = sum(a.upper for a in arcs[:-1])
    for X in range(saturation + 5):
        rem = X
        cost = 0
        for a in arcs:  # already ordered cheapest first
            take = min(rem, a.upper)
            cost += take * a.cost
            rem -= take
        assert rem == 0
        h = min(p[q] + s[q] * Fraction(X, D) for q in range(len(s)))
        if cost != D * (p[-1] - h):
            return False
    return True


def test_criterion_6_expanded_edge_costs():
    base = make_curve(CURVE4_PAIRS)
    alt = make_curve([(0, 90), (7, 55), (15, 25), (26, 3)])
    checked = 0
    ok = True
    for cur in (base, alt):
        for kappa in (1, 2, 3):
            for shift in (0, 4, -6):
                edge_curve = shift_slacks(
                    scale_powers(cur, Fraction(1, kappa)), shift)
                ok = ok and _expanded_cost_matches_direct_minimum(edge_curve)
                checked += 1
    _report(6, "arc-expansion cost identity", ok,
            f"{checked} four-level curve variants, every integer flow "
            f"value bit-exact")


def test_criterion_7_relaxation_equivalence():
    shapes = [(3, CURVE4_PAIRS), (4, CURVE4_PAIRS), (5, CURVE3_PAIRS),
              (6, [(0, 100), (20, 35)])]
    matches = 0
    cases = 0
    for n, pairs in shapes:
        for i in range(5):
            c = generate_random(n, edge_density=1.5, ff_prob=0.5,
                                seed=5000 + 17 * n + i)
            curves = curves_for(c, pairs)
            # generous protocol period: every level fits every gate window
            T = max(c.delays[j] + curves[j].slacks[-1] for j in range(c.n))
            a = relaxed_optimum(c, T, curves, "bounded")
            b = relaxed_optimum(c, T, curves, "substituted")
            matches += int(a is not None and a == b)
            cases += 1
    _report(7, "period-bound elimination", matches == cases,
            f"{matches}/{cases} instances with bit-equal optima after "
            f"dropping the window bound for the flattened objective")


def test_criterion_8_scale(tmp_path):
    c = generate_random(650, edge_density=2.2, ff_prob=0.4, seed=42)
    assert 1300 <= len(c.edges) <= 1500
    ckt = tmp_path / "big.ckt"
    ckt.write_text(render_circuit(c))
    curves_path = tmp_path / "curves.json"
    curves_path.write_text(CURVES_TEXT)
    t0 = time.perf_counter()
    code = main(["budget", str(ckt), str(curves_path)])
    dt = time.perf_counter() - t0
    _report(8, "scale", code == 0 and dt < 10.0,
            f"650 gates / {len(c.edges)} edges budgeted in {dt:.2f} s "
            f"(bound 10 s)")
