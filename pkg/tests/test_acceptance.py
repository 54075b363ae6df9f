"""Acceptance criteria 1-10.

Each criterion prints one ``criterion N: PASS|FAIL  <detail>`` line.  Run
under pytest (``pytest tests/test_acceptance.py -v -s``) or standalone
(``python tests/test_acceptance.py``).
"""

import itertools
import sys
import time

import numpy as np
import pytest

from majorants.seqz import SeqZ, lp_norm, norm_2j_pow_direct
from majorants.solver import (
    SolverConfig,
    derive_target,
    enlarge_support,
    grad_norm,
    minimal_majorant,
    random_feasible,
    solve,
)
from majorants.verify import (
    check_hoelder,
    check_upper_majorant,
    exactness_gap,
    instance_rngs,
    is_sidon_bj,
    oracle_solve,
    random_instance,
    random_sequence,
    uniqueness_probe,
    verify_solution,
)

SEED = 0


def corpus(count, seed=SEED):
    return [random_instance(g) for g in instance_rngs(seed, count)]


def criterion_1():
    """500 random instances: all four conclusions within 1e-7, under 60 s."""
    t0 = time.perf_counter()
    failures, worst = 0, 0.0
    for a, j in corpus(500):
        p = derive_target(a, j)
        sol = solve(p)
        rep = verify_solution(p, sol, tol=1e-7)
        failures += (not rep.ok) or (not sol.converged)
        worst = max(worst, rep.norm_gap, -rep.majorization_margin, -rep.nonneg_margin,
                    rep.support_leak)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 60
    return ok, f"500 instances, {failures} failures, worst margin {worst:.1e}, {elapsed:.1f} s"


def _oracle_pairs():
    """Single-point inputs (the only way to get |S| <= 3 for j = 2, 3),
    then two-point inputs with |S| = 4 for j = 2."""
    rng = np.random.default_rng(SEED)
    for _ in range(50):
        v = complex(*rng.normal(size=2))
        yield SeqZ.delta(int(rng.integers(-5, 6)), v), int(rng.choice([2, 3]))
    for _ in range(50):
        gap = int(rng.integers(1, 5))
        a = SeqZ.from_mapping({0: complex(*rng.normal(size=2)), gap: complex(*rng.normal(size=2))})
        yield a, 2


def criterion_2():
    """Solver matches the brute-force oracle within 1e-6, under 30 s."""
    t0 = time.perf_counter()
    worst, small, sizes = 0.0, 0, set()
    for a, j in _oracle_pairs():
        p = derive_target(a, j)
        sizes.add(len(p.S))
        small += len(p.S) <= 3
        worst = max(worst, oracle_solve(p).max_diff(solve(p).b))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and small == 50 and elapsed < 30
    return ok, (f"{small} instances with |S| <= 3 plus 50 with |S| = 4 (sizes {sorted(sizes)}), "
                f"max diff {worst:.1e}, {elapsed:.1f} s")


def criterion_3():
    """j = 1: b = |a| and r = 1 within 1e-12."""
    worst_b, worst_r = 0.0, 0.0
    for g in instance_rngs(SEED + 1, 100):
        a = random_sequence(g)
        sol = solve(derive_target(a, 1))
        worst_b = max(worst_b, sol.b.max_diff(a.abs()) / a.max_abs())
        worst_r = max(worst_r, abs(sol.r - 1))
    ok = worst_b <= 1e-12 and worst_r <= 1e-12
    return ok, f"100 instances, max |b - |a||/max|a| {worst_b:.1e}, max |r - 1| {worst_r:.1e}"


def criterion_4():
    """Sidon B_2 supports in {0..12} of size <= 4: b = |a|, r = 1 within 1e-7."""
    rng = np.random.default_rng(SEED)
    count, worst_b, worst_r = 0, 0.0, 0.0
    for size in range(1, 5):
        for S in itertools.combinations(range(13), size):
            if not is_sidon_bj(S, 2):
                continue
            count += 1
            phases = rng.choice([1, -1, 1j, -1j], size) if rng.random() < 0.5 else \
                np.exp(2j * np.pi * rng.random(size))
            vals = phases * rng.uniform(0.5, 2.0, size)
            a = SeqZ.on_indices(S, vals)
            sol = solve(derive_target(a, 2))
            worst_b = max(worst_b, sol.b.max_diff(a.abs()) / a.max_abs())
            worst_r = max(worst_r, sol.r - 1)
    ok = worst_b <= 1e-7 and worst_r <= 1e-7
    return ok, f"{count} Sidon supports, max |b - |a||/max|a| {worst_b:.1e}, max r - 1 {worst_r:.1e}"


def criterion_5():
    """(1, i, 1), j = 2: gap 8 exactly, r > 1, F^/r majorizes with norm ratio r."""
    a = SeqZ(0, np.array([1, 1j, 1]))
    n_abs, n_a = norm_2j_pow_direct(a.abs(), 2), norm_2j_pow_direct(a, 2)
    gap = exactness_gap(a, 2)
    p = derive_target(a, 2)
    sol = solve(p)
    Fmin = minimal_majorant(sol)
    ratio = lp_norm(sol.Fhat, p.p) / lp_norm(Fmin, p.p)
    shortfall = max(abs(p.c[n]) - Fmin[n].real for n in set(p.c.indices()) | set(Fmin.indices()))
    ok = (n_abs == 19 and n_a == 11 and gap == 8 and sol.converged and sol.r > 1
          and ratio > 1 and abs(ratio - sol.r) <= 1e-12 * sol.r and shortfall <= 1e-8)
    return ok, (f"N(|a|) = {n_abs:g}, N(a) = {n_a:g}, gap = {gap:g}, r = {sol.r:.12f}, "
                f"norm ratio {ratio:.12f}, max (|c| - F^/r) {shortfall:.1e}")


def criterion_6():
    """grad_norm against central differences (step 1e-5), relative error <= 1e-6."""
    rng = np.random.default_rng(SEED)
    step, worst = 1e-5, 0.0
    for _ in range(100):
        j = int(rng.choice([2, 3]))
        b = SeqZ(int(rng.integers(-3, 4)), rng.uniform(0.05, 2.0, int(rng.integers(1, 9))))
        g = grad_norm(b, j)
        exact = np.array([g[n].real for n in b.indices()])
        fd = np.array([
            (norm_2j_pow_direct(b + SeqZ.delta(n, step), j)
             - norm_2j_pow_direct(b - SeqZ.delta(n, step), j)) / (2 * step)
            for n in b.indices()])
        worst = max(worst, np.abs(fd - exact).max() / np.abs(exact).max())
    return worst <= 1e-6, f"100 points, max relative error {worst:.1e}"


def criterion_7():
    """Hoelder and upper-majorant margins >= -1e-10 * scale on 1000 pairs each."""
    worst_h, worst_u = np.inf, np.inf
    for g in instance_rngs(SEED + 7, 1000):
        a, j = random_instance(g)
        k = random_sequence(g)
        rhs = (norm_2j_pow_direct(k, j) ** (1 / (2 * j))
               * norm_2j_pow_direct(a, j) ** ((2 * j - 1) / (2 * j)))
        worst_h = min(worst_h, check_hoelder(a, k, j) / rhs)
        d = random_sequence(g)
        extra = g.exponential(0.5, d.width) * (g.random(d.width) < 0.5)
        b = d.abs() + SeqZ(d.start, extra)
        worst_u = min(worst_u, check_upper_majorant(b, d, j) / norm_2j_pow_direct(b, j))
    ok = worst_h >= -1e-10 and worst_u >= -1e-10
    return ok, f"1000 pairs each, min Hoelder margin {worst_h:.1e}, min upper margin {worst_u:.1e}"


def criterion_8():
    """Scaling by 3 and modulation by 0.7 leave b/t and b unchanged within 1e-9."""
    worst_s, worst_m = 0.0, 0.0
    for a, j in corpus(50, SEED + 8):
        ref = solve(derive_target(a, j)).b
        scaled = solve(derive_target(a * 3.0, j)).b / 3.0
        modulated = solve(derive_target(a.modulate(0.7), j)).b
        worst_s = max(worst_s, scaled.max_diff(ref) / ref.max_abs())
        worst_m = max(worst_m, modulated.max_diff(ref) / ref.max_abs())
    ok = worst_s <= 1e-9 and worst_m <= 1e-9
    return ok, f"50 instances, scaling error {worst_s:.1e}, modulation error {worst_m:.1e}"


def criterion_9():
    """5 restarts on the criterion 1 suite: pairwise distance <= 1e-5 max(b)."""
    cfg = SolverConfig(restarts=5, seed=SEED)
    worst, failures = 0.0, 0
    for a, j in corpus(500):
        p = derive_target(a, j)
        dist, bad = uniqueness_probe(p, cfg)
        failures += bad
        worst = max(worst, dist / solve(p).b.max_abs())
    ok = worst <= 1e-5 and failures == 0
    return ok, f"500 instances x 5 restarts, {failures} non-convergent, max distance {worst:.1e} of max(b)"


def criterion_10():
    """Solves on windows enlarged by 3 leak <= 1e-8 max(b) outside supp(c)."""
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for a, j in corpus(50, SEED + 10):
        p = derive_target(a, j)
        big = enlarge_support(p, 3)
        sol = solve(big, init=random_feasible(big, rng))
        inside = set(p.S)
        leak = max(abs(sol.b[n]) for n in big.S if n not in inside)
        worst = max(worst, leak / sol.b.max_abs())
    return worst <= 1e-8, f"50 instances, max leak {worst:.1e} of max(b)"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 11)}


def report(n):
    ok, detail = CRITERIA[n]()
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    return ok, line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, line = report(n)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = []
    for n in sorted(CRITERIA):
        ok, line = report(n)
        print(line, flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
