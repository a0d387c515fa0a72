"""Acceptance gate: ten numbered criteria, one verdict line each.

Each criterion prints a single ``[PASS]``/``[FAIL]`` line (uncaptured, so it
shows up in plain pytest output) and then asserts.  Criterion 4 is stated
against tabulated reference errors that were truncated to three significant
digits; the literal inequality is unachievable by arithmetic (the exact
greedy minimum in dimension one already exceeds the truncated printed value
by more than the allowed slack) and is kept as a strict expected failure,
with the substantive property — every tabulated component attains the exact
constrained greedy minimum — asserted separately.
"""

import time

import numpy as np
import pytest

import oracles
from hoplr.cbc import cbc_fast, cbc_naive
from hoplr.convolve import circ_convolve, make_plan
from hoplr.gfpoly import Modulus, find_irreducible, is_irreducible, poly_degree
from hoplr.pointgen import (
    digitalnet_points,
    interlace,
    lattice_matrices,
    lattice_points,
    read_matrix_file,
    write_matrix_file,
)
from hoplr.reference import REFERENCE_RULES, audit_construction, evaluate_errors, matches_three_digits
from hoplr.walsh_kernel import (
    DigitRational,
    omega_at_zero,
    omega_base2,
    omega_base2_array,
    omega_digits,
    omega_nonzero_digits,
    omega_series_oracle,
    series_tail_bound,
)
from hoplr.wce import WeightSequence, wce_bound, wce_dual_bruteforce, wce_product, prefix_wce_products

_CACHE: dict = {}


def report(capsys, ok: bool, label: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}")


def free_construction(key: str):
    """Unconstrained fast search at a reference rule's parameters, cached."""
    if key not in _CACHE:
        ref = REFERENCE_RULES[key]
        start = time.monotonic()
        rule = cbc_fast(ref.s, ref.m, ref.alpha, ref.modulus(), ref.weight_sequence())
        _CACHE[key] = (rule, time.monotonic() - start)
    return _CACHE[key]


@pytest.fixture(scope="module")
def sweep_rules():
    """Both drivers over b=2, alpha in {2,3}, m in 1..5, s=4 (prefixes cover s=1..4)."""
    if "sweep" not in _CACHE:
        start = time.monotonic()
        out = []
        for alpha in (2, 3):
            for m in range(1, 6):
                mod = find_irreducible(alpha * m, 2)
                w = WeightSequence.geometric(0.9, 4)
                naive = cbc_naive(4, m, alpha, mod, w)
                fast = cbc_fast(4, m, alpha, mod, w)
                out.append((alpha, m, naive, fast))
        _CACHE["sweep"] = (out, time.monotonic() - start)
    return _CACHE["sweep"]


def check_table_evaluation(capsys, keys, budget_seconds, criterion):
    start = time.monotonic()
    failures = []
    for key in keys:
        ref = REFERENCE_RULES[key]
        computed = evaluate_errors(ref)
        for d in range(ref.s):
            if not matches_three_digits(float(computed[d]), ref.errors_3sig[d]):
                failures.append((key, d + 1, float(computed[d]), ref.errors_3sig[d]))
    elapsed = time.monotonic() - start
    ok = not failures and elapsed < budget_seconds
    report(capsys, ok, f"{criterion} ({elapsed:.2f}s)")
    assert not failures, failures
    assert elapsed < budget_seconds


def test_c01_tabulated_rule_2a_evaluates_to_three_digits(capsys):
    check_table_evaluation(
        capsys,
        ["2a"],
        60.0,
        "criterion 1: order-2 m=10 tabulated vector reproduces all ten errors to 3 significant digits",
    )


def test_c02_tabulated_rule_2b_evaluates_to_three_digits(capsys):
    check_table_evaluation(
        capsys,
        ["2b"],
        60.0,
        "criterion 2: order-2 m=12 tabulated vector reproduces all ten errors to 3 significant digits",
    )


def test_c03_tabulated_order3_rules_evaluate_to_three_digits(capsys):
    check_table_evaluation(
        capsys,
        ["3a", "3b"],
        120.0,
        "criterion 3: order-3 m=7 and m=8 tabulated vectors reproduce their errors to 3 significant digits",
    )


def test_c04_search_reproduces_each_tabulated_step_exactly(capsys):
    """Replaying the search along each tabulated vector: every component is greedy-optimal."""
    problems = []
    for key, ref in REFERENCE_RULES.items():
        audit = audit_construction(ref)
        if not all(audit["attains_minimum"]):
            problems.append((key, "constrained scan minimum not attained", audit["attains_minimum"]))
        if not all(audit["matches_tabulated"]):
            problems.append((key, "recomputed errors disagree with tabulated digits", audit["matches_tabulated"]))
    rule_2a, build_seconds = free_construction("2a")
    if build_seconds >= 300.0:
        problems.append(("2a", f"unconstrained build took {build_seconds:.1f}s"))
    final_gap = rule_2a.errors[-1] / REFERENCE_RULES["2a"].errors_3sig[-1] - 1.0
    ok = not problems
    report(
        capsys,
        ok,
        "criterion 4: every tabulated component attains the exact constrained greedy minimum "
        f"in all four tables; m=10 build {build_seconds:.1f}s; "
        f"free search final error vs tabulated: {final_gap:+.2e} relative",
    )
    assert not problems, problems


@pytest.mark.xfail(
    strict=True,
    reason=(
        "tabulated errors are truncated to 3 significant digits: the exact greedy "
        "minimum e_1 = 2.144929e-6 already exceeds 2.14e-6 * (1 + 1e-3), so the "
        "literal per-dimension inequality cannot hold for any search output"
    ),
)
def test_c04_literal_search_beats_truncated_table_values(capsys):
    violations = []
    for key in ("2a", "3a", "2b", "3b"):
        ref = REFERENCE_RULES[key]
        rule, _ = free_construction(key)
        for d in range(ref.s):
            if not rule.errors[d] <= ref.errors_3sig[d] * (1.0 + 1e-3):
                violations.append((key, d + 1, rule.errors[d], ref.errors_3sig[d]))
        if violations:
            break  # the first counterexample already falsifies the universal claim
    report(
        capsys,
        not violations,
        "criterion 4 (literal reading): search errors at or below truncated table values "
        f"+0.1%; first violation: {violations[0] if violations else None}",
    )
    assert not violations, violations


def test_c05_fast_and_naive_drivers_agree_everywhere(capsys, sweep_rules):
    rules, elapsed = sweep_rules
    worst_rel = 0.0
    mismatched_q = []
    for alpha, m, naive, fast in rules:
        if naive.q != fast.q:
            mismatched_q.append((alpha, m, naive.q, fast.q))
        for en, ef in zip(naive.errors, fast.errors):
            worst_rel = max(worst_rel, abs(en - ef) / max(1e-300, abs(en)))
    ok = not mismatched_q and worst_rel <= 1e-10 and elapsed < 300.0
    report(
        capsys,
        ok,
        "criterion 5: fast and exhaustive drivers pick identical components with errors "
        f"within 1e-10 relative over b=2, alpha in {{2,3}}, m in 1..5, s in 1..4 "
        f"(worst spread {worst_rel:.1e}, {elapsed:.1f}s)",
    )
    assert not mismatched_q, mismatched_q
    assert worst_rel <= 1e-10
    assert elapsed < 300.0


def test_c06_kernel_routes_agree_and_match_series(capsys):
    worst_route = 0.0
    worst_tail_excess = -np.inf
    for alpha in (2, 3):
        for n in range(1, 11):
            K = n + 12
            vs = np.arange(2**n)
            digits = np.array([omega_digits(DigitRational(int(v), n, 2), alpha) for v in vs])
            closed = np.array([omega_nonzero_digits(DigitRational(int(v), n, 2), alpha) for v in vs])
            base2 = omega_base2_array(np.ldexp(vs.astype(np.float64), -n), alpha)
            worst_route = max(
                worst_route,
                float(np.max(np.abs(digits - closed))),
                float(np.max(np.abs(digits - base2))),
            )
            series = oracles.series_all_v_base2(n, alpha, K)
            # The tail bound is attained exactly at v=0 (every wal_k = 1), so
            # leave room for round-off in the 2^K-term float accumulation.
            tail = series_tail_bound(K, alpha, 2) + 1e-12
            for route in (digits, closed, base2):
                worst_tail_excess = max(worst_tail_excess, float(np.max(np.abs(route - series))) - tail)
            for v in range(0, 2**n, max(1, 2**n // 16)):
                s = omega_series_oracle(DigitRational(v, n, 2), alpha, K)
                assert s.tail == series_tail_bound(K, alpha, 2)
                assert abs(s.value - series[v]) <= 1e-11
    anchors_ok = (
        omega_digits(DigitRational(0, 1, 2), 2) == 1.5
        and abs(omega_digits(DigitRational(0, 1, 2), 3) - 25.0 / 18.0) < 1e-15
        and omega_base2(0.5, 2) == -0.25
        and abs(omega_nonzero_digits(DigitRational(1, 1, 2), 3) + 5.0 / 24.0) < 1e-15
        and omega_at_zero(2, 2) == 1.5
    )
    ok = worst_route <= 1e-12 and worst_tail_excess <= 0.0 and anchors_ok
    report(
        capsys,
        ok,
        "criterion 6: three kernel routes agree to 1e-12 for all v/2^n, n<=10, alpha in {2,3}, "
        f"and sit within the series oracle's tail at K=n+12 (route spread {worst_route:.1e}, "
        f"tail margin {-worst_tail_excess:.1e}); closed-form anchors hold",
    )
    assert worst_route <= 1e-12
    assert worst_tail_excess <= 0.0
    assert anchors_ok


def test_c07_dual_enumeration_matches_product_formula(capsys):
    checked = 0
    moduli = []
    for code in range(4, 200):
        if poly_degree(code, 2) in (2, 4, 6) and is_irreducible(code, 2):
            moduli.append(code)
    assert len({poly_degree(c, 2) for c in moduli}) == 3 and len(moduli) >= 4
    worst_gap = -np.inf
    for code in moduli[:6]:
        mod = Modulus.create(code, 2)
        m_digits = max(1, mod.n // 2)
        for s, q in ((1, [3]), (2, [3, min(7, 2**mod.n - 1)])):
            w = WeightSequence.geometric(0.9, s)
            product = wce_product(lattice_points(mod, q, m_digits), 2, w)
            K = mod.n + (6 if s == 2 else 8)
            dual, tail = wce_dual_bruteforce(q, mod, m_digits, 2, w, K=K)
            worst_gap = max(worst_gap, abs(dual - product) - tail)
            checked += 1
    ok = worst_gap <= 0.0 and checked >= 8
    report(
        capsys,
        ok,
        f"criterion 7: dual-net enumeration equals the product formula within the truncation "
        f"tail across {len(moduli[:6])} moduli, s in {{1,2}} (worst |gap|-tail = {worst_gap:.1e})",
    )
    assert worst_gap <= 0.0
    assert checked >= 8


def test_c08_fft_correlation_matches_direct_route(capsys):
    rng = np.random.default_rng(42)
    worst = 0.0
    for L in (3, 7, 15, 63, 255, 1023):
        kernel = rng.standard_normal(L)
        Q = rng.standard_normal(L)
        fast = circ_convolve(None, Q, make_plan(kernel, strategy="fft"))
        slow = circ_convolve(None, Q, make_plan(kernel, strategy="direct"))
        worst = max(worst, float(np.max(np.abs(fast - slow))) / max(1.0, float(np.max(np.abs(slow)))))
    # spot check at the full search length: exact dots at random shifts
    L = 2**20 - 1
    kernel = rng.standard_normal(L)
    Q = rng.standard_normal(L)
    fast = circ_convolve(None, Q, make_plan(kernel, strategy="fft"))
    ext = np.concatenate([kernel, kernel])
    scale = max(1.0, float(np.max(np.abs(fast))))
    for delta in rng.integers(0, L, size=32):
        exact = float(np.dot(ext[L - delta : 2 * L - delta], Q))
        worst = max(worst, abs(float(fast[delta]) - exact) / scale)
    ok = worst <= 1e-9
    report(
        capsys,
        ok,
        f"criterion 8: FFT correlation matches the defining sum to 1e-9 relative on "
        f"L in {{3,7,15,63,255,1023}} and at L=2^20-1 spot shifts (worst {worst:.1e})",
    )
    assert worst <= 1e-9


def test_c09_generic_bound_dominates_every_constructed_prefix(capsys, sweep_rules):
    rules, _ = sweep_rules
    checked = 0
    violations = []
    for alpha, m, _, fast in rules:
        taus = (1.0, 1.5) if alpha == 2 else (1.0, 2.0)
        w = fast.weights
        for tau in taus:
            for d in range(1, fast.s + 1):
                bound = wce_bound(2, alpha, tau, m, fast.n, w, d)
                checked += 1
                if not fast.errors[d - 1] <= bound:
                    violations.append((alpha, m, tau, d, fast.errors[d - 1], bound))
    rule_2a, _ = free_construction("2a")
    for tau in (1.0, 1.5):
        for d in range(1, rule_2a.s + 1):
            bound = wce_bound(2, 2, tau, rule_2a.m, rule_2a.n, rule_2a.weights, d)
            checked += 1
            if not rule_2a.errors[d - 1] <= bound:
                violations.append(("2a", tau, d, rule_2a.errors[d - 1], bound))
    ok = not violations
    report(
        capsys,
        ok,
        f"criterion 9: closed-form error bound dominates the constructed error for every "
        f"prefix at tau=1 and one tau in (1, alpha) ({checked} prefix/tau pairs)",
    )
    assert not violations, violations


def test_c10_interlaced_external_matrices_pipeline(capsys, tmp_path):
    """Externally supplied square matrices: interlace, evaluate, compare to the search."""
    b, m, alpha, s, d = 2, 6, 2, 2, 2
    classical = find_irreducible(m, b)
    mats = lattice_matrices(classical, [3, 7, 19, 29], m)  # 2s square m x m matrices
    path = tmp_path / "classical.txt"
    write_matrix_file(path, mats)
    loaded = read_matrix_file(path)
    higher = interlace(loaded, d)
    assert len(higher) == s and all(c.rows.shape == (d * m, m) for c in higher)
    net = digitalnet_points(higher)
    assert net.count == b**m and net.dim == s and net.n == d * m
    w = WeightSequence.geometric(0.9, s)
    e_explicit = wce_product(net, alpha, w)
    rule = cbc_fast(s, m, alpha, find_irreducible(alpha * m, b), w)
    e_cbc = rule.errors[-1]
    ok = np.isfinite(e_explicit) and np.isfinite(e_cbc) and e_explicit > 0 and e_cbc > 0
    report(
        capsys,
        ok,
        f"criterion 10: interlacing externally supplied matrices yields a valid order-{d} net "
        f"(e_explicit = {e_explicit:.5e}); search at equal parameters: e_cbc = {e_cbc:.5e}; "
        f"e_cbc <= e_explicit is {e_cbc <= e_explicit} (reported, not gated)",
    )
    assert ok
