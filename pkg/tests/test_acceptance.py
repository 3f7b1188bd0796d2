"""The thirteen acceptance criteria, evaluated on the full verification suite.

The suite runs twice at the default seed; the first run feeds criteria 1-12
and the pair of CSV summaries feeds criterion 13.  Each criterion prints one
PASS/FAIL line, also collected in the terminal summary.
"""

import pytest

from discnorm.funcrep import SpaceParams
from discnorm.norms import shift_norm_closed_form, shift_norm_formula
from discnorm.verify import DEFAULT_SEED, reports_to_csv, run_suite


@pytest.fixture(scope="module")
def runs():
    first = run_suite("full", DEFAULT_SEED)
    second = run_suite("full", DEFAULT_SEED)
    return first, second


@pytest.fixture(scope="module")
def suite(runs):
    return runs[0]


def group(reports, prefix):
    out = [r for r in reports if r.check_id.startswith(prefix + "/")]
    assert out, f"no reports under {prefix}"
    return out


def failures(reps):
    return [r.check_id for r in reps if not r.passed]


def summary(reps):
    bad = failures(reps)
    return f"{len(reps) - len(bad)}/{len(reps)} checks pass" + (f"; failing: {', '.join(bad[:8])}" if bad else "")


def test_criterion_01_kernel_closed_form(suite, record_criterion):
    reps = group(suite, "kernel_closed_form")
    tol_ok = all(r.tolerance <= 1e-6 * r.rhs * (1 + 1e-12) for r in reps)
    ok = len(reps) == 12 and tol_ok and not failures(reps)
    worst = max(abs(r.margin) / r.rhs for r in reps)
    assert record_criterion(1, "kernel norm closed form, relative 1e-6", ok,
                            f"{summary(reps)}; worst relative deviation {worst:.2e}")


def test_criterion_02_route_agreement(suite, record_criterion):
    reps = group(suite, "route_agreement")
    bergman_joined = all("bergman" in r.details["routes"] for r in reps if "/a1.7" in r.check_id)
    routes_present = all({"definition", "littlewood_paley", "coefficients"} <= set(r.details["routes"]) for r in reps)
    ok = len(reps) == 80 and bergman_joined and routes_present and not failures(reps)
    worst = max(r.margin / r.rhs for r in reps)
    assert record_criterion(2, "route agreement, relative 1e-7 (bergman at alpha=1.7)", ok,
                            f"{summary(reps)}; worst spread {worst:.2e}")


def test_criterion_03_conformal_invariance(suite, record_criterion):
    reps = group(suite, "conformal_invariance")
    stated = all(r.tolerance <= (1e-6 if r.check_id.endswith("p2.0") else 1e-4) * r.rhs * (1 + 1e-12) for r in reps)
    ok = stated and not failures(reps)
    assert record_criterion(3, "conformal invariance, 1e-6 at p=2 and 1e-4 at p in {1,3}", ok, summary(reps))


def test_criterion_04_contractive(suite, record_criterion):
    reps = group(suite, "contractive")
    kern = [r for r in reps if r.check_id.endswith("/kernel")]
    poly = [r for r in reps if r.check_id.endswith("/poly")]
    holds = all(r.margin >= -1e-8 * r.rhs for r in reps)
    equality = all(abs(r.margin) <= 1e-6 * r.rhs for r in kern)
    separated = all(r.margin >= 1e-3 * r.rhs for r in poly)
    ok = len(reps) == 200 and kern and holds and equality and separated and not failures(reps)
    detail = (f"{summary(reps)}; kernel max |margin|/rhs {max(abs(r.margin) / r.rhs for r in kern):.1e}; "
              f"non-kernel min margin/rhs {min(r.margin / r.rhs for r in poly):.2e}")
    assert record_criterion(4, "contractive inequality, kernel equality, separation 1e-3", ok, detail)


def test_criterion_05_power_trick(suite, record_criterion):
    reps = group(suite, "power_trick")
    ns = {r.inputs["n"] for r in reps}
    ok = ns == {2, 3} and all(r.tolerance <= 1e-5 * abs(r.rhs) * (1 + 1e-12) for r in reps) and not failures(reps)
    assert record_criterion(5, "power trick identity, relative 1e-5", ok, summary(reps))


def test_criterion_06_shift(suite, record_criterion):
    reps = group(suite, "shift")
    P = SpaceParams(0.5, 2.0)
    two = abs(shift_norm_formula(P) ** 2 - 2.0) <= 1e-8 * 2.0 and abs(shift_norm_closed_form(P) ** 2 - 2) < 1e-12
    identity = all(abs(r.details["identity_deviation"]) <= 1e-6 * abs(r.details["expansion_integral"]) + 1e-300
                   for r in reps if not r.check_id.startswith("shift/const"))
    consts = [r for r in reps if r.check_id.startswith("shift/const")]
    attained = all(abs(r.margin) <= 1e-10 * r.rhs for r in consts)
    nonconst = [r for r in reps if not r.check_id.startswith("shift/const")]
    strict = all(r.margin >= 1e-4 * r.rhs for r in nonconst)
    ok = two and identity and consts and attained and strict and not failures(reps)
    detail = (f"{summary(reps)}; ||S||^2 at (0.5,2) = {shift_norm_formula(P) ** 2:.12f}; "
              f"min nonconstant gap/rhs {min(r.margin / r.rhs for r in nonconst):.2e}")
    assert record_criterion(6, "shift operator identity and norm formula", ok, detail)


def test_criterion_07_inner_division(suite, record_criterion):
    reps = group(suite, "inner_division")
    ok = len(reps) == 20 and all(r.kind == "strict" and r.tolerance >= 1e-4 * r.rhs * (1 - 1e-12) for r in reps) \
        and not failures(reps)
    assert record_criterion(7, "inner division strictly decreases the norm, margin 1e-4", ok,
                            f"{summary(reps)}; min margin/||f||^p {min(r.margin / r.rhs for r in reps):.3f}")


def test_criterion_08_level_sets(suite, record_criterion):
    reps = group(suite, "phi_identities")
    mono = all(r.details["g_violation"] <= 1e-6 * r.details["g_head"] for r in reps)
    head = all(abs(r.details["g_head_relative_deviation"]) <= 1e-2 for r in reps)
    alphas_ok = all(sorted(row[0] for row in r.details["phi_vs_norm"]) == [0.5, 1.0, 2.0] for r in reps)
    phi_ok = all(abs(ph - nv) <= 1e-2 * nv for r in reps for _, ph, nv in r.details["phi_vs_norm"])
    ok = len(reps) == 10 and mono and head and alphas_ok and phi_ok and not failures(reps)
    worst = max(abs(ph - nv) / nv for r in reps for _, ph, nv in r.details["phi_vs_norm"])
    assert record_criterion(8, "level sets: g nonincreasing, Phi vs norm 1e-2, g head vs Hardy 1e-2", ok,
                            f"{summary(reps)}; worst Phi deviation {worst:.2e}")


def test_criterion_09_zero_count(suite, record_criterion):
    reps = group(suite, "zero_count")
    counts = {int(r.rhs) for r in reps}
    ok = counts == {0, 1, 2} and all(abs(r.margin) <= 0.1 for r in reps) and not failures(reps)
    assert record_criterion(9, "zero count from small-t asymptotics within 0.1", ok,
                            f"{summary(reps)}; worst |n - truth| {max(abs(r.margin) for r in reps):.2e}")


def test_criterion_10_majorant(suite, record_criterion):
    bound = group(suite, "majorant_bound")
    rev = [r for r in group(suite, "majorant_reversal") if r.check_id == "majorant_reversal/a1.0/p4.0/r0.5"]
    ok_bound = all(r.margin >= -1e-8 for r in bound) and not failures(bound)
    ok_rev = len(rev) == 1 and rev[0].margin >= 1e-3 * rev[0].rhs
    detail = f"bound: {summary(bound)}"
    if rev:
        detail += f"; reversal margin/rhs at (1,4,0.5) {rev[0].margin / rev[0].rhs:.3e}"
    assert record_criterion(10, "majorant bound for p<=2 and strict reversal at (1,4,0.5)", ok_bound and ok_rev, detail)


def test_criterion_11_dilation(suite, record_criterion):
    reps = group(suite, "dilation_monotone")
    mono = all(r.margin >= -r.tolerance for r in reps)
    limit = [r.check_id for r in reps if "limit_not_reached" in r.details["failed_subchecks"]]
    worst = max(abs(r.lhs - r.rhs) / r.rhs for r in reps)
    ok = mono and not limit and not failures(reps)
    detail = (f"{summary(reps)}; monotone {'yes' if mono else 'no'}; "
              f"||f_0.99|| vs ||f|| worst relative gap {worst:.3f}")
    assert record_criterion(11, "dilations nondecreasing (1e-9) and within 2% at rho=0.99", ok, detail)


def test_criterion_12_lp_offset(suite, record_criterion):
    by_id = {r.check_id: r for r in group(suite, "lp_offset")}
    p2, p1, p15 = by_id["lp_offset/p2.0"], by_id["lp_offset/p1.0"], by_id["lp_offset/p1.5"]
    ok = (p2.passed and abs(p2.margin) <= 1e-12 and p1.passed and p1.lhs <= 1 + 1e-12
          and p15.lhs > 1 and "ratio_exceeds_one" in p15.notes)
    assert record_criterion(12, "L^p offset ratio: =1 at p=2, <=1 at p=1, >1 found at p=1.5", ok,
                            f"p=2 max |ratio-1| {abs(p2.margin):.1e}; p=1 max {p1.lhs:.15f}; p=1.5 max {p15.lhs:.6f}")


def test_criterion_13_determinism(runs, record_criterion):
    a, b = (reports_to_csv(r) for r in runs)
    ok = a == b and a.count("\n") == len(runs[0]) + 1
    assert record_criterion(13, "two full-suite runs give byte-identical CSV", ok,
                            f"{len(runs[0])} rows, {len(a)} bytes")
