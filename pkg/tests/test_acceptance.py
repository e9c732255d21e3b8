"""Acceptance criteria, one test per criterion.

The terminal summary prints one PASS/FAIL line per criterion (see conftest).
"""

import csv
import json
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from recipstab.cli import main
from recipstab.config import CheckSolutionConfig
from recipstab.controls import ControlFunction, ControlKind, PowerAlpha, closed_form_bound, series_bound
from recipstab.equation import EquationVariant, ReciprocalParams
from recipstab.exact import hp, to_real
from recipstab.harness import run_check_solution, run_verify_identity
from recipstab.hyers import (
    PerturbedReciprocal,
    build_sequence,
    contraction_chain,
    empirical_control,
    tabulate,
    verify_stability,
)
from recipstab.padic import (
    Agreement,
    C0Status,
    PadicContext,
    c0_condition_check,
    compare_bounds,
    padic_norm,
    submultiplicative_check,
    theorem41_bound,
)

F = Fraction
CF = ControlFunction
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def cli(*args):
    return CliRunner().invoke(main, [str(a) for a in args], catch_exceptions=False)


@pytest.mark.criterion("1 binomial identity, l <= 64, exact, < 1 s")
def test_criterion_1_binomial_identity(tmp_path):
    start = time.perf_counter()
    summary = run_verify_identity(64, tmp_path)
    elapsed = time.perf_counter() - start
    assert (summary.checks, summary.passed, summary.failed) == (65, 65, 0)
    with open(tmp_path / "identity.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(row["l"]) for row in rows] == list(range(65))
    for row in rows:
        # closed-form oracle, independent of the summation in the implementation
        assert 2 * int(row["even_binomial_sum"]) == 3 ** int(row["l"]) + 1
    r = cli("--json", "verify-identity", "--l-max", 64)
    assert r.exit_code == 0 and json.loads(r.output)["passed"] == 65
    assert elapsed < 1.0


@pytest.mark.criterion("2 exact-solution nullity, 500 + 500 instances, zero tolerance, < 10 s")
def test_criterion_2_nullity():
    start = time.perf_counter()
    summary = run_check_solution(CheckSolutionConfig(rng_seed=42, instances=500))
    elapsed = time.perf_counter() - start
    per = summary.details["per_variant"]
    assert per["primary"]["admissible"] == 500 and per["primary"]["failed"] == 0
    assert per["generalized"]["admissible"] == 500 and per["generalized"]["failed"] == 0
    assert summary.failed == 0 and summary.passed == 1000
    assert elapsed < 10.0


SPECIALIZATIONS = [
    ("primary", 2, {"0": 4, "2": 1}),
    ("primary", 4, {"0": 16, "2": 24, "4": 1}),
    ("primary", 7, {"0": 128, "2": 672, "4": 280, "6": 14}),
    ("primary", 8, {"0": 256, "2": 1792, "4": 1120, "6": 112, "8": 1}),
    ("generalized", 2, {"0": 5, "1": 8, "2": 5}),
    ("generalized", 3, {"0": 9, "1": 18, "2": 18, "3": 9}),
]


@pytest.mark.criterion("3 specialization coefficients, exact match")
def test_criterion_3_specialization(tmp_path):
    for variant, degree, expected in SPECIALIZATIONS:
        out = tmp_path / f"{variant}{degree}"
        r = cli("specialize", "--variant", variant, "--degree", degree, "--out", out)
        assert r.exit_code == 0
        d = json.loads((out / "specialize.json").read_text())
        assert d["coefficients"] == expected
        if (variant, degree) == ("primary", 7):
            assert d["verdict"] == "MATCH-WITH-NOTE" and d["note"]
            assert "note:" in r.output
        else:
            assert d["verdict"] == "MATCH"


@pytest.mark.criterion("4 closed forms vs series limit, 1e-20 relative; spot values")
def test_criterion_4_closed_forms():
    rng = np.random.default_rng(42)
    worst = hp.mpf(0)
    count = 0
    for l in range(1, 9):
        for _ in range(60):
            eps = hp.mpf(float(rng.uniform(0, 10))) or hp.mpf(1)
            x = hp.mpf(float(rng.uniform(0, 10))) or hp.mpf(1)
            family = rng.integers(0, 4)
            if family == 0:
                q = CF.constant(eps)
            elif family == 3:
                total = float(rng.uniform(-l + 0.1, 5))
                p = float(rng.uniform(-l - 2, 5))
                q = CF.product_power(eps, hp.mpf(p), hp.mpf(total) - hp.mpf(p))
            else:
                a = hp.mpf(float(rng.uniform(-l + 0.1, 5)))
                q = CF.sum_power(eps, a) if family == 1 else CF.mixed_power(eps, a)
            s = series_bound(q, l, x)
            assert s.converged
            closed = closed_form_bound(q, l, x)
            worst = max(worst, abs(s.partial_sum - closed) / closed)
            count += 1
    assert count == 480
    assert worst <= hp.mpf(10) ** -20
    tol = hp.mpf(10) ** -20
    assert abs(closed_form_bound(CF.constant(F(1)), 1, F(1)) - hp.mpf(3) / 2) <= tol
    assert abs(series_bound(CF.constant(F(1)), 1, F(1)).partial_sum - hp.mpf(3) / 2) <= tol
    product = CF.product_power(F(1), F(1), F(1))
    assert abs(closed_form_bound(product, 1, F(1)) - to_real(F(3, 26))) <= tol
    assert abs(series_bound(product, 1, F(1)).partial_sum - to_real(F(3, 26))) <= tol


@pytest.mark.criterion("5 direct-method stability sweep, defect ratio 1e-10, scaling 1e-8, < 30 s")
def test_criterion_5_direct_method():
    start = time.perf_counter()
    rng = np.random.default_rng(42)
    runs = 0
    for l in range(1, 5):
        for beta in (1, 2):
            for _ in range(2):
                eps = F(int(rng.integers(1, 51)), 1000)
                grid = set()
                while len(grid) < 8:
                    grid.add(F(int(rng.integers(1, 101)), 10))
                f = PerturbedReciprocal.power_envelope(ReciprocalParams(F(1), l), eps, F(beta))
                q = empirical_control(f, EquationVariant.primary(l), sorted(grid), ControlKind.SUM_POWER, alpha=beta - l)
                report = verify_stability(f, q, sorted(grid))
                assert len(report.records) == 8
                assert report.violations == 0 and report.flagged == 0
                assert report.scaling_probe_max_error <= 1e-8
                runs += 1
    assert runs == 16
    c = F(3, 10)
    for l in range(1, 5):
        base = ReciprocalParams(F(1), l)
        pts = contraction_chain(F(1), 40)
        f = PerturbedReciprocal.tabulated(base, tabulate(lambda t: base.root(t) ** l + c, pts))
        ratios = build_sequence(f, F(1), max_m=40).defect_ratios()
        assert ratios
        assert max(abs(r - hp.mpf(3) ** -l) for r in ratios) <= 1e-10
    assert time.perf_counter() - start < 30.0


@pytest.mark.criterion("6 p-adic multiplicativity and ultrametric, 10^4 pairs per prime, exact")
def test_criterion_6_padic_algebra():
    rng = np.random.default_rng(42)
    for p in (2, 3, 5, 7):
        ctx = PadicContext(p)

        def draw():
            num = int(rng.integers(-10**6, 10**6))
            while num == 0:
                num = int(rng.integers(-10**6, 10**6))
            den = int(rng.integers(1, 10**6))
            return F(num * p ** int(rng.integers(0, 6)), den * p ** int(rng.integers(0, 6)))

        for _ in range(10_000):
            a, b = draw(), draw()
            na, nb = padic_norm(ctx, a), padic_norm(ctx, b)
            assert padic_norm(ctx, a * b) == na * nb
            s = padic_norm(ctx, a + b)
            assert s <= max(na, nb)
            if na != nb:
                assert s == max(na, nb)


@pytest.mark.criterion("7 decay condition, literal max bound and corollary mismatch flagged")
def test_criterion_7_theorem_machinery(tmp_path):
    for p in (2, 3, 5, 7, 11, 13):
        ctx = PadicContext(p)
        for l in range(1, 5):
            for mu in (F(1, 2), F(1), F(7)):
                for xn in (F(1), F(1, p), F(p**2)):
                    assert c0_condition_check(ctx, CF.constant(mu), l, xn, xn) is C0Status.FAILS
    three = PadicContext(3)
    for l in range(1, 5):
        for a in range(-l - 4, -l):
            assert c0_condition_check(three, CF.sum_power(F(1), F(a)), l, F(1), F(1)) is C0Status.HOLDS
    b = theorem41_bound(three, CF.sum_power(F(1), F(-2)), 1, F(1), K=10)
    assert (b.value, b.k_argmax) == (F(2, 3), 0)
    v = compare_bounds(three, CF.sum_power(F(1), F(-2)), 1, F(1), K=10)
    assert v.agreement is Agreement.MISMATCH and v.ratio == 2 and v.corollary_bound == F(1, 3)

    cfg = tmp_path / "padic.json"
    cfg.write_text(json.dumps({
        "primes": [3, 5],
        "degrees": [1],
        "controls": [{"kind": "CONSTANT", "epsilon": 1}, {"kind": "SUM_POWER", "epsilon": 1, "alpha": -2}],
    }))
    r = cli("--json", "padic-run", "--config", cfg, "--out", tmp_path / "out")
    assert r.exit_code == 0
    s = json.loads(r.output)
    assert s["failed"] == 0 and s["flagged"] > 0
    verdicts = json.loads((tmp_path / "out" / "padic_verdicts.json").read_text())["verdicts"]
    mismatch = [v for v in verdicts if v["prime"] == 3 and v["control"]["kind"] == "SUM_POWER"]
    assert mismatch[0]["agreement"] == "MISMATCH" and mismatch[0]["flagged"]
    assert all(v["c0_status"] == "FAILS" for v in verdicts if v["control"]["kind"] == "CONSTANT")


@pytest.mark.criterion("8 submultiplicative corollary checks, both bounds emitted")
def test_criterion_8_submultiplicative(tmp_path):
    grid = [F(1, 9), F(1, 3), F(1), F(3), F(9)]
    cases = [(3, -2, (True, True)), (3, -1, (True, False)), (5, -2, (True, False))]
    for p, a, expected in cases:
        r = submultiplicative_check(PadicContext(p), PowerAlpha(F(a)), 1, grid)
        assert (r.property_holds, r.contraction_holds) == expected

    cfg = tmp_path / "sub.json"
    cfg.write_text(json.dumps({
        "primes": [3, 5],
        "degrees": [1],
        "controls": [
            {"kind": "SUBMULTIPLICATIVE", "epsilon": 1, "alpha_fn": {"exponent": -2}},
            {"kind": "SUBMULTIPLICATIVE", "epsilon": 1, "alpha_fn": {"exponent": -1}},
        ],
    }))
    res = cli("--json", "padic-run", "--config", cfg, "--out", tmp_path / "out")
    assert res.exit_code == 0
    verdicts = json.loads((tmp_path / "out" / "padic_verdicts.json").read_text())["verdicts"]
    assert len(verdicts) == 4
    seen = {}
    for v in verdicts:
        assert v["corollary_bound"] is not None and v["direct_bound"] is not None
        sub = v["submultiplicative"]
        seen[(v["prime"], v["control"]["alpha_fn"]["exponent"])] = (sub["property_holds"], sub["contraction_holds"])
    assert seen[(3, -2)] == (True, True)
    assert seen[(3, -1)] == (True, False)
    assert seen[(5, -2)] == (True, False)
    target = next(v for v in verdicts if v["prime"] == 3 and v["control"]["alpha_fn"]["exponent"] == -2)
    assert (target["corollary_bound"], target["direct_bound"]) == ("2/9", "2/3")


COMMANDS = [
    ("verify-identity", "--l-max", 64),
    ("check-solution", "--config", CONFIGS / "check_solution.json"),
    ("specialize", "--variant", "primary", "--degree", 7),
    ("specialize", "--variant", "generalized", "--degree", 3),
    ("stability-run", "--config", CONFIGS / "stability_power_envelope.json"),
    ("stability-run", "--config", CONFIGS / "stability_zero.json"),
    ("stability-run", "--config", CONFIGS / "stability_additive_constant.json"),
    ("padic-run", "--config", CONFIGS / "padic.json"),
]


@pytest.mark.criterion("9 determinism, byte-identical outputs across runs with seed 42")
def test_criterion_9_determinism(tmp_path):
    for i, cmd in enumerate(COMMANDS):
        outputs = []
        for run in ("a", "b"):
            out = tmp_path / f"{i}{run}"
            r = cli("--seed", 42, *cmd, "--out", out)
            assert r.exit_code == 0, r.output
            files = sorted(p for p in out.iterdir())
            assert files
            outputs.append({p.name: p.read_bytes() for p in files})
        assert outputs[0] == outputs[1], cmd
