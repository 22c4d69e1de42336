import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sibuya.errors import DegenerateInputError
from sibuya.verify import (
    DEFAULT_THRESHOLDS,
    SuiteConfig,
    check_functional_relation,
    check_green,
    check_hadamard,
    check_hypothesis,
    check_logderiv_sign,
    order_growth_slope,
    random_hypothesis_coeffs,
    run_suite,
)


def test_hypothesis_quartic_example():
    res = check_hypothesis((1.0, -0.5, -2.0), 4)
    assert res.accepted and 2 in res.valid
    # j = 1 already works: (1-2)(-0.5) >= 0 and (1-3)(-2) >= 0
    assert res.j == 1


def test_hypothesis_cubic_rejection():
    res = check_hypothesis((-1.0, 1.0), 3)
    assert not res.accepted and res.violations == {1: 2}


def test_hypothesis_zero_coefficients():
    assert check_hypothesis((0.0, 0.0, 0.0, 0.0), 5).j == 1


def test_supplement_blocks_j2_for_quartic():
    # j = 2 alone would accept a2 > 0; the supplement forbids it
    res = check_hypothesis((1.0, 0.5, -1.0), 4)
    assert not res.accepted and res.violations[2] == 2


@given(st.integers(3, 6), st.lists(st.floats(-3, 3), min_size=5, max_size=5))
def test_hypothesis_matches_definition(m, vals):
    a = vals[: m - 1]
    brute = [j for j in range(1, m // 2 + 1)
             if all((j - k) * a[k - 1] >= 0 for k in range(1, m)) and not (m == 4 and j == 2 and a[1] > 0)]
    res = check_hypothesis(a, m)
    assert res.valid == tuple(brute)
    assert res.j == (brute[0] if brute else None)


@given(st.integers(0, 10_000), st.integers(3, 6))
def test_sampler_only_produces_admissible_sets(seed, m):
    a = random_hypothesis_coeffs(np.random.default_rng(seed), m)
    assert check_hypothesis(a, m).accepted


def test_hypothesis_rejects_complex():
    with pytest.raises(DegenerateInputError):
        check_hypothesis((1j, 0.0), 3)


def test_suite_is_deterministic():
    cfg = SuiteConfig(n_cases=4)
    a = run_suite(11, ["symmetry"], cfg).to_json()
    b = run_suite(11, ["symmetry"], cfg).to_json()
    assert a == b
    doc = json.loads(a)
    assert set(doc["entries"][0]) == {"name", "params", "residual", "threshold", "verdict"}


def test_injected_sign_fault_fails_lemma():
    rep = run_suite(3, ["wronskian_lemma"], SuiteConfig(n_cases=3), lemma_sign=-1)
    assert not rep.passed and len(rep.failures()) == len(rep.entries)


def test_zero_threshold_fails_and_is_reported():
    th = dict(DEFAULT_THRESHOLDS, symmetry=0.0)
    rep = run_suite(0, ["symmetry", "wronskian_lemma"], SuiteConfig(n_cases=3, thresholds=th))
    assert not rep.passed
    assert {e.name for e in rep.failures()} == {"symmetry"}
    assert any(e.name == "wronskian_lemma" and e.verdict for e in rep.entries)


def test_config_digest_tracks_thresholds():
    th = dict(DEFAULT_THRESHOLDS, symmetry=1e-3)
    assert SuiteConfig().digest() != SuiteConfig(thresholds=th).digest()
    assert SuiteConfig().digest() == SuiteConfig().digest()


def test_unknown_check_rejected():
    with pytest.raises(DegenerateInputError):
        run_suite(0, ["nonsense"])


def test_functional_relation_at_origin_is_exact():
    rows = check_functional_relation(3, (0.0, 0.0), [0.0], SuiteConfig())
    assert rows[0].residual < 1e-14


def test_functional_relation_random_quintic():
    rng = np.random.default_rng(5)
    a = tuple(rng.uniform(-1, 1, 4))
    rows = check_functional_relation(5, a, list(rng.uniform(-3, 3, 5)), SuiteConfig())
    assert all(r.verdict for r in rows)


def test_functional_relation_needs_usable_samples():
    # f0 vanishes at lam = -3 for m = 2, a1 = 0
    with pytest.raises(DegenerateInputError):
        check_functional_relation(2, (0.0,), [-3.0], SuiteConfig())


@pytest.mark.parametrize("m,expected", [(3, 5 / 6), (4, 3 / 4)])
def test_order_of_growth(m, expected):
    radii = np.geomspace(100, 1600, 5)
    slope = order_growth_slope(m, radii)
    assert abs(slope - expected) <= 0.05
    assert abs(order_growth_slope(m, 2 * radii) - slope) < 0.02


def test_order_fit_needs_four_radii():
    with pytest.raises(DegenerateInputError):
        order_growth_slope(3, [10, 20, 40])


def test_logderiv_sign_special_and_general_case():
    cfg = SuiteConfig()
    rows = check_logderiv_sign((0.0, 0.0), [0.0, 1.0, 2.0, 5.0], cfg)
    rows += check_logderiv_sign((1.0, -0.5, -2.0), np.linspace(-3, 12, 6), cfg)
    assert all(r.verdict for r in rows)
    mirrored = check_logderiv_sign((0.0, 0.0), [1.0], cfg, conjugate=True)
    assert mirrored[0].verdict
    assert mirrored[0].residual == pytest.approx(rows[1].residual, rel=1e-12)


def test_green_checks():
    rows = check_green(SuiteConfig(), quartic_zeros=2)
    bad = [r for r in rows if not r.verdict]
    assert not bad, bad
    names = {r.name for r in rows}
    assert {"green_alpha", "green_ray", "green_ray_positive", "green_quartic_im_negative"} <= names


def test_hadamard_partial_products_improve():
    row = check_hadamard(SuiteConfig())
    errs = row.params["errors"]
    assert row.params["zeros_found"] >= 64
    assert errs[1] < errs[0]


def test_full_suite_passes():
    rep = run_suite(2024, [c for c in ("symmetry", "functional_relation", "wronskian_lemma", "connection")],
                    SuiteConfig(n_cases=6))
    assert rep.passed, rep.failures()
    assert [e.name for e in rep.entries] == sorted(e.name for e in rep.entries)
