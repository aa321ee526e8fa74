import math
from fractions import Fraction

import pytest

from prosparse.bounds import (
    as_mu2, bound_report, bp_simple, bp_tight, evaluate_bounds, boundary_curves, generalized,
    p0_unique, prosparse_product, prosparse_total,
)

GRID = [16, 32, 64, 128, 144, 256]


def test_thresholds_at_144():
    r = bound_report(144, Fraction(1, 12))
    assert r.threshold("p0_unique") == 11
    assert r.threshold("bp_simple") == 10
    assert r.threshold("prosparse_total") == 16


def test_threshold_values_from_float_formulas():
    assert math.floor((math.sqrt(2) - 0.5) * 12) == 10
    assert math.ceil(math.sqrt(288)) - 1 == 16


def test_example_one():
    row = evaluate_bounds(128, K_p=8, K_q=3)
    assert row.prosparse_product
    assert not row.bp_tight
    assert row.p0_unique


def test_equality_reported():
    # K = 12 = 1/mu at N = 144 sits on the boundary of the P0 bound
    row = evaluate_bounds(144, Fraction(1, 12), 6, 6)
    assert not row.p0_unique and "p0_unique" in row.equality


@pytest.mark.parametrize("N", GRID)
def test_inclusions(N):
    m2 = as_mu2(None, N)
    for a in range(0, 2 * math.isqrt(N) + 3):
        for b in range(0, 2 * math.isqrt(N) + 3):
            K = a + b
            if bp_tight(a, b, m2)[0]:
                assert p0_unique(K, m2)[0]
            if prosparse_total(K, N)[0]:
                assert prosparse_product(a, b, N)[0]
            if bp_simple(K, m2)[0]:
                assert bp_tight(a, b, m2)[0]


@pytest.mark.parametrize("N", [n for n in range(4, 65)])
def test_local_fourier_sufficient_bound(N):
    for L in range(1, N + 1):
        if N % L:
            continue
        S = lambda k: 2 * k
        for a in range(0, N):
            for b in range(0, N):
                if a + b < math.sqrt(2 * N) - (L - 1) / 2:
                    assert generalized(a, b, N, S, L, 0)[0] or b == 0 or a == 0


@pytest.mark.parametrize("N", [n for n in range(4, 65)])
def test_dct_sufficient_bound(N):
    S = lambda k: 4 * k
    for a in range(0, N):
        for b in range(0, N):
            if a + b < math.sqrt(N + 1) - 1:
                assert generalized(a, b, N, S, 1, 1)[0]


def test_report_csv():
    text = bound_report(16, kmax=2).to_csv()
    lines = text.strip().splitlines()
    assert lines[0].startswith("n,kp,kq,p0_unique")
    assert len(lines) == 1 + 9


def test_curves_shape():
    rows = boundary_curves(144)
    assert rows[0]["p0_unique"] == pytest.approx(12)
    assert rows[8]["prosparse_product"] == pytest.approx(9)
    assert rows[4]["prosparse_total"] == pytest.approx(math.sqrt(288) - 4)


def test_invalid_mu():
    with pytest.raises(ValueError):
        evaluate_bounds(16, 2.0, 1, 1)
    with pytest.raises(ValueError):
        evaluate_bounds(16, None, -1, 1)
