"""Correlation and exponential-fit machinery against exact-arithmetic oracles."""

import math
import random
from fractions import Fraction

import pytest

from ctmlab.measures import build_distribution
from ctmlab.stats import (
    FitError,
    correlation_report,
    fit_exponential,
    normalize_histogram,
    partial_correlation,
    pearson,
    tail_mass_log10,
)


def exact_pearson(x, y):
    """Independent oracle: textbook formula in exact rational arithmetic."""
    fx = [Fraction(v) for v in x]
    fy = [Fraction(v) for v in y]
    n = len(fx)
    sx, sy = sum(fx), sum(fy)
    num = n * sum(a * b for a, b in zip(fx, fy)) - sx * sy
    dx = n * sum(a * a for a in fx) - sx * sx
    dy = n * sum(b * b for b in fy) - sy * sy
    return float(num) / math.sqrt(float(dx) * float(dy))


def exact_partial(x, y, z):
    r_xy = exact_pearson(x, y)
    r_xz = exact_pearson(x, z)
    r_yz = exact_pearson(y, z)
    return (r_xy - r_xz * r_yz) / math.sqrt((1 - r_xz**2) * (1 - r_yz**2))


def test_pearson_exact_lines():
    x = [1.0, 2.0, 3.0, 4.0]
    assert pearson(x, [2 * v + 1 for v in x]) == pytest.approx(1.0)
    assert pearson(x, [-v for v in x]) == pytest.approx(-1.0)


def test_pearson_input_validation():
    with pytest.raises(ValueError):
        pearson([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        pearson([1.0, 2.0, 3.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


def test_pearson_matches_exact_oracle():
    rng = random.Random(2026)
    for _ in range(200):
        n = rng.randrange(3, 30)
        x = [rng.uniform(-10, 10) for _ in range(n)]
        y = [rng.uniform(-10, 10) for _ in range(n)]
        assert abs(pearson(x, y) - exact_pearson(x, y)) < 1e-12


def test_pearson_affine_invariance():
    rng = random.Random(7)
    x = [rng.uniform(0, 5) for _ in range(20)]
    y = [rng.uniform(0, 5) for _ in range(20)]
    r = pearson(x, y)
    assert pearson([3.0 * v + 11.0 for v in x], y) == pytest.approx(r, abs=1e-12)
    assert pearson([-2.0 * v for v in x], y) == pytest.approx(-r, abs=1e-12)


def test_partial_correlation_reduces_to_pearson():
    # z is exactly uncorrelated with both x and y
    x = [1.0, 0.0, -1.0, 0.0]
    y = [1.0, 1.0, -3.0, 1.0]
    z = [0.0, 1.0, 0.0, -1.0]
    assert exact_pearson(x, z) == 0.0
    assert exact_pearson(y, z) == 0.0
    assert partial_correlation(x, y, z) == pytest.approx(pearson(x, y), abs=1e-12)


def test_partial_correlation_matches_exact_oracle():
    rng = random.Random(515)
    for _ in range(200):
        n = rng.randrange(4, 25)
        x = [rng.uniform(-3, 3) for _ in range(n)]
        y = [rng.uniform(-3, 3) for _ in range(n)]
        z = [rng.uniform(-3, 3) for _ in range(n)]
        assert abs(partial_correlation(x, y, z) - exact_partial(x, y, z)) < 1e-12


def test_partial_correlation_collinear_error():
    x = [1.0, 2.0, 3.0, 5.0]
    y = [2.0, 1.0, 4.0, 3.0]
    with pytest.raises(ValueError):
        partial_correlation(x, y, x)


def test_correlation_report_fields(oracle3):
    report = correlation_report(build_distribution(oracle3))
    for value in (
        report.r_km_n,
        report.r_km_n_given_len,
        report.r_km_ld,
        report.r_km_ld_given_len,
    ):
        assert -1.0 <= value <= 1.0


def test_normalize_histogram():
    freqs = normalize_histogram({3: 1, 1: 3})
    assert freqs == {1: 0.75, 3: 0.25}
    with pytest.raises(ValueError):
        normalize_histogram({})
    with pytest.raises(ValueError):
        normalize_histogram({1: 0})


def make_exponential(alpha, lam, ks):
    return {k: alpha * math.exp(-lam * k) for k in ks}


def test_fit_recovers_generating_parameters():
    data = make_exponential(1.12, 0.793, range(1, 60))
    fit = fit_exponential(data)
    assert fit.alpha == pytest.approx(1.12, rel=1e-9)
    assert fit.lam == pytest.approx(0.793, rel=1e-9)
    assert fit.rss < 1e-20
    assert fit.iterations >= 1
    assert fit.value(0) == pytest.approx(fit.alpha)


def test_fit_from_fixed_start():
    data = make_exponential(1.12, 0.793, range(1, 60))
    fit = fit_exponential(data, start=(0.4, 0.25))
    assert fit.alpha == pytest.approx(1.12, rel=1e-9)
    assert fit.lam == pytest.approx(0.793, rel=1e-9)


def test_fit_other_parameters():
    data = make_exponential(0.31, 0.21, range(2, 40))
    fit = fit_exponential(data)
    assert fit.alpha == pytest.approx(0.31, rel=1e-9)
    assert fit.lam == pytest.approx(0.21, rel=1e-9)


def test_fit_on_noisy_data_converges():
    rng = random.Random(99)
    data = {
        k: 0.9 * math.exp(-0.5 * k) * (1 + rng.uniform(-0.05, 0.05))
        for k in range(1, 50)
    }
    fit = fit_exponential(data)
    assert fit.lam == pytest.approx(0.5, rel=0.1)


def test_fit_failure_modes():
    with pytest.raises(FitError):
        fit_exponential({5: 1.0})  # single spike
    with pytest.raises(FitError):
        fit_exponential({1: 0.0, 2: 0.0, 3: 1.0})  # one positive point
    with pytest.raises(FitError):
        fit_exponential({5: 1.0}, start=(1.0, 1.0))
    data = make_exponential(1.12, 0.793, range(1, 60))
    with pytest.raises(FitError):
        fit_exponential(data, start=(0.4, 0.25), max_iter=1)  # no room to converge


def test_tail_mass_examples():
    assert tail_mass_log10(0.793, 500) == pytest.approx(-172.1978, abs=5e-4)
    assert tail_mass_log10(math.log(10.0), 1) == pytest.approx(-1.0)
    assert tail_mass_log10(0.793, 0) == 0.0
    with pytest.raises(ValueError):
        tail_mass_log10(0.0, 10)
    with pytest.raises(ValueError):
        tail_mass_log10(-1.0, 10)
    with pytest.raises(ValueError):
        tail_mass_log10(1.0, -1)
