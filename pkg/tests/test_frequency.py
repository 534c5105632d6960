import math

import numpy as np
import pytest

from eftddirk.frequency import (
    INV_PHI,
    FreqSearch,
    NonFiniteObjective,
    dense_scan,
    estimate_omega,
    golden_section,
)
from eftddirk.problems import harmonic, sine_gordon
from eftddirk.tableau import build_scheme


def test_quadratic_minimum():
    res = golden_section(lambda x: (x - 1.3) ** 2 + 2, (0, 4), tol=1e-8)
    assert res.omega == pytest.approx(1.3, abs=1e-7)
    assert res.value == pytest.approx(2.0)


def test_probe_count_and_width():
    res = golden_section(lambda x: abs(x - 0.2), (0, 1), tol=1e-3)
    assert len(res.probes) == res.iterations + 2
    assert res.width <= 1e-3
    assert res.iterations == math.ceil(math.log(1e-3) / math.log(INV_PHI))


def test_monotone_objective_returns_edge():
    assert golden_section(lambda x: x, (2, 3), tol=1e-6).omega == 2
    assert golden_section(lambda x: -x, (2, 3), tol=1e-6).omega == 3


def test_non_finite_objective_aborts():
    with pytest.raises(NonFiniteObjective):
        golden_section(lambda x: math.nan, (0, 1))


def test_bad_bracket():
    with pytest.raises(ValueError):
        golden_section(lambda x: x, (1, 1))
    with pytest.raises(ValueError):
        FreqSearch((0.0, 1.0))
    with pytest.raises(ValueError):
        FreqSearch((1.0, 2.0), objective="energy")


def test_harmonic_frequency_recovered():
    prob = harmonic(3.0, t_end=5.0)
    res = estimate_omega(build_scheme("2s5"), prob, 0.1, FreqSearch((2.0, 4.0), tol=1e-6))
    assert res.omega == pytest.approx(3.0, abs=1e-3)


def test_agrees_with_dense_scan():
    prob = harmonic(2.0, t_end=3.0)
    spec = build_scheme("2s4b")
    grid = np.linspace(1.5, 2.5, 41)
    scan = dense_scan(spec, prob, 0.1, grid)
    res = estimate_omega(spec, prob, 0.1, FreqSearch((1.5, 2.5), tol=1e-5))
    assert abs(res.omega - grid[np.argmin(scan)]) <= grid[1] - grid[0]


def test_invariant_objective_needs_invariant_and_reference_checks():
    from eftddirk.problems import almost_periodic

    with pytest.raises(ValueError):
        estimate_omega(build_scheme("3s6"), almost_periodic(10.0), 0.1, FreqSearch((0.5, 1.5), objective="invariant-drift"))
    with pytest.raises(ValueError):
        estimate_omega(build_scheme("3s6"), sine_gordon(N=8, t_end=1.0), 0.1, FreqSearch((0.5, 1.5)))
