import cmath
import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eftddirk.analysis import (
    LEADING_PHASE_TERMS,
    phase_curves,
    phase_leading_terms,
    stability_R,
    stability_R_split,
    stability_region,
    leading_dissipation,
    leading_dispersion,
)
from eftddirk.integrator import Problem, StepConfig, step
from eftddirk.tableau import build_scheme, eval_tableau

from conftest import SCHEME_NAMES


def _rotation():
    return Problem("rotation", f=lambda y: np.array([-y[1], y[0]]), g=lambda y: -y, y0=np.array([1.0, 0.0]), t_span=(0, 1))


def _oracle_R(spec, theta, v):
    tab = eval_tableau(spec, v)
    y = step(tab, _rotation(), [1.0, 0.0], StepConfig(h=theta, omega=v / theta, fp_tol=1e-15, fp_max_iter=2000))
    return complex(y[0], y[1])


def test_theta_zero(spec):
    assert stability_R(spec, 0.0, 0.7) == 1


@pytest.mark.parametrize("theta", [0.3, 1.0, 2.5, 4.0])
def test_exact_on_the_fitted_frequency(spec, theta):
    R = stability_R(spec, theta, theta)
    assert abs(abs(R) - 1) < 1e-12
    assert abs(cmath.phase(R / cmath.exp(1j * theta))) < 1e-12


def test_3s6_stable_at_unit_point():
    assert abs(stability_R(build_scheme("3s6"), 1.0, 1.0)) <= 1


def test_matches_integrator_oracle(spec):
    rng = np.random.default_rng(3)
    for theta, v in rng.uniform(0.01, 1.0, size=(100, 2)):
        assert abs(stability_R(spec, theta, v) - _oracle_R(spec, theta, v)) < 1e-11


def test_split_grouping_differs_from_oracle():
    spec = build_scheme("3s6")
    R, P = stability_R(spec, 1.3, 0.7), stability_R_split(spec, 1.3, 0.7)
    assert R.real == pytest.approx(P.real, abs=1e-14)
    assert abs(R.imag - P.imag) > 0.5
    assert abs(R - _oracle_R(spec, 1.3, 0.7)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(name=st.sampled_from(SCHEME_NAMES), theta=st.floats(0.01, 3), v=st.floats(0.01, 1.4))
def test_conjugate_symmetry(name, theta, v):
    spec = build_scheme(name)
    # y' = -i Lambda y gives the conjugate amplification factor
    assert stability_R(spec, -theta, v) == pytest.approx(stability_R(spec, theta, v).conjugate(), abs=1e-13)


def test_region_diagonal_and_degenerate_grid(spec):
    reg = stability_region(spec, grid_n=50)
    diag = np.diag(reg.abs_R)
    ok = np.isfinite(diag)
    assert np.all(np.abs(diag[ok] - 1) < 1e-11)
    assert np.all(reg.mask[np.diag_indices(50)][ok])
    tiny = stability_region(spec, grid_n=2)
    assert tiny.abs_R.shape == (2, 2)


def test_region_flags_pole_columns():
    spec = build_scheme("2s4a")  # c2 = 1 has a pole at v = pi/2
    reg = stability_region(spec, v_range=(np.pi / 2 - 0.1, np.pi / 2 + 0.1), grid_n=3)
    assert reg.pole[:, 1].all()
    assert not reg.mask[:, 1].any()


def test_region_grid_n_validation():
    with pytest.raises(ValueError):
        stability_region(build_scheme("3s6"), grid_n=1)


def test_region_csv():
    reg = stability_region(build_scheme("2s5"), grid_n=3)
    text = reg.to_csv()
    lines = text.splitlines()
    assert lines[0] == "theta,omega_h,abs_R,in_region"
    assert len(lines) == 10
    buf = io.StringIO()
    reg.to_csv(buf)
    assert buf.getvalue() == text


@pytest.mark.parametrize("opt, base", [("2s4a-opt", "2s4a"), ("2s4b-opt", "2s4b")])
def test_optimized_regions_are_larger(opt, base):
    a = stability_region(build_scheme(opt), grid_n=100)
    b = stability_region(build_scheme(base), grid_n=100)
    assert a.stable_cells >= b.stable_cells


def test_leading_dispersion_value():
    q, C = leading_dispersion("2s4a", 0.5)
    assert q == 5
    assert C == pytest.approx(-0.0171875, rel=1e-15)


def test_leading_terms_vanish_at_r_one():
    for fam in LEADING_PHASE_TERMS:
        assert leading_dispersion(fam, 1.0, 0.3)[1] == pytest.approx(0, abs=1e-18)
        if fam != "2s5":
            assert leading_dissipation(fam, 1.0, 0.3)[1] == pytest.approx(0, abs=1e-18)
    assert leading_dissipation("2s5", 1.0)[1] == 0.0


def test_phase_report_2s4a():
    rep = phase_leading_terms(build_scheme("2s4a"), 0.5)
    assert rep.disp_order == 4
    assert rep.disp_coeff == pytest.approx(-0.0171875, rel=0.01)
    assert rep.dis_order == 5


@pytest.mark.parametrize("name", ["2s4a-opt", "2s4b-opt"])
def test_optimized_phase_order(name):
    rep = phase_leading_terms(build_scheme(name), 0.5)
    assert rep.disp_order >= 6


@pytest.mark.parametrize("name", SCHEME_NAMES)
def test_errors_vanish_at_r_one(name):
    theta = 0.8 * 2.0 ** (-0.5 * np.arange(10))
    _, disp, dis = phase_curves(build_scheme(name), 1.0, theta)
    assert np.all(np.abs(disp) <= 1e-12)
    assert np.all(np.abs(dis) <= 1e-12)


def test_phase_unwrapping_past_pi():
    theta = np.array([4.0, 3.5, 3.0])
    _, disp, _ = phase_curves(build_scheme("3s6"), 1.0, theta)
    assert np.all(np.abs(disp) < 1e-11)


def test_phase_validation():
    spec = build_scheme("3s6")
    with pytest.raises(ValueError):
        phase_leading_terms(spec, 1.0)
    with pytest.raises(ValueError):
        phase_leading_terms(spec, 0.5, [0.1, 0.2, 0.3, 0.4, 0.5])
    with pytest.raises(ValueError):
        phase_leading_terms(spec, 0.5, [0.4, 0.2, 0.1])


def test_floor_limited_report():
    rep = phase_leading_terms(build_scheme("3s6"), 0.5, 1e-3 * 2.0 ** -np.arange(6))
    assert rep.floor_limited
    assert rep.disp_order is None
