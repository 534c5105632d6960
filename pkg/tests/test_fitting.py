import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eftddirk.fitting import (
    FitProbe,
    final_fit_residual,
    internal_fit_residual,
    max_fit_residual,
    oscillatory_probes,
)
from eftddirk.tableau import NumericTableau, build_scheme, eval_tableau

from conftest import SCHEME_NAMES


def _operator_residual(tab, i, lam, h, k):
    """Apply the stage operator to x^k e^(lam x) at x = 0 by direct formula."""
    def y(x):
        return x**k * cmath.exp(lam * x)

    def dy(x):
        return (k * x ** (k - 1) if k else 0) * cmath.exp(lam * x) + lam * y(x)

    def d2y(x):
        e = cmath.exp(lam * x)
        out = lam * lam * x**k * e
        if k >= 1:
            out += 2 * k * lam * x ** (k - 1) * e
        if k >= 2:
            out += k * (k - 1) * x ** (k - 2) * e
        return out

    if i is None:
        L = y(h) - y(0) - h * dy(0) - h * h * sum(tab.b[j] * d2y(tab.c[j] * h) for j in range(tab.s))
    else:
        ci = tab.c[i]
        L = y(ci * h) - y(0) - tab.xi[i] * ci * h * dy(0) - h * h * sum(
            tab.A[i, j] * d2y(tab.c[j] * h) for j in range(i + 1)
        )
    return -L / h**k


@pytest.mark.parametrize("name", SCHEME_NAMES)
@pytest.mark.parametrize("v", [0.1, 0.5, 1.0, 2.0])
def test_degree_zero_residuals_vanish(name, v):
    tab = eval_tableau(build_scheme(name), v)
    for probe in oscillatory_probes(1.0, v):
        for i in range(tab.s):
            assert abs(internal_fit_residual(tab, i, probe)) < 1e-12
        assert abs(final_fit_residual(tab, probe)) < 1e-12


def test_max_fit_residual(spec):
    assert max_fit_residual(eval_tableau(spec, 0.7), 2.0, 0.35) < 1e-12


def test_unfitted_frequency_leaves_residual():
    tab = eval_tableau(build_scheme("3s6"), 1.0)
    assert max_fit_residual(tab, 2.0, 0.25) > 1e-6


@settings(max_examples=50, deadline=None)
@given(
    arr=st.lists(st.floats(-1, 1), min_size=11, max_size=11),
    lam_re=st.floats(-2, 2),
    lam_im=st.floats(-3, 3),
    h=st.floats(0.05, 1.0),
    k=st.integers(0, 2),
)
def test_residual_matches_direct_operator(arr, lam_re, lam_im, h, k):
    a = np.array(arr)
    c = np.array([0.0, 0.4, 0.9]) + 0.05 * a[:3]
    tab = NumericTableau(c=c, A=np.tril(a[3:9].repeat(2)[:9].reshape(3, 3)), b=a[8:11], xi=1 + 0.1 * a[:3], v=0.0)
    lam = complex(lam_re, lam_im)
    probe = FitProbe(lam, h, K=2)
    for i in range(3):
        assert internal_fit_residual(tab, i, probe, k) == pytest.approx(_operator_residual(tab, i, lam, h, k), abs=1e-10)
    assert final_fit_residual(tab, probe, k) == pytest.approx(_operator_residual(tab, None, lam, h, k), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(name=st.sampled_from(SCHEME_NAMES), v=st.floats(0.05, 1.4))
def test_conjugate_probes_are_conjugate(name, v):
    tab = eval_tableau(build_scheme(name), v)
    p, m = oscillatory_probes(1.0, v)
    for i in range(tab.s):
        assert internal_fit_residual(tab, i, m) == pytest.approx(internal_fit_residual(tab, i, p).conjugate(), abs=1e-14)


def test_probe_validation():
    with pytest.raises(ValueError):
        FitProbe(1j, 0.1, K=-1)
    with pytest.raises(ValueError):
        FitProbe(1j, 0.1, L=0)
    tab = eval_tableau(build_scheme("2s5"), 0.3)
    with pytest.raises(ValueError):
        internal_fit_residual(tab, 0, FitProbe(1j, 0.3), k=1)
    with pytest.raises(IndexError):
        internal_fit_residual(tab, 2, FitProbe(1j, 0.3))


def test_oscillatory_probe_set():
    probes = oscillatory_probes(2.0, 0.1, L=2)
    assert sorted(p.z.imag for p in probes) == pytest.approx([-0.4, -0.2, 0.2, 0.4])
