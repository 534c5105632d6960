import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from eftddirk.tableau import NumericTableau, build_scheme, eval_tableau
from eftddirk.trees import (
    F,
    G,
    ORDER_TREES,
    bracket,
    elementary_weight,
    enumerate_trees,
    loglog_slope,
    order_residuals,
)

from conftest import SCHEME_NAMES

TREE_RHO = (2, 3, 4, 4, 5, 5, 5, 6, 6, 6, 6, 6, 6)
TREE_GAMMA = (2, 6, 24, 12, 120, 40, 20, 720, 360, 180, 120, 60, 30)
TREE_DIFF = (
    "g", "g'f", "g'g", "g''(f,f)", "g'g'f", "g''(f,g)", "g'''(f,f,f)",
    "g'g'g", "g'g''(f,f)", "g''(f,g'f)", "g''(g,g)", "g'''(f,f,g)", "g^(4)(f,f,f,f)",
)


def test_tree_rho_gamma_and_labels():
    assert [t.rho for t in ORDER_TREES] == list(TREE_RHO)
    assert [t.gamma for t in ORDER_TREES] == list(TREE_GAMMA)
    assert [str(t) for t in ORDER_TREES] == list(TREE_DIFF)


@pytest.mark.parametrize("order, count", [(2, 1), (3, 2), (4, 4), (5, 7), (6, 13)])
def test_enumeration_counts(order, count):
    trees = enumerate_trees(order)
    assert len(trees) == count
    assert trees == list(ORDER_TREES[:count])


@pytest.mark.parametrize("bad", [1, 7])
def test_enumeration_range(bad):
    with pytest.raises(ValueError):
        enumerate_trees(bad)


def test_children_are_unordered():
    assert bracket(F, G) == bracket(G, F)
    assert hash(bracket(F, bracket(F))) == hash(bracket(bracket(F), F))


def test_f_is_a_leaf():
    with pytest.raises(ValueError):
        type(F)("f", (F,))


def _lie_alpha(max_order):
    """Coefficients alpha with y^(k) = sum alpha(tau) F(tau), found by solving
    a linear system built from symbolic Lie derivatives of a generic planar field."""
    y1, y2 = sp.symbols("y1 y2")
    Y = sp.Matrix([y1, y2])
    f = sp.Matrix([y2 + y1**2 * y2 + 3 * y1**3, -y1 + 2 * y2**2 + y1 * y2**3])
    J = f.jacobian(Y)
    g = sp.expand(J * f)

    def lie(expr):
        return sp.expand(expr.jacobian(Y) * f)

    def dmult(vectors):
        # g^(m)(u1, ..., um): differentiate g only, directions held fixed
        out = sp.zeros(2, 1)
        for idx in itertools.product(range(2), repeat=len(vectors)):
            term = g.diff(*[Y[j] for j in idx]) if idx else g
            for u, j in zip(vectors, idx):
                term = term * u[j]
            out += term
        return sp.expand(out)

    cache = {}

    def F_of(t):
        if t not in cache:
            cache[t] = f if t.kind == "f" else dmult([F_of(c) for c in t.children])
        return cache[t]

    rng = np.random.default_rng(7)
    points = [(sp.Rational(int(a), 7), sp.Rational(int(b), 5)) for a, b in rng.integers(-9, 10, size=(8, 2))]
    deriv = g
    found = {}
    for k in range(2, max_order + 1):
        if k > 2:
            deriv = lie(deriv)
        trees = [t for t in ORDER_TREES if t.rho == k]
        rows, rhs = [], []
        for a, b in points:
            sub = {y1: a, y2: b}
            for comp in range(2):
                rows.append([F_of(t)[comp].subs(sub) for t in trees])
                rhs.append(deriv[comp].subs(sub))
        M = sp.Matrix(rows)
        sol = (M.T * M).solve(M.T * sp.Matrix(rhs))
        assert sp.simplify(M * sol - sp.Matrix(rhs)) == sp.zeros(len(rhs), 1)
        for t, s in zip(trees, sol):
            found[t] = Fraction(int(s.p), int(s.q))
    return found


def test_alpha_matches_lie_derivative_expansion():
    oracle = _lie_alpha(6)
    for t in ORDER_TREES:
        assert t.alpha == oracle[t], str(t)


def test_alpha_by_hand():
    # y(4) = g''(f,f) + g'g,  y(5) = g'''(f,f,f) + 3 g''(f,g) + g'g'f
    assert G.alpha == 1
    assert bracket(G).alpha == 1 and bracket(F, F).alpha == 1
    assert bracket(F, G).alpha == 3
    assert bracket(bracket(F)).alpha == 1
    assert bracket(F, F, F).alpha == 1


def _classical(b, A, c):
    b = np.asarray(b, float)
    A = np.asarray(A, float)
    c = np.asarray(c, float)
    return NumericTableau(c=c, A=A, b=b, xi=np.ones_like(c), v=0.0)


def test_weight_of_order_two_tree_is_half(spec):
    tab = eval_tableau(spec, 1e-6)
    assert abs(elementary_weight(G, tab) - 0.5) < 1e-10


def test_weight_gff_2s4b_limit():
    tab = eval_tableau(build_scheme("2s4b"), 1e-6)
    assert tab.b == pytest.approx([1 / 6, 1 / 3], abs=1e-10)
    assert elementary_weight(bracket(F, F), tab) == pytest.approx(1 / 12, abs=1e-10)


def test_weight_is_zero_for_zero_b():
    tab = _classical([0, 0], [[0.1, 0], [0.2, 0.3]], [0.3, 0.9])
    for t in ORDER_TREES:
        assert elementary_weight(t, tab) == 0.0


def test_elementary_weight_rejects_leaf():
    with pytest.raises(ValueError):
        elementary_weight(F, _classical([1], [[0]], [0]))


@settings(max_examples=40, deadline=None)
@given(
    arr=st.lists(st.floats(-2, 2), min_size=14, max_size=14),
    alpha=st.floats(-3, 3),
)
def test_weights_are_linear_in_b(arr, alpha):
    a = np.array(arr)
    A = np.tril(a[:9].reshape(3, 3))
    c = a[9:12]
    b1 = np.array([a[12], a[13], 0.5])
    b2 = np.array([0.3, -a[12], a[13]])
    tab = lambda b: NumericTableau(c=c, A=A, b=b, xi=np.ones(3), v=0.0)
    for t in ORDER_TREES:
        lhs = elementary_weight(t, tab(b1 + alpha * b2))
        rhs = elementary_weight(t, tab(b1)) + alpha * elementary_weight(t, tab(b2))
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_order_conditions_met_in_classical_limit():
    # residual of every condition up to the design order vanishes at v -> 0
    for name in SCHEME_NAMES:
        spec = build_scheme(name)
        tab = eval_tableau(spec, 1e-5)
        for t in ORDER_TREES:
            if t.rho <= spec.order:
                assert abs(elementary_weight(t, tab) - 1 / t.gamma) < 1e-8, (name, str(t))


def test_order_residual_slopes_certify(spec):
    rows = order_residuals(spec, 1.0, [2.0**-k for k in range(1, 7)])
    assert rows
    assert all(r.certified for r in rows), [(r.tree_no, r.slope) for r in rows if not r.certified]


def test_order_two_tree_slope_2s4a():
    rows = order_residuals(build_scheme("2s4a"), 1.0, [2.0**-k for k in range(3, 9)])
    row = next(r for r in rows if r.tree_no == 1)
    assert row.required == 3
    assert row.slope >= 2.8


def test_order_residuals_validation():
    spec = build_scheme("3s6")
    with pytest.raises(ValueError):
        order_residuals(spec, 1.0, [0.5, 0.25, 0.125])
    with pytest.raises(ValueError):
        order_residuals(spec, 1.0, [0.5, 0.25, 0.25, 0.1])
    with pytest.raises(ValueError):
        order_residuals(spec, 0.0, [0.5, 0.25, 0.125, 0.0625])


def test_loglog_slope_edges():
    h = [1, 0.5, 0.25, 0.125]
    assert loglog_slope(h, [8 * x**3 for x in h]) == pytest.approx(3.0)
    assert loglog_slope(h, [0, 0, 0, 0]) == math.inf
    assert math.isnan(loglog_slope(h, [1, 0, 0, 0]))
