"""Bi-coloured rooted trees for two-derivative RK order conditions.

Every tree of order >= 2 is rooted at a g-vertex: either the bare ``g`` tree
(order 2) or a bracket ``[t1, ..., tm]_2`` meaning g^(m)(F(t1), ..., F(tm)).
The single f vertex (order 1) only ever appears as a child.  A g-vertex
counts for two in the order, so ``rho([t1..tm]_2) = 2 + sum(rho(ti))``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .tableau import NumericTableau, SchemeSpec, eval_tableau

NOISE_FACTOR = 16.0

__all__ = [
    "BiTree",
    "F",
    "G",
    "bracket",
    "ORDER_TREES",
    "enumerate_trees",
    "elementary_weight",
    "order_residuals",
    "loglog_slope",
    "ResidualRow",
]


@dataclass(frozen=True)
class BiTree:
    """``kind`` is ``"f"`` (leaf) or ``"g"``; children are kept sorted."""

    kind: str
    children: tuple["BiTree", ...] = ()

    def __post_init__(self):
        if self.kind not in ("f", "g"):
            raise ValueError(f"kind must be 'f' or 'g', got {self.kind!r}")
        if self.kind == "f" and self.children:
            raise ValueError("the f vertex is a leaf")
        object.__setattr__(self, "children", tuple(sorted(self.children, key=_sort_key)))

    @cached_property
    def rho(self) -> int:
        if self.kind == "f":
            return 1
        return 2 + sum(t.rho for t in self.children)

    @cached_property
    def gamma(self) -> int:
        if self.kind == "f":
            return 1
        if not self.children:
            return 2
        return self.rho * (self.rho - 1) * math.prod(t.gamma for t in self.children)

    @cached_property
    def alpha(self) -> Fraction:
        """Coefficient of F(tau) in y^(rho).

        (rho - 2)! * prod over distinct children of (alpha(t) / rho(t)!)^n / n!.
        """
        if self.kind == "f" or not self.children:
            return Fraction(1)
        out = Fraction(math.factorial(self.rho - 2))
        for t, n in Counter(self.children).items():
            out *= Fraction(t.alpha, math.factorial(t.rho)) ** n / math.factorial(n)
        return out

    def __str__(self) -> str:
        if self.kind == "f":
            return "f"
        if not self.children:
            return "g"
        m = len(self.children)
        prime = "'" * m if m <= 3 else f"^({m})"
        inner = ",".join(str(t) for t in self.children)
        if m == 1:
            return f"g{prime}{inner}"
        return f"g{prime}({inner})"


def _sort_key(t: BiTree):
    return (t.rho, str(t))


F = BiTree("f")
G = BiTree("g")


def bracket(*children: BiTree) -> BiTree:
    return BiTree("g", tuple(children))


# Canonical order of the 13 trees with 2 <= rho <= 6.
ORDER_TREES: tuple[BiTree, ...] = (
    G,                                  # 1  g
    bracket(F),                         # 2  g'f
    bracket(G),                         # 3  g'g
    bracket(F, F),                      # 4  g''(f,f)
    bracket(bracket(F)),                # 5  g'g'f
    bracket(F, G),                      # 6  g''(f,g)
    bracket(F, F, F),                   # 7  g'''(f,f,f)
    bracket(bracket(G)),                # 8  g'g'g
    bracket(bracket(F, F)),             # 9  g'g''(f,f)
    bracket(F, bracket(F)),             # 10 g''(f,g'f)
    bracket(G, G),                      # 11 g''(g,g)
    bracket(F, F, G),                   # 12 g'''(f,f,g)
    bracket(F, F, F, F),                # 13 g''''(f,f,f,f)
)


def enumerate_trees(max_order: int) -> list[BiTree]:
    """Trees with 2 <= rho <= max_order, in the fixed order of ORDER_TREES."""
    if not 2 <= max_order <= 6:
        raise ValueError(f"max_order must lie in [2, 6], got {max_order}")
    return [t for t in ORDER_TREES if t.rho <= max_order]


def _inner_weights(tree: BiTree, tab: NumericTableau) -> np.ndarray:
    if tree.kind == "f":
        return tab.xi * tab.c
    prod = np.ones(tab.s)
    for t in tree.children:
        prod = prod * _inner_weights(t, tab)
    return tab.A @ prod


def elementary_weight(tree: BiTree, tab: NumericTableau) -> float:
    if tree.kind != "g":
        raise ValueError("elementary weights are defined for g-rooted trees (rho >= 2)")
    prod = np.ones(tab.s)
    for t in tree.children:
        prod = prod * _inner_weights(t, tab)
    return float(tab.b @ prod)


def loglog_slope(h, r, floor: float = 1e-13) -> float:
    """Least-squares slope of log r against log h over points with r > floor.

    Returns ``inf`` when every residual is at or below the floor (condition
    met to round-off) and ``nan`` when fewer than two points survive.
    """
    h = np.asarray(h, dtype=float)
    r = np.abs(np.asarray(r, dtype=float))
    keep = r > floor
    if not keep.any():
        return math.inf
    if keep.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(h[keep]), np.log(r[keep]), 1)[0])


@dataclass(frozen=True)
class ResidualRow:
    tree_no: int
    tree: BiTree
    h: float
    residual: float
    slope: float
    required: int

    @property
    def certified(self) -> bool:
        return self.slope >= self.required - 0.2


def order_residuals(spec: SchemeSpec, omega: float, h_list, floor: float = 1e-13) -> list[ResidualRow]:
    """Residuals |Phi(tau) - 1/gamma(tau)| at v = omega*h for every tree up to the scheme order.

    Each row carries the log-log slope of its tree's residual curve and the
    required rate ``p + 1 - rho``.  Residuals at or below ``floor`` are
    treated as exact (slope ``inf``).
    """
    h_list = [float(h) for h in h_list]
    if len(h_list) < 4:
        raise ValueError("need at least 4 stepsizes")
    if any(b >= a for a, b in zip(h_list, h_list[1:])):
        raise ValueError("h_list must be strictly decreasing")
    if omega <= 0:
        raise ValueError("omega must be positive")
    tabs = [eval_tableau(spec, omega * h) for h in h_list]
    # the closed forms cancel like eps / v^2 near v = 0
    noise = [max(floor, NOISE_FACTOR * np.finfo(float).eps / max(omega * h, 1e-3) ** 2) for h in h_list]
    rows = []
    for no, tree in enumerate(ORDER_TREES, start=1):
        if tree.rho > spec.order:
            continue
        res = [abs(elementary_weight(tree, tab) - 1.0 / tree.gamma) for tab in tabs]
        kept = [r if r > n else 0.0 for r, n in zip(res, noise)]
        slope = loglog_slope(h_list, kept, floor)
        need = spec.order + 1 - tree.rho
        for h, r in zip(h_list, res):
            rows.append(ResidualRow(no, tree, h, r, slope, need))
    return rows
