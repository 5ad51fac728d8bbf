"""Adaptive Gauss-Legendre panels and sphere averages.

All routines take vectorized integrands (array in, array out) and charge a
shared evaluation budget so callers can cap total work.  The sphere average
of a field about a point reduces to a 1-d arc integral whenever the field
is radial about some center (possibly as a finite sum of such parts), which
is what keeps the singular radial quadratures cheap in both dimensions.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .core import QuadratureBudgetError, ScalarField


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel(a: float, b: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


class EvalBudget:
    """Mutable counter of field evaluations shared across one computation."""

    def __init__(self, limit: int):
        self.limit = int(limit)
        self.used = 0

    def charge(self, count: int):
        self.used += int(count)
        if self.used > self.limit:
            raise QuadratureBudgetError(
                f"evaluation budget exhausted ({self.used} > {self.limit})"
            )


def adaptive_interval(
    fvec,
    a: float,
    b: float,
    tol_abs: float,
    budget: EvalBudget | None = None,
    order: int = 12,
    max_depth: int = 48,
) -> tuple[float, float]:
    """Adaptive bisection with embedded GL(order) / GL(2*order) estimates.

    Returns (value, error_estimate); panels that hit max_depth contribute
    their residual to the estimate instead of raising.
    """
    if b <= a:
        return 0.0, 0.0
    total = 0.0
    err = 0.0
    width0 = b - a
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        x1, w1 = panel(lo, hi, order)
        x2, w2 = panel(lo, hi, 2 * order)
        if budget is not None:
            budget.charge(len(x1) + len(x2))
        y1 = np.asarray(fvec(x1), dtype=float)
        y2 = np.asarray(fvec(x2), dtype=float)
        i1 = float(y1 @ w1)
        i2 = float(y2 @ w2)
        local_err = abs(i2 - i1)
        local_tol = tol_abs * (hi - lo) / width0
        noise = 2e-15 * (abs(total) + abs(i2) + float(np.max(np.abs(y2))) * (hi - lo))
        if local_err <= max(local_tol, noise) or depth >= max_depth:
            total += i2
            err += local_err
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
    return total, err


def sphere_rule(n: int, m: int, align: np.ndarray | None = None):
    """Full-sphere rule: directions (M, n) and weights summing to |S^{n-1}|.

    n=2 uses the periodic trapezoid (spectrally accurate), n=3 a
    Gauss-Legendre x trapezoid product.  Both node sets are antipodally
    symmetric.  ``align`` rotates the first node onto the given direction
    so that radial geometry is sampled consistently.
    """
    if n == 2:
        thetas = 2 * math.pi * np.arange(m) / m
        dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
        weights = np.full(m, 2 * math.pi / m)
        if align is not None:
            a = align / np.linalg.norm(align)
            rot = np.array([[a[0], -a[1]], [a[1], a[0]]])
            dirs = dirs @ rot.T
        return dirs, weights
    m_polar = max(4, m // 2)
    m_azim = 2 * m_polar
    mu, wmu = gauss_legendre(m_polar)
    phis = 2 * math.pi * np.arange(m_azim) / m_azim
    st = np.sqrt(np.maximum(0.0, 1.0 - mu**2))
    dirs = np.stack(
        [
            np.outer(st, np.cos(phis)).ravel(),
            np.outer(st, np.sin(phis)).ravel(),
            np.outer(mu, np.ones_like(phis)).ravel(),
        ],
        axis=1,
    )
    weights = np.outer(wmu, np.full(m_azim, 2 * math.pi / m_azim)).ravel()
    if align is not None:
        a = align / np.linalg.norm(align)
        # Householder reflection taking e_z to a (orthogonal, so the rule
        # stays a valid antipodally symmetric sphere rule)
        u = np.array([0.0, 0.0, 1.0]) - a
        nu = u @ u
        if nu > 1e-14:
            dirs = dirs - 2.0 * np.outer((dirs @ u) / nu, u)
    return dirs, weights


class AngularAverager:
    """Mean of a field over spheres of radius r about a base point x.

    ``means(r_array, tol)`` returns (A, err) with
    ``A[i] = integral over S^{n-1} of f(x + r_i w) dsigma(w)``.
    """

    def means(self, r_array, tol_per_r):  # pragma: no cover - interface
        raise NotImplementedError


class ArcAverager(AngularAverager):
    """Exact 1-d reduction for sums of radially structured parts.

    For parts with a known local support radius the angular window that
    actually meets the support is computed analytically, so spheres that
    miss a compact part entirely cost nothing.
    """

    def __init__(self, parts, x, n, budget: EvalBudget | None = None):
        # parts: list of (weight, profile callable, center array, local support)
        self.n = n
        self.budget = budget
        self.items = []
        x = np.asarray(x, dtype=float)
        for w, profile, center, support in parts:
            d = float(np.linalg.norm(x - np.asarray(center, dtype=float)))
            self.items.append((w, profile, d, support))

    def _arc_single(self, profile, d, r, support, tol):
        n = self.n
        if d == 0.0:
            if support is not None and r >= support:
                return 0.0, 0.0
            if self.budget is not None:
                self.budget.charge(1)
            area = 2 * math.pi if n == 2 else 4 * math.pi
            return area * float(np.asarray(profile(np.array([r])))[0]), 0.0
        c_hi = 1.0
        if support is not None:
            if abs(d - r) >= support:
                return 0.0, 0.0
            c_hi = min(1.0, (support**2 - d * d - r * r) / (2.0 * d * r))
        if n == 2:
            def fvec(g):
                rho = np.sqrt(np.maximum(0.0, d * d + r * r + 2 * d * r * np.cos(g)))
                return np.asarray(profile(rho), dtype=float)

            g_lo = math.acos(c_hi)
            val, err = adaptive_interval(fvec, g_lo, math.pi, tol / 2.0, self.budget, order=16)
            return 2.0 * val, 2.0 * err
        def fvec(c):
            rho = np.sqrt(np.maximum(0.0, d * d + r * r + 2 * d * r * c))
            return np.asarray(profile(rho), dtype=float)

        val, err = adaptive_interval(fvec, -1.0, c_hi, tol / (2 * math.pi), self.budget, order=16)
        return 2 * math.pi * val, 2 * math.pi * err

    def means(self, r_array, tol_per_r):
        r_array = np.asarray(r_array, dtype=float)
        A = np.zeros_like(r_array)
        E = np.zeros_like(r_array)
        for w, profile, d, support in self.items:
            wt = abs(w) if abs(w) > 0 else 1.0
            for i, r in enumerate(r_array):
                v, e = self._arc_single(profile, d, float(r), support, tol_per_r / wt)
                A[i] += w * v
                E[i] += abs(w) * e
        return A, E


class ProductRuleAverager(AngularAverager):
    """Fixed product sphere rule for unstructured fields, with refinement."""

    def __init__(self, field: ScalarField, x, n, budget: EvalBudget | None = None, m: int = 64):
        self.field = field
        self.x = np.asarray(x, dtype=float)
        self.n = n
        self.budget = budget
        align = self.x if np.linalg.norm(self.x) > 0 else None
        self.rule = sphere_rule(n, m, align)
        self.rule_fine = sphere_rule(n, 2 * m, align)

    def _apply(self, rule, r_array):
        dirs, wts = rule
        pts = self.x[None, None, :] + np.multiply.outer(r_array, dirs)
        flat = pts.reshape(-1, self.n)
        if self.budget is not None:
            self.budget.charge(flat.shape[0])
        vals = self.field(flat).reshape(len(r_array), len(wts))
        return vals @ wts

    def means(self, r_array, tol_per_r):
        r_array = np.asarray(r_array, dtype=float)
        coarse = self._apply(self.rule, r_array)
        fine = self._apply(self.rule_fine, r_array)
        return fine, np.abs(fine - coarse)


def make_averager(field: ScalarField, x, budget: EvalBudget | None = None) -> AngularAverager:
    """Pick the exact arc reduction when the field structure allows it."""
    parts = _radial_parts(field)
    if parts is not None:
        return ArcAverager(parts, x, field.dim, budget)
    return ProductRuleAverager(field, x, field.dim, budget)


def _radial_parts(field: ScalarField, weight: float = 1.0):
    if field.radial_profile is not None:
        support = field.support_radius
        if support is not None and math.isfinite(support):
            # honest metadata: the profile vanishes beyond the support
            # radius about the origin minus the center offset
            local = support - float(np.linalg.norm(field.center_array))
        else:
            local = None
        return [(weight, field.radial_profile, field.center_array, local)]
    if field.parts:
        out = []
        for w, part in field.parts:
            sub = _radial_parts(part, weight * w)
            if sub is None:
                return None
            out.extend(sub)
        return out
    return None


def mass_distances(field: ScalarField, x) -> list[float]:
    """Distances from x to the centers of the field's radial parts.

    Spheres about x at these radii pass through the parts' centers, so
    probing the field's magnitude there avoids missing compactly
    supported mass when x is far away.
    """
    x = np.asarray(x, dtype=float)
    parts = _radial_parts(field)
    if parts is not None:
        return [float(np.linalg.norm(x - c)) for _, _, c, _ in parts]
    return [float(np.linalg.norm(x - field.center_array))]
