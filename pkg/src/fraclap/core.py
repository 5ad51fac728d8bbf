"""Shared types for the fractional Laplacian toolkit.

This module holds the (dimension, order) parameter pair, the scalar-field
representation with the tail metadata the singular quadratures need, the
uniform grid container used by the transform evaluator, the kernel
normalization constants, and the machine-readable report emitted by every
verification suite.  It also provides the catalog of analytically
understood test fields and the log-log decay-exponent fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field, replace
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "ParameterError",
    "MetadataError",
    "DomainError",
    "DivergenceError",
    "QuadratureBudgetError",
    "PeriodizationError",
    "SUPPORTED_DIMENSIONS",
    "FracParams",
    "ScalarField",
    "GridField",
    "KernelConstants",
    "Case",
    "ExponentFit",
    "Report",
    "radial_field",
    "combine_fields",
    "scale_field",
    "shift_field",
    "power_field",
    "make_catalog_field",
    "fit_decay_exponent",
    "weighted_tail_integral",
]


class ParameterError(ValueError):
    """Invalid parameters or malformed catalog arguments."""


class MetadataError(ValueError):
    """A field lacks the analytic metadata an operation requires."""


class DomainError(ValueError):
    """Arguments outside the admissible domain of a kernel or operation."""


class DivergenceError(ArithmeticError):
    """The requested integral diverges for the given field metadata."""


class QuadratureBudgetError(RuntimeError):
    """Evaluation budget exhausted before reaching the tolerance."""


class PeriodizationError(ValueError):
    """Grid samples wrap around the box; the transform result is meaningless."""


SUPPORTED_DIMENSIONS = (2, 3)


@dataclass(frozen=True)
class FracParams:
    """Dimension n and operator order alpha; every kernel depends on both."""

    n: int
    alpha: float

    def __post_init__(self):
        if self.n not in SUPPORTED_DIMENSIONS:
            raise ParameterError(
                f"n must be one of {SUPPORTED_DIMENSIONS}, got {self.n!r}"
            )
        if not (0.0 < float(self.alpha) < 2.0):
            raise ParameterError("alpha must lie in (0,2)")

    @property
    def sphere_area(self) -> float:
        """Surface measure of the unit sphere S^{n-1}."""
        return 2.0 * math.pi ** (self.n / 2.0) / math.gamma(self.n / 2.0)

    @property
    def critical_exponent(self) -> float:
        """(n + alpha) / (n - alpha), the scale-invariant source exponent."""
        return (self.n + self.alpha) / (self.n - self.alpha)


def _as_points(points, dim: int) -> tuple[np.ndarray, bool]:
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ParameterError(f"points must have shape (m, {dim}), got {pts.shape}")
    return pts, single


@dataclass(frozen=True)
class ScalarField:
    """An evaluatable function R^n -> R with analytic tail metadata.

    ``fn`` maps an (m, n) float array of points to an (m,) value array.
    ``decay_exponent`` is the beta with ``|f(x)| = O(|x|^-beta)``;
    ``math.inf`` marks faster-than-any-power decay, ``None`` marks a
    bounded non-decaying field whose value at infinity is ``tail_limit``.
    ``support_radius``, when finite, promises that the field is exactly
    zero outside that radius about the origin.  ``radial_profile`` and
    ``center`` describe fields of the form ``profile(|x - center|)``;
    ``parts`` describes finite linear combinations.  Both are performance
    structure used by the quadratures, never a change in semantics.
    ``kink_radii`` lists radii about ``center`` where smoothness degrades
    (support boundaries, matching spheres); evaluators near those spheres
    inflate their error estimates.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    dim: int
    decay_exponent: Optional[float] = None
    is_radial: bool = False
    support_radius: Optional[float] = None
    moment_zero: bool = False
    tail_limit: Optional[float] = None
    center: tuple[float, ...] = ()
    radial_profile: Optional[Callable[[np.ndarray], np.ndarray]] = None
    parts: Optional[tuple[tuple[float, "ScalarField"], ...]] = None
    kink_radii: tuple[float, ...] = ()

    def __post_init__(self):
        if self.dim not in SUPPORTED_DIMENSIONS:
            raise ParameterError(f"field dimension must be in {SUPPORTED_DIMENSIONS}")
        if not self.center:
            object.__setattr__(self, "center", (0.0,) * self.dim)
        if len(self.center) != self.dim:
            raise ParameterError("center length must match field dimension")

    def __call__(self, points):
        pts, single = _as_points(points, self.dim)
        vals = np.asarray(self.fn(pts), dtype=float).reshape(pts.shape[0])
        return float(vals[0]) if single else vals

    @property
    def center_array(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    def in_integrability_class(self, params: FracParams) -> bool:
        """Metadata check that ``int |f| / (1 + |x|^{n+alpha})`` is finite.

        True for compactly supported fields, fields with any positive decay
        rate, and bounded fields with a known limit at infinity.
        """
        if self.support_radius is not None and math.isfinite(self.support_radius):
            return True
        if self.decay_exponent is not None and self.decay_exponent > 0:
            return True
        return self.tail_limit is not None

    def bounding_kinks(self) -> tuple[np.ndarray, np.ndarray]:
        """All (center, radius) spheres where the field may lose smoothness."""
        centers, radii = [], []
        for r in self.kink_radii:
            centers.append(self.center_array)
            radii.append(r)
        if self.parts:
            for _, part in self.parts:
                c, r = part.bounding_kinks()
                centers.extend(c)
                radii.extend(r)
        if not centers:
            return np.zeros((0, self.dim)), np.zeros(0)
        return np.asarray(centers), np.asarray(radii, dtype=float)


def radial_field(profile, dim, *, center=None, **meta) -> ScalarField:
    """Build a field ``profile(|x - center|)`` carrying its radial structure."""
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)

    def fn(points):
        r = np.sqrt(np.sum((points - c) ** 2, axis=1))
        return np.asarray(profile(r), dtype=float)

    meta.setdefault("is_radial", bool(np.all(c == 0.0)))
    return ScalarField(
        fn=fn,
        dim=dim,
        center=tuple(float(v) for v in c),
        radial_profile=profile,
        **meta,
    )


def combine_fields(terms: Sequence[tuple[float, ScalarField]], **meta) -> ScalarField:
    """Linear combination ``sum w_i f_i`` with structure kept for quadrature.

    Metadata defaults are conservative: the slowest decay wins, the support
    radius is the largest one (infinite if any term is not compactly
    supported), and ``moment_zero`` must be asserted by the caller via
    ``meta`` when it is known analytically.
    """
    terms = tuple((float(w), f) for w, f in terms)
    if not terms:
        raise ParameterError("combine_fields needs at least one term")
    dim = terms[0][1].dim
    if any(f.dim != dim for _, f in terms):
        raise ParameterError("all terms must share one dimension")

    def fn(points):
        out = np.zeros(points.shape[0])
        for w, f in terms:
            out += w * f(points)
        return out

    decays = [f.decay_exponent for _, f in terms]
    meta.setdefault(
        "decay_exponent", None if any(d is None for d in decays) else min(decays)
    )
    supports = [f.support_radius for _, f in terms]
    if all(s is not None and math.isfinite(s) for s in supports):
        meta.setdefault("support_radius", max(supports))
    if meta.get("decay_exponent") is None and meta.get("support_radius") is None:
        limits = [f.tail_limit for _, f in terms]
        if all(l is not None for l in limits):
            meta.setdefault("tail_limit", sum(w * l for (w, _), l in zip(terms, limits)))
    meta.setdefault("is_radial", False)
    return ScalarField(fn=fn, dim=dim, parts=terms, **meta)


def scale_field(f: ScalarField, a: float) -> ScalarField:
    """Pointwise multiple ``a * f`` with metadata preserved."""
    if f.parts:
        return combine_fields(
            [(a * w, g) for w, g in f.parts],
            decay_exponent=f.decay_exponent,
            support_radius=f.support_radius,
            moment_zero=f.moment_zero,
            is_radial=f.is_radial,
            tail_limit=None if f.tail_limit is None else a * f.tail_limit,
        )
    profile = f.radial_profile
    new_profile = None if profile is None else (lambda r: a * np.asarray(profile(r)))
    return replace(
        f,
        fn=lambda pts: a * f.fn(pts),
        radial_profile=new_profile,
        tail_limit=None if f.tail_limit is None else a * f.tail_limit,
    )


def shift_field(f: ScalarField, h) -> ScalarField:
    """Translate: ``shift_field(f, h)(x) = f(x - h)``."""
    h = np.asarray(h, dtype=float)
    if h.shape != (f.dim,):
        raise ParameterError("shift vector must match field dimension")
    support = f.support_radius
    if support is not None and math.isfinite(support):
        support = support + float(np.linalg.norm(h))
    if f.parts:
        return combine_fields(
            [(w, shift_field(g, h)) for w, g in f.parts],
            decay_exponent=f.decay_exponent,
            support_radius=support,
            moment_zero=f.moment_zero,
        )
    new_center = tuple(np.asarray(f.center) + h)
    return replace(
        f,
        fn=lambda pts: f.fn(pts - h),
        center=new_center,
        is_radial=bool(np.all(np.asarray(new_center) == 0.0)),
        support_radius=support,
    )


def power_field(f: ScalarField, p: float, *, decay_exponent=None) -> ScalarField:
    """Pointwise power ``f^p`` for nonnegative fields."""
    profile = f.radial_profile
    new_profile = None if profile is None else (lambda r: np.asarray(profile(r)) ** p)
    if decay_exponent is None and f.decay_exponent is not None:
        decay_exponent = f.decay_exponent * p if math.isfinite(f.decay_exponent) else math.inf
    return ScalarField(
        fn=lambda pts: np.asarray(f.fn(pts), dtype=float) ** p,
        dim=f.dim,
        decay_exponent=decay_exponent,
        is_radial=f.is_radial,
        support_radius=f.support_radius,
        center=f.center,
        radial_profile=new_profile,
        kink_radii=f.kink_radii,
    )


# ---------------------------------------------------------------------------
# catalog


def _bump_profile(r, radius=1.0):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = np.abs(r) < radius
    t = (r[inside] / radius) ** 2
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t))
    return out


DIPOLE_SEPARATION = 2.0  # lobe centers at +/- 2 e_1, bump radius 1


def make_catalog_field(name: str, params: FracParams, args: Sequence[float] = ()) -> ScalarField:
    """Construct one of the named analytic test fields.

    Parameters
    ----------
    name : str
        One of ``constant``, ``gaussian``, ``bubble``, ``bump``, ``dipole``.
    params : FracParams
        Sets the dimension, and for the bubble the profile exponent
        (n - alpha)/2.
    args : sequence of float
        Entry-specific arguments:

        - ``constant``: (value,)
        - ``gaussian``: () or (width,), field exp(-|x/width|^2)
        - ``bubble``: (t,) or (t, x0_1, ..., x0_n), field
          (t / (t^2 + |x - x0|^2))^{(n-alpha)/2}
        - ``bump``: () or (radius,) or (radius, c_1, ..., c_n), the standard
          smooth compactly supported profile exp(1 - 1/(1 - |x/radius|^2))
        - ``dipole``: (), the fixed zero-mean two-lobe field
          bump(x - a) - bump(x + a) with a = 2 e_1

    Returns
    -------
    ScalarField with honest metadata (decay exponent, support radius,
    zero-mean flag) for the chosen entry.
    """
    n = params.n
    args = tuple(float(a) for a in args)
    if name == "constant":
        if len(args) != 1:
            raise ParameterError("constant takes exactly one argument (value)")
        c = args[0]
        return radial_field(
            lambda r: np.full_like(np.asarray(r, dtype=float), c),
            n,
            tail_limit=c,
            is_radial=True,
        )
    if name == "gaussian":
        if len(args) > 1:
            raise ParameterError("gaussian takes at most one argument (width)")
        width = args[0] if args else 1.0
        if width <= 0:
            raise ParameterError("gaussian width must be positive")
        return radial_field(
            lambda r: np.exp(-((np.asarray(r, dtype=float) / width) ** 2)),
            n,
            decay_exponent=math.inf,
        )
    if name == "bubble":
        if not args:
            raise ParameterError("bubble requires a scale t > 0")
        t = args[0]
        if t <= 0:
            raise ParameterError("bubble scale t must be positive")
        rest = args[1:]
        if rest and len(rest) != n:
            raise ParameterError(f"bubble center must have {n} coordinates")
        center = np.asarray(rest, dtype=float) if rest else np.zeros(n)
        q = (n - params.alpha) / 2.0

        def profile(r):
            return (t / (t * t + np.asarray(r, dtype=float) ** 2)) ** q

        return radial_field(profile, n, center=center, decay_exponent=n - params.alpha)
    if name == "bump":
        if len(args) not in (0, 1, 1 + n):
            raise ParameterError("bump takes (), (radius,), or (radius, center...)")
        radius = args[0] if args else 1.0
        if radius <= 0:
            raise ParameterError("bump radius must be positive")
        center = np.asarray(args[1:], dtype=float) if len(args) > 1 else np.zeros(n)
        support = radius + float(np.linalg.norm(center))
        return radial_field(
            lambda r: _bump_profile(r, radius),
            n,
            center=center,
            decay_exponent=math.inf,
            support_radius=support,
            kink_radii=(radius,),
        )
    if name == "dipole":
        if args:
            raise ParameterError("dipole takes no arguments")
        a = np.zeros(n)
        a[0] = DIPOLE_SEPARATION
        pos = make_catalog_field("bump", params, (1.0,))
        return combine_fields(
            [(1.0, shift_field(pos, a)), (-1.0, shift_field(pos, -a))],
            moment_zero=True,
            support_radius=DIPOLE_SEPARATION + 1.0,
            decay_exponent=math.inf,
        )
    raise ParameterError(f"unknown catalog field {name!r}")


# ---------------------------------------------------------------------------
# decay-exponent fitting


def fit_decay_exponent(f: ScalarField, radii: Sequence[float], direction) -> float:
    """Empirical beta in ``|f| ~ r^-beta`` along a ray.

    Least-squares slope of log |f(r * direction)| against log r, negated.
    Radii must be increasing, at least four of them, all beyond any finite
    support radius; the field must be nonzero and finite at every sample.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size < 4:
        raise ParameterError("need at least 4 radii to fit a decay exponent")
    if np.any(np.diff(radii) <= 0):
        raise ParameterError("radii must be strictly increasing")
    if f.support_radius is not None and math.isfinite(f.support_radius):
        if radii[0] <= f.support_radius:
            raise ParameterError("all radii must lie beyond the support radius")
    d = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d)
    if norm == 0:
        raise ParameterError("direction must be a nonzero vector")
    d = d / norm
    points = radii[:, None] * d[None, :]
    vals = f(points)
    if np.any(~np.isfinite(vals)) or np.any(vals == 0.0):
        raise DomainError("field is zero or non-finite at a sample radius; cannot take log")
    slope = np.polyfit(np.log(radii), np.log(np.abs(vals)), 1)[0]
    return -float(slope)


def weighted_tail_integral(
    f: ScalarField, params: FracParams, cutoff: float = 32.0, samples: int = 96
) -> tuple[float, float]:
    """Truncated integral of |f| / (1 + |x|^{n+alpha}) plus an analytic tail bound.

    Returns (truncated_value, tail_bound).  A finite tail bound witnesses
    membership in the operator's natural integrability class.
    """
    n, alpha = params.n, params.alpha
    # midpoint rule in radius x a coarse sphere rule; the integrand is
    # bounded so low order suffices for a membership check
    r_edges = np.linspace(0.0, cutoff, samples + 1)
    r_mid = 0.5 * (r_edges[:-1] + r_edges[1:])
    dr = np.diff(r_edges)
    if n == 2:
        thetas = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
        dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
        wdir = np.full(64, 2 * math.pi / 64)
    else:
        mu, wmu = np.polynomial.legendre.leggauss(12)
        phis = np.linspace(0.0, 2 * math.pi, 24, endpoint=False)
        st = np.sqrt(1 - mu**2)
        dirs = np.stack(
            [
                np.outer(st, np.cos(phis)).ravel(),
                np.outer(st, np.sin(phis)).ravel(),
                np.outer(mu, np.ones_like(phis)).ravel(),
            ],
            axis=1,
        )
        wdir = np.outer(wmu, np.full(24, 2 * math.pi / 24)).ravel()
    total = 0.0
    for r, w in zip(r_mid, dr):
        pts = r * dirs
        vals = np.abs(f(pts))
        total += w * r ** (n - 1) / (1.0 + r ** (n + alpha)) * float(vals @ wdir) / params.sphere_area * params.sphere_area
    if f.support_radius is not None and f.support_radius <= cutoff:
        tail = 0.0
    elif f.decay_exponent is not None:
        beta = min(f.decay_exponent, 0.0) if f.decay_exponent < 0 else f.decay_exponent
        # |f| <= A r^-beta beyond the cutoff with A read off at the cutoff
        probe = np.abs(f(cutoff * dirs[:: max(1, len(dirs) // 16)])).max()
        amp = probe * cutoff ** min(beta, 50.0)
        tail = amp * params.sphere_area * cutoff ** (-min(beta, 50.0) - alpha) / alpha
    elif f.tail_limit is not None:
        bound = abs(f.tail_limit) + np.abs(f(cutoff * dirs[:: max(1, len(dirs) // 16)])).max()
        tail = bound * params.sphere_area * cutoff ** (-alpha) / alpha
    else:
        tail = math.inf
    return float(total), float(tail)


# ---------------------------------------------------------------------------
# grid container


@dataclass(frozen=True)
class GridField:
    """Uniform Cartesian samples on [-L, L)^n, the transform evaluator's substrate."""

    box_half_width: float
    samples: np.ndarray

    def __post_init__(self):
        L = float(self.box_half_width)
        if L <= 0:
            raise ParameterError("box half-width must be positive")
        s = np.asarray(self.samples, dtype=float)
        if s.ndim not in SUPPORTED_DIMENSIONS:
            raise ParameterError("samples must be a 2-d or 3-d array")
        N = s.shape[0]
        if any(dim != N for dim in s.shape):
            raise ParameterError("samples must be a cube of equal axes")
        if N % 2 != 0 or N < 16:
            raise ParameterError("points per axis must be even and >= 16")
        if not np.all(np.isfinite(s)):
            raise ParameterError("samples must be finite")
        object.__setattr__(self, "samples", s)

    @property
    def dim(self) -> int:
        return self.samples.ndim

    @property
    def points_per_axis(self) -> int:
        return self.samples.shape[0]

    @property
    def spacing(self) -> float:
        return 2.0 * self.box_half_width / self.points_per_axis

    def axis(self) -> np.ndarray:
        N = self.points_per_axis
        return -self.box_half_width + self.spacing * np.arange(N)

    @classmethod
    def from_field(cls, f: ScalarField, box_half_width: float, points_per_axis: int) -> "GridField":
        ax = -box_half_width + (2.0 * box_half_width / points_per_axis) * np.arange(points_per_axis)
        grids = np.meshgrid(*([ax] * f.dim), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        vals = np.empty(pts.shape[0])
        step = 1 << 20
        for i in range(0, pts.shape[0], step):
            vals[i : i + step] = f(pts[i : i + step])
        return cls(box_half_width=box_half_width, samples=vals.reshape([points_per_axis] * f.dim))


# ---------------------------------------------------------------------------
# constants and reports


@dataclass(frozen=True)
class KernelConstants:
    """Normalizations tying the singular integral to the transform symbol.

    ``c_pv`` multiplies the principal-value integral; ``c_riesz``
    normalizes the fundamental solution 1/|x|^{n-alpha}.  ``validated``
    is set only by the cross-evaluator consistency checks.
    """

    c_pv: float
    c_riesz: float
    validated: bool = False

    def __post_init__(self):
        if self.c_pv <= 0 or self.c_riesz <= 0:
            raise ParameterError("kernel constants must be positive")


@dataclass(frozen=True)
class Case:
    name: str
    metric: str
    value: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class ExponentFit:
    name: str
    fitted: float
    expected: float


@dataclass(frozen=True)
class Report:
    """Outcome of a verification suite; overall_pass is the case conjunction."""

    suite_name: str
    params: FracParams
    cases: tuple[Case, ...]
    fitted_exponents: tuple[ExponentFit, ...] = ()
    overall_pass: bool = dataclass_field(default=None)

    def __post_init__(self):
        cases = tuple(self.cases)
        object.__setattr__(self, "cases", cases)
        object.__setattr__(self, "fitted_exponents", tuple(self.fitted_exponents))
        conj = all(c.passed for c in cases)
        if self.overall_pass is None:
            object.__setattr__(self, "overall_pass", conj)
        elif bool(self.overall_pass) != conj:
            raise ParameterError("overall_pass must equal the conjunction of case flags")

    def to_dict(self) -> dict:
        return {
            "suite": self.suite_name,
            "params": {"n": self.params.n, "alpha": self.params.alpha},
            "cases": [
                {
                    "name": c.name,
                    "metric": c.metric,
                    "value": c.value,
                    "threshold": c.threshold,
                    "pass": c.passed,
                }
                for c in self.cases
            ],
            "exponents": [
                {"name": e.name, "fitted": e.fitted, "expected": e.expected}
                for e in self.fitted_exponents
            ],
            "overall_pass": self.overall_pass,
        }

    @staticmethod
    def merged(suite_name: str, params: FracParams, reports: Sequence["Report"]) -> "Report":
        cases, fits = [], []
        for r in reports:
            cases.extend(r.cases)
            fits.extend(r.fitted_exponents)
        return Report(suite_name, params, tuple(cases), tuple(fits))
