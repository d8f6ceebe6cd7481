"""Cuboids, tensor-product functions, coefficient grids and mixed norms.

Functions on R x R^d are finite sums of separable terms
``weight * prod_a factor_a(coordinate_a)`` with piecewise-polynomial
factors, which covers the generators, the signals and their convolutions
with box kernels in closed form.  The mixed L^{p,q} norm integrates the
inner q-norm over the last d axes and the outer p-norm over the first
axis; quadrature panels are aligned with every factor breakpoint so the
piecewise-polynomial integrands are handled near exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .piecewise import PiecewisePoly1D, bspline
from .quadrature import QuadratureSpec, axis_rule, panel_edges

DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class Cuboid:
    """The centered box [-K1, K1] x [-K2, K2]^d."""

    K1: float
    K2: float
    d: int = 1

    def __post_init__(self) -> None:
        if self.K1 <= 0 or self.K2 <= 0:
            raise ValueError("cuboid half-widths must be positive")
        if self.d < 1:
            raise ValueError("dimension d must be >= 1")

    @property
    def ndim(self) -> int:
        return self.d + 1

    @property
    def box(self) -> list[tuple[float, float]]:
        return [(-self.K1, self.K1)] + [(-self.K2, self.K2)] * self.d

    @property
    def volume(self) -> float:
        return (2.0 * self.K1) * (2.0 * self.K2) ** self.d

    def scaled(self, factor: float) -> "Cuboid":
        return Cuboid(factor * self.K1, factor * self.K2, self.d)

    def contains(self, points: np.ndarray, slack: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        lo = np.array([b[0] for b in self.box]) - slack
        hi = np.array([b[1] for b in self.box]) + slack
        return np.all((pts >= lo) & (pts <= hi), axis=1)


def _as_box(region, f: "TensorFunction | None" = None) -> list[tuple[float, float]] | None:
    if region is None:
        return None if f is None else f.support_box()
    if isinstance(region, Cuboid):
        return region.box
    return [(float(lo), float(hi)) for lo, hi in region]


class TensorFunction:
    """Finite sum of separable piecewise-polynomial terms on R x R^d."""

    def __init__(self, terms):
        terms = [(float(w), tuple(fs)) for w, fs in terms if w != 0.0 and not any(f.is_zero for f in fs)]
        if terms:
            ndim = len(terms[0][1])
            if any(len(fs) != ndim for _, fs in terms):
                raise ValueError("all terms must have the same number of axis factors")
            self._ndim = ndim
        else:
            self._ndim = 0
        self.terms = tuple(terms)

    @classmethod
    def zero(cls, ndim: int = 2) -> "TensorFunction":
        f = cls([])
        f._ndim = ndim
        return f

    @classmethod
    def separable(cls, factors, weight: float = 1.0) -> "TensorFunction":
        return cls([(weight, tuple(factors))])

    @property
    def ndim(self) -> int:
        return self._ndim

    @property
    def is_zero(self) -> bool:
        return len(self.terms) == 0

    # -- geometry -------------------------------------------------------

    def support_box(self) -> list[tuple[float, float]]:
        """Bounding box of the union of term support boxes."""
        if self.is_zero:
            return [(0.0, 0.0)] * max(self._ndim, 1)
        box = []
        for a in range(self._ndim):
            los, his = zip(*(fs[a].support for _, fs in self.terms))
            box.append((min(los), max(his)))
        return box

    def axis_breakpoints(self, axis: int) -> np.ndarray:
        if self.is_zero:
            return np.empty(0)
        return np.unique(np.concatenate([fs[axis].breakpoints for _, fs in self.terms]))

    # -- evaluation -------------------------------------------------------

    def evaluate(self, points) -> np.ndarray:
        """Pointwise values; points has shape (..., d+1)."""
        pts = np.asarray(points, dtype=float)
        scalar = pts.ndim == 1
        pts = np.atleast_2d(pts)
        out = np.zeros(pts.shape[0])
        for w, fs in self.terms:
            vals = np.full(pts.shape[0], w)
            for a, f in enumerate(fs):
                vals *= f(pts[:, a])
            out += vals
        return float(out[0]) if scalar else out

    def __call__(self, *coords) -> float:
        return self.evaluate(np.asarray(coords, dtype=float))

    def evaluate_grid(self, axes) -> np.ndarray:
        """Values on the tensor grid spanned by per-axis node arrays."""
        shape = tuple(len(a) for a in axes)
        out = np.zeros(shape)
        for w, fs in self.terms:
            vals = [f(np.asarray(ax, dtype=float)) for f, ax in zip(fs, axes)]
            out += w * reduce(np.multiply.outer, vals)
        return out

    # -- algebra ----------------------------------------------------------

    def shift(self, offsets) -> "TensorFunction":
        offs = np.asarray(offsets, dtype=float)
        return TensorFunction(
            [(w, tuple(f.shift_scale(o, 1.0) for f, o in zip(fs, offs))) for w, fs in self.terms]
        ) if self.terms else TensorFunction.zero(self._ndim)

    def __mul__(self, scalar: float) -> "TensorFunction":
        if scalar == 0 or self.is_zero:
            return TensorFunction.zero(self._ndim)
        return TensorFunction([(w * float(scalar), fs) for w, fs in self.terms])

    __rmul__ = __mul__

    def __neg__(self) -> "TensorFunction":
        return self * -1.0

    def __add__(self, other: "TensorFunction") -> "TensorFunction":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self._ndim != other._ndim:
            raise ValueError("cannot add tensor functions of different dimensions")
        return TensorFunction(list(self.terms) + list(other.terms))

    def __sub__(self, other: "TensorFunction") -> "TensorFunction":
        return self + (-other)


def tensor_bspline(degrees, shifts=None, weight: float = 1.0) -> TensorFunction:
    """Separable product of cardinal B-splines, optionally shifted per axis."""
    degrees = list(degrees)
    shifts = [0.0] * len(degrees) if shifts is None else list(shifts)
    factors = [bspline(n).shift_scale(s, 1.0) for n, s in zip(degrees, shifts)]
    return TensorFunction.separable(factors, weight)


def box_function(bounds, weight: float = 1.0) -> TensorFunction:
    """weight * indicator of the axis-aligned box given by (lo, hi) pairs."""
    factors = [PiecewisePoly1D.indicator(lo, hi) for lo, hi in bounds]
    return TensorFunction.separable(factors, weight)


@dataclass(frozen=True)
class GeneratorSet:
    """Generators with polynomial-decay metadata and stability constants.

    decay_c, decay_s1, decay_s2 describe the envelope
    ``|phi(x, y)| <= decay_c / ((1+|x|)^s1 (1+|y|)^s2)`` and alpha1 <= alpha2
    bracket the norm equivalence between coefficients and synthesized
    functions.  Stability constants may be supplied (certified) or taken
    from empirical brackets (see estimate_stability).
    """

    generators: tuple[TensorFunction, ...]
    decay_c: float
    decay_s1: float
    decay_s2: float
    alpha1: float
    alpha2: float

    def __post_init__(self) -> None:
        if len(self.generators) < 1:
            raise ValueError("at least one generator is required")
        object.__setattr__(self, "generators", tuple(self.generators))
        for name in ("decay_c", "decay_s1", "decay_s2", "alpha1", "alpha2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.alpha1 > self.alpha2:
            raise ValueError("alpha1 must not exceed alpha2")

    @property
    def r(self) -> int:
        return len(self.generators)

    @property
    def ndim(self) -> int:
        return self.generators[0].ndim

    @property
    def d(self) -> int:
        return self.ndim - 1

    def check_exponents(self, p: float, q: float) -> None:
        """Decay exponents must exceed d + 1 - 1/p - d/q for the space in use."""
        d = self.d
        floor = d + 1 - 1.0 / p - d / q
        if self.decay_s1 <= floor or self.decay_s2 <= floor:
            raise ValueError(
                f"decay exponents ({self.decay_s1}, {self.decay_s2}) must exceed "
                f"d+1-1/p-d/q = {floor:.6g}"
            )


def decay_constant(f: TensorFunction, s1: float, s2: float, points_per_piece: int = 200) -> float:
    """Tight envelope constant sup |f(x,y)| (1+|x|)^s1 (1+|y|)^s2.

    Uses the max norm for |y| when d > 1.  Separable single-term functions
    reduce to a product of per-axis 1-D maximizations, which is what the
    B-spline generators need; general sums fall back to a dense grid.
    """
    if f.is_zero:
        return 0.0

    def axis_max(g: PiecewisePoly1D, s: float) -> float:
        lo, hi = g.support
        xs = [np.linspace(lo, hi, points_per_piece * max(g.num_pieces, 1)), g.critical_points(), g.breakpoints]
        xs = np.concatenate(xs)
        return float(np.max(np.abs(g(xs)) * (1.0 + np.abs(xs)) ** s))

    if len(f.terms) == 1:
        w, fs = f.terms[0]
        out = abs(w)
        for a, g in enumerate(fs):
            out *= axis_max(g, s1 if a == 0 else s2)
        return out

    axes = []
    for a in range(f.ndim):
        lo, hi = f.support_box()[a]
        breaks = f.axis_breakpoints(a)
        pts = [np.linspace(lo, hi, points_per_piece * max(len(breaks), 2))]
        for _, fs in f.terms:
            pts.append(fs[a].critical_points())
        axes.append(np.unique(np.concatenate(pts)))
    vals = np.abs(f.evaluate_grid(axes))
    weight = (1.0 + np.abs(axes[0])) ** s1
    for a in range(1, f.ndim):
        shape = [1] * f.ndim
        shape[a] = -1
        weight = weight[..., None] * ((1.0 + np.abs(axes[a])) ** s2).reshape(shape[a:])
    return float(np.max(vals * weight))


class CoefficientGrid:
    """Real coefficients c_i(k1, k2) for |k1|, |k2| <= N over r generators.

    values has shape (r,) + (2N+1,) * (d+1); shift axes are offset by N so
    that index N corresponds to shift 0.
    """

    def __init__(self, values: np.ndarray, N: int):
        values = np.asarray(values, dtype=float)
        if values.ndim < 2:
            raise ValueError("values must have a generator axis plus shift axes")
        if any(s != 2 * N + 1 for s in values.shape[1:]):
            raise ValueError("every shift axis must have length 2N+1")
        self.values = values
        self.N = int(N)

    @classmethod
    def zeros(cls, r: int, N: int, d: int) -> "CoefficientGrid":
        return cls(np.zeros((r,) + (2 * N + 1,) * (d + 1)), N)

    @classmethod
    def from_entries(cls, r: int, N: int, d: int, entries) -> "CoefficientGrid":
        """entries: iterable of (generator index, shift multi-index, value)."""
        grid = cls.zeros(r, N, d)
        for i, k, v in entries:
            grid.set(i, k, v)
        return grid

    @property
    def r(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.ndim - 2

    @property
    def size(self) -> int:
        return self.values.size

    def _slot(self, k) -> tuple[int, ...]:
        k = np.atleast_1d(np.asarray(k, dtype=int))
        if np.any(np.abs(k) > self.N):
            raise IndexError(f"shift {k} outside [-N, N] with N={self.N}")
        return tuple(k + self.N)

    def get(self, i: int, k) -> float:
        return float(self.values[(i, *self._slot(k))])

    def set(self, i: int, k, value: float) -> None:
        self.values[(i, *self._slot(k))] = value

    def shifts(self) -> list[tuple[int, ...]]:
        """All shift multi-indices in column order (k1 outer, k2 lexicographic)."""
        rng = range(-self.N, self.N + 1)
        return [tuple(k) for k in itertools.product(rng, repeat=self.d + 1)]

    def flatten(self) -> np.ndarray:
        return self.values.reshape(-1)

    @classmethod
    def from_flat(cls, flat: np.ndarray, r: int, N: int, d: int) -> "CoefficientGrid":
        return cls(np.asarray(flat, dtype=float).reshape((r,) + (2 * N + 1,) * (d + 1)), N)

    def seq_mixed_norm(self, p: float, q: float) -> float:
        """Sum over generators of the block l^{p,q} norms.

        The inner q-sum runs over all k2 axes jointly, the outer p-sum over
        k1.  p = q = inf returns the max absolute entry.
        """
        if np.isinf(p) and np.isinf(q):
            return float(np.max(np.abs(self.values))) if self.values.size else 0.0
        if not (1 <= p < np.inf and 1 <= q < np.inf):
            raise ValueError("exponents must be finite and >= 1 (or both infinite)")
        total = 0.0
        for block in self.values:
            inner = np.sum(np.abs(block) ** q, axis=tuple(range(1, block.ndim)))
            total += float(np.sum(inner ** (p / q)) ** (1.0 / p))
        return total

    def __add__(self, other: "CoefficientGrid") -> "CoefficientGrid":
        return CoefficientGrid(self.values + other.values, self.N)

    def __mul__(self, scalar: float) -> "CoefficientGrid":
        return CoefficientGrid(self.values * float(scalar), self.N)

    __rmul__ = __mul__

    def to_csv(self, path, header_comment: str | None = None) -> None:
        """One row per entry: generator, k1, k2 components, value."""
        import csv

        with open(path, "w", newline="", encoding="utf-8") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            writer = csv.writer(fh)
            writer.writerow(["generator", "k1"] + [f"k2_{a+1}" for a in range(self.d)] + ["value"])
            for i in range(self.r):
                for k in self.shifts():
                    writer.writerow([i, *k, repr(self.get(i, k))])


def random_unit_grid(r: int, N: int, d: int, p: float, q: float, rng: np.random.Generator) -> CoefficientGrid:
    """Random coefficient grid normalized to unit l^{p,q} norm."""
    values = rng.standard_normal((r,) + (2 * N + 1,) * (d + 1))
    grid = CoefficientGrid(values, N)
    norm = grid.seq_mixed_norm(p, q)
    return grid * (1.0 / norm)


def synthesize(generators, c: CoefficientGrid) -> TensorFunction:
    """Sum_i sum_{|k| <= N} c_i(k) phi_i(. - k) as an explicit TensorFunction."""
    funcs = generators.generators if isinstance(generators, GeneratorSet) else tuple(generators)
    terms = []
    for i, phi in enumerate(funcs):
        block = c.values[i]
        for idx in np.argwhere(block != 0.0):
            k = idx - c.N
            shifted = phi.shift(k)
            w = float(block[tuple(idx)])
            terms.extend((w * tw, tf) for tw, tf in shifted.terms)
    out = TensorFunction(terms)
    if out.is_zero:
        out._ndim = funcs[0].ndim
    return out


# -- norms ----------------------------------------------------------------


def _axis_rules(f: TensorFunction, box, quad: QuadratureSpec, extra_breaks=None):
    rules = []
    for a, (lo, hi) in enumerate(box):
        breaks = f.axis_breakpoints(a)
        if extra_breaks is not None:
            breaks = np.concatenate([breaks, np.asarray(extra_breaks[a], dtype=float)])
        rules.append(axis_rule(lo, hi, breaks, quad))
    return rules


def _clip_box(f: TensorFunction, region) -> list[tuple[float, float]] | None:
    box = _as_box(region, f)
    sup = f.support_box()
    out = []
    for (lo, hi), (slo, shi) in zip(box, sup):
        a, b = max(lo, slo), min(hi, shi)
        if b <= a:
            return None
        out.append((a, b))
    return out


def mixed_norm(f: TensorFunction, p: float, q: float, region=None, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Mixed norm ( int_x ( int_y |f|^q dy )^{p/q} dx )^{1/p} over the region.

    region None means the support bounding box, which equals the global
    norm for compactly supported functions.
    """
    if not (1.0 < p < np.inf and 1.0 < q < np.inf):
        raise ValueError("mixed_norm requires 1 < p, q < infinity")
    if f.is_zero:
        return 0.0
    box = _clip_box(f, region)
    if box is None:
        return 0.0
    rules = _axis_rules(f, box, quad)
    if any(len(r[0]) == 0 for r in rules):
        return 0.0
    vals = np.abs(f.evaluate_grid([r[0] for r in rules])) ** q
    for _, w in rules[:0:-1]:
        vals = vals @ w
    outer = np.sum(rules[0][1] * vals ** (p / q))
    return float(outer ** (1.0 / p))


def sup_norm(f: TensorFunction, region=None, points_per_piece: int = 33,
             refine_steps: int = 4) -> float:
    """Max of |f| over a breakpoint-refined grid plus per-piece stationary points.

    The winning grid cell is then refined locally a few times, which
    recovers interior maxima that sit between grid lines.
    """
    if f.is_zero:
        return 0.0
    box = _clip_box(f, region)
    if box is None:
        return 0.0
    axes = []
    for a, (lo, hi) in enumerate(box):
        edges = panel_edges(lo, hi, f.axis_breakpoints(a))
        cands = [edges]
        for s, e in zip(edges[:-1], edges[1:]):
            cands.append(np.linspace(s, e, points_per_piece))
        for _, fs in f.terms:
            crit = fs[a].critical_points()
            cands.append(crit[(crit >= lo) & (crit <= hi)])
        axes.append(np.unique(np.concatenate(cands)))
    vals = np.abs(f.evaluate_grid(axes))
    best = float(np.max(vals))
    idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
    center = [axes[a][i] for a, i in enumerate(idx)]
    spans = []
    for a, i in enumerate(idx):
        left = axes[a][max(i - 1, 0)]
        right = axes[a][min(i + 1, len(axes[a]) - 1)]
        spans.append(max(right - center[a], center[a] - left, 1e-12))
    for _ in range(refine_steps):
        local = []
        for a, (lo, hi) in enumerate(box):
            pts = np.linspace(center[a] - spans[a], center[a] + spans[a], 17)
            local.append(np.clip(pts, lo, hi))
        lv = np.abs(f.evaluate_grid(local))
        li = np.unravel_index(int(np.argmax(lv)), lv.shape)
        best = max(best, float(lv[li]))
        center = [local[a][i] for a, i in enumerate(li)]
        spans = [s / 8.0 for s in spans]
    return best


def integral(f: TensorFunction, region=None, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Plain integral of f over the region (exact for aligned panels)."""
    if f.is_zero:
        return 0.0
    box = _clip_box(f, region)
    if box is None:
        return 0.0
    rules = _axis_rules(f, box, quad)
    vals = f.evaluate_grid([r[0] for r in rules])
    for _, w in rules[::-1]:
        vals = vals @ w
    return float(vals)


def lp_norm_1d(f: PiecewisePoly1D, p: float, interval=None, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """L^p norm of a 1-D piecewise polynomial over an interval."""
    if f.is_zero:
        return 0.0
    lo, hi = f.support if interval is None else interval
    slo, shi = f.support
    lo, hi = max(lo, slo), min(hi, shi)
    if hi <= lo:
        return 0.0
    nodes, weights = axis_rule(lo, hi, f.breakpoints, quad)
    return float(np.sum(weights * np.abs(f(nodes)) ** p) ** (1.0 / p))


def lpq_norm(values: np.ndarray, p: float, q: float) -> float:
    """l^{p,q} norm of a 2-D sample array (outer axis p, inner axis q)."""
    arr = np.abs(np.asarray(values, dtype=float))
    inner = np.sum(arr ** q, axis=1)
    return float(np.sum(inner ** (p / q)) ** (1.0 / p))


def estimate_stability(
    phi: GeneratorSet,
    p: float,
    q: float,
    N: int,
    trials: int = 50,
    seed: int = 0,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> tuple[float, float]:
    """Empirical stability bracket over random unit-coefficient grids.

    Returns (min, max) of the synthesized global mixed norm: an upper
    estimate of alpha1 and a lower estimate of alpha2.  These are
    brackets, not certified constants.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    lo, hi = np.inf, 0.0
    for _ in range(trials):
        c = random_unit_grid(phi.r, N, phi.d, p, q, rng)
        norm = mixed_norm(synthesize(phi, c), p, q, quad=quad)
        lo, hi = min(lo, norm), max(hi, norm)
    return lo, hi
