"""Sample-matrix assembly, least-squares recovery and dual functions.

The sampling map restricted to the finite shift range is a dense matrix
whose (row, column) entry is the convolved generator, shifted by the
column's lattice offset, evaluated at the row's sample location.  Exact
recovery on the finite subspace goes through the minimum-norm
pseudo-inverse of that matrix; the same pseudo-inverse realizes the dual
functions of the reconstruction formula.  Rank-deficient draws raise (or
are recorded as failures in trial loops), never silently retried.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import SpaceParams, mu_class_report, omega_class_report
from .mixed_space import (
    DEFAULT_QUAD,
    CoefficientGrid,
    Cuboid,
    GeneratorSet,
    TensorFunction,
    lpq_norm,
    mixed_norm,
    random_unit_grid,
    synthesize,
)
from .quadrature import QuadratureSpec, axis_rule
from .sampling import AveragingKernel, Density, SampleSet, abs_integral, convolve, draw_samples


class RankDeficientError(ValueError):
    """Sample matrix is numerically rank deficient; carries the observed rank."""

    def __init__(self, rank: int, columns: int):
        super().__init__(f"sample matrix has numerical rank {rank} < {columns} columns")
        self.rank = rank
        self.columns = columns


@dataclass
class SampleMatrix:
    """Dense sampling matrix with the provenance that built it.

    entries[row, col] = (phi_i * psi)(x_j - k1, y_k - k2) with
    row = (j, k) in row-major order and col = (i, k1, k2) with the shift
    multi-index in lexicographic order.
    """

    entries: np.ndarray
    phi: GeneratorSet
    kernel: AveragingKernel
    samples: SampleSet
    N: int
    convolved: tuple[TensorFunction, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def column_labels(self) -> list[str]:
        grid = CoefficientGrid.zeros(self.phi.r, self.N, self.phi.d)
        return [f"g{i}_" + "_".join(str(v) for v in k)
                for i in range(self.phi.r) for k in grid.shifts()]

    def to_csv(self, path, header_comment: str | None = None) -> None:
        """Rows are sample pairs (j, k); one column per basis shift."""
        import csv

        with open(path, "w", newline="", encoding="utf-8") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            writer = csv.writer(fh)
            writer.writerow(["j", "k"] + self.column_labels())
            for j in range(self.samples.n):
                for k in range(self.samples.m):
                    row = self.entries[j * self.samples.m + k]
                    writer.writerow([j + 1, k + 1] + [repr(float(v)) for v in row])


def _shifted_values(f: TensorFunction, points: np.ndarray, N: int) -> np.ndarray:
    """Values of f(. - k) for every lattice shift |k| <= N; shape (P, (2N+1)^ndim)."""
    offsets = np.arange(-N, N + 1, dtype=float)
    block = None
    for a in range(f.ndim):
        axis_vals = np.zeros((points.shape[0], len(offsets), len(f.terms)))
        for t, (w, fs) in enumerate(f.terms):
            axis_vals[:, :, t] = fs[a](points[:, a, None] - offsets[None, :])
        if block is None:
            weights = np.array([w for w, _ in f.terms])
            block = axis_vals * weights[None, None, :]
        else:
            block = block[:, :, None, :] * axis_vals[:, None, :, :]
            block = block.reshape(points.shape[0], -1, len(f.terms))
    return block.sum(axis=2)


def build_sample_matrix(phi: GeneratorSet, kernel: AveragingKernel,
                        samples: SampleSet, N: int) -> SampleMatrix:
    """Assemble the sampling matrix from the closed-form convolved generators."""
    convolved = tuple(convolve(g, kernel) for g in phi.generators)
    blocks = [_shifted_values(conv, samples.points, N) for conv in convolved]
    entries = np.concatenate(blocks, axis=1)
    return SampleMatrix(entries, phi, kernel, samples, N, convolved)


@dataclass
class LstsqResult:
    """Minimum-norm least-squares solution with rank and residual diagnostics."""

    grid: CoefficientGrid
    residual: float
    rank: int
    singular_values: np.ndarray


def solve(S: SampleMatrix, samples_vec, rank_tol: float = 1e-10) -> LstsqResult:
    """Minimum-norm least squares through a rank-revealing SVD.

    rank_tol is scaled by the largest column norm; a numerical rank below
    the column count raises RankDeficientError (the reconstruction
    identity is not guaranteed there).
    """
    b = np.asarray(samples_vec, dtype=float).ravel()
    rows, cols = S.entries.shape
    if b.shape[0] != rows:
        raise ValueError(f"sample vector length {b.shape[0]} != row count {rows}")
    U, sv, Vt = np.linalg.svd(S.entries, full_matrices=False)
    col_norms = np.linalg.norm(S.entries, axis=0)
    tol = rank_tol * max(col_norms.max(), 1e-300)
    rank = int(np.sum(sv > tol))
    if rank < cols:
        raise RankDeficientError(rank, cols)
    x = Vt.T @ ((U.T @ b) / sv)
    residual = float(np.linalg.norm(S.entries @ x - b))
    d = S.phi.d
    grid = CoefficientGrid.from_flat(x, S.phi.r, S.N, d)
    return LstsqResult(grid, residual, rank, sv)


@dataclass
class DualFamily:
    """Dual functions realized through the minimum-norm pseudo-inverse.

    pinv maps sample values to coefficients; the dual function for sample
    (j, k) synthesizes the corresponding pseudo-inverse column against the
    generators, and applying the family to the samples of any function in
    the finite subspace reproduces it exactly in the full-rank regime.
    """

    pinv: np.ndarray  # (columns, n*m)
    phi: GeneratorSet
    N: int
    n: int
    m: int

    def coefficients(self, sample_values) -> CoefficientGrid:
        vals = np.asarray(sample_values, dtype=float).ravel()
        return CoefficientGrid.from_flat(self.pinv @ vals, self.phi.r, self.N, self.phi.d)

    def reconstruct(self, sample_values) -> TensorFunction:
        return synthesize(self.phi, self.coefficients(sample_values))

    def function(self, j: int, k: int) -> TensorFunction:
        """Dual function for the 1-based sample index (j, k)."""
        row = (j - 1) * self.m + (k - 1)
        grid = CoefficientGrid.from_flat(self.pinv[:, row], self.phi.r, self.N, self.phi.d)
        return synthesize(self.phi, grid)


def dual_family(S: SampleMatrix, rank_tol: float = 1e-10) -> DualFamily:
    """Pseudo-inverse dual family; requires numerically full column rank."""
    U, sv, Vt = np.linalg.svd(S.entries, full_matrices=False)
    col_norms = np.linalg.norm(S.entries, axis=0)
    tol = rank_tol * max(col_norms.max(), 1e-300)
    rank = int(np.sum(sv > tol))
    if rank < S.entries.shape[1]:
        raise RankDeficientError(rank, S.entries.shape[1])
    pinv = Vt.T @ np.diag(1.0 / sv) @ U.T
    return DualFamily(pinv, S.phi, S.N, S.samples.n, S.samples.m)


@dataclass
class BetaTildeEstimate:
    """Lower-bound constant of the convolved synthesis system on the cuboid.

    certified means the value came from the smallest Gram eigenvalue
    (p = q = 2, exact up to quadrature); otherwise it is a random-search
    upper estimate of the true constant and must not be used in certified
    bounds.
    """

    value: float
    certified: bool
    method: str


def beta_tilde(phi: GeneratorSet, kernel: AveragingKernel, N: int, p: float, q: float,
               region: Cuboid, trials: int = 100, seed: int = 0,
               quad: QuadratureSpec = DEFAULT_QUAD) -> BetaTildeEstimate:
    """Smallest ratio ||sum c (phi*psi)(.-k)||_{L^{p,q}(region)} / ||c||_{l^{p,q}}.

    For p = q = 2 this is the square root of the smallest eigenvalue of
    the Gram matrix of the shifted convolved generators on the region,
    computed with breakpoint-aligned quadrature.  Other exponents are
    handled by random search over unit coefficient grids, which can only
    overestimate the true constant.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    convolved = [convolve(g, kernel) for g in phi.generators]
    d = phi.d
    if p == 2.0 and q == 2.0:
        offsets = np.arange(-N, N + 1, dtype=float)
        rules = []
        for a, (lo, hi) in enumerate(region.box):
            breaks = np.concatenate([
                (conv.axis_breakpoints(a)[:, None] + offsets[None, :]).ravel()
                for conv in convolved
            ])
            rules.append(axis_rule(lo, hi, breaks, quad))
        if any(len(rname[0]) == 0 for rname in rules):
            return BetaTildeEstimate(0.0, True, "gram_eigenvalue")
        nodes = [rl[0] for rl in rules]
        mesh = np.meshgrid(*nodes, indexing="ij")
        pts = np.stack([g.ravel() for g in mesh], axis=1)
        w = rules[0][1]
        for _, wa in rules[1:]:
            w = np.multiply.outer(w, wa)
        w = w.ravel()
        cols = []
        for conv in convolved:
            cols.append(_shifted_values(conv, pts, N))
        B = np.concatenate(cols, axis=1)
        G = B.T @ (w[:, None] * B)
        lam = float(np.linalg.eigvalsh(G)[0])
        return BetaTildeEstimate(math.sqrt(max(lam, 0.0)), True, "gram_eigenvalue")

    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(trials):
        c = random_unit_grid(phi.r, N, d, p, q, rng)
        norm = mixed_norm(synthesize(convolved, c), p, q, region, quad)
        best = min(best, norm)
    return BetaTildeEstimate(best, False, "random_search_upper_estimate")


@dataclass
class MembershipResult:
    member: bool
    slacks: dict


def membership(phi: GeneratorSet, kernel: AveragingKernel, c: CoefficientGrid,
               signal_class: str, region: Cuboid, p: float, q: float, *,
               omega: float | None = None, mu: float | None = None,
               delta: float | None = None,
               quad: QuadratureSpec = DEFAULT_QUAD) -> MembershipResult:
    """Evaluate the defining inequalities of one signal class for f given by c.

    signal_class:
      "min_conv_norm"      requires ||f*psi||_{L^{p,q}(C_K)} >= omega;
      "avg_conv_mass"      requires mu ||psi||_1 ||f|| <= int_{C_K} |f*psi|;
      "energy_concentrated" requires both concentration of f on the cuboid
                            and the matching conv-norm lower bound (level delta).
    Returns the boolean plus the slack of every inequality involved.
    """
    f = synthesize(phi, c)
    conv = convolve(f, kernel)
    global_norm = mixed_norm(f, p, q, quad=quad)
    if signal_class == "min_conv_norm":
        if omega is None or omega <= 0:
            raise ValueError("min_conv_norm requires omega > 0")
        lhs = mixed_norm(conv, p, q, region, quad)
        slack = lhs - omega
        return MembershipResult(slack >= 0.0, {"conv_norm_margin": slack})
    if signal_class == "avg_conv_mass":
        if mu is None or not 0.0 < mu <= 1.0:
            raise ValueError("avg_conv_mass requires mu in (0, 1]")
        lhs = abs_integral(conv, region, quad)
        slack = lhs - mu * kernel.l11_norm * global_norm
        return MembershipResult(slack >= 0.0, {"avg_mass_margin": slack})
    if signal_class == "energy_concentrated":
        if delta is None or not 0.0 < delta < 1.0:
            raise ValueError("energy_concentrated requires delta in (0, 1)")
        s1 = mixed_norm(f, p, q, region, quad) - (1.0 - delta) * global_norm
        s2 = (mixed_norm(conv, p, q, region, quad)
              - (1.0 - delta) * kernel.l11_norm * global_norm)
        return MembershipResult(s1 >= 0.0 and s2 >= 0.0,
                                {"concentration_margin": s1, "conv_norm_margin": s2})
    raise ValueError(f"unknown signal class {signal_class!r}")


# -- Monte Carlo success estimation ----------------------------------------


@dataclass
class TrialSpec:
    """One repeatable draw->sample->test experiment.

    kind: "recovery" tests exact coefficient recovery; "omega_inequality"
    and "mu_inequality" test the two-sided sampling inequalities with the
    matching theorem constants (or explicit bound_override = (lower,
    upper) factors applied to ||f||).
    """

    kind: str
    phi: GeneratorSet
    kernel: AveragingKernel
    rho: Density
    coeffs: CoefficientGrid
    N: int
    n: int
    m: int
    p: float = 2.0
    q: float = 2.0
    mode: str = "joint"
    gamma: float | None = None
    omega: float | None = None
    mu: float | None = None
    eta: float | None = None
    params: SpaceParams | None = None
    recovery_tol: float = 1e-9
    rank_tol: float = 1e-10
    bound_override: tuple | None = None


@dataclass
class TrialRecord:
    trial: int
    seed: int
    success: bool
    rank: int
    rank_deficient: bool
    error: float

    def to_json(self) -> str:
        return json.dumps({
            "trial": self.trial, "seed": self.seed, "success": self.success,
            "rank": self.rank, "rank_deficient": self.rank_deficient,
            "error": _finite_or_repr(self.error),
        }, sort_keys=True)


def _finite_or_repr(v: float):
    return v if math.isfinite(v) else repr(v)


@dataclass
class SuccessSummary:
    trials: int
    successes: int
    fraction: float
    wilson_low: float
    wilson_high: float
    records: list[TrialRecord] = field(repr=False, default_factory=list)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials)) / denom
    # the interval always contains the point estimate, despite rounding
    return max(0.0, min(center - half, phat)), min(1.0, max(center + half, phat))


def empirical_success(spec: TrialSpec, trials: int, seed: int,
                      jsonl_path=None) -> SuccessSummary:
    """Repeat the trial, report the success fraction with its Wilson interval.

    Rank-deficient draws count as failures and are recorded as such, so
    the empirical probabilities stay honest.  Per-trial seeds derive from
    the master seed; identical inputs reproduce identical records.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    f = synthesize(spec.phi, spec.coeffs)
    conv = convolve(f, spec.kernel)
    fnorm = mixed_norm(f, spec.p, spec.q)

    lower = upper = None
    if spec.kind in ("omega_inequality", "mu_inequality"):
        if spec.bound_override is not None:
            lower, upper = spec.bound_override
        elif spec.kind == "omega_inequality":
            rep = omega_class_report(spec.params, spec.gamma, spec.omega, spec.n, spec.m)
            lower, upper = rep["A_gamma_omega"], rep["B_gamma_omega"]
        else:
            rep = mu_class_report(spec.params, spec.mu, spec.eta, spec.n, spec.m)
            lower, upper = rep["lower_constant"], rep["upper_constant"]
    elif spec.kind != "recovery":
        raise ValueError(f"unknown trial kind {spec.kind!r}")

    trial_seeds = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)
    records: list[TrialRecord] = []
    successes = 0
    for t in range(trials):
        tseed = int(trial_seeds[t])
        samples = draw_samples(spec.rho, spec.n, spec.m, tseed, spec.mode)
        if spec.kind == "recovery":
            S = build_sample_matrix(spec.phi, spec.kernel, samples, spec.N)
            values = conv.evaluate(samples.points)
            try:
                res = solve(S, values, spec.rank_tol)
                err = float(np.max(np.abs(res.grid.values - spec.coeffs.values)))
                rec = TrialRecord(t, tseed, err <= spec.recovery_tol, res.rank, False, err)
            except RankDeficientError as exc:
                rec = TrialRecord(t, tseed, False, exc.rank, True, math.inf)
        else:
            values = conv.evaluate(samples.points).reshape(spec.n, spec.m)
            if spec.kind == "omega_inequality":
                stat = lpq_norm(values, spec.p, spec.q)
            else:
                stat = float(np.sum(np.abs(values)))
            ok = lower * fnorm <= stat <= upper * fnorm
            rec = TrialRecord(t, tseed, bool(ok), min(spec.n * spec.m, spec.coeffs.size),
                              False, 0.0)
        successes += rec.success
        records.append(rec)

    if jsonl_path is not None:
        with open(jsonl_path, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(rec.to_json() + "\n")

    lo, hi = wilson_interval(successes, trials)
    return SuccessSummary(trials, successes, successes / trials, lo, hi, records)
