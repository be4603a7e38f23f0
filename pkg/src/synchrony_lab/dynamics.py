"""Trajectories, equilibrium search inside synchrony subspaces, and stability verdicts."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .automorphism import (canonical_representative, conjugacy_group_patterns,
                           find_automorphisms)
from .fields import AdditiveLaplacianSystem, check_condition_30, kuramoto_g6
from .graph_model import adjacency_matrices, classify
from .spectra import (SignedSpectrumReport, eigen_signature, jacobi_eigenvalues,
                      validate_laplacian)
from .synchrony import (Partition, coarsest_balanced_refinement, enumerate_synchrony,
                        is_balanced)

__all__ = [
    "StepTooLarge", "NotEquilibrium", "GraphNotRegular", "NotBalanced",
    "Trajectory", "integrate", "spread", "TubeReport", "lyapunov_tube_check",
    "SynchronyChart", "EquilibriumRecord", "SearchOptions", "find_equilibria",
    "classify_stability", "finest_pattern", "GenericJacobianReport",
    "generic_jacobian_check", "GOLDEN_TABLE1", "table1_report",
]

TWO_PI = 2.0 * math.pi


class StepTooLarge(RuntimeError):
    pass


class NotEquilibrium(ValueError):
    pass


class GraphNotRegular(ValueError):
    pass


class NotBalanced(ValueError):
    pass


# --------------------------------------------------------------------------
# integration

@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray   # (T, n) or (T, batch, n)
    energy: np.ndarray   # (T,) or (T, batch)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def integrate(sys, x0, t_end: float, dt: float, record_every: int = 1,
              energy_tol: float = 1e-8) -> Trajectory:
    """Classical RK4 for x' = f(x); x0 may be a batch ``(B, n)``.

    The energy E (with f = -grad E) is checked after every step and a rise of
    more than ``energy_tol`` raises StepTooLarge.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = np.array(x0, dtype=float)
    n_steps = int(round(t_end / dt))
    energy = sys.energy
    e = energy(x)
    times, states, energies = [0.0], [x.copy()], [e]
    for step in range(1, n_steps + 1):
        k1 = sys(x)
        k2 = sys(x + 0.5 * dt * k1)
        k3 = sys(x + 0.5 * dt * k2)
        k4 = sys(x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        e_new = energy(x)
        rise = float(np.max(e_new - e))
        if rise > energy_tol:
            raise StepTooLarge(f"energy rose by {rise:.3g} at t={step * dt:.6g}; reduce dt")
        e = e_new
        if step % record_every == 0 or step == n_steps:
            times.append(step * dt)
            states.append(x.copy())
            energies.append(e)
    return Trajectory(np.array(times), np.array(states), np.array(energies))


def spread(x) -> np.ndarray:
    """Largest pairwise coordinate difference (per batch member)."""
    x = np.asarray(x)
    return x.max(axis=-1) - x.min(axis=-1)


@dataclass
class TubeReport:
    n_trials: int
    dissipation_failures: int
    zero_set_failures: int

    @property
    def passed(self) -> bool:
        return self.dissipation_failures == 0 and self.zero_set_failures == 0


def lyapunov_tube_check(sys: AdditiveLaplacianSystem, epsilon: float, n_trials: int,
                        seed: int = 0, zero_tol: float = 1e-12) -> TubeReport:
    """Sample the tube of pairwise spread < epsilon around the diagonal.

    Off the diagonal the coupling part of f must point inwards
    (``f(y) . y < 0`` for y centred on the hyperplane sum = 0) and be nonzero;
    on the diagonal it must vanish.
    """
    if not check_condition_30(sys, epsilon, seed=seed):
        raise ValueError(f"couplings are not sign-definite on (-{epsilon}, {epsilon})")
    rng = np.random.default_rng(seed)
    n = sys.n
    k = sys.constants_vector
    centre = rng.uniform(-math.pi, math.pi, size=(n_trials, 1))
    y = rng.uniform(-0.5 * epsilon, 0.5 * epsilon, size=(n_trials, n))
    y -= y.mean(axis=1, keepdims=True)
    fy = sys(centre + y) - k
    dot = (fy * y).sum(axis=1)
    norm = np.abs(fy).max(axis=1)
    off_diag = spread(y) > 0
    dissipation_failures = int(((dot >= 0) & off_diag).sum())
    on_diag = centre + np.zeros((1, n))
    f_diag = np.abs(sys(on_diag) - k).max(axis=1)
    zero_failures = int((f_diag > zero_tol).sum()) + int(((norm <= zero_tol) & off_diag).sum())
    return TubeReport(n_trials, dissipation_failures, zero_failures)


# --------------------------------------------------------------------------
# charts and equilibria

@dataclass(frozen=True)
class SynchronyChart:
    """Coordinates on a polydiagonal: one value per class, class of cell 1 pinned to 0."""
    pattern: Partition

    @property
    def free_coords(self) -> tuple[int, ...]:
        return tuple(cls[0] for cls in self.pattern.classes())

    @property
    def dim(self) -> int:
        return self.pattern.n_classes - 1

    @property
    def embedding(self) -> np.ndarray:
        """(n, dim) matrix E with x = E v."""
        e = np.zeros((self.pattern.n_cells, self.dim))
        for c, k in enumerate(self.pattern.labels):
            if k > 0:
                e[c, k - 1] = 1.0
        return e

    def embed(self, values) -> np.ndarray:
        return np.asarray(values, dtype=float) @ self.embedding.T

    def restrict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        reps = list(self.free_coords[1:])
        return x[..., reps] - x[..., :1]


@dataclass
class EquilibriumRecord:
    point: np.ndarray
    pattern: Partition
    spectrum: SignedSpectrumReport
    verdict: str
    family_hint: bool
    residual: float

    @property
    def n_plus(self) -> int:
        return self.spectrum.n_plus

    @property
    def interval(self) -> tuple[int, int]:
        return self.spectrum.bounds.n_plus

    @property
    def counts_triple(self) -> tuple[int, int, int]:
        """(c(G+), c(G-), c(G)) in table column order."""
        c = self.spectrum.counts
        return (c.c_Gplus, c.c_Gminus, c.c_G)

    def to_document(self) -> dict:
        return {
            "point": [float(v) for v in self.point],
            "pattern": str(self.pattern),
            "verdict": self.verdict,
            "family_hint": self.family_hint,
            "residual": self.residual,
            "spectrum": self.spectrum.to_document(),
        }


@dataclass(frozen=True)
class SearchOptions:
    grid: int = 8
    box: float = TWO_PI
    tol: float = 1e-12
    dedup_tol: float = 1e-6
    max_iter: int = 100
    max_halvings: int = 30
    # coordinates within snap_tol of a multiple of pi/snap are snapped when the
    # snapped point is still an equilibrium (0 disables).  At degenerate roots
    # Newton only gets within ~tol**(1/k) of the true point.
    snap: int = 12
    snap_tol: float = 1e-4


def _wrap(x, torus: bool):
    if not torus:
        return x
    x = np.mod(x, TWO_PI)
    # values a hair below 2*pi are the same angle as 0
    return np.where(TWO_PI - x < 1e-9, 0.0, x)


def _distances(a, b, torus: bool) -> np.ndarray:
    """Max-norm distance along the last axis, circular on the torus."""
    d = np.abs(np.asarray(a) - np.asarray(b))
    if torus:
        d = np.mod(d, TWO_PI)
        d = np.minimum(d, TWO_PI - d)
    return d.max(axis=-1) if d.shape[-1] else np.zeros(d.shape[:-1])


def _distance(a, b, torus: bool) -> float:
    return float(_distances(np.atleast_1d(a), np.atleast_1d(b), torus))


def equality_partition(x, torus: bool, tol: float = 1e-6) -> Partition:
    labels, reps = [], []
    for v in x:
        for k, r in enumerate(reps):
            if _distance(v, r, torus) <= tol:
                labels.append(k)
                break
        else:
            labels.append(len(reps))
            reps.append(v)
    return Partition(tuple(labels))


def finest_pattern(sys: AdditiveLaplacianSystem, x, tol: float = 1e-6) -> Partition:
    """Smallest synchrony subspace containing x."""
    return coarsest_balanced_refinement(sys.graph, equality_partition(x, sys.torus_reducible, tol))


def _newton(residual, jacobian, v0, opts: SearchOptions):
    """Batched damped Newton; returns (v, converged mask)."""
    v = v0.copy()
    r = residual(v)
    norm = np.linalg.norm(r, axis=1)
    alive = np.ones(len(v), dtype=bool)
    # keep iterating past tol while the residual still drops: near a crossing
    # of two equilibrium curves |f| ~ d1 * d2, so stopping at tol can leave a
    # point ~sqrt(tol) away from both curves
    for _ in range(opts.max_iter):
        active = alive & (norm > 0)
        if not active.any():
            break
        idx = np.flatnonzero(active)
        jac = jacobian(v[idx])
        step = -np.einsum("bij,bj->bi", np.linalg.pinv(jac, rcond=1e-12), r[idx])
        lam = np.ones(len(idx))
        accepted = np.zeros(len(idx), dtype=bool)
        new_v, new_r, new_norm = v[idx].copy(), r[idx].copy(), norm[idx].copy()
        for _ in range(opts.max_halvings + 1):
            todo = ~accepted
            if not todo.any():
                break
            trial = v[idx][todo] + lam[todo, None] * step[todo]
            tr = residual(trial)
            tn = np.linalg.norm(tr, axis=1)
            ok = tn < norm[idx][todo]
            sel = np.flatnonzero(todo)[ok]
            new_v[sel], new_r[sel], new_norm[sel] = trial[ok], tr[ok], tn[ok]
            accepted[sel] = True
            lam[todo] *= 0.5
        v[idx], r[idx], norm[idx] = new_v, new_r, new_norm
        alive[idx[~accepted]] = False
    converged = np.abs(r).max(axis=1) <= opts.tol
    return v, converged


def _snap(sys, x, opts: SearchOptions) -> np.ndarray:
    if not opts.snap or not len(x):
        return x
    q = math.pi / opts.snap
    lattice = np.round(x / q) * q
    snapped = np.where(np.abs(x - lattice) <= opts.snap_tol, lattice, x)
    keep = np.abs(sys(snapped)).max(axis=1) <= opts.tol
    return np.where(keep[:, None], snapped, x)


def _start_grid(dim: int, opts: SearchOptions, torus: bool) -> np.ndarray:
    if torus:
        axis = np.arange(opts.grid) * (TWO_PI / opts.grid)
    else:
        axis = np.linspace(-opts.box, opts.box, opts.grid)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def find_equilibria(sys: AdditiveLaplacianSystem, pattern: Partition,
                    options: SearchOptions | None = None) -> list[EquilibriumRecord]:
    """Multistart damped Newton on the chart of a balanced pattern."""
    opts = options or SearchOptions()
    if not is_balanced(sys.graph, pattern):
        raise NotBalanced(f"{pattern} is not balanced")
    if abs(float(sys.constants_vector.sum())) > 1e-12:
        warnings.warn("constants do not sum to zero; no equilibria can exist", stacklevel=2)
    torus = sys.torus_reducible
    chart = SynchronyChart(pattern)
    emb = chart.embedding
    rows = list(chart.free_coords[1:])

    if chart.dim == 0:
        candidates = np.zeros((1, pattern.n_cells))
    else:
        def residual(v):
            return sys(v @ emb.T)[:, rows]

        def jacobian(v):
            return (sys.jacobian(v @ emb.T) @ emb)[:, rows, :]

        v, ok = _newton(residual, jacobian, _start_grid(chart.dim, opts, torus), opts)
        candidates = v[ok] @ emb.T

    full_ok = np.abs(sys(candidates)).max(axis=1) <= opts.tol
    if not torus:
        # damped Newton may walk out of the box; the census is of the box only
        full_ok &= np.abs(candidates).max(axis=1) <= opts.box + opts.snap_tol
    candidates = _snap(sys, candidates[full_ok], opts)
    candidates = _wrap(candidates, torus)
    order = np.lexsort(np.round(candidates, 6).T[::-1]) if len(candidates) else []
    unique = np.zeros((0, pattern.n_cells))
    for x in candidates[order]:
        if not len(unique) or _distances(unique, x, torus).min() > opts.dedup_tol:
            unique = np.vstack([unique, x])
    if not len(unique):
        return []
    evs = jacobi_eigenvalues(sys.jacobian(unique))
    return [classify_stability(sys, x, eigenvalues=ev) for x, ev in zip(unique, evs)]


def classify_stability(sys: AdditiveLaplacianSystem, point, eq_tol: float = 1e-10,
                       eigenvalues=None) -> EquilibriumRecord:
    x = np.asarray(point, dtype=float)
    res = float(np.abs(sys(x)).max())
    if res > eq_tol:
        raise NotEquilibrium(f"|f(x)| = {res:.3g} exceeds {eq_tol:.3g}")
    report = eigen_signature(validate_laplacian(sys.jacobian(x)), eigenvalues=eigenvalues)
    p, z, _ = report.signature
    if p >= 1:
        verdict = "unstable"
    elif z == 1:
        verdict = "stable_modulo_diagonal"
    else:
        verdict = "degenerate"
    x = _wrap(x - x[0], sys.torus_reducible) + 0.0   # no negative zeros
    return EquilibriumRecord(x, finest_pattern(sys, x), report, verdict, z >= 2, res)


# --------------------------------------------------------------------------
# generic Jacobian on the diagonal

@dataclass
class GenericJacobianReport:
    nus: list[float]
    alpha: list[float]
    beta: list[float]
    residual: float
    degenerate: bool


def generic_jacobian_check(sys: AdditiveLaplacianSystem, n_points: int = 5, seed: int = 0) -> GenericJacobianReport:
    """Fit Jf(nu) = alpha I + beta A by least squares at random diagonal points."""
    if classify(sys.graph) != "regular":
        raise GraphNotRegular("the graph must have one cell class and one edge class")
    n = sys.n
    adj = adjacency_matrices(sys.graph)[0].entries if sys.graph.edges else np.zeros((n, n))
    basis = np.stack([np.eye(n).ravel(), np.asarray(adj, dtype=float).ravel()], axis=1)
    nus = np.random.default_rng(seed).uniform(-math.pi, math.pi, size=n_points)
    alphas, betas, worst = [], [], 0.0
    for nu in nus:
        jac = sys.jacobian(np.full(n, nu)).ravel()
        coef, *_ = np.linalg.lstsq(basis, jac, rcond=None)
        worst = max(worst, float(np.abs(basis @ coef - jac).max()))
        alphas.append(float(coef[0]))
        betas.append(float(coef[1]))
    return GenericJacobianReport([float(v) for v in nus], alphas, betas, worst,
                                 any(abs(b) < 1e-10 for b in betas))


# --------------------------------------------------------------------------
# Kuramoto G6 census

@dataclass(frozen=True)
class GoldenEntry:
    representative: str
    counts: tuple[int, int, int]   # (c(G+), c(G-), c(G))
    interval: tuple[int, int]


@dataclass(frozen=True)
class GoldenRow:
    row: int
    pattern: str
    entries: tuple[GoldenEntry, ...]


GOLDEN_TABLE1: tuple[GoldenRow, ...] = (
    GoldenRow(1, "1,4", ()),
    GoldenRow(2, "1,2,4,5|3|6", (GoldenEntry("(0,0,pi,0,0,0)", (2, 2, 1), (1, 4)),)),
    GoldenRow(3, "1,2|3|4,5|6", (
        GoldenEntry("(0,0,a,pi,pi,-a), (0,0,a,pi,pi,a+pi)", (2, 1, 1), (1, 5)),
        GoldenEntry("(0,0,pi/2,pi,pi,3pi/2)", (4, 4, 3), (1, 2)),
    )),
    GoldenRow(4, "1,4|2,5|3|6", (
        GoldenEntry("(0,pi,a,0,pi,-a), (0,pi,a,0,pi,a+pi)", (2, 1, 1), (1, 5)),
        GoldenEntry("(0,pi,pi/2,0,pi,-pi/2)", (6, 3, 3), (3, 3)),
        GoldenEntry("(0,pi,pi,0,pi,0)", (2, 2, 1), (1, 4)),
    )),
    GoldenRow(5, "1,2,4,5|3,6", (GoldenEntry("(0,pi,0,0,pi,0)", (3, 1, 1), (2, 5)),)),
    GoldenRow(6, "1,2,3|4,5,6", (GoldenEntry("(0,0,0,pi,pi,pi)", (2, 1, 1), (1, 5)),)),
    GoldenRow(7, "1,2|3,6|4,5", (GoldenEntry("(0,0,0,pi,pi,0)", (2, 1, 1), (1, 5)),)),
    GoldenRow(8, "1,4|2,5|3,6", (GoldenEntry("(0,4pi/3,2pi/3,0,4pi/3,2pi/3)", (6, 1, 1), (5, 5)),)),
)


def table1_report(grid: int = 8) -> dict:
    """Census of Kuramoto-G6 equilibria per conjugacy class of synchrony patterns.

    Each converged point is filed under the class of its *finest* pattern, so
    a search in a coarse chart may contribute to a finer row.  A row matches
    when its set of (counts, interval) entries equals the golden one and every
    exact n+ lies in its interval.
    """
    sys = kuramoto_g6()
    g = sys.graph
    group = find_automorphisms(g)
    lattice = enumerate_synchrony(g)
    classes = [pc for pc in conjugacy_group_patterns(g, lattice, group)
               if not (pc.representative.is_trivial or pc.representative.is_total)]
    row_of = {}
    for golden in GOLDEN_TABLE1:
        rep = canonical_representative(Partition.parse(golden.pattern, g.n_cells), group)
        row_of[rep] = golden.row
    # largest fixed-point subspaces first
    search_order = sorted(GOLDEN_TABLE1, key=lambda r: (-Partition.parse(r.pattern, 6).n_classes, r.row))
    found: dict[int, dict[tuple, EquilibriumRecord]] = {r.row: {} for r in GOLDEN_TABLE1}
    unfiled = 0
    for golden in search_order:
        pattern = Partition.parse(golden.pattern, g.n_cells)
        for rec in find_equilibria(sys, pattern, SearchOptions(grid=grid)):
            row = row_of.get(canonical_representative(rec.pattern, group))
            if row is None:
                unfiled += 1   # total synchrony
                continue
            key = rec.counts_triple + rec.interval
            found[row].setdefault(key, rec)
    rows, all_match = [], len(classes) == len(GOLDEN_TABLE1)
    for golden in GOLDEN_TABLE1:
        want = {e.counts + e.interval for e in golden.entries}
        got = found[golden.row]
        in_interval = all(r.interval[0] <= r.n_plus <= r.interval[1] for r in got.values())
        notes = []
        if not golden.entries and got:
            match = in_interval
            notes.append("points found whose finest pattern is this row; no golden entry to compare")
        else:
            match = set(got) == want and in_interval
        all_match &= match
        rows.append({
            "row": golden.row,
            "pattern": str(Partition.parse(golden.pattern, g.n_cells)),
            "match": match,
            "golden": [{"representative": e.representative, "counts": list(e.counts),
                        "n_plus_interval": list(e.interval)} for e in golden.entries],
            "found": [{"representative": [float(v) for v in rec.point],
                       "counts": list(rec.counts_triple),
                       "n_plus_interval": list(rec.interval),
                       "exact_n_plus": rec.n_plus,
                       "verdict": rec.verdict,
                       "family_hint": rec.family_hint}
                      for key, rec in sorted(got.items())],
            "missing": [list(k) for k in sorted(want - set(got))],
            "extra": [] if not golden.entries else [list(k) for k in sorted(set(got) - want)],
            "notes": notes,
        })
    return {"graph": "G6", "coupling": "sine(1)", "grid": grid, "rows": rows,
            "diagonal_points": unfiled, "match": all_match}
