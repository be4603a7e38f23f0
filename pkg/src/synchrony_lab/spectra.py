"""Signed-graph Laplacian spectra: sign signatures and component-count bounds.

Convention: a Laplacian here is a symmetric matrix whose rows sum to zero, and
the weight of edge ``i-j`` is the off-diagonal entry ``l_ij`` itself.  Positive
weights therefore push eigenvalues *down*; a connected graph with only positive
weights has ``n_plus = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LaplacianError", "NotSymmetric", "RowSumNonzero", "NoConvergence",
    "LaplacianMatrix", "ComponentCounts", "Bounds", "SignedSpectrumReport",
    "DisjointSet", "validate_laplacian", "component_counts", "jacobi_eigenvalues",
    "eigen_signature", "theorem_bounds", "signature", "random_signed_laplacian",
]


class LaplacianError(ValueError):
    pass


class NotSymmetric(LaplacianError):
    pass


class RowSumNonzero(LaplacianError):
    pass


class NoConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class LaplacianMatrix:
    entries: np.ndarray
    tolerance: float

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def norm_inf(self) -> float:
        return float(np.abs(self.entries).sum(axis=1).max()) if self.n else 0.0


@dataclass(frozen=True)
class ComponentCounts:
    c_G: int
    c_Gplus: int
    c_Gminus: int


@dataclass(frozen=True)
class Bounds:
    n_plus: tuple[int, int]
    n_zero: tuple[int, int]
    n_minus: tuple[int, int]

    def contains(self, sig: tuple[int, int, int]) -> bool:
        p, z, m = sig
        return (self.n_plus[0] <= p <= self.n_plus[1]
                and self.n_zero[0] <= z <= self.n_zero[1]
                and self.n_minus[0] <= m <= self.n_minus[1])


@dataclass
class SignedSpectrumReport:
    signature: tuple[int, int, int]
    counts: ComponentCounts
    bounds: Bounds
    eigenvalues: list[float]
    within_bounds: bool
    zero_tol: float
    nearest_to_tol: float

    @property
    def n_plus(self) -> int:
        return self.signature[0]

    @property
    def n_zero(self) -> int:
        return self.signature[1]

    @property
    def n_minus(self) -> int:
        return self.signature[2]

    def to_document(self) -> dict:
        return {
            "signature": {"n_plus": self.n_plus, "n_zero": self.n_zero, "n_minus": self.n_minus},
            "counts": {"c_G": self.counts.c_G, "c_Gplus": self.counts.c_Gplus,
                       "c_Gminus": self.counts.c_Gminus},
            "bounds": {"n_plus": list(self.bounds.n_plus), "n_zero": list(self.bounds.n_zero),
                       "n_minus": list(self.bounds.n_minus)},
            "eigenvalues": self.eigenvalues,
            "within_bounds": self.within_bounds,
        }


class DisjointSet:
    """Union-find with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.n_sets = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.n_sets -= 1
        return True


def validate_laplacian(m, tol: float = 1e-10) -> LaplacianMatrix:
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise LaplacianError(f"expected a square matrix, got shape {a.shape}")
    asym = float(np.abs(a - a.T).max()) if a.size else 0.0
    if asym > tol:
        raise NotSymmetric(f"max |m_ij - m_ji| = {asym:.3g} exceeds {tol:.3g}")
    rows = float(np.abs(a.sum(axis=1)).max()) if a.size else 0.0
    if rows > tol:
        raise RowSumNonzero(f"max |row sum| = {rows:.3g} exceeds {tol:.3g}")
    return LaplacianMatrix(a, tol)


def default_edge_tol(L: LaplacianMatrix) -> float:
    return 1e-12 * (1.0 + L.norm_inf)


def default_zero_tol(L: LaplacianMatrix) -> float:
    return 1e-9 * (1.0 + L.norm_inf) * L.n


def component_counts(L: LaplacianMatrix, edge_tol: float | None = None) -> ComponentCounts:
    if edge_tol is None:
        edge_tol = default_edge_tol(L)
    n = L.n
    full, plus, minus = DisjointSet(n), DisjointSet(n), DisjointSet(n)
    iu, ju = np.triu_indices(n, 1)
    w = L.entries[iu, ju]
    for i, j, x in zip(iu.tolist(), ju.tolist(), w.tolist()):
        if x > edge_tol:
            full.union(i, j)
            plus.union(i, j)
        elif x < -edge_tol:
            full.union(i, j)
            minus.union(i, j)
    return ComponentCounts(full.n_sets, plus.n_sets, minus.n_sets)


def jacobi_eigenvalues(a, tol: float = 1e-15, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of symmetric matrices by cyclic Jacobi rotations.

    Accepts a single ``(n, n)`` matrix or a stack ``(..., n, n)``; each pivot
    pair ``(p, q)`` is rotated in every matrix of the stack at once.  Returns
    eigenvalues sorted ascending along the last axis.
    """
    a = np.array(a, dtype=float)
    single = a.ndim == 2
    if single:
        a = a[None]
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    a = a.reshape(-1, n, n).copy()
    scale = np.sqrt((a * a).sum(axis=(1, 2)))
    threshold = tol * np.maximum(scale, np.finfo(float).tiny)
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt((a[:, off_mask] ** 2).sum(axis=1))
        if (off <= threshold).all():
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                active = np.abs(apq) > 0.0
                if not active.any():
                    continue
                safe = np.where(active, apq, 1.0)
                with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                    # huge theta means a negligible pivot: t -> 0, no rotation
                    theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                    t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(theta == 0.0, 1.0, np.nan_to_num(t))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = a[:, p, :].copy(), a[:, q, :].copy()
                a[:, p, :] = c[:, None] * rp - s[:, None] * rq
                a[:, q, :] = s[:, None] * rp + c[:, None] * rq
                cp, cq = a[:, :, p].copy(), a[:, :, q].copy()
                a[:, :, p] = c[:, None] * cp - s[:, None] * cq
                a[:, :, q] = s[:, None] * cp + c[:, None] * cq
                a[:, p, q] = a[:, q, p] = 0.0
    else:
        off = np.sqrt((a[:, off_mask] ** 2).sum(axis=1))
        if (off > threshold * 1e3).any():
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    vals = np.sort(np.diagonal(a, axis1=1, axis2=2), axis=1).reshape(batch_shape + (n,))
    return vals[0] if single else vals


def signature(eigenvalues, zero_tol: float) -> tuple[int, int, int]:
    ev = np.asarray(eigenvalues)
    return (int((ev > zero_tol).sum()), int((np.abs(ev) <= zero_tol).sum()),
            int((ev < -zero_tol).sum()))


def theorem_bounds(counts: ComponentCounts, n: int) -> Bounds:
    c, cp, cm = counts.c_G, counts.c_Gplus, counts.c_Gminus
    return Bounds(
        n_plus=(max(cp - c, 0), n - cm),
        n_zero=(c, n + 2 * c - cp - cm),
        n_minus=(max(cm - c, 0), n - cp),
    )


def eigen_signature(L: LaplacianMatrix, zero_tol: float | None = None,
                    edge_tol: float | None = None, eigenvalues=None) -> SignedSpectrumReport:
    """Signature, counts and bounds; ``eigenvalues`` skips the solve when precomputed in a batch."""
    if zero_tol is None:
        zero_tol = default_zero_tol(L)
    ev = jacobi_eigenvalues(L.entries) if eigenvalues is None else np.sort(np.asarray(eigenvalues))
    sig = signature(ev, zero_tol)
    counts = component_counts(L, edge_tol)
    bounds = theorem_bounds(counts, L.n)
    # eigenvalue whose magnitude sits closest to the zero threshold
    nearest = float(ev[np.argmin(np.abs(np.abs(ev) - zero_tol))]) if L.n else 0.0
    return SignedSpectrumReport(sig, counts, bounds, [float(x) for x in ev],
                                bounds.contains(sig), zero_tol, nearest)


def random_signed_laplacian(rng: np.random.Generator, n: int, density: float | None = None) -> np.ndarray:
    """Symmetric zero-row-sum matrix with weights uniform in [-1, 1] on a random edge set."""
    if density is None:
        density = rng.uniform(0.1, 1.0)
    w = rng.uniform(-1.0, 1.0, size=(n, n))
    keep = rng.random((n, n)) < density
    w = np.triu(w * keep, 1)
    w = w + w.T
    np.fill_diagonal(w, -w.sum(axis=1))
    return w
