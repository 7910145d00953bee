"""Upper bound on the spectral radius via the walk on the tree of geodesics.

The nearest-neighbour walk on the tree of geodesics has first-return series
w_i = F_{-i}(z) solving the monotone polynomial system
w_i = p_{-i} z + z w_i sum_j M_ij p_ij w_j.  The minimal solution exists up
to a fold point R_F (Jacobian eigenvalue 1), located by bisection on
convergence of the monotone iteration and polished by Newton on the extended
fold system.  The Green-kernel radius is R_F itself when the first-return
value there stays <= 1, else the smaller root of F(z) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .automaton import ReducedAutomaton
from .errors import FoldNewtonFailed, InvalidRoot, NotConverged

ITERATION_CAP = 1_000_000
DIVERGENCE_CAP = 1e6


@dataclass
class TreeWalkSpec:
    """Transition data of the tree walk over the reduced type set."""

    types: tuple[int, ...]
    M: np.ndarray
    d: np.ndarray
    r: np.ndarray
    p_minus: np.ndarray
    p_step: np.ndarray
    root_type: int
    root_row: np.ndarray
    root_d: int


@dataclass
class FixedPointSolution:
    z: float
    w: np.ndarray
    residual: float
    jacobian_spectral_radius: float
    iterations: int


@dataclass
class Diverged:
    z: float
    iterations: int
    cap_hit: bool


@dataclass
class FoldResult:
    R_F: float
    w: np.ndarray
    u: np.ndarray
    residual: float
    fallback: bool


@dataclass
class UpperBoundResult:
    R_F: float
    F_at_RF: float
    R_Gk: float
    rho_T: float
    branch: str
    root_type: int
    fold_residual: float
    fold_fallback: bool
    jacobian_radius: float


def default_root_type(ra: ReducedAutomaton) -> int:
    """Lowest r=2 type (a polygon summit analogue), else lowest type."""
    for t, rv in zip(ra.types, ra.r):
        if rv == 2:
            return t
    return ra.types[0]


def tree_walk_spec(ra: ReducedAutomaton, root_type: int) -> TreeWalkSpec:
    """Probabilities p_{-i} = r_i/d_i and p_{i,j} = 1/d_i over the reduced set."""
    if root_type not in ra.types:
        raise InvalidRoot(f"type {root_type} is not in the reduced set {ra.types}")
    pos = ra.types.index(root_type)
    d = ra.d.astype(float)
    r = ra.r.astype(float)
    spec = TreeWalkSpec(
        types=ra.types,
        M=ra.M.astype(float),
        d=ra.d.copy(),
        r=ra.r.copy(),
        p_minus=r / d,
        p_step=1.0 / d,
        root_type=root_type,
        root_row=ra.M[pos].astype(float),
        root_d=int(ra.d[pos]),
    )
    balance = spec.p_minus + (spec.M * spec.p_step[:, None]).sum(axis=1)
    if not np.allclose(balance, 1.0, atol=1e-12):
        raise InvalidRoot("transition probabilities do not sum to 1 per type")
    return spec


def _phi(spec: TreeWalkSpec, z: float, w: np.ndarray) -> np.ndarray:
    Mp = spec.M * spec.p_step[:, None]
    return z * (spec.p_minus + w * (Mp @ w))


def _jacobian(spec: TreeWalkSpec, z: float, w: np.ndarray) -> np.ndarray:
    Mp = spec.M * spec.p_step[:, None]
    return z * (np.diag(Mp @ w) + w[:, None] * Mp)


def minimal_fixed_point(spec: TreeWalkSpec, z: float):
    """Monotone iteration from 0; FixedPointSolution or Diverged."""
    K = spec.M.shape[0]
    Mp = spec.M * spec.p_step[:, None]
    base = z * spec.p_minus
    w = np.zeros(K)
    for it in range(1, ITERATION_CAP + 1):
        nw = base + z * (w * (Mp @ w))
        if nw.max() > DIVERGENCE_CAP:
            return Diverged(z=z, iterations=it, cap_hit=True)
        delta = float(np.max(np.abs(nw - w)))
        w = nw
        # 5e-16 relative: a one-ulp limit cycle must still count as converged
        if delta < 5e-16 * max(1.0, float(w.max())):
            residual = float(np.max(np.abs(_phi(spec, z, w) - w)))
            jac = _jacobian(spec, z, w)
            rad = float(np.max(np.abs(np.linalg.eigvals(jac))))
            return FixedPointSolution(
                z=z, w=w, residual=residual, jacobian_spectral_radius=rad, iterations=it
            )
    return Diverged(z=z, iterations=ITERATION_CAP, cap_hit=False)


def _fold_newton(spec: TreeWalkSpec, w0, u0, z0, tol: float):
    """Newton on (Phi(w)-w, J(w)u-u, sum(u)-1) in the unknowns (w, u, z)."""
    K = w0.size
    Mp = spec.M * spec.p_step[:, None]
    w, u, z = w0.copy(), u0.copy(), float(z0)
    for _ in range(60):
        J = _jacobian(spec, z, w)
        F1 = _phi(spec, z, w) - w
        F2 = J @ u - u
        F3 = np.array([u.sum() - 1.0])
        res = float(max(np.max(np.abs(F1)), np.max(np.abs(F2)), abs(F3[0])))
        if res < tol:
            return w, u, z, res
        A = np.zeros((2 * K + 1, 2 * K + 1))
        A[:K, :K] = J - np.eye(K)
        A[:K, 2 * K] = _phi(spec, z, w) / z
        A[K:2 * K, :K] = z * (u[:, None] * Mp + np.diag(Mp @ u))
        A[K:2 * K, K:2 * K] = J - np.eye(K)
        A[K:2 * K, 2 * K] = (J @ u) / z
        A[2 * K, K:2 * K] = 1.0
        try:
            step = np.linalg.solve(A, np.concatenate([F1, F2, F3]))
        except np.linalg.LinAlgError:
            return None
        w = w - step[:K]
        u = u - step[K:2 * K]
        z = z - float(step[2 * K])
        if not np.isfinite(z) or z <= 0:
            return None
    return None


def _bracket_fold(spec: TreeWalkSpec, width: float) -> tuple[float, float, FixedPointSolution]:
    lo, hi = 1.0, 3.0
    sol = minimal_fixed_point(spec, lo)
    if isinstance(sol, Diverged):
        raise NotConverged("no minimal fixed point at z = 1")
    while not isinstance(minimal_fixed_point(spec, hi), Diverged):
        hi *= 1.5
        if hi > 100:
            raise NotConverged("could not bracket the fold point below z = 100")
    last = sol
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        out = minimal_fixed_point(spec, mid)
        if isinstance(out, Diverged):
            hi = mid
        else:
            lo = mid
            last = out
    return lo, hi, last


def fold_point(spec: TreeWalkSpec, tol: float = 1e-13) -> FoldResult:
    """Locate R_F: bisection bracket, then Newton on the fold system."""
    lo, hi, sol = _bracket_fold(spec, 1e-6)
    J = _jacobian(spec, lo, sol.w)
    vals, vecs = np.linalg.eig(J)
    u = np.real(vecs[:, np.argmax(np.abs(vals))])
    if u.sum() < 0:
        u = -u
    u = u / u.sum()
    out = _fold_newton(spec, sol.w, u, 0.5 * (lo + hi), tol)
    if out is not None:
        w, u, z, res = out
        if lo - 1e-4 <= z <= hi + 1e-4 and (w >= -1e-12).all() and (u > 0).all():
            return FoldResult(R_F=z, w=w, u=u, residual=res, fallback=False)
    # fallback: pure bisection refined to 1e-12, flagged
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        outm = minimal_fixed_point(spec, mid)
        if isinstance(outm, Diverged):
            hi = mid
        else:
            lo = mid
            sol = outm
    return FoldResult(R_F=0.5 * (lo + hi), w=sol.w, u=u, residual=float("nan"),
                      fallback=True)


def critical_radius(spec: TreeWalkSpec) -> float:
    """R_F, the supremum of z admitting a minimal fixed point."""
    return fold_point(spec).R_F


def first_return_value(spec: TreeWalkSpec, z: float, w: np.ndarray | None = None) -> float:
    """F(root, root | z) = sum_j M_{root,j} (1/d_root) z w_j."""
    if w is None:
        sol = minimal_fixed_point(spec, z)
        if isinstance(sol, Diverged):
            raise NotConverged(f"no minimal fixed point at z = {z}")
        w = sol.w
    return float(z * np.dot(spec.root_row, w) / spec.root_d)


def upper_bound(ra: ReducedAutomaton, root_type: int | None = None,
                tol_fold: float = 1e-13) -> UpperBoundResult:
    """rho_T = 1/R_Gk from the fold point and the F(R_F) <= 1 decision."""
    root = default_root_type(ra) if root_type is None else root_type
    spec = tree_walk_spec(ra, root)
    fold = fold_point(spec, tol=tol_fold)
    F_rf = first_return_value(spec, fold.R_F, fold.w)
    if F_rf <= 1.0 + 1e-12:
        branch = "R_F"
        R_Gk = fold.R_F
        # the R_F branch is root-independent; spot-check one other candidate
        for t, rv in zip(spec.types, spec.r):
            if t != root and rv == 2:
                other = tree_walk_spec(ra, int(t))
                assert first_return_value(other, fold.R_F, fold.w) <= 1.0 + 1e-9
                break
    else:
        branch = "z0"
        lo, hi = 1e-9, fold.R_F
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if first_return_value(spec, mid) >= 1.0:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-13:
                break
        R_Gk = 0.5 * (lo + hi)
    jac_rad = float(
        np.max(np.abs(np.linalg.eigvals(_jacobian(spec, fold.R_F, fold.w))))
    )
    return UpperBoundResult(
        R_F=fold.R_F,
        F_at_RF=F_rf,
        R_Gk=R_Gk,
        rho_T=1.0 / R_Gk,
        branch=branch,
        root_type=root,
        fold_residual=fold.residual,
        fold_fallback=fold.fallback,
        jacobian_radius=jac_rad,
    )
