"""Model-agnostic numerical primitives.

Adaptive Gauss-Kronrod quadrature, monotone root solving, box-constrained
derivative-free minimization with multistart, and a cyclic Jacobi
eigensolver for small dense symmetric matrices. Everything here is a pure
function of its inputs and safe to call from many workers at once.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Tolerance",
    "Bracket",
    "ConvergenceError",
    "integrate_adaptive",
    "solve_increasing",
    "minimize_box",
    "minimize_multistart",
    "eigenvalues_symmetric",
]


@dataclass(frozen=True)
class Tolerance:
    """Accuracy request: absolute and relative targets plus an iteration cap.

    ``max_iter`` is interpreted per operation (quadrature panels, solver
    iterations, simplex iterations).
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_iter: int = 10_000

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol + self.rel_tol <= 0:
            raise ValueError("abs_tol + rel_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted. Carries the best estimate found so far."""

    def __init__(self, message, best=None, bound=None):
        super().__init__(message)
        self.best = best
        self.bound = bound


# 7-point Gauss / 15-point Kronrod pair on [-1, 1] (classic QUADPACK values).
_K15_NODES = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_K15_WEIGHTS = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
# Gauss weights sit on Kronrod nodes 1, 3, ..., 13.
_G7_WEIGHTS = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])


def _gk15(f, a, b):
    """One 15-point Kronrod panel on [a, b]: (integral, error estimate)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fv = np.empty(15)
    for i in range(15):
        fv[i] = f(mid + half * _K15_NODES[i])
    ik = half * float(_K15_WEIGHTS @ fv)
    ig = half * float(_G7_WEIGHTS @ fv[1:14:2])
    return ik, abs(ik - ig)


def integrate_adaptive(f: Callable[[float], float], a: float, b: float,
                       tol: Tolerance | None = None) -> float:
    """Integrate f over [a, b] with adaptive 15-point panels.

    Panels are split by recursive bisection, worst error first, until the
    summed error estimate meets ``abs_tol + rel_tol * |integral|``.
    ``tol.max_iter`` caps the number of panels.
    """
    if tol is None:
        tol = Tolerance(max_iter=2000)
    if not a < b:
        raise ValueError(f"integration requires a < b, got [{a}, {b}]")

    val, err = _gk15(f, a, b)
    # heap of (-error, insertion counter, a, b, value, error)
    count = 0
    panels = [(-err, count, a, b, val, err)]
    total_val, total_err = val, err
    width_floor = 4 * np.finfo(float).eps * (abs(a) + abs(b) + 1.0)
    while total_err > tol.abs_tol + tol.rel_tol * abs(total_val):
        if len(panels) >= tol.max_iter:
            raise ConvergenceError(
                f"quadrature did not converge within {tol.max_iter} panels "
                f"(estimate {total_val!r}, error bound {total_err:.3e})",
                best=total_val, bound=total_err)
        _, _, pa, pb, pval, perr = heapq.heappop(panels)
        pm = 0.5 * (pa + pb)
        if pb - pa < width_floor:
            # refinement exhausted at machine resolution; accept the panel
            heapq.heappush(panels, (0.0, count + 1, pa, pb, pval, 0.0))
            count += 1
            total_err -= perr
            continue
        lv, le = _gk15(f, pa, pm)
        rv, re = _gk15(f, pm, pb)
        heapq.heappush(panels, (-le, count + 1, pa, pm, lv, le))
        heapq.heappush(panels, (-re, count + 2, pm, pb, rv, re))
        count += 2
        total_val += lv + rv - pval
        total_err += le + re - perr
    return total_val


def solve_increasing(f: Callable[[float], float], target: float,
                     bracket: Bracket, tol: Tolerance | None = None) -> float:
    """Solve f(x) = target for f strictly increasing on the bracket.

    Bisection with secant acceleration; the bracket must straddle the
    target. Stops when |f(x) - target| <= abs_tol or the bracket width
    drops below rel_tol * |x|.
    """
    if tol is None:
        tol = Tolerance(max_iter=200)
    lo, hi = bracket.lo, bracket.hi
    flo = f(lo) - target
    fhi = f(hi) - target
    if flo > 0 or fhi < 0:
        raise ValueError(
            f"bracket [{lo}, {hi}] does not straddle the target: "
            f"f(lo)-target={flo:.3e}, f(hi)-target={fhi:.3e}")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi

    x, fx = hi, fhi
    x_prev, fx_prev = lo, flo
    for _ in range(tol.max_iter):
        # secant proposal, safeguarded to land strictly inside the bracket
        trial = None
        if fx != fx_prev:
            s = x - fx * (x - x_prev) / (fx - fx_prev)
            gap = hi - lo
            if lo + 0.01 * gap < s < hi - 0.01 * gap:
                trial = s
        if trial is None:
            trial = 0.5 * (lo + hi)
        ft = f(trial) - target
        x_prev, fx_prev = x, fx
        x, fx = trial, ft
        if ft <= 0:
            lo = trial
        else:
            hi = trial
        if abs(ft) <= tol.abs_tol or (hi - lo) <= tol.rel_tol * abs(trial):
            return trial
        if (hi - lo) <= 4 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0):
            return 0.5 * (lo + hi)  # machine-resolution bracket
    raise ConvergenceError(
        f"root solve did not converge in {tol.max_iter} iterations "
        f"(x={x!r}, residual={fx:.3e})", best=x)


def _clamp(x, lower, upper):
    if lower is not None:
        x = np.maximum(x, lower)
    if upper is not None:
        x = np.minimum(x, upper)
    return x


def _nelder_mead(f, x0, lower, upper, fatol, frtol, xatol, max_iter, step):
    """Projected Nelder-Mead. Returns (x, fx, converged).

    Candidates are clamped onto the box before evaluation. Uses the
    dimension-adaptive expansion/contraction coefficients, which behave
    better for d >= 4.
    """
    d = len(x0)
    alpha = 1.0
    gamma = 1.0 + 2.0 / d
    beta = 0.75 - 1.0 / (2.0 * d)
    sigma = 1.0 - 1.0 / d

    x0 = _clamp(np.asarray(x0, dtype=float), lower, upper)
    simplex = [x0]
    for i in range(d):
        v = x0.copy()
        step_i = step[i] if np.ndim(step) else step
        v[i] += step_i
        v = _clamp(v, lower, upper)
        if np.allclose(v, x0):
            v = x0.copy()
            v[i] -= step_i
            v = _clamp(v, lower, upper)
        simplex.append(v)
    fs = [f(v) for v in simplex]

    for _ in range(max_iter):
        order = np.argsort(fs, kind="stable")
        simplex = [simplex[i] for i in order]
        fs = [fs[i] for i in order]
        fbest, fworst = fs[0], fs[-1]
        spread = max(np.max(np.abs(v - simplex[0])) for v in simplex[1:])
        if fworst - fbest <= fatol + frtol * abs(fbest) and spread <= xatol:
            return simplex[0], fbest, True

        centroid = np.mean(simplex[:-1], axis=0)
        xr = _clamp(centroid + alpha * (centroid - simplex[-1]), lower, upper)
        fr = f(xr)
        if fr < fs[0]:
            xe = _clamp(centroid + gamma * (xr - centroid), lower, upper)
            fe = f(xe)
            if fe < fr:
                simplex[-1], fs[-1] = xe, fe
            else:
                simplex[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            simplex[-1], fs[-1] = xr, fr
        else:
            if fr < fs[-1]:
                xc = _clamp(centroid + beta * (xr - centroid), lower, upper)
            else:
                xc = _clamp(centroid + beta * (simplex[-1] - centroid), lower, upper)
            fc = f(xc)
            if fc < min(fr, fs[-1]):
                simplex[-1], fs[-1] = xc, fc
            else:
                for i in range(1, d + 1):
                    simplex[i] = _clamp(simplex[0] + sigma * (simplex[i] - simplex[0]),
                                        lower, upper)
                    fs[i] = f(simplex[i])
    order = np.argsort(fs, kind="stable")
    return simplex[order[0]], fs[order[0]], False


def minimize_box(f: Callable[[np.ndarray], float], init: Sequence[float],
                 lower_bounds: Sequence[float] | None = None,
                 tol: Tolerance | None = None, *,
                 upper_bounds: Sequence[float] | None = None,
                 initial_step: Sequence[float] | float | None = None):
    """Minimize f over a box with a projected derivative-free simplex.

    Returns ``(point, value)``. Raises :class:`ConvergenceError` (carrying
    the best point found) if the iteration budget runs out first.
    """
    init = np.asarray(init, dtype=float)
    d = init.size
    if tol is None:
        tol = Tolerance(abs_tol=1e-10, rel_tol=1e-12, max_iter=200 * d)
    lower = None if lower_bounds is None else np.asarray(lower_bounds, dtype=float)
    upper = None if upper_bounds is None else np.asarray(upper_bounds, dtype=float)
    if initial_step is None:
        initial_step = 0.1 * (1.0 + np.abs(init))
    xatol = max(math.sqrt(tol.abs_tol) * 1e-2, 1e-12)
    x, fx, ok = _nelder_mead(f, init, lower, upper, tol.abs_tol, tol.rel_tol,
                             xatol, tol.max_iter, initial_step)
    if not ok:
        raise ConvergenceError(
            f"simplex search did not converge in {tol.max_iter} iterations",
            best=(x, fx))
    return x, fx


# first primes, for the Kronecker (sqrt-prime) lattice used by multistart
_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
           59, 61, 67, 71, 73, 79, 83, 89)


def lattice_points(n: int, d: int, seed: int = 0) -> np.ndarray:
    """n quasi-uniform points in [0,1)^d: the additive sqrt-prime lattice.

    Deterministic; the seed only shifts the lattice phase.
    """
    alpha = np.sqrt(np.array(_PRIMES[:d], dtype=float))
    shift = np.modf(0.5 + seed * np.sqrt(np.array(_PRIMES[d:2 * d], dtype=float)))[0]
    j = np.arange(1, n + 1)[:, None]
    return np.modf(shift + j * alpha)[0]


def minimize_multistart(f: Callable[[np.ndarray], float],
                        box: Sequence[tuple[float, float]], n_starts: int,
                        tol: Tolerance | None = None, seed: int = 0):
    """Global search: run the simplex minimizer from lattice start points.

    Returns the best ``(point, value)``; the best point is re-polished with
    restarted simplices until it stops improving. Deterministic for a given
    seed. Errors from individual starts only propagate if every start fails.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    box = [(float(lo), float(hi)) for lo, hi in box]
    lower = np.array([b[0] for b in box])
    upper = np.array([b[1] for b in box])
    d = len(box)
    if tol is None:
        tol = Tolerance(abs_tol=1e-10, rel_tol=1e-12, max_iter=200 * d)

    starts = lower + (upper - lower) * lattice_points(n_starts, d, seed)
    best = None
    for x0 in starts:
        try:
            x, fx = minimize_box(f, x0, lower, tol, upper_bounds=upper,
                                 initial_step=0.2 * (upper - lower))
        except ConvergenceError as err:
            if not (isinstance(err.best, tuple) and len(err.best) == 2):
                raise  # not a budget exhaustion: the objective itself failed
            x, fx = err.best
        if best is None or fx < best[1]:
            best = (x, fx)

    # polish: restart a fresh small simplex at the incumbent until stable
    x, fx = best
    span = np.maximum(1e-6 * (upper - lower), 1e-7)
    for _ in range(4):
        try:
            xp, fp = minimize_box(f, x, lower, tol, upper_bounds=upper,
                                  initial_step=span)
        except ConvergenceError as err:
            xp, fp = err.best
        if fp >= fx - max(tol.abs_tol * 1e-3, 1e-15):
            if fp < fx:
                x, fx = xp, fp
            break
        x, fx = xp, fp
    return x, fx


def _polished_descent(f, starts, lower, upper, tol, step):
    """Best simplex minimum over explicit starts, then restart-polished.

    Shared engine for the dimer minimizers: near a phase boundary the
    landscape is quartically flat, so a converged run is restarted with a
    fresh tiny simplex until the value stops improving.
    """
    best = None
    for x0, st in zip(starts, step if isinstance(step, list) else [step] * len(starts)):
        try:
            x, fx = minimize_box(f, x0, lower, tol, upper_bounds=upper,
                                 initial_step=st)
        except ConvergenceError as err:
            if not (isinstance(err.best, tuple) and len(err.best) == 2):
                raise
            x, fx = err.best
        if best is None or fx < best[1]:
            best = (x, fx)
    x, fx = best
    for _ in range(3):
        try:
            xp, fp = minimize_box(f, x, lower, tol, upper_bounds=upper,
                                  initial_step=1e-6 * (1.0 + np.abs(x)))
        except ConvergenceError as err:
            if not (isinstance(err.best, tuple) and len(err.best) == 2):
                raise
            xp, fp = err.best
        if fp >= fx - 1e-15:
            if fp < fx:
                x, fx = xp, fp
            break
        x, fx = xp, fp
    return x, fx


def eigenvalues_symmetric(M: np.ndarray, tol: Tolerance | None = None) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric matrix by cyclic Jacobi.

    Sweeps rotate away off-diagonal entries until their Frobenius norm
    falls below 1e-14 of the matrix norm; adequate for the dense matrices
    used here (n <= 128).
    """
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    norm = float(np.linalg.norm(A))
    asym = float(np.max(np.abs(A - A.T))) if n > 1 else 0.0
    if asym > 1e-12 * max(norm, 1.0):
        raise ValueError(f"matrix is not symmetric: max|M - M^T| = {asym:.3e}")
    if n == 1:
        return A[0, :1].copy()
    A = 0.5 * (A + A.T)
    if norm == 0.0:
        return np.zeros(n)

    target = 1e-14 * norm if tol is None else max(tol.abs_tol, 1e-15) * norm
    max_sweeps = 40 if tol is None else max(1, tol.max_iter)
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A[off_mask]))
        if off <= target:
            return np.sort(np.diag(A))
        skip = off / (n * n) * 1e-2
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= skip:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = A[q, p] = 0.0
    raise ConvergenceError(
        f"Jacobi sweeps did not converge for a {n}x{n} matrix",
        best=np.sort(np.diag(A)))
