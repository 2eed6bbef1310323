"""Primal revised simplex for LPs with bounded variables.

The LP ``min c x  s.t.  row_lo <= A x <= row_hi,  lb <= x <= ub`` is put in
the equality form ``A x - s = 0`` where the logical ``s`` carries the row
range as its bounds.  Every structural and logical column is then just a
bounded variable; nonbasic variables sit at one of their bounds (or at zero
when free).

Phase 1 adds one artificial per row whose starting residual is nonzero and
minimises their sum.  Phase 2 fixes the artificials at zero and minimises
the real cost.  The basis inverse is kept explicitly and updated with
product-form eta steps, refactorised every ``refactor_every`` pivots.

Rows and columns are equilibrated by geometric-mean scaling rounded to
powers of two before any pivoting.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "limit-hit"


class SolverFailure(RuntimeError):
    """Numerical breakdown (e.g. singular basis).  Never a silent wrong answer."""


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None
    objective: float
    bound: float
    iterations: int
    duals: np.ndarray | None = None


def _pow2(v: np.ndarray) -> np.ndarray:
    return np.exp2(np.round(np.log2(v)))


# bounds on cumulative scale factors; extreme coefficient ratios would
# otherwise drive them to overflow
SCALE_MIN, SCALE_MAX = 2.0**-60, 2.0**60


def equilibrate(A: sp.csr_matrix, passes: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Geometric-mean row/column scale factors, rounded to powers of two."""
    m, n = A.shape
    row = np.ones(m)
    col = np.ones(n)
    if A.nnz == 0:
        return row, col
    absA = abs(A).tocsr().astype(float)
    for _ in range(passes):
        S = sp.diags(row) @ absA @ sp.diags(col)
        S = S.tocsr()
        rmax = np.asarray(S.max(axis=1).todense()).ravel()
        rmin = _nonzero_min(S, axis=1)
        r = np.ones(m)
        r[rmax > 0] = 1.0 / (np.sqrt(rmax[rmax > 0]) * np.sqrt(rmin[rmax > 0]))
        row = np.clip(row * r, SCALE_MIN, SCALE_MAX)
        S = (sp.diags(row) @ absA @ sp.diags(col)).tocsc()
        cmax = np.asarray(S.max(axis=0).todense()).ravel()
        cmin = _nonzero_min(S, axis=0)
        cf = np.ones(n)
        cf[cmax > 0] = 1.0 / (np.sqrt(cmax[cmax > 0]) * np.sqrt(cmin[cmax > 0]))
        col = np.clip(col * cf, SCALE_MIN, SCALE_MAX)
        if np.all(np.abs(np.log2(r)) < 0.25) and np.all(np.abs(np.log2(cf)) < 0.25):
            break
    return _pow2(row), _pow2(col)


def _nonzero_min(S: sp.spmatrix, axis: int) -> np.ndarray:
    S = S.tocsr() if axis == 1 else S.tocsc()
    S.eliminate_zeros()
    count = S.shape[0] if axis == 1 else S.shape[1]
    out = np.ones(count)
    lengths = np.diff(S.indptr)
    nonempty = lengths > 0
    if S.nnz:
        mins = np.minimum.reduceat(S.data, S.indptr[:-1][nonempty])
        out[nonempty] = mins
    return out


class LpEngine:
    """Prepared (scaled) LP data; :meth:`solve` may be called with new bounds.

    Branch-and-bound and the brute-force oracle reuse one engine and only
    change variable bounds between solves.
    """

    def __init__(
        self,
        c: np.ndarray,
        A: sp.spmatrix,
        row_lo: np.ndarray,
        row_hi: np.ndarray,
        *,
        feas_tol: float = 1e-7,
        opt_tol: float = 1e-9,
        pivot_tol: float = 1e-9,
        degenerate_limit: int = 1000,
        refactor_every: int = 64,
        max_iter: int | None = None,
        scale: bool = True,
    ):
        A = sp.csr_matrix(A, dtype=float)
        self.m, self.n = A.shape
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.pivot_tol = pivot_tol
        self.degenerate_limit = degenerate_limit
        self.refactor_every = refactor_every
        self.max_iter = max_iter or 50 * (self.m + self.n) + 1000

        if scale:
            self.row_scale, self.col_scale = equilibrate(A)
        else:
            self.row_scale, self.col_scale = np.ones(self.m), np.ones(self.n)
        As = (sp.diags(self.row_scale) @ A @ sp.diags(self.col_scale)).tocsc()
        cs = np.asarray(c, dtype=float) * self.col_scale
        cmax = float(np.max(np.abs(cs))) if cs.size else 0.0
        self.obj_scale = float(_pow2(np.array([cmax]))[0]) if cmax > 0 else 1.0
        self.c_struct = cs / self.obj_scale
        # logicals: A x - s = 0, s in [row_lo, row_hi] (scaled by row factor)
        self.M = sp.hstack([As, -sp.identity(self.m, format="csc")], format="csc")
        self.MT = self.M.T.tocsr()
        self.s_lo = np.asarray(row_lo, dtype=float) * self.row_scale
        self.s_hi = np.asarray(row_hi, dtype=float) * self.row_scale
        self.c_orig = np.asarray(c, dtype=float)

    # ------------------------------------------------------------------

    def solve(self, lb: np.ndarray, ub: np.ndarray) -> LpResult:
        n, m = self.n, self.m
        lb_s = np.asarray(lb, dtype=float) / self.col_scale
        ub_s = np.asarray(ub, dtype=float) / self.col_scale
        if np.any(lb_s > ub_s + self.feas_tol) or np.any(self.s_lo > self.s_hi + self.feas_tol):
            return LpResult(INFEASIBLE, None, math.inf, math.inf, 0)

        N = n + m
        lo = np.concatenate([lb_s, self.s_lo])
        hi = np.concatenate([ub_s, self.s_hi])
        z = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        act = self.M[:, :n] @ z[:n]
        # logical sits at the bound nearest the current activity
        z[n:] = np.clip(act, self.s_lo, self.s_hi)
        resid = z[n:] - act  # need A x - s + art*sign = 0 -> art*sign = s - A x
        need_art = np.abs(resid) > 0.0

        art_rows = np.flatnonzero(need_art)
        k = len(art_rows)
        signs = np.sign(resid[art_rows])
        art_cols = sp.csc_matrix((signs, (art_rows, np.arange(k))), shape=(m, k))
        Mfull = sp.hstack([self.M, art_cols], format="csc") if k else self.M
        lo = np.concatenate([lo, np.zeros(k)])
        hi = np.concatenate([hi, np.full(k, math.inf)])
        z = np.concatenate([z, np.abs(resid[art_rows])])

        basis = np.empty(m, dtype=np.int64)
        basis[:] = n + np.arange(m)  # logicals by default
        basis[art_rows] = N + np.arange(k)
        is_basic = np.zeros(N + k, dtype=bool)
        is_basic[basis] = True

        state = _State(Mfull, lo, hi, z, basis, is_basic)
        iters = 0
        if k:
            c1 = np.zeros(N + k)
            c1[N:] = 1.0
            st, it = self._iterate(state, c1, phase=1)
            iters += it
            if st == ITERATION_LIMIT:
                return LpResult(ITERATION_LIMIT, None, math.nan, -math.inf, iters)
            infeas = float(np.sum(state.z[N:]))
            if infeas > self.feas_tol * max(1.0, k):
                return LpResult(INFEASIBLE, None, math.inf, math.inf, iters)
            state.hi[N:] = 0.0
            state.z[N:] = np.minimum(state.z[N:], 0.0)
            state.recompute_basics()
        c2 = np.concatenate([self.c_struct, np.zeros(m + k)])
        st, it = self._iterate(state, c2, phase=2)
        iters += it
        if st != OPTIMAL:
            return LpResult(st, None, -math.inf if st == UNBOUNDED else math.nan, -math.inf, iters)

        x = state.z[:n] * self.col_scale
        # snap to original bounds to drop round-off outside the box
        x = np.clip(x, lb, ub)
        objective = float(np.dot(self.c_orig, x))
        y = state.duals(c2)
        bound = self._dual_bound(state, c2, y) * self.obj_scale
        duals = y * self.row_scale * self.obj_scale
        return LpResult(OPTIMAL, x, objective, bound, iters, duals)

    def _dual_bound(self, state: "_State", cost: np.ndarray, y: np.ndarray) -> float:
        """Lagrangian bound  sum_j min over [lo_j, hi_j] of d_j z_j."""
        d = cost - state.M.T @ y
        total = 0.0
        for j in range(len(d)):
            dj = d[j]
            if abs(dj) <= self.opt_tol * 10:
                continue
            bnd = state.lo[j] if dj > 0 else state.hi[j]
            if not math.isfinite(bnd):
                return -math.inf
            total += dj * bnd
        return total

    def _iterate(self, state: "_State", cost: np.ndarray, phase: int) -> tuple[str, int]:
        ptol, ftol, otol = self.pivot_tol, self.feas_tol, self.opt_tol
        degenerate_run = 0
        bland = False
        it = 0
        since_refactor = 0
        while True:
            if it >= self.max_iter:
                log.warning("simplex iteration limit %d hit in phase %d", self.max_iter, phase)
                return ITERATION_LIMIT, it
            y = state.duals(cost)
            d = cost - state.MT_dot(y)
            z, lo, hi = state.z, state.lo, state.hi
            can_up = (~state.is_basic) & (z < hi - ftol) & (d < -otol)
            can_down = (~state.is_basic) & (z > lo + ftol) & (d > otol)
            cand = np.flatnonzero(can_up | can_down)
            if cand.size == 0:
                return OPTIMAL, it
            if bland:
                q = int(cand[0])
            else:
                q = int(cand[np.argmax(np.abs(d[cand]))])
            delta = 1.0 if can_up[q] else -1.0

            alpha = state.ftran(q)
            # basic i changes by -theta*delta*alpha_i
            rate = delta * alpha
            theta = hi[q] - lo[q]
            leave = -1
            leave_to = 0.0
            zb = z[state.basis]
            lob = lo[state.basis]
            hib = hi[state.basis]
            dec = rate > ptol
            inc = rate < -ptol
            ratios = np.full(len(rate), math.inf)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios[dec] = (zb[dec] - lob[dec]) / rate[dec]
                ratios[inc] = (hib[inc] - zb[inc]) / (-rate[inc])
            ratios = np.maximum(ratios, 0.0)
            if ratios.size:
                tmin = float(np.min(ratios))
                if tmin < theta:
                    ties = np.flatnonzero(ratios <= tmin + 1e-12)
                    if bland:
                        r = int(ties[np.argmin(state.basis[ties])])
                    else:
                        r = int(ties[np.argmax(np.abs(rate[ties]))])
                    theta = tmin
                    leave = r
                    leave_to = lob[r] if dec[r] else hib[r]
            if not math.isfinite(theta):
                if phase == 1:
                    raise SolverFailure("phase-1 objective unbounded; basis is corrupt")
                return UNBOUNDED, it

            state.z[state.basis] = zb - theta * rate
            state.z[q] = z[q] + delta * theta
            if leave >= 0:
                out = int(state.basis[leave])
                state.z[out] = leave_to
                state.pivot(leave, q, alpha)
                since_refactor += 1
                if since_refactor >= self.refactor_every:
                    state.refactor()
                    since_refactor = 0
            it += 1

            if theta <= 1e-12:
                degenerate_run += 1
                if not bland and degenerate_run >= self.degenerate_limit:
                    log.debug("switching to Bland's rule after %d degenerate pivots", degenerate_run)
                    bland = True
            else:
                degenerate_run = 0
                bland = False


class _State:
    def __init__(self, M, lo, hi, z, basis, is_basic):
        self.M = M.tocsc()
        self.M.sort_indices()
        self._MT = self.M.T.tocsr()
        self._ptr, self._idx, self._dat = self.M.indptr, self.M.indices, self.M.data
        self.lo = lo
        self.hi = hi
        self.z = z
        self.basis = basis
        self.is_basic = is_basic
        self.refactor()

    def MT_dot(self, y: np.ndarray) -> np.ndarray:
        return self._MT @ y

    def column(self, j: int) -> np.ndarray:
        col = np.zeros(self.M.shape[0])
        a, b = self._ptr[j], self._ptr[j + 1]
        col[self._idx[a:b]] = self._dat[a:b]
        return col

    def refactor(self) -> None:
        m = len(self.basis)
        if m == 0:
            self.Binv = np.zeros((0, 0))
            return
        B = np.zeros((m, m))
        for r, j in enumerate(self.basis):
            a, b = self._ptr[j], self._ptr[j + 1]
            B[self._idx[a:b], r] = self._dat[a:b]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise SolverFailure(f"singular basis of size {m}: {exc}") from exc
        if not np.all(np.isfinite(self.Binv)):
            raise SolverFailure(f"non-finite basis inverse (size {m})")
        self.recompute_basics()

    def recompute_basics(self) -> None:
        if len(self.basis) == 0:
            return
        zn = np.where(self.is_basic, 0.0, self.z)
        rhs = -(self.M @ zn)
        self.z[self.basis] = self.Binv @ rhs

    def ftran(self, j: int) -> np.ndarray:
        a, b = self._ptr[j], self._ptr[j + 1]
        return self.Binv[:, self._idx[a:b]] @ self._dat[a:b]

    def duals(self, cost: np.ndarray) -> np.ndarray:
        return cost[self.basis] @ self.Binv

    def pivot(self, r: int, q: int, alpha: np.ndarray) -> None:
        piv = alpha[r]
        if abs(piv) < 1e-12:
            raise SolverFailure(f"pivot element {piv:.3e} too small")
        row_r = self.Binv[r] / piv
        self.Binv -= np.outer(alpha, row_r)
        self.Binv[r] = row_r
        out = self.basis[r]
        self.is_basic[out] = False
        self.is_basic[q] = True
        self.basis[r] = q


def solve_lp_arrays(c, A, row_lo, row_hi, lb, ub, **kwargs) -> LpResult:
    return LpEngine(c, A, row_lo, row_hi, **kwargs).solve(lb, ub)
