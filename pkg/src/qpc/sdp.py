"""A small semidefinite-programming layer over Hermitian matrix variables.

Problems are stated with complex affine expressions in real decision
variables. Hermitian PSD constraints are lowered through the real embedding
[[Re H, -Im H], [Im H, Re H]] and handed to Clarabel's PSD-triangle cone.
Every optimal solution is re-checked against the original complex
constraints before it is reported as optimal.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import clarabel
import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .qmath import TOL_SOLVER, NotHermitianError, is_hermitian

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL_FAILURE = "numerical-failure"

MAX_ITER = 200

#: Clarabel setting overrides tried in order until a solution certifies.
SETTINGS_LADDER = (
    {},
    {"equilibrate_enable": False},
    {"equilibrate_enable": False, "max_step_fraction": 0.95},
    {"equilibrate_enable": False, "static_regularization_constant": 1e-7},
)


class Affine:
    """const + sum_v x[offset + v] * coeffs[v], an array-valued affine expression.

    ``coeffs`` has shape (k, *shape) and only covers the variable window
    [offset, offset + k), so expressions built from a single block stay small.
    """

    __array_priority__ = 100

    def __init__(self, coeffs: np.ndarray, const: np.ndarray, offset: int = 0):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.const = np.asarray(const, dtype=complex)
        self.offset = int(offset)
        if self.coeffs.shape[1:] != self.const.shape:
            raise ValueError(f"coefficient shape {self.coeffs.shape} does not match constant {self.const.shape}")

    @classmethod
    def constant(cls, value) -> "Affine":
        value = np.asarray(value, dtype=complex)
        return cls(np.zeros((0, *value.shape), dtype=complex), value)

    @classmethod
    def stack(cls, exprs: list["Affine"]) -> "Affine":
        lo = min(e.offset for e in exprs)
        hi = max(e.stop for e in exprs)
        return cls(
            np.stack([e._window(lo, hi) for e in exprs], axis=1),
            np.stack([e.const for e in exprs]),
            lo,
        )

    @property
    def shape(self) -> tuple:
        return self.const.shape

    @property
    def stop(self) -> int:
        return self.offset + len(self.coeffs)

    def _window(self, lo: int, hi: int) -> np.ndarray:
        if lo == self.offset and hi == self.stop:
            return self.coeffs
        out = np.zeros((hi - lo, *self.shape), dtype=complex)
        out[self.offset - lo:self.stop - lo] = self.coeffs
        return out

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "Affine":
        """Apply a linear map that acts on trailing axes and broadcasts over leading ones."""
        return Affine(fn(self.coeffs), fn(self.const), self.offset)

    def __add__(self, other) -> "Affine":
        if not isinstance(other, Affine):
            other = Affine.constant(np.broadcast_to(np.asarray(other, dtype=complex), self.shape))
        if len(other.coeffs) == 0:
            return Affine(self.coeffs, self.const + other.const, self.offset)
        if len(self.coeffs) == 0:
            return Affine(other.coeffs, self.const + other.const, other.offset)
        lo, hi = min(self.offset, other.offset), max(self.stop, other.stop)
        return Affine(self._window(lo, hi) + other._window(lo, hi), self.const + other.const, lo)

    __radd__ = __add__

    def __neg__(self) -> "Affine":
        return Affine(-self.coeffs, -self.const, self.offset)

    def __sub__(self, other) -> "Affine":
        return self + (-other)

    def __rsub__(self, other) -> "Affine":
        return (-self) + other

    def __mul__(self, c) -> "Affine":
        if isinstance(c, Affine):
            raise TypeError("product of two affine expressions is not affine")
        c = np.asarray(c)
        if self.shape == () and c.ndim:
            # scalar expression times a constant array
            return Affine(self.coeffs.reshape(-1, *([1] * c.ndim)) * c, self.const * c, self.offset)
        return Affine(self.coeffs * c, self.const * c, self.offset)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Affine":
        return self * (1 / c)

    def __matmul__(self, m) -> "Affine":
        m = np.asarray(m)
        return self.map(lambda a: a @ m)

    def __rmatmul__(self, m) -> "Affine":
        m = np.asarray(m)
        return self.map(lambda a: m @ a)

    def __getitem__(self, idx) -> "Affine":
        idx = idx if isinstance(idx, tuple) else (idx,)
        return Affine(self.coeffs[(slice(None), *idx)], self.const[idx], self.offset)

    def trace(self) -> "Affine":
        return self.map(lambda a: np.trace(a, axis1=-2, axis2=-1))

    def sum(self, axis=0) -> "Affine":
        """Sum over an axis of the expression (not of the variable axis)."""
        ax = axis if axis < 0 else axis + 1
        return Affine(self.coeffs.sum(axis=ax), self.const.sum(axis=axis), self.offset)

    def value(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        window = x[self.offset:self.stop]
        return self.const + np.tensordot(window, self.coeffs, axes=(0, 0))

    def is_hermitian(self) -> bool:
        if len(self.shape) != 2 or self.shape[0] != self.shape[1]:
            return False
        return is_hermitian(self.coeffs, 1e-12) and is_hermitian(self.const, 1e-12)


@dataclass(frozen=True)
class HermitianVar:
    offset: int
    dim: int
    expr: Affine = field(repr=False)

    @property
    def n_real(self) -> int:
        return self.dim * self.dim


@dataclass(frozen=True)
class ScalarVar:
    index: int
    expr: Affine = field(repr=False)


def hermitian_basis(dim: int) -> np.ndarray:
    """dim**2 real-coefficient basis of Hermitian matrices (diagonal, then Re/Im pairs)."""
    basis = []
    for i in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[i, i] = 1
        basis.append(e)
    for i in range(dim):
        for j in range(i + 1, dim):
            re = np.zeros((dim, dim), dtype=complex)
            re[i, j] = re[j, i] = 1
            im = np.zeros((dim, dim), dtype=complex)
            im[i, j], im[j, i] = 1j, -1j
            basis += [re, im]
    return np.array(basis)


def real_embedding(h: np.ndarray) -> np.ndarray:
    """[[Re h, -Im h], [Im h, Re h]]; PSD exactly when h is, with every eigenvalue doubled."""
    h = np.asarray(h)
    if not is_hermitian(h):
        raise NotHermitianError("real_embedding requires a Hermitian matrix")
    return _embed(h)


def _embed(h: np.ndarray) -> np.ndarray:
    re, im = h.real, h.imag
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def _svec_indices(n: int):
    # Clarabel packs the upper triangle column by column, off-diagonals scaled by sqrt(2).
    cols, rows = np.tril_indices(n)
    scale = np.where(rows == cols, 1.0, np.sqrt(2.0))
    return rows, cols, scale


@dataclass
class SdpSolution:
    status: str
    objective_value: float
    x: np.ndarray = field(repr=False)
    max_eq_residual: float = np.nan
    min_psd_eigenvalue: float = np.nan
    duality_gap: float = np.nan
    primal_objective: float = np.nan
    dual_objective: float = np.nan
    iterations: int = 0
    solve_time: float = 0.0
    solver_status: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    def value(self, item):
        if isinstance(item, ScalarVar):
            return float(self.x[item.index])
        if isinstance(item, HermitianVar):
            return item.expr.value(self.x)
        return item.value(self.x)

    def report(self) -> dict:
        return {
            "status": self.status,
            "objective": self.objective_value,
            "max_eq_residual": self.max_eq_residual,
            "min_psd_eigenvalue": self.min_psd_eigenvalue,
            "duality_gap": self.duality_gap,
            "iterations": self.iterations,
        }


class SdpProblem:
    """Real-linear objective, affine equalities, Hermitian PSD and scalar nonnegativity constraints."""

    def __init__(self):
        self.n_vars = 0
        self.variables: list = []
        self.eq_constraints: list[Affine] = []
        self.psd_constraints: list[Affine] = []
        self.nonneg_constraints: list[Affine] = []
        self.objective = Affine.constant(0.0)
        self.sense = "min"

    def add_hermitian_var(self, dim: int) -> HermitianVar:
        if dim < 1:
            raise ValueError("dim must be >= 1")
        var = HermitianVar(self.n_vars, dim, Affine(hermitian_basis(dim), np.zeros((dim, dim)), self.n_vars))
        self.n_vars += dim * dim
        self.variables.append(var)
        return var

    def add_scalar_var(self, nonneg: bool = True) -> ScalarVar:
        var = ScalarVar(self.n_vars, Affine(np.ones((1,)), np.zeros(()), self.n_vars))
        self.n_vars += 1
        self.variables.append(var)
        if nonneg:
            self.add_nonneg(var.expr)
        return var

    def add_eq(self, expr: Affine) -> None:
        """Constrain every entry of ``expr`` (real and imaginary parts) to zero."""
        self.eq_constraints.append(expr)

    def add_psd(self, expr: Affine) -> None:
        if not expr.is_hermitian():
            raise NotHermitianError("PSD constraints need a Hermitian expression")
        self.psd_constraints.append(expr)

    def add_nonneg(self, expr: Affine) -> None:
        self.nonneg_constraints.append(expr)

    def minimize(self, expr: Affine) -> None:
        self.objective, self.sense = expr, "min"

    def maximize(self, expr: Affine) -> None:
        self.objective, self.sense = expr, "max"

    # -- lowering ---------------------------------------------------------

    def _lower_eq(self):
        blocks, rhs = [], []
        for expr in self.eq_constraints:
            coeffs = expr.coeffs.reshape(len(expr.coeffs), -1)
            const = expr.const.reshape(-1)
            if expr.is_hermitian():
                n = expr.shape[0]
                iu = np.triu_indices(n)
                flat = iu[0] * n + iu[1]
                off = flat[iu[0] != iu[1]]
                a = np.concatenate([coeffs[:, flat].real, coeffs[:, off].imag], axis=1)
                b = np.concatenate([const[flat].real, const[off].imag])
            else:
                a = np.concatenate([coeffs.real, coeffs.imag], axis=1)
                b = np.concatenate([const.real, const.imag])
            full = np.zeros((a.shape[1], self.n_vars))
            full[:, expr.offset:expr.stop] = a.T
            blocks.append(full)
            rhs.append(-b)
        if not blocks:
            return np.zeros((0, self.n_vars)), np.zeros(0), True
        a = np.vstack(blocks)
        b = np.concatenate(rhs)
        return _independent_rows(a, b)

    def _lower_psd(self, expr: Affine):
        emb_c = _embed(expr.coeffs)
        emb_0 = _embed(expr.const)
        n = emb_0.shape[0]
        r, c, scale = _svec_indices(n)
        sv_c = emb_c[:, r, c] * scale
        sv_0 = emb_0[r, c] * scale
        a = np.zeros((len(sv_0), self.n_vars))
        a[:, expr.offset:expr.stop] = -sv_c.T
        return a, sv_0, n

    def lower(self):
        """Clarabel standard form: min q.x  s.t.  A x + s = b, s in cones."""
        a_eq, b_eq, consistent = self._lower_eq()
        a_rows, b_rows, cones = [], [], []
        if len(b_eq):
            a_rows.append(a_eq)
            b_rows.append(b_eq)
            cones.append(clarabel.ZeroConeT(len(b_eq)))
        if self.nonneg_constraints:
            for expr in self.nonneg_constraints:
                coeffs = expr.coeffs.reshape(len(expr.coeffs), -1).real
                a = np.zeros((coeffs.shape[1], self.n_vars))
                a[:, expr.offset:expr.stop] = -coeffs.T
                a_rows.append(a)
                b_rows.append(expr.const.reshape(-1).real)
            cones.append(clarabel.NonnegativeConeT(sum(e.const.size for e in self.nonneg_constraints)))
        for expr in self.psd_constraints:
            a, b, n = self._lower_psd(expr)
            a_rows.append(a)
            b_rows.append(b)
            cones.append(clarabel.PSDTriangleConeT(n))
        a = sp.csc_matrix(np.vstack(a_rows)) if a_rows else sp.csc_matrix((0, self.n_vars))
        b = np.concatenate(b_rows) if b_rows else np.zeros(0)
        sign = 1.0 if self.sense == "min" else -1.0
        q = np.zeros(self.n_vars)
        obj = self.objective
        q[obj.offset:obj.stop] = sign * obj.coeffs.real.reshape(len(obj.coeffs))
        return q, a, b, cones, consistent

    # -- solving ----------------------------------------------------------

    def solve(self, tol: float = 1e-9, max_iter: int = MAX_ITER) -> SdpSolution:
        """Solve and certify; retry with more conservative solver settings if needed.

        Problems whose feasible set has no strictly interior point (common
        when chi_I is squeezed against a low-rank chi_expt) can stall short
        of the certification thresholds with the default settings. Each
        attempt runs at most ``max_iter`` iterations; the first certified
        solution is returned, otherwise the last attempt's outcome.
        """
        if np.ndim(self.objective.const) != 0:
            raise ValueError("objective must be a scalar expression")
        start = time.perf_counter()
        lowered = self.lower()
        if not lowered[-1]:
            return SdpSolution(INFEASIBLE, np.nan, np.full(self.n_vars, np.nan), solver_status="inconsistent equalities")
        sol = None
        iterations = 0
        for overrides in SETTINGS_LADDER:
            sol = self._solve_once(lowered, tol, max_iter, overrides)
            iterations += sol.iterations
            if sol.status in (OPTIMAL, INFEASIBLE, UNBOUNDED):
                break
        sol.iterations = iterations
        sol.solve_time = time.perf_counter() - start
        return sol

    def _solve_once(self, lowered, tol: float, max_iter: int, overrides: dict) -> SdpSolution:
        q, a, b, cones, _ = lowered
        settings = clarabel.DefaultSettings()
        settings.verbose = False
        settings.max_iter = max_iter
        settings.tol_gap_abs = tol
        settings.tol_gap_rel = tol
        settings.tol_feas = tol
        settings.max_threads = 1
        for key, value in overrides.items():
            setattr(settings, key, value)
        p = sp.csc_matrix((self.n_vars, self.n_vars))
        raw = clarabel.DefaultSolver(p, q, a, b, cones, settings).solve()
        status_name = str(raw.status).split(".")[-1]
        x = np.asarray(raw.x, dtype=float)
        sol = SdpSolution(
            status=NUMERICAL_FAILURE,
            objective_value=np.nan,
            x=x,
            iterations=int(raw.iterations),
            solver_status=status_name,
        )
        if status_name in ("PrimalInfeasible", "AlmostPrimalInfeasible"):
            sol.status = INFEASIBLE
            return sol
        if status_name in ("DualInfeasible", "AlmostDualInfeasible"):
            sol.status = UNBOUNDED
            return sol
        if status_name not in ("Solved", "AlmostSolved"):
            return sol
        z = np.asarray(raw.z, dtype=float)
        sign = 1.0 if self.sense == "min" else -1.0
        offset = float(np.real(self.objective.const))
        primal = float(q @ x)
        dual = float(-b @ z)
        sol.primal_objective = sign * primal + offset
        sol.dual_objective = sign * dual + offset
        sol.duality_gap = abs(primal - dual) / max(1.0, abs(primal), abs(dual))
        sol.objective_value = sol.primal_objective
        sol.max_eq_residual, sol.min_psd_eigenvalue = self.verify(x)
        if (
            sol.max_eq_residual <= TOL_SOLVER
            and sol.min_psd_eigenvalue >= -TOL_SOLVER
            and sol.duality_gap <= TOL_SOLVER
        ):
            sol.status = OPTIMAL
        return sol

    def verify(self, x: np.ndarray) -> tuple[float, float]:
        """Residuals of the original complex constraints at ``x``.

        Returns (largest equality violation, smallest eigenvalue over all PSD
        constraints and nonnegative scalars).
        """
        eq = max((float(np.max(np.abs(e.value(x)), initial=0.0)) for e in self.eq_constraints), default=0.0)
        psd = [float(np.linalg.eigvalsh(e.value(x))[0]) for e in self.psd_constraints]
        psd += [float(np.min(e.value(x).real, initial=np.inf)) for e in self.nonneg_constraints]
        return eq, min(psd, default=np.inf)

    @property
    def n_real_dof(self) -> int:
        return self.n_vars


def _independent_rows(a: np.ndarray, b: np.ndarray, tol: float = 1e-10):
    """Drop linearly dependent equality rows; report whether the system is consistent."""
    keep = np.any(np.abs(a) > tol, axis=1)
    if np.any(np.abs(b[~keep]) > 1e-9):
        return a[keep], b[keep], False
    a, b = a[keep], b[keep]
    if len(b) == 0:
        return a, b, True
    _, r, piv = scipy.linalg.qr(a.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > tol * max(1.0, diag[0])))
    rows = np.sort(piv[:rank])
    a_ind, b_ind = a[rows], b[rows]
    # Dependent rows must agree with the kept ones.
    sol, *_ = np.linalg.lstsq(a_ind, b_ind, rcond=None)
    consistent = bool(np.max(np.abs(a @ sol - b), initial=0.0) <= 1e-8 * max(1.0, np.max(np.abs(b), initial=0.0)))
    return a_ind, b_ind, consistent
