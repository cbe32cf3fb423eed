"""Dense Hermitian eigenvalues.

``hermitian_eigs`` runs cyclic Jacobi rotations (compiled kernel when
available). ``min_eig_certified`` brackets the smallest eigenvalue of a
positive semidefinite matrix far below double-precision roundoff, using
multiprecision Cholesky plus inverse iteration on gmpy2 numbers; frame and
Riesz bounds of sets beyond the critical density live down there.
"""
from dataclasses import dataclass
import math

import gmpy2
import numpy as np

from . import _backend
from .errors import NonConvergence


class NotPositiveDefinite(ArithmeticError):
    """Cholesky pivot was not positive at the working precision."""


@dataclass(frozen=True)
class HermitianMatrix:
    """Conjugate-symmetric complex matrix (validated on construction)."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("HermitianMatrix needs a square array")
        scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
        if a.size and np.max(np.abs(a - a.conj().T)) > 1e-12 * scale:
            raise ValueError("matrix is not Hermitian")
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self):
        return self.entries.shape[0]


def _as_array(m):
    if isinstance(m, HermitianMatrix):
        return m.entries
    a = np.asarray(m, dtype=complex)
    return 0.5 * (a + a.conj().T)


def hermitian_eigs(m, vectors=False, tol=1e-12, max_sweeps=100):
    """Ascending eigenvalues of a Hermitian matrix by cyclic Jacobi.

    Stops when the off-diagonal Frobenius norm is at most ``tol * ||M||_F``.
    With ``vectors=True`` returns (values, V) with M V = V diag(values).
    """
    a = np.ascontiguousarray(_as_array(m), dtype=np.complex128).copy()
    n = a.shape[0]
    if n == 0:
        raise ValueError("hermitian_eigs needs dim >= 1")
    v = np.ascontiguousarray(np.eye(n, dtype=np.complex128))
    sweeps = _backend.jacobi_hermitian(a, v, float(tol), int(max_sweeps), bool(vectors))
    if sweeps < 0:
        raise NonConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    if vectors:
        return w[order], v[:, order]
    return w[order]


# multiprecision ---------------------------------------------------------

def bits_for_digits(dps):
    return int(math.ceil(dps * math.log2(10))) + 16


def _cholesky(S, n, is_complex):
    L = [[None] * n for _ in range(n)]
    zero = gmpy2.mpfr(0)
    for j in range(n):
        Lj = L[j]
        if is_complex:
            d = S[j][j].real - sum((abs(Lj[k]) ** 2 for k in range(j)), zero)
        else:
            d = S[j][j] - sum((Lj[k] * Lj[k] for k in range(j)), zero)
        if not d > 0:
            raise NotPositiveDefinite(f"pivot {j} not positive")
        ljj = gmpy2.sqrt(d)
        Lj[j] = ljj
        for i in range(j + 1, n):
            Li = L[i]
            if is_complex:
                s = S[i][j] - sum((Li[k] * Lj[k].conjugate() for k in range(j)), zero)
            else:
                s = S[i][j] - sum((Li[k] * Lj[k] for k in range(j)), zero)
            Li[j] = s / ljj
    return L


def _solve(L, b, n, is_complex):
    zero = gmpy2.mpfr(0)
    y = [None] * n
    for i in range(n):
        Li = L[i]
        y[i] = (b[i] - sum((Li[k] * y[k] for k in range(i)), zero)) / Li[i]
    x = [None] * n
    for i in reversed(range(n)):
        if is_complex:
            s = sum((L[k][i].conjugate() * x[k] for k in range(i + 1, n)), zero)
        else:
            s = sum((L[k][i] * x[k] for k in range(i + 1, n)), zero)
        x[i] = (y[i] - s) / L[i][i]
    return x


@dataclass(frozen=True)
class MinEigResult:
    """Smallest-eigenvalue bracket: lower <= lambda_min <= upper."""

    lower: float
    upper: float
    estimate: float
    log10_estimate: float
    log10_lower: float
    dps: int
    structural_zero: bool = False


def _to_float_log10(x):
    x = gmpy2.mpfr(x)
    if x <= 0:
        return 0.0, -math.inf
    lg = float(gmpy2.log10(x))
    return float(x), lg


def min_eig_certified(build, dim, start_dps=60, max_dps=16000, rel_iter_tol=1e-10,
                      max_iter=200, norm_hint=None):
    """Certified bracket for the smallest eigenvalue of a PSD matrix.

    ``build(dps)`` must return (S, is_complex): S a dim x dim list of lists of
    gmpy2 numbers assembled in the current gmpy2 context. Precision doubles
    until Cholesky succeeds and the lower bound exceeds the rounding floor
    1e3 * n * ||S|| * 10^{-dps}. The bracket is [1/||S^-1||_F, 1/rho], rho a
    Rayleigh quotient of S^-1 from inverse iteration.
    """
    dps = int(start_dps)
    n = int(dim)
    while True:
        if dps > max_dps:
            raise NonConvergence(f"min_eig_certified: needs more than {max_dps} digits")
        with gmpy2.context(gmpy2.get_context(), precision=bits_for_digits(dps)):
            S, is_complex = build(dps)
            norm = norm_hint
            if norm is None:
                norm = max(float(abs(S[i][i])) for i in range(n)) * n
            try:
                L = _cholesky(S, n, is_complex)
            except NotPositiveDefinite:
                dps *= 2
                continue
            # ||S^-1||_F via columns of the inverse
            fro = gmpy2.mpfr(0)
            for j in range(n):
                e = [gmpy2.mpfr(0)] * n
                e[j] = gmpy2.mpfr(1)
                col = _solve(L, e, n, is_complex)
                fro += sum((abs(c) ** 2 for c in col), gmpy2.mpfr(0))
            lower = 1 / gmpy2.sqrt(fro)
            # inverse iteration
            v = [gmpy2.mpfr(1) / (i + 1) for i in range(n)]
            rho_old = None
            rho = None
            for _ in range(max_iter):
                w = _solve(L, v, n, is_complex)
                vv = sum((abs(x) ** 2 for x in v), gmpy2.mpfr(0))
                vw = sum(((x.conjugate() * y).real if is_complex else x * y for x, y in zip(v, w)),
                         gmpy2.mpfr(0))
                rho = vw / vv
                nw = gmpy2.sqrt(sum((abs(x) ** 2 for x in w), gmpy2.mpfr(0)))
                v = [x / nw for x in w]
                if rho_old is not None and abs(rho - rho_old) <= rel_iter_tol * abs(rho):
                    break
                rho_old = rho
            upper = 1 / rho
            lo_f, lo_lg = _to_float_log10(lower)
            up_f, up_lg = _to_float_log10(upper)
            floor_lg = 3 + math.log10(n * norm) - dps
            if lo_lg <= floor_lg:
                dps *= 2
                continue
            return MinEigResult(lower=lo_f, upper=up_f, estimate=up_f,
                                log10_estimate=up_lg, log10_lower=lo_lg, dps=dps)
