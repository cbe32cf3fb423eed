"""Theta-Gabor systems in L^2_nu(0,1) generated by the Gaussian g0.

The atom at z = (z1, z2) is the periodization

    H_z(t) = sum_k e^{2 pi i k nu} e^{2 pi i z2 (t-k)} g0(t - k - z1)
           = 2^{1/4} e^{2 pi i z2 t} theta_{z2 - nu, z1}(-t, i),

and its coefficients on e_{k,nu}(t) = e^{2 pi i (k+nu) t} are

    c_k(z) = <e_{k,nu}, H_z> = 2^{1/4} e^{2 pi i z1 (nu+k-z2)} e^{-pi (nu+k-z2)^2}.

Matrix conventions (chosen so quadratic forms read naturally):
  frame operator  S_kl = sum_z conj(c_k(z)) c_l(z),  a* S a = sum_z |sum_k a_k c_k(z)|^2
  Gram matrix     G_mn = <H_{z_n}, H_{z_m}> = sum_k c_k(z_m) conj(c_k(z_n))
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
import warnings

import gmpy2
import numpy as np

from .eigen import HermitianMatrix, hermitian_eigs, min_eig_certified
from .fock import FockParams, fock_function, weighted_log
from .pointsets import PointSet
from .theta import theta_log

_G0 = 2.0 ** 0.25
CHUNK = 128


@dataclass(frozen=True)
class TruncationSpec:
    K: int = 24
    margin: int = 6

    def __post_init__(self):
        if self.K < 1 or self.margin < 0 or self.margin >= self.K:
            raise ValueError("need K >= 1 and 0 <= margin < K")

    @property
    def modes(self):
        return np.arange(-self.K, self.K + 1)

    @property
    def central(self):
        return slice(self.margin, 2 * self.K + 1 - self.margin)

    @property
    def central_dim(self):
        return 2 * (self.K - self.margin) + 1


@dataclass(frozen=True)
class FrameBounds:
    """Frame bounds read from the central block of the truncated frame operator.

    ``log10_A`` stays meaningful when A underflows double precision;
    ``method`` is 'double' or 'multiprecision'.
    """

    A: float
    B: float
    trunc: TruncationSpec
    z_extent: tuple
    log10_A: float = float("nan")
    A_lower: float = float("nan")
    A_upper: float = float("nan")
    method: str = "double"
    dps: int = 0
    structural_zero: bool = False


@dataclass(frozen=True)
class RieszBound:
    """Smallest Gram eigenvalue with its provenance."""

    value: float
    log10_value: float
    lower: float
    upper: float
    n_points: int
    method: str = "double"
    dps: int = 0
    largest: float = float("nan")
    extra: dict = field(default_factory=dict)


def mode_radius(tol):
    """Modes with |k - (z2 - nu)| beyond this radius have |c_k| < tol (at least 7)."""
    return max(7, int(math.ceil(math.sqrt(math.log(1.0 / tol) / math.pi))) + 1)


def _zsplit(z):
    if isinstance(z, PointSet):
        return z.x, z.y
    if hasattr(z, "x") and hasattr(z, "y"):
        return np.asarray(z.x, float), np.asarray(z.y, float)
    z = np.asarray(z, dtype=complex)
    return z.real, z.imag


def atom_coeff(k, z, nu):
    """c_k(z) = 2^{1/4} e^{2 pi i z1 (nu+k-z2)} e^{-pi (nu+k-z2)^2} (broadcast)."""
    z1, z2 = _zsplit(z)
    d = nu + np.asarray(k, dtype=float) - z2
    out = _G0 * np.exp(2j * np.pi * z1 * d - np.pi * d * d)
    return complex(out) if np.ndim(out) == 0 else out


def coeff_matrix(Z, nu, ks, tol=1e-12):
    """Rows z in Z, columns k in ks; entries beyond the mode radius are zeroed."""
    x, y = _zsplit(Z)
    ks = np.asarray(ks, dtype=float)
    d = nu + ks[None, :] - y[:, None]
    C = _G0 * np.exp(2j * np.pi * x[:, None] * d - np.pi * d * d)
    C[np.abs(d) > mode_radius(tol)] = 0.0
    return C


def periodized_atom(z, nu, t, tol=1e-15, method="direct_sum"):
    """H_z(t) by direct periodization or by the theta closed form."""
    z1, z2 = _zsplit(z)
    t = np.asarray(t, dtype=float)
    z1, z2, t, nu = np.broadcast_arrays(z1, z2, t, np.asarray(nu, dtype=float))
    if method == "direct_sum":
        R = math.sqrt(math.log(2.0 / tol) / math.pi) + 1.0
        n = int(math.floor(2 * R)) + 2
        k = np.ceil(t - z1 - R)[..., None] + np.arange(n)
        s = t[..., None] - k
        terms = (np.exp(2j * np.pi * (k * nu[..., None] + z2[..., None] * s))
                 * _G0 * np.exp(-np.pi * (s - z1[..., None]) ** 2))
        out = terms.sum(axis=-1)
    elif method == "theta_form":
        th = theta_log(z2 - nu, z1, -t + 0j, 1j, abs_tol=tol)
        out = _G0 * np.exp(2j * np.pi * z2 * t + th)
    else:
        raise ValueError(f"unknown atom method {method!r}")
    return complex(out) if out.ndim == 0 else out


# frame operator -------------------------------------------------------------

def _chunks(n):
    return [(i, min(i + CHUNK, n)) for i in range(0, n, CHUNK)]


def frame_operator_matrix(Z, nu, trunc, threads=1, tol=1e-12):
    """S on modes -K..K. Fixed-size chunks reduced in index order, so the
    result does not depend on the thread count."""
    ks = trunc.modes
    lo, hi = Z.y_extent() if len(Z) else (0.0, 0.0)
    need = trunc.K + trunc.margin + 2
    if len(Z) and (lo > -need + nu or hi < need + nu):
        warnings.warn(f"point set covers y in [{lo:.3g}, {hi:.3g}], "
                      f"less than [-{need}, {need}] needed for the central block")
    S = np.zeros((len(ks), len(ks)), dtype=complex)
    if len(Z) == 0:
        return HermitianMatrix(S)

    def part(bounds):
        a, b = bounds
        C = coeff_matrix(Z.z[a:b], nu, ks, tol)
        return C.conj().T @ C

    chunks = _chunks(len(Z))
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(part, chunks))
    else:
        parts = [part(c) for c in chunks]
    for P in parts:
        S += P
    return HermitianMatrix(S)


def _mp_coeff_rows(x, y, nu, ks, is_complex):
    pi = gmpy2.const_pi()
    g0 = gmpy2.root(gmpy2.mpfr(2), 4)
    nu = gmpy2.mpfr(nu)
    rows = []
    for xi, yi in zip(x, y):
        xi = gmpy2.mpfr(float(xi))
        yi = gmpy2.mpfr(float(yi))
        row = []
        for k in ks:
            d = nu + int(k) - yi
            mag = g0 * gmpy2.exp(-pi * d * d)
            if is_complex:
                row.append(mag * gmpy2.exp(gmpy2.mpc(0, 2) * pi * xi * d))
            else:
                row.append(mag)
        rows.append(row)
    return rows


def _mp_frame_builder(Z, nu, ks):
    is_complex = bool(np.any(Z.x != 0.0))

    def build(dps):
        rows = _mp_coeff_rows(Z.x, Z.y, nu, ks, is_complex)
        m = len(ks)
        zero = gmpy2.mpfr(0)
        S = [[None] * m for _ in range(m)]
        for i in range(m):
            for j in range(i, m):
                if is_complex:
                    s = sum((r[i].conjugate() * r[j] for r in rows), zero)
                    S[i][j] = s
                    S[j][i] = s.conjugate()
                else:
                    s = sum((r[i] * r[j] for r in rows), zero)
                    S[i][j] = S[j][i] = s
        return S, is_complex

    return build


def frame_bounds(Z, nu, trunc, precision=None, threads=1, start_dps=60):
    """(A, B) = extreme eigenvalues of the central block of S.

    precision: None for double precision only; 'auto' to fall back to a
    certified multiprecision bracket when A is below double resolution;
    an int to force multiprecision starting at that many digits.
    """
    S = frame_operator_matrix(Z, nu, trunc, threads=threads).entries
    c = trunc.central
    Sc = S[c, c]
    dim = Sc.shape[0]
    ev = hermitian_eigs(Sc)
    A, B = float(ev[0]), float(ev[-1])
    extent = Z.y_extent()
    log10 = math.log10(A) if A > 0 else -math.inf
    resolved = A > 1e-8 * B
    if precision is None or (precision == "auto" and resolved):
        return FrameBounds(max(A, 0.0), B, trunc, extent, log10, A, A, "double")
    if len(Z) < dim:
        return FrameBounds(0.0, B, trunc, extent, -math.inf, 0.0, 0.0, "structural", 0, True)
    dps0 = start_dps if precision == "auto" else int(precision)
    ks = trunc.modes[c]
    res = min_eig_certified(_mp_frame_builder(Z, nu, ks), dim, start_dps=dps0,
                            norm_hint=B * dim)
    return FrameBounds(res.estimate, B, trunc, extent, res.log10_estimate,
                       res.lower, res.upper, "multiprecision", res.dps)


# Gram matrix and Riesz bounds ---------------------------------------------

def _gram_modes(Z, nu, radius):
    y = Z.y
    lo = int(math.floor(y.min() - nu)) - radius
    hi = int(math.ceil(y.max() - nu)) + radius
    return np.arange(lo, hi + 1)


def gram_matrix(Z, nu, tol=1e-15):
    """G_mn = sum_k c_k(z_m) conj(c_k(z_n)), modes truncated to tail < tol."""
    if len(Z) == 0:
        return HermitianMatrix(np.zeros((0, 0), dtype=complex))
    ks = _gram_modes(Z, nu, mode_radius(tol))
    C = coeff_matrix(Z, nu, ks, tol)
    return HermitianMatrix(C @ C.conj().T)


def _mp_gram_builder(Z, nu):
    is_complex = bool(np.any(Z.x != 0.0))

    def build(dps):
        radius = int(math.ceil(math.sqrt(dps * math.log(10) / math.pi))) + 2
        ks = _gram_modes(Z, nu, radius)
        rows = _mp_coeff_rows(Z.x, Z.y, nu, ks, is_complex)
        yk = [float(y) for y in Z.y]
        n = len(rows)
        zero = gmpy2.mpfr(0)
        G = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                # only modes near both points matter at this precision
                a = max(0, int(math.floor(max(yk[i], yk[j]) - nu)) - radius - ks[0])
                b = min(len(ks), int(math.ceil(min(yk[i], yk[j]) - nu)) + radius - ks[0] + 1)
                ri, rj = rows[i], rows[j]
                if is_complex:
                    s = sum((ri[k] * rj[k].conjugate() for k in range(a, b)), zero)
                    G[i][j] = s
                    G[j][i] = s.conjugate()
                else:
                    s = sum((ri[k] * rj[k] for k in range(a, b)), zero)
                    G[i][j] = G[j][i] = s
        return G, is_complex

    return build


def riesz_bounds(Z, nu, tol=1e-15, precision=None, start_dps=60):
    """Smallest Gram eigenvalue (Riesz lower bound of the finite family)."""
    n = len(Z)
    if n == 0:
        raise ValueError("empty point set")
    G = gram_matrix(Z, nu, tol).entries
    ev = hermitian_eigs(G)
    lo, hi = float(ev[0]), float(ev[-1])
    resolved = lo > 1e-8 * hi
    if precision is None or (precision == "auto" and resolved):
        lg = math.log10(lo) if lo > 0 else -math.inf
        return RieszBound(lo, lg, lo, lo, n, "double", 0, hi)
    dps0 = start_dps if precision == "auto" else int(precision)
    res = min_eig_certified(_mp_gram_builder(Z, nu), n, start_dps=dps0, norm_hint=hi * n)
    return RieszBound(res.estimate, res.log10_estimate, res.lower, res.upper, n,
                      "multiprecision", res.dps, hi)


def riesz_lower_bound(Z, nu, tol=1e-15, precision=None):
    return riesz_bounds(Z, nu, tol, precision).value


# Fock-side check ------------------------------------------------------------

@dataclass(frozen=True)
class SamplingSum:
    norm_sq: float
    sample_sum: float
    ratio: float
    undefined: bool = False


def sampling_sum_check(coeffs, Z, p=None, y_max=None, spec=None):
    """Weighted sample energy of F = sum_k coeffs[k] phi_k / ||phi_k|| on Z.

    ||F||^2 = sum |coeffs|^2 exactly by orthonormality. At alpha = pi the
    ratio is the Rayleigh quotient of the frame operator of the reflected set
    {(x, -y)}.
    """
    p = p or FockParams()
    norm_sq = float(sum(abs(complex(c)) ** 2 for c in coeffs.values()))
    if len(Z) == 0 or norm_sq == 0:
        sample = 0.0
    else:
        F = fock_function(coeffs, p)
        sample = float(np.sum(np.exp(2.0 * weighted_log(F, Z.z, p))))
    if norm_sq == 0:
        return SamplingSum(0.0, sample, 0.0, True)
    return SamplingSum(norm_sq, sample, sample / norm_sq)
