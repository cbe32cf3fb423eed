"""The quasi-periodic Fock space F^alpha_{2,nu}(C/Z).

Entire functions with F(z+k) = e^{2 pi i k nu} e^{(alpha/2)k^2 + alpha z k} F(z),
normed by  ||F||^2 = int_0^1 int_R |F(x+iy)|^2 e^{-alpha |z|^2} dy dx.

Function values are complex log arrays (see ``logcomplex``). A
``CylinderFunction`` wraps a vectorized rule z -> log F(z).
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidShift
from .logcomplex import LogComplex, log_rel_error, log_sum_exp
from .quadrature import QuadratureSpec, quad_adaptive, gaussian_cutoff
from .theta import theta_log

_LOG_G0 = 0.25 * math.log(2.0)


@dataclass(frozen=True)
class FockParams:
    alpha: float = math.pi
    nu: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not 0.0 <= self.nu < 1.0:
            raise ValueError("nu must lie in [0, 1)")


@dataclass(frozen=True)
class StripPoint:
    x: float
    y: float

    def __post_init__(self):
        if not 0.0 <= self.x < 1.0:
            raise ValueError("strip points need 0 <= x < 1")

    @property
    def z(self):
        return complex(self.x, self.y)


class CylinderFunction:
    """A function on C given by a stateless vectorized log-rule.

    ``rule(z)`` takes a complex ndarray and returns the complex log array of
    F(z). Calling the object returns a LogComplex.
    """

    def __init__(self, rule, params, label=""):
        self.rule = rule
        self.params = params
        self.label = label

    def log_eval(self, z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(self.rule(z), dtype=complex)

    def __call__(self, z):
        return LogComplex.from_exponent(self.log_eval(z))

    def __repr__(self):
        return f"CylinderFunction({self.label or self.rule!r}, {self.params})"


# quasi-periodic extension ------------------------------------------------

def cocycle_log(k, z, p):
    """log of e^{2 pi i k nu} e^{(alpha/2)k^2 + alpha z k}."""
    k = np.asarray(k, dtype=float)
    return 2j * np.pi * k * p.nu + 0.5 * p.alpha * k * k + p.alpha * np.asarray(z) * k


def extend_from_strip(F_strip, z, p):
    """Evaluate at any z from a rule known on the strip [0,1) x R.

    ``F_strip`` maps strip points (complex array, 0 <= Re < 1) to a complex
    log array or LogComplex. Uses k = floor(Re z).
    """
    z = np.asarray(z, dtype=complex)
    k = np.floor(z.real)
    z0 = z - k
    z0 = np.where(z0.real >= 1.0, z0 - 1.0, z0)   # rounding guard
    k = np.round(z - z0).real
    val = F_strip(z0)
    if isinstance(val, LogComplex):
        val = val.exponent
    return LogComplex.from_exponent(cocycle_log(k, z0, p) + val)


# basis -------------------------------------------------------------------

def phi_log(k, z, p):
    """log phi_k(z) = (alpha/2) z^2 + 2 pi i (k+nu) z (exact)."""
    z = np.asarray(z, dtype=complex)
    return 0.5 * p.alpha * z * z + 2j * np.pi * (np.asarray(k) + p.nu) * z


def phi(k, z, p):
    return LogComplex.from_exponent(phi_log(k, z, p))


def phi_norm_sq(k, p):
    """||phi_k||^2 = sqrt(pi/(2 alpha)) e^{2 pi^2 (k+nu)^2 / alpha}."""
    kk = np.asarray(k, dtype=float) + p.nu
    out = math.sqrt(math.pi / (2 * p.alpha)) * np.exp(2 * math.pi**2 * kk * kk / p.alpha)
    return float(out) if out.ndim == 0 else out


def log_phi_norm_sq(k, p):
    kk = np.asarray(k, dtype=float) + p.nu
    return 0.5 * math.log(math.pi / (2 * p.alpha)) + 2 * math.pi**2 * kk * kk / p.alpha


def phi_function(k, p):
    return CylinderFunction(lambda z: phi_log(k, z, p), p, f"phi_{k}")


def fock_function(coeffs, p):
    """F = sum_k coeffs[k] phi_k / ||phi_k|| (orthonormal expansion)."""
    ks = np.array(sorted(coeffs), dtype=int)
    cs = np.array([coeffs[k] for k in ks], dtype=complex)
    nz = cs != 0
    ks, cs = ks[nz], cs[nz]
    logc = np.log(cs.astype(complex)) - 0.5 * log_phi_norm_sq(ks, p) if len(ks) else cs

    def rule(z):
        if len(ks) == 0:
            return np.full(np.shape(z), -np.inf + 0j)
        w = logc + phi_log(ks, np.asarray(z)[..., None], p)
        return log_sum_exp(w, axis=-1)

    return CylinderFunction(rule, p, "fock_combination")


def phi_center(k, p):
    """y where |phi_k|^2 e^{-alpha|z|^2} = e^{-2 alpha y^2 - 4 pi (k+nu) y} peaks."""
    return -math.pi * (k + p.nu) / p.alpha


def envelope_y_range(ks, p, tol=1e-16, extra=0.0):
    """y-interval holding the weighted mass of span{phi_k : k in ks} up to tol."""
    ks = list(ks)
    h = gaussian_cutoff(2 * p.alpha, tol)
    centers = [phi_center(k, p) for k in ks]
    return (min(centers) - h - extra, max(centers) + h + extra)


# reproducing kernel --------------------------------------------------------

def _window(center, R):
    """Integer window covering [center - R, center + R] (broadcast)."""
    n = int(math.floor(2 * R)) + 2
    return np.ceil(center - R)[..., None] + np.arange(n)


def kernel_log(z, w, p, method="theta", tol=1e-16):
    """log K(z, w) by one of three independent series.

    theta:          sqrt(2a/pi) e^{(a/2)(z^2+conj(w)^2)} theta_{nu,0}(z - conj(w), 2 pi i/a)
    periodization:  (a/pi) e^{a z conj(w)} sum_k e^{-2pi i k nu} e^{-a z k + a k conj(w) - (a/2) k^2}
    basis_sum:      sum_k phi_k(z) conj(phi_k(w)) / ||phi_k||^2
    """
    z, w = np.broadcast_arrays(np.asarray(z, complex), np.asarray(w, complex))
    a = p.alpha
    wb = np.conj(w)
    if method == "theta":
        th = theta_log(p.nu, 0.0, z - wb, 2j * math.pi / a, tol)
        return 0.5 * math.log(2 * a / math.pi) + 0.5 * a * (z * z + wb * wb) + th
    if method == "periodization":
        R = gaussian_cutoff(0.5 * a, tol) + 1.0
        k = _window((w - z).real, R)
        terms = (-2j * np.pi * k * p.nu - a * z[..., None] * k + a * k * wb[..., None]
                 - 0.5 * a * k * k)
        return math.log(a / math.pi) + a * z * wb + log_sum_exp(terms, axis=-1)
    if method == "basis_sum":
        R = gaussian_cutoff(2 * math.pi**2 / a, tol) + 1.0
        center = -a * (z.imag + w.imag) / (2 * math.pi) - p.nu
        k = _window(center, R)
        terms = (phi_log(k, z[..., None], p) + np.conj(phi_log(k, w[..., None], p))
                 - log_phi_norm_sq(k, p))
        return log_sum_exp(terms, axis=-1)
    raise ValueError(f"unknown kernel method {method!r}")


def kernel(z, w, p, method="theta", tol=1e-16):
    return LogComplex.from_exponent(kernel_log(z, w, p, method, tol))


def kernel_function(w, p, method="theta"):
    """z -> K(z, w)."""
    return CylinderFunction(lambda z: kernel_log(z, w, p, method), p, f"K(.,{w})")


# Bargmann transform --------------------------------------------------------

def bargmann_constant(k, p):
    """B(e_{k,nu}) = c_k phi_k with c_k = 2^{1/4} sqrt(pi/alpha) e^{-pi^2 (k+nu)^2/alpha}."""
    kk = k + p.nu
    return 2 ** 0.25 * math.sqrt(math.pi / p.alpha) * math.exp(-math.pi**2 * kk * kk / p.alpha)


def _log_bargmann_constant(k, p):
    kk = np.asarray(k, float) + p.nu
    return _LOG_G0 + 0.5 * math.log(math.pi / p.alpha) - math.pi**2 * kk * kk / p.alpha


def quasi_periodic_extension(f_cell, nu):
    """Extend f on [0,1) to R by f(t+n) = e^{2 pi i n nu} f(t)."""
    def f(t):
        t = np.asarray(t, dtype=float)
        n = np.floor(t)
        return np.exp(2j * np.pi * n * nu) * np.asarray(f_cell(t - n))
    return f


def fourier_coefficients(f_cell, nu, tol=1e-15, n_max=1 << 16):
    """Coefficients of f on the basis e_{k,nu} by FFT, doubling the grid until
    the upper half of the spectrum falls below tol relative to the peak.

    Returns a dict k -> c_k with negligible entries dropped.
    """
    n = 16
    while True:
        t = np.arange(n) / n
        g = np.asarray(f_cell(t), dtype=complex) * np.exp(-2j * np.pi * nu * t)
        c = np.fft.fft(g) / n
        k = np.fft.fftfreq(n, 1.0 / n).astype(int)
        peak = np.abs(c).max()
        if peak == 0:
            return {}
        tail = np.abs(c[np.abs(k) > n // 4]).max()
        if tail <= tol * peak or n >= n_max:
            break
        n *= 2
    keep = np.abs(c) > tol * peak
    return {int(kk): complex(cc) for kk, cc in zip(k[keep], c[keep])}


def bargmann(f, z, p, spec=None, method="fourier"):
    """B^alpha f(z) = 2^{1/4} int_R f(t) e^{2 alpha t z - alpha t^2 - (alpha/2) z^2} dt.

    ``f`` is either a mapping k -> coefficient on the basis e_{k,nu}, or a
    vectorized callable on [0,1) extended quasi-periodically. Scalar z.

    For callables, ``method="fourier"`` expands f on the basis by FFT and sums
    the closed-form images, which keeps relative accuracy where the transform
    is far below the size of the integrand. ``method="quadrature"`` integrates
    directly; its error is absolute (about spec.abs_tol times the integrand scale).
    """
    z = complex(z)
    a = p.alpha
    spec = spec or QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12)
    if callable(f) and method == "fourier":
        f = fourier_coefficients(f, p.nu, min(spec.abs_tol, 1e-15))
    elif method not in ("fourier", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if isinstance(f, dict):
        ks = np.array(sorted(f), dtype=int)
        cs = np.array([f[k] for k in ks], dtype=complex)
        keep = cs != 0
        if not keep.any():
            return LogComplex.zero()
        ks, cs = ks[keep], cs[keep]
        terms = np.log(cs) + _log_bargmann_constant(ks, p) + phi_log(ks, z, p)
        return LogComplex.from_exponent(log_sum_exp(terms))
    fx = quasi_periodic_extension(f, p.nu)
    x, y = z.real, z.imag

    # e^{-a(t-z)^2} = e^{a y^2} e^{-a (t-x)^2} e^{2 i a y (t-x)}
    def integrand(t):
        s = t - x
        return fx(t) * np.exp(-a * s * s + 2j * a * y * s)

    reach = gaussian_cutoff(a, spec.abs_tol)
    val = quad_adaptive(integrand, x - reach, x + reach, spec,
                        initial_panels=max(4, int(2 * reach) + 1))
    if val == 0:
        return LogComplex.zero()
    return LogComplex.from_exponent(_LOG_G0 + 0.5 * a * z * z + a * y * y + np.log(complex(val)))


# Weyl operators and weighted quantities ------------------------------------

def weyl_translate(F, w, p):
    """T_w F(z) = e^{alpha z conj(w) - (alpha/2)|w|^2} F(z - w), Im w in (pi/alpha) Z."""
    w = complex(w)
    m = w.imag * p.alpha / math.pi
    if abs(m - round(m)) > 1e-12 * max(1.0, abs(m)):
        raise InvalidShift(f"Im(w) = {w.imag} is not a multiple of pi/alpha")
    a = p.alpha

    def rule(z):
        return a * z * np.conj(w) - 0.5 * a * abs(w) ** 2 + F.log_eval(z - w)

    return CylinderFunction(rule, p, f"T_{w}")


def weighted_log(F, z, p):
    """log(|F(z)| e^{-(alpha/2)|z|^2})."""
    z = np.asarray(z, dtype=complex)
    return F.log_eval(z).real - 0.5 * p.alpha * np.abs(z) ** 2


def weighted_eval(F, z, p):
    """|F(z)| e^{-(alpha/2)|z|^2}, computed in log space."""
    out = np.exp(weighted_log(F, z, p))
    return float(out) if np.ndim(out) == 0 else out


def strip_integrate(g, y_range, spec=None, nx0=8, nx_max=4096, x_rtol=1e-13, full_output=False):
    """int_0^1 int_{y0}^{y1} g(x + i y) dy dx for a 1-periodic-in-x integrand.

    x: trapezoid rule (spectrally accurate for periodic integrands), doubled
    until two successive levels agree to x_rtol or to the round-off floor set
    by the integrand size (the x-mean may cancel far below it).
    y: adaptive Gauss-Kronrod.
    """
    spec = spec or QuadratureSpec(abs_tol=1e-14, rel_tol=1e-10)
    y0, y1 = y_range

    def inner(y):
        n = nx0
        prev = None
        while True:
            x = np.arange(n) / n
            vals = np.asarray(g(x[None, :] + 1j * y[:, None]))
            cur = vals.mean(axis=1)
            if prev is not None:
                scale = max(np.max(np.abs(cur)), 1e-300)
                floor = 100 * np.finfo(float).eps * np.max(np.abs(vals))
                if np.max(np.abs(cur - prev)) <= max(x_rtol * scale, floor):
                    return cur
            if n >= nx_max:
                return cur
            prev = cur
            n *= 2

    return quad_adaptive(inner, y0, y1, spec, full_output=full_output,
                         initial_panels=max(4, int(y1 - y0)))


def _y_range(y_max):
    if np.ndim(y_max) == 0:
        return (-float(y_max), float(y_max))
    lo, hi = y_max
    return (float(lo), float(hi))


def strip_norm(F, p, y_max, spec=None, full_output=False):
    """||F||^2 over [0,1) x y-range (y_max a half-width or a (lo, hi) pair)."""
    def g(z):
        return np.exp(2.0 * weighted_log(F, z, p))
    return strip_integrate(g, _y_range(y_max), spec, full_output=full_output)


def strip_inner(F, G, p, y_max, spec=None):
    """<F, G> = int F conj(G) e^{-alpha|z|^2} over the strip (truncated)."""
    def g(z):
        w = F.log_eval(z) + np.conj(G.log_eval(z)) - p.alpha * np.abs(z) ** 2
        return np.exp(w)
    return strip_integrate(g, _y_range(y_max), spec)


def functional_equation_residual(F, z, p, k=1):
    """Relative mismatch of F(z+k) against the cocycle times F(z)."""
    z = np.asarray(z, dtype=complex)
    lhs = F.log_eval(z + k)
    rhs = cocycle_log(k, z, p) + F.log_eval(z)
    return log_rel_error(lhs, rhs)
