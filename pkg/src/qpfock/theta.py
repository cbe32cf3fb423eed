"""Jacobi theta functions with characteristics and the Gaussian window.

    theta_{a,b}(z, tau) = sum_k exp(i pi (k+a)^2 tau + 2 pi i (k+a)(z+b)),  Im tau > 0.

Terms are summed in a window centred on the dominant index. Writing u = k+a,
the modulus of a term relative to the peak is exp(-pi Im(tau) (u-u*)^2) with
u* = -Im(z)/Im(tau), so the two tails beyond radius R are bounded by
2 exp(-pi T R^2) / (1 - exp(-2 pi T R)), T = Im(tau). R is chosen so this is
below abs_tol times the largest kept term.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidTau, TailBoundFailure
from .logcomplex import LogComplex, log_sum_exp

MAX_TERMS = 10**6
_G0_NORM = 2.0 ** 0.25


@dataclass(frozen=True)
class ThetaArgs:
    a: float
    b: float
    z: complex
    tau: complex

    def __post_init__(self):
        if not complex(self.tau).imag > 0:
            raise InvalidTau(f"Im(tau) must be positive, got {self.tau}")


def theta_radius(im_tau, abs_tol):
    """Smallest window radius R whose tail bound meets abs_tol (relative)."""
    if not im_tau > 0:
        raise InvalidTau(f"Im(tau) must be positive, got {im_tau}")
    if not abs_tol > 0:
        raise ValueError("abs_tol must be positive")
    T = float(im_tau)
    target = abs_tol * math.exp(-math.pi * T / 4.0)
    R = max(1.0, math.sqrt(math.log(2.0 / target) / (math.pi * T)))
    while True:
        if 2 * R + 2 > MAX_TERMS:
            raise TailBoundFailure(f"theta needs more than {MAX_TERMS} terms (Im tau = {T})")
        bound = 2.0 * math.exp(-math.pi * T * R * R) / (-math.expm1(-2.0 * math.pi * T * R))
        if bound < target:
            return R
        R *= 1.05


def tail_bound(im_tau, R):
    """Relative tail bound for a window of radius R."""
    T = float(im_tau)
    return 2.0 * math.exp(-math.pi * T * R * R) / (-math.expm1(-2.0 * math.pi * T * R))


def theta_log(a, b, z, tau, abs_tol=1e-16, extra_terms=0):
    """Vectorized theta as a complex log array (broadcast over a, b, z).

    ``extra_terms`` widens the window on each side beyond the certified radius.
    """
    tau = complex(tau)
    if not tau.imag > 0:
        raise InvalidTau(f"Im(tau) must be positive, got {tau}")
    a, b, z = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float),
                                  np.asarray(z, complex))
    R = theta_radius(tau.imag, abs_tol)
    nterms = int(math.floor(2 * R)) + 2 + 2 * int(extra_terms)
    ustar = -z.imag / tau.imag
    k0 = np.ceil(ustar - R - a) - int(extra_terms)
    u = (k0 + a)[..., None] + np.arange(nterms)
    w = 1j * np.pi * tau * u * u + 2j * np.pi * u * (z + b)[..., None]
    return log_sum_exp(w, axis=-1)


def theta_eval(args, abs_tol=1e-16):
    """theta_{a,b}(z, tau) as a LogComplex (accepts ThetaArgs or a 4-tuple)."""
    if not isinstance(args, ThetaArgs):
        args = ThetaArgs(*args)
    return LogComplex.from_exponent(theta_log(args.a, args.b, args.z, args.tau, abs_tol))


def gaussian_window(t):
    """g0(t) = 2^{1/4} exp(-pi t^2), unit norm in L^2(R)."""
    t = np.asarray(t, dtype=float)
    out = _G0_NORM * np.exp(-np.pi * t * t)
    return float(out) if out.ndim == 0 else out
