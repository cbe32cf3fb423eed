"""Log-polar complex numbers.

A value c is held as (log|c|, arg c). Values of theta series, basis
functions and product functions routinely reach e^{+-700} and beyond, so
every cross-module function value travels in this form.

Internally most routines work with *log arrays*: complex ndarrays ``w`` that
stand for ``exp(w)``. Zero is ``-inf + 0j``. ``LogComplex`` wraps such a
value (scalar or array) with a normalized phase.
"""
from dataclasses import dataclass

import numpy as np

NEG_INF = -np.inf


def normalize_phase(phase):
    """Reduce angles to the half-open interval (-pi, pi]."""
    phase = np.asarray(phase, dtype=float)
    out = np.pi - np.mod(np.pi - phase, 2.0 * np.pi)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class LogComplex:
    """Complex value stored as log-modulus and phase in (-pi, pi].

    Both fields may be numpy arrays of the same shape, in which case the
    object represents an elementwise array of complex values.
    """

    log_mod: object
    phase: object

    def __post_init__(self):
        lm = np.asarray(self.log_mod, dtype=float)
        ph = np.asarray(self.phase, dtype=float)
        lm, ph = np.broadcast_arrays(lm, ph)
        ph = np.where(np.isneginf(lm), 0.0, normalize_phase(ph))
        if lm.ndim == 0:
            object.__setattr__(self, "log_mod", float(lm))
            object.__setattr__(self, "phase", float(ph))
        else:
            lm = lm.copy()
            ph = np.asarray(ph, dtype=float).copy()
            lm.setflags(write=False)
            ph.setflags(write=False)
            object.__setattr__(self, "log_mod", lm)
            object.__setattr__(self, "phase", ph)

    # construction -----------------------------------------------------
    @classmethod
    def from_exponent(cls, w):
        """Represent e^w exactly."""
        w = np.asarray(w, dtype=complex)
        return cls(w.real, np.where(np.isneginf(w.real), 0.0, w.imag))

    @classmethod
    def from_complex(cls, c):
        c = np.asarray(c, dtype=complex)
        with np.errstate(divide="ignore"):
            lm = np.log(np.abs(c))
        return cls(lm, np.angle(c))

    @classmethod
    def zero(cls):
        return cls(NEG_INF, 0.0)

    # views -------------------------------------------------------------
    @property
    def exponent(self):
        """A log array w with e^w equal to this value."""
        return np.asarray(self.log_mod) + 1j * np.asarray(self.phase)

    def to_complex(self):
        lm = np.asarray(self.log_mod)
        ph = np.asarray(self.phase)
        with np.errstate(over="ignore"):
            mod = np.exp(lm)
        out = mod * np.cos(ph) + 1j * (mod * np.sin(ph))
        return complex(out) if out.ndim == 0 else out

    def is_zero(self):
        return np.isneginf(self.log_mod)

    def abs_weighted(self, shift):
        """Return e^{log_mod + shift}, e.g. |F(z)| e^{-(alpha/2)|z|^2}."""
        return logc_abs_weighted(self, shift)

    def conj(self):
        return LogComplex(self.log_mod, -np.asarray(self.phase))

    def __getitem__(self, item):
        return LogComplex(np.asarray(self.log_mod)[item], np.asarray(self.phase)[item])

    def __len__(self):
        return len(np.asarray(self.log_mod))

    @property
    def shape(self):
        return np.shape(self.log_mod)

    def __mul__(self, other):
        return logc_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        return logc_mul(self, LogComplex(-np.asarray(other.log_mod), -np.asarray(other.phase)))

    def __add__(self, other):
        return logc_add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return LogComplex(self.log_mod, np.asarray(self.phase) + np.pi)

    def __repr__(self):
        return f"LogComplex(log_mod={self.log_mod!r}, phase={self.phase!r})"


def _coerce(x):
    if isinstance(x, LogComplex):
        return x
    return LogComplex.from_complex(x)


def logc_from_exponent(w):
    """LogComplex representing e^w (log_mod = Re w, phase = Im w reduced)."""
    return LogComplex.from_exponent(w)


def to_logc(c):
    return LogComplex.from_complex(c)


def logc_mul(a, b):
    lm = np.asarray(a.log_mod) + np.asarray(b.log_mod)
    return LogComplex(lm, np.asarray(a.phase) + np.asarray(b.phase))


def logc_add(a, b):
    """Sum of two log-polar values, pivoting on the larger modulus."""
    la, lb = np.broadcast_arrays(np.asarray(a.log_mod, float), np.asarray(b.log_mod, float))
    pa, pb = np.broadcast_arrays(np.asarray(a.phase, float), np.asarray(b.phase, float))
    swap = lb > la
    hi_l = np.where(swap, lb, la)
    lo_l = np.where(swap, la, lb)
    hi_p = np.where(swap, pb, pa)
    lo_p = np.where(swap, pa, pb)
    finite = np.isfinite(hi_l)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        d = np.where(finite, lo_l - hi_l, NEG_INF)
        s = 1.0 + np.exp(d + 1j * (lo_p - hi_p))
        lm = np.where(finite, hi_l + np.log(np.abs(s)), hi_l)
        ph = np.where(finite, hi_p + np.angle(s), hi_p)
    return LogComplex(lm, ph)


def logc_abs_weighted(a, shift):
    with np.errstate(over="ignore"):
        out = np.exp(np.asarray(a.log_mod) + shift)
    return float(out) if np.ndim(out) == 0 else out


def log_sum_exp(w, axis=-1):
    """log(sum(exp(w))) along ``axis`` for a complex log array.

    The largest real part is factored out before summation, so terms with
    exponents anywhere in the double range combine without overflow.
    Exact cancellation yields -inf.
    """
    w = np.asarray(w, dtype=complex)
    if w.shape[axis] == 0:
        shape = list(w.shape)
        del shape[axis]
        return np.full(shape, NEG_INF + 0j)
    m = np.max(w.real, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        s = np.sum(np.exp(w - m), axis=axis)
        out = np.log(s) + np.squeeze(m, axis=axis)
    out = np.where(s == 0, NEG_INF + 0j, out)
    return out


def logc_sum(values, axis=-1):
    """Sum a LogComplex array along ``axis``."""
    return LogComplex.from_exponent(log_sum_exp(values.exponent, axis=axis))


def log_rel_error(got, want):
    """|e^{got - want} - 1| for complex logs; 0 where both are zero, inf where one is."""
    got = np.asarray(got, complex)
    want = np.asarray(want, complex)
    both_zero = np.isneginf(got.real) & np.isneginf(want.real)
    with np.errstate(invalid="ignore"):
        d = got - want
        err = np.abs(np.expm1(d.real + 1j * np.angle(np.exp(1j * d.imag))))
    return np.where(both_zero, 0.0, np.where(np.isnan(err), np.inf, err))
