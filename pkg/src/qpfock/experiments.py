"""Experiment drivers shared by the CLI and the acceptance tests.

Each driver returns plain data (dicts, rows) with no timing inside; wall-clock
numbers are returned separately so data outputs stay reproducible.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
import math
import time

import numpy as np

from .errors import IndexingAmbiguity, QPFockError, TooFewPoints
from .fock import FockParams, fock_function, kernel_log
from .gabor import TruncationSpec, frame_bounds, riesz_bounds
from .interpolation import (ProductTruncation, interpolate, interpolation_report,
                            node_residuals, reconstruction_log, stability_constant)
from .logcomplex import LogComplex, log_rel_error
from .pointsets import (density_bounds, make_lattice, separation_constant,
                        uniform_closeness)
from .rng import rng_stream


# Nyquist sweep ---------------------------------------------------------------

def frame_lattice(spacing, K, margin=6):
    """Lattice of the given spacing covering y in [-K-margin-2, K+margin+2]."""
    n = int(math.ceil((K + margin + 2) / spacing))
    return make_lattice(0.0, spacing, -n, n)


def riesz_lattice(spacing, K):
    """2K+1 lattice points n*spacing, |n| <= K."""
    return make_lattice(0.0, spacing, -K, K)


@dataclass(frozen=True)
class SweepRow:
    beta: float
    density: float
    A: float
    B: float
    riesz_lower: float
    K: int
    n_points: int
    wall_ms: int
    log10_A: float = float("nan")
    log10_riesz: float = float("nan")
    method_A: str = ""
    method_riesz: str = ""
    error: str = ""

    def data(self):
        """Row without the timing field."""
        d = asdict(self)
        d.pop("wall_ms")
        return d


def sweep_row(beta, K, nu=0.0, margin=6, precision="auto"):
    """Frame bounds and Riesz lower bound for the lattice of spacing beta."""
    t0 = time.perf_counter()
    Zf = frame_lattice(beta, K, margin)
    try:
        fb = frame_bounds(Zf, nu, TruncationSpec(K, margin), precision=precision)
        rb = riesz_bounds(riesz_lattice(beta, K), nu, precision=precision)
    except (QPFockError, ArithmeticError, ValueError) as exc:
        ms = int(round(1000 * (time.perf_counter() - t0)))
        nan = float("nan")
        return SweepRow(beta, 1.0 / beta, nan, nan, nan, K, len(Zf), ms,
                        error=f"{type(exc).__name__}: {exc}")
    ms = int(round(1000 * (time.perf_counter() - t0)))
    return SweepRow(beta, 1.0 / beta, fb.A, fb.B, rb.value, K, len(Zf), ms,
                    fb.log10_A, rb.log10_value, fb.method, rb.method)


def sweep_betas(beta_min, beta_max, steps):
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1:
        return [float(beta_min)]
    return [float(b) for b in np.linspace(beta_min, beta_max, steps)]


def run_sweep(betas, Ks, nu=0.0, margin=6, precision="auto", threads=1):
    """Rows ordered by (beta, K) regardless of completion order."""
    if not Ks:
        raise ValueError("empty K list")
    jobs = [(b, int(K)) for b in betas for K in Ks]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            futures = [ex.submit(sweep_row, b, K, nu, margin, precision) for b, K in jobs]
            return [f.result() for f in futures]
    return [sweep_row(b, K, nu, margin, precision) for b, K in jobs]


def truncation_table(Z, nu, Ks, margin=6, precision="auto", threads=1):
    """Frame bounds of one set at several truncations."""
    return [frame_bounds(Z, nu, TruncationSpec(int(K), margin), precision=precision,
                         threads=threads) for K in Ks]


# density -----------------------------------------------------------------

def density_summary(Z, r_list, w_samples=None, alpha=None, metric="cylinder"):
    lo, hi = density_bounds(Z, r_list, w_samples)
    out = {
        "d_minus": lo.extrapolated,
        "d_plus": hi.extrapolated,
        "exact": lo.exact,
        "admissible_band": list(lo.admissible_band),
        "per_r": [{"r": r, "inf": a, "sup": b} for r, a, b in lo.per_r],
    }
    try:
        out["separation"] = separation_constant(Z, metric)
    except TooFewPoints:
        out["separation"] = None
    if alpha is not None:
        try:
            out["uniform_closeness"] = uniform_closeness(Z, alpha)
        except IndexingAmbiguity:
            out["uniform_closeness"] = None
    return out


# kernel check ------------------------------------------------------------

KERNEL_METHODS = ("theta", "periodization", "basis_sum")


def kernel_check(param_list, n_pairs=50, y_max=3.0, seed=0):
    """Max pairwise relative deviation of the three kernel forms per (alpha, nu)."""
    rng = rng_stream(seed)
    rows = []
    for alpha, nu in param_list:
        p = FockParams(alpha, nu)
        z = rng.random(n_pairs) + 1j * rng.uniform(-y_max, y_max, n_pairs)
        w = rng.random(n_pairs) + 1j * rng.uniform(-y_max, y_max, n_pairs)
        vals = {m: kernel_log(z, w, p, m) for m in KERNEL_METHODS}
        row = {"alpha": float(alpha), "nu": float(nu)}
        for i, a in enumerate(KERNEL_METHODS):
            for b in KERNEL_METHODS[i + 1:]:
                row[f"{a}_vs_{b}"] = float(log_rel_error(vals[a], vals[b]).max())
        rows.append(row)
    return rows


# interpolation -------------------------------------------------------------

def random_data(seed, n):
    """Complex standard normal data, real parts drawn before imaginary parts."""
    rng = rng_stream(seed)
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def padded_lattice(spacing, n_data, p, margin=3.0, tail_tol=1e-12):
    """Lattice with n_data central data nodes and enough zero-data padding on
    each side that the certified band covers the data extent +- margin.

    Returns (Z, mask) where mask marks the data nodes.
    """
    h = min(math.pi / p.alpha, spacing)
    D = math.log(4.0 / (tail_tol * -math.expm1(-2 * math.pi * h))) / (2 * math.pi)
    pad = int(math.ceil((margin + D) / spacing))
    left = n_data // 2
    Z = make_lattice(0.0, spacing, -left - pad, n_data - 1 - left + pad)
    mask = np.zeros(len(Z), bool)
    mask[pad:pad + n_data] = True
    return Z, mask


def interpolation_experiment(spacing, n_data, p, seed=0, margin=3.0, tail_tol=1e-12,
                             with_norm=True):
    """Random-data interpolation on a padded lattice.

    Reports node residuals, the random-data norm ratio, and the stability
    constant (sup over data on the mask of ||F|| / ||data||).
    """
    Z, mask = padded_lattice(spacing, n_data, p, margin, tail_tol)
    data = np.where(mask, random_data(seed, len(Z)), 0.0)
    trunc = ProductTruncation(None, tail_tol)
    spec = interpolate(Z, data, p, trunc, weighted=True)
    yd = Z.y[mask]
    y_range = (float(yd.min() - margin), float(yd.max() + margin))
    out = {"spacing": spacing, "n_data": n_data, "n_nodes": len(Z),
           "y_range": list(y_range),
           "max_node_residual": float(node_residuals(spec).max())}
    if with_norm:
        rep = interpolation_report(spec, y_max=y_range)
        out["norm_ratio"] = rep.norm_ratio
        out["stability_constant"] = stability_constant(Z, p, mask, y_range, trunc)
    return out


# reconstruction ---------------------------------------------------------------

def reconstruction_experiment(coeffs, alpha, beta, n_points=20, y_max=2.0, extra=12.0, seed=0):
    """Rebuild F = sum coeffs[k] phi_k/||phi_k|| from samples on i(pi/beta)Z."""
    p = FockParams(alpha, 0.0)
    F = fock_function(coeffs, p)
    h = math.pi / beta
    K = int(math.ceil((y_max + extra) / h))
    Z = make_lattice(0.0, h, -K, K)
    rng = rng_stream(seed)
    z = rng.random(n_points) + 1j * rng.uniform(-y_max, y_max, n_points)
    samples = LogComplex.from_exponent(F.log_eval(Z.z))
    rec = reconstruction_log(samples, Z, alpha, z, ProductTruncation(None, 1e-12), beta)
    err = log_rel_error(rec, F.log_eval(z))
    return {"n_nodes": len(Z), "max_rel_error": float(err.max()),
            "points": [[float(a.real), float(a.imag)] for a in z],
            "rel_errors": [float(e) for e in err]}


__all__ = ["SweepRow", "sweep_row", "run_sweep", "sweep_betas", "frame_lattice", "riesz_lattice",
           "truncation_table", "density_summary", "kernel_check", "random_data",
           "padded_lattice", "interpolation_experiment", "reconstruction_experiment"]
