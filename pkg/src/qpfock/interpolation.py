"""Product function G, per-node products G_n, interpolation and reconstruction series.

For Z = {z_k} enumerated two-sidedly (index 0 nearest y = 0), with lattice
parameter a (Z uniformly close to i(pi/a)Z):

    G(z) = e^{(a/2) z^2} prod_{k>=0} (1 - e^{2 pi i (z_k - z)}) prod_{k<0} (1 - e^{2 pi i (z - z_k)})

Every factor is 1-periodic, so G(z+1) = e^{a/2 + a z} G(z), and G vanishes
exactly on Z modulo 1. All values are complex logs; products are sums of
logs accumulated with prefix/suffix sums, never by subtracting a total.

Two index splits are available for G_n (the product without the n-th factor):
  'origin'  upper form for k >= 0, lower form for k < 0 (as in G itself)
  'node'    upper form for k > n, lower form for k < n
They differ by prod (-e^{2 pi i (z_k - z)}) over the indices between 0 and n,
a factor e^{-2 pi i m z} times a constant, so both interpolate and both obey
the cocycle. Only the 'node' split keeps |G_n(z)/G_n(z_n)| centred at y_n;
with 'origin' each term picks up a tilt of order exp(2 (pi/h) y_n (y - y_n))
and finite-section interpolants are not bounded in norm.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import _backend
from .errors import (AlphaBetaOrder, TailBoundViolation, ZeroDenominator)
from .fock import FockParams, strip_integrate
from .logcomplex import LogComplex, log_rel_error, log_sum_exp
from .pointsets import PointSet, two_sided_indices

_BLOCK = 2048


@dataclass(frozen=True)
class ProductTruncation:
    """Keep indices |k| <= n_terms (None keeps the whole set).

    Dropped factors, and the unseen continuation of Z beyond its extent, are
    modelled as a sequence with spacing h; the evaluation band is where their
    log-sum stays below tail_tol. ``complete=True`` declares Z the whole set,
    so only factors dropped by n_terms limit the band.
    """

    n_terms: object = None
    tail_tol: float = 1e-12
    complete: bool = False

    def __post_init__(self):
        if self.n_terms is not None and int(self.n_terms) < 0:
            raise ValueError("n_terms must be >= 0")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")


class _Product:
    """Kept nodes, their two-sided labels and the certified band."""

    def __init__(self, Z, alpha_like, trunc):
        trunc = trunc or ProductTruncation()
        idx = two_sided_indices(Z)
        keep = np.ones(len(Z), bool) if trunc.n_terms is None else np.abs(idx) <= int(trunc.n_terms)
        self.alpha_like = float(alpha_like)
        self.trunc = trunc
        self.zk = np.ascontiguousarray(Z.z[keep])
        self.idx = idx[keep]
        self.all_y = Z.y
        self.all_idx = idx
        yk = self.zk.imag
        h = math.pi / self.alpha_like
        if len(yk) > 1:
            h = min(h, float(np.min(np.diff(yk))) if np.min(np.diff(yk)) > 0 else h)
        self.h = h
        D = math.log(4.0 / (trunc.tail_tol * -math.expm1(-2 * math.pi * h))) / (2 * math.pi)
        up_dropped = Z.y[idx > (idx[keep].max() if keep.any() else 0)]
        lo_dropped = Z.y[idx < (idx[keep].min() if keep.any() else 0)]
        beyond = math.inf if trunc.complete else h
        y_up = up_dropped.min() if len(up_dropped) else yk.max() + beyond
        y_lo = lo_dropped.max() if len(lo_dropped) else yk.min() - beyond
        self.band = (float(y_lo + D), float(y_up - D))

    def check(self, z):
        y = np.asarray(z).imag
        if y.size and (y.min() < self.band[0] - 1e-12 or y.max() > self.band[1] + 1e-12):
            raise TailBoundViolation(
                f"Im z in [{y.min():.4g}, {y.max():.4g}] leaves the certified band "
                f"[{self.band[0]:.4g}, {self.band[1]:.4g}]")

    def factors(self, z):
        """U (upper form) and L (lower form) log-factor matrices at z."""
        z = np.ascontiguousarray(np.asarray(z, dtype=complex).ravel())
        return _backend.log_factor_pair(z, self.zk)


def _prefix_excl(F):
    out = np.zeros_like(F)
    if F.shape[1] > 1:
        out[:, 1:] = np.cumsum(F[:, :-1], axis=1)
    return out


def _suffix_excl(F):
    out = np.zeros_like(F)
    if F.shape[1] > 1:
        out[:, :-1] = np.cumsum(F[:, :0:-1], axis=1)[:, ::-1]
    return out


def _origin_form(U, L, idx):
    return np.where(idx[None, :] >= 0, U, L)


def _logG_n_all(pr, z, split):
    """Matrix log G_n(z_m) for all kept n (rows: z, columns: n)."""
    U, L = pr.factors(z)
    if split == "node":
        return _suffix_excl(U) + _prefix_excl(L)
    if split == "origin":
        F = _origin_form(U, L, pr.idx)
        return _prefix_excl(F) + _suffix_excl(F)
    raise ValueError("split must be 'node' or 'origin'")


def _blocks(z):
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    for s in range(0, len(flat), _BLOCK):
        yield s, flat[s:s + _BLOCK]


# G and G_n -----------------------------------------------------------------

def product_G_log(Z, z, p, trunc=None):
    pr = Z if isinstance(Z, _Product) else _Product(Z, p.alpha, trunc)
    z = np.asarray(z, dtype=complex)
    pr.check(z)
    out = np.empty(z.size, dtype=complex)
    for s, zb in _blocks(z):
        U, L = pr.factors(zb)
        out[s:s + len(zb)] = (0.5 * pr.alpha_like * zb * zb
                              + _origin_form(U, L, pr.idx).sum(axis=1))
    return out.reshape(z.shape)


def product_G(Z, z, p, trunc=None):
    """G(z) (with the e^{(alpha/2) z^2} prefactor) as a LogComplex."""
    return LogComplex.from_exponent(product_G_log(Z, z, p, trunc))


def product_G_n(Z, n, z, trunc=None, p=None, split="origin"):
    """G_n(z): the product without the factor of the node labelled n (no prefactor)."""
    p = p or FockParams()
    pr = _Product(Z, p.alpha, trunc)
    pos = np.flatnonzero(pr.idx == n)
    if len(pos) == 0:
        raise ValueError(f"index {n} is not a kept node")
    z = np.asarray(z, dtype=complex)
    pr.check(z)
    out = _logG_n_all(pr, z.ravel(), split)[:, pos[0]]
    return LogComplex.from_exponent(out.reshape(z.shape))


# interpolation ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InterpolantSpec:
    nodes: PointSet
    log_data: np.ndarray          # log a_n (-inf for zero data)
    params: FockParams
    w_nodes: np.ndarray
    denominators: LogComplex      # G_n(z_n)
    trunc: ProductTruncation
    split: str
    product: object

    @property
    def band(self):
        return self.product.band

    @property
    def data(self):
        return np.exp(self.log_data)


def _as_log(values, n):
    if isinstance(values, LogComplex):
        out = np.asarray(values.exponent, dtype=complex)
    else:
        v = np.asarray(values, dtype=complex)
        with np.errstate(divide="ignore"):
            out = np.log(v)
        out = np.where(v == 0, -np.inf + 0j, out)
    if out.shape != (n,):
        raise ValueError(f"expected {n} data values, got shape {out.shape}")
    return out


def interpolate(Z, data, p, trunc=None, weighted=False, split="node"):
    """Interpolant with F(z_n) = a_n on the kept nodes.

    ``data`` holds a_n (complex array or LogComplex). With ``weighted=True``
    it holds b_n = a_n e^{-(alpha/2)|z_n|^2}, which avoids overflow far from
    the real axis.
    """
    pr = _Product(Z, p.alpha, trunc)
    zk = pr.zk
    idx_all = two_sided_indices(Z)
    keep = np.isin(idx_all, pr.idx)
    loga = _as_log(data, len(Z))[keep]
    if weighted:
        loga = loga + 0.5 * p.alpha * np.abs(zk) ** 2
    w = zk.real + 1j * (math.pi / p.alpha) * np.floor(p.alpha / math.pi * zk.imag)
    den = np.diag(_logG_n_all(pr, zk, split)).copy() if len(zk) else np.zeros(0, complex)
    if len(den) and den.real.min() < -700:
        raise ZeroDenominator("G_n(z_n) underflows: nodes nearly collide")
    nodes = PointSet(zk.real, zk.imag, Z.origin)
    return InterpolantSpec(nodes, loga, p, w, LogComplex.from_exponent(den), pr.trunc, split, pr)


def _interp_terms(spec, zb):
    """Per-term log values (rows: z, columns: nodes with nonzero data)."""
    a = spec.params.alpha
    live = np.isfinite(spec.log_data.real)
    zk = spec.product.zk
    LG = _logG_n_all(spec.product, zb, spec.split)[:, live]
    zn, wn = zk[live], spec.w_nodes[live]
    den = spec.denominators.exponent[live]
    z = zb[:, None]
    E = a * (z - zn) * np.conj(wn) + 0.5 * a * ((z - wn) ** 2 - (zn - wn) ** 2)
    return spec.log_data[live] + E + LG - den


def evaluate_interpolant_log(spec, z):
    z = np.asarray(z, dtype=complex)
    spec.product.check(z)
    out = np.full(z.size, -np.inf + 0j)
    if not np.isfinite(spec.log_data.real).any():
        return out.reshape(z.shape)
    for s, zb in _blocks(z):
        out[s:s + len(zb)] = log_sum_exp(_interp_terms(spec, zb), axis=1)
    return out.reshape(z.shape)


def evaluate_interpolant(spec, z):
    """F(z) as a LogComplex (vectorized)."""
    return LogComplex.from_exponent(evaluate_interpolant_log(spec, z))


def interpolant_function(spec):
    from .fock import CylinderFunction
    return CylinderFunction(lambda z: evaluate_interpolant_log(spec, z), spec.params, "interpolant")


@dataclass(frozen=True)
class InterpolationReport:
    max_node_residual: float
    norm_ratio: float
    norm_sq: float
    data_norm_sq: float
    y_range: tuple


def node_residuals(spec):
    """Relative residuals at the kept nodes inside the certified band."""
    zk = spec.product.zk
    lo, hi = spec.band
    inside = (zk.imag >= lo) & (zk.imag <= hi)
    return log_rel_error(evaluate_interpolant_log(spec, zk[inside]), spec.log_data[inside])


def weighted_data_norm_sq(spec):
    a = spec.params.alpha
    lw = 2 * spec.log_data.real - a * np.abs(spec.product.zk) ** 2
    return float(np.sum(np.exp(lw[np.isfinite(lw)])))


def interpolation_report(spec, p=None, y_max=None, quad=None):
    """Node residuals plus ||F|| / ||(a_n e^{-(alpha/2)|z_n|^2})||_2.

    ``y_max`` is a half-width or (lo, hi); the default is the certified band.
    """
    p = p or spec.params
    res = node_residuals(spec)
    max_res = float(res.max()) if len(res) else 0.0
    y_range = spec.band if y_max is None else (
        (-float(y_max), float(y_max)) if np.ndim(y_max) == 0 else tuple(map(float, y_max)))
    dn = weighted_data_norm_sq(spec)
    if dn == 0:
        return InterpolationReport(max_res, 0.0, 0.0, 0.0, y_range)

    def g(z):
        lf = evaluate_interpolant_log(spec, z)
        return np.exp(2 * lf.real - p.alpha * np.abs(z) ** 2)

    nsq = strip_integrate(g, y_range, quad)
    return InterpolationReport(max_res, math.sqrt(nsq / dn), nsq, dn, y_range)


def _legendre_grid(y0, y1, panel=0.25, order=10):
    xg, wg = np.polynomial.legendre.leggauss(order)
    n = max(1, int(math.ceil((y1 - y0) / panel)))
    edges = np.linspace(y0, y1, n + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    ys = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    ws = (half[:, None] * wg[None, :]).ravel()
    return ys, ws


def term_gram(Z, p, data_mask, y_range, trunc=None, nx=32, panel=0.25, split="node"):
    """Gram matrix of the unit-weighted-datum interpolants of the masked nodes.

    Entry (j, l) is <T_j, T_l>, T_j the interpolant with b_j = 1 and all other
    data zero.
    """
    spec = interpolate(Z, np.where(np.asarray(data_mask, bool), 1.0, 0.0), p, trunc,
                       weighted=True, split=split)
    ys, wy = _legendre_grid(y_range[0], y_range[1], panel)
    xs = (np.arange(nx) + 0.5) / nx
    m = int(np.isfinite(spec.log_data.real).sum())
    M = np.zeros((m, m), dtype=complex)
    spec.product.check(1j * ys)
    for s in range(0, len(ys), max(1, _BLOCK // nx)):
        yb = ys[s:s + max(1, _BLOCK // nx)]
        wb = wy[s:s + max(1, _BLOCK // nx)]
        z = (xs[None, :] + 1j * yb[:, None]).ravel()
        T = _interp_terms(spec, z) - 0.5 * p.alpha * np.abs(z[:, None]) ** 2
        V = np.exp(T) * np.sqrt(np.repeat(wb, nx) / nx)[:, None]
        M += V.T @ V.conj()
    return M


def stability_constant(Z, p, data_mask, y_range, trunc=None, nx=32, panel=0.25, split="node"):
    """sup over data supported on the mask of ||F|| / ||data||_{2,alpha}.

    The square root of the largest eigenvalue of ``term_gram``: an empirical
    lower bound for the interpolation constant of Z.
    """
    from .eigen import hermitian_eigs
    M = term_gram(Z, p, data_mask, y_range, trunc, nx, panel, split)
    ev = hermitian_eigs(M)
    return math.sqrt(max(float(ev[-1]), 0.0))


# reconstruction ---------------------------------------------------------------

def lattice_parameter(Z):
    """a with Z close to i(pi/a)Z, read from a lattice or perturbed generator."""
    o = Z.origin
    if o.get("type") == "lattice":
        return math.pi / o["spacing"]
    if o.get("type") == "perturbed":
        return o["alpha"]
    raise ValueError("cannot infer the lattice parameter; pass beta explicitly")


def reconstruction_log(samples, Z, alpha, z, trunc=None, beta=None):
    """Sampling series for F in the alpha-space from its values on Z ~ Lambda_beta.

    Each term is F(z_k) e^{(alpha/2)(z^2 - z_k^2)} G_k(z)/G_k(z_k) chi_k(z) with
    chi_k = 1 for k >= 0 and e^{2 pi i (z - z_k)} for k < 0: the closed form of
    2 pi i e^{(beta-alpha) z_k^2/2} G(z) e^{-(beta-alpha) z^2/2} / (G'(z_k)(1 - e^{2 pi i (z_k - z)}))
    with G'(z_k) = +-2 pi i e^{(beta/2) z_k^2} G_k(z_k). At z = z_k the term
    equals F(z_k) exactly; no derivative is taken numerically.
    """
    beta = lattice_parameter(Z) if beta is None else float(beta)
    if not alpha < beta:
        raise AlphaBetaOrder(f"need alpha < beta, got alpha={alpha}, beta={beta}")
    pr = _Product(Z, beta, trunc)
    idx_all = two_sided_indices(Z)
    keep = np.isin(idx_all, pr.idx)
    logF = _as_log(samples, len(Z))[keep]
    live = np.isfinite(logF.real)
    z = np.asarray(z, dtype=complex)
    pr.check(z)
    out = np.full(z.size, -np.inf + 0j)
    if not live.any():
        return out.reshape(z.shape)
    zk = pr.zk
    den = np.diag(_logG_n_all(pr, zk, "origin"))[live]
    neg = (pr.idx < 0)[live]
    zl = zk[live]
    for s, zb in _blocks(z):
        LG = _logG_n_all(pr, zb, "origin")[:, live]
        zc = zb[:, None]
        T = logF[live] + 0.5 * alpha * (zc * zc - zl * zl) + LG - den
        T = T + np.where(neg, 2j * np.pi * (zc - zl), 0.0)
        out[s:s + len(zb)] = log_sum_exp(T, axis=1)
    return out.reshape(z.shape)


def reconstruction_expansion(samples, Z, alpha, z, trunc=None, beta=None):
    """Reconstructed F(z) as a LogComplex."""
    return LogComplex.from_exponent(reconstruction_log(samples, Z, alpha, z, trunc, beta))


# diagnostics ----------------------------------------------------------------

def zero_count(Z, p, y1, y2, trunc=None, x0=0.0, n=4096):
    """Winding number of G around [x0, x0+1] x [y1, y2].

    Horizontal sides are tracked factor by factor with unwrapped phases; the
    vertical sides contribute alpha (y2 - y1)/(2 pi) through the cocycle.
    """
    pr = _Product(Z, p.alpha, trunc)
    x = x0 + np.arange(n + 1) / n
    total = 0.0
    for y, sign in ((y1, 1.0), (y2, -1.0)):
        z = x + 1j * y
        pr.check(z)
        U, L = pr.factors(z)
        F = _origin_form(U, L, pr.idx)
        ph = np.unwrap(np.angle(np.exp(1j * F.imag)), axis=0)
        d = (ph[-1] - ph[0]).sum()
        d += (0.5 * pr.alpha_like * (z[-1] ** 2 - z[0] ** 2)).imag
        total += sign * d
    total += p.alpha * (y2 - y1)
    return total / (2 * math.pi)


@dataclass(frozen=True)
class GrowthProfile:
    gamma_plus: float
    gamma_minus: float
    slopes_sup: dict
    slopes_inf: dict
    intercepts_sup: dict
    intercepts_inf: dict
    max_residual_sup: float
    max_residual_inf: float
    sup_weighted: float
    ys: tuple = ()
    sup_curve: tuple = ()
    inf_curve: tuple = ()


def _cyl_dist(z, zk):
    dx = np.abs((z.real[:, None] - zk.real[None, :]) % 1.0)
    dx = np.minimum(dx, 1.0 - dx)
    dy = z.imag[:, None] - zk.imag[None, :]
    return np.sqrt(dx * dx + dy * dy).min(axis=1)


def growth_profile(Z, p, Y, nx=32, ny=None, dist_floor=0.05, trunc=None):
    """Least-squares fits of log weighted |G| against |y| on each side of 0.

    Upper envelope: sup over x of log(|G| e^{-(alpha/2)|z|^2}); lower envelope:
    inf over x, restricted to dist(z, Z) >= dist_floor, of that quantity minus
    log dist(z, Z). gamma_plus is the largest upper-envelope slope, and
    gamma_minus the largest decay rate of the lower envelope.
    """
    pr = _Product(Z, p.alpha, trunc)
    ny = ny or int(16 * Y) + 1
    ys = np.linspace(-Y, Y, 2 * ny + 1)
    xs = np.arange(nx) / nx
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    lg = product_G_log(pr, z, p).real - 0.5 * p.alpha * np.abs(z) ** 2
    dist = _cyl_dist(z, pr.zk)
    lg = lg.reshape(len(ys), nx)
    dist = dist.reshape(len(ys), nx)
    sup = lg.max(axis=1)
    low = np.where(dist >= dist_floor, lg - np.log(np.maximum(dist, 1e-300)), np.inf).min(axis=1)
    out = {"slopes_sup": {}, "slopes_inf": {}, "intercepts_sup": {}, "intercepts_inf": {}}
    rs, ri = 0.0, 0.0
    for side, sel in (("plus", ys >= 0), ("minus", ys <= 0)):
        t = np.abs(ys[sel])
        for key, vals in (("sup", sup[sel]), ("inf", low[sel])):
            ok = np.isfinite(vals)
            c1, c0 = np.polyfit(t[ok], vals[ok], 1)
            r = float(np.max(np.abs(vals[ok] - (c0 + c1 * t[ok]))))
            out["slopes_" + key][side] = float(c1)
            out["intercepts_" + key][side] = float(c0)
            if key == "sup":
                rs = max(rs, r)
            else:
                ri = max(ri, r)
    gp = max(out["slopes_sup"].values())
    gm = max(-s for s in out["slopes_inf"].values())
    return GrowthProfile(gp, gm, out["slopes_sup"], out["slopes_inf"], out["intercepts_sup"],
                         out["intercepts_inf"], rs, ri, float(np.exp(sup.max())),
                         tuple(map(float, ys)), tuple(map(float, sup)), tuple(map(float, low)))
