"""Point sets on the strip [0,1) x R, separation and Beurling densities."""
from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .errors import (ConfigError, IndexingAmbiguity, NoAdmissibleWindow, TooFewPoints)
from .rng import rng_stream


@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite point set sorted by imaginary part.

    ``origin`` is a JSON-style generator descriptor (lattice, perturbed,
    explicit or union).
    """

    x: np.ndarray
    y: np.ndarray
    origin: dict = field(default_factory=lambda: {"type": "explicit"})

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float)).copy()
        y = np.atleast_1d(np.asarray(self.y, dtype=float)).copy()
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if np.any((x < 0) | (x >= 1)) or not np.all(np.isfinite(y)):
            raise ValueError("strip points need 0 <= x < 1 and finite y")
        order = np.lexsort((x, y))
        x, y = x[order], y[order]
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return len(self.y)

    @property
    def z(self):
        return self.x + 1j * self.y

    @property
    def points(self):
        return np.column_stack([self.x, self.y])

    def shifted(self, dy):
        """Copy translated vertically by ``dy``."""
        return PointSet(self.x, self.y + dy, {"type": "shifted", "dy": dy, "base": self.origin})

    def y_extent(self):
        if len(self) == 0:
            return (0.0, 0.0)
        return (float(self.y[0]), float(self.y[-1]))


@dataclass(frozen=True)
class WindowSpec:
    w_im: float
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("window height r must be positive")


@dataclass(frozen=True)
class DensityEstimate:
    per_r: tuple            # ((r, inf_count/r, sup_count/r), ...)
    extrapolated: float
    exact: bool
    admissible_band: tuple = ()


# generators ----------------------------------------------------------------

def make_lattice(x0, spacing, n_min, n_max):
    """Points (x0, spacing * n) for n_min <= n <= n_max."""
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    if n_min > n_max:
        raise ValueError("empty index range (n_min > n_max)")
    n = np.arange(int(n_min), int(n_max) + 1)
    origin = {"type": "lattice", "x0": float(x0), "spacing": float(spacing),
              "n_min": int(n_min), "n_max": int(n_max)}
    return PointSet(np.full(len(n), float(x0)), spacing * n, origin)


def make_perturbed_lattice(alpha_like, Q, seed, n_min, n_max, x_mode="fixed", x0=0.0):
    """y_k = (pi/alpha_like) k + u_k, u_k uniform on [-Q, Q] from the seeded stream.

    With ``x_mode='jittered'`` the x coordinates are drawn uniformly on [0,1)
    after the vertical offsets.
    """
    if not alpha_like > 0 or Q < 0:
        raise ValueError("need alpha_like > 0 and Q >= 0")
    if n_min > n_max:
        raise ValueError("empty index range (n_min > n_max)")
    h = math.pi / alpha_like
    if Q >= h / 2:
        warnings.warn("Q >= spacing/2: perturbed lattice may fail to be separated")
    k = np.arange(int(n_min), int(n_max) + 1)
    rng = rng_stream(seed)
    u = Q * (2.0 * rng.random(len(k)) - 1.0) if Q > 0 else np.zeros(len(k))
    if x_mode == "jittered":
        x = rng.random(len(k))
    elif x_mode == "fixed":
        x = np.full(len(k), float(x0))
    else:
        raise ValueError("x_mode must be 'fixed' or 'jittered'")
    origin = {"type": "perturbed", "alpha": float(alpha_like), "Q": float(Q), "seed": int(seed),
              "n_min": int(n_min), "n_max": int(n_max), "x_mode": x_mode, "x0": float(x0)}
    return PointSet(x, h * k + u, origin)


def make_explicit(points):
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return PointSet(pts[:, 0], pts[:, 1], {"type": "explicit", "points": pts.tolist()})


def make_union(parts):
    parts = list(parts)
    x = np.concatenate([p.x for p in parts]) if parts else np.zeros(0)
    y = np.concatenate([p.y for p in parts]) if parts else np.zeros(0)
    return PointSet(x, y, {"type": "union", "parts": [p.origin for p in parts]})


def pointset_from_descriptor(desc):
    """Build a PointSet from a JSON descriptor; raises ConfigError when malformed."""
    if not isinstance(desc, dict) or "type" not in desc:
        raise ConfigError("point-set descriptor must be an object with a 'type'")
    kind = desc["type"]
    allowed = {
        "lattice": {"type", "x0", "spacing", "n_min", "n_max"},
        "perturbed": {"type", "alpha", "Q", "seed", "n_min", "n_max", "x_mode", "x0"},
        "explicit": {"type", "points"},
        "union": {"type", "parts"},
    }
    if kind not in allowed:
        raise ConfigError(f"unknown point-set type {kind!r}")
    extra = set(desc) - allowed[kind]
    if extra:
        raise ConfigError(f"unknown keys for {kind}: {sorted(extra)}")
    try:
        if kind == "lattice":
            return make_lattice(desc.get("x0", 0.0), desc["spacing"], desc["n_min"], desc["n_max"])
        if kind == "perturbed":
            return make_perturbed_lattice(desc["alpha"], desc["Q"], desc.get("seed", 0),
                                          desc["n_min"], desc["n_max"],
                                          desc.get("x_mode", "fixed"), desc.get("x0", 0.0))
        if kind == "explicit":
            return make_explicit(desc["points"])
        return make_union([pointset_from_descriptor(d) for d in desc["parts"]])
    except KeyError as exc:
        raise ConfigError(f"missing key {exc} in {kind} descriptor") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {kind} descriptor: {exc}") from None


# separation ---------------------------------------------------------------

def separation_constant(Z, metric="cylinder"):
    """Minimal pairwise distance; cylinder metric wraps x modulo 1.

    Scans increasing index lags on the y-sorted points and stops once the
    vertical gap alone exceeds the best distance found.
    """
    if len(Z) < 2:
        raise TooFewPoints("separation needs at least two points")
    if metric not in ("cylinder", "planar"):
        raise ValueError("metric must be 'cylinder' or 'planar'")
    x, y = Z.x, Z.y
    best = math.inf
    for lag in range(1, len(Z)):
        dy = y[lag:] - y[:-lag]
        if dy.min() >= best:
            break
        dx = np.abs(x[lag:] - x[:-lag])
        if metric == "cylinder":
            dx = np.minimum(dx, 1.0 - dx)
        best = min(best, float(np.sqrt(dx * dx + dy * dy).min()))
        if best == 0.0:
            break
    return best


# counting and densities ---------------------------------------------------

def count_in_window(Z, win):
    """Number of points with y in the closed interval [w_im - r/2, w_im + r/2]."""
    lo = win.w_im - win.r / 2
    hi = win.w_im + win.r / 2
    return int(np.searchsorted(Z.y, hi, "right") - np.searchsorted(Z.y, lo, "left"))


def _counts(y, centers, r):
    lo = centers - r / 2
    hi = centers + r / 2
    return np.searchsorted(y, hi, "right") - np.searchsorted(y, lo, "left")


def critical_centers(Z, r):
    """Window centres at which the count can attain its inf or sup.

    Returns the admissible band (windows inside the data extent) and the
    candidate centres: breakpoints y_i +- r/2, midpoints between consecutive
    breakpoints, and the band ends.
    """
    y0, y1 = Z.y_extent()
    c_lo, c_hi = y0 + r / 2, y1 - r / 2
    if len(Z) == 0 or c_lo > c_hi:
        return None, np.zeros(0)
    bp = np.concatenate([Z.y - r / 2, Z.y + r / 2, [c_lo, c_hi]])
    bp = np.unique(bp[(bp >= c_lo) & (bp <= c_hi)])
    mids = 0.5 * (bp[1:] + bp[:-1])
    return (c_lo, c_hi), np.unique(np.concatenate([bp, mids]))


def _analytic_density(origin):
    kind = origin.get("type")
    if kind == "lattice":
        return 1.0 / origin["spacing"]
    if kind == "perturbed":
        return origin["alpha"] / math.pi
    return None


def density_bounds(Z, r_list, w_samples=None):
    """Lower and upper Beurling density estimates over admissible windows.

    For each r the inf/sup of count/r is taken over all critical window
    centres (exact), or over ``w_samples`` evenly spread critical centres
    when that cap is smaller. Lattice and perturbed-lattice generators also
    carry their analytic density, flagged ``exact``.
    """
    r_list = [float(r) for r in r_list]
    if any(r <= 0 for r in r_list) or r_list != sorted(r_list):
        raise ValueError("r_list must be positive and ascending")
    per_r = []
    band = ()
    for r in r_list:
        adm, centers = critical_centers(Z, r)
        if adm is None:
            continue
        if w_samples is not None and len(centers) > w_samples:
            idx = np.unique(np.linspace(0, len(centers) - 1, int(w_samples)).round().astype(int))
            centers = centers[idx]
        c = _counts(Z.y, centers, r)
        per_r.append((r, float(c.min()) / r, float(c.max()) / r))
        band = adm
    if not per_r:
        raise NoAdmissibleWindow("no window height fits inside the data extent")
    exact_val = _analytic_density(Z.origin)
    exact = exact_val is not None
    d_minus = exact_val if exact else per_r[-1][1]
    d_plus = exact_val if exact else per_r[-1][2]
    per_r = tuple(per_r)
    return (DensityEstimate(per_r, d_minus, exact, band),
            DensityEstimate(per_r, d_plus, exact, band))


# uniform closeness --------------------------------------------------------

def anchor_index(Z):
    """Index of the point nearest y = 0, ties to the nonnegative side."""
    if len(Z) == 0:
        raise TooFewPoints("empty point set")
    d = np.abs(Z.y)
    cand = np.flatnonzero(d == d.min())
    nonneg = cand[Z.y[cand] >= 0]
    return int(nonneg[0] if len(nonneg) else cand[-1])


def two_sided_indices(Z):
    """Consecutive integer labels in sorted order with the anchor at 0."""
    return np.arange(len(Z)) - anchor_index(Z)


def uniform_closeness(Z, alpha_like):
    """Q* = max_k |y_k - (pi/alpha_like) k| under the anchored enumeration.

    Raises IndexingAmbiguity when a gap reaches 2 pi/alpha_like (a missing
    node), which breaks the consecutive labelling.
    """
    h = math.pi / alpha_like
    if len(Z) >= 2:
        gaps = np.diff(Z.y)
        if gaps.max() >= 2 * h * (1 - 1e-12):
            raise IndexingAmbiguity(f"gap {gaps.max():.6g} reaches 2 pi/alpha = {2 * h:.6g}")
    k = two_sided_indices(Z)
    return float(np.max(np.abs(Z.y - h * k)))
