"""Point-set generators, separation, window counts and Beurling densities."""
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qpfock.errors import ConfigError, IndexingAmbiguity, NoAdmissibleWindow, TooFewPoints
from qpfock.pointsets import (PointSet, WindowSpec, anchor_index, count_in_window, critical_centers,
                              density_bounds, make_explicit, make_lattice, make_perturbed_lattice,
                              make_union, pointset_from_descriptor, separation_constant,
                              uniform_closeness)


def brute_separation(Z, metric):
    best = math.inf
    for i in range(len(Z)):
        for j in range(i + 1, len(Z)):
            dx = abs(Z.x[i] - Z.x[j])
            if metric == "cylinder":
                dx = min(dx, 1 - dx)
            best = min(best, math.hypot(dx, Z.y[i] - Z.y[j]))
    return best


def brute_counts(y, r, centers):
    return np.array([np.sum((y >= c - r / 2) & (y <= c + r / 2)) for c in centers])


# generators -----------------------------------------------------------------

def test_lattice_examples():
    Z = make_lattice(0.0, 1.0, -2, 2)
    assert list(Z.y) == [-2, -1, 0, 1, 2]
    Z = make_lattice(0.0, 0.5, 0, 9)
    assert len(Z) == 10
    assert separation_constant(Z) == 0.5
    with pytest.raises(ValueError):
        make_lattice(0.0, 1.0, 3, 2)
    with pytest.raises(ValueError):
        make_lattice(0.0, 0.0, 0, 2)


def test_pointset_sorted_and_immutable():
    Z = make_explicit([[0.2, 3.0], [0.1, -1.0], [0.5, 0.0]])
    assert list(Z.y) == [-1.0, 0.0, 3.0]
    with pytest.raises(ValueError):
        Z.y[0] = 7.0
    with pytest.raises(ValueError):
        PointSet([1.0], [0.0])


def test_perturbed_examples():
    h = math.pi / 2.0
    Z0 = make_perturbed_lattice(2.0, 0.0, 1, -5, 5)
    assert np.array_equal(Z0.y, h * np.arange(-5, 6))
    Z = make_perturbed_lattice(2.0, 0.1, 7, -50, 50)
    assert uniform_closeness(Z, 2.0) <= 0.1
    Z2 = make_perturbed_lattice(2.0, 0.1, 7, -50, 50)
    assert np.array_equal(Z.y, Z2.y) and np.array_equal(Z.x, Z2.x)
    J = make_perturbed_lattice(2.0, 0.1, 7, -50, 50, x_mode="jittered")
    assert np.array_equal(np.sort(J.y), np.sort(Z.y))
    assert len(np.unique(J.x)) == len(J)


def test_perturbed_warns_when_q_large():
    with pytest.warns(UserWarning):
        make_perturbed_lattice(1.0, 2.0, 0, 0, 5)


def test_descriptors():
    Z = pointset_from_descriptor({"type": "lattice", "x0": 0.5, "spacing": 0.8, "n_min": -64,
                                  "n_max": 64})
    assert len(Z) == 129 and Z.x[0] == 0.5
    U = pointset_from_descriptor({"type": "union", "parts": [
        {"type": "lattice", "spacing": 1.0, "n_min": 0, "n_max": 3},
        {"type": "explicit", "points": [[0.5, 0.5]]}]})
    assert len(U) == 5
    for bad in ({"type": "nope"}, {"type": "lattice", "spacing": 1.0}, [1, 2],
                {"type": "lattice", "spacing": 1.0, "n_min": 0, "n_max": 1, "extra": 1},
                {"type": "lattice", "spacing": -1.0, "n_min": 0, "n_max": 1}):
        with pytest.raises(ConfigError):
            pointset_from_descriptor(bad)


# separation ---------------------------------------------------------------

def test_separation_examples():
    Z = make_explicit([[0.05, 0.0], [0.95, 0.0]])
    assert separation_constant(Z, "cylinder") == pytest.approx(0.1)
    assert separation_constant(Z, "planar") == pytest.approx(0.9)
    assert separation_constant(make_explicit([[0.3, 1.0], [0.3, 1.0], [0.1, 4.0]])) == 0.0
    for s in (0.3, 1.7):
        Z = make_lattice(0.25, s, -10, 10)
        assert separation_constant(Z, "cylinder") == pytest.approx(s)
        assert separation_constant(Z, "planar") == pytest.approx(s)
    with pytest.raises(TooFewPoints):
        separation_constant(make_explicit([[0.0, 0.0]]))


@given(st.lists(st.tuples(st.floats(0, 0.999), st.floats(-5, 5)), min_size=2, max_size=25))
def test_separation_matches_brute_force(pts):
    Z = make_explicit(pts)
    for m in ("cylinder", "planar"):
        assert separation_constant(Z, m) == pytest.approx(brute_separation(Z, m), abs=1e-12)
    assert separation_constant(Z, "cylinder") <= separation_constant(Z, "planar")


@given(st.floats(0.3, 3.0), st.floats(0, 0.49), st.integers(0, 2**32))
def test_perturbed_separation_lower_bound(alpha, frac, seed):
    h = math.pi / alpha
    Q = frac * h
    Z = make_perturbed_lattice(alpha, Q, seed, -20, 20)
    assert separation_constant(Z) >= h - 2 * Q - 1e-12


# counting -------------------------------------------------------------------

def test_count_examples():
    Z = make_lattice(0.0, 1.0, -10, 10)
    assert count_in_window(Z, WindowSpec(0.0, 4.0)) == 5
    assert count_in_window(Z, WindowSpec(1.0, 2.0)) == 3   # boundary points counted
    assert count_in_window(make_explicit(np.zeros((0, 2))), WindowSpec(0.0, 1.0)) == 0
    with pytest.raises(ValueError):
        WindowSpec(0.0, 0.0)


# quarter-integer grid keeps window endpoints exact
@given(st.lists(st.integers(-80, 80), max_size=40), st.integers(-80, 80),
       st.integers(1, 40), st.integers(1, 40))
def test_count_monotone_and_additive(yq, cq, r1, r2):
    ys = [q / 4 for q in yq]
    c = cq / 4
    Z = make_explicit([[0.0, y] for y in ys])
    lo, hi = sorted((r1 / 4, r2 / 4))
    assert count_in_window(Z, WindowSpec(c, lo)) <= count_in_window(Z, WindowSpec(c, hi))
    # [c - a, c] and (c, c + a] split [c - a, c + a]
    a = hi / 2
    left = count_in_window(Z, WindowSpec(c - a / 2, a))
    right = count_in_window(Z, WindowSpec(c + a / 2, a))
    on_mid = int(np.sum(np.asarray(ys) == c))
    assert left + right - on_mid == count_in_window(Z, WindowSpec(c, 2 * a))


# densities ----------------------------------------------------------------

def test_lattice_density_matches_brute_force():
    Z = make_lattice(0.0, 0.5, -100, 100)
    lo, hi = density_bounds(Z, [20.0])
    assert lo.exact and lo.extrapolated == 2.0 and hi.extrapolated == 2.0
    r, dmin, dmax = lo.per_r[0]
    cen = np.linspace(-40, 40, 4001)
    bc = brute_counts(Z.y, 20.0, cen) / 20.0
    assert dmin == pytest.approx(bc.min()) and dmax == pytest.approx(bc.max())
    assert abs(dmin - 2) <= 1 / 20 and abs(dmax - 2) <= 1 / 20


@given(st.floats(0.2, 3.0), st.floats(0, 1), st.integers(5, 60))
def test_lattice_window_bound(spacing, frac, r_steps):
    Z = make_lattice(0.0, spacing, -120, 120)
    r = spacing * r_steps * (1 + frac) / 2 + 0.1
    adm, centers = critical_centers(Z, r)
    counts = brute_counts(Z.y, r, centers)
    assert np.all(np.abs(counts / r - 1 / spacing) <= 1 / r + 1e-12)


def test_critical_sweep_is_exact(rng):
    Z = make_explicit(np.column_stack([rng.random(80), np.sort(rng.uniform(-30, 30, 80))]))
    lo, hi = density_bounds(Z, [5.0, 10.0])
    for r, dmin, dmax in lo.per_r:
        c = np.linspace(Z.y[0] + r / 2, Z.y[-1] - r / 2, 20001)
        bc = brute_counts(Z.y, r, c) / r
        assert dmin <= bc.min() + 1e-12 and dmax >= bc.max() - 1e-12
    assert not lo.exact


def test_density_empty_interior():
    Z = make_explicit([[0.0, 0.0], [0.0, 100.0]])
    lo, hi = density_bounds(Z, [10.0])
    assert lo.extrapolated == 0.0
    assert hi.extrapolated == pytest.approx(0.1)


def test_union_of_interleaved_lattices():
    Z = make_union([make_lattice(0.0, 1.0, -60, 60), make_lattice(0.5, 1.0, -60, 60).shifted(0.5)])
    lo, hi = density_bounds(Z, [10.0, 20.0])
    assert not lo.exact
    assert abs(lo.extrapolated - 2) <= 1 / 20 and abs(hi.extrapolated - 2) <= 1 / 20


def test_density_errors():
    Z = make_lattice(0.0, 1.0, 0, 5)
    with pytest.raises(NoAdmissibleWindow):
        density_bounds(Z, [50.0])
    with pytest.raises(ValueError):
        density_bounds(Z, [2.0, 1.0])


def test_density_w_samples_cap():
    Z = make_lattice(0.0, 0.5, -100, 100)
    lo, _ = density_bounds(Z, [20.0], w_samples=7)
    assert abs(lo.per_r[0][1] - 2) <= 1 / 20


# uniform closeness ----------------------------------------------------------

def test_uniform_closeness_examples():
    a = 2.5
    Z = make_perturbed_lattice(a, 0.0, 0, -20, 20)
    assert uniform_closeness(Z, a) == 0.0
    gap = make_explicit([[0.0, y] for y in np.delete(np.arange(-10, 11) * math.pi / a, 15)])
    with pytest.raises(IndexingAmbiguity):
        uniform_closeness(gap, a)


def test_anchor_tie_breaks_nonnegative():
    Z = make_explicit([[0.0, -0.5], [0.0, 0.5], [0.0, 1.5]])
    assert Z.y[anchor_index(Z)] == 0.5


@given(st.floats(0.5, 5), st.floats(0, 0.45), st.integers(0, 1000))
def test_uniform_closeness_by_construction(alpha, frac, seed):
    Q = frac * math.pi / alpha
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        Z = make_perturbed_lattice(alpha, Q, seed, -15, 15)
    assert uniform_closeness(Z, alpha) <= Q + 1e-12
