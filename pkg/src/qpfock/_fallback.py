"""Pure numpy implementations of the compiled kernels."""
import numpy as np


def _round_robin(n):
    """Disjoint pivot pairs for each of the n-1 rounds (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        pairs = [(players[i], players[n - 1 - i]) for i in range(half)]
        rounds.append((np.array([min(p) for p in pairs]), np.array([max(p) for p in pairs])))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_hermitian(a, v, tol, max_sweeps, want_vectors):
    """Parallel-order Jacobi on ``a`` in place; returns the sweep count or -1.

    Each round applies n/2 disjoint rotations at once, which vectorizes well
    in numpy. The converged spectrum matches the row-cyclic kernel to rounding.
    """
    n = a.shape[0]
    if n < 2:
        return 0
    m = n + (n % 2)
    rounds = [(p, q) for p, q in _round_robin(m)]
    if m != n:
        rounds = [(p[q < n], q[q < n]) for p, q in rounds]
    target = tol * np.linalg.norm(a)
    mask = ~np.eye(n, dtype=bool)
    for sweep in range(max_sweeps + 1):
        if np.linalg.norm(a[mask]) <= target:
            return sweep
        if sweep == max_sweeps:
            break
        for p, q in rounds:
            apq_c = a[p, q]
            apq = np.abs(apq_c)
            live = apq > 0
            if not live.any():
                continue
            p, q, apq_c, apq = p[live], q[live], apq_c[live], apq[live]
            e = apq_c / apq
            app = a[p, p].real
            aqq = a[q, q].real
            theta = (aqq - app) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(theta == 0, 1.0, t)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            upp, upq = c, s
            uqp, uqq = -s * np.conj(e), c * np.conj(e)
            x, y = a[:, p].copy(), a[:, q].copy()
            a[:, p] = x * upp + y * uqp
            a[:, q] = x * upq + y * uqq
            x, y = a[p, :].copy(), a[q, :].copy()
            a[p, :] = np.conj(upp)[:, None] * x + np.conj(uqp)[:, None] * y
            a[q, :] = np.conj(upq)[:, None] * x + np.conj(uqq)[:, None] * y
            a[p, p] = app - t * apq
            a[q, q] = aqq + t * apq
            a[p, q] = 0.0
            a[q, p] = 0.0
            if want_vectors:
                x, y = v[:, p].copy(), v[:, q].copy()
                v[:, p] = x * upp + y * uqp
                v[:, q] = x * upq + y * uqq
    return -1


def log1m_exp(w):
    """log(1 - e^w) for complex arrays, stable on both sides of Re w = 0."""
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    neg = w.real <= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        wn = w[neg]
        out[neg] = np.log(1.0 - np.exp(wn))
        wp = w[~neg]
        out[~neg] = wp + np.log(np.exp(-wp) - 1.0)
    out[np.isnan(out.real) | (out.real == -np.inf)] = -np.inf
    return out


def log_factor_pair(z, zk):
    diff = np.asarray(zk)[None, :] - np.asarray(z)[:, None]
    # reduce Re(zk - z) mod 1 so integer shifts give exact zeros
    d = 2j * np.pi * ((diff.real - np.round(diff.real)) + 1j * diff.imag)
    return log1m_exp(d), log1m_exp(-d)
