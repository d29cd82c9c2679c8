"""Dense-grid oracles, deliberately independent of the convex solvers.

These enumerate mixed actions on a regular simplex lattice and take plain
minima. They exist to audit the conditional-gradient projections and the
closed-form distances; nothing else in the package calls into them, and they
call into nothing but raw array math.
"""

from __future__ import annotations

import itertools

import numpy as np

__all__ = ["grid_min_kl_forward", "grid_min_kl_reverse", "simplex_lattice"]

_CHUNK = 250_000


def simplex_lattice(n: int, resolution: float):
    """Yield weight vectors with coordinates on multiples of ``resolution``.

    Exhaustive and combinatorial; intended for small n. The lattice always
    contains every vertex and every lower face's lattice.
    """
    k = round(1.0 / resolution)
    if abs(k * resolution - 1.0) > 1e-9:
        raise ValueError(f"resolution {resolution!r} must evenly divide 1")
    for comp in itertools.combinations_with_replacement(range(n), k):
        counts = np.bincount(np.asarray(comp), minlength=n)
        yield counts / k


def _scan_pairs_2(R0: np.ndarray, R1: np.ndarray, k: int, kl_of_mix) -> tuple[float, np.ndarray]:
    t = np.arange(k + 1) / k
    mix = t[:, None] * R0 + (1.0 - t)[:, None] * R1
    vals = kl_of_mix(mix)
    i = int(np.argmin(vals))
    return float(vals[i]), np.array([t[i], 1.0 - t[i]])


def _scan_triangle(k: int, kl_chunk) -> tuple[float, np.ndarray]:
    """Minimize over the full 2-simplex lattice, streamed in cache-sized chunks."""
    t = np.arange(k + 1) / k
    best = np.inf
    best_alpha = np.array([1.0, 0.0, 0.0])
    a1 = np.empty(_CHUNK)
    a2 = np.empty(_CHUNK)
    row, col = 0, 0
    while row <= k:
        n = 0
        while n < _CHUNK and row <= k:
            take = min(_CHUNK - n, (k + 1 - row) - col)
            a1[n:n + take] = t[row]
            a2[n:n + take] = t[col:col + take]
            n += take
            col += take
            if col >= k + 1 - row:
                row += 1
                col = 0
        A1, A2 = a1[:n], a2[:n]
        A3 = 1.0 - A1 - A2
        vals = kl_chunk(A1, A2, A3)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best = float(vals[i])
            best_alpha = np.array([A1[i], A2[i], A3[i]])
    return best, best_alpha


def grid_min_kl_forward(q: np.ndarray, R: np.ndarray, resolution: float) -> tuple[float, np.ndarray]:
    """Brute-force min over lattice alpha of D(sum_a alpha(a) R[a] || q)."""
    q = np.asarray(q, dtype=float)
    R = np.asarray(R, dtype=float)
    k = round(1.0 / resolution)
    log_q = np.log(q)
    cross = R @ log_q  # sum_y R[a, y] log q(y), linear in alpha

    if R.shape[0] == 2:
        def kl_of_mix(mix):
            return np.einsum("ij,ij->i", mix, np.log(mix)) - mix @ log_q
        return _scan_pairs_2(R[0], R[1], k, kl_of_mix)

    if R.shape[0] == 3:
        def kl_chunk(A1, A2, A3):
            acc = None
            for y in range(R.shape[1]):
                m = A1 * R[0, y] + A2 * R[1, y] + A3 * R[2, y]
                term = m * np.log(m)
                acc = term if acc is None else acc + term
            acc -= A1 * cross[0] + A2 * cross[1] + A3 * cross[2]
            return acc
        return _scan_triangle(k, kl_chunk)

    best = np.inf
    best_alpha = None
    for alpha in simplex_lattice(R.shape[0], resolution):
        m = alpha @ R
        mask = m > 0.0
        v = float(np.sum(m[mask] * np.log(m[mask]))) - float(m @ log_q)
        if v < best:
            best, best_alpha = v, alpha
    return best, best_alpha


def grid_min_kl_reverse(p: np.ndarray, F: np.ndarray, resolution: float) -> tuple[float, np.ndarray]:
    """Brute-force min over lattice alpha of D(p || sum_a alpha(a) F[a])."""
    p = np.asarray(p, dtype=float)
    F = np.asarray(F, dtype=float)
    k = round(1.0 / resolution)
    mask = p > 0.0
    pm = p[mask]
    ent = float(pm @ np.log(pm))
    Fm = F[:, mask]

    if F.shape[0] == 2:
        t = np.arange(k + 1) / k
        mix = t[:, None] * Fm[0] + (1.0 - t)[:, None] * Fm[1]
        vals = ent - np.log(mix) @ pm
        i = int(np.argmin(vals))
        return float(vals[i]), np.array([t[i], 1.0 - t[i]])

    if F.shape[0] == 3:
        def kl_chunk(A1, A2, A3):
            acc = None
            for j in range(Fm.shape[1]):
                m = A1 * Fm[0, j] + A2 * Fm[1, j] + A3 * Fm[2, j]
                term = np.log(m) * (-pm[j])
                acc = term if acc is None else acc + term
            return acc + ent
        return _scan_triangle(k, kl_chunk)

    best = np.inf
    best_alpha = None
    for alpha in simplex_lattice(F.shape[0], resolution):
        v = ent - float(pm @ np.log(alpha @ Fm))
        if v < best:
            best, best_alpha = v, alpha
    return best, best_alpha
