"""Half-space score programs and the payoff bounds they generate.

For a direction lambda in {+1, -1} and an action pair (alpha, beta), the score
program asks for the best payoff level z enforceable with continuation offsets
x(y) = w(y) - z that all sit on one side of zero (lambda x(y) <= 0):

    maximize   lambda z
    subject to z  = u(a, beta) + sum_y rho(y|a) x(y)   for a in supp(alpha)
               z >= u(a', beta) + sum_y rho(y|a') x(y) for every a'
               lambda x(y) <= 0.

Supremum of lambda z over pairs where beta is within eta of a best reply gives
kappa_eta(lambda); at eta = 0 the two directions clamp the complete-information
equilibrium payoff set from above and below.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .game import Distribution, StageGame, mix_signal_dist

__all__ = [
    "ScoreResult",
    "PayoffSetResult",
    "br2",
    "optimality_loss",
    "kstar",
    "verify_certificate",
    "kappa",
    "ci_payoff_set",
    "stackelberg",
    "reputation_lower_bound",
]

BR_TIE_TOL = 1e-9      # payoff ties below this are treated as exact
SUPPORT_CUTOFF = 1e-9  # mass below this does not count as support


@dataclass(frozen=True, eq=False)
class ScoreResult:
    feasible: bool
    z: float | None
    offsets: np.ndarray | None
    direction: int


@dataclass(frozen=True)
class PayoffSetResult:
    kappa_plus: float
    kappa_minus: float
    lo: float
    hi: float
    grid_resolution: float


def br2(game: StageGame, q: Distribution, *, tol: float = BR_TIE_TOL) -> tuple[str, ...]:
    """Short-run best replies to a signal distribution, ties within ``tol``.

    The reply maximizes the signal-measurable payoff sum_y q(y) v_tilde(b, y);
    when q = rho_alpha this coincides with the ex-ante best reply to alpha.
    """
    if q.labels != game.signals:
        raise ValueError(f"br2: expected signal labels {game.signals}, got {q.labels}")
    vals = game.v_tilde @ q.weights
    top = float(vals.max())
    return tuple(b for b, val in zip(game.actions_short, vals) if val >= top - tol)


def optimality_loss(game: StageGame, alpha: Distribution, beta: Distribution) -> float:
    """Short-run payoff forgone by beta against alpha, relative to the best reply."""
    if alpha.labels != game.actions_long or beta.labels != game.actions_short:
        raise ValueError("optimality_loss: action labels do not match the game")
    row = alpha.weights @ game.v
    return float(row.max() - row @ beta.weights)


def kstar(game: StageGame, alpha: Distribution, beta: Distribution, direction: int) -> ScoreResult:
    """Solve the score program at one (alpha, beta) pair. Infeasibility is an answer."""
    if direction not in (+1, -1):
        raise ValueError(f"kstar: direction must be +1 or -1, got {direction!r}")
    if alpha.labels != game.actions_long or beta.labels != game.actions_short:
        raise ValueError("kstar: action labels do not match the game")
    R = game.rho.matrix
    n_a, n_y = R.shape
    u_beta = game.u @ beta.weights
    supp = alpha.weights > SUPPORT_CUTOFF
    # variables: [z, x(y_1) ... x(y_n)]
    A_eq = np.hstack([np.ones((int(supp.sum()), 1)), -R[supp]])
    b_eq = u_beta[supp]
    off = ~supp
    A_ub = np.hstack([-np.ones((int(off.sum()), 1)), R[off]])
    b_ub = -u_beta[off]
    x_bound = (None, 0.0) if direction == +1 else (0.0, None)
    bounds = [(None, None)] + [x_bound] * n_y
    c = np.zeros(1 + n_y)
    c[0] = -float(direction)
    res = linprog(c, A_ub=A_ub if off.any() else None, b_ub=b_ub if off.any() else None,
                  A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status == 2:
        return ScoreResult(False, None, None, direction)
    if res.status == 3:
        raise RuntimeError("score program unbounded; enforceability should cap it")
    if res.status != 0:
        raise RuntimeError(f"score program solver failure: {res.message}")
    return ScoreResult(True, float(res.x[0]), res.x[1:].copy(), direction)


def verify_certificate(game: StageGame, alpha: Distribution, beta: Distribution,
                       result: ScoreResult) -> float:
    """Largest constraint violation of a feasible score certificate (0 is clean)."""
    if not result.feasible:
        raise ValueError("verify_certificate: result is infeasible")
    R = game.rho.matrix
    u_beta = game.u @ beta.weights
    z, x = result.z, result.offsets
    levels = u_beta + R @ x
    worst = 0.0
    supp = alpha.weights > SUPPORT_CUTOFF
    worst = max(worst, float(np.abs(z - levels[supp]).max()))
    worst = max(worst, float(np.clip(levels - z, 0.0, None).max()))
    worst = max(worst, float(np.clip(result.direction * x, 0.0, None).max()))
    return worst


def _simplex_grid(n: int, resolution: float):
    """Lattice over the n-simplex with spacing ``resolution`` (counts / k form)."""
    k = round(1.0 / resolution)
    if k <= 0:
        raise ValueError(f"grid resolution {resolution!r} coarser than the whole simplex")
    if n == 2:
        for i in range(k + 1):
            yield np.array([i / k, (k - i) / k])
        return
    for comp in itertools.combinations_with_replacement(range(n), k):
        counts = np.bincount(np.asarray(comp), minlength=n)
        yield counts / k


def _admissible_betas(game: StageGame, alpha_w: np.ndarray, eta: float,
                      subgrid: float) -> list[tuple[np.ndarray, bool]]:
    """Pure replies within eta of optimal, plus a coarse lattice of mixtures of them.

    The loss of a mixture is the mixture of pure losses, so every listed beta
    is eta-admissible by construction. Bool flags mark properly mixed entries.
    """
    row = alpha_w @ game.v
    losses = row.max() - row
    keep = np.flatnonzero(losses <= eta + BR_TIE_TOL)
    n_b = len(game.actions_short)
    out: list[tuple[np.ndarray, bool]] = []
    for j in keep:
        w = np.zeros(n_b)
        w[j] = 1.0
        out.append((w, False))
    if len(keep) >= 2:
        for mix in _simplex_grid(len(keep), subgrid):
            if np.any(np.abs(mix - 1.0) < 1e-12):
                continue  # vertices already listed as pure
            w = np.zeros(n_b)
            w[keep] = mix
            out.append((w, True))
    return out


def kappa(game: StageGame, direction: int, eta: float, grid: float, *,
          beta_subgrid: float = 1e-2) -> float:
    """sup of lambda z* over gridded pairs with an eta-admissible short-run reply.

    Returns -inf when no admissible pair is feasible. Mixed replies enter only
    through the coarse sub-lattice; a warning is raised if one strictly beats
    every pure reply, since that signals the sub-grid actually matters.
    """
    if eta < 0.0:
        raise ValueError(f"kappa: eta must be >= 0, got {eta!r}")
    best = -np.inf
    best_pure = -np.inf
    for alpha_w in _simplex_grid(len(game.actions_long), grid):
        alpha = Distribution(game.actions_long, alpha_w)
        for beta_w, is_mixed in _admissible_betas(game, alpha.weights, eta, beta_subgrid):
            beta = Distribution(game.actions_short, beta_w)
            res = kstar(game, alpha, beta, direction)
            if not res.feasible:
                continue
            score = direction * res.z
            if score > best:
                best = score
            if not is_mixed and score > best_pure:
                best_pure = score
    if best > best_pure + 1e-9:
        warnings.warn(
            f"kappa(direction={direction}, eta={eta}): a mixed short-run reply beat every "
            f"pure one by {best - best_pure:.3e}; the 1e-2 reply sub-grid is load-bearing",
            RuntimeWarning,
            stacklevel=2,
        )
    return float(best)


def ci_payoff_set(game: StageGame, grid: float) -> PayoffSetResult:
    """Interval clamping the long-run player's equilibrium payoffs under known types.

    hi caps payoffs using the downward half-space score, lo symmetric; both are
    intersected with the raw payoff range.
    """
    k_plus = kappa(game, +1, 0.0, grid)
    k_minus = kappa(game, -1, 0.0, grid)
    u_min, u_max = game.u_range
    lo = max(u_min, -k_minus)
    hi = min(u_max, k_plus)
    return PayoffSetResult(k_plus, k_minus, lo, hi, 1.0 / round(1.0 / grid))


def stackelberg(game: StageGame, grid: float, *, pure: bool = False
                ) -> tuple[float, Distribution]:
    """Best commitment payoff against an adversarially chosen best reply.

    Grid supremum of min over br2(rho_alpha) of u(alpha, b); ``pure`` restricts
    the commitment to vertices. Ties go to the first grid point reaching the sup.
    """
    n = len(game.actions_long)
    points = (np.eye(n)[i] for i in range(n)) if pure else _simplex_grid(n, grid)
    best = -np.inf
    best_alpha: Distribution | None = None
    for alpha_w in points:
        alpha = Distribution(game.actions_long, alpha_w)
        replies = br2(game, mix_signal_dist(game.rho, alpha))
        u_row = alpha.weights @ game.u
        val = min(float(u_row[game.actions_short.index(b)]) for b in replies)
        if val > best:
            best = val
            best_alpha = alpha
    assert best_alpha is not None
    return best, best_alpha


def reputation_lower_bound(game: StageGame, alpha_star: Distribution) -> float:
    """Worst payoff of persistent alpha_star play across its admissible replies."""
    replies = br2(game, mix_signal_dist(game.rho, alpha_star))
    u_row = alpha_star.weights @ game.u
    return min(float(u_row[game.actions_short.index(b)]) for b in replies)
