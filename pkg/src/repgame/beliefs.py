"""Belief dynamics of short-run Bayesian players with a fixed model set.

Each period the short-run player forms a predictive signal distribution from
the current posterior over (type, model) hypotheses, best-replies to it, then
updates on the realized public signal. Nature draws signals from the *true*
monitoring structure, which need not belong to the player's model set — that
mismatch is the entire point. Beliefs are carried in log space and only ever
normalized through logsumexp, so posteriors stay meaningful long after
individual hypotheses have lost hundreds of nats.

The batch engine is vectorized across Monte Carlo runs. Randomness comes from
counter-based per-run substreams (Philox keyed by ``(master_seed << 64) | run``),
so run ``i`` of a 1000-run batch is bit-identical to run ``i`` simulated alone.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import logsumexp

from .divergence import kl, separation_value
from .frameworks import TYPE_COMMIT, TYPE_NORMAL, Framework
from .game import Distribution, StageGame
from .scores import BR_TIE_TOL, br2

__all__ = [
    "BeliefState",
    "bayes_step",
    "predictive",
    "slp_action",
    "SimulationConfig",
    "BatchResult",
    "TrajectoryRecord",
    "MonteCarloSummary",
    "simulate_batch",
    "simulate_run",
    "monte_carlo",
    "DecayFit",
    "decay_rate_fit",
    "CertificateReport",
    "discounted_kl_certificate",
    "certificate_kl_ceiling",
    "AzumaReport",
    "azuma_diagnostic",
]

Strategy = Union[Distribution, Sequence[Distribution]]


# ---------------------------------------------------------------------------
# single-step belief API


@dataclass(frozen=True)
class BeliefState:
    """Unnormalized log posterior over (type, model) hypotheses; shape (2, n_models)."""

    log_weights: np.ndarray

    @classmethod
    def from_prior(cls, framework: Framework) -> "BeliefState":
        return cls(np.log(framework.prior))

    @property
    def posterior(self) -> np.ndarray:
        w = self.log_weights
        return np.exp(w - logsumexp(w))

    @property
    def reputation(self) -> float:
        """Posterior mass on the commitment type."""
        return float(self.posterior[TYPE_COMMIT].sum())


def predictive(state: BeliefState, framework: Framework,
               conjectured_alpha: Distribution) -> Distribution:
    """Posterior-mixture forecast of the next signal.

    Commitment hypotheses predict through their commitment slices; normal
    hypotheses predict through the conjectured normal-type mixed action.
    """
    post = state.posterior
    q = (post[TYPE_COMMIT] @ framework.commitment_slices
         + post[TYPE_NORMAL] @ framework.normal_mix(conjectured_alpha))
    return Distribution(framework.signals, q)


def bayes_step(state: BeliefState, framework: Framework, signal: int | str,
               conjectured_alpha: Distribution) -> BeliefState:
    """One-signal update. Works entirely on log weights; never renormalizes."""
    y = signal if isinstance(signal, int) else framework.signals.index(signal)
    if not 0 <= y < len(framework.signals):
        raise ValueError(f"bayes_step: signal index {y} out of range")
    inc = np.stack([
        np.log(framework.normal_mix(conjectured_alpha)[:, y]),
        np.log(framework.commitment_slices[:, y]),
    ])
    return BeliefState(state.log_weights + inc)


def slp_action(game: StageGame, q: Distribution) -> str:
    """Short-run reply to a forecast; deterministic first-in-order tie-break."""
    return br2(game, q)[0]


# ---------------------------------------------------------------------------
# batch simulation


@dataclass(frozen=True)
class SimulationConfig:
    """What to simulate and for how long.

    ``normal_strategy`` is either one Distribution (stationary play) or a
    per-period sequence; ``slp_conjecture`` defaults to the same thing, i.e.
    the short-run players conjecture the normal type's actual strategy. When
    ``horizon`` is None it is derived from delta so the discarded discounted
    tail is below ``truncation_tol`` (or taken from the script length).
    ``alpha_star_target`` switches on per-period recording of
    KL(rho_target || forecast), the raw material of the survival certificate.
    """

    delta: float
    master_seed: int | None = None
    runs: int = 100
    true_type: str = "normal"
    normal_strategy: Strategy | None = None
    slp_conjecture: Strategy | None = None
    horizon: int | None = None
    truncation_tol: float = 1e-4
    alpha_star_target: Distribution | None = None


@dataclass(frozen=True)
class BatchResult:
    """Per-run, per-period panel from one batch of simulated paths.

    ``mu`` has one extra column: entry [r, t] is run r's start-of-period-t
    reputation, and [r, T] is the final posterior after the last update.
    """

    mu: np.ndarray        # (runs, T+1)
    ell: np.ndarray       # (runs, T) short-run optimality loss
    u_flow: np.ndarray    # (runs, T) realized long-run flow payoff
    tv_gap: np.ndarray    # (runs, T) TV(true mix, forecast)
    kl_term: np.ndarray | None  # (runs, T) KL(rho_target, forecast), if targeted
    actions: np.ndarray   # (runs, T) realized long-run action indices
    signals: np.ndarray   # (runs, T) realized signal indices
    run_indices: np.ndarray
    config: SimulationConfig
    horizon: int
    truncation: float
    target_signal_dist: np.ndarray | None

    @property
    def runs(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class TrajectoryRecord:
    """One run's path, 1-D arrays, plus enough metadata to audit it."""

    mu: np.ndarray
    ell: np.ndarray
    u_flow: np.ndarray
    tv_gap: np.ndarray
    kl_term: np.ndarray | None
    actions: np.ndarray
    signals: np.ndarray
    run_index: int
    config: SimulationConfig
    horizon: int
    truncation: float
    target_signal_dist: np.ndarray | None

    @classmethod
    def from_batch(cls, batch: BatchResult, row: int) -> "TrajectoryRecord":
        return cls(
            mu=batch.mu[row], ell=batch.ell[row], u_flow=batch.u_flow[row],
            tv_gap=batch.tv_gap[row],
            kl_term=None if batch.kl_term is None else batch.kl_term[row],
            actions=batch.actions[row], signals=batch.signals[row],
            run_index=int(batch.run_indices[row]), config=batch.config,
            horizon=batch.horizon, truncation=batch.truncation,
            target_signal_dist=batch.target_signal_dist,
        )

    @property
    def mu_final(self) -> float:
        return float(self.mu[-1])

    def to_csv(self, path) -> None:
        """Write the path, one period per row. Floats use repr so a re-read
        round-trips exactly and reruns diff byte-identically."""
        cols = ["t", "action", "signal", "mu", "ell", "u_flow", "tv_gap", "kl_term"]
        with open(path, "w", newline="") as fh:
            fh.write(",".join(cols) + "\n")
            for t in range(self.horizon):
                row = [
                    str(t), str(int(self.actions[t])), str(int(self.signals[t])),
                    repr(float(self.mu[t])), repr(float(self.ell[t])),
                    repr(float(self.u_flow[t])), repr(float(self.tv_gap[t])),
                    "" if self.kl_term is None else repr(float(self.kl_term[t])),
                ]
                fh.write(",".join(row) + "\n")


def _schedule(strategy: Strategy, actions: tuple[str, ...], horizon: int,
              what: str) -> tuple[Distribution | None, np.ndarray]:
    """Normalize a strategy spec to (stationary_or_None, (T, nA) matrix)."""
    if isinstance(strategy, Distribution):
        if strategy.labels != actions:
            raise ValueError(f"{what}: labels {strategy.labels} != actions {actions}")
        return strategy, np.tile(strategy.weights, (horizon, 1))
    entries = list(strategy)
    if len(entries) < horizon:
        raise ValueError(
            f"{what}: script has {len(entries)} periods but the horizon is {horizon}")
    mat = np.empty((horizon, len(actions)))
    for t, d in enumerate(entries[:horizon]):
        if not isinstance(d, Distribution) or d.labels != actions:
            raise ValueError(f"{what}: period {t} entry is not a Distribution over {actions}")
        mat[t] = d.weights
    return None, mat


def _script_length(strategy: Strategy | None) -> int | None:
    if strategy is None or isinstance(strategy, Distribution):
        return None
    return len(list(strategy))


def _resolve_horizon(game: StageGame, config: SimulationConfig) -> tuple[int, float]:
    """Pick the horizon and report the discarded discounted-average tail."""
    u_min, u_max = game.u_range
    scale = max(1.0, abs(u_min), abs(u_max))
    if config.horizon is not None:
        if config.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {config.horizon}")
        T = int(config.horizon)
    else:
        n_script = _script_length(config.normal_strategy)
        if n_script is not None:
            T = n_script
        else:
            if not config.truncation_tol > 0:
                raise ValueError("truncation_tol must be positive")
            T = max(1, math.ceil(math.log(config.truncation_tol / scale)
                                 / math.log(config.delta)))
            if T > 5_000_000:
                raise ValueError(
                    f"derived horizon {T} is impractical; set horizon explicitly")
            assert scale * config.delta ** T <= config.truncation_tol * (1 + 1e-12)
    return T, float(scale * config.delta ** T)


def _uniforms(master_seed: int, run_indices: np.ndarray, horizon: int) -> np.ndarray:
    """(runs, T, 2) uniforms, one independent Philox substream per run index."""
    if not 0 <= master_seed < 2**63:
        raise ValueError("master_seed must lie in [0, 2**63)")
    out = np.empty((len(run_indices), horizon, 2))
    for i, run in enumerate(run_indices):
        gen = np.random.Generator(np.random.Philox(key=(master_seed << 64) | int(run)))
        out[i] = gen.random((horizon, 2))
    return out


def _simulate(game: StageGame, framework: Framework, config: SimulationConfig,
              run_indices: np.ndarray) -> BatchResult:
    if framework.actions != game.actions_long or framework.signals != game.signals:
        raise ValueError("framework and game disagree on action or signal labels")
    if config.true_type not in ("normal", "commitment"):
        raise ValueError(f"true_type must be 'normal' or 'commitment', got {config.true_type!r}")
    if not 0.0 < config.delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {config.delta}")
    if config.normal_strategy is None:
        raise ValueError("normal_strategy is required (it also seeds the default conjecture)")
    if config.master_seed is None:
        raise ValueError("master_seed is required; draw one and fix it for reproducibility")
    if framework.normal_correctly_specified:
        framework.assert_normal_consistent(game.rho)

    T, truncation = _resolve_horizon(game, config)
    R = len(run_indices)
    if R < 1:
        raise ValueError("need at least one run")
    if R * T > 64_000_000:
        raise ValueError(f"runs*horizon = {R * T} too large; lower runs or set horizon")

    normal_stat, normal_mat = _schedule(config.normal_strategy, game.actions_long, T,
                                        "normal_strategy")
    conj_spec = config.slp_conjecture if config.slp_conjecture is not None \
        else config.normal_strategy
    conj_stat, conj_mat = _schedule(conj_spec, game.actions_long, T, "slp_conjecture")

    if config.true_type == "commitment":
        alpha_mat = np.tile(framework.commitment_action.weights, (T, 1))
    else:
        alpha_mat = normal_mat

    R_mat = game.rho.matrix
    nA, nY = R_mat.shape
    Fhat = framework.commitment_slices
    log_fhat = np.log(Fhat)
    if conj_stat is not None:
        F0_const = framework.normal_mix(conj_stat)
        logF0_const = np.log(F0_const)

    p_star = None
    p_star_ent = 0.0
    if config.alpha_star_target is not None:
        if config.alpha_star_target.labels != game.actions_long:
            raise ValueError("alpha_star_target labels do not match the game")
        p_star = config.alpha_star_target.weights @ R_mat
        p_star_ent = float(p_star @ np.log(p_star))  # rho rows are strictly positive

    uniforms = _uniforms(config.master_seed, run_indices, T)
    log_w = np.tile(np.log(framework.prior)[None, :, :], (R, 1, 1))

    mu = np.empty((R, T + 1))
    ell = np.empty((R, T))
    u_flow = np.empty((R, T))
    tv_gap = np.empty((R, T))
    kl_term = np.empty((R, T)) if p_star is not None else None
    actions = np.empty((R, T), dtype=np.int64)
    signals = np.empty((R, T), dtype=np.int64)

    for t in range(T):
        if conj_stat is not None:
            F0, logF0 = F0_const, logF0_const
        else:
            F0 = np.einsum("a,may->my", conj_mat[t], framework.normal_kernels)
            logF0 = np.log(F0)

        norm = logsumexp(log_w.reshape(R, -1), axis=1)
        post = np.exp(log_w - norm[:, None, None])
        mu[:, t] = post[:, TYPE_COMMIT, :].sum(axis=1)
        q = post[:, TYPE_COMMIT, :] @ Fhat + post[:, TYPE_NORMAL, :] @ F0

        vals = q @ game.v_tilde.T
        top = vals.max(axis=1)
        b_idx = np.argmax(vals >= (top - BR_TIE_TOL)[:, None], axis=1)

        aw = alpha_mat[t]
        a_idx = np.searchsorted(np.cumsum(aw), uniforms[:, t, 0], side="right")
        np.clip(a_idx, 0, nA - 1, out=a_idx)
        ycum = np.cumsum(R_mat[a_idx], axis=1)
        y_idx = (uniforms[:, t, 1][:, None] >= ycum).sum(axis=1)
        np.clip(y_idx, 0, nY - 1, out=y_idx)

        row_v = aw @ game.v
        loss_b = row_v.max() - row_v
        ell[:, t] = loss_b[b_idx]
        u_flow[:, t] = game.u[a_idx, b_idx]
        rho_alpha = aw @ R_mat
        logq = np.log(q)
        tv_gap[:, t] = 0.5 * np.abs(q - rho_alpha[None, :]).sum(axis=1)
        if p_star is not None:
            kl_term[:, t] = p_star_ent - logq @ p_star

        log_w[:, TYPE_COMMIT, :] += log_fhat[:, y_idx].T
        log_w[:, TYPE_NORMAL, :] += logF0[:, y_idx].T
        actions[:, t] = a_idx
        signals[:, t] = y_idx

    norm = logsumexp(log_w.reshape(R, -1), axis=1)
    mu[:, T] = np.exp(log_w - norm[:, None, None])[:, TYPE_COMMIT, :].sum(axis=1)

    return BatchResult(
        mu=mu, ell=ell, u_flow=u_flow, tv_gap=tv_gap, kl_term=kl_term,
        actions=actions, signals=signals,
        run_indices=np.asarray(run_indices, dtype=np.int64),
        config=config, horizon=T, truncation=truncation,
        target_signal_dist=p_star,
    )


def simulate_batch(game: StageGame, framework: Framework,
                   config: SimulationConfig) -> BatchResult:
    if config.runs < 1:
        raise ValueError("config.runs must be >= 1")
    return _simulate(game, framework, config, np.arange(config.runs))


def simulate_run(game: StageGame, framework: Framework, config: SimulationConfig,
                 run_index: int = 0) -> TrajectoryRecord:
    """Simulate exactly one run; identical to that row of the full batch."""
    batch = _simulate(game, framework, config, np.array([run_index]))
    return TrajectoryRecord.from_batch(batch, 0)


# ---------------------------------------------------------------------------
# aggregates


@dataclass(frozen=True)
class DecayFit:
    slope: float
    window: tuple[int, int]


def decay_rate_fit(curve: np.ndarray, *, window_frac: float = 0.5) -> DecayFit:
    """Least-squares slope of ln(curve) over the trailing window.

    Entries that have underflowed to zero cannot be logged; the window shrinks
    to its leading positive stretch with a warning rather than failing, since
    a reputation that underflows is decaying about as fast as floats can say.
    """
    c = np.asarray(curve, dtype=float)
    if c.ndim != 1 or c.size < 4:
        raise ValueError("decay_rate_fit: need a 1-D curve with at least 4 points")
    start = c.size - max(2, int(round(c.size * window_frac)))
    window = c[start:]
    pos = window > 0.0
    if not pos.all():
        window = window[:int(np.argmax(~pos))]
        warnings.warn(
            f"decay_rate_fit: window shrunk to {window.size} points before underflow",
            RuntimeWarning, stacklevel=2)
    if window.size < 2:
        raise ValueError("decay_rate_fit: fewer than 2 positive points in the window")
    t = np.arange(start, start + window.size)
    slope = float(np.polyfit(t, np.log(window), 1)[0])
    return DecayFit(slope=slope, window=(start, start + window.size))


@dataclass(frozen=True)
class MonteCarloSummary:
    disc_avg_mu: float
    disc_avg_mu_se: float
    disc_avg_ell: float
    disc_avg_ell_se: float
    payoff: float
    payoff_se: float
    mean_mu_curve: np.ndarray
    decay: DecayFit | None
    horizon: int
    truncation: float
    runs: int
    delta: float
    master_seed: int

    def to_dict(self) -> dict:
        return {
            "disc_avg_mu": self.disc_avg_mu, "disc_avg_mu_se": self.disc_avg_mu_se,
            "disc_avg_ell": self.disc_avg_ell, "disc_avg_ell_se": self.disc_avg_ell_se,
            "payoff": self.payoff, "payoff_se": self.payoff_se,
            "decay_slope": None if self.decay is None else self.decay.slope,
            "decay_window": None if self.decay is None else list(self.decay.window),
            "horizon": self.horizon, "truncation": self.truncation,
            "runs": self.runs, "delta": self.delta, "master_seed": self.master_seed,
            "mu_final_mean": float(self.mean_mu_curve[-1]),
        }


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    m = float(x.mean())
    se = 0.0 if x.size == 1 else float(x.std(ddof=1) / math.sqrt(x.size))
    return m, se


def monte_carlo(game: StageGame, framework: Framework, config: SimulationConfig
                ) -> tuple[MonteCarloSummary, BatchResult]:
    batch = simulate_batch(game, framework, config)
    T, d = batch.horizon, config.delta
    w = (1.0 - d) * d ** np.arange(T)
    mu_runs = batch.mu[:, :T] @ w
    ell_runs = batch.ell @ w
    pay_runs = batch.u_flow @ w
    mu_m, mu_se = _mean_se(mu_runs)
    el_m, el_se = _mean_se(ell_runs)
    pa_m, pa_se = _mean_se(pay_runs)
    curve = batch.mu.mean(axis=0)
    try:
        decay = decay_rate_fit(curve)
    except ValueError:
        decay = None
    summary = MonteCarloSummary(
        disc_avg_mu=mu_m, disc_avg_mu_se=mu_se,
        disc_avg_ell=el_m, disc_avg_ell_se=el_se,
        payoff=pa_m, payoff_se=pa_se,
        mean_mu_curve=curve, decay=decay,
        horizon=T, truncation=batch.truncation,
        runs=batch.runs, delta=d, master_seed=config.master_seed,
    )
    return summary, batch


# ---------------------------------------------------------------------------
# certificates and tail diagnostics


@dataclass(frozen=True)
class CertificateReport:
    """Per-run discounted-KL budget check for persistent target play.

    lhs is each run's (1-delta)-discounted sum of KL(rho_target || forecast);
    rhs is the prior-mass budget -(1-delta) ln prior(commitment, model) plus
    the irreducible epsilon = KL(rho_target || commitment slice of model).
    """

    lhs: np.ndarray
    rhs: float
    epsilon: float
    prior_mass: float
    holds_all: bool
    holds_fraction: float
    model: str


def _effective_strategy(config: SimulationConfig, framework: Framework) -> Strategy:
    if config.true_type == "commitment":
        return framework.commitment_action
    return config.normal_strategy


def discounted_kl_certificate(batch: BatchResult, framework: Framework,
                              model: int | str, *, tol: float = 1e-9
                              ) -> CertificateReport:
    cfg = batch.config
    if batch.kl_term is None or cfg.alpha_star_target is None:
        raise ValueError("certificate needs a batch recorded with alpha_star_target set")
    actual = _effective_strategy(cfg, framework)
    if not isinstance(actual, Distribution) or not np.allclose(
            actual.weights, cfg.alpha_star_target.weights, atol=1e-12):
        raise ValueError(
            "certificate applies to persistent target play; the simulated strategy "
            "is not stationary at alpha_star_target")
    m = framework.model_index(model)
    prior_mass = float(framework.prior[TYPE_COMMIT, m])
    target = Distribution(framework.signals, batch.target_signal_dist)
    eps = kl(target, framework.commitment_slice_dist(m))
    d = cfg.delta
    T = batch.horizon
    w = (1.0 - d) * d ** np.arange(T)
    lhs = batch.kl_term @ w
    rhs = -(1.0 - d) * math.log(prior_mass) + eps
    ok = lhs <= rhs + tol
    return CertificateReport(
        lhs=lhs, rhs=float(rhs), epsilon=float(eps), prior_mass=prior_mass,
        holds_all=bool(ok.all()), holds_fraction=float(ok.mean()),
        model=framework.models[m],
    )


def certificate_kl_ceiling(batch: BatchResult, framework: Framework) -> float:
    """Largest KL(rho_target || q) any forecast q in the batch could attain.

    Forecasts are posterior mixtures over a fixed endpoint set (the commitment
    slices and the conjectured normal mixes), and KL is convex in its second
    argument, so the endpoint maximum is a ceiling on every recorded kl term.
    When rhs >= this ceiling the certificate cannot fail on any path.
    """
    cfg = batch.config
    if batch.target_signal_dist is None:
        raise ValueError("batch was not recorded with alpha_star_target set")
    target = Distribution(framework.signals, batch.target_signal_dist)
    conj = cfg.slp_conjecture if cfg.slp_conjecture is not None else cfg.normal_strategy
    if isinstance(conj, Distribution):
        conj_list = [conj]
    else:
        conj_list = list(dict.fromkeys(conj))  # dedupe, keep order
    endpoints = [framework.commitment_slice_dist(m) for m in range(framework.n_models)]
    for alpha in conj_list:
        mix = framework.normal_mix(alpha)
        endpoints.extend(Distribution(framework.signals, mix[m])
                         for m in range(framework.n_models))
    return max(kl(target, e) for e in endpoints)


@dataclass(frozen=True)
class AzumaRow:
    t: int
    empirical_tail: float
    bound: float


@dataclass(frozen=True)
class AzumaReport:
    zeta: float
    increment_bound: float  # K: largest |log-likelihood-ratio| any signal can move
    rate: float             # c in the exp(-c t) tail
    rows: tuple[AzumaRow, ...]

    @property
    def holds(self) -> bool:
        return all(r.empirical_tail <= r.bound + 1e-12 for r in self.rows)


def azuma_diagnostic(batch: BatchResult, game: StageGame, framework: Framework,
                     zeta: float, checkpoints: Sequence[int] | None = None
                     ) -> AzumaReport:
    """Compare empirical slow-collapse tails with the exp(-zeta^2 t / 32 K^2) bound.

    For every (commitment model, normal model) pair the running log-likelihood
    ratio S_t drifts down at rate at least zeta whenever zeta is at most the
    separation value; the bound controls P(S_t >= -zeta t / 2). Empirical tails
    are maximized over pairs, the bound uses the worst-case K over pairs.
    """
    cfg = batch.config
    rep = separation_value(framework, game.rho)
    if not rep.separating:
        raise ValueError("azuma_diagnostic requires a separating framework")
    if not 0.0 < zeta <= rep.value + 1e-12:
        raise ValueError(f"zeta must lie in (0, {rep.value:.6g}], got {zeta}")
    if cfg.true_type != "normal":
        raise ValueError("drift analysis applies to paths generated by the normal type")
    if not framework.normal_correctly_specified:
        raise ValueError("drift analysis assumes correctly specified normal hypotheses")
    conj = cfg.slp_conjecture if cfg.slp_conjecture is not None else cfg.normal_strategy
    if not (isinstance(conj, Distribution) and isinstance(cfg.normal_strategy, Distribution)
            and np.allclose(conj.weights, cfg.normal_strategy.weights, atol=1e-12)):
        raise ValueError("drift analysis needs a stationary, correctly conjectured strategy")

    T = batch.horizon
    if checkpoints is None:
        checkpoints = np.unique(np.geomspace(min(8, T), T, num=8).astype(int))
    ts = sorted({int(t) for t in checkpoints if 1 <= int(t) <= T})
    if not ts:
        raise ValueError("no valid checkpoints inside the horizon")

    log_fhat = np.log(framework.commitment_slices)           # (nM, nY)
    logF0 = np.log(framework.normal_mix(conj))               # (nM, nY)
    log_f0_kernels = np.log(framework.normal_kernels)        # (nM, nA, nY)

    k_max = 0.0
    emp = np.zeros(len(ts))
    for mc in range(framework.n_models):
        for mn in range(framework.n_models):
            diff = log_fhat[mc][None, None, :] - log_f0_kernels[mn][None, :, :]
            k_max = max(k_max, float(np.abs(diff).max()))
            inc = log_fhat[mc][batch.signals] - logF0[mn][batch.signals]
            s = np.cumsum(inc, axis=1)
            for j, t in enumerate(ts):
                frac = float((s[:, t - 1] >= -zeta * t / 2.0).mean())
                emp[j] = max(emp[j], frac)
    c = zeta ** 2 / (32.0 * k_max ** 2)
    rows = tuple(AzumaRow(t=t, empirical_tail=float(emp[j]), bound=float(math.exp(-c * t)))
                 for j, t in enumerate(ts))
    return AzumaReport(zeta=float(zeta), increment_bound=k_max, rate=float(c), rows=rows)
