"""One-document JSON experiment configs.

A config either names a registry scenario or spells out the game and framework
explicitly; explicit blocks win when both are present. Model kernels are
nested as [model][type][action][signal] with type order (normal, commitment).
Everything numeric survives an emit/load cycle exactly: the json module prints
shortest-round-trip floats.

    {
      "scenario":   {"name": "product_choice", "params": {"p": 0.6, ...}},
      "game":       {"actions_long": [...], "actions_short": [...], "signals": [...],
                     "u": [[...]], "v_tilde": [[...]], "rho": [[...]]},
      "framework":  {"models": [...], "kernels": [...], "prior": [[...], [...]],
                     "commitment_action": [...], "normal_correctly_specified": true},
      "simulation": {"delta": 0.95, "runs": 100, "master_seed": 1, ...},
      "bounds":     {"grid": 0.001, "eta": 0.0}
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .beliefs import SimulationConfig
from .frameworks import TYPE_COMMIT, TYPE_NORMAL, Framework
from .game import Distribution, SignalStructure, StageGame
from .scenarios import SCENARIOS, build_scenario

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "game_to_dict",
    "game_from_dict",
    "framework_to_dict",
    "framework_from_dict",
    "simulation_to_dict",
    "simulation_from_dict",
    "load_config",
    "emit_scenario_document",
    "dump_document",
]


class ConfigError(ValueError):
    """Malformed or inconsistent configuration document."""


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"{where}: missing required field {key!r}")
    return d[key]


def game_to_dict(game: StageGame) -> dict:
    return {
        "actions_long": list(game.actions_long),
        "actions_short": list(game.actions_short),
        "signals": list(game.signals),
        "u": game.u.tolist(),
        "v_tilde": game.v_tilde.tolist(),
        "rho": game.rho.matrix.tolist(),
    }


def game_from_dict(d: dict) -> StageGame:
    try:
        rho = SignalStructure(tuple(_require(d, "actions_long", "game")),
                              tuple(_require(d, "signals", "game")),
                              np.asarray(_require(d, "rho", "game"), dtype=float))
        return StageGame(
            tuple(d["actions_long"]), tuple(_require(d, "actions_short", "game")),
            tuple(d["signals"]),
            np.asarray(_require(d, "u", "game"), dtype=float),
            np.asarray(_require(d, "v_tilde", "game"), dtype=float),
            rho,
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"game: {exc}") from exc


def framework_to_dict(fw: Framework) -> dict:
    kernels = np.stack([fw.normal_kernels, fw.commitment_kernels], axis=1)
    return {
        "models": list(fw.models),
        "kernels": kernels.tolist(),  # [model][type][action][signal]
        "prior": fw.prior.tolist(),
        "commitment_action": fw.commitment_action.weights.tolist(),
        "normal_correctly_specified": fw.normal_correctly_specified,
    }


def framework_from_dict(d: dict, actions: tuple[str, ...],
                        signals: tuple[str, ...]) -> Framework:
    try:
        kernels = np.asarray(_require(d, "kernels", "framework"), dtype=float)
        if kernels.ndim != 4 or kernels.shape[1] != 2:
            raise ConfigError(
                f"framework: kernels must be [model][type][action][signal], "
                f"got shape {kernels.shape}")
        return Framework(
            models=tuple(_require(d, "models", "framework")),
            actions=actions,
            signals=signals,
            normal_kernels=kernels[:, TYPE_NORMAL],
            commitment_kernels=kernels[:, TYPE_COMMIT],
            prior=np.asarray(_require(d, "prior", "framework"), dtype=float),
            commitment_action=Distribution(
                actions,
                np.asarray(_require(d, "commitment_action", "framework"), dtype=float)),
            normal_correctly_specified=bool(
                d.get("normal_correctly_specified", True)),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"framework: {exc}") from exc


def _strategy_to_json(s) -> list | None:
    if s is None:
        return None
    if isinstance(s, Distribution):
        return s.weights.tolist()
    return [d.weights.tolist() for d in s]


def _strategy_from_json(entry, actions: tuple[str, ...], what: str):
    if entry is None:
        return None
    if not isinstance(entry, list) or not entry:
        raise ConfigError(f"simulation.{what}: expected a weight list or list of lists")
    try:
        if isinstance(entry[0], list):
            return tuple(Distribution(actions, np.asarray(row, dtype=float))
                         for row in entry)
        return Distribution(actions, np.asarray(entry, dtype=float))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"simulation.{what}: {exc}") from exc


def simulation_to_dict(cfg: SimulationConfig) -> dict:
    out = {
        "delta": cfg.delta,
        "runs": cfg.runs,
        "master_seed": cfg.master_seed,
        "true_type": cfg.true_type,
        "normal_strategy": _strategy_to_json(cfg.normal_strategy),
        "horizon": cfg.horizon,
        "truncation_tol": cfg.truncation_tol,
    }
    if cfg.slp_conjecture is not None:
        out["slp_conjecture"] = _strategy_to_json(cfg.slp_conjecture)
    if cfg.alpha_star_target is not None:
        out["alpha_star_target"] = cfg.alpha_star_target.weights.tolist()
    return out


def simulation_from_dict(d: dict, actions: tuple[str, ...]) -> SimulationConfig:
    try:
        delta = float(_require(d, "delta", "simulation"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"simulation: {exc}") from exc
    seed = d.get("master_seed")
    target = d.get("alpha_star_target")
    return SimulationConfig(
        delta=delta,
        master_seed=None if seed is None else int(seed),
        runs=int(d.get("runs", 100)),
        true_type=str(d.get("true_type", "normal")),
        normal_strategy=_strategy_from_json(d.get("normal_strategy"), actions,
                                            "normal_strategy"),
        slp_conjecture=_strategy_from_json(d.get("slp_conjecture"), actions,
                                           "slp_conjecture"),
        horizon=None if d.get("horizon") is None else int(d["horizon"]),
        truncation_tol=float(d.get("truncation_tol", 1e-4)),
        alpha_star_target=None if target is None else Distribution(
            actions, np.asarray(target, dtype=float)),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    game: StageGame
    framework: Framework
    simulation: SimulationConfig | None
    bounds: dict
    document: dict


def load_config(source) -> ExperimentConfig:
    """Parse a config from a path, JSON text, or an already-decoded dict."""
    if isinstance(source, dict):
        doc = source
    else:
        text = source
        try:
            if hasattr(source, "read"):
                text = source.read()
            elif not str(source).lstrip().startswith("{"):
                with open(source) as fh:
                    text = fh.read()
            doc = json.loads(text)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")

    if "game" in doc and "framework" in doc:
        game = game_from_dict(doc["game"])
        framework = framework_from_dict(doc["framework"], game.actions_long,
                                        game.signals)
    elif "scenario" in doc:
        sc = doc["scenario"]
        name = _require(sc, "name", "scenario")
        try:
            game, framework = build_scenario(name, sc.get("params", {}))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"scenario: {exc}") from exc
    else:
        raise ConfigError(
            "config needs either a 'scenario' block or both 'game' and 'framework'")

    sim = None
    if "simulation" in doc:
        sim = simulation_from_dict(doc["simulation"], game.actions_long)
    bounds = doc.get("bounds", {})
    if not isinstance(bounds, dict):
        raise ConfigError("'bounds' must be an object")
    return ExperimentConfig(game=game, framework=framework, simulation=sim,
                            bounds=bounds, document=doc)


def emit_scenario_document(name: str, params: dict) -> dict:
    """Materialize a scenario into a fully explicit, reloadable document."""
    game, framework = build_scenario(name, params)
    sig = SCENARIOS[name][1]
    echoed = {}
    for key, default in sig:
        echoed[key] = float(params[key]) if key in params else default
    return {
        "scenario": {"name": name, "params": echoed},
        "game": game_to_dict(game),
        "framework": framework_to_dict(framework),
    }


def dump_document(doc: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
