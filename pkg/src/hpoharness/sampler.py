"""Configuration proposal: uniform random sampling and a TPE sampler.

The TPE sampler splits past observations into a "good" and a "bad" group,
fits per-dimension kernel density models over each, draws candidates from
the good model, and returns the candidate with the highest good/bad
density ratio. Pruned trials contribute to the bad group with their last
reported objective so aggressive pruning does not bias the good model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .space import Categorical, Fixed, LogUniform, SearchSpace, SpaceError, TrialConfig, Uniform


@dataclass(frozen=True)
class Observation:
    config: TrialConfig
    objective: float
    status: str = "completed"  # "completed" | "pruned"

    def __post_init__(self):
        if not math.isfinite(self.objective):
            raise ValueError(f"observation objective must be finite, got {self.objective}")
        if self.status not in ("completed", "pruned"):
            raise ValueError(f"unknown observation status {self.status!r}")


ObservationHistory = List[Observation]


@dataclass(frozen=True)
class TpeParams:
    gamma: float = 0.25
    n_startup: int = 5
    n_candidates: int = 24

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must be in (0, 1)")
        if self.n_startup < 1 or self.n_candidates < 1:
            raise ValueError("n_startup and n_candidates must be >= 1")


def random_sample(space: SearchSpace, rng: np.random.Generator) -> TrialConfig:
    """Sample uniformly per domain (uniform in log-value for LogUniform)."""
    if not space.entries:
        raise SpaceError("cannot sample from an empty space")
    config: TrialConfig = {}
    for name, dom in space.entries.items():
        if isinstance(dom, Fixed):
            config[name] = dom.value
        elif isinstance(dom, Uniform):
            config[name] = float(rng.uniform(dom.lo, dom.hi))
        elif isinstance(dom, LogUniform):
            config[name] = float(np.exp(rng.uniform(np.log(dom.lo), np.log(dom.hi))))
        elif isinstance(dom, Categorical):
            config[name] = dom.values[int(rng.integers(len(dom.values)))]
        else:  # pragma: no cover
            raise SpaceError(f"unsupported domain {dom}")
    return config


def _coord(dom, v: float) -> float:
    return math.log(v) if isinstance(dom, LogUniform) else float(v)


def _coord_bounds(dom) -> Tuple[float, float]:
    if isinstance(dom, LogUniform):
        return math.log(dom.lo), math.log(dom.hi)
    return dom.lo, dom.hi


class _NumericKde:
    """1-d Gaussian KDE mixed with a uniform prior over the domain."""

    def __init__(self, centers: Sequence[float], lo: float, hi: float):
        n = len(centers)
        self.lo, self.hi = lo, hi
        self.centers = np.asarray(centers, dtype=float)
        width = hi - lo
        # Scott-style bandwidth with a floor of 10% of the domain width; a
        # narrower floor freezes the search around its first good cluster.
        sd = float(np.std(self.centers)) if n > 1 else 0.0
        self.h = max(sd * n ** (-0.2) if n > 1 else 0.0, 0.1 * width)
        self.w_uniform = 1.0 / (n + 1)

    def pdf(self, u: float) -> float:
        base = self.w_uniform / (self.hi - self.lo)
        if len(self.centers) == 0:
            return base
        z = (u - self.centers) / self.h
        kern = np.exp(-0.5 * z * z) / (self.h * math.sqrt(2 * math.pi))
        return base + (1 - self.w_uniform) * float(np.mean(kern))

    def sample(self, rng: np.random.Generator) -> float:
        if len(self.centers) == 0 or rng.random() < self.w_uniform:
            return float(rng.uniform(self.lo, self.hi))
        c = self.centers[int(rng.integers(len(self.centers)))]
        u = float(rng.normal(c, self.h))
        return min(max(u, self.lo), self.hi)


class _CategoricalModel:
    """Add-one-smoothed frequency weights over the categorical values."""

    def __init__(self, observed: Sequence, values: Sequence):
        self.values = tuple(values)
        counts = {v: 1.0 for v in self.values}  # add-one smoothing
        for o in observed:
            counts[o] = counts.get(o, 1.0) + 1.0
        total = sum(counts[v] for v in self.values)
        self.weights = {v: counts[v] / total for v in self.values}

    def pdf(self, v) -> float:
        return self.weights[v]

    def sample(self, rng: np.random.Generator):
        p = np.array([self.weights[v] for v in self.values])
        return self.values[int(rng.choice(len(self.values), p=p))]


def _fit_models(group: List[Observation], space: SearchSpace):
    models = {}
    for name in space.non_fixed_names():
        dom = space.entries[name]
        vals = [o.config[name] for o in group]
        if isinstance(dom, Categorical):
            models[name] = _CategoricalModel(vals, dom.values)
        else:
            lo, hi = _coord_bounds(dom)
            models[name] = _NumericKde([_coord(dom, v) for v in vals], lo, hi)
    return models


def tpe_suggest(
    history: ObservationHistory,
    space: SearchSpace,
    params: TpeParams,
    rng: np.random.Generator,
) -> TrialConfig:
    """Propose a config maximizing the good/bad density ratio."""
    if not space.entries:
        raise SpaceError("cannot suggest over an empty space")
    completed = [o for o in history if o.status == "completed"]
    if len(completed) < params.n_startup:
        return random_sample(space, rng)

    n = len(history)
    n_good = math.ceil(params.gamma * n)
    ranked = sorted(completed, key=lambda o: -o.objective)
    good = ranked[:n_good]
    good_ids = set(id(o) for o in good)
    bad = [o for o in history if id(o) not in good_ids]

    good_models = _fit_models(good, space)
    bad_models = _fit_models(bad, space)

    names = space.non_fixed_names()
    best_config, best_score = None, -math.inf
    for _ in range(params.n_candidates):
        config: TrialConfig = {
            name: dom.value for name, dom in space.entries.items() if isinstance(dom, Fixed)
        }
        score = 0.0
        for name in names:
            dom = space.entries[name]
            drawn = good_models[name].sample(rng)
            if isinstance(dom, Categorical):
                config[name] = drawn
                l, g = good_models[name].pdf(drawn), bad_models[name].pdf(drawn)
            else:
                value = math.exp(drawn) if isinstance(dom, LogUniform) else drawn
                config[name] = float(value)
                l, g = good_models[name].pdf(drawn), bad_models[name].pdf(drawn)
            score += math.log(max(l, 1e-300)) - math.log(max(g, 1e-300))
        if score > best_score:
            best_config, best_score = config, score
    assert best_config is not None
    return best_config
