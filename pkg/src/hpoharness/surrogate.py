"""Synthetic tasks with controllable validation/test divergence.

A surrogate task is a quadratic response surface over the search space's
normalized coordinates, scaled by a saturating learning curve and optional
noise. The test surface is the validation surface with its optimum
displaced, and the two noise channels can be correlated, which turns the
"validation and test come from different distributions" hypothesis into a
dial. Also hosts the Pearson correlation analysis used to compare top-k
trials under original and resplit settings.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np

from .space import Categorical, Fixed, LogUniform, SearchSpace, TrialConfig, Uniform


class SurrogateError(ValueError):
    pass


class UndefinedCorrelationError(SurrogateError):
    """Pearson correlation of a zero-variance sample."""


class InsufficientTrialsError(SurrogateError):
    pass


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    n: int


def pearson(x, y) -> CorrelationResult:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise SurrogateError("pearson needs two equal-length vectors of size >= 2")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise UndefinedCorrelationError("zero variance in at least one input")
    r = float(np.corrcoef(x, y)[0, 1])
    return CorrelationResult(r=r, n=len(x))


@dataclass(frozen=True)
class SurrogateSpec:
    """Parameters of one synthetic task.

    ``optimum`` and ``test_shift`` are keyed by hyperparameter name in the
    space's normalized [0, 1] coordinate (log coordinate for log-uniform
    domains). Hyperparameters without an entry are flat.
    """

    space: SearchSpace
    seed: int = 0
    base_metric: float = 86.0
    optimum: Mapping[str, float] = field(default_factory=dict)
    curvature: Mapping[str, float] = field(default_factory=dict)
    test_shift: Mapping[str, float] = field(default_factory=dict)
    noise_sd: float = 0.0
    val_test_correlation: float = 1.0
    curve_start: float = 0.3
    curve_rate: float = 0.15
    cost_base: float = 1.0
    cost_per_batch: float = 0.0
    epochs: int = 10
    checkpoints_per_epoch: int = 5

    def __post_init__(self):
        if self.noise_sd < 0:
            raise SurrogateError("noise_sd must be >= 0")
        if not -1.0 <= self.val_test_correlation <= 1.0:
            raise SurrogateError("val_test_correlation must be in [-1, 1]")
        if self.cost_base <= 0:
            raise SurrogateError("cost model must be strictly positive")
        object.__setattr__(self, "optimum", dict(self.optimum))
        object.__setattr__(self, "curvature", dict(self.curvature))
        object.__setattr__(self, "test_shift", dict(self.test_shift))

    @property
    def total_steps(self) -> int:
        return self.epochs * self.checkpoints_per_epoch

    def aligned_variant(self) -> "SurrogateSpec":
        """Same task with identical validation and test behaviour."""
        return replace(self, test_shift={}, val_test_correlation=1.0)

    def as_dict(self):
        return {
            "space": self.space.as_dict(),
            "seed": self.seed,
            "base_metric": self.base_metric,
            "optimum": dict(self.optimum),
            "curvature": dict(self.curvature),
            "test_shift": dict(self.test_shift),
            "noise_sd": self.noise_sd,
            "val_test_correlation": self.val_test_correlation,
            "curve_start": self.curve_start,
            "curve_rate": self.curve_rate,
            "cost_base": self.cost_base,
            "cost_per_batch": self.cost_per_batch,
            "epochs": self.epochs,
            "checkpoints_per_epoch": self.checkpoints_per_epoch,
        }

    @classmethod
    def from_dict(cls, d) -> "SurrogateSpec":
        d = dict(d)
        d["space"] = SearchSpace.from_dict(d["space"])
        return cls(**d)


def normalized_coord(space: SearchSpace, name: str, value) -> Optional[float]:
    """Map a hyperparameter value into [0, 1]; None for fixed dimensions."""
    dom = space.entries[name]
    if isinstance(dom, Fixed):
        return None
    if isinstance(dom, LogUniform):
        return (math.log(value) - math.log(dom.lo)) / (math.log(dom.hi) - math.log(dom.lo))
    if isinstance(dom, Uniform):
        return (value - dom.lo) / (dom.hi - dom.lo)
    if isinstance(dom, Categorical):
        vals = [v for v in dom.values if isinstance(v, (int, float))]
        lo, hi = min(vals), max(vals)
        return 0.5 if hi == lo else (value - lo) / (hi - lo)
    raise SurrogateError(f"unsupported domain {dom}")  # pragma: no cover


def _surface(spec: SurrogateSpec, config: TrialConfig, shift: Mapping[str, float]) -> float:
    total = spec.base_metric
    for name, curv in spec.curvature.items():
        if name not in config:
            continue
        z = normalized_coord(spec.space, name, config[name])
        if z is None:
            z = 0.5
        opt = spec.optimum.get(name, 0.5) + shift.get(name, 0.0)
        total -= curv * (z - opt) ** 2
    return total


def surface_val(spec: SurrogateSpec, config: TrialConfig) -> float:
    return _surface(spec, config, {})


def surface_test(spec: SurrogateSpec, config: TrialConfig) -> float:
    return _surface(spec, config, spec.test_shift)


def curve(spec: SurrogateSpec, step: int) -> float:
    return 1.0 - (1.0 - spec.curve_start) * math.exp(-spec.curve_rate * step)


def _noise_pair(spec: SurrogateSpec, config: TrialConfig, step: int) -> Tuple[float, float]:
    """Deterministic correlated (val, test) noise for one (config, step)."""
    if spec.noise_sd == 0:
        return 0.0, 0.0
    key = "|".join(
        [str(spec.seed), str(step)] + [f"{k}={config[k]!r}" for k in sorted(config)]
    )
    digest = hashlib.blake2b(key.encode(), digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "big"))
    z1, z2 = rng.standard_normal(2)
    rho = spec.val_test_correlation
    val_noise = spec.noise_sd * z1
    test_noise = spec.noise_sd * (rho * z1 + math.sqrt(max(0.0, 1 - rho * rho)) * z2)
    return float(val_noise), float(test_noise)


def metric_to_loss(val_metric: float) -> float:
    """Fixed affine map: smaller loss for larger metric (percent scale)."""
    return (100.0 - val_metric) / 25.0


def cost_seconds(spec: SurrogateSpec, config: TrialConfig) -> float:
    batch = config.get("batch_size", 0)
    if not isinstance(batch, (int, float)):
        batch = 0
    return spec.cost_base + spec.cost_per_batch * float(batch)


def evaluate(spec: SurrogateSpec, config: TrialConfig, step: int) -> Tuple[float, float, float]:
    """Validation metric, validation loss, and per-checkpoint cost at a step."""
    if step < 1:
        raise SurrogateError(f"step must be >= 1, got {step}")
    noise, _ = _noise_pair(spec, config, step)
    val = curve(spec, step) * surface_val(spec, config) + noise
    return val, metric_to_loss(val), cost_seconds(spec, config)


def test_at(spec: SurrogateSpec, config: TrialConfig, step: int) -> float:
    """Test metric at a (config, step): shifted surface, correlated noise."""
    if step < 1:
        raise SurrogateError(f"step must be >= 1, got {step}")
    _, noise = _noise_pair(spec, config, step)
    return curve(spec, step) * surface_test(spec, config) + noise


def resplit_experiment(
    spec: SurrogateSpec,
    tuner: Callable[[SurrogateSpec], List[Tuple[float, float]]],
    k: int,
) -> Tuple[CorrelationResult, CorrelationResult]:
    """Run the tuner on divergent and on identical val/test surfaces.

    The tuner returns (val, test) score pairs per trial; the correlation is
    computed over the top-k trials ranked by validation score in each
    setting.
    """
    if k < 2:
        raise SurrogateError("k must be >= 2")

    def top_k_corr(task_spec: SurrogateSpec) -> CorrelationResult:
        pairs = tuner(task_spec)
        if len(pairs) < k:
            raise InsufficientTrialsError(
                f"tuner returned {len(pairs)} trials, need at least {k}"
            )
        top = sorted(pairs, key=lambda p: -p[0])[:k]
        return pearson([p[0] for p in top], [p[1] for p in top])

    return top_k_corr(spec), top_k_corr(spec.aligned_variant())


def _electra_rte_space() -> SearchSpace:
    from .presets import electra_space

    return electra_space("RTE")


def preset(name: str, seed: int = 0) -> SurrogateSpec:
    """Named surrogate presets: aligned, planted-overfit, noisy-neutral."""
    space = _electra_rte_space()
    common = dict(space=space, seed=seed, epochs=10, checkpoints_per_epoch=5)
    if name == "aligned":
        return SurrogateSpec(
            optimum={"warmup_ratio": 0.2},
            curvature={"warmup_ratio": 2.0},
            noise_sd=0.0,
            **common,
        )
    if name == "planted-overfit":
        return SurrogateSpec(
            optimum={"warmup_ratio": 0.0},
            curvature={"warmup_ratio": 3.0},
            test_shift={"warmup_ratio": 0.5},
            noise_sd=0.0,
            **common,
        )
    if name == "noisy-neutral":
        return SurrogateSpec(
            optimum={"warmup_ratio": 0.5, "learning_rate": 0.5},
            curvature={"warmup_ratio": 1.0, "learning_rate": 1.0},
            noise_sd=0.3,
            val_test_correlation=0.5,
            **common,
        )
    raise SurrogateError(f"unknown surrogate preset {name!r}")


PRESET_NAMES = ("aligned", "planted-overfit", "noisy-neutral")
