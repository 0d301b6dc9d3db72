"""Hyperparameter domains, search spaces, and grid-to-HPO expansion.

A SearchSpace maps hyperparameter names to domains. Grid specs hold the
finite recommended configurations; expansion relaxes them into continuous
HPO domains while guaranteeing every grid point stays a member. Reduction
fixes hyperparameters back to grid values to shrink the space.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

Scalar = Union[int, float, str]
TrialConfig = Dict[str, Scalar]

#: absolute tolerance for real-valued membership at interval endpoints
REAL_TOL = 1e-12


class SpaceError(ValueError):
    pass


class InvalidExpansionError(SpaceError):
    """An expansion rule excludes one of the grid values."""


class DomainViolationError(SpaceError):
    """A value lies outside the domain it is being fixed or checked against."""


class IncompleteConfigError(SpaceError):
    """A config does not assign every hyperparameter of the space."""


def _is_real(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise SpaceError(f"Uniform requires lo < hi, got ({self.lo}, {self.hi})")

    def contains(self, v) -> bool:
        return _is_real(v) and (self.lo - REAL_TOL) <= v <= (self.hi + REAL_TOL)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def as_dict(self):
        return {"kind": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class LogUniform:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo <= 0:
            raise SpaceError(f"LogUniform requires lo > 0, got {self.lo}")
        if not self.lo < self.hi:
            raise SpaceError(f"LogUniform requires lo < hi, got ({self.lo}, {self.hi})")

    def contains(self, v) -> bool:
        return _is_real(v) and (self.lo - REAL_TOL) <= v <= (self.hi + REAL_TOL)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def log_width(self) -> float:
        return math.log(self.hi) - math.log(self.lo)

    def as_dict(self):
        return {"kind": "loguniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Categorical:
    values: Tuple[Scalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(set(self.values)) != len(self.values):
            raise SpaceError(f"Categorical values must be distinct: {self.values}")
        if not self.values:
            raise SpaceError("Categorical requires at least one value")

    def contains(self, v) -> bool:
        return v in self.values

    def as_dict(self):
        return {"kind": "categorical", "values": list(self.values)}


@dataclass(frozen=True)
class Fixed:
    value: Scalar

    def contains(self, v) -> bool:
        if _is_real(v) and _is_real(self.value):
            return abs(v - self.value) <= REAL_TOL
        return v == self.value

    def as_dict(self):
        return {"kind": "fixed", "value": self.value}


Domain = Union[Uniform, LogUniform, Categorical, Fixed]

_DOMAIN_KINDS = {
    "uniform": lambda d: Uniform(float(d["lo"]), float(d["hi"])),
    "loguniform": lambda d: LogUniform(float(d["lo"]), float(d["hi"])),
    "categorical": lambda d: Categorical(tuple(d["values"])),
    "fixed": lambda d: Fixed(d["value"]),
}


def domain_from_dict(d: Mapping[str, Any]) -> Domain:
    try:
        kind = d["kind"]
    except (KeyError, TypeError):
        raise SpaceError(f"domain spec needs a 'kind' field: {d!r}")
    if kind not in _DOMAIN_KINDS:
        raise SpaceError(f"unknown domain kind {kind!r}")
    return _DOMAIN_KINDS[kind](d)


@dataclass(frozen=True)
class GridSpec:
    """Finite recommended values per hyperparameter, plus the epoch count."""

    entries: Mapping[str, Tuple[Scalar, ...]]
    epochs: int

    def __post_init__(self):
        object.__setattr__(
            self, "entries", {k: tuple(v) for k, v in self.entries.items()}
        )
        for name, values in self.entries.items():
            if not values:
                raise SpaceError(f"grid entry {name!r} is empty")

    def configs(self) -> Iterator[TrialConfig]:
        """Enumerate the cartesian product of all grid values."""
        names = list(self.entries)
        for combo in itertools.product(*(self.entries[n] for n in names)):
            yield dict(zip(names, combo))

    def n_configs(self) -> int:
        n = 1
        for values in self.entries.values():
            n *= len(values)
        return n

    def as_dict(self):
        return {"entries": {k: list(v) for k, v in self.entries.items()},
                "epochs": self.epochs}

    @classmethod
    def from_dict(cls, d) -> "GridSpec":
        return cls(entries={k: tuple(v) for k, v in d["entries"].items()},
                   epochs=int(d["epochs"]))


@dataclass(frozen=True)
class SearchSpace:
    """Named map of hyperparameter domains.

    ``grid_values`` carries the originating grid values per entry when the
    space came out of :func:`expand_grid_to_hpo`; reduction and mining use
    it to decide which entries can still shrink.
    """

    entries: Mapping[str, Domain]
    label: str = "S"
    grid_values: Optional[Mapping[str, Tuple[Scalar, ...]]] = None

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))
        if self.grid_values is not None:
            object.__setattr__(
                self, "grid_values",
                {k: tuple(v) for k, v in self.grid_values.items()},
            )

    @property
    def names(self) -> List[str]:
        return list(self.entries)

    def non_fixed_names(self) -> List[str]:
        return [n for n, d in self.entries.items() if not isinstance(d, Fixed)]

    def contains(self, config: TrialConfig) -> bool:
        missing = [n for n in self.entries if n not in config]
        if missing:
            raise IncompleteConfigError(
                f"config missing assignment(s) for {missing} (space {self.label})"
            )
        return all(dom.contains(config[n]) for n, dom in self.entries.items())

    def as_dict(self):
        d = {"label": self.label,
             "entries": {n: dom.as_dict() for n, dom in self.entries.items()}}
        if self.grid_values is not None:
            d["grid_values"] = {k: list(v) for k, v in self.grid_values.items()}
        return d

    @classmethod
    def from_dict(cls, d) -> "SearchSpace":
        gv = d.get("grid_values")
        return cls(
            entries={n: domain_from_dict(s) for n, s in d["entries"].items()},
            label=d.get("label", "S"),
            grid_values={k: tuple(v) for k, v in gv.items()} if gv else None,
        )


@dataclass(frozen=True)
class ExpansionRule:
    """How one grid entry becomes an HPO domain.

    kind: "log" (log-hull with given endpoints), "linear" (range),
    "categorical" (superset of values), "fixed" (keep the single grid
    value), or "override" (use an explicit domain verbatim).
    """

    kind: str
    lo: Optional[float] = None
    hi: Optional[float] = None
    values: Optional[Tuple[Scalar, ...]] = None
    domain: Optional[Domain] = None

    def build(self, name: str, grid_values: Sequence[Scalar]) -> Domain:
        if self.kind == "log":
            dom: Domain = LogUniform(float(self.lo), float(self.hi))
        elif self.kind == "linear":
            dom = Uniform(float(self.lo), float(self.hi))
        elif self.kind == "categorical":
            dom = Categorical(tuple(self.values))
        elif self.kind == "fixed":
            if len(grid_values) != 1:
                raise InvalidExpansionError(
                    f"{name}: fixed rule needs a single grid value, got {grid_values}"
                )
            dom = Fixed(grid_values[0])
        elif self.kind == "override":
            dom = self.domain
        else:
            raise SpaceError(f"unknown expansion rule kind {self.kind!r}")
        for v in grid_values:
            if not dom.contains(v):
                raise InvalidExpansionError(
                    f"{name}: expanded domain {dom} excludes grid value {v}"
                )
        return dom

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ExpansionRule":
        kind = d.get("rule", d.get("kind"))
        if kind == "override":
            return cls(kind="override", domain=domain_from_dict(d))
        return cls(kind=kind, lo=d.get("lo"), hi=d.get("hi"),
                   values=tuple(d["values"]) if "values" in d else None)


def expand_grid_to_hpo(
    grid: GridSpec,
    expansion_rules: Mapping[str, ExpansionRule],
    label: str = "S_full",
) -> SearchSpace:
    """Relax a grid spec into an HPO search space containing every grid point."""
    entries: Dict[str, Domain] = {}
    for name, values in grid.entries.items():
        rule = expansion_rules.get(name, ExpansionRule(kind="categorical", values=tuple(values)))
        entries[name] = rule.build(name, values)
    space = SearchSpace(entries=entries, label=label, grid_values=grid.entries)
    for config in grid.configs():
        if not space.contains(config):  # pragma: no cover - guarded by rule.build
            raise InvalidExpansionError(f"grid config {config} not in expanded space")
    return space


def reduce_space(
    space: SearchSpace,
    fixes: Mapping[str, Scalar],
    label: Optional[str] = None,
) -> SearchSpace:
    """Fix the named hyperparameters to the given values; everything else stays."""
    entries = dict(space.entries)
    for name, value in fixes.items():
        if name not in entries:
            raise SpaceError(f"cannot fix unknown hyperparameter {name!r}")
        if not entries[name].contains(value):
            raise DomainViolationError(
                f"{name}: value {value} outside domain {entries[name]}"
            )
        entries[name] = Fixed(value)
    if label is None:
        label = space.label if not fixes else space.label + "-" + "-".join(sorted(fixes))
    return SearchSpace(entries=entries, label=label, grid_values=space.grid_values)


def minimal_space(space: SearchSpace, grid: GridSpec, label: str = "S_min") -> SearchSpace:
    """Smallest space still covering the grid: single-valued grid entries get fixed."""
    entries = dict(space.entries)
    for name, values in grid.entries.items():
        if len(values) == 1:
            entries[name] = Fixed(values[0])
    return SearchSpace(entries=entries, label=label, grid_values=grid.entries)


def contains(space: SearchSpace, config: TrialConfig) -> bool:
    return space.contains(config)
