"""Built-in grid specs, expanded HPO spaces, and reduction ladders.

The Electra and RoBERTa fine-tuning grids and their relaxed HPO spaces,
plus the space ladders used by the troubleshooting procedure
(Electra: S_full -> S_-wr -> S_min; RoBERTa: S_full -> S_-wr-hdo -> S_min).
"""
from __future__ import annotations

from typing import Dict, List

from .space import (
    ExpansionRule,
    GridSpec,
    LogUniform,
    SearchSpace,
    expand_grid_to_hpo,
    minimal_space,
    reduce_space,
)

# Tasks with 10-epoch grids for Electra; everything else runs 3 epochs.
ELECTRA_10_EPOCH_TASKS = ("RTE", "STS-B")


def electra_grid(task: str = "RTE") -> GridSpec:
    epochs = 10 if task in ELECTRA_10_EPOCH_TASKS else 3
    return GridSpec(
        entries={
            "learning_rate": (3e-5, 1e-4, 1.5e-4),
            "warmup_ratio": (0.1,),
            "attention_dropout": (0.1,),
            "hidden_dropout": (0.1,),
            "weight_decay": (0.0,),
            "batch_size": (32,),
            "epochs": (epochs,),
        },
        epochs=epochs,
    )


def electra_expansion_rules() -> Dict[str, ExpansionRule]:
    return {
        "learning_rate": ExpansionRule(kind="override", domain=LogUniform(2.99e-5, 1.51e-4)),
        "warmup_ratio": ExpansionRule(kind="linear", lo=0.0, hi=0.2),
        "attention_dropout": ExpansionRule(kind="linear", lo=0.0, hi=0.2),
        "hidden_dropout": ExpansionRule(kind="linear", lo=0.0, hi=0.2),
        "weight_decay": ExpansionRule(kind="linear", lo=0.0, hi=0.3),
        "batch_size": ExpansionRule(kind="categorical", values=(16, 32, 64)),
        "epochs": ExpansionRule(kind="fixed"),
    }


def electra_space(task: str = "RTE") -> SearchSpace:
    return expand_grid_to_hpo(electra_grid(task), electra_expansion_rules(), label="S_full")


def roberta_grid() -> GridSpec:
    return GridSpec(
        entries={
            "learning_rate": (1e-5, 2e-5, 3e-5),
            "warmup_ratio": (0.06,),
            "attention_dropout": (0.1,),
            "hidden_dropout": (0.1,),
            "weight_decay": (0.1,),
            "batch_size": (16, 32),
            "epochs": (10,),
        },
        epochs=10,
    )


def roberta_expansion_rules() -> Dict[str, ExpansionRule]:
    return {
        "learning_rate": ExpansionRule(kind="linear", lo=0.99e-5, hi=3.01e-5),
        "warmup_ratio": ExpansionRule(kind="linear", lo=0.0, hi=0.12),
        "attention_dropout": ExpansionRule(kind="linear", lo=0.0, hi=0.2),
        "hidden_dropout": ExpansionRule(kind="linear", lo=0.0, hi=0.2),
        "weight_decay": ExpansionRule(kind="linear", lo=0.0, hi=0.3),
        "batch_size": ExpansionRule(kind="categorical", values=(16, 32, 64)),
        "epochs": ExpansionRule(kind="fixed"),
    }


def roberta_space() -> SearchSpace:
    return expand_grid_to_hpo(roberta_grid(), roberta_expansion_rules(), label="S_full")


def electra_space_ladder(task: str = "RTE") -> List[SearchSpace]:
    """S_full -> S_-wr (warmup fixed to 0.1) -> S_min (learning rate only)."""
    grid = electra_grid(task)
    full = electra_space(task)
    swr = reduce_space(full, {"warmup_ratio": 0.1}, label="S_-wr")
    return [full, swr, minimal_space(full, grid)]


def roberta_space_ladder() -> List[SearchSpace]:
    """S_full -> S_-wr-hdo (warmup 0.06, hidden dropout 0.1) -> S_min."""
    grid = roberta_grid()
    full = roberta_space()
    swrhdo = reduce_space(
        full, {"warmup_ratio": 0.06, "hidden_dropout": 0.1}, label="S_-wr-hdo"
    )
    return [full, swrhdo, minimal_space(full, grid)]
