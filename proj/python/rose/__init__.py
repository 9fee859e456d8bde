"""Robust GLR parsing with genetic-programming repair."""

from ._core import (
    Fitness,
    Parser,
    RoseError,
    Spec,
    StatModel,
    canonical,
    grade,
    repair,
    similarity,
    size,
    tokenize,
    train_mi,
)

__all__ = [
    "Fitness",
    "Parser",
    "RoseError",
    "Spec",
    "StatModel",
    "canonical",
    "grade",
    "repair",
    "similarity",
    "size",
    "tokenize",
    "train_mi",
]
