"""Permanental-process classification."""

import json

from ._permclass import (
    DegenerateError,
    Kernel,
    Model,
    ParseError,
    PermclassError,
    SizeLimitError,
    __version__,
    _cross_validate,
    chequerboard,
    cyclic_ratio_approx,
    cyclic_ratio_exact,
    cyp,
    fit,
    partition,
    per_alpha,
    ratio_approx,
    ratio_exact,
)


def cross_validate(x, labels, grid, folds=10, objective="error", seed=0, stratified=False):
    """Grid search by k-fold cross-validation.

    ``grid`` is a list of model-parameter dicts, e.g.
    ``{"kernel": {"family": "gaussian", "tau": 0.5}, "alphas": [1.0]}``.
    Returns the report as a dict; ``report["winner"]`` indexes ``report["candidates"]``.
    """
    text = _cross_validate(x, list(labels), json.dumps(grid), folds, objective, seed, stratified)
    return json.loads(text)

__all__ = [
    "DegenerateError",
    "Kernel",
    "Model",
    "ParseError",
    "PermclassError",
    "SizeLimitError",
    "__version__",
    "chequerboard",
    "cross_validate",
    "cyclic_ratio_approx",
    "cyclic_ratio_exact",
    "cyp",
    "fit",
    "partition",
    "per_alpha",
    "ratio_approx",
    "ratio_exact",
]
