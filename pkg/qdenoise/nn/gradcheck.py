"""
Central finite-difference check of the autoencoder's backward pass.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

from .loss import composite_loss
from .model import Autoencoder

logger = logging.getLogger(__name__)


@dataclass
class GradCheckReport:
    """
    - max_rel_error: worst ``|analytic - numeric| / max(|analytic|, |numeric|, floor)``
    - worst: ``name[flat index]`` of that entry
    - checked: entries compared
    - skipped: entries where a ReLU mask or max-pool choice flipped within +-eps
    - skipped_entries: ``name[flat index]`` of each skipped entry
    """
    max_rel_error: float
    worst: Optional[str]
    checked: int
    skipped: int
    skipped_entries: List[str] = field(default_factory=list)


def finite_difference_check(
    model: Autoencoder,
    x: np.ndarray,
    y: np.ndarray,
    lam: float,
    eps: float = 1e-6,
    floor: float = 1e-5,
    names: Optional[Iterable[str]] = None,
) -> GradCheckReport:
    """Compares eval-mode backprop gradients of the composite loss against central differences."""
    params = model.params
    params.zero_grad()
    loss, dy = composite_loss(model.forward(x), y, lam)
    analytic = {name: g.copy() for name, g in model.backward(dy).items()}
    base_pattern = model.activation_pattern()

    worst_err, worst_name, checked = 0.0, None, 0
    skipped: List[str] = []
    for name in names if names is not None else list(params.tensors):
        data = params.tensors[name].data
        flat = data.reshape(-1)
        grad = analytic[name].reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            plus = composite_loss(model.forward(x), y, lam)[0]
            plus_pattern = model.activation_pattern()
            flat[i] = original - eps
            minus = composite_loss(model.forward(x), y, lam)[0]
            minus_pattern = model.activation_pattern()
            flat[i] = original
            if plus_pattern != base_pattern or minus_pattern != base_pattern:
                skipped.append(f"{name}[{i}]")
                continue
            numeric = (plus - minus) / (2.0 * eps)
            err = abs(grad[i] - numeric) / max(abs(grad[i]), abs(numeric), floor)
            checked += 1
            if err > worst_err:
                worst_err, worst_name = err, f"{name}[{i}]"
    if skipped:
        logger.debug("Skipped %d entries at activation kinks: %s", len(skipped), ", ".join(skipped))
    return GradCheckReport(worst_err, worst_name, checked, len(skipped), skipped)
