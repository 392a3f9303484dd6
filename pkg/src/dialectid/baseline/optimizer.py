"""From-scratch AdamW: Adam moment estimates with decoupled weight decay.

One step, for each parameter array p with gradient g:

    t <- t + 1
    m <- beta1 * m + (1 - beta1) * g
    v <- beta2 * v + (1 - beta2) * g^2
    m_hat = m / (1 - beta1^t),  v_hat = v / (1 - beta2^t)
    p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * p)

The decay term is skipped for parameters listed in `skip_decay` (biases).
The step is pure: it returns fresh parameter and state values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Collection, Sequence

import numpy as np

from ..errors import ValidationError

if TYPE_CHECKING:
    from .training import TrainConfig


@dataclass(frozen=True)
class AdamWParams:
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_decay: float = 0.01

    def __post_init__(self):
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValidationError(f"betas must lie in [0, 1), got {self.beta1}, {self.beta2}")
        if self.epsilon <= 0.0:
            raise ValidationError(f"epsilon must be positive, got {self.epsilon}")
        if self.weight_decay < 0.0:
            raise ValidationError(f"weight_decay must be >= 0, got {self.weight_decay}")


@dataclass(frozen=True, eq=False)
class AdamWState:
    """First/second moment estimates (one array per parameter) and step count."""

    first_moment: tuple[np.ndarray, ...]
    second_moment: tuple[np.ndarray, ...]
    step_count: int = 0

    def __post_init__(self):
        if self.step_count < 0:
            raise ValidationError("step_count must be >= 0")
        if len(self.first_moment) != len(self.second_moment):
            raise ValidationError("moment lists must have equal length")

    @classmethod
    def initial(cls, params: Sequence[np.ndarray]) -> "AdamWState":
        return cls(
            first_moment=tuple(np.zeros_like(p) for p in params),
            second_moment=tuple(np.zeros_like(p) for p in params),
            step_count=0,
        )


def adamw_step(
    params: Sequence[np.ndarray],
    grads: Sequence[np.ndarray],
    state: AdamWState,
    config: "TrainConfig",
    skip_decay: Collection[int] = (),
) -> tuple[list[np.ndarray], AdamWState]:
    """Apply one AdamW update; `skip_decay` holds indices of parameter arrays
    (e.g. biases) exempt from weight decay."""
    if len(params) != len(grads) or len(params) != len(state.first_moment):
        raise ValidationError("params, grads, and state must have matching lengths")
    opt = config.optimizer
    t = state.step_count + 1
    bias1 = 1.0 - opt.beta1**t
    bias2 = 1.0 - opt.beta2**t

    new_params: list[np.ndarray] = []
    new_m: list[np.ndarray] = []
    new_v: list[np.ndarray] = []
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape or p.shape != state.first_moment[i].shape:
            raise ValidationError(f"shape mismatch for parameter {i}: {p.shape} vs {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ValidationError(f"non-finite gradient for parameter {i}")
        m = opt.beta1 * state.first_moment[i] + (1.0 - opt.beta1) * g
        v = opt.beta2 * state.second_moment[i] + (1.0 - opt.beta2) * g**2
        update = (m / bias1) / (np.sqrt(v / bias2) + opt.epsilon)
        if i not in skip_decay:
            update = update + opt.weight_decay * p
        new_params.append(p - config.learning_rate * update)
        new_m.append(m)
        new_v.append(v)
    return new_params, AdamWState(
        first_moment=tuple(new_m), second_moment=tuple(new_v), step_count=t
    )
