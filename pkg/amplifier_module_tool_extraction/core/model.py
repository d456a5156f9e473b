"""
Model inputs.

Market and agent constants for the extraction problem, the hyper-exponential
jump mixtures on each side, and the jump-size sampler.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..exceptions import (
    BadMixtureError,
    EmptyMixtureError,
    NonPositiveError,
    ValidationError,
)

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class JumpMix:
    """Hyper-exponential mixture: weights ω_k and strictly increasing rates β_k."""

    weights: tuple[float, ...] = ()
    rates: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "rates", tuple(float(b) for b in self.rates))

    @property
    def m(self) -> int:
        return len(self.rates)

    @property
    def is_empty(self) -> bool:
        return self.m == 0

    def mean(self) -> float:
        """E[Z] = Σ ω_k/β_k (0 for the empty mixture)."""
        return math.fsum(w / b for w, b in zip(self.weights, self.rates))

    def second_moment(self) -> float:
        """E[Z²] = Σ 2ω_k/β_k²."""
        return math.fsum(2.0 * w / (b * b) for w, b in zip(self.weights, self.rates))

    def cdf(self, z):
        z = np.asarray(z, dtype=float)
        tail = np.zeros_like(z)
        for w, b in zip(self.weights, self.rates):
            tail = tail + w * np.exp(-b * np.maximum(z, 0.0))
        return np.where(z < 0.0, 0.0, 1.0 - tail)

    def to_list(self) -> list[dict[str, float]]:
        return [{"w": w, "beta": b} for w, b in zip(self.weights, self.rates)]

    @classmethod
    def from_list(cls, items: list[dict[str, Any]] | None) -> "JumpMix":
        items = items or []
        try:
            weights = tuple(float(item["w"]) for item in items)
            rates = tuple(float(item["beta"]) for item in items)
        except (KeyError, TypeError, ValueError) as e:
            raise BadMixtureError(f"each component needs numeric 'w' and 'beta' ({e})")
        return cls(weights, rates)


@dataclass(frozen=True)
class ModelParams:
    """All constants of the model. Construct through validate() or from_dict()."""

    mu: float
    sigma: float
    rho: float
    alpha: float
    c: float
    lambda_n: float = 0.0
    lambda_p: float = 0.0
    mix_n: JumpMix = field(default_factory=JumpMix)
    mix_p: JumpMix = field(default_factory=JumpMix)

    @property
    def total_rate(self) -> float:
        """ρ + λn + λp, the killing rate of the generator."""
        return self.rho + self.lambda_n + self.lambda_p

    @property
    def m_n(self) -> int:
        return self.mix_n.m

    @property
    def m_p(self) -> int:
        return self.mix_p.m

    def replace(self, **changes) -> "ModelParams":
        """Return a revalidated copy with the given fields changed."""
        return validate(dataclasses.replace(self, **changes))

    def to_dict(self) -> dict[str, Any]:
        return {
            "mu": self.mu,
            "sigma": self.sigma,
            "rho": self.rho,
            "alpha": self.alpha,
            "c": self.c,
            "lambda_n": self.lambda_n,
            "lambda_p": self.lambda_p,
            "mix_n": self.mix_n.to_list(),
            "mix_p": self.mix_p.to_list(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModelParams":
        if not isinstance(data, dict):
            raise ValidationError("Model parameters must be a JSON object")
        missing = [key for key in ("mu", "sigma", "rho", "alpha", "c") if key not in data]
        if missing:
            raise ValidationError(f"Missing model parameters: {', '.join(missing)}")
        try:
            params = cls(
                mu=float(data["mu"]),
                sigma=float(data["sigma"]),
                rho=float(data["rho"]),
                alpha=float(data["alpha"]),
                c=float(data["c"]),
                lambda_n=float(data.get("lambda_n", 0.0)),
                lambda_p=float(data.get("lambda_p", 0.0)),
                mix_n=JumpMix.from_list(data.get("mix_n")),
                mix_p=JumpMix.from_list(data.get("mix_p")),
            )
        except (TypeError, ValueError) as e:
            raise ValidationError(f"Model parameters must be numeric: {e}")
        return validate(params)


def _validate_mix(mix: JumpMix, side: str, intensity: float) -> None:
    if len(mix.weights) != len(mix.rates):
        raise BadMixtureError(f"mix_{side} has {len(mix.weights)} weights but {len(mix.rates)} rates")
    if intensity == 0.0 and mix.m > 0:
        raise BadMixtureError(f"lambda_{side} is 0 but mix_{side} has {mix.m} components")
    if intensity > 0.0 and mix.m == 0:
        raise BadMixtureError(f"lambda_{side} is {intensity!r} but mix_{side} is empty")
    if mix.m == 0:
        return
    if any(not math.isfinite(w) or w <= 0.0 for w in mix.weights):
        raise BadMixtureError(f"mix_{side} weights must be positive, got {list(mix.weights)}")
    total = math.fsum(mix.weights)
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        raise BadMixtureError(f"mix_{side} weights sum to {total!r}, expected 1")
    if any(not math.isfinite(b) or b <= 0.0 for b in mix.rates):
        raise BadMixtureError(f"mix_{side} rates must be positive, got {list(mix.rates)}")
    if any(b1 >= b2 for b1, b2 in zip(mix.rates, mix.rates[1:])):
        raise BadMixtureError(f"mix_{side} rates must be strictly increasing, got {list(mix.rates)}")


def validate(params: ModelParams) -> ModelParams:
    """
    Check every model and mixture invariant.

    Returns:
        The same params object when valid

    Raises:
        NonPositiveError: σ, ρ, α or c not strictly positive, or a negative intensity
        BadMixtureError: weights/rates malformed or intensity/order mismatch
        ValidationError: non-finite inputs
    """
    for name in ("mu", "sigma", "rho", "alpha", "c", "lambda_n", "lambda_p"):
        value = getattr(params, name)
        if not math.isfinite(value):
            raise ValidationError(f"Parameter '{name}' must be finite, got {value!r}")
    for name in ("sigma", "rho", "alpha", "c"):
        value = getattr(params, name)
        if value <= 0.0:
            raise NonPositiveError(name, value)
    for name in ("lambda_n", "lambda_p"):
        value = getattr(params, name)
        if value < 0.0:
            raise NonPositiveError(name, value, strict=False)
    _validate_mix(params.mix_n, "n", params.lambda_n)
    _validate_mix(params.mix_p, "p", params.lambda_p)
    logger.debug(f"Validated params with m_n={params.m_n}, m_p={params.m_p}")
    return params


def sample_jump(mix: JumpMix, uniform_pair: tuple[float, float]) -> float:
    """
    Draw one jump size from explicit uniforms.

    u1 picks the component against the cumulative weights, u2 drives the
    exponential inversion −ln(u2)/β_k.
    """
    if mix.is_empty:
        raise EmptyMixtureError()
    u1, u2 = uniform_pair
    cumulative = np.cumsum(mix.weights)
    k = min(int(np.searchsorted(cumulative, u1, side="right")), mix.m - 1)
    return -math.log(u2) / mix.rates[k]


def sample_jumps(mix: JumpMix, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """Vectorized sample_jump over paired uniform arrays."""
    if mix.is_empty:
        raise EmptyMixtureError()
    cumulative = np.cumsum(mix.weights)
    k = np.minimum(np.searchsorted(cumulative, u1, side="right"), mix.m - 1)
    return -np.log(u2) / np.asarray(mix.rates)[k]
