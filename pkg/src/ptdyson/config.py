"""Run configuration: a JSON document validated with pydantic.

Complex constants are written as ``{"re": x, "im": y}`` (a bare number is
read as real). Validation errors carry dotted field paths such as
``model.omega``.
"""

from __future__ import annotations

import hashlib
import json
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .model import Constant, ModelParams, Regime, Sinusoidal, Tabulated, classify_regime

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Schema or consistency violation; ``errors`` lists (path, message)."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        super().__init__("; ".join(f"{p}: {m}" if p else m for p, m in errors))


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ComplexValue(_Strict):
    re: float
    im: float = 0.0

    @model_validator(mode="before")
    @classmethod
    def _from_number(cls, data):
        if isinstance(data, (int, float)) and not isinstance(data, bool):
            return {"re": float(data), "im": 0.0}
        return data

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


class SinusoidalKappa(_Strict):
    kind: Literal["sinusoidal"]
    amplitude: float = 1.0
    period_scale: float = 5.0

    @field_validator("period_scale")
    @classmethod
    def _nonzero(cls, v):
        if v == 0:
            raise ValueError("must be nonzero")
        return v


class ConstantKappa(_Strict):
    kind: Literal["constant"]
    value: float


class TabulatedKappa(_Strict):
    kind: Literal["tabulated"]
    times: list[float]
    values: list[float]

    @model_validator(mode="after")
    def _grid(self):
        if len(self.times) != len(self.values) or len(self.times) < 4:
            raise ValueError("times and values must have equal length >= 4")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if not self.times[0] <= 0.0 <= self.times[-1]:
            raise ValueError("times must cover t = 0")
        return self


KappaSpec = Annotated[Union[SinusoidalKappa, ConstantKappa, TabulatedKappa], Field(discriminator="kind")]


class ModelSpec(_Strict):
    omega: float
    alpha: float = Field(ge=0.0)
    c1: ComplexValue | None = None
    c2: ComplexValue | None = None
    A: float | None = None
    B: float | None = None
    branch: Literal[1, -1] = 1
    kappa: KappaSpec = Field(default_factory=lambda: SinusoidalKappa(kind="sinusoidal"))

    @model_validator(mode="after")
    def _active_pair(self):
        if classify_regime(self.alpha) is Regime.EXCEPTIONAL:
            if self.c1 is not None or self.c2 is not None:
                raise ValueError("alpha = 1 takes constants A and B, not c1/c2")
            if self.A is None or self.B is None:
                raise ValueError("alpha = 1 requires constants A and B")
        else:
            if self.A is not None or self.B is not None:
                raise ValueError("constants A and B are only valid at alpha = 1")
            if self.c1 is None or self.c2 is None:
                raise ValueError("alpha != 1 requires constants c1 and c2")
        return self

    def to_params(self) -> ModelParams:
        k = self.kappa
        if isinstance(k, SinusoidalKappa):
            profile = Sinusoidal(k.amplitude, k.period_scale)
        elif isinstance(k, ConstantKappa):
            profile = Constant(k.value)
        else:
            profile = Tabulated(tuple(k.times), tuple(k.values))
        return ModelParams(
            omega=self.omega,
            alpha=self.alpha,
            profile=profile,
            c1=None if self.c1 is None else self.c1.to_complex(),
            c2=None if self.c2 is None else self.c2.to_complex(),
            A=self.A,
            B=self.B,
            branch=self.branch,
        )


class GridSpec(_Strict):
    t0: float = 0.0
    t1: float = 60.0
    samples: int = Field(default=6001, ge=2)

    @model_validator(mode="after")
    def _order(self):
        if not self.t1 > self.t0:
            raise ValueError("t1 must exceed t0")
        return self


class Tolerances(_Strict):
    dyson: float = Field(1e-6, gt=0)
    quasi_hermiticity: float = Field(1e-6, gt=0)
    ep: float = Field(1e-5, gt=0)
    chi_equation: float = Field(1e-5, gt=0)
    coupled_ode: float = Field(1e-6, gt=0)
    schrodinger: float = Field(1e-6, gt=0)
    rk4_oracle: float = Field(1e-6, gt=0)
    psi_routes: float = Field(1e-9, gt=0)
    gram: float = Field(1e-9, gt=0)
    energy_imag: float = Field(1e-10, gt=0)
    energy_agreement: float = Field(1e-9, gt=0)
    energy_sum: float = Field(1e-10, gt=0)
    det_identity: float = Field(1e-9, gt=0)
    energy_operator: float = Field(1e-8, gt=0)
    energy_generator: float = Field(1e-6, gt=0)
    pt_involution: float = Field(1e-10, gt=0)
    pt_commutation: float = Field(1e-9, gt=0)
    eigenstate: float = Field(1e-8, gt=0)

    def scaled(self, factor: float) -> "Tolerances":
        if not factor > 0:
            raise ConfigError([("tol-scale", "must be positive")])
        return Tolerances(**{k: v * factor for k, v in self.model_dump().items()})


class VerifySpec(_Strict):
    """Step sizes of the verification battery and the negative-control hook."""

    derivative_step: float = Field(1e-4, gt=0)
    # rho ~ |xi| is large, so its difference quotient needs a longer step
    metric_step: float = Field(1e-3, gt=0)
    ep_step: float = Field(1e-3, gt=0)
    rk4_step: float = Field(1e-3, gt=0, le=1e-2)
    rk4_span: float = Field(10.0, gt=0)
    corrupt_eta2: float = 0.0


class RunConfig(_Strict):
    schema_version: Literal[1]
    model: ModelSpec
    grid: GridSpec = Field(default_factory=GridSpec)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    verify: VerifySpec = Field(default_factory=VerifySpec)


def _path(loc) -> str:
    # drop union-member tags pydantic inserts for discriminated unions
    parts = [str(p) for p in loc if p not in ("sinusoidal", "constant", "tabulated")]
    return ".".join(parts)


def parse_config(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([("", f"invalid JSON: {exc}")]) from None
    if not isinstance(data, dict):
        raise ConfigError([("", "top level must be an object")])
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        errors = []
        for e in exc.errors():
            msg = e["msg"].removeprefix("Value error, ")
            errors.append((_path(e["loc"]), msg))
        raise ConfigError(errors) from None


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(cfg: RunConfig) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(cfg.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()


def with_model_value(cfg: RunConfig, param: str, value: float) -> RunConfig:
    """Copy of ``cfg`` with one model constant replaced (sweep support)."""
    model = cfg.model.model_dump(mode="json")
    if param in ("alpha", "A", "B"):
        model[param] = value
    elif param == "c1":
        model["c1"] = {"re": value, "im": (model.get("c1") or {}).get("im", 0.0)}
    elif param in ("c2.re", "c2.im"):
        c2 = dict(model.get("c2") or {"re": 0.0, "im": 0.0})
        c2[param.split(".")[1]] = value
        model["c2"] = c2
    else:
        raise ConfigError([("param", f"unknown sweep parameter {param!r}")])
    data = cfg.model_dump(mode="json")
    data["model"] = model
    return parse_config(json.dumps(data))
