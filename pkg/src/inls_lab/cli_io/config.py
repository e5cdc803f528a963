"""JSON run configuration with path-qualified validation errors."""

from __future__ import annotations

import json
import math
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import ConfigurationError
from ..integrator import StepperConfig
from ..model import ModelParams
from ..spectral_core import Grid

__all__ = ["RunConfig", "parse_config", "load_config"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridSection(_Strict):
    n: int = 1024
    half_width: float = 40.0

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, n):
        if n < 16 or n & (n - 1):
            raise ValueError(f"must be a power of two >= 16, got {n}")
        return n

    @field_validator("half_width")
    @classmethod
    def _positive(cls, v):
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"must be positive and finite, got {v}")
        return v


class ModelSection(_Strict):
    depth: Union[float, Literal["inf"]] = "inf"
    beta: float = -1.0
    gamma: float = 0.0

    @field_validator("depth")
    @classmethod
    def _depth(cls, v):
        if v == "inf":
            return v
        if not v > 0 or math.isnan(v):
            raise ValueError(f"must be positive or \"inf\", got {v}")
        return v

    @field_validator("beta", "gamma")
    @classmethod
    def _finite(cls, v):
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @property
    def h(self) -> float:
        return math.inf if self.depth == "inf" else float(self.depth)


class GaussianParams(_Strict):
    amplitude: float = 1.0
    width: float = Field(1.0, gt=0)
    velocity: float = 0.0


class SolitonParams(_Strict):
    form: Literal["periodic", "line"] = "periodic"


class SingularParams(_Strict):
    t: float = Field(1.0, gt=0)


class FileParams(_Strict):
    path: str


_INIT_PARAMS = {
    "gaussian": GaussianParams,
    "static_soliton": SolitonParams,
    "singular": SingularParams,
    "file": FileParams,
}


class InitSection(_Strict):
    kind: Literal["gaussian", "static_soliton", "singular", "file"] = "gaussian"
    parameters: dict = Field(default_factory=dict)

    @property
    def typed(self):
        return _INIT_PARAMS[self.kind].model_validate(self.parameters)


class TimeSection(_Strict):
    t_end: float = Field(1.0, ge=0)
    dt: float = Field(1e-3, gt=0)
    record_every: int = Field(10, ge=1)


class OutputSection(_Strict):
    directory: str = "out"


class RunConfig(_Strict):
    grid: GridSection = Field(default_factory=GridSection)
    model: ModelSection = Field(default_factory=ModelSection)
    init: InitSection = Field(default_factory=InitSection)
    time: TimeSection = Field(default_factory=TimeSection)
    output: OutputSection = Field(default_factory=OutputSection)
    seed: int = Field(0, ge=0, lt=2**64)

    def make_grid(self) -> Grid:
        return Grid(self.grid.n, self.grid.half_width)

    def params(self) -> ModelParams:
        return ModelParams(self.model.h, self.model.beta, self.model.gamma)

    def stepper(self) -> StepperConfig:
        return StepperConfig(self.time.dt, self.time.t_end, self.time.record_every)

    def with_overrides(self, out: str | None = None, seed: int | None = None) -> "RunConfig":
        update = {}
        if out is not None:
            update["output"] = OutputSection(directory=out)
        if seed is not None:
            update["seed"] = seed
        return self.model_copy(update=update)


def _location(err, prefix=()) -> str:
    loc = [*prefix, *(str(p) for p in err["loc"])]
    # Drop pydantic's union-branch tags ("float", "literal['inf']").
    loc = [p for p in loc if not p.startswith(("literal[", "float", "function-"))]
    return ".".join(loc) or "<root>"


def parse_config(text: str) -> RunConfig:
    """Validate a JSON document; errors name the offending key path."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"malformed JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError("<root>: expected a JSON object")
    try:
        cfg = RunConfig.model_validate(data)
        prefix = ("init", "parameters")
        _INIT_PARAMS[cfg.init.kind].model_validate(cfg.init.parameters)
        return cfg
    except ValidationError as exc:
        if exc.title == "RunConfig":
            prefix = ()
        msgs = []
        for err in exc.errors():
            loc = _location(err, prefix)
            if err["type"] == "extra_forbidden":
                msgs.append(f"{loc}: unknown key")
            else:
                msgs.append(f"{loc}: {err['msg']}")
        # Union errors repeat the same location once per branch.
        raise ConfigurationError("; ".join(dict.fromkeys(msgs))) from None


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
