"""Request and response models of the enhancement service.

Images travel as base64-encoded PGM/PPM/PNG bytes.  The time parameter t
accepts the string "inf" for the analytic steady state.
"""

from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

OutputFormat = Literal["pgm", "ppm", "png"]


class EnhanceRequestBase(BaseModel):
    image: str = Field(description="base64-encoded PGM, PPM, or PNG bytes")
    a: float = Field(1.0, gt=0, description="penaliser amplitude")
    n: int = Field(1, ge=1, description="penaliser exponent")
    t: float = Field(ge=0, description="diffusion time; 'inf' for the steady state")
    tau: Optional[float] = Field(None, gt=0, description="step size; default: optimal step")
    output_format: Optional[OutputFormat] = Field(
        None, description="output container; default: same as input"
    )
    trace: bool = Field(False, description="return the energy trace as CSV")

    @field_validator("t", "tau")
    @classmethod
    def _reject_nan(cls, value):
        if value is not None and math.isnan(value):
            raise ValueError("must not be NaN")
        return value


class GreyGlobalRequest(EnhanceRequestBase):
    pass


class LocalMixin(BaseModel):
    rho: float = Field(60.0, gt=0, description="disk radius in pixels")
    kernel: Literal["box", "bspline"] = Field("box", description="spatial weighting kernel")


class ColourMixin(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: float = Field(0.5, ge=0, le=1, alias="lambda",
                       description="multiplicative/additive blend weight")


class GreyLocalRequest(EnhanceRequestBase, LocalMixin):
    pass


class ColourGlobalRequest(EnhanceRequestBase, ColourMixin):
    pass


class ColourLocalRequest(EnhanceRequestBase, LocalMixin, ColourMixin):
    pass


class SteadyStateRequest(ColourMixin):
    """Analytic steady-state enhancement (greyscale or colour input)."""

    image: str = Field(description="base64-encoded PGM, PPM, or PNG bytes")
    output_format: Optional[OutputFormat] = None


class EnhanceResponse(BaseModel):
    image: str = Field(description="base64-encoded result bytes")
    format: OutputFormat
    width: int
    height: int
    trace_csv: Optional[str] = None


class HealthResponse(BaseModel):
    status: str
    version: str
