"""FastAPI service exposing the contrast-enhancement pipelines.

Domain failures (corrupt images, parameter violations, missing closed
forms) surface as HTTP 400 with the underlying diagnostic, including the
computed stability bound for rejected step sizes.
"""

from __future__ import annotations

import base64
import binascii
import math

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..evolution import EnergyTrace
from ..imageio import decode_image, encode_image, sniff_format
from ..imaging import (
    ColourImage,
    GreyImage,
    enhance_colour,
    enhance_grey_global,
    enhance_grey_local,
)
from ..penaliser import Penaliser
from .schemas import (
    ColourGlobalRequest,
    ColourLocalRequest,
    EnhanceResponse,
    GreyGlobalRequest,
    GreyLocalRequest,
    HealthResponse,
    SteadyStateRequest,
)

__all__ = ["create_app", "app"]


def _decode_request_image(b64: str, expected: type | None):
    try:
        data = base64.b64decode(b64, validate=True)
    except binascii.Error as exc:
        raise ValueError(f"image field is not valid base64: {exc}") from exc
    fmt = sniff_format(data)
    img = decode_image(data)
    if expected is GreyImage and not isinstance(img, GreyImage):
        raise ValueError("this pipeline needs a greyscale image (PGM or grey PNG)")
    if expected is ColourImage and not isinstance(img, ColourImage):
        raise ValueError("this pipeline needs a colour image (PPM or RGB PNG)")
    return img, fmt


def _respond(img, fmt: str, trace: EnergyTrace | None) -> EnhanceResponse:
    payload = encode_image(img, fmt)
    return EnhanceResponse(
        image=base64.b64encode(payload).decode("ascii"),
        format=fmt,
        width=img.width,
        height=img.height,
        trace_csv=trace.to_csv() if trace is not None else None,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="backdiff",
        version=__version__,
        description=(
            "Contrast enhancement of greyscale and colour images by stable "
            "backward diffusion: gradient descent on a convex repulsion "
            "energy with reflecting range constraints."
        ),
    )

    @app.exception_handler(ValueError)
    async def _domain_error(_request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/enhance/grey-global", response_model=EnhanceResponse)
    def grey_global(req: GreyGlobalRequest) -> EnhanceResponse:
        img, fmt = _decode_request_image(req.image, GreyImage)
        trace = EnergyTrace() if req.trace else None
        out = enhance_grey_global(img, Penaliser(req.a, req.n), req.t, req.tau, trace=trace)
        return _respond(out, req.output_format or fmt, trace)

    @app.post("/enhance/grey-local", response_model=EnhanceResponse)
    def grey_local(req: GreyLocalRequest) -> EnhanceResponse:
        img, fmt = _decode_request_image(req.image, GreyImage)
        trace = EnergyTrace() if req.trace else None
        out = enhance_grey_local(
            img, Penaliser(req.a, req.n), req.t, req.tau, req.rho, req.kernel, trace=trace
        )
        return _respond(out, req.output_format or fmt, trace)

    @app.post("/enhance/colour-global", response_model=EnhanceResponse)
    def colour_global(req: ColourGlobalRequest) -> EnhanceResponse:
        img, fmt = _decode_request_image(req.image, ColourImage)
        trace = EnergyTrace() if req.trace else None
        out = enhance_colour(
            img, Penaliser(req.a, req.n), req.t, "global", req.tau, lam=req.lam, trace=trace
        )
        return _respond(out, req.output_format or fmt, trace)

    @app.post("/enhance/colour-local", response_model=EnhanceResponse)
    def colour_local(req: ColourLocalRequest) -> EnhanceResponse:
        img, fmt = _decode_request_image(req.image, ColourImage)
        trace = EnergyTrace() if req.trace else None
        out = enhance_colour(
            img, Penaliser(req.a, req.n), req.t, "local", req.tau,
            req.rho, req.kernel, req.lam, trace=trace,
        )
        return _respond(out, req.output_format or fmt, trace)

    @app.post("/steady-state", response_model=EnhanceResponse)
    def steady_state(req: SteadyStateRequest) -> EnhanceResponse:
        img, fmt = _decode_request_image(req.image, None)
        pen = Penaliser(1.0, 1)
        if isinstance(img, GreyImage):
            out = enhance_grey_global(img, pen, math.inf)
        else:
            out = enhance_colour(img, pen, math.inf, "global", lam=req.lam)
        return _respond(out, req.output_format or fmt, None)

    return app


app = create_app()
