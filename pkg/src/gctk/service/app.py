"""FastAPI application wrapping the verification toolkit.

Run with: uvicorn gctk.service.app:app
The bundled CLI talks to this app in process by default.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from .. import __version__
from ..family import family_spinor, product_parameters, type_map, type_map_csv
from ..hyperkahler import build_model
from ..scalars import cp1_str, parse_rational_complex
from ..verify import run_suite
from .models import (
    FmapRequest,
    FmapResponse,
    SpinorRequest,
    SpinorResponse,
    TypemapRequest,
    VerificationReport,
    VerifyRequest,
)

app = FastAPI(
    title="generalized-structure verification service",
    version=__version__,
)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/verify", response_model=VerificationReport, response_model_by_alias=True)
def verify(req: VerifyRequest) -> VerificationReport:
    report = run_suite(
        req.n, seed=req.seed, samples=req.samples, tol=req.tol, mutate=req.mutate
    )
    return VerificationReport.model_validate(report.to_dict())


@app.post("/typemap", response_class=PlainTextResponse)
def typemap(req: TypemapRequest) -> str:
    model = build_model(req.n)
    rows = type_map(model, req.grid, fiber=req.fiber)
    return type_map_csv(rows)


@app.post("/spinor", response_model=SpinorResponse)
def spinor(req: SpinorRequest) -> SpinorResponse:
    if (req.alpha is None) != (req.beta is None):
        raise HTTPException(status_code=400, detail="give both parameters or neither")
    model = build_model(req.n)
    if req.alpha is None:
        mv = family_spinor(model)
        return SpinorResponse(n=req.n, symbolic=True, text=str(mv))
    try:
        alpha = parse_rational_complex(req.alpha)
        beta = parse_rational_complex(req.beta)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    mv = family_spinor(model, alpha, beta)
    return SpinorResponse(n=req.n, symbolic=False, text=str(mv))


@app.post("/fmap", response_model=FmapResponse)
def fmap(req: FmapRequest) -> FmapResponse:
    try:
        eta = parse_rational_complex(req.eta)
        zeta = parse_rational_complex(req.zeta)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    alpha, beta = product_parameters(eta, zeta)
    return FmapResponse(alpha=cp1_str(alpha), beta=cp1_str(beta))
