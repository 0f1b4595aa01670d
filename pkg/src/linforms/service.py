"""HTTP service wrapping the factoring pipeline.

POST /factor takes the same request a CLI invocation would build and
returns the same JSON report, so scripted clients and the CLI's
``--server`` mode are interchangeable with local runs.  Run it with:

    uvicorn linforms.service:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .oracle import DEFAULT_SAMPLE_BOUND
from .pipeline import PolySource, RunOptions, execute

app = FastAPI(
    title="linforms",
    description="Exact factorization of black-box polynomials into products of linear forms",
    version="0.1.0",
)


class FactorRequest(BaseModel):
    expr: str | None = None
    sparse: str | None = Field(None, description="sparse polynomial text, one 'coeff e1 ... en' term per line")
    circuit: dict | None = Field(None, description="circuit JSON object")
    algorithm: str = "auto"
    seed: int = 0
    sample_bound: int = DEFAULT_SAMPLE_BOUND
    degree: int | None = None
    decide_only: bool = False
    deterministic_line_test: bool = False
    reduce_essential: bool = False


class FactorEntry(BaseModel):
    coeffs: list[str]
    exponent: int


class FactorResponse(BaseModel):
    status: str
    lambda_: str | None = Field(None, alias="lambda")
    factors: list[FactorEntry] | None
    blackbox_calls: int
    algorithm: str
    seed: int

    model_config = {"populate_by_name": True}


class HealthResponse(BaseModel):
    status: str


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok")


@app.post("/factor", response_model=FactorResponse)
def factor(request: FactorRequest) -> FactorResponse:
    try:
        source = PolySource(
            expr=request.expr,
            sparse_text=request.sparse,
            circuit_data=request.circuit,
        )
        options = RunOptions(
            algorithm=request.algorithm,
            seed=request.seed,
            sample_bound=request.sample_bound,
            degree=request.degree,
            decide_only=request.decide_only,
            deterministic_line_test=request.deterministic_line_test,
            reduce_essential=request.reduce_essential,
        )
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    report = execute(source, options)
    return FactorResponse.model_validate(report.to_dict())
