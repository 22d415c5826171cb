"""HTTP front end. Run with: uvicorn bmtmoments.service.app:app"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import CapExceeded, InputError
from . import handlers
from .schemas import (
    CltRequest,
    CltResponse,
    GraphGenRequest,
    GraphGenResponse,
    HealthResponse,
    KernelRequest,
    KernelResponse,
    LawRequest,
    LawResponse,
    MomentRequest,
    MomentResponse,
    OperatorVerifyRequest,
    OperatorVerifyResponse,
    PoissonRequest,
    PoissonResponse,
    SelftestResponse,
)

app = FastAPI(title="bmtmoments", version=__version__)


@app.exception_handler(InputError)
async def _bad_input(request: Request, exc: InputError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(CapExceeded)
async def _too_large(request: Request, exc: CapExceeded) -> JSONResponse:
    return JSONResponse(status_code=413, content={"detail": str(exc)})


@app.get("/health", response_model=HealthResponse)
async def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/kernel", response_model=KernelResponse)
async def kernel(req: KernelRequest) -> KernelResponse:
    return handlers.kernel_report(req.word, req.graph)


@app.post("/moment", response_model=MomentResponse)
async def moment(req: MomentRequest) -> MomentResponse:
    return handlers.moment_report(req.word, req.graph, req.marginal, req.lam)


@app.post("/law", response_model=LawResponse)
async def law(req: LawRequest) -> LawResponse:
    return handlers.law_table(req.name, req.upto, req.lam)


@app.post("/operator-verify", response_model=OperatorVerifyResponse)
async def operator_verify(req: OperatorVerifyRequest) -> OperatorVerifyResponse:
    return handlers.operator_verify_report(req.graph, req.max_len, req.seed)


@app.post("/clt", response_model=CltResponse)
async def clt(req: CltRequest) -> CltResponse:
    return handlers.clt_payload(req.family, req.N, req.moments)


@app.post("/poisson", response_model=PoissonResponse)
async def poisson(req: PoissonRequest) -> PoissonResponse:
    return handlers.poisson_payload(req.family, req.lam, req.N, req.moments)


@app.post("/graph-gen", response_model=GraphGenResponse)
async def graph_gen(req: GraphGenRequest) -> GraphGenResponse:
    return handlers.graph_gen_text(req.spec, req.N)


@app.post("/selftest", response_model=SelftestResponse)
async def selftest() -> SelftestResponse:
    return handlers.selftest_report()
