from fastapi import APIRouter
from fastapi.concurrency import run_in_threadpool

from fixcert.schemas.api import CertifyRequest
from fixcert.schemas.reports import HypothesisReport
from fixcert.services.problem import ProblemService

router = APIRouter()


@router.post("", response_model=HypothesisReport)
async def certify(payload: CertifyRequest):
    problem = ProblemService.with_run_overrides(
        ProblemService.from_text(payload.config),
        direction=payload.direction,
        budget=payload.budget,
        x0=payload.x0,
        variant=payload.variant,
    )
    return await run_in_threadpool(lambda: ProblemService.certify(problem, confirm=payload.confirm))
