from fastapi import APIRouter
from fastapi.concurrency import run_in_threadpool

from fixcert.schemas.api import SolveRequest
from fixcert.schemas.reports import SolveResult
from fixcert.services.problem import ProblemService

router = APIRouter()


@router.post("", response_model=SolveResult)
async def solve(payload: SolveRequest):
    problem = ProblemService.with_run_overrides(
        ProblemService.from_text(payload.config),
        direction=payload.direction,
        budget=payload.budget,
        x0=payload.x0,
    )
    return await run_in_threadpool(ProblemService.solve, problem, payload.eps or None)
