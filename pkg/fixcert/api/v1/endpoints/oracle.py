from fastapi import APIRouter
from fastapi.concurrency import run_in_threadpool

from fixcert.schemas.api import OracleRequest
from fixcert.schemas.reports import OracleResult
from fixcert.services.hypotheses import HypothesisService
from fixcert.services.problem import ProblemService

router = APIRouter()


@router.post("", response_model=OracleResult)
async def brute_force(payload: OracleRequest):
    problem = ProblemService.from_text(payload.config)
    return await run_in_threadpool(
        HypothesisService.coincidence_points_bruteforce,
        problem.space,
        problem.require_pair(),
        payload.limit,
    )
