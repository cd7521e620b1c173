from fastapi import APIRouter
from fastapi.concurrency import run_in_threadpool

from fixcert.models.contraction import GridSpec
from fixcert.schemas.api import ConditionsRequest, ConditionsResponse
from fixcert.services.contraction import ContractionService
from fixcert.services.problem import ProblemService
from fixcert.services.render import catalog_view

router = APIRouter()


@router.post("", response_model=ConditionsResponse)
async def check_conditions(payload: ConditionsRequest):
    if payload.contraction is not None:
        ic = ProblemService.contraction_from_spec(payload.contraction)
    else:
        ic = ProblemService.from_text(payload.config).require_contraction()
    grid = GridSpec(points=payload.grid_points) if payload.grid_points else GridSpec()
    reports = await run_in_threadpool(ContractionService.check_contraction, ic, grid)
    return ConditionsResponse(contraction=catalog_view(ic), conditions=reports)
