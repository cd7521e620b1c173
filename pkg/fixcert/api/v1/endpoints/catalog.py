from fastapi import APIRouter

from fixcert.repositories.catalog import CatalogRepository
from fixcert.schemas.reports import CatalogEntryView
from fixcert.services.contraction import ContractionService
from fixcert.services.render import catalog_view

router = APIRouter()


@router.get("", response_model=list[CatalogEntryView])
async def list_catalog():
    return [catalog_view(ic) for ic in ContractionService.catalog()]


@router.get("/{entry_id}", response_model=CatalogEntryView)
async def get_entry(entry_id: str):
    return catalog_view(CatalogRepository.get(entry_id))
