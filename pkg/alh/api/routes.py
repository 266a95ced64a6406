from fastapi import APIRouter, HTTPException
from pydantic import BaseModel

from alh.core.errors import AlhError
from alh.models.schemas import BoostReport, CatalogListing, CheckReport, MassReport, SpecDocument
from alh.services import commands
from alh.services.specfile import Problem, build_problem

router = APIRouter()


class BoostRequest(BaseModel):
	spec: SpecDocument
	direction: int
	rapidity: float = 0.0


def _problem(doc: SpecDocument) -> Problem:
	try:
		return build_problem(doc, "<request>")
	except AlhError as exc:
		raise HTTPException(status_code=422, detail=str(exc)) from None


def _run(fn, *args):
	try:
		return fn(*args)
	except AlhError as exc:
		raise HTTPException(status_code=422, detail=str(exc)) from None


@router.get("/catalog", response_model=CatalogListing)
def get_catalog():
	return commands.catalog_listing()


@router.post("/mass", response_model=MassReport)
def post_mass(doc: SpecDocument):
	return _run(commands.run_mass, _problem(doc)).report


@router.post("/check", response_model=CheckReport)
def post_check(doc: SpecDocument):
	return _run(commands.run_check, _problem(doc)).report


@router.post("/boost", response_model=BoostReport)
def post_boost(req: BoostRequest):
	return _run(commands.run_boost, _problem(req.spec), req.direction, req.rapidity).report
