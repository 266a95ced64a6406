import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from alh import __version__
from alh.api.routes import router as api_router
from alh.core import registry
from alh.core.config import settings

logging.basicConfig(level=settings.log_level)

app = FastAPI(title="ALH mass service", version=__version__)

app.add_middleware(
	CORSMiddleware,
	allow_origins=["*"],
	allow_methods=["GET", "POST"],
	allow_headers=["*"],
)

app.include_router(api_router, prefix="/api")


@app.get("/api/status")
def get_status():
	return {
		"status": "running",
		"service": "alh",
		"version": __version__,
		"catalog": registry.background_names(),
		"threads": settings.worker_count(),
	}
