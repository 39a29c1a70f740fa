import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from .api.routes import experiments
from .core.config import settings
from .core.logging_config import configure_logging

logger = logging.getLogger(__name__)

app = FastAPI(
    title=settings.APP_NAME,
    version=settings.VERSION,
    description="Robust distribution learning experiments over HTTP",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.on_event("startup")
async def startup_event():
    configure_logging()
    logger.info("%s %s started", settings.APP_NAME, settings.VERSION)


app.include_router(experiments.router, prefix="/api/experiments", tags=["Experiments"])


@app.get("/")
async def root():
    return {
        "message": "TV robust learning lab API",
        "version": settings.VERSION,
        "status": "running",
    }


@app.get("/health")
async def health_check():
    return {"status": "healthy"}
