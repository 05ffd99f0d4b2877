import os
import logging

from dotenv import load_dotenv
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from contextlib import asynccontextmanager

from app.utils import setup_logging
from app.routes import (
    root_router,
    params_router,
    fibers_router,
    energy_router,
    minimize_router
)


load_dotenv(".env")
log_level = setup_logging()
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info("Starting the application ...")
    logger.debug(f"Logging level: {logging.getLevelName(logger.getEffectiveLevel())}")
    logger.debug(f"Workers per study: {os.getenv('LATTICE_WORKERS', '1')}")
    yield
    logger.info("Shutting down the application")


# RUN USING:   uvicorn app.main:app --reload
app = FastAPI(lifespan=lifespan, title="fiber-lattice")
app.include_router(root_router)
app.include_router(params_router)
app.include_router(fibers_router)
app.include_router(energy_router)
app.include_router(minimize_router)


origins = [
    "http://localhost",
    "http://localhost:8080",
]

app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000, log_level=log_level.lower())
