import logging
from contextlib import asynccontextmanager

from fastapi import Depends, FastAPI, HTTPException, Request, status
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from src.conf.config import config, setup_logging
from src.database.db import ModelStore, get_store
from src.routes import metrics, models
from src.services.errors import ScoringError

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    setup_logging()
    logger.info("serving models from %s", config.MODELS_DIR)
    yield


app = FastAPI(title="GEV default scoring", lifespan=lifespan)

# CORS Middleware setup
origins = ["*"]
app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(models.router, prefix="/api")
app.include_router(metrics.router, prefix="/api")


@app.exception_handler(ScoringError)
async def scoring_error_handler(request: Request, exc: ScoringError):
    """Data and model errors become 422 responses carrying the error message."""
    logger.warning("%s %s: %s", request.method, request.url.path, exc)
    return JSONResponse(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, content={"detail": str(exc)})


@app.get("/")
def index():
    """Root endpoint to check if the application is running."""
    return {"message": "Welcome to the GEV default scoring service!"}


@app.get("/api/healthchecker")
async def healthchecker(store: ModelStore = Depends(get_store)):
    """Health check endpoint to verify the model directory is readable."""
    if not store.healthy():
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Model directory {store.root} is not readable",
        )
    return {"message": "Model store is healthy!", "models": len(store.names())}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
