"""
FixCert FastAPI Application Entry Point

Technical Explanation:
- Creates and configures the FastAPI application
- Registers the v1 routers (catalog, conditions, solve, oracle, certify)
- Converts FixCertException into JSON error responses carrying the
  exception's status code
- Request bodies carry the same problem-config text the CLI reads

Startup Flow:
1. Load configuration from .env
2. Configure logging
3. Register API routes
4. Start Uvicorn server
"""

import logging
from contextlib import asynccontextmanager
from datetime import datetime, timezone

from fastapi import FastAPI, Request, status
from fastapi.responses import JSONResponse

from fixcert.api.v1.endpoints import catalog, certify, conditions, oracle, solve
from fixcert.core.config import settings
from fixcert.core.exceptions import FixCertException, exception_to_http_response
from fixcert.core.logging_config import configure_logging

configure_logging()
logger = logging.getLogger("fixcert.api")


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info("Starting FixCert API (%s)...", settings.ENVIRONMENT)
    yield
    logger.info("Shutting down FixCert API...")


app = FastAPI(
    title=settings.APP_NAME,
    description="Coincidence and common fixed point certification on ordered metric spaces",
    version=settings.APP_VERSION,
    docs_url="/docs",
    redoc_url="/redoc",
    lifespan=lifespan,
    debug=settings.DEBUG,
)


@app.exception_handler(FixCertException)
async def fixcert_exception_handler(request: Request, exc: FixCertException):
    """
    Handle FixCert exceptions

    Technical Note:
    - Config errors (with line/column) become 400, unknown catalog ids 404,
      failed preconditions and evaluation errors 422
    """
    logger.warning("FixCert exception on %s: %s", request.url.path, exc.message)
    http_exc = exception_to_http_response(exc)
    return JSONResponse(
        status_code=http_exc.status_code,
        content={"detail": http_exc.detail, "type": type(exc).__name__},
    )


@app.exception_handler(Exception)
async def general_exception_handler(request: Request, exc: Exception):
    """
    Handle unexpected exceptions

    Technical Note:
    - Returns 500 and logs the traceback
    - Error details reach the client only in DEBUG
    """
    logger.error("Unhandled exception: %s", exc, exc_info=True)
    error_detail = str(exc) if settings.DEBUG else "Internal server error"
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={"detail": error_detail, "type": "internal_error"},
    )


@app.get("/", tags=["Health"])
async def root():
    return {
        "app": settings.APP_NAME,
        "version": settings.APP_VERSION,
        "status": "running",
        "environment": settings.ENVIRONMENT,
        "docs": "/docs",
    }


@app.get("/health", tags=["Health"])
async def health_check():
    return {
        "status": "healthy",
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


app.include_router(catalog.router, prefix=f"{settings.API_V1_PREFIX}/catalog", tags=["Catalog"])
app.include_router(conditions.router, prefix=f"{settings.API_V1_PREFIX}/conditions", tags=["Conditions"])
app.include_router(solve.router, prefix=f"{settings.API_V1_PREFIX}/solve", tags=["Solver"])
app.include_router(oracle.router, prefix=f"{settings.API_V1_PREFIX}/oracle", tags=["Oracle"])
app.include_router(certify.router, prefix=f"{settings.API_V1_PREFIX}/certify", tags=["Certifier"])


if __name__ == "__main__":
    import uvicorn

    logger.info("Starting development server on %s:%s", settings.HOST, settings.PORT)
    uvicorn.run(
        "fixcert.main:app",
        host=settings.HOST,
        port=settings.PORT,
        reload=settings.DEBUG,
        log_level=settings.LOG_LEVEL.lower(),
    )
