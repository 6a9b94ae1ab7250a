"""FastAPI application exposing the factory over HTTP.

Run with: uvicorn triplesmith.service:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import DomainError, MalformedInputError, RetryExhaustedError
from . import handlers
from . import schemas as s


def create_app() -> FastAPI:
    app = FastAPI(title="triplesmith", version="0.1.0")

    def guarded(fn, req):
        try:
            return fn(req)
        except (DomainError, MalformedInputError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except FileNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except RetryExhaustedError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/generate", response_model=s.GenerateResponse)
    def generate(req: s.GenerateRequest) -> s.GenerateResponse:
        return guarded(handlers.generate, req)

    @app.post("/attack", response_model=s.AttackResponse)
    def attack(req: s.AttackRequest) -> s.AttackResponse:
        return guarded(handlers.attack, req)

    @app.post("/verify", response_model=s.VerifyResponse)
    def verify(req: s.VerifyRequest) -> s.VerifyResponse:
        return guarded(handlers.verify, req)

    @app.post("/dataset/verify", response_model=s.DatasetVerifyResponse)
    def dataset_verify(req: s.DatasetVerifyRequest) -> s.DatasetVerifyResponse:
        return guarded(handlers.verify_dataset, req)

    @app.post("/floatwall", response_model=s.FloatWallResponse)
    def floatwall(req: s.FloatWallRequest) -> s.FloatWallResponse:
        return guarded(handlers.floatwall, req)

    @app.post("/features", response_model=s.FeaturesResponse)
    def features(req: s.FeaturesRequest) -> s.FeaturesResponse:
        return guarded(handlers.extract_features, req)

    return app


app = create_app()
