"""FastAPI application exposing the classification wire protocol.

POST /v1/classify answers batches of premise/hypothesis pairs with verdicts
in request order; GET /healthz reports readiness. The model loads during
startup and a label-mapping self-test must pass before the service reports
ready: an identity pair has to score entailment highest, which catches a
scrambled class order immediately.
"""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import ServiceConfig
from .model import PROTOCOL_LABELS, NliModel

SELF_TEST_PAIR = ("The sky is blue.", "The sky is blue.")


class PairIn(BaseModel):
    premise: str = Field(min_length=1)
    hypothesis: str = Field(min_length=1)


class ClassifyRequest(BaseModel):
    pairs: list[PairIn] = Field(min_length=1)


class VerdictOut(BaseModel):
    entailment: float
    neutral: float
    contradiction: float


class ClassifyResponse(BaseModel):
    verdicts: list[VerdictOut]


def run_self_test(model: NliModel) -> None:
    """Refuse readiness unless an identity pair scores entailment highest."""
    probabilities = model.predict([SELF_TEST_PAIR])[0]
    best = max(range(len(PROTOCOL_LABELS)), key=lambda i: probabilities[i])
    if PROTOCOL_LABELS[best] != "entailment":
        raise RuntimeError(
            "label-mapping self-test failed: identity pair scored "
            + ", ".join(f"{label}={p:.3f}" for label, p in zip(PROTOCOL_LABELS, probabilities))
        )


def create_app(config: ServiceConfig | None = None, model_loader=None) -> FastAPI:
    """Build the app; ``model_loader`` overrides checkpoint loading (tests)."""
    config = config or ServiceConfig()
    state: dict = {"model": None}

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if model_loader is not None:
            model = model_loader()
        else:
            from .model import TransformersNliModel

            model = TransformersNliModel(config.checkpoint, device=config.device)
        run_self_test(model)
        state["model"] = model
        yield
        state["model"] = None

    app = FastAPI(title="nli-service", lifespan=lifespan)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/healthz")
    async def healthz():
        model = state["model"]
        if model is None:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ok", "checkpoint": model.checkpoint}

    @app.post("/v1/classify", response_model=ClassifyResponse)
    async def classify(request: ClassifyRequest):
        model = state["model"]
        if model is None:
            raise HTTPException(status_code=503, detail="model not ready")
        if len(request.pairs) > config.max_batch_size:
            raise HTTPException(
                status_code=413,
                detail=f"batch of {len(request.pairs)} exceeds limit {config.max_batch_size}",
            )
        probabilities = model.predict([(p.premise, p.hypothesis) for p in request.pairs])
        return {
            "verdicts": [
                {"entailment": e, "neutral": n, "contradiction": c}
                for e, n, c in probabilities
            ]
        }

    return app
