"""JSON HTTP API over an immutable engine, plus optional static UI hosting."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .engine import DEFAULT_SUGGEST_K, Engine, ModelNotLoadedError


class ApiError(Exception):
    def __init__(self, code: str, message: str, status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status


class SuggestRequest(BaseModel):
    text: str
    k: int = DEFAULT_SUGGEST_K


class GenerateRequest(BaseModel):
    seedText: str
    numWords: int
    substitute: bool = False


def create_app(engine: Engine, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="nextword", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def api_error(_: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def bad_body(_: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"code": "badRequest", "message": str(exc)})

    @app.exception_handler(Exception)
    async def internal(_: Request, exc: Exception):
        return JSONResponse(status_code=500, content={"code": "internal", "message": str(exc)})

    def run(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ModelNotLoadedError as exc:
            raise ApiError("modelNotLoaded", str(exc)) from None
        except ValueError as exc:
            raise ApiError("badRequest", str(exc)) from None

    @app.get("/api/health")
    async def health():
        return {"status": "ok"}

    @app.get("/api/model")
    async def model_info():
        if engine.cfg is None:
            raise ApiError("modelNotLoaded", "model has no next-word network")
        return {
            "vocabSize": len(engine.vocab),
            "contextLength": engine.cfg.context_length,
            "hiddenSize": engine.cfg.hidden_size,
            "embeddingDim": engine.cfg.embedding_dim,
        }

    @app.get("/api/classics")
    async def classics():
        return [{"title": t, "line": l} for t, l in engine.list_classics()]

    @app.post("/api/suggest")
    async def suggest(body: SuggestRequest):
        subs, suggestions = run(engine.suggest_detailed, body.text, body.k)
        return {
            "substitutions": [{"from": a, "to": b} for a, b in subs],
            "suggestions": [
                {"word": s.word, "probability": s.probability} for s in suggestions
            ],
        }

    @app.post("/api/generate")
    async def generate(body: GenerateRequest):
        text = run(engine.generate, body.seedText, body.numWords, body.substitute)
        seed = run(engine.processed_seed, body.seedText, body.substitute)
        return {"processedSeed": seed, "text": text}

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def serve(engine: Engine, addr: str, static_dir: str | None = None) -> None:
    """Block serving the API at host:port until interrupted."""
    import uvicorn

    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"address must be host:port, got {addr!r}")
    uvicorn.run(create_app(engine, static_dir), host=host, port=int(port))
