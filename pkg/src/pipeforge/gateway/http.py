"""HTTP surface: thin JSON adapters over the engine operations.

Errors come back as {code, message, agent} with 400 for validation problems,
404 for unknown ids and 409 for illegal lifecycle transitions. When a built
workbench bundle exists it is served as static assets from the root path.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, File, Form, Header, HTTPException, UploadFile
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from ..catalog import MicroserviceSubmission
from ..errors import (
    IllegalStateTransition,
    InvalidChoice,
    PipeforgeError,
)
from .engine import Engine


def _error_payload(exc: PipeforgeError) -> dict:
    return {"code": type(exc).__name__, "message": str(exc),
            "agent": getattr(exc, "agent", "engine")}


def create_app(engine: Engine, frontend_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="pipeforge", version="0.1.0")

    def check_token(x_api_token: Optional[str] = Header(default=None)) -> None:
        expected = engine.config.api_token
        if expected and x_api_token != expected:
            raise HTTPException(status_code=401, detail="invalid or missing API token")

    auth = Depends(check_token)

    @app.exception_handler(PipeforgeError)
    async def pipeforge_error_handler(request, exc: PipeforgeError):
        if isinstance(exc, (IllegalStateTransition,)):
            status = 409
        elif isinstance(exc, (InvalidChoice,)):
            status = 400
        else:
            status = 400
        return JSONResponse(status_code=status, content=_error_payload(exc))

    @app.exception_handler(KeyError)
    async def key_error_handler(request, exc: KeyError):
        return JSONResponse(status_code=404, content={
            "code": "NotFound", "message": f"unknown id: {exc.args[0]}",
            "agent": "gateway"})

    # -- microservices ---------------------------------------------------------

    @app.post("/microservices", dependencies=[auth])
    async def upload_microservice(
        name: str = Form(...),
        user_description: str = Form(""),
        python_version: str = Form("3.10"),
        category: str = Form(""),
        keywords: str = Form(""),
        publish: bool = Form(False),
        code: UploadFile = File(...),
        requirements: UploadFile = File(None),
    ):
        submission = MicroserviceSubmission(
            name=name,
            user_description=user_description,
            python_version=python_version,
            category=category,
            keywords=tuple(k.strip() for k in keywords.split(",") if k.strip()),
            code=await code.read(),
            requirements=(await requirements.read()) if requirements else b"",
        )
        ms = engine.upload(submission, auto_publish=publish)
        return ms.to_dict()

    @app.post("/microservices/{ms_id}/publish", dependencies=[auth])
    def publish_microservice(ms_id: str):
        return engine.publish_microservice(ms_id).to_dict()

    @app.get("/microservices", dependencies=[auth])
    def list_microservices(query: str = "", k: int = 20):
        return engine.search_microservices(query, k=k)

    @app.get("/microservices/{ms_id}", dependencies=[auth])
    def get_microservice(ms_id: str):
        return engine.get_microservice(ms_id).to_dict()

    # -- datasets ----------------------------------------------------------------

    @app.post("/datasets", dependencies=[auth])
    async def upload_dataset(file: UploadFile = File(...)):
        dataset_id, prof = engine.add_dataset(file.filename or "dataset.csv",
                                              await file.read())
        return {"dataset_id": dataset_id, "profile": prof.to_dict()}

    @app.get("/datasets/{dataset_id}/profile", dependencies=[auth])
    def get_profile(dataset_id: str):
        return engine.get_profile(dataset_id).to_dict()

    # -- intents + recommendations --------------------------------------------------

    @app.post("/intents", dependencies=[auth])
    def create_intent(body: dict):
        intent, validation = engine.parse_intent(body["goal"], body["dataset_id"])
        return {"intent": intent.to_dict(),
                "validation": {"errors": list(validation.errors),
                               "warnings": list(validation.warnings)}}

    @app.post("/recommendations", dependencies=[auth])
    def create_recommendations(body: dict):
        intent, recs = engine.recommend(
            body["goal"], body["dataset_id"], k=body.get("k"),
            user=body.get("user", "default"))
        return {"intent": intent.to_dict(),
                "stages": {stage: rec.to_dict(engine.catalog)
                           for stage, rec in recs.items()}}

    # -- pipelines --------------------------------------------------------------------

    def _pipeline_payload(pipeline, validation, recs) -> dict:
        payload = {"pipeline": pipeline.to_dict()}
        if validation is not None:
            payload["validation"] = validation.to_dict()
        if recs is not None:
            payload["candidates"] = {stage: rec.to_dict(engine.catalog)
                                     for stage, rec in recs.items()}
        payload["awaiting_selection"] = engine.awaiting_selection(pipeline.id)
        return payload

    @app.post("/pipelines", dependencies=[auth])
    def create_pipeline(body: dict):
        pipeline, validation, recs = engine.create_pipeline(
            body["dataset_id"], body["goal"], mode=body.get("mode", "autonomous"),
            user=body.get("user", "default"), k=body.get("k"),
            choices=body.get("choices"))
        return _pipeline_payload(pipeline, validation, recs)

    @app.post("/pipelines/{pipeline_id}/selections", dependencies=[auth])
    def submit_selections(pipeline_id: str, body: dict):
        pipeline = engine.submit_selections(pipeline_id, body.get("choices", {}))
        return {"pipeline": pipeline.to_dict(), "awaiting_selection": False}

    @app.post("/pipelines/{pipeline_id}/execute", dependencies=[auth])
    def execute_pipeline(pipeline_id: str, body: Optional[dict] = None):
        body = body or {}
        return engine.execute_pipeline(pipeline_id, user=body.get("user", "default"))

    @app.get("/pipelines/{pipeline_id}", dependencies=[auth])
    def get_pipeline(pipeline_id: str):
        pipeline = engine.get_pipeline(pipeline_id)
        return {"pipeline": pipeline.to_dict(),
                "awaiting_selection": engine.awaiting_selection(pipeline_id)}

    @app.get("/pipelines/{pipeline_id}/runs", dependencies=[auth])
    def get_runs(pipeline_id: str):
        return engine.runs_for(pipeline_id)

    @app.get("/pipelines/{pipeline_id}/artifact", dependencies=[auth])
    def get_final_artifact(pipeline_id: str):
        runs = engine.runs_for(pipeline_id)
        if not runs:
            raise HTTPException(status_code=404, detail="no runs for pipeline")
        last = runs[-1]
        outputs = [r["output_artifact"] for r in last["step_results"]
                   if r.get("output_artifact")]
        if not outputs:
            raise HTTPException(status_code=404, detail="run produced no artifact")
        artifact = Path(outputs[-1])
        workspace = Path(last["workspace"]).resolve()
        if workspace not in artifact.resolve().parents:
            raise HTTPException(status_code=400, detail="artifact escapes workspace")
        return FileResponse(artifact)

    # -- jobs ----------------------------------------------------------------------------

    @app.get("/jobs/{job_id}", dependencies=[auth])
    def get_job(job_id: str):
        job = engine.get_job(job_id)
        if job is None:
            raise KeyError(job_id)
        return job

    # -- patterns ---------------------------------------------------------------------------

    @app.get("/patterns/summary", dependencies=[auth])
    def patterns_summary():
        return engine.patterns_summary()

    # -- static workbench ----------------------------------------------------------------------

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True),
                  name="workbench")

    return app
