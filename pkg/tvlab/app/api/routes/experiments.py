from fastapi import APIRouter, HTTPException

from ...core.exceptions import ConfigError, TVLabError
from ...schemas.report import ConfigText, ExperimentListResponse, ExperimentSummary
from ...services.config_loader import validate_config
from ...services.experiment_runner import list_experiments, run_experiment

router = APIRouter()


def _raise_for(e: TVLabError):
    status = 422 if isinstance(e, ConfigError) else 400
    raise HTTPException(status_code=status, detail=e.to_record())


@router.get("/list", response_model=ExperimentListResponse)
async def get_experiments():
    """
    List experiment kinds with their acceptance predicates
    """
    return ExperimentListResponse(experiments=list_experiments())


@router.post("/validate")
async def validate_experiment(request: ConfigText):
    """
    Validate an experiment config

    - **text**: config document (INI sections with key = value lines)
    """
    try:
        config = validate_config(request.text)
    except TVLabError as e:
        _raise_for(e)
    return {"valid": True, "config": config.model_dump(mode="json")}


@router.post("/run", response_model=ExperimentSummary)
def run(request: ConfigText):
    """
    Run an experiment and return its summary

    - **text**: config document
    - **write_files**: also write the CSV/JSON reports under [experiment] out
    """
    try:
        config = validate_config(request.text)
        result = run_experiment(config, write=request.write_files)
    except TVLabError as e:
        _raise_for(e)
    return result.summary
