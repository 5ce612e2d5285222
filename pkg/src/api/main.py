"""
FastAPI service for the simulator.
Exposes group inspection, channel profiles and small sweeps over HTTP.
"""

from typing import Any, Dict, List, Literal, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from loguru import logger
from pydantic import BaseModel, Field

from config.settings import settings
from config.simulation_config import SimConfig
from src.core.exceptions import (
    ConfigurationError,
    ErrorHandler,
    handle_error_and_raise,
)
from src.core.group_core import bidual_holds, subgroup
from src.services.channel import ChannelModel, pdp_for, pdp_table
from src.services.harness import AggregateRow, sweep
from src.utils.logger import configure_logging
from src.utils.metadata import run_metadata

# Create FastAPI app
app = FastAPI(
    title=settings.api.app_name,
    version=settings.api.app_version,
    description=settings.api.app_description,
    docs_url="/docs",
    redoc_url="/redoc",
)

# Configure CORS
app.add_middleware(CORSMiddleware, **settings.api.cors_config)


# Request/Response Models
class GroupResponse(BaseModel):
    n: int
    d: int
    h: List[int]
    h_perp: List[int]
    order_h: int
    order_h_perp: int
    bidual: bool


class ChannelResponse(BaseModel):
    model: str
    label: str
    n: int
    n_cp: int
    taps: List[Dict[str, float]]


class SweepRequest(BaseModel):
    trials: int = Field(..., ge=1)
    n: int = 256
    n_cp: Optional[int] = None
    epsilon: float = 0.15
    snr_grid_db: List[float] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0]
    d_grid: List[int] = [2, 8, 16, 64, 128]
    channel: Literal["tdl", "itu"] = "tdl"
    estimators: List[Literal["ls", "lmmse", "subgroup"]] = ["ls", "lmmse", "subgroup"]
    master_seed: int = 20240101
    deterministic_taps: bool = False
    fading: Optional[Literal["per_tap", "profile"]] = None


class SweepResponse(BaseModel):
    success: bool
    rows: List[AggregateRow]
    metadata: Dict[str, Any]


@app.on_event("startup")
async def startup_event():
    """Install log sinks on startup."""
    configure_logging()
    logger.info(f"Starting {settings.api.app_name} v{settings.api.app_version}")


@app.get("/health")
async def health_check():
    """Simple health check endpoint."""
    return {
        "status": "healthy",
        "version": settings.app.app_version,
        "metadata": run_metadata(settings.simulation).get_metadata(),
    }


@app.get(f"{settings.api.api_prefix}/group/{{n}}/{{d}}", response_model=GroupResponse)
async def inspect_group(n: int, d: int):
    """Subgroup <d> of Z_n, its annihilator and the bidual check."""
    if n > settings.api.max_api_n:
        raise HTTPException(
            status_code=400,
            detail={
                "error": "REQUEST_LIMIT",
                "message": f"At most n={settings.api.max_api_n} over HTTP",
            },
        )
    try:
        spec = subgroup(n, d)
        return GroupResponse(
            n=spec.n,
            d=spec.d,
            h=list(spec.elements_h),
            h_perp=list(spec.elements_h_perp),
            order_h=spec.order,
            order_h_perp=spec.perp_order,
            bidual=bidual_holds(spec),
        )
    except Exception as e:
        handle_error_and_raise(e, "inspect_group")


@app.get(
    f"{settings.api.api_prefix}/channel/{{model}}", response_model=ChannelResponse
)
async def inspect_channel(
    model: str, n: int = 256, n_cp: Optional[int] = None, d: Optional[int] = None
):
    """Power delay profile of a channel family on the sample grid."""
    try:
        try:
            channel = ChannelModel(model)
        except ValueError:
            raise HTTPException(
                status_code=404, detail=f"Unknown channel model '{model}'"
            ) from None
        if channel is ChannelModel.TDL and d is None:
            raise ConfigurationError("d is required for the tdl channel", config_key="d")

        config = SimConfig.build(n=n, n_cp=n_cp, channel=channel.value, d_grid=[])
        pdp = pdp_for(
            channel,
            config.n,
            d if d is not None else config.n,
            config.cp_length,
            config.tdl_decay_rate,
            config.symbol_duration_us,
        )
        return ChannelResponse(
            model=channel.value,
            label=pdp.label,
            n=config.n,
            n_cp=config.cp_length,
            taps=pdp_table(pdp, config.symbol_duration_us, config.n),
        )
    except HTTPException:
        raise
    except Exception as e:
        handle_error_and_raise(e, "inspect_channel")


@app.post(f"{settings.api.api_prefix}/sweep", response_model=SweepResponse)
def run_sweep(request: SweepRequest):
    """Run a small fixed-trial sweep and return the aggregate rows."""
    cells = len(request.d_grid) * len(request.snr_grid_db)
    violation = settings.api.sweep_limit_violation(request.trials, request.n, cells)
    if violation:
        raise HTTPException(
            status_code=400,
            detail={"error": "REQUEST_LIMIT", "message": violation},
        )

    try:
        config = SimConfig.build(
            **request.model_dump(exclude={"trials"}), trials=str(request.trials)
        )
        rows = sweep(config)
        return SweepResponse(
            success=True,
            rows=rows,
            metadata=run_metadata(config).get_metadata(),
        )
    except Exception as e:
        ErrorHandler.log_error(e, "run_sweep")
        raise ErrorHandler.to_http_exception(e) from e


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "src.api.main:app",
        host=settings.api.api_host,
        port=settings.api.api_port,
        reload=not settings.app.is_production,
    )
