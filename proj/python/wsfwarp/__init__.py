"""Wave-shape estimation and change-point detection for oscillatory signals."""

from ._wsfwarp import (
    analyze,
    default_config_json,
    run_benchmark,
    svd_entropy,
    synth_benchmark,
)

__all__ = [
    "analyze",
    "default_config_json",
    "run_benchmark",
    "svd_entropy",
    "synth_benchmark",
]
