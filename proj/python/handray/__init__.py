"""Radar ray tracing simulator for MIMO SFCW imaging of triangle meshes."""

from ._handray import (
    ArrayGeometry,
    DerivedMetrics,
    Image,
    Mesh,
    Volume,
    Waveform,
    backproject,
    backproject_reference,
    build_waveform,
    derived_metrics,
    finalize_image,
    load_mesh,
    make_hand,
    make_plate,
    max_project,
    reflect_specular,
    run_scenario,
    sample_diffuse,
    scatter,
    square_array,
    synthesize_cube,
    trace,
    validate_scenario,
)

__all__ = [name for name in dir() if not name.startswith("_")]
