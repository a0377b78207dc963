"""Moments, cubatures and phase retrieval over orbits of symmetric matrices."""

from ._grassrec import (
    CubatureError,
    DimensionError,
    GolfingError,
    InfeasibleError,
    InvalidArgument,
    UnsupportedDegree,
    build_cubature,
    deterministic_guarantee,
    golfing_certificate,
    haar_sample,
    haar_samples,
    isometry_constants,
    load_ensemble,
    measure,
    moment_coefficients,
    rank1_projector_moment,
    recovery_error,
    run_sweep,
    save_ensemble,
    solve,
    trace_moment,
    verify_strength,
    zonal,
)


def e1(d):
    return [1.0] + [0.0] * (d - 1)


def projector(d, k):
    return [1.0] * k + [0.0] * (d - k)


__all__ = [name for name in dir() if not name.startswith("_")]
