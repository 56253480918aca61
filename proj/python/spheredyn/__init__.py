"""Random perturbations of diagonal projective dynamics on the sphere."""

import json as _json

from ._core import (
    DiagonalModel,
    Error,
    Partition,
    RadialLaw,
    annulus_scan,
    atom_check,
    ball_mass,
    ball_radius_for_mass,
    beta_cdf_c_norm,
    check_ids,
    coverage_scan,
    forbidden_annulus,
    haar_moment_oracle,
    local_gap,
    macroscopic_gap,
    max_local_gap,
    part_norms,
    plan_path,
    projected_measure_density,
    regularized_incomplete_beta,
    run_ensemble,
    sample_final_states,
    sample_haar_orthogonal,
    sample_uniform_sphere,
    theorem2_rhs,
    theorem2_threshold_d,
    z_statistic_transform,
)
from . import _core


def _as_text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def model_from_config(config):
    """Model from a config dict or JSON text (only the "model" block is read)."""
    return _core.model_from_config(_as_text(config))


def normalize_config(config):
    """Validated config with every default filled in, as a dict."""
    return _json.loads(_core.normalize_config(_as_text(config)))


def verify(config, seed=None):
    """Runs the checks selected by the config; one dict per check record."""
    return _core.verify_config(_as_text(config), seed)


__all__ = [name for name in dir() if not name.startswith("_")]
