"""JSON configuration: nested sections map 1:1 onto the pipeline
parameter groups. Unknown keys and out-of-range values raise
ConfigError.
"""
from __future__ import annotations

import json
from dataclasses import fields

from .bgsub import SubtractorParams
from .errors import ConfigError
from .fusion import FusionParams, PipelineParams

_SECTIONS = {
    "bgsub": ("subtractor", SubtractorParams),
    "fusion": ("fusion", FusionParams),
}

_MOTION_KEYS = {"window": "motion_window", "trend_eps": "trend_eps"}
_PIPELINE_KEYS = {
    "segment_len": "segment_len",
    "target_width": "target_width",
    "target_height": "target_height",
    "min_area": "min_area",
    "kernel_radius_x": "kernel_radius_x",
    "kernel_radius_y": "kernel_radius_y",
    "motion_only": "motion_only",
}


def params_from_dict(cfg: dict) -> PipelineParams:
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    params = PipelineParams()
    for section, content in cfg.items():
        if section in _SECTIONS:
            attr, cls = _SECTIONS[section]
            target = getattr(params, attr)
            known = {f.name for f in fields(cls)}
            if not isinstance(content, dict):
                raise ConfigError(f"section '{section}' must be an object")
            for key, value in content.items():
                if key not in known:
                    raise ConfigError(f"unknown config key '{section}.{key}'")
                if key == "boosted_levels":
                    value = tuple(value)
                setattr(target, key, value)
        elif section == "motion":
            for key, value in _expect_obj(section, content).items():
                if key not in _MOTION_KEYS:
                    raise ConfigError(f"unknown config key 'motion.{key}'")
                setattr(params, _MOTION_KEYS[key], value)
        elif section == "pipeline":
            for key, value in _expect_obj(section, content).items():
                if key not in _PIPELINE_KEYS:
                    raise ConfigError(f"unknown config key 'pipeline.{key}'")
                setattr(params, _PIPELINE_KEYS[key], value)
        else:
            raise ConfigError(f"unknown config section '{section}'")
    try:
        params.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return params


def _expect_obj(section, content):
    if not isinstance(content, dict):
        raise ConfigError(f"section '{section}' must be an object")
    return content


def load_config(path) -> PipelineParams:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return params_from_dict(cfg)


def config_echo(params: PipelineParams) -> dict:
    """Full nested config (defaults included) for report embedding."""
    sub = params.subtractor
    fus = params.fusion
    return {
        "bgsub": {
            "k_max": sub.k_max,
            "learning_rate": sub.learning_rate,
            "match_threshold_sq": sub.match_threshold_sq,
            "background_ratio": sub.background_ratio,
            "initial_variance": sub.initial_variance,
            "variance_floor": sub.variance_floor,
            "new_component_weight": sub.new_component_weight,
        },
        "motion": {"window": params.motion_window, "trend_eps": params.trend_eps},
        "fusion": {
            "low_motion_threshold": fus.low_motion_threshold,
            "rule_window": fus.rule_window,
            "alpha_boost": fus.alpha_boost,
            "alpha_damp": fus.alpha_damp,
            "boosted_levels": list(fus.boosted_levels),
            "high_motion_coverage": fus.high_motion_coverage,
            "high_motion_stability": fus.high_motion_stability,
            "presence_min_detections": fus.presence_min_detections,
            "presence_min_density": fus.presence_min_density,
            "segment_smoothing_window": fus.segment_smoothing_window,
            "aggregator": fus.aggregator,
            "smooth_frame_levels": fus.smooth_frame_levels,
        },
        "pipeline": {
            "segment_len": params.segment_len,
            "target_width": params.target_width,
            "target_height": params.target_height,
            "min_area": params.min_area,
            "kernel_radius_x": params.kernel_radius_x,
            "kernel_radius_y": params.kernel_radius_y,
            "motion_only": params.motion_only,
        },
    }
