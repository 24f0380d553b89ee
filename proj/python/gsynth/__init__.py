"""Synthetic in-car hand gesture datasets.

Configs are passed around as JSON text or plain dicts; frames come back as
numpy arrays (uint16 HxW for depth, uint8 HxWx3 for RGB and infrared).
"""

from __future__ import annotations

import json
import os
from typing import Any, Mapping, Union

from . import _gsynth
from ._gsynth import (
    ConfigError,
    Error,
    InvariantError,
    IoError,
    builtin_gestures,
    derive_seed,
    dtw_distance,
    hand_keypoints,
    read_frame,
    scale_range,
    solve_two_bone_ik,
)

__version__ = _gsynth.__version__

ConfigLike = Union[str, Mapping[str, Any], None]


def _text(config: ConfigLike) -> str:
    if config is None:
        return "{}"
    if isinstance(config, str):
        return config
    return json.dumps(config)


def load_config(path: Union[str, os.PathLike]) -> dict:
    """Reads, validates and canonicalizes a config file."""
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def parse_config(config: ConfigLike) -> dict:
    """Validated config with every default filled in. Raises ConfigError."""
    return json.loads(_gsynth.parse_config(_text(config)))


def config_digest(config: ConfigLike) -> str:
    return _gsynth.config_digest(_text(config))


def sample_variant(config: ConfigLike, seed: int, index: int = 0) -> dict:
    return json.loads(_gsynth.sample_variant(_text(config), seed, index))


def timeline(config: ConfigLike, gesture: str, variant: int = 0) -> dict:
    return _gsynth.timeline(_text(config), gesture, variant)


def render_preview(config: ConfigLike, gesture: str, frame: int, camera: str = "depth0", variant: int = 0):
    return _gsynth.render_preview(_text(config), gesture, frame, camera, variant)


def generate(config: ConfigLike, out: Union[str, os.PathLike, None] = None, jobs: int = 1,
             force: bool = False) -> dict:
    """Writes a dataset and returns the run summary."""
    return _gsynth.generate(_text(config), os.fspath(out) if out is not None else "", jobs, force)


def read_manifest(path: Union[str, os.PathLike]) -> dict:
    return json.loads(_gsynth.read_manifest(os.fspath(path)))


def slice_by_ratio(manifest: Union[str, os.PathLike], ratio: float, base: int) -> list:
    """(camera_id, gesture_label, variant_index) of the first ratio% of each group."""
    return _gsynth.slice_by_ratio(os.fspath(manifest), ratio, base)


def trajectory(config: ConfigLike, gesture: str, variant: int = 0, camera: str = ""):
    """Centroid trajectory (N x 3) and confidence of one in-memory recording."""
    return _gsynth.trajectory(_text(config), gesture, variant, camera)


def separability(manifest: Union[str, os.PathLike], jobs: int = 1) -> dict:
    return json.loads(_gsynth.separability(os.fspath(manifest), jobs))


def variance_ablation(config: ConfigLike, param: str, n_variants: int = 20, gesture: str = "swipe_right",
                      isolate: bool = True, jobs: int = 1) -> dict:
    return json.loads(_gsynth.variance_ablation(_text(config), param, n_variants, gesture, isolate, jobs))


__all__ = [
    "ConfigError", "Error", "InvariantError", "IoError", "builtin_gestures", "config_digest",
    "derive_seed", "dtw_distance", "generate", "hand_keypoints", "load_config", "parse_config",
    "read_frame", "read_manifest", "render_preview", "sample_variant", "scale_range", "separability",
    "slice_by_ratio", "solve_two_bone_ik", "timeline", "trajectory", "variance_ablation",
]
