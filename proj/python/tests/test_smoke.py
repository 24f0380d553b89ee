import json

import numpy as np
import pytest

import gsynth

SMALL = {
    "recordings_per_gesture": 2,
    "gestures": ["swipe_up", "peace_sign"],
    "resolution": [64, 48],
    "cameras": [{"id": "depth0"}, {"id": "rgb1", "kind": "rgb", "preset": "top"}],
}


def test_seed_golden_vectors():
    assert gsynth.derive_seed(0, "swipe_right", 0, "depth0") == 484810895217554690
    assert gsynth.derive_seed(42, "peace_sign", 7, "ir1") == 638114242078489730


def test_scale_range():
    assert gsynth.scale_range(0.0, 50.0, "low") == (12.5, 37.5)
    assert gsynth.scale_range(0.0, 50.0, "high") == (-25.0, 75.0)
    assert gsynth.scale_range(0.0, 50.0, "median") == (0.0, 50.0)
    with pytest.raises(gsynth.ConfigError):
        gsynth.scale_range(0.0, 1.0, "extreme")


def test_config_round_trip_and_errors():
    canon = gsynth.parse_config(SMALL)
    assert gsynth.parse_config(json.dumps(canon)) == canon
    assert len(gsynth.config_digest(SMALL)) == 16
    with pytest.raises(gsynth.ConfigError, match="fps"):
        gsynth.parse_config({"fps": -1})
    with pytest.raises(gsynth.Error):
        gsynth.parse_config("{not json")


def test_ik_reaches_target_and_keypoints():
    target = np.array([10.0, 30.0, -40.0])
    elbow, wrist, clamped = gsynth.solve_two_bone_ik(target)
    assert not clamped
    assert np.allclose(wrist, target)
    assert abs(np.linalg.norm(elbow - np.array([18.0, 45.0, 0.0])) - 30.0) < 1e-9
    kp = gsynth.hand_keypoints(target, np.array([0.0, 1.0, 0.0]))
    assert kp.shape == (7, 3)


def test_variant_and_timeline():
    v1 = gsynth.sample_variant(SMALL, 123, 0)
    assert v1 == gsynth.sample_variant(SMALL, 123, 0)
    assert 0.0 <= v1["speed_offset"] <= 50.0
    tl = gsynth.timeline(SMALL, "swipe_up")
    kinds = [p["kind"] for p in tl["phases"]]
    assert kinds[0] == "pre_gesture" and kinds[-1] == "post_gesture"
    assert tl["phases"][-1]["end_frame"] == tl["total_frames"]


def test_render_preview_shapes():
    depth = gsynth.render_preview(SMALL, "swipe_up", 5)
    assert depth.dtype == np.uint16 and depth.shape == (48, 64)
    assert (depth > 0).any()
    rgb = gsynth.render_preview(SMALL, "swipe_up", 5, camera="rgb1")
    assert rgb.dtype == np.uint8 and rgb.shape == (48, 64, 3)
    with pytest.raises(gsynth.ConfigError):
        gsynth.render_preview(SMALL, "no_such_gesture", 0)


def test_generate_manifest_and_slice(tmp_path):
    out = tmp_path / "ds"
    summary = gsynth.generate(SMALL, out)
    assert summary["recordings"] == 8
    man = gsynth.read_manifest(out / "manifest.json")
    assert len(man["entries"]) == 8
    first = man["entries"][0]
    frame = gsynth.read_frame(out / first["frame_dir"] / "frame_00000.pgm") if first["camera_id"] == "depth0" else None
    if frame is not None:
        assert frame.shape == (48, 64)
    assert len(gsynth.slice_by_ratio(out / "manifest.json", 50, 2)) == 4
    with pytest.raises(gsynth.IoError):
        gsynth.generate(SMALL, out)
    again = gsynth.generate(SMALL, out, force=True)
    assert again["config_digest"] == summary["config_digest"]


def test_dtw_and_trajectory():
    a = np.array([[0.0, 0, 0], [1, 0, 0], [2, 0, 0]])
    assert gsynth.dtw_distance(a, a) == 0.0
    assert gsynth.dtw_distance(a, a + [0, 1, 0]) == pytest.approx(3.0)
    pts, conf = gsynth.trajectory(SMALL, "swipe_up", 0)
    assert pts.shape[1] == 3 and pts.shape[0] > 0
    assert 0.0 <= conf <= 1.0
