import math
import os

import numpy as np
import pytest

import vor_cursor as vc


def test_geometry_values():
    assert vc.fov_linear_extent(200, 56) == pytest.approx(212.9, abs=1.0)
    assert vc.degrees_per_pixel(23, 1920) == pytest.approx(0.012, abs=3e-4)
    assert math.hypot(960, 540) * vc.cm_per_pixel() == pytest.approx(30.4, abs=0.1)
    assert vc.visual_angle_to_screen_px(1.0) == pytest.approx(31.6, abs=0.1)


def test_table_transcription():
    assert vc.table1_new_position((25, 25), (35, 25)) == (15, -25)


def test_render_and_detect_round_trip():
    frame = vc.render_eye_frame(5.0, -3.0, seed=4, config="noise.enabled = false")
    assert frame.shape == (480, 640)
    assert frame.dtype == np.uint8
    result = vc.detect_pupil(frame)
    pupil = result["pupil"]
    assert pupil is not None
    assert abs(pupil["cx"] - (320 + 4 * 5.0)) <= 0.5
    assert abs(pupil["cy"] - (240 + 4 * 3.0)) <= 0.5


def test_blank_frame_has_no_pupil():
    assert vc.detect_pupil(np.full((120, 160), 200, dtype=np.uint8))["pupil"] is None


def test_contours_of_two_blobs():
    mask = np.zeros((10, 10), dtype=bool)
    mask[1:3, 1:3] = True
    mask[6, 6] = True
    contours = vc.find_contours(mask)
    assert len(contours) == 2
    assert contours[1] == [(6, 6)]


def test_trial_is_deterministic():
    a = vc.run_trial("smooth", 50, seed=3)
    b = vc.run_trial("smooth", 50, seed=3)
    assert a["success"]
    assert a["time_s"] == b["time_s"]
    assert np.array_equal(a["path"], b["path"])
    assert a["path"].shape[1] == 3


def test_small_experiment():
    rows = vc.run_experiment(repetitions=2, config="experiment.sizes = 100,9")
    assert [(r["mode"], r["size_px"]) for r in rows] == [
        ("smooth", 100.0),
        ("smooth", 9.0),
        ("saccadic", 100.0),
        ("saccadic", 9.0),
    ]
    assert all(r["n"] == 2 for r in rows)


def test_bad_config_raises():
    with pytest.raises(ValueError):
        vc.run_trial("smooth", 50, config="control.gain = -1")
    with pytest.raises(ValueError):
        vc.run_trial("sideways", 50)


def test_cli_exit_codes(tmp_path):
    code, _, err = vc.run_cli(["detect", os.fspath(tmp_path / "missing")])
    assert code == 1
    assert "missing" in err
    code, out, _ = vc.run_cli(["detect", os.fspath(tmp_path)])
    assert code == 0
    assert out.startswith("frame_index,found")
