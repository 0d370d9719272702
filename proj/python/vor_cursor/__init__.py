"""Python access to the VOR cursor control simulator.

Configuration is passed as key=value text, the same format the
command-line tool reads with --config.
"""

from ._core import (
    ConfigError,
    Error,
    IoError,
    cm_per_pixel,
    degrees_per_pixel,
    detect_pupil,
    find_contours,
    fov_linear_extent,
    render_eye_frame,
    run_cli,
    run_experiment,
    run_trial,
    table1_new_position,
    visual_angle_to_screen_px,
)

__all__ = [
    "ConfigError",
    "Error",
    "IoError",
    "cm_per_pixel",
    "degrees_per_pixel",
    "detect_pupil",
    "find_contours",
    "fov_linear_extent",
    "render_eye_frame",
    "run_cli",
    "run_experiment",
    "run_trial",
    "table1_new_position",
    "visual_angle_to_screen_px",
]
