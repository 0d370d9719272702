#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "vorcursor/cli.hpp"
#include "vorcursor/config.hpp"
#include "vorcursor/contours.hpp"
#include "vorcursor/error.hpp"
#include "vorcursor/experiments.hpp"
#include "vorcursor/geometry.hpp"
#include "vorcursor/gaze_control.hpp"
#include "vorcursor/pupil_detect.hpp"
#include "vorcursor/synth_eye.hpp"
#include "vorcursor/vor_sim.hpp"

namespace py = pybind11;
using namespace vorcursor;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

U8Array to_numpy(const GrayFrame& f) {
    U8Array arr({f.height(), f.width()});
    std::copy(f.pixels().begin(), f.pixels().end(), arr.mutable_data());
    return arr;
}

GrayFrame from_numpy(const U8Array& arr) {
    if (arr.ndim() != 2) throw py::value_error("expected a 2-D uint8 array");
    const int h = static_cast<int>(arr.shape(0)), w = static_cast<int>(arr.shape(1));
    return GrayFrame(w, h, std::vector<std::uint8_t>(arr.data(), arr.data() + arr.size()));
}

AppConfig config_from(const std::string& text) { return parse_config(text, "<python>"); }

py::dict detection_dict(const DetectResult& r) {
    py::dict d;
    d["threshold"] = r.threshold;
    d["contour_count"] = r.contour_count;
    if (!r.pupil) {
        d["pupil"] = py::none();
        return d;
    }
    py::dict p;
    p["cx"] = r.pupil->center.x;
    p["cy"] = r.pupil->center.y;
    p["radius"] = r.pupil->radius_px;
    p["area"] = r.pupil->area_px2;
    p["score"] = r.pupil->score;
    d["pupil"] = p;
    return d;
}

py::dict trial_dict(const TrialResult& r) {
    py::dict d;
    d["success"] = r.success;
    d["final_x"] = r.final_pos.x;
    d["final_y"] = r.final_pos.y;
    d["distance_px"] = r.distance_to_center_px;
    d["time_s"] = r.time_to_enter_s ? py::cast(*r.time_to_enter_s) : py::none();
    d["frames"] = r.frames;
    d["seed"] = r.seed;
    py::array_t<double> path({static_cast<py::ssize_t>(r.path.size()), py::ssize_t{3}});
    auto m = path.mutable_unchecked<2>();
    for (std::size_t i = 0; i < r.path.size(); ++i) {
        m(i, 0) = r.path[i].t_s;
        m(i, 1) = r.path[i].cursor.x;
        m(i, 2) = r.path[i].cursor.y;
    }
    d["path"] = path;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "VOR cursor control simulator core";

    // Translators run newest first, so the base class goes in first.
    py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("fov_linear_extent", &fov_linear_extent, py::arg("focal_distance_mm"), py::arg("fov_deg"));
    m.def("degrees_per_pixel", &degrees_per_pixel, py::arg("fov_deg"), py::arg("extent_px"));
    m.def("cm_per_pixel", [](const std::string& config) { return cm_per_pixel(config_from(config).sim.screen); },
          py::arg("config") = "");
    m.def("visual_angle_to_screen_px",
          [](double deg, const std::string& config) { return visual_angle_to_screen_px(deg, config_from(config).sim.screen); },
          py::arg("angle_deg"), py::arg("config") = "");
    m.def("table1_new_position", [](std::pair<double, double> base, std::pair<double, double> pupil) {
        const Vec2 v = table1_new_position({base.first, base.second}, {pupil.first, pupil.second});
        return std::make_pair(v.x, v.y);
    });

    m.def(
        "render_eye_frame",
        [](double yaw, double pitch, std::uint64_t seed, const std::string& config) {
            const AppConfig c = config_from(config);
            return to_numpy(render_eye_frame({yaw, pitch}, c.sim.eye, c.sim.noise, seed));
        },
        py::arg("yaw_deg"), py::arg("pitch_deg"), py::arg("seed") = 0, py::arg("config") = "");
    m.def(
        "detect_pupil",
        [](const U8Array& frame, const std::string& config) {
            return detection_dict(detect_pupil(from_numpy(frame), config_from(config).sim.detector));
        },
        py::arg("frame"), py::arg("config") = "");
    m.def(
        "find_contours",
        [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& mask) {
            if (mask.ndim() != 2) throw py::value_error("expected a 2-D boolean array");
            BinaryImage img(static_cast<int>(mask.shape(1)), static_cast<int>(mask.shape(0)));
            auto v = mask.unchecked<2>();
            for (py::ssize_t y = 0; y < mask.shape(0); ++y)
                for (py::ssize_t x = 0; x < mask.shape(1); ++x) img.set(static_cast<int>(x), static_cast<int>(y), v(y, x));
            std::vector<std::vector<std::pair<int, int>>> out;
            for (const Contour& c : find_contours(img)) {
                auto& pts = out.emplace_back();
                for (const Point& p : c.points) pts.emplace_back(p.x, p.y);
            }
            return out;
        },
        py::arg("mask"));

    m.def(
        "run_trial",
        [](const std::string& mode, double size_px, std::uint64_t seed, std::pair<double, double> center,
           const std::string& config) {
            const AppConfig c = config_from(config);
            return trial_dict(run_trial(parse_mode(mode), TargetRect{{center.first, center.second}, size_px}, c.sim, seed));
        },
        py::arg("mode"), py::arg("size_px"), py::arg("seed") = 1, py::arg("center") = std::make_pair(960.0, 540.0),
        py::arg("config") = "");
    m.def(
        "run_experiment",
        [](int repetitions, std::uint64_t seed_base, const std::string& config) {
            AppConfig c = config_from(config);
            c.plan.repetitions = repetitions;
            c.plan.seed_base = seed_base;
            const ExperimentResult r = run_experiment(c.plan, c.sim);
            py::list rows;
            for (const auto& row : r.table) {
                py::dict d;
                d["mode"] = std::string(mode_name(row.mode));
                d["size_px"] = row.size_px;
                d["n"] = row.n;
                d["success_pct"] = row.success_pct;
                d["mean_dist_px"] = row.mean_dist_px;
                d["mean_dist_cm"] = row.mean_dist_cm;
                d["mean_time_s"] = row.mean_time_s ? py::cast(*row.mean_time_s) : py::none();
                rows.append(d);
            }
            return rows;
        },
        py::arg("repetitions") = 10, py::arg("seed_base") = 1, py::arg("config") = "");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
