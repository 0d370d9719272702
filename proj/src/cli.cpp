#include "vorcursor/cli.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "vorcursor/config.hpp"
#include "vorcursor/error.hpp"
#include "vorcursor/experiments.hpp"
#include "vorcursor/image.hpp"
#include "vorcursor/pupil_detect.hpp"
#include "vorcursor/server.hpp"
#include "vorcursor/synth_eye.hpp"

namespace vorcursor {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
};

// Raised for bad command-line paths (missing input, unusable output dir).
class UsageError : public Error {
public:
    using Error::Error;
};

AppConfig load_app_config(const CommonOptions& opt) {
    if (opt.config_path.empty()) return AppConfig{};
    if (!fs::exists(opt.config_path)) throw UsageError("config file '" + opt.config_path + "' does not exist");
    return load_config(opt.config_path);
}

void ensure_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory '" + dir.string() + "'");
    // Probe writability up front so an unusable directory is a usage error.
    const fs::path probe = dir / ".vor-cursor-write-test";
    {
        std::ofstream f(probe);
        if (!f) throw UsageError("output directory '" + dir.string() + "' is not writable");
    }
    fs::remove(probe, ec);
}

std::string safe_name(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

int cmd_render(const CommonOptions& opt, std::ostream& out, std::ostream& err) {
    const AppConfig cfg = load_app_config(opt);
    if (opt.out.empty()) throw UsageError("render needs --out <dir>");
    const fs::path dir = opt.out;
    ensure_output_dir(dir);
    const std::uint64_t seed = opt.seed.value_or(0);
    const auto states = cfg.render.states();

    std::ostringstream index;
    index << "frame_index,sweep_index,yaw_deg,pitch_deg,frame_seed\n";
    int written = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const EyeState& eye = states[i];
        const std::uint64_t frame_seed = derive_seed(seed, i);
        GrayFrame frame;
        try {
            frame = render_eye_frame(eye, cfg.sim.eye, cfg.sim.noise, frame_seed);
        } catch (const DegenerateError& e) {
            err << "warning: skipping yaw " << eye.yaw_deg << " pitch " << eye.pitch_deg << ": " << e.what() << '\n';
            continue;
        } catch (const ConfigError& e) {
            err << "warning: skipping yaw " << eye.yaw_deg << " pitch " << eye.pitch_deg << ": " << e.what() << '\n';
            continue;
        }
        save_pgm(frame, dir / sequence_frame_name(written));
        index << written << ',' << i << ',' << csv_number(eye.yaw_deg) << ',' << csv_number(eye.pitch_deg) << ','
              << frame_seed << '\n';
        ++written;
    }
    auto meta = describe_render_setup(cfg.sim.eye, cfg.sim.noise, seed);
    meta["frames"] = std::to_string(written);
    meta["frame_seed"] = "derive_seed(seed, sweep_index)";
    write_sequence_meta(dir, meta);
    std::ofstream idx(dir / "frames.csv", std::ios::binary);
    idx << index.str();
    if (!idx) throw IoError("cannot write '" + (dir / "frames.csv").string() + "'");
    out << "wrote " << written << " frames to " << dir.string() << '\n';
    return kExitOk;
}

int cmd_detect(const CommonOptions& opt, const std::string& input, std::ostream& out, std::ostream&) {
    const AppConfig cfg = load_app_config(opt);
    const fs::path in = input;
    if (!fs::exists(in)) throw UsageError("input '" + input + "' does not exist");
    const std::vector<fs::path> files = fs::is_directory(in) ? list_sequence_frames(in) : std::vector<fs::path>{in};

    std::ostringstream csv;
    csv << "frame_index,found,cx,cy,radius,area,score,threshold,error\n";
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::string note;
        try {
            const GrayFrame frame = load_pgm(files[i]);
            const DetectResult r = detect_pupil(frame, cfg.sim.detector);
            csv << i << ',';
            if (r.pupil) {
                const auto& p = *r.pupil;
                csv << "1," << csv_number(p.center.x) << ',' << csv_number(p.center.y) << ','
                    << csv_number(p.radius_px) << ',' << csv_number(p.area_px2) << ',' << csv_number(p.score) << ','
                    << r.threshold << ",\n";
            } else {
                csv << "0,,,,,," << r.threshold << ",no pupil\n";
            }
            continue;
        } catch (const Error& e) {
            note = e.what();
        }
        std::replace(note.begin(), note.end(), ',', ';');
        std::replace(note.begin(), note.end(), '\n', ' ');
        csv << i << ",0,,,,,,," << files[i].filename().string() << ": " << note << '\n';
    }
    if (opt.out.empty()) {
        out << csv.str();
    } else {
        std::ofstream f(opt.out, std::ios::binary);
        if (!f) throw UsageError("cannot open '" + opt.out + "' for writing");
        f << csv.str();
        if (!f) throw IoError("write failed for '" + opt.out + "'");
    }
    return kExitOk;
}

std::vector<RunSection> load_run_file(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("run file '" + path + "' does not exist");
    return parse_run_file(read_text_file(path), path);
}

int cmd_simulate(const CommonOptions& opt, const std::string& run_path, std::ostream& out, std::ostream&) {
    const AppConfig base = load_app_config(opt);
    auto specs = trial_specs(load_run_file(run_path), base, run_path);
    if (opt.out.empty()) throw UsageError("simulate needs --out <dir>");
    const fs::path dir = opt.out;
    ensure_output_dir(dir);
    fs::create_directories(dir / "paths");

    std::ostringstream csv;
    csv << "name,mode,target_cx,target_cy,size_px,seed,success,final_x,final_y,dist_px,time_s,frames\n";
    for (auto& spec : specs) {
        if (opt.seed) spec.seeds = {*opt.seed};
        int successes = 0;
        double dist = 0.0;
        for (std::uint64_t seed : spec.seeds) {
            const TrialResult r = run_trial(spec.mode, spec.target, spec.config.sim, seed);
            csv << spec.name << ',' << mode_name(spec.mode) << ',' << csv_number(spec.target.center.x) << ','
                << csv_number(spec.target.center.y) << ',' << csv_number(spec.target.size_px) << ',' << seed << ','
                << (r.success ? 1 : 0) << ',' << csv_number(r.final_pos.x) << ',' << csv_number(r.final_pos.y) << ','
                << csv_number(r.distance_to_center_px) << ','
                << (r.time_to_enter_s ? csv_number(*r.time_to_enter_s) : std::string()) << ',' << r.frames << '\n';
            export_path_csv(r.path, dir / "paths" / (safe_name(spec.name) + "_seed" + std::to_string(seed) + ".csv"));
            successes += r.success ? 1 : 0;
            dist += r.distance_to_center_px;
        }
        char line[256];
        std::snprintf(line, sizeof line, "%s: %s, %gx%g target, %d/%zu success, mean distance %.2f px\n",
                      spec.name.c_str(), std::string(mode_name(spec.mode)).c_str(), spec.target.size_px,
                      spec.target.size_px, successes, spec.seeds.size(),
                      spec.seeds.empty() ? 0.0 : dist / spec.seeds.size());
        out << line;
    }
    const fs::path trials = dir / "trials.csv";
    std::ofstream f(trials, std::ios::binary);
    f << csv.str();
    if (!f) throw IoError("write failed for '" + trials.string() + "'");
    return kExitOk;
}

void write_experiment(const ExperimentSpec& spec, const fs::path& dir, std::ostream& out) {
    const ExperimentResult result = run_experiment(spec.config.plan, spec.config.sim);
    export_accuracy_csv(result.table, dir / "accuracy.csv");
    export_trials_csv(result.trials, dir / "trials.csv");
    // Tracking curves: first repetition on the first square size, per mode.
    std::vector<std::pair<Mode, const TrialResult*>> curves;
    for (Mode mode : spec.config.plan.modes) {
        for (const auto& t : result.trials) {
            if (t.slot.mode == mode && t.slot.repetition == 0 && t.slot.size_index == 0) {
                curves.emplace_back(mode, &t.result);
                break;
            }
        }
    }
    export_curve_csv(curves, dir / "curves.csv");
    const std::string summary = summary_report(result, spec.config.sim.screen);
    std::ofstream f(dir / "summary.txt", std::ios::binary);
    f << summary;
    if (!f) throw IoError("write failed for '" + (dir / "summary.txt").string() + "'");
    out << "[" << spec.name << "]\n" << summary;
}

int cmd_experiment(const CommonOptions& opt, const std::string& run_path, std::ostream& out, std::ostream&) {
    AppConfig base = load_app_config(opt);
    if (opt.seed) base.plan.seed_base = *opt.seed;
    std::vector<ExperimentSpec> specs;
    if (run_path.empty()) {
        specs.push_back({"experiment", base});
    } else {
        specs = experiment_specs(load_run_file(run_path), base, run_path);
        if (opt.seed)
            for (auto& s : specs) s.config.plan.seed_base = *opt.seed;
    }
    if (opt.out.empty()) throw UsageError("experiment needs --out <dir>");
    const fs::path dir = opt.out;
    ensure_output_dir(dir);
    for (const auto& spec : specs) {
        const fs::path sub = run_path.empty() ? dir : dir / safe_name(spec.name);
        ensure_output_dir(sub);
        write_experiment(spec, sub, out);
    }
    return kExitOk;
}

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

int cmd_serve(const CommonOptions& opt, unsigned short port, std::optional<long> frames, std::ostream& out) {
    const AppConfig cfg = load_app_config(opt);
    ServerOptions so;
    so.port = port;
    so.max_frames = frames;
    LiveServer server(cfg.sim, so);
    server.start();
    out << "serving on ws://127.0.0.1:" << server.port() << "/" << std::endl;
    g_interrupted = false;
    auto previous_int = std::signal(SIGINT, on_signal);
    auto previous_term = std::signal(SIGTERM, on_signal);
    while (!g_interrupted && !server.wait_for(std::chrono::milliseconds(100))) {
    }
    server.stop();
    std::signal(SIGINT, previous_int);
    std::signal(SIGTERM, previous_term);
    const TickStats st = server.tick_stats();
    char line[160];
    std::snprintf(line, sizeof line, "ticks %ld, mean period %.3f ms, p99 jitter %.3f ms\n", st.ticks,
                  st.mean_period_ms, st.p99_jitter_ms);
    out << line;
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Smooth (VOR) and saccadic eye-movement cursor control simulator", "vor-cursor"};
    app.require_subcommand(1);
    CommonOptions opt;
    const auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "key=value config file");
        sub->add_option("--out", opt.out, "output directory (detect: CSV file; default stdout)");
        sub->add_option("--seed", opt.seed, "random seed (simulate: overrides run-file seeds; experiment: seed base)");
    };
    auto* render = app.add_subcommand("render", "render an eye-state sweep to a PGM sequence directory");
    add_common(render);
    std::string input;
    auto* detect = app.add_subcommand("detect", "detect pupils in a PGM file or directory, CSV output");
    add_common(detect);
    detect->add_option("input", input, "PGM file or sequence directory")->required();
    std::string run_path;
    auto* simulate = app.add_subcommand("simulate", "run the trials of a run file");
    add_common(simulate);
    simulate->add_option("runfile", run_path, "run file with [trial] sections")->required();
    auto* experiment = app.add_subcommand("experiment", "run the accuracy/time experiment protocol");
    add_common(experiment);
    experiment->add_option("runfile", run_path, "optional run file with [experiment] sections");
    unsigned short port = 8765;
    std::optional<long> frames;
    auto* serve = app.add_subcommand("serve", "run the live simulator behind a WebSocket endpoint");
    add_common(serve);
    serve->add_option("--port", port, "TCP port on 127.0.0.1 (0 = ephemeral)");
    serve->add_option("--frames", frames, "stop after this many frames");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (render->parsed()) return cmd_render(opt, out, err);
        if (detect->parsed()) return cmd_detect(opt, input, out, err);
        if (simulate->parsed()) return cmd_simulate(opt, run_path, out, err);
        if (experiment->parsed()) return cmd_experiment(opt, run_path, out, err);
        if (serve->parsed()) return cmd_serve(opt, port, frames, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace vorcursor
