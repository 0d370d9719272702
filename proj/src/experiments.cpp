#include "vorcursor/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "vorcursor/error.hpp"

namespace vorcursor {
namespace {

constexpr std::uint64_t kTrialStream = 0x545249414c;  // "TRIAL"
constexpr std::uint64_t kSessionStream = 0x53455353;  // "SESS"

std::uint64_t mode_tag(Mode mode) { return mode == Mode::Smooth ? 1 : 2; }

struct HumanReference {
    double size_px;
    double smooth_pct;
    double saccadic_pct;
};

// Human-study success rates per square size, shown next to simulated rows.
constexpr HumanReference kReferenceRates[] = {
    {100.0, 100.0, 75.0}, {50.0, 100.0, 65.0}, {25.0, 100.0, 5.0}, {9.0, 90.0, 0.0}};
constexpr double kReferenceDistSmooth = 27.9;
constexpr double kReferenceDistSaccadic = 140.1;
constexpr double kReferenceTimeSmooth = 6.45;
constexpr double kReferenceTimeSaccadic = 2.61;

std::optional<double> reference_rate(Mode mode, double size) {
    for (const auto& r : kReferenceRates)
        if (r.size_px == size) return mode == Mode::Smooth ? r.smooth_pct : r.saccadic_pct;
    return std::nullopt;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

void ExperimentPlan::validate() const {
    if (square_sizes_px.empty()) throw ConfigError("experiment needs at least one square size");
    for (double s : square_sizes_px)
        if (!(s > 0.0)) throw ConfigError("square sizes must be positive");
    if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (modes.empty()) throw ConfigError("experiment needs at least one mode");
    if (trials_per_session < 1) throw ConfigError("trials_per_session must be at least 1");
    if (!(inter_trial_s >= 0.0)) throw ConfigError("inter_trial_s must be non-negative");
}

std::string csv_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    std::string s = buf;
    if (s == "-0.000000") s = "0.000000";
    return s;
}

TrialSlot plan_slot(const ExperimentPlan& plan, Mode mode, int size_index, int repetition) {
    const long n_sizes = static_cast<long>(plan.square_sizes_px.size());
    const long g = static_cast<long>(repetition) * n_sizes + size_index;
    TrialSlot slot;
    slot.mode = mode;
    slot.size_index = size_index;
    slot.size_px = plan.square_sizes_px.at(static_cast<std::size_t>(size_index));
    slot.repetition = repetition;
    slot.seed = derive_seed(derive_seed(plan.seed_base, kTrialStream + mode_tag(mode)), static_cast<std::uint64_t>(g));
    slot.session = g / plan.trials_per_session;
    slot.session_offset_s = static_cast<double>(g % plan.trials_per_session) * plan.inter_trial_s;
    Rng bearing(derive_seed(derive_seed(plan.seed_base, kSessionStream + mode_tag(mode)),
                            static_cast<std::uint64_t>(slot.session)));
    slot.drift_direction_deg = bearing.uniform(0.0, 360.0);
    return slot;
}

TrialResult run_slot(const ExperimentPlan& plan, const TrialSlot& slot, const SimConfig& config) {
    SimConfig cfg = config;
    cfg.start_px = plan.start;
    cfg.saccadic_noise.drift_direction_deg = slot.drift_direction_deg;
    const TargetRect target{plan.target_center, slot.size_px};
    return run_trial(slot.mode, target, cfg, slot.seed, slot.session_offset_s);
}

ExperimentResult run_experiment(const ExperimentPlan& plan, const SimConfig& config) {
    plan.validate();
    config.validate();
    ExperimentResult out;
    for (Mode mode : plan.modes) {
        for (int rep = 0; rep < plan.repetitions; ++rep) {
            for (int si = 0; si < static_cast<int>(plan.square_sizes_px.size()); ++si) {
                TrialRecord rec;
                rec.slot = plan_slot(plan, mode, si, rep);
                rec.result = run_slot(plan, rec.slot, config);
                out.trials.push_back(std::move(rec));
            }
        }
    }
    out.table = aggregate(out.trials, config.screen);
    return out;
}

std::vector<AccuracyRow> aggregate(const std::vector<TrialRecord>& trials, const ScreenConfig& screen) {
    struct Acc {
        int n = 0, successes = 0;
        double dist = 0.0, dist2 = 0.0, time = 0.0;
    };
    std::vector<std::pair<Mode, double>> order;
    std::map<std::pair<int, double>, Acc> acc;
    for (const auto& t : trials) {
        const auto key = std::make_pair(static_cast<int>(t.slot.mode), t.slot.size_px);
        if (!acc.count(key)) order.emplace_back(t.slot.mode, t.slot.size_px);
        Acc& a = acc[key];
        ++a.n;
        const double d = t.result.distance_to_center_px;
        a.dist += d;
        a.dist2 += d * d;
        if (t.result.success) {
            ++a.successes;
            a.time += t.result.time_to_enter_s.value_or(0.0);
        }
    }
    const double cmpp = cm_per_pixel(screen);
    std::vector<AccuracyRow> rows;
    for (const auto& [mode, size] : order) {
        const Acc& a = acc.at({static_cast<int>(mode), size});
        AccuracyRow r;
        r.mode = mode;
        r.size_px = size;
        r.n = a.n;
        r.success_pct = 100.0 * a.successes / a.n;
        r.mean_dist_px = a.dist / a.n;
        r.mean_dist_cm = r.mean_dist_px * cmpp;
        const double var = a.n > 1 ? (a.dist2 - a.dist * a.dist / a.n) / (a.n - 1) : 0.0;
        r.sd_dist_px = std::sqrt(std::max(0.0, var));
        if (a.successes > 0) r.mean_time_s = a.time / a.successes;
        rows.push_back(r);
    }
    return rows;
}

std::vector<ModeMetric> resolution_report(const std::vector<TrialRecord>& trials, const ScreenConfig& screen) {
    std::vector<ModeMetric> out;
    for (Mode mode : {Mode::Smooth, Mode::Saccadic}) {
        double sum = 0.0;
        int n = 0;
        for (const auto& t : trials) {
            if (t.slot.mode != mode) continue;
            sum += t.result.distance_to_center_px;
            ++n;
        }
        if (n == 0) continue;
        out.push_back({mode, sum / n, sum / n * cm_per_pixel(screen)});
    }
    return out;
}

std::vector<ModeTime> time_report(const std::vector<TrialRecord>& trials) {
    std::vector<ModeTime> out;
    for (Mode mode : {Mode::Smooth, Mode::Saccadic}) {
        double sum = 0.0;
        int n = 0, seen = 0;
        for (const auto& t : trials) {
            if (t.slot.mode != mode) continue;
            ++seen;
            if (!t.result.success || !t.result.time_to_enter_s) continue;
            sum += *t.result.time_to_enter_s;
            ++n;
        }
        if (seen == 0) continue;
        ModeTime m{mode, std::nullopt, n};
        if (n > 0) m.mean_time_s = sum / n;
        out.push_back(m);
    }
    return out;
}

void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRow>& rows) {
    out << kAccuracyHeader << '\n';
    for (const auto& r : rows) {
        out << mode_name(r.mode) << ',' << csv_number(r.size_px) << ',' << r.n << ',' << csv_number(r.success_pct)
            << ',' << csv_number(r.mean_dist_px) << ',' << csv_number(r.mean_dist_cm) << ','
            << (r.mean_time_s ? csv_number(*r.mean_time_s) : std::string()) << '\n';
    }
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& trials) {
    out << kTrialHeader << '\n';
    for (const auto& t : trials) {
        const TrialResult& r = t.result;
        out << mode_name(t.slot.mode) << ',' << csv_number(t.slot.size_px) << ',' << t.slot.repetition << ','
            << t.slot.seed << ',' << t.slot.session << ',' << csv_number(t.slot.session_offset_s) << ','
            << (r.success ? 1 : 0) << ',' << csv_number(r.final_pos.x) << ',' << csv_number(r.final_pos.y) << ','
            << csv_number(r.distance_to_center_px) << ','
            << (r.time_to_enter_s ? csv_number(*r.time_to_enter_s) : std::string()) << ',' << r.frames << '\n';
    }
}

void write_path_csv(std::ostream& out, const std::vector<PathSample>& path) {
    out << kPathHeader << '\n';
    for (const auto& s : path) {
        out << s.frame << ',' << csv_number(s.t_s) << ',' << csv_number(s.cursor.x) << ',' << csv_number(s.cursor.y)
            << ',' << csv_number(s.head_yaw) << ',' << csv_number(s.head_pitch) << ',' << csv_number(s.eye_yaw)
            << ',' << csv_number(s.eye_pitch) << ',' << (s.detected ? 1 : 0) << '\n';
    }
}

void write_curve_csv(std::ostream& out, const std::vector<std::pair<Mode, const TrialResult*>>& curves) {
    out << kCurveHeader << '\n';
    for (const auto& [mode, result] : curves) {
        if (!result) continue;
        for (const auto& s : result->path)
            out << mode_name(mode) << ',' << csv_number(s.t_s) << ',' << csv_number(s.cursor.x) << ','
                << csv_number(s.cursor.y) << '\n';
    }
}

void export_accuracy_csv(const std::vector<AccuracyRow>& rows, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    write_accuracy_csv(out, rows);
    finish(out, path);
}

void export_trials_csv(const std::vector<TrialRecord>& trials, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    write_trials_csv(out, trials);
    finish(out, path);
}

void export_path_csv(const std::vector<PathSample>& path_samples, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    write_path_csv(out, path_samples);
    finish(out, path);
}

void export_curve_csv(const std::vector<std::pair<Mode, const TrialResult*>>& curves,
                      const std::filesystem::path& path) {
    auto out = open_for_write(path);
    write_curve_csv(out, curves);
    finish(out, path);
}

std::string summary_report(const ExperimentResult& result, const ScreenConfig& screen) {
    std::ostringstream os;
    os << "Accuracy (success %, simulated vs human reference)\n";
    os << "  size      mode      n     success  ref    mean_px   sd_px     mean_cm  mean_time_s\n";
    for (const auto& r : result.table) {
        char line[200];
        const auto ref = reference_rate(r.mode, r.size_px);
        std::snprintf(line, sizeof line, "  %-8s  %-8s  %-5d %7.1f  %-5s  %8.2f  %8.2f  %7.3f  %s\n",
                      (fmt("%g", r.size_px) + "x" + fmt("%g", r.size_px)).c_str(),
                      std::string(mode_name(r.mode)).c_str(), r.n, r.success_pct,
                      ref ? fmt("%g", *ref).c_str() : "-", r.mean_dist_px, r.sd_dist_px, r.mean_dist_cm,
                      r.mean_time_s ? fmt("%.3f", *r.mean_time_s).c_str() : "n/a");
        os << line;
    }
    os << "Resolution (mean distance to centre)\n";
    for (const auto& m : resolution_report(result.trials, screen)) {
        const double ref = m.mode == Mode::Smooth ? kReferenceDistSmooth : kReferenceDistSaccadic;
        os << "  " << mode_name(m.mode) << ": " << fmt("%.2f", m.mean_px) << " px (" << fmt("%.3f", m.mean_cm)
           << " cm), reference " << fmt("%.1f", ref) << " px\n";
    }
    os << "Time to enter (successful trials)\n";
    for (const auto& t : time_report(result.trials)) {
        const double ref = t.mode == Mode::Smooth ? kReferenceTimeSmooth : kReferenceTimeSaccadic;
        os << "  " << mode_name(t.mode) << ": "
           << (t.mean_time_s ? fmt("%.3f", *t.mean_time_s) + " s" : std::string("absent")) << " over "
           << t.successes << " successes, reference " << fmt("%.2f", ref) << " s\n";
    }
    return os.str();
}

}  // namespace vorcursor
