#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "vorcursor/error.hpp"
#include "vorcursor/experiments.hpp"

using namespace vorcursor;
namespace fs = std::filesystem;

namespace {

ExperimentPlan small_plan() {
    ExperimentPlan p;
    p.repetitions = 3;
    return p;
}

TrialRecord synthetic(Mode mode, double size, double dist, std::optional<double> time) {
    TrialRecord r;
    r.slot.mode = mode;
    r.slot.size_px = size;
    r.result.mode = mode;
    r.result.distance_to_center_px = dist;
    r.result.success = time.has_value();
    r.result.time_to_enter_s = time;
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const ExperimentResult& shared_run() {
    static const ExperimentResult r = run_experiment(small_plan(), SimConfig{});
    return r;
}

}  // namespace

TEST(Experiments, PlanValidation) {
    ExperimentPlan p;
    p.repetitions = 0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.square_sizes_px = {10, -1};
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.modes.clear();
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Experiments, SlotsAreDistinctAndStable) {
    const ExperimentPlan p;
    std::set<std::uint64_t> seeds;
    for (Mode m : p.modes)
        for (int rep = 0; rep < 10; ++rep)
            for (int si = 0; si < 4; ++si) seeds.insert(plan_slot(p, m, si, rep).seed);
    EXPECT_EQ(seeds.size(), 80u);
    ExperimentPlan big = p;
    big.repetitions = 1000;
    const TrialSlot a = plan_slot(p, Mode::Saccadic, 2, 7), b = plan_slot(big, Mode::Saccadic, 2, 7);
    EXPECT_EQ(a.seed, b.seed);
    EXPECT_EQ(a.session, b.session);
    EXPECT_EQ(a.drift_direction_deg, b.drift_direction_deg);
    // sessions of 40 trials, 20 s apart
    const TrialSlot s = plan_slot(p, Mode::Smooth, 1, 10);
    EXPECT_EQ(s.session, 1);
    EXPECT_DOUBLE_EQ(s.session_offset_s, 20.0);
    EXPECT_EQ(plan_slot(p, Mode::Smooth, 0, 10).drift_direction_deg, s.drift_direction_deg);
}

TEST(Experiments, RunCoversEveryCell) {
    const ExperimentResult& r = shared_run();
    EXPECT_EQ(r.trials.size(), 2u * 4u * 3u);
    ASSERT_EQ(r.table.size(), 8u);
    EXPECT_EQ(r.table[0].mode, Mode::Smooth);
    EXPECT_EQ(r.table[0].size_px, 100.0);
    EXPECT_EQ(r.table[7].mode, Mode::Saccadic);
    EXPECT_EQ(r.table[7].size_px, 9.0);
    for (const auto& row : r.table) {
        EXPECT_EQ(row.n, 3);
        EXPECT_GE(row.success_pct, 0.0);
        EXPECT_LE(row.success_pct, 100.0);
        EXPECT_NEAR(row.mean_dist_cm, row.mean_dist_px * cm_per_pixel(ScreenConfig{}),
                    1e-9 * std::max(1.0, row.mean_dist_cm));
    }
}

TEST(Experiments, DoublingRepetitionsKeepsTrials) {
    ExperimentPlan p = small_plan();
    p.repetitions = 6;
    p.modes = {Mode::Saccadic};
    const ExperimentResult big = run_experiment(p, SimConfig{});
    const ExperimentResult& small = shared_run();
    int compared = 0;
    for (const auto& s : small.trials) {
        if (s.slot.mode != Mode::Saccadic) continue;
        const auto it = std::find_if(big.trials.begin(), big.trials.end(), [&](const TrialRecord& b) {
            return b.slot.size_index == s.slot.size_index && b.slot.repetition == s.slot.repetition;
        });
        ASSERT_NE(it, big.trials.end());
        EXPECT_EQ(it->slot.seed, s.slot.seed);
        EXPECT_EQ(it->result.final_pos, s.result.final_pos);
        EXPECT_EQ(it->result.time_to_enter_s, s.result.time_to_enter_s);
        ++compared;
    }
    EXPECT_EQ(compared, 12);
}

TEST(Experiments, AggregationIgnoresOrder) {
    std::vector<TrialRecord> trials = shared_run().trials;
    const auto rows = aggregate(trials, ScreenConfig{});
    std::mt19937 g(3);
    for (int k = 0; k < 5; ++k) {
        std::shuffle(trials.begin(), trials.end(), g);
        auto shuffled = aggregate(trials, ScreenConfig{});
        for (const auto& row : rows) {
            const auto it = std::find_if(shuffled.begin(), shuffled.end(), [&](const AccuracyRow& r) {
                return r.mode == row.mode && r.size_px == row.size_px;
            });
            ASSERT_NE(it, shuffled.end());
            EXPECT_EQ(it->success_pct, row.success_pct);
            EXPECT_EQ(it->n, row.n);
            EXPECT_NEAR(it->mean_dist_px, row.mean_dist_px, 1e-9);
        }
    }
}

TEST(Experiments, NestedTargetsAreMonotone) {
    const double sizes[] = {9, 25, 50, 100};
    for (const auto& t : shared_run().trials) {
        for (int i = 0; i + 1 < 4; ++i) {
            const bool in_small = TargetRect{{960, 540}, sizes[i]}.contains(t.result.final_pos);
            const bool in_big = TargetRect{{960, 540}, sizes[i + 1]}.contains(t.result.final_pos);
            EXPECT_TRUE(!in_small || in_big);
        }
    }
}

TEST(Experiments, ResolutionAndTimeReports) {
    const std::vector<TrialRecord> on_centre = {synthetic(Mode::Smooth, 9, 0, 1.0), synthetic(Mode::Saccadic, 9, 0, 0.5)};
    for (const auto& m : resolution_report(on_centre, ScreenConfig{})) {
        EXPECT_EQ(m.mean_px, 0.0);
        EXPECT_EQ(m.mean_cm, 0.0);
    }
    const auto times = time_report({synthetic(Mode::Smooth, 25, 3, 6.0), synthetic(Mode::Saccadic, 25, 80, std::nullopt)});
    ASSERT_EQ(times.size(), 2u);
    EXPECT_EQ(times[0].mean_time_s, 6.0);
    EXPECT_FALSE(times[1].mean_time_s);
    EXPECT_EQ(times[1].successes, 0);
}

TEST(Experiments, AccuracyCsvFormat) {
    std::ostringstream empty;
    write_accuracy_csv(empty, {});
    EXPECT_EQ(empty.str(), "mode,size_px,n,success_pct,mean_dist_px,mean_dist_cm,mean_time_s\n");
    AccuracyRow r;
    r.mode = Mode::Saccadic;
    r.size_px = 9;
    r.n = 4;
    r.success_pct = 25;
    r.mean_dist_px = 100;
    r.mean_dist_cm = 2.76;
    std::ostringstream out;
    write_accuracy_csv(out, {r});
    EXPECT_EQ(out.str(), std::string(kAccuracyHeader) + "\nsaccadic,9.000000,4,25.000000,100.000000,2.760000,\n");
}

TEST(Experiments, CsvNumberHasNoNegativeZero) {
    EXPECT_EQ(csv_number(-0.0), "0.000000");
    EXPECT_EQ(csv_number(-1e-9), "0.000000");
    EXPECT_EQ(csv_number(1.5), "1.500000");
}

TEST(Experiments, ExportsAreByteIdentical) {
    const fs::path dir = fs::temp_directory_path() / "vorcursor_exp_test";
    fs::create_directories(dir);
    const ExperimentResult& r = shared_run();
    export_trials_csv(r.trials, dir / "a.csv");
    export_trials_csv(r.trials, dir / "b.csv");
    EXPECT_EQ(read_file(dir / "a.csv"), read_file(dir / "b.csv"));
    export_accuracy_csv({}, dir / "empty.csv");
    EXPECT_EQ(read_file(dir / "empty.csv"), std::string(kAccuracyHeader) + "\n");
    export_path_csv(r.trials[0].result.path, dir / "path.csv");
    const std::string path = read_file(dir / "path.csv");
    EXPECT_EQ(path.substr(0, path.find('\n')), kPathHeader);
    export_curve_csv({{Mode::Smooth, &r.trials[0].result}, {Mode::Saccadic, &r.trials[12].result}}, dir / "curve.csv");
    const std::string curve = read_file(dir / "curve.csv");
    EXPECT_NE(curve.find("\nsmooth,"), std::string::npos);
    EXPECT_NE(curve.find("\nsaccadic,"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Experiments, ExportToMissingDirectoryNamesPath) {
    try {
        export_accuracy_csv({}, "/nonexistent_dir_for_test/acc.csv");
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent_dir_for_test/acc.csv"), std::string::npos);
    }
}

TEST(Experiments, SummaryShowsBothModes) {
    const std::string s = summary_report(shared_run(), ScreenConfig{});
    EXPECT_NE(s.find("smooth"), std::string::npos);
    EXPECT_NE(s.find("saccadic"), std::string::npos);
    EXPECT_NE(s.find("human reference"), std::string::npos);
}
