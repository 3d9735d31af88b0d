// rtgrowth: generate random-testing fault data, fit growth models, rank and
// compare them, and summarize sessions. All outputs are plain CSV.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtg/collector.hpp"
#include "rtg/curves.hpp"
#include "rtg/errors.hpp"
#include "rtg/fitting.hpp"
#include "rtg/harness.hpp"
#include "rtg/io.hpp"
#include "rtg/report.hpp"

namespace fs = std::filesystem;
using namespace rtg;

namespace {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kIo = 3,
    kCapacity = 4,
};

struct Common {
    std::uint64_t seed = 1;
    std::string out;
};

struct HarnessArgs {
    std::string subjects = "bounded_stack";
    std::int64_t sessions = 30;
    std::int64_t draws = 10000;
    std::string policy = "contract";
    std::int64_t int_min = -32;
    std::int64_t int_max = 32;
    bool clean = false;
};

struct SimulateArgs {
    std::string distribution = "geometric";
    int targets = 8;
    double theta = 0.4;
    double base = 10.0;
    std::int64_t draws = 100000;
    std::int64_t runs = 30;
    std::string subject = "collector";
    int replicas = 1;
    bool events = false;
    std::optional<int> tau;
};

struct FitArgs {
    std::string in;
    std::string models = "phi";
    std::string reference = "phi5";
    std::string aggregate = "mean";
    bool median = false;
    int grid_points = 512;
    int starts = 16;
    int max_iterations = 200;
    bool ladder = false;
    std::size_t top = 3;
};

struct CompareArgs {
    std::string in;
    std::string reference = "phi5";
    std::string models;
    std::string metric = "r2";
};

struct StatsArgs {
    std::string in;
    std::string axis = "sessions";
};

fs::path output_dir(const Common& c, std::string_view command) {
    if (!c.out.empty()) return c.out;
    const char* root = std::getenv("RTG_OUT");
    return fs::path(root && *root ? root : "rtg-runs") /
           (std::string(command) + "-seed" + std::to_string(c.seed));
}

void write_run_json(const fs::path& dir, const nlohmann::ordered_json& j) {
    io::write_atomic(dir / "run.json", j.dump(2) + "\n");
}

int cmd_harness(const Common& c, const HarnessArgs& a) {
    const auto dir = output_dir(c, "harness");
    const auto policy = harness::policy_from_string(a.policy);
    std::vector<std::string> names;
    for (const auto& m : (a.subjects == "all" ? harness::builtin_subjects()
                                                : std::vector<std::string>{})) names.push_back(m);
    if (names.empty()) {
        std::string_view rest = a.subjects;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            if (comma != 0) names.emplace_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }
    std::vector<io::ManifestEntry> manifest;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& name : names) {
        const std::vector<harness::Subject> subject{harness::make_subject(name, !a.clean)};
        std::vector<FailureEvent> events;
        for (std::int64_t s = 0; s < a.sessions; ++s) {
            harness::SessionConfig cfg;
            cfg.draws = a.draws;
            cfg.seed = c.seed;
            cfg.session_id = s;
            cfg.policy = policy;
            cfg.int_min = a.int_min;
            cfg.int_max = a.int_max;
            auto log = harness::run_session(subject, cfg);
            events.insert(events.end(), std::make_move_iterator(log.begin()),
                          std::make_move_iterator(log.end()));
        }
        io::write_atomic(dir / io::events_file(name), io::event_log_csv(events));
        manifest.push_back({name, a.sessions, a.draws});
        files.push_back(io::events_file(name));
    }
    io::write_atomic(dir / io::kManifestFile, io::manifest_csv(manifest));
    write_run_json(dir, {{"source", "harness"},
                         {"seed", c.seed},
                         {"sessions", a.sessions},
                         {"draws_per_session", a.draws},
                         {"policy", a.policy},
                         {"integer_range", {a.int_min, a.int_max}},
                         {"variant", a.clean ? "clean" : "faulty"},
                         {"files", files}});
    std::cout << dir.string() << "\n";
    return kOk;
}

int cmd_simulate(const Common& c, const SimulateArgs& a) {
    const auto dir = output_dir(c, "simulate");
    const auto dist = a.distribution == "uniform" ? uniform_distribution(a.targets, a.theta)
                    : a.distribution == "geometric"
                        ? geometric_distribution(a.targets, a.theta, a.base)
                        : throw std::invalid_argument("unknown distribution '" + a.distribution + "'");
    if (a.tau) {
        const double tau = expected_tau_exact(dist, *a.tau);
        io::write_atomic(dir / "tau.csv", "n,expected_tau\n" + std::to_string(*a.tau) + "," +
                                              io::format_sci(tau) + "\n");
    }
    std::vector<io::ManifestEntry> manifest;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (int r = 0; r < a.replicas; ++r) {
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "_%02d", r);
        const std::string name = a.replicas == 1 ? a.subject : a.subject + suffix;
        const auto seed = a.replicas == 1 ? c.seed : derive_seed(c.seed, static_cast<std::uint64_t>(r));
        const auto curve = simulate_detection_curve(dist, a.draws, a.runs, seed);
        io::write_atomic(dir / io::curve_file(name), io::dense_curve_csv(curve.expected_detected));
        files.push_back(io::curve_file(name));
        if (a.events) {
            std::vector<FailureEvent> events;
            for (std::int64_t run = 0; run < a.runs; ++run) {
                const auto times = simulate_detection_times(dist, a.draws, seed, run);
                for (std::size_t j = 0; j < times.size(); ++j)
                    events.push_back({run, times[j], "detection_" + std::to_string(j + 1), true});
            }
            io::write_atomic(dir / io::events_file(name), io::event_log_csv(events));
            files.push_back(io::events_file(name));
        }
        manifest.push_back({name, a.runs, a.draws});
    }
    io::write_atomic(dir / io::kManifestFile, io::manifest_csv(manifest));
    nlohmann::ordered_json probabilities(std::vector<double>(dist.probabilities().begin(),
                                                              dist.probabilities().end()));
    write_run_json(dir, {{"source", "collector"},
                         {"seed", c.seed},
                         {"distribution", a.distribution},
                         {"targets", a.targets},
                         {"theta", a.theta},
                         {"base", a.base},
                         {"probabilities", probabilities},
                         {"miss_mass", dist.miss_mass()},
                         {"runs", a.runs},
                         {"draws", a.draws},
                         {"files", files}});
    std::cout << dir.string() << "\n";
    return kOk;
}

// Aggregate curve for one manifest subject: from its event log when present,
// else from a dense curve file.
AggregateCurve load_curve(const fs::path& dir, const io::ManifestEntry& e, bool median) {
    const auto events = dir / io::events_file(e.subject);
    if (fs::exists(events)) {
        const auto d = io::dataset_from_events(e, io::read_event_log(events));
        return median ? aggregate_median(d) : aggregate_mean(d);
    }
    const auto curve = dir / io::curve_file(e.subject);
    if (fs::exists(curve)) {
        auto c = io::read_dense_curve(curve);
        if (c.draws() != e.draws_per_session)
            throw MalformedLog(curve.string() + ": length disagrees with manifest");
        return c;
    }
    throw IoError("no event log or curve for subject '" + e.subject + "' in " + dir.string());
}

FitConfig fit_config(const Common& c, const FitArgs& a) {
    FitConfig cfg;
    cfg.seed = c.seed;
    cfg.grid_points = a.grid_points;
    cfg.multi_starts = a.starts;
    cfg.max_iterations = a.max_iterations;
    cfg.validate();
    return cfg;
}

int run_fit(const Common& c, const FitArgs& a, const fs::path& dir) {
    const fs::path in = a.in;
    const auto ids = parse_model_list(a.models);
    const auto reference = model_from_token(a.reference);
    if (a.aggregate != "mean" && a.aggregate != "median")
        throw std::invalid_argument("--aggregate must be mean or median");
    const bool median = a.median || a.aggregate == "median";
    const auto cfg = fit_config(c, a);

    std::vector<report::SubjectFits> all;
    std::vector<std::pair<std::string, std::vector<FitResult>>> ladders;
    for (const auto& entry : io::read_manifest(in / io::kManifestFile)) {
        const auto curve = load_curve(in, entry, median);
        const auto ranking = rank_models(curve, ids, cfg, reference);
        std::vector<FitResult> fits;
        for (auto id : ids) fits.push_back(*ranking.find(id));
        all.push_back({entry.subject, std::move(fits)});
        const auto [xs, ys] = report::fit_grid(curve, cfg.grid_points);
        io::write_atomic(dir / "plots" / (entry.subject + ".plot.csv"),
                         report::plot_csv(xs, ys, ranking, a.top));
        if (a.ladder) ladders.emplace_back(entry.subject, fit_polylog_ladder(curve, cfg));
    }
    io::write_atomic(dir / "fits.csv", report::fits_csv(all));
    io::write_atomic(dir / "ranking.csv", report::ranking_csv(all, reference));
    if (a.ladder) io::write_atomic(dir / "ladder.csv", report::ladder_csv(ladders));
    return kOk;
}

int cmd_fit(const Common& c, const FitArgs& a) {
    const auto dir = c.out.empty() ? fs::path(a.in) : fs::path(c.out);
    run_fit(c, a, dir);
    std::cout << (dir / "ranking.csv").string() << "\n";
    return kOk;
}

int cmd_rank(const Common& c, const CompareArgs& a) {
    const fs::path in = a.in;
    const auto dir = c.out.empty() ? in : fs::path(c.out);
    const auto fits = report::parse_fits_csv(io::read_file(in / "fits.csv"));
    io::write_atomic(dir / "ranking.csv", report::ranking_csv(fits, model_from_token(a.reference)));
    std::cout << (dir / "ranking.csv").string() << "\n";
    return kOk;
}

void run_compare(const CompareArgs& a, const fs::path& in, const fs::path& dir) {
    const auto fits = report::parse_fits_csv(io::read_file(in / "fits.csv"));
    const auto reference = model_from_token(a.reference);
    std::vector<ModelId> others;
    if (!a.models.empty()) {
        others = parse_model_list(a.models);
    } else {
        for (const auto& s : fits) {
            for (const auto& f : s.fits) {
                if (std::find(others.begin(), others.end(), f.model) == others.end())
                    others.push_back(f.model);
            }
        }
    }
    io::write_atomic(dir / "comparison.csv",
                     report::comparison_csv(fits, reference, others,
                                            report::metric_from_string(a.metric)));
}

int cmd_compare(const Common& c, const CompareArgs& a) {
    const fs::path in = a.in;
    const auto dir = c.out.empty() ? in : fs::path(c.out);
    run_compare(a, in, dir);
    std::cout << (dir / "comparison.csv").string() << "\n";
    return kOk;
}

void run_stats(const StatsArgs& a, const fs::path& in, const fs::path& dir) {
    DispersionAxis axis;
    if (a.axis == "sessions") axis = DispersionAxis::across_sessions;
    else if (a.axis == "time") axis = DispersionAxis::over_time;
    else throw std::invalid_argument("--axis must be sessions or time");
    std::vector<std::pair<std::string, SummaryStats>> rows;
    for (const auto& entry : io::read_manifest(in / io::kManifestFile)) {
        const auto events = in / io::events_file(entry.subject);
        if (!fs::exists(events)) {
            std::cerr << "stats: skipping '" << entry.subject << "' (no event log)\n";
            continue;
        }
        const auto d = io::dataset_from_events(entry, io::read_event_log(events));
        rows.emplace_back(entry.subject, summary_stats(d, axis));
    }
    io::write_atomic(dir / "summary.csv", report::summary_csv(rows));
}

int cmd_stats(const Common& c, const StatsArgs& a) {
    const fs::path in = a.in;
    const auto dir = c.out.empty() ? in : fs::path(c.out);
    run_stats(a, in, dir);
    std::cout << (dir / "summary.csv").string() << "\n";
    return kOk;
}

int cmd_report(const Common& c, const FitArgs& f, const CompareArgs& cmp, const StatsArgs& s) {
    const fs::path in = f.in;
    const auto dir = c.out.empty() ? in : fs::path(c.out);
    run_fit(c, f, dir);
    run_compare(cmp, dir, dir);
    run_stats(s, in, dir);
    std::cout << dir.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-testing fault curves: generation, model fitting and comparison"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", common.seed, "Random seed");
        sub->add_option("--out", common.out, "Output directory (default: $RTG_OUT/<command>-seed<seed>)");
    };

    HarnessArgs ha;
    auto* harness_cmd = app.add_subcommand("harness", "Run pool-based random testing sessions");
    add_common(harness_cmd);
    harness_cmd->add_option("--subjects", ha.subjects, "Comma-separated built-in subjects, or 'all'");
    harness_cmd->add_option("--sessions,-S", ha.sessions, "Sessions per subject")->check(CLI::PositiveNumber);
    harness_cmd->add_option("--draws,-T", ha.draws, "Test cases per session")->check(CLI::PositiveNumber);
    harness_cmd->add_option("--policy", ha.policy, "Failure filter")->check(CLI::IsMember({"contract", "exception"}));
    harness_cmd->add_option("--int-min", ha.int_min, "Smallest random integer argument");
    harness_cmd->add_option("--int-max", ha.int_max, "Largest random integer argument");
    harness_cmd->add_flag("--clean", ha.clean, "Test the corrected subject variants");

    SimulateArgs sa;
    int tau = 0;
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate coupon-collector detection curves");
    add_common(simulate_cmd);
    simulate_cmd->add_option("--distribution", sa.distribution)->check(CLI::IsMember({"uniform", "geometric"}));
    simulate_cmd->add_option("--targets,-N", sa.targets)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--theta", sa.theta)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--base", sa.base)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--draws,-T", sa.draws)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--runs", sa.runs)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--subject", sa.subject, "Subject name for the output files");
    simulate_cmd->add_option("--replicas", sa.replicas, "Independent curves, one subject each")->check(CLI::PositiveNumber);
    simulate_cmd->add_flag("--events", sa.events, "Also write per-run event logs");
    auto* tau_opt = simulate_cmd->add_option("--tau", tau, "Also write the exact expected draws to detect targets 1..n");

    FitArgs fa;
    auto add_fit_options = [&](CLI::App* sub) {
        sub->add_option("--in", fa.in, "Run directory with manifest.csv")->required();
        sub->add_option("--models", fa.models, "Models to fit (tokens, 'phi', 'lam' or 'all')");
        sub->add_option("--reference", fa.reference, "Reference model for deltas and fractions");
        sub->add_option("--aggregate", fa.aggregate)->check(CLI::IsMember({"mean", "median"}));
        sub->add_flag("--median", fa.median, "Same as --aggregate median");
        sub->add_option("--grid-points", fa.grid_points)->check(CLI::Range(2, 1 << 24));
        sub->add_option("--starts", fa.starts)->check(CLI::PositiveNumber);
        sub->add_option("--max-iterations", fa.max_iterations)->check(CLI::PositiveNumber);
        sub->add_flag("--ladder", fa.ladder, "Also fit the poly-logarithmic ladder lam1..lam5");
        sub->add_option("--top", fa.top, "Models per plot-data file");
    };
    auto* fit_cmd = app.add_subcommand("fit", "Fit and rank models on every subject of a run");
    add_common(fit_cmd);
    add_fit_options(fit_cmd);

    CompareArgs ca;
    auto* rank_cmd = app.add_subcommand("rank", "Re-rank an existing fits.csv");
    add_common(rank_cmd);
    rank_cmd->add_option("--in", ca.in, "Directory with fits.csv")->required();
    rank_cmd->add_option("--reference", ca.reference);

    auto* compare_cmd = app.add_subcommand("compare", "Wilcoxon signed-rank comparison across subjects");
    add_common(compare_cmd);
    compare_cmd->add_option("--in", ca.in, "Directory with fits.csv")->required();
    compare_cmd->add_option("--reference", ca.reference);
    compare_cmd->add_option("--models", ca.models, "Models compared with the reference (default: all fitted)");
    compare_cmd->add_option("--metric", ca.metric)->check(CLI::IsMember({"r2", "rmse"}));

    StatsArgs st;
    auto* stats_cmd = app.add_subcommand("stats", "Per-subject session summary");
    add_common(stats_cmd);
    stats_cmd->add_option("--in", st.in, "Run directory with manifest.csv")->required();
    stats_cmd->add_option("--axis", st.axis, "Dispersion axis")->check(CLI::IsMember({"sessions", "time"}));

    auto* report_cmd = app.add_subcommand("report", "fit + compare + stats in one pass");
    add_common(report_cmd);
    add_fit_options(report_cmd);
    report_cmd->add_option("--metric", ca.metric)->check(CLI::IsMember({"r2", "rmse"}));
    report_cmd->add_option("--axis", st.axis)->check(CLI::IsMember({"sessions", "time"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*harness_cmd) return cmd_harness(common, ha);
        if (*simulate_cmd) {
            if (*tau_opt) sa.tau = tau;
            return cmd_simulate(common, sa);
        }
        if (*fit_cmd) return cmd_fit(common, fa);
        if (*rank_cmd) return cmd_rank(common, ca);
        if (*compare_cmd) return cmd_compare(common, ca);
        if (*stats_cmd) {
            return cmd_stats(common, st);
        }
        if (*report_cmd) {
            ca.reference = fa.reference;
            st.in = fa.in;
            return cmd_report(common, fa, ca, st);
        }
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCapacity;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const MalformedLog& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kUsage;
}
