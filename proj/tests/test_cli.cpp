#include <doctest.h>

#include <stdexcept>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "rtg/io.hpp"

namespace fs = std::filesystem;
using namespace rtg;

namespace {

const fs::path kWork = fs::temp_directory_path() / "rtg_cli_test";

int run(const std::string& args) {
    const std::string cmd = std::string(RTGROWTH_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) { return io::read_file(p); }

struct Fresh {
    Fresh() {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
    }
    ~Fresh() { fs::remove_all(kWork); }
};

std::string dir(const std::string& name) { return (kWork / name).string(); }

}  // namespace

TEST_CASE_FIXTURE(Fresh, "harness writes one log per subject and is reproducible") {
    REQUIRE(run("harness --subjects bounded_stack -S 2 -T 100 --seed 4 --out " + dir("a")) == 0);
    REQUIRE(run("harness --subjects bounded_stack -S 2 -T 100 --seed 4 --out " + dir("b")) == 0);
    const auto manifest = io::read_manifest(kWork / "a" / "manifest.csv");
    REQUIRE(manifest.size() == 1);
    CHECK(manifest[0].sessions == 2);
    CHECK(manifest[0].draws_per_session == 100);
    const auto events = io::read_event_log(kWork / "a" / "bounded_stack.events.csv");
    for (const auto& e : events) CHECK(e.session_id < 2);
    for (auto f : {"manifest.csv", "bounded_stack.events.csv", "run.json"})
        CHECK(slurp(kWork / "a" / f) == slurp(kWork / "b" / f));
}

TEST_CASE_FIXTURE(Fresh, "usage errors") {
    CHECK(run("harness -S 0 -T 10 --out " + dir("x")) == 2);
    CHECK(run("harness -S 1 -T 10 --policy java --out " + dir("x")) == 2);
    CHECK(run("harness -S 1 -T 10 --subjects nothing --out " + dir("x")) == 2);
    CHECK(run("simulate --draws 0 --out " + dir("x")) == 2);
    CHECK(run("fit") == 2);
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE_FIXTURE(Fresh, "capacity and I/O exit codes") {
    CHECK(run("simulate --distribution uniform --targets 25 --theta 0.01 --tau 21 --out " + dir("t")) == 4);
    CHECK(run("simulate --distribution uniform --targets 25 --theta 0.01 --tau 20 --draws 10 --runs 2 --out " +
              dir("t")) == 0);
    CHECK(fs::exists(kWork / "t" / "tau.csv"));
    CHECK(run("fit --in " + dir("missing")) == 3);
    io::write_atomic(kWork / "bad" / "manifest.csv", "subject,sessions\n");
    CHECK(run("fit --in " + dir("bad")) == 3);
}

TEST_CASE_FIXTURE(Fresh, "simulate is reproducible and feeds fit") {
    const std::string args = "simulate --targets 4 --theta 0.3 --draws 500 --runs 20 --seed 9 --replicas 2 --events";
    REQUIRE(run(args + " --out " + dir("a")) == 0);
    REQUIRE(run(args + " --out " + dir("b")) == 0);
    for (auto f : {"collector_00.curve.csv", "collector_01.curve.csv", "collector_00.events.csv", "run.json"})
        CHECK(slurp(kWork / "a" / f) == slurp(kWork / "b" / f));
    const auto curve = io::read_dense_curve(kWork / "a" / "collector_00.curve.csv");
    CHECK(curve.values.size() == 501);
    CHECK(curve.values.front() == 0.0);
    for (double v : curve.values) CHECK(v <= 4.0);
    REQUIRE(run("fit --in " + dir("a") + " --models phi1,phi5 --starts 4") == 0);
    CHECK(fs::exists(kWork / "a" / "ranking.csv"));
    CHECK(fs::exists(kWork / "a" / "plots" / "collector_01.plot.csv"));
}

TEST_CASE_FIXTURE(Fresh, "zero curve gives a NaN row") {
    io::write_atomic(kWork / "z" / "manifest.csv", io::manifest_csv({{"flat", 1, 50}}));
    io::write_atomic(kWork / "z" / "flat.curve.csv", io::dense_curve_csv(std::vector<double>(51, 0.0)));
    REQUIRE(run("fit --in " + dir("z") + " --models phi1,phi5") == 0);
    const auto ranking = slurp(kWork / "z" / "ranking.csv");
    CHECK(ranking.find("flat,phi1 phi5,NaN,0.00000e+00,") != std::string::npos);
}

TEST_CASE_FIXTURE(Fresh, "median aggregation changes the fitted curve") {
    std::vector<FailureEvent> events{{0, 1, "A", true}, {0, 2, "B", true}, {0, 3, "C", true},
                                     {1, 5, "A", true}, {2, 9, "A", true}};
    io::write_atomic(kWork / "m" / "manifest.csv", io::manifest_csv({{"s", 3, 20}}));
    io::write_atomic(kWork / "m" / "s.events.csv", io::event_log_csv(events));
    REQUIRE(run("fit --in " + dir("m") + " --models lam1 --out " + dir("mean")) == 0);
    REQUIRE(run("fit --in " + dir("m") + " --models lam1 --median --out " + dir("median")) == 0);
    REQUIRE(run("fit --in " + dir("m") + " --models lam1 --aggregate median --out " + dir("median2")) == 0);
    CHECK(slurp(kWork / "mean" / "fits.csv") != slurp(kWork / "median" / "fits.csv"));
    CHECK(slurp(kWork / "median" / "fits.csv") == slurp(kWork / "median2" / "fits.csv"));
}

TEST_CASE_FIXTURE(Fresh, "footer reports the reference fraction on a phi5 corpus") {
    std::vector<io::ManifestEntry> manifest;
    for (int s = 0; s < 3; ++s) {
        std::vector<double> v(2001);
        for (std::size_t k = 0; k < v.size(); ++k) {
            const double l = std::log1p(static_cast<double>(k));
            v[k] = ((0.01 * (s + 1) * l - 0.1) * l + 1.0) * l;
        }
        const std::string name = "syn" + std::to_string(s);
        io::write_atomic(kWork / "p" / io::curve_file(name), io::dense_curve_csv(v));
        manifest.push_back({name, 1, 2000});
    }
    io::write_atomic(kWork / "p" / "manifest.csv", io::manifest_csv(manifest));
    REQUIRE(run("fit --in " + dir("p") + " --models phi5,phi7,phi8") == 0);
    const auto ranking = slurp(kWork / "p" / "ranking.csv");
    CHECK(ranking.find("# fraction_best,1.00000e+00") != std::string::npos);
    REQUIRE(run("compare --in " + dir("p")) == 0);
    CHECK(slurp(kWork / "p" / "comparison.csv").find("phi5,phi7,3,3,") != std::string::npos);
    REQUIRE(run("rank --in " + dir("p") + " --out " + dir("r")) == 0);
    CHECK(slurp(kWork / "r" / "ranking.csv") == ranking);
}

TEST_CASE_FIXTURE(Fresh, "stats and report subcommands") {
    REQUIRE(run("harness --subjects sorted_list,hash_bag -S 3 -T 300 --out " + dir("h")) == 0);
    REQUIRE(run("stats --in " + dir("h")) == 0);
    const auto summary = slurp(kWork / "h" / "summary.csv");
    CHECK(summary.rfind("subject,S,T,F,E_sigma,E_gamma,E_delta,sd_delta\n", 0) == 0);
    CHECK(summary.find("\nsorted_list,3,300,") != std::string::npos);
    REQUIRE(run("report --in " + dir("h") + " --out " + dir("rep") + " --starts 2 --ladder") == 0);
    for (auto f : {"fits.csv", "ranking.csv", "comparison.csv", "summary.csv", "ladder.csv"})
        CHECK(fs::exists(kWork / "rep" / f));
}

TEST_CASE_FIXTURE(Fresh, "default output root comes from the environment") {
    setenv("RTG_OUT", dir("root").c_str(), 1);
    REQUIRE(run("harness -S 1 -T 20 --seed 3") == 0);
    unsetenv("RTG_OUT");
    CHECK(fs::exists(kWork / "root" / "harness-seed3" / "manifest.csv"));
}
