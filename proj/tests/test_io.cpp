#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <random>

#include "rtg/errors.hpp"
#include "rtg/io.hpp"
#include "rtg/report.hpp"

using namespace rtg;
namespace fs = std::filesystem;

TEST_CASE("format_sci") {
    CHECK(io::format_sci(0.0) == "0.00000e+00");
    CHECK(io::format_sci(1234.5678) == "1.23457e+03");
    CHECK(io::format_sci(-0.000123) == "-1.23000e-04");
    CHECK(io::format_sci(NAN) == "NaN");
    CHECK(io::format_sci(INFINITY) == "Inf");
    CHECK(io::format_sci(-INFINITY) == "-Inf");
}

TEST_CASE("csv quoting round-trips") {
    for (std::string s : {"plain", "with,comma", "with \"quote\"", "", "a,\"b\",c"}) {
        const auto line = io::quote_csv(s) + "," + io::quote_csv("x");
        const auto fields = io::split_csv_line(line);
        REQUIRE(fields.size() == 2);
        CHECK(fields[0] == s);
        CHECK(fields[1] == "x");
    }
}

TEST_CASE("event log round-trips") {
    std::mt19937_64 gen(1);
    std::vector<FailureEvent> events;
    for (int i = 0; i < 200; ++i) {
        events.push_back({static_cast<std::int64_t>(gen() % 5), 1 + static_cast<std::int64_t>(gen() % 1000),
                          "sig," + std::to_string(gen() % 7), gen() % 2 == 0});
    }
    const auto text = io::event_log_csv(events);
    CHECK(text.rfind("session_id,test_index,signature,counted\n", 0) == 0);
    CHECK(io::parse_event_log(text) == events);
}

TEST_CASE("event log errors") {
    CHECK_THROWS_AS(io::parse_event_log(""), MalformedLog);
    CHECK_THROWS_AS(io::parse_event_log("a,b\n"), MalformedLog);
    CHECK_THROWS_AS(io::parse_event_log("session_id,test_index,signature,counted\n0,x,s,1\n"), MalformedLog);
    CHECK_THROWS_AS(io::parse_event_log("session_id,test_index,signature,counted\n0,1,s,2\n"), MalformedLog);
    CHECK_THROWS_AS(io::parse_event_log("session_id,test_index,signature,counted\n0,1,,1\n"), MalformedLog);
    CHECK(io::parse_event_log("session_id,test_index,signature,counted\n# note\n0,3,s,1\n").size() == 1);
}

TEST_CASE("manifest round-trips") {
    const std::vector<io::ManifestEntry> m{{"a", 3, 100}, {"b,c", 1, 5}};
    const auto back = io::parse_manifest(io::manifest_csv(m));
    REQUIRE(back.size() == 2);
    CHECK(back[1].subject == "b,c");
    CHECK(back[0].sessions == 3);
    CHECK(back[0].draws_per_session == 100);
    CHECK_THROWS_AS(io::parse_manifest("subject,sessions,draws_per_session\na,0,10\n"), MalformedLog);
}

TEST_CASE("dense curve round-trips to six significant digits") {
    std::vector<double> v{0};
    for (int i = 0; i < 100; ++i) v.push_back(v.back() + 0.123456789 * (i % 3));
    const auto back = io::parse_dense_curve(io::dense_curve_csv(v));
    REQUIRE(back.values.size() == v.size());
    for (std::size_t k = 0; k < v.size(); ++k) CHECK(back.values[k] == doctest::Approx(v[k]).epsilon(1e-5));
    CHECK_THROWS_AS(io::parse_dense_curve("k,value\n0,0\n2,1\n"), MalformedLog);
}

TEST_CASE("dataset_from_events fills empty sessions") {
    const std::vector<FailureEvent> events{{1, 2, "A", true}};
    const auto d = io::dataset_from_events({"s", 3, 4}, events);
    REQUIRE(d.curves.size() == 3);
    CHECK(d.curves[0].final_count() == 0);
    CHECK(d.curves[1].final_count() == 1);
    CHECK_THROWS_AS(io::dataset_from_events({"s", 1, 4}, events), MalformedLog);
    CHECK_THROWS_AS(io::dataset_from_events({"s", 3, 1}, events), MalformedLog);
}

TEST_CASE("atomic write and read") {
    const auto dir = fs::temp_directory_path() / "rtg_io_test";
    fs::remove_all(dir);
    io::write_atomic(dir / "sub" / "f.txt", "hello\n");
    CHECK(io::read_file(dir / "sub" / "f.txt") == "hello\n");
    io::write_atomic(dir / "sub" / "f.txt", "again\n");
    CHECK(io::read_file(dir / "sub" / "f.txt") == "again\n");
    CHECK_THROWS_AS(io::read_file(dir / "missing"), IoError);
    fs::remove_all(dir);
}

namespace {

FitResult fit_of(ModelId id, double r2, double rmse, bool conv = true) {
    FitResult f;
    f.model = id;
    f.r_squared = r2;
    f.rmse = rmse;
    f.converged = conv;
    f.iterations = 7;
    f.starts_converged = conv ? 3 : 0;
    f.params.assign(spec(id).param_count, conv ? 0.5 : NAN);
    return f;
}

}  // namespace

TEST_CASE("fits table round-trips") {
    const std::vector<report::SubjectFits> fits{
        {"alpha", {fit_of(ModelId::phi5, 0.99, 0.1), fit_of(ModelId::phi1, -INFINITY, 0.3),
                   fit_of(ModelId::phi2, NAN, NAN, false)}},
        {"beta", {fit_of(ModelId::phi5, NAN, 0.0)}},
    };
    const auto text = report::fits_csv(fits);
    const auto back = report::parse_fits_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(report::fits_csv(back) == text);
    CHECK(back[0].fits[1].r_squared == -INFINITY);
    CHECK(std::isnan(back[0].fits[2].rmse));
    CHECK_FALSE(back[0].fits[2].converged);
}

TEST_CASE("ranking table with footer") {
    const std::vector<report::SubjectFits> fits{
        {"a", {fit_of(ModelId::phi5, 0.99, 0.1), fit_of(ModelId::phi7, 0.9, 0.3)}},
        {"b", {fit_of(ModelId::phi5, 0.8, 0.5), fit_of(ModelId::phi7, 0.95, 0.2)}},
        {"zero", {fit_of(ModelId::phi5, NAN, 0.0), fit_of(ModelId::phi7, NAN, 0.0)}},
    };
    const auto text = report::ranking_csv(fits, ModelId::phi5);
    CHECK(text.find("a,phi5 phi7,9.90000e-01,1.00000e-01,0.00000e+00,0.00000e+00\n") != std::string::npos);
    CHECK(text.find("b,phi7 phi5,9.50000e-01,2.00000e-01,1.50000e-01,3.00000e-01\n") != std::string::npos);
    CHECK(text.find("zero,phi5 phi7,NaN,0.00000e+00,0.00000e+00,0.00000e+00\n") != std::string::npos);
    CHECK(text.find("# reference,phi5\n") != std::string::npos);
    CHECK(text.find("# fraction_best,") != std::string::npos);
    CHECK(text.find("# fraction_top_two,") != std::string::npos);
}

TEST_CASE("comparison table") {
    std::vector<report::SubjectFits> fits;
    for (int i = 0; i < 6; ++i) {
        fits.push_back({"s" + std::to_string(i),
                        {fit_of(ModelId::phi5, 0.99 - 0.001 * i, 0.1), fit_of(ModelId::phi7, 0.9, 0.3),
                         fit_of(ModelId::phi8, NAN, NAN, i < 2 ? false : true)}});
    }
    const std::vector<ModelId> others{ModelId::phi7, ModelId::phi8};
    const auto text = report::comparison_csv(fits, ModelId::phi5, others, report::Metric::r_squared);
    CHECK(text.rfind("model_a,model_b,N,n_effective,W,Z,p,effect,method\n", 0) == 0);
    CHECK(text.find("phi5,phi7,6,6,0.00000e+00,") != std::string::npos);
    CHECK(text.find(",3.12500e-02,") != std::string::npos);
    CHECK(text.find("# metric,r2\n") != std::string::npos);
    CHECK(text.find("# excluded,phi8,6\n") != std::string::npos);

    const auto input = report::comparison_input(fits, ModelId::phi5, ModelId::phi7, report::Metric::rmse);
    CHECK(input.scores.size() == 6);
    CHECK(input.scores.at("s0").first == 0.1);
    CHECK(input.reference_positions.at("s0") == 0);
}

TEST_CASE("metric names") {
    CHECK(report::metric_from_string("r2") == report::Metric::r_squared);
    CHECK(report::metric_from_string("rmse") == report::Metric::rmse);
    CHECK_THROWS_AS(report::metric_from_string("mae"), std::invalid_argument);
}
