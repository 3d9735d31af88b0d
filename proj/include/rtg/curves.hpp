#pragma once

// Testing sessions as cumulative unique-fault counting curves, their
// pointwise aggregates, and per-subject summary statistics.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rtg {

/// One failure observed by the random tester.
struct FailureEvent {
    std::int64_t session_id = 0;
    std::int64_t test_index = 0;  ///< 1-based draw number within the session
    std::string signature;        ///< identity of the unique failure
    bool counted = true;          ///< passed the fault filter

    friend bool operator==(const FailureEvent&, const FailureEvent&) = default;
};

/// phi(0..T): cumulative number of unique counted failures after each draw.
class CountingCurve {
public:
    CountingCurve() = default;
    /// Validates counts[0] == 0 and monotonicity; throws std::invalid_argument.
    explicit CountingCurve(std::vector<std::uint32_t> counts);

    std::int64_t draws() const noexcept { return static_cast<std::int64_t>(counts_.size()) - 1; }
    std::uint32_t final_count() const noexcept { return counts_.empty() ? 0 : counts_.back(); }
    std::uint32_t operator[](std::size_t k) const noexcept { return counts_[k]; }
    std::size_t size() const noexcept { return counts_.size(); }
    std::span<const std::uint32_t> counts() const noexcept { return counts_; }

private:
    std::vector<std::uint32_t> counts_{0};
};

/// D^c: all sessions of one subject, sharing one T.
struct Dataset {
    std::string subject;
    std::vector<CountingCurve> curves;

    std::int64_t draws() const noexcept { return curves.empty() ? 0 : curves.front().draws(); }
    /// Throws std::invalid_argument if empty or lengths differ.
    void validate() const;
};

/// Real-valued pointwise aggregate (mean or median) over sessions.
struct AggregateCurve {
    std::vector<double> values;

    std::int64_t draws() const noexcept { return static_cast<std::int64_t>(values.size()) - 1; }
};

struct SummaryStats {
    std::int64_t sessions = 0;    ///< S
    std::int64_t draws = 0;       ///< T
    std::int64_t max_faults = 0;  ///< F
    double mean_sd = 0.0;         ///< E[sigma]
    double mean_skew = 0.0;       ///< E[gamma]; NaN when undefined at every round
    double mean_delta = 0.0;      ///< E[Delta], new faults per test case
    double sd_delta = 0.0;        ///< sigma[Delta]
};

/// Axis along which E[sigma] and E[gamma] are sampled.
enum class DispersionAxis {
    across_sessions,  ///< per round over sessions, averaged over rounds (default)
    over_time,        ///< per session over rounds, averaged over sessions
};

/// Builds phi for one session. Uncounted events are ignored; duplicates of a
/// signature count once. Throws MalformedLog when test_index is outside
/// [1, draws] or the events span several sessions.
CountingCurve build_curve(std::span<const FailureEvent> events, std::int64_t draws);

AggregateCurve aggregate_mean(const Dataset& d);
/// Pointwise median; for even S, the midpoint of the two central values.
AggregateCurve aggregate_median(const Dataset& d);

SummaryStats summary_stats(const Dataset& d,
                           DispersionAxis axis = DispersionAxis::across_sessions);

/// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_sd(std::span<const double> xs);
/// Adjusted Fisher-Pearson skewness G1; NaN when n < 3 or the spread is 0.
double sample_skewness(std::span<const double> xs);

}  // namespace rtg
