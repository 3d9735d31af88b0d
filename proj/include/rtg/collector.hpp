#pragma once

// Coupon-collector model of random testing: each draw hits target i with
// probability p_i (or nothing, with the remaining miss mass), independently.

#include <cstdint>
#include <span>
#include <vector>

namespace rtg {

class TargetDistribution {
public:
    /// Throws std::invalid_argument unless every p_i > 0 and sum(p) <= 1
    /// (within 1e-12).
    explicit TargetDistribution(std::vector<double> probabilities);

    std::span<const double> probabilities() const noexcept { return p_; }
    std::size_t size() const noexcept { return p_.size(); }
    double miss_mass() const noexcept { return miss_; }

private:
    std::vector<double> p_;
    double miss_ = 0;
};

struct DetectionCurve {
    std::vector<double> expected_detected;  ///< indexed by draw count 0..T
};

/// N targets of probability theta each; requires N >= 1 and 0 < N theta <= 1.
TargetDistribution uniform_distribution(int n, double theta);

/// p_i = theta / base^(i-1), i = 1..N.
TargetDistribution geometric_distribution(int n, double theta, double base = 10.0);

/// Largest n accepted by expected_tau_exact.
inline constexpr int kMaxExactTargets = 20;

/// Expected number of draws until targets 1..n have all been hit, by
/// inclusion-exclusion over subsets. Throws CapacityError for n > 20 and
/// std::invalid_argument for n < 1 or n > N.
double expected_tau_exact(const TargetDistribution& d, int n);

/// Expected number of distinct targets hit after t draws: sum_i 1 - (1 - p_i)^t.
double expected_detected_at(const TargetDistribution& d, std::int64_t t);

/// Mean over `runs` independent simulated sessions of the number of targets
/// detected after each draw. Run r uses the stream derive_seed(seed, r).
DetectionCurve simulate_detection_curve(const TargetDistribution& d, std::int64_t draws,
                                        std::int64_t runs, std::uint64_t seed);

/// Draw indices (1-based) at which run `run` of a simulation first hits each
/// target, in detection order. Exposed for building per-session datasets.
std::vector<std::int64_t> simulate_detection_times(const TargetDistribution& d,
                                                   std::int64_t draws, std::uint64_t seed,
                                                   std::int64_t run);

}  // namespace rtg
