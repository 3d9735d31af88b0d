#include "rtg/collector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rtg/errors.hpp"
#include "rtg/random.hpp"

namespace rtg {

TargetDistribution::TargetDistribution(std::vector<double> probabilities)
    : p_(std::move(probabilities)) {
    if (p_.empty()) throw std::invalid_argument("target distribution needs at least one target");
    double total = 0;
    for (double p : p_) {
        if (!(p > 0) || !std::isfinite(p))
            throw std::invalid_argument("target probabilities must be positive");
        total += p;
    }
    if (total > 1.0 + 1e-12)
        throw std::invalid_argument("target probabilities sum to " + std::to_string(total) + " > 1");
    miss_ = std::max(0.0, 1.0 - total);
}

TargetDistribution uniform_distribution(int n, double theta) {
    if (n < 1) throw std::invalid_argument("uniform_distribution: N must be >= 1");
    if (!(theta > 0) || n * theta > 1.0 + 1e-12)
        throw std::invalid_argument("uniform_distribution: need 0 < N theta <= 1");
    return TargetDistribution(std::vector<double>(static_cast<std::size_t>(n), theta));
}

TargetDistribution geometric_distribution(int n, double theta, double base) {
    if (n < 1) throw std::invalid_argument("geometric_distribution: N must be >= 1");
    if (!(theta > 0) || !(base > 0))
        throw std::invalid_argument("geometric_distribution: theta and base must be positive");
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = theta / std::pow(base, i);
    return TargetDistribution(std::move(p));
}

double expected_tau_exact(const TargetDistribution& d, int n) {
    if (n > kMaxExactTargets)
        throw CapacityError("exact expectation limited to " + std::to_string(kMaxExactTargets) +
                            " targets; use simulation for n = " + std::to_string(n));
    if (n < 1 || static_cast<std::size_t>(n) > d.size())
        throw std::invalid_argument("expected_tau_exact: need 1 <= n <= N");
    const auto p = d.probabilities();

    // Compensated sum per subset size, then alternate signs from small to large.
    std::vector<double> sum(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> carry(static_cast<std::size_t>(n) + 1, 0.0);
    const std::uint32_t subsets = 1u << n;
    std::vector<double> mass(subsets, 0.0);
    for (std::uint32_t mask = 1; mask < subsets; ++mask) {
        const int low = std::countr_zero(mask);
        mass[mask] = mass[mask & (mask - 1)] + p[static_cast<std::size_t>(low)];
        const auto size = static_cast<std::size_t>(std::popcount(mask));
        const double y = 1.0 / mass[mask] - carry[size];
        const double t = sum[size] + y;
        carry[size] = (t - sum[size]) - y;
        sum[size] = t;
    }
    double total = 0, c = 0;
    for (int size = 1; size <= n; ++size) {
        const double term = (size % 2 == 1 ? 1.0 : -1.0) * sum[static_cast<std::size_t>(size)];
        const double y = term - c;
        const double t = total + y;
        c = (t - total) - y;
        total = t;
    }
    return total;
}

double expected_detected_at(const TargetDistribution& d, std::int64_t t) {
    if (t < 0) throw std::invalid_argument("expected_detected_at: negative draw count");
    double total = 0;
    for (double p : d.probabilities())
        total += -std::expm1(static_cast<double>(t) * std::log1p(-p));
    return total;
}

std::vector<std::int64_t> simulate_detection_times(const TargetDistribution& d,
                                                   std::int64_t draws, std::uint64_t seed,
                                                   std::int64_t run) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(run)));
    std::vector<double> remaining(d.probabilities().begin(), d.probabilities().end());
    std::vector<std::int64_t> times;
    std::int64_t now = 0;
    // Skip ahead over draws that hit nothing new: the wait until the next new
    // target is geometric in the undetected mass, and which target it is
    // follows the undetected probabilities.
    while (true) {
        const double undetected = std::accumulate(remaining.begin(), remaining.end(), 0.0);
        if (!(undetected > 0)) break;
        const auto wait = rng.geometric(std::min(undetected, 1.0));
        if (wait > static_cast<std::uint64_t>(draws - now)) break;
        now += static_cast<std::int64_t>(wait);
        times.push_back(now);
        double u = rng.uniform() * undetected;
        std::size_t pick = 0;
        for (; pick + 1 < remaining.size(); ++pick) {
            if (remaining[pick] == 0) continue;
            if (u < remaining[pick]) break;
            u -= remaining[pick];
        }
        while (remaining[pick] == 0) --pick;  // guard against rounding at the tail
        remaining[pick] = 0;
    }
    return times;
}

DetectionCurve simulate_detection_curve(const TargetDistribution& d, std::int64_t draws,
                                        std::int64_t runs, std::uint64_t seed) {
    if (draws < 1 || runs < 1)
        throw std::invalid_argument("simulate_detection_curve: draws and runs must be >= 1");
    std::vector<std::int64_t> new_hits(static_cast<std::size_t>(draws) + 1, 0);
    for (std::int64_t r = 0; r < runs; ++r) {
        for (auto t : simulate_detection_times(d, draws, seed, r)) ++new_hits[static_cast<std::size_t>(t)];
    }
    DetectionCurve out;
    out.expected_detected.resize(new_hits.size());
    std::int64_t cumulative = 0;
    for (std::size_t k = 0; k < new_hits.size(); ++k) {
        cumulative += new_hits[k];
        out.expected_detected[k] = static_cast<double>(cumulative) / static_cast<double>(runs);
    }
    return out;
}

}  // namespace rtg
