#include "rtg/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "rtg/errors.hpp"

namespace rtg {

CountingCurve::CountingCurve(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw std::invalid_argument("counting curve needs at least phi(0)");
    if (counts_.front() != 0) throw std::invalid_argument("counting curve must start at 0");
    if (!std::is_sorted(counts_.begin(), counts_.end()))
        throw std::invalid_argument("counting curve must be non-decreasing");
}

void Dataset::validate() const {
    if (curves.empty()) throw std::invalid_argument("dataset '" + subject + "' has no sessions");
    const auto n = curves.front().size();
    for (const auto& c : curves) {
        if (c.size() != n)
            throw std::invalid_argument("dataset '" + subject + "' mixes session lengths");
    }
}

CountingCurve build_curve(std::span<const FailureEvent> events, std::int64_t draws) {
    if (draws < 0) throw MalformedLog("negative number of draws");
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(draws) + 1, 0);
    if (!events.empty()) {
        const auto session = events.front().session_id;
        for (const auto& e : events) {
            if (e.session_id != session)
                throw MalformedLog("events from several sessions passed to build_curve");
            if (e.test_index < 1 || e.test_index > draws)
                throw MalformedLog("test_index " + std::to_string(e.test_index) +
                                   " outside [1, " + std::to_string(draws) + "]");
            if (e.signature.empty()) throw MalformedLog("event without a signature");
        }
    }

    // First index at which each counted signature appears.
    std::vector<const FailureEvent*> counted;
    counted.reserve(events.size());
    for (const auto& e : events) {
        if (e.counted) counted.push_back(&e);
    }
    std::stable_sort(counted.begin(), counted.end(), [](const auto* a, const auto* b) {
        return a->test_index < b->test_index;
    });
    std::unordered_set<std::string_view> seen;
    for (const auto* e : counted) {
        if (seen.insert(e->signature).second) ++counts[static_cast<std::size_t>(e->test_index)];
    }
    for (std::size_t k = 1; k < counts.size(); ++k) counts[k] += counts[k - 1];
    return CountingCurve(std::move(counts));
}

AggregateCurve aggregate_mean(const Dataset& d) {
    d.validate();
    const auto n = d.curves.front().size();
    std::vector<double> sum(n, 0.0);
    for (const auto& c : d.curves) {
        for (std::size_t k = 0; k < n; ++k) sum[k] += c[k];
    }
    const double s = static_cast<double>(d.curves.size());
    for (auto& v : sum) v /= s;
    return {std::move(sum)};
}

AggregateCurve aggregate_median(const Dataset& d) {
    d.validate();
    const auto n = d.curves.front().size();
    const auto s = d.curves.size();
    std::vector<double> out(n);
    std::vector<std::uint32_t> column(s);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < s; ++i) column[i] = d.curves[i][k];
        const auto mid = column.begin() + static_cast<std::ptrdiff_t>(s / 2);
        std::nth_element(column.begin(), mid, column.end());
        if (s % 2 == 1) {
            out[k] = *mid;
        } else {
            const auto lower = *std::max_element(column.begin(), mid);
            out[k] = 0.5 * (static_cast<double>(lower) + static_cast<double>(*mid));
        }
    }
    return {std::move(out)};
}

namespace {

struct Moments {
    double mean = 0, m2 = 0, m3 = 0;  // biased central moments
    std::size_t n = 0;
};

template <class Get>
Moments moments(std::size_t n, Get get) {
    Moments m;
    m.n = n;
    if (n == 0) return m;
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += get(i);
    m.mean = sum / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = get(i) - m.mean;
        m.m2 += dev * dev;
        m.m3 += dev * dev * dev;
    }
    m.m2 /= static_cast<double>(n);
    m.m3 /= static_cast<double>(n);
    return m;
}

double sd_of(const Moments& m) {
    if (m.n < 2) return 0.0;
    return std::sqrt(m.m2 * static_cast<double>(m.n) / static_cast<double>(m.n - 1));
}

double skew_of(const Moments& m) {
    if (m.n < 3 || !(m.m2 > 0)) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(m.n);
    const double g1 = m.m3 / std::pow(m.m2, 1.5);
    return std::sqrt(n * (n - 1)) / (n - 2) * g1;
}

}  // namespace

double sample_sd(std::span<const double> xs) {
    return sd_of(moments(xs.size(), [&](std::size_t i) { return xs[i]; }));
}

double sample_skewness(std::span<const double> xs) {
    return skew_of(moments(xs.size(), [&](std::size_t i) { return xs[i]; }));
}

SummaryStats summary_stats(const Dataset& d, DispersionAxis axis) {
    d.validate();
    SummaryStats out;
    out.sessions = static_cast<std::int64_t>(d.curves.size());
    out.draws = d.draws();

    std::vector<double> deltas;
    deltas.reserve(d.curves.size());
    for (const auto& c : d.curves) {
        out.max_faults = std::max<std::int64_t>(out.max_faults, c.final_count());
        deltas.push_back(out.draws > 0 ? static_cast<double>(c.final_count()) /
                                             static_cast<double>(out.draws)
                                       : 0.0);
    }
    const auto dm = moments(deltas.size(), [&](std::size_t i) { return deltas[i]; });
    out.mean_delta = dm.mean;
    out.sd_delta = sd_of(dm);

    double sd_sum = 0, skew_sum = 0;
    std::size_t sd_terms = 0, skew_terms = 0;
    auto accumulate = [&](const Moments& m) {
        sd_sum += sd_of(m);
        ++sd_terms;
        const double g = skew_of(m);
        if (!std::isnan(g)) {
            skew_sum += g;
            ++skew_terms;
        }
    };

    const auto t = static_cast<std::size_t>(out.draws);
    if (axis == DispersionAxis::across_sessions) {
        for (std::size_t k = 1; k <= t; ++k) {
            accumulate(moments(d.curves.size(), [&](std::size_t i) {
                return static_cast<double>(d.curves[i][k]);
            }));
        }
    } else {
        for (const auto& c : d.curves) {
            accumulate(moments(t, [&](std::size_t k) { return static_cast<double>(c[k + 1]); }));
        }
    }
    out.mean_sd = sd_terms ? sd_sum / static_cast<double>(sd_terms) : 0.0;
    out.mean_skew = skew_terms ? skew_sum / static_cast<double>(skew_terms)
                               : std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace rtg
