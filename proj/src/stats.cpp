#include "rtg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rtg {

namespace {

struct RankedDifferences {
    std::vector<std::int64_t> doubled_ranks;  // 2 x average rank, aligned with input
    std::vector<std::int64_t> tie_sizes;
};

RankedDifferences rank_abs(std::span<const double> d) {
    const auto n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
    RankedDifferences out;
    out.doubled_ranks.assign(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
        // positions i..j (0-based) share rank ((i+1) + (j+1)) / 2
        const auto doubled = static_cast<std::int64_t>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) out.doubled_ranks[order[k]] = doubled;
        out.tie_sizes.push_back(static_cast<std::int64_t>(j - i + 1));
        i = j + 1;
    }
    return out;
}

}  // namespace

std::string_view to_string(PValueMethod m) noexcept {
    return m == PValueMethod::exact ? "exact" : "normal";
}

std::string_view effect_band(double effect) noexcept {
    if (effect >= 0.5) return "large";
    if (effect >= 0.3) return "medium";
    if (effect >= 0.1) return "small";
    return "negligible";
}

double exact_two_sided_p(std::span<const double> differences) {
    const auto n = differences.size();
    if (n == 0) return 1.0;
    if (n > static_cast<std::size_t>(kExactLimit))
        throw std::invalid_argument("exact Wilcoxon p-value limited to 12 differences");
    const auto ranked = rank_abs(differences);
    std::int64_t total = 0, plus = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total += ranked.doubled_ranks[i];
        if (differences[i] > 0) plus += ranked.doubled_ranks[i];
    }
    const std::int64_t observed = std::min(plus, total - plus);

    // ways[s]: sign patterns whose positive ranks sum to s (doubled units).
    std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
    ways[0] = 1.0;
    std::int64_t reach = 0;
    for (auto r : ranked.doubled_ranks) {
        for (std::int64_t s = reach; s >= 0; --s) {
            if (ways[static_cast<std::size_t>(s)] != 0.0)
                ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
        }
        reach += r;
    }
    double extreme = 0;
    for (std::int64_t s = 0; s <= total; ++s) {
        if (std::min(s, total - s) <= observed) extreme += ways[static_cast<std::size_t>(s)];
    }
    return std::min(1.0, extreme / std::ldexp(1.0, static_cast<int>(n)));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("wilcoxon: length mismatch");
    if (xs.empty()) throw std::invalid_argument("wilcoxon: no pairs");
    WilcoxonResult out;
    out.n_pairs = static_cast<int>(xs.size());

    std::vector<double> d;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::isnan(xs[i]) || std::isnan(ys[i])) {
            ++out.n_excluded;
            continue;
        }
        const double diff = xs[i] - ys[i];
        // inf - inf: both models equally degenerate
        if (std::isnan(diff) || diff == 0.0) continue;
        d.push_back(diff);
    }
    out.n_effective = static_cast<int>(d.size());
    if (d.empty()) return out;

    const auto ranked = rank_abs(d);
    std::int64_t plus2 = 0, total2 = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        total2 += ranked.doubled_ranks[i];
        if (d[i] > 0) plus2 += ranked.doubled_ranks[i];
    }
    out.w_plus = 0.5 * static_cast<double>(plus2);
    out.w_statistic = 0.5 * static_cast<double>(std::min(plus2, total2 - plus2));

    const double n = static_cast<double>(d.size());
    double variance = n * (n + 1) * (2 * n + 1) / 24.0;
    for (auto t : ranked.tie_sizes) {
        const double tt = static_cast<double>(t);
        variance -= (tt * tt * tt - tt) / 48.0;
    }
    const double mean = n * (n + 1) / 4.0;
    const double diff = out.w_plus - mean;
    if (variance > 0 && std::abs(diff) > 0.5)
        out.z_statistic = (diff - std::copysign(0.5, diff)) / std::sqrt(variance);

    if (out.n_effective <= kExactLimit) {
        out.method = PValueMethod::exact;
        out.p_value = exact_two_sided_p(d);
    } else {
        out.method = PValueMethod::normal_approximation;
        out.p_value = std::min(1.0, std::erfc(std::abs(out.z_statistic) / std::sqrt(2.0)));
    }
    const int analysable = out.n_pairs - out.n_excluded;
    out.effect_size = std::abs(out.z_statistic) / std::sqrt(2.0 * analysable);
    return out;
}

ModelComparison compare_models_across_subjects(const PairedScores& per_subject_scores,
                                               const std::map<std::string, int>& reference_positions) {
    if (per_subject_scores.empty())
        throw std::invalid_argument("compare_models_across_subjects: no subjects");
    std::vector<double> ref, other;
    for (const auto& [subject, scores] : per_subject_scores) {
        ref.push_back(scores.first);
        other.push_back(scores.second);
    }
    ModelComparison out;
    out.test = wilcoxon_signed_rank(ref, other);
    out.subjects = static_cast<int>(per_subject_scores.size());
    int ranked = 0, first = 0, top_two = 0;
    for (const auto& [subject, pos] : reference_positions) {
        if (!per_subject_scores.contains(subject)) continue;
        ++ranked;
        if (pos == 0) ++first;
        if (pos <= 1) ++top_two;
    }
    if (ranked > 0) {
        out.fraction_best = static_cast<double>(first) / ranked;
        out.fraction_top_two = static_cast<double>(top_two) / ranked;
    }
    return out;
}

}  // namespace rtg
