#pragma once

// Paired nonparametric comparison of model scores across subjects.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace rtg {

enum class PValueMethod { exact, normal_approximation };

std::string_view to_string(PValueMethod m) noexcept;

struct WilcoxonResult {
    int n_pairs = 0;      ///< N: pairs before any removal
    int n_excluded = 0;   ///< pairs dropped because a score was NaN
    int n_effective = 0;  ///< pairs left after dropping NaN pairs and zero differences
    double w_statistic = 0;  ///< min(W+, W-)
    double w_plus = 0;
    double z_statistic = 0;  ///< signed: positive when xs tends to exceed ys
    double p_value = 1;      ///< two-sided
    double effect_size = 0;  ///< |Z| / sqrt(2N)
    PValueMethod method = PValueMethod::exact;
};

/// Conventional magnitude label for an effect size (0.1 small, 0.3 medium,
/// 0.5 large).
std::string_view effect_band(double effect) noexcept;

/// Largest n_effective handled by full sign enumeration.
inline constexpr int kExactLimit = 12;

/// Wilcoxon signed-rank test on xs - ys with zero differences dropped and
/// average ranks for ties. Throws std::invalid_argument on length mismatch
/// or empty input.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> xs, std::span<const double> ys);

/// Two-sided exact p-value P(min(W+, W-) <= observed) under the null, for
/// nonzero paired differences. Counts sign patterns through the subset-sum
/// distribution of doubled (integer) ranks; n is capped at kExactLimit.
double exact_two_sided_p(std::span<const double> differences);

struct ModelComparison {
    WilcoxonResult test;
    int subjects = 0;
    double fraction_best = 0;     ///< subjects where the reference ranks first
    double fraction_top_two = 0;  ///< subjects where it ranks first or second
};

/// Per-subject paired scores (reference, other).
using PairedScores = std::map<std::string, std::pair<double, double>>;

/// Runs the signed-rank test on reference vs other scores. Rank fractions are
/// supplied by the caller through `reference_positions` (0-based rank of the
/// reference per subject); subjects missing there are not counted.
ModelComparison compare_models_across_subjects(
    const PairedScores& per_subject_scores,
    const std::map<std::string, int>& reference_positions = {});

}  // namespace rtg
