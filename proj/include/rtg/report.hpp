#pragma once

// CSV reports of the fitting pipeline: per-model fit tables, best-fit
// rankings, plot data, pairwise model comparisons and session summaries.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rtg/curves.hpp"
#include "rtg/fitting.hpp"
#include "rtg/stats.hpp"

namespace rtg::report {

struct SubjectFits {
    std::string subject;
    std::vector<FitResult> fits;
};

enum class Metric { r_squared, rmse };
/// "r2" or "rmse"; throws std::invalid_argument otherwise.
Metric metric_from_string(std::string_view s);
std::string_view to_string(Metric m) noexcept;

/// subject,model,converged,R2,RMSE,iterations,starts_converged,params
std::string fits_csv(std::span<const SubjectFits> subjects);
std::vector<SubjectFits> parse_fits_csv(std::string_view text);

/// subject,ranking,R2_best,RMSE_best,deltaR2_ref,deltaRMSE_ref followed by a
/// '#' footer with the reference model's fraction-best and fraction-top-two.
std::string ranking_csv(std::span<const SubjectFits> subjects, ModelId reference);

/// x,observed,<model>... for the top `top` models of `ranking`.
std::string plot_csv(std::span<const double> xs, std::span<const double> observed,
                     const Ranking& ranking, std::size_t top = 3);

/// Grid x values and observed values used for fitting `curve`.
std::pair<std::vector<double>, std::vector<double>> fit_grid(const AggregateCurve& curve,
                                                             int grid_points);

/// Reference vs other scores per subject, with the reference's rank positions.
struct ComparisonInput {
    PairedScores scores;
    std::map<std::string, int> reference_positions;
};
ComparisonInput comparison_input(std::span<const SubjectFits> subjects, ModelId reference,
                                 ModelId other, Metric metric);

/// model_a,model_b,N,n_effective,W,Z,p,effect,method (one row per other
/// model), then a '#' footer with the pairs excluded for NaN scores.
std::string comparison_csv(std::span<const SubjectFits> subjects, ModelId reference,
                           std::span<const ModelId> others, Metric metric);

/// subject,S,T,F,E_sigma,E_gamma,E_delta,sd_delta
std::string summary_csv(std::span<const std::pair<std::string, SummaryStats>> rows);

/// subject,model,R2,RMSE (one row per ladder degree).
std::string ladder_csv(std::span<const std::pair<std::string, std::vector<FitResult>>> rows);

}  // namespace rtg::report
