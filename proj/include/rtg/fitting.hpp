#pragma once

// Damped nonlinear least-squares fitting of catalogue models to aggregate
// fault-count curves, goodness-of-fit scores and best-fit ranking.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rtg/curves.hpp"
#include "rtg/models.hpp"

namespace rtg {

struct FitConfig {
    int max_iterations = 200;
    double gradient_tolerance = 1e-10;
    double step_tolerance = 1e-10;
    int multi_starts = 16;
    std::uint64_t seed = 1;
    int grid_points = 512;
    double initial_damping = 1e-3;

    /// Throws std::invalid_argument unless every field is positive.
    void validate() const;
};

struct Goodness {
    double r_squared;  ///< NaN when SS_tot = SS_res = 0; -inf when only SS_tot = 0
    double rmse;
};

struct FitResult {
    ModelId model = ModelId::phi1;
    ParamVector params;
    double r_squared = 0.0;
    double rmse = 0.0;
    bool converged = false;
    int iterations = 0;  ///< iterations of the winning start
    int starts_converged = 0;
};

struct Ranking {
    std::vector<FitResult> order;  ///< best first
    ModelId reference = ModelId::phi5;
    /// |score(model) - score(best)|, indexed like `order`.
    std::vector<double> delta_r_squared;
    std::vector<double> delta_rmse;

    const FitResult& best() const { return order.front(); }
    /// Null when the reference model was not among the ranked ids.
    const FitResult* find(ModelId id) const;
    /// 0-based rank of `id`, or nullopt.
    std::optional<std::size_t> position(ModelId id) const;
};

/// Fitting grid: `points` indices log-spaced over [0, draws], always
/// including 0 and draws, deduplicated and ascending.
std::vector<std::int64_t> log_grid(std::int64_t draws, int points);

Goodness goodness(std::span<const double> y, std::span<const double> yhat);

/// Fits `id` to `curve` on the configured grid. Never throws on numerical
/// trouble: if every start aborts, returns converged = false with NaN scores.
/// Throws std::invalid_argument when the curve is shorter than
/// param_count + 2 or holds non-finite values.
FitResult fit(const AggregateCurve& curve, ModelId id, const FitConfig& cfg);

/// Same, with extra caller-supplied starting points tried before the random ones.
FitResult fit(const AggregateCurve& curve, ModelId id, const FitConfig& cfg,
              std::span<const ParamVector> warm_starts);

/// Fitted values of `r` at the grid x values.
std::vector<double> predict(const FitResult& r, std::span<const double> xs);

/// Strict weak order used by rank_models: converged fits first, by R^2
/// descending, then RMSE ascending (NaN last), then model id.
bool ranks_before(const FitResult& a, const FitResult& b);

/// Orders already computed fits and fills the deltas against the best.
Ranking make_ranking(std::vector<FitResult> fits, ModelId reference = ModelId::phi5);

Ranking rank_models(const AggregateCurve& curve, std::span<const ModelId> ids,
                    const FitConfig& cfg, ModelId reference = ModelId::phi5);

/// Fits lam1..lam5, warm-starting each degree from the previous solution
/// with its top coefficient zero-padded, so R^2 never decreases up the ladder.
std::vector<FitResult> fit_polylog_ladder(const AggregateCurve& curve, const FitConfig& cfg);

}  // namespace rtg
