#include "rtg/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rtg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxDamping = 1e32;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Problem {
    ModelId id;
    std::vector<double> xs;
    std::vector<double> ys;
    double y_norm = 0;
};

// Residuals r = y - f(p); false when p is not admissible on the grid
// (non-finite values, or a rational denominator that vanishes or changes sign).
bool residuals(const Problem& pb, std::span<const double> p, Vector& r) {
    const auto m = pb.xs.size();
    r.resize(static_cast<Eigen::Index>(m));
    const bool rational = is_rational(pb.id);
    int sign = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (rational) {
            const double den = unchecked::denominator(pb.id, p, pb.xs[i]);
            if (!(den != 0.0) || !std::isfinite(den)) return false;
            const int s = den > 0 ? 1 : -1;
            if (sign == 0) sign = s;
            else if (s != sign) return false;
        }
        const double f = unchecked::evaluate(pb.id, p, pb.xs[i]);
        if (!std::isfinite(f)) return false;
        r[static_cast<Eigen::Index>(i)] = pb.ys[i] - f;
    }
    return r.allFinite();
}

bool jacobian(const Problem& pb, std::span<const double> p, Matrix& jac) {
    const auto m = pb.xs.size();
    const auto n = p.size();
    jac.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    std::vector<double> g(n);
    for (std::size_t i = 0; i < m; ++i) {
        unchecked::gradient(pb.id, p, pb.xs[i], g);
        for (std::size_t j = 0; j < n; ++j)
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g[j];
    }
    return jac.allFinite();
}

// Solves the linear parameters exactly given the nonlinear ones.
bool solve_linear(const Problem& pb, std::span<double> p) {
    const auto& s = spec(pb.id);
    std::vector<std::size_t> lin;
    for (std::size_t j = 0; j < s.param_count; ++j) {
        if (s.linear[j]) {
            lin.push_back(j);
            p[j] = 0.0;
        }
    }
    if (lin.empty()) return true;
    Vector r;
    Matrix jac;
    if (!residuals(pb, p, r) || !jacobian(pb, p, jac)) return false;
    Matrix a(jac.rows(), static_cast<Eigen::Index>(lin.size()));
    Vector scale(static_cast<Eigen::Index>(lin.size()));
    for (std::size_t k = 0; k < lin.size(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        a.col(col) = jac.col(static_cast<Eigen::Index>(lin[k]));
        const double norm = a.col(col).norm();
        scale[col] = norm > 0 ? norm : 1.0;
        a.col(col) /= scale[col];
    }
    const Vector z = a.colPivHouseholderQr().solve(r);
    for (std::size_t k = 0; k < lin.size(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        p[lin[k]] += z[col] / scale[col];
    }
    clamp_to_bounds(pb.id, p);
    return std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); });
}

struct StartOutcome {
    bool valid = false;
    bool converged = false;
    int iterations = 0;
    double cost = std::numeric_limits<double>::infinity();
    ParamVector params;
};

StartOutcome levenberg_marquardt(const Problem& pb, ParamVector p, const FitConfig& cfg) {
    StartOutcome out;
    const auto n = static_cast<Eigen::Index>(p.size());
    Vector r;
    if (!residuals(pb, p, r)) return out;
    double cost = r.squaredNorm();
    out.valid = true;

    Matrix jac;
    Vector diag = Vector::Zero(n);
    double damping = cfg.initial_damping;
    ParamVector trial(p.size());
    Vector r_trial;

    auto finish = [&](bool converged, int iterations) {
        out.converged = converged;
        out.iterations = iterations;
        out.cost = cost;
        out.params = p;
        return out;
    };

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        const double r_norm = std::sqrt(cost);
        if (cost == 0.0 || r_norm <= 1e-13 * pb.y_norm) return finish(true, iter);
        if (!jacobian(pb, p, jac)) return finish(false, iter);

        // Marquardt scaling: damping acts on diag(J^T J), kept non-decreasing.
        for (Eigen::Index j = 0; j < n; ++j) diag[j] = std::max(diag[j], jac.col(j).norm());
        Vector scale = diag;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(scale[j] > 0)) scale[j] = 1.0;
        }

        const Vector g = jac.transpose() * r;
        double cosine = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double cn = jac.col(j).norm();
            if (cn > 0) cosine = std::max(cosine, std::abs(g[j]) / (cn * r_norm));
        }
        if (cosine <= cfg.gradient_tolerance) return finish(true, iter);

        Matrix scaled = jac;
        for (Eigen::Index j = 0; j < n; ++j) scaled.col(j) /= scale[j];
        Vector p_scaled(n);
        for (Eigen::Index j = 0; j < n; ++j) p_scaled[j] = scale[j] * p[static_cast<std::size_t>(j)];

        Matrix aug(scaled.rows() + n, n);
        Vector rhs = Vector::Zero(scaled.rows() + n);
        rhs.head(scaled.rows()) = r;

        bool accepted = false;
        while (!accepted) {
            aug.topRows(scaled.rows()) = scaled;
            aug.bottomRows(n) = std::sqrt(damping) * Matrix::Identity(n, n);
            const Vector z = aug.colPivHouseholderQr().solve(rhs);
            for (Eigen::Index j = 0; j < n; ++j)
                trial[static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(j)] + z[j] / scale[j];
            clamp_to_bounds(pb.id, trial);

            Vector step(n);
            for (Eigen::Index j = 0; j < n; ++j)
                step[j] = scale[j] * (trial[static_cast<std::size_t>(j)] - p[static_cast<std::size_t>(j)]);
            const double step_norm = z.allFinite() ? step.norm() : std::numeric_limits<double>::infinity();

            if (std::isfinite(step_norm) && residuals(pb, trial, r_trial)) {
                const double trial_cost = r_trial.squaredNorm();
                if (trial_cost < cost) {
                    p = trial;
                    r = r_trial;
                    cost = trial_cost;
                    damping = std::max(damping / 10.0, 1e-15);
                    accepted = true;
                }
            }
            if (step_norm <= cfg.step_tolerance * (p_scaled.norm() + cfg.step_tolerance))
                return finish(true, iter + 1);
            if (!accepted) {
                damping *= 10.0;
                if (damping > kMaxDamping) return finish(false, iter + 1);
            }
        }
    }
    return finish(false, cfg.max_iterations);
}

Problem make_problem(const AggregateCurve& curve, ModelId id, const FitConfig& cfg) {
    cfg.validate();
    const auto& s = spec(id);
    if (curve.values.size() < s.param_count + 2)
        throw std::invalid_argument("curve too short to fit " + std::string(to_token(id)));
    for (double v : curve.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("curve holds non-finite values");
    }
    Problem pb{id, {}, {}, 0};
    for (auto k : log_grid(curve.draws(), cfg.grid_points)) {
        if (k == 0 && excludes_origin(id)) continue;
        pb.xs.push_back(static_cast<double>(k));
        pb.ys.push_back(curve.values[static_cast<std::size_t>(k)]);
    }
    double sq = 0;
    for (double y : pb.ys) sq += y * y;
    pb.y_norm = std::sqrt(sq);
    return pb;
}

bool has_nonlinear(ModelId id) {
    const auto& lin = spec(id).linear;
    return std::find(lin.begin(), lin.end(), false) != lin.end();
}

}  // namespace

void FitConfig::validate() const {
    if (max_iterations <= 0 || !(gradient_tolerance > 0) || !(step_tolerance > 0) ||
        multi_starts < 1 || grid_points < 2 || !(initial_damping > 0))
        throw std::invalid_argument("fit configuration values must be positive");
}

std::vector<std::int64_t> log_grid(std::int64_t draws, int points) {
    if (draws < 0) throw std::invalid_argument("negative draws");
    std::vector<std::int64_t> grid{0};
    if (draws == 0) return grid;
    points = std::max(points, 2);
    const double top = std::log1p(static_cast<double>(draws));
    for (int j = 1; j < points; ++j) {
        const double k = std::expm1(top * j / (points - 1));
        grid.push_back(std::clamp<std::int64_t>(std::llround(k), 0, draws));
    }
    grid.push_back(draws);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

Goodness goodness(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) throw std::invalid_argument("goodness: length mismatch");
    if (y.empty()) throw std::invalid_argument("goodness: empty input");
    const double n = static_cast<double>(y.size());
    double mean = 0;
    for (double v : y) mean += v;
    mean /= n;
    double ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_tot += (y[i] - mean) * (y[i] - mean);
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    }
    Goodness g{0.0, std::sqrt(ss_res / n)};
    if (ss_tot > 0) g.r_squared = 1.0 - ss_res / ss_tot;
    else if (ss_res > 0) g.r_squared = -std::numeric_limits<double>::infinity();
    else g.r_squared = kNaN;
    return g;
}

FitResult fit(const AggregateCurve& curve, ModelId id, const FitConfig& cfg) {
    return fit(curve, id, cfg, {});
}

FitResult fit(const AggregateCurve& curve, ModelId id, const FitConfig& cfg,
              std::span<const ParamVector> warm_starts) {
    const Problem pb = make_problem(curve, id, cfg);
    const auto& s = spec(id);
    const double x_max = pb.xs.empty() ? 1.0 : pb.xs.back();
    const int random_starts = has_nonlinear(id) ? cfg.multi_starts : 1;
    const std::uint64_t model_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(id));

    FitResult result;
    result.model = id;
    StartOutcome best;
    int converged_starts = 0;

    auto consider = [&](StartOutcome o) {
        if (!o.valid) return;
        if (o.converged) ++converged_starts;
        // Strict improvement keeps the earliest start on ties.
        if (!best.valid || o.cost < best.cost) best = std::move(o);
    };

    for (const auto& w : warm_starts) {
        if (w.size() != s.param_count)
            throw std::invalid_argument("warm start has wrong parameter count");
        ParamVector p = w;
        clamp_to_bounds(id, p);
        consider(levenberg_marquardt(pb, std::move(p), cfg));
    }
    for (int k = 0; k < random_starts; ++k) {
        Rng rng(derive_seed(model_seed, static_cast<std::uint64_t>(k)));
        ParamVector p(s.param_count, 0.0);
        sample_start(id, rng, x_max, p);
        if (!solve_linear(pb, p)) continue;
        consider(levenberg_marquardt(pb, std::move(p), cfg));
    }

    result.starts_converged = converged_starts;
    if (!best.valid) {
        result.params.assign(s.param_count, kNaN);
        result.r_squared = kNaN;
        result.rmse = kNaN;
        result.converged = false;
        return result;
    }
    result.params = best.params;
    result.iterations = best.iterations;
    result.converged = converged_starts > 0;
    const auto yhat = predict(result, pb.xs);
    const auto g = goodness(pb.ys, yhat);
    result.r_squared = g.r_squared;
    result.rmse = g.rmse;
    return result;
}

std::vector<double> predict(const FitResult& r, std::span<const double> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = unchecked::evaluate(r.model, r.params, xs[i]);
    return out;
}

bool ranks_before(const FitResult& a, const FitResult& b) {
    if (a.converged != b.converged) return a.converged;
    if (a.converged) {
        const bool an = std::isnan(a.r_squared), bn = std::isnan(b.r_squared);
        if (an != bn) return bn;
        if (!an && a.r_squared != b.r_squared) return a.r_squared > b.r_squared;
    }
    const bool an = std::isnan(a.rmse), bn = std::isnan(b.rmse);
    if (an != bn) return bn;
    if (!an && a.rmse != b.rmse) return a.rmse < b.rmse;
    return a.model < b.model;
}

const FitResult* Ranking::find(ModelId id) const {
    for (const auto& r : order) {
        if (r.model == id) return &r;
    }
    return nullptr;
}

std::optional<std::size_t> Ranking::position(ModelId id) const {
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i].model == id) return i;
    }
    return std::nullopt;
}

Ranking make_ranking(std::vector<FitResult> fits, ModelId reference) {
    if (fits.empty()) throw std::invalid_argument("make_ranking: no fits");
    Ranking out;
    out.reference = reference;
    out.order = std::move(fits);
    std::stable_sort(out.order.begin(), out.order.end(), ranks_before);
    const auto& best = out.order.front();
    for (std::size_t i = 0; i < out.order.size(); ++i) {
        const auto& r = out.order[i];
        out.delta_r_squared.push_back(i == 0 ? 0.0 : std::abs(r.r_squared - best.r_squared));
        out.delta_rmse.push_back(i == 0 ? 0.0 : std::abs(r.rmse - best.rmse));
    }
    return out;
}

Ranking rank_models(const AggregateCurve& curve, std::span<const ModelId> ids,
                    const FitConfig& cfg, ModelId reference) {
    if (ids.empty()) throw std::invalid_argument("rank_models: no models");
    std::vector<FitResult> fits;
    for (auto id : ids) fits.push_back(fit(curve, id, cfg));
    return make_ranking(std::move(fits), reference);
}

std::vector<FitResult> fit_polylog_ladder(const AggregateCurve& curve, const FitConfig& cfg) {
    std::vector<FitResult> out;
    for (auto id : kLadderModels) {
        std::vector<ParamVector> warm;
        if (!out.empty() && std::all_of(out.back().params.begin(), out.back().params.end(),
                                        [](double v) { return std::isfinite(v); })) {
            ParamVector padded = out.back().params;
            padded.push_back(0.0);
            warm.push_back(std::move(padded));
        }
        out.push_back(fit(curve, id, cfg, warm));
    }
    return out;
}

}  // namespace rtg
