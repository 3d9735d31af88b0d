#pragma once

// Catalogue of growth model functions: nine general forms (phi1..phi9) and
// the poly-logarithmic ladder (lam1..lam7). Logarithms are natural; x is the
// number of drawn test cases.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtg/random.hpp"

namespace rtg {

enum class ModelId {
    phi1, phi2, phi3, phi4, phi5, phi6, phi7, phi8, phi9,
    lam1, lam2, lam3, lam4, lam5, lam6, lam7,
};

inline constexpr std::array<ModelId, 16> kAllModels = {
    ModelId::phi1, ModelId::phi2, ModelId::phi3, ModelId::phi4, ModelId::phi5, ModelId::phi6,
    ModelId::phi7, ModelId::phi8, ModelId::phi9, ModelId::lam1, ModelId::lam2, ModelId::lam3,
    ModelId::lam4, ModelId::lam5, ModelId::lam6, ModelId::lam7,
};

inline constexpr std::array<ModelId, 9> kPhiModels = {
    ModelId::phi1, ModelId::phi2, ModelId::phi3, ModelId::phi4, ModelId::phi5,
    ModelId::phi6, ModelId::phi7, ModelId::phi8, ModelId::phi9,
};

inline constexpr std::array<ModelId, 5> kLadderModels = {
    ModelId::lam1, ModelId::lam2, ModelId::lam3, ModelId::lam4, ModelId::lam5,
};

/// "phi1".."phi9", "lam1".."lam7".
std::string_view to_token(ModelId id) noexcept;
/// Inverse of to_token; throws std::invalid_argument on unknown tokens.
ModelId model_from_token(std::string_view token);
/// Comma-separated token list ("phi4,phi5"); "all" and "phi"/"lam" expand.
std::vector<ModelId> parse_model_list(std::string_view list);

using ParamVector = std::vector<double>;

struct Bounds {
    double lower;
    double upper;
};

struct ModelSpec {
    ModelId id;
    std::vector<std::string> param_names;
    std::size_t param_count;
    std::vector<Bounds> bounds;
    /// Parameters the model is linear in (given the others).
    std::vector<bool> linear;
    std::string domain_note;
};

/// All 16 specs in declaration order.
std::span<const ModelSpec> catalogue();
const ModelSpec& spec(ModelId id);

bool in_bounds(ModelId id, std::span<const double> p);
/// Projects p onto the box constraints of `id`.
void clamp_to_bounds(ModelId id, std::span<double> p);

/// Model value at x >= 0. Throws DomainError outside the model's domain
/// (phi9 at 0, negative powers of 0) and PoleError where a rational model's
/// denominator vanishes.
double evaluate(ModelId id, std::span<const double> p, double x);

/// Analytic partial derivatives with respect to each parameter; same errors
/// as evaluate.
std::vector<double> gradient(ModelId id, std::span<const double> p, double x);

/// x^b with 0^b = 0 for b > 0.
double power(double x, double b) noexcept;

namespace unchecked {

/// Model value without domain checks; non-finite at poles or domain errors.
double evaluate(ModelId id, std::span<const double> p, double x) noexcept;
/// Gradient without domain checks; `out` has param_count entries.
void gradient(ModelId id, std::span<const double> p, double x, std::span<double> out) noexcept;
/// Denominator of rational models (phi1..phi3); 1 for the others.
double denominator(ModelId id, std::span<const double> p, double x) noexcept;

}  // namespace unchecked

/// Draws the nonlinear parameters of a multi-start initial point for data on
/// [0, x_max]: exponents log-uniformly within bounds, scale parameters
/// log-uniformly over ranges tied to x_max. Linear parameters are set to 0;
/// the fitter solves them by linear least squares.
void sample_start(ModelId id, Rng& rng, double x_max, std::span<double> p);

/// True for phi1..phi3.
bool is_rational(ModelId id) noexcept;
/// True when phi9-style negative powers make x = 0 unusable.
bool excludes_origin(ModelId id) noexcept;

}  // namespace rtg
