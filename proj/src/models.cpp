#include "rtg/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rtg/errors.hpp"

namespace rtg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Bounds kFree{-kInf, kInf};
constexpr Bounds kExponent{0.05, 6.0};
constexpr Bounds kRootExponent{0.2, 5.0};

constexpr std::array<std::string_view, 16> kTokens = {
    "phi1", "phi2", "phi3", "phi4", "phi5", "phi6", "phi7", "phi8",
    "phi9", "lam1", "lam2", "lam3", "lam4", "lam5", "lam6", "lam7",
};

ModelSpec make_spec(ModelId id, std::vector<std::string> names, std::vector<Bounds> bounds,
                    std::vector<bool> linear, std::string note) {
    const auto n = names.size();
    if (bounds.empty()) bounds.assign(n, kFree);
    if (linear.empty()) linear.assign(n, true);
    return ModelSpec{id, std::move(names), n, std::move(bounds), std::move(linear),
                     std::move(note)};
}

std::vector<ModelSpec> build_catalogue() {
    std::vector<ModelSpec> c;
    c.push_back(make_spec(ModelId::phi1, {"a", "B"}, {}, {true, false},
                          "a x / (x + B); pole where x + B = 0"));
    c.push_back(make_spec(ModelId::phi2, {"a", "b", "c", "d", "A", "B", "C", "D"}, {},
                          {true, true, true, true, false, false, false, false},
                          "cubic / cubic rational; pole at real roots of the denominator"));
    c.push_back(make_spec(ModelId::phi3, {"a", "b", "c", "A", "B", "C"},
                          {kFree, kExponent, kFree, kFree, kExponent, kFree},
                          {true, false, true, false, false, false},
                          "(a x^b + c) / (A x^B + C); pole where A x^B + C = 0"));
    c.push_back(make_spec(ModelId::phi4, {"a", "b", "c"}, {kFree, kExponent, kFree},
                          {true, false, true}, "a log^b(x + 1) + c"));
    c.push_back(make_spec(ModelId::phi5, {"a", "b", "c", "d"}, {}, {},
                          "cubic polynomial in log(x + 1)"));
    c.push_back(make_spec(ModelId::phi6, {"a", "b", "c", "d"},
                          {kFree, Bounds{1e-12, 1e3}, Bounds{1.0, 10.0}, kFree},
                          {true, false, false, true}, "a b^(x^(1/c)) + d"));
    c.push_back(make_spec(ModelId::phi7, {"a", "b", "c", "d"}, {}, {}, "cubic polynomial in x"));
    c.push_back(make_spec(ModelId::phi8, {"a", "b", "c"}, {kFree, kExponent, kFree},
                          {true, false, true}, "a x^b + c"));
    c.push_back(make_spec(ModelId::phi9, {"a", "b", "c", "d"}, {}, {},
                          "a x^-3 + b x^-2 + c x^-1 + d; undefined at x = 0"));
    for (int k = 1; k <= 5; ++k) {
        std::vector<std::string> names;
        for (int j = 0; j <= k; ++j) names.push_back("c" + std::to_string(j));
        c.push_back(make_spec(static_cast<ModelId>(static_cast<int>(ModelId::lam1) + k - 1),
                              std::move(names), {}, {},
                              "polynomial of degree " + std::to_string(k) + " in log(x + 1)"));
    }
    c.push_back(make_spec(ModelId::lam6, {"a", "b", "c"}, {kFree, kExponent, kFree},
                          {true, false, true}, "a log^b(x + 1) + c (same as phi4)"));
    c.push_back(make_spec(ModelId::lam7, {"a", "b", "c"}, {kFree, kRootExponent, kFree},
                          {true, false, true}, "a log^(1/b)(x + 1) + c"));
    return c;
}

const std::vector<ModelSpec>& specs() {
    static const std::vector<ModelSpec> table = build_catalogue();
    return table;
}

int ladder_degree(ModelId id) {
    return static_cast<int>(id) - static_cast<int>(ModelId::lam1) + 1;
}

// x^b * log(x), continuous at x = 0 for b > 0.
double power_log(double x, double b) noexcept {
    if (x == 0.0) return b > 0 ? 0.0 : -kInf;
    return power(x, b) * std::log(x);
}

double cubic(std::span<const double> c, double t) noexcept {
    return ((c[0] * t + c[1]) * t + c[2]) * t + c[3];
}

}  // namespace

std::string_view to_token(ModelId id) noexcept { return kTokens[static_cast<std::size_t>(id)]; }

ModelId model_from_token(std::string_view token) {
    for (std::size_t i = 0; i < kTokens.size(); ++i) {
        if (kTokens[i] == token) return static_cast<ModelId>(i);
    }
    throw std::invalid_argument("unknown model '" + std::string(token) + "'");
}

std::vector<ModelId> parse_model_list(std::string_view list) {
    std::vector<ModelId> out;
    auto add = [&](ModelId id) {
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    };
    while (!list.empty()) {
        const auto comma = list.find(',');
        const auto item = list.substr(0, comma);
        if (item == "all") {
            for (auto id : kAllModels) add(id);
        } else if (item == "phi") {
            for (auto id : kPhiModels) add(id);
        } else if (item == "lam") {
            for (int i = 0; i < 7; ++i) add(static_cast<ModelId>(static_cast<int>(ModelId::lam1) + i));
        } else if (!item.empty()) {
            add(model_from_token(item));
        }
        if (comma == std::string_view::npos) break;
        list.remove_prefix(comma + 1);
    }
    if (out.empty()) throw std::invalid_argument("empty model list");
    return out;
}

std::span<const ModelSpec> catalogue() { return specs(); }

const ModelSpec& spec(ModelId id) { return specs()[static_cast<std::size_t>(id)]; }

bool in_bounds(ModelId id, std::span<const double> p) {
    const auto& s = spec(id);
    if (p.size() != s.param_count) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || p[i] < s.bounds[i].lower || p[i] > s.bounds[i].upper)
            return false;
    }
    return true;
}

void clamp_to_bounds(ModelId id, std::span<double> p) {
    const auto& s = spec(id);
    for (std::size_t i = 0; i < p.size() && i < s.param_count; ++i)
        p[i] = std::clamp(p[i], s.bounds[i].lower, s.bounds[i].upper);
}

double power(double x, double b) noexcept {
    if (x == 0.0) {
        if (b > 0) return 0.0;
        return b == 0 ? 1.0 : kInf;
    }
    return std::exp(b * std::log(x));
}

bool is_rational(ModelId id) noexcept {
    return id == ModelId::phi1 || id == ModelId::phi2 || id == ModelId::phi3;
}

bool excludes_origin(ModelId id) noexcept { return id == ModelId::phi9; }

namespace unchecked {

double denominator(ModelId id, std::span<const double> p, double x) noexcept {
    switch (id) {
        case ModelId::phi1: return x + p[1];
        case ModelId::phi2: return cubic(p.subspan(4, 4), x);
        case ModelId::phi3: return p[3] * power(x, p[4]) + p[5];
        default: return 1.0;
    }
}

double evaluate(ModelId id, std::span<const double> p, double x) noexcept {
    const double lg = std::log1p(x);
    switch (id) {
        case ModelId::phi1: return p[0] * x / (x + p[1]);
        case ModelId::phi2: return cubic(p.subspan(0, 4), x) / cubic(p.subspan(4, 4), x);
        case ModelId::phi3:
            return (p[0] * power(x, p[1]) + p[2]) / (p[3] * power(x, p[4]) + p[5]);
        case ModelId::phi4:
        case ModelId::lam6: return p[0] * power(lg, p[1]) + p[2];
        case ModelId::phi5: return cubic(p, lg);
        case ModelId::phi6: return p[0] * std::pow(p[1], power(x, 1.0 / p[2])) + p[3];
        case ModelId::phi7: return cubic(p, x);
        case ModelId::phi8: return p[0] * power(x, p[1]) + p[2];
        case ModelId::phi9: {
            const double inv = 1.0 / x;
            return cubic(p, inv);
        }
        case ModelId::lam1:
        case ModelId::lam2:
        case ModelId::lam3:
        case ModelId::lam4:
        case ModelId::lam5: {
            double acc = 0;
            for (int j = ladder_degree(id); j >= 0; --j) acc = acc * lg + p[static_cast<std::size_t>(j)];
            return acc;
        }
        case ModelId::lam7: return p[0] * power(lg, 1.0 / p[1]) + p[2];
    }
    return std::numeric_limits<double>::quiet_NaN();
}

void gradient(ModelId id, std::span<const double> p, double x, std::span<double> g) noexcept {
    const double lg = std::log1p(x);
    switch (id) {
        case ModelId::phi1: {
            const double den = x + p[1];
            g[0] = x / den;
            g[1] = -p[0] * x / (den * den);
            return;
        }
        case ModelId::phi2: {
            const double num = cubic(p.subspan(0, 4), x);
            const double den = cubic(p.subspan(4, 4), x);
            const double powers[4] = {x * x * x, x * x, x, 1.0};
            for (int j = 0; j < 4; ++j) {
                g[j] = powers[j] / den;
                g[4 + j] = -num * powers[j] / (den * den);
            }
            return;
        }
        case ModelId::phi3: {
            const double xb = power(x, p[1]);
            const double xB = power(x, p[4]);
            const double num = p[0] * xb + p[2];
            const double den = p[3] * xB + p[5];
            const double den2 = den * den;
            g[0] = xb / den;
            g[1] = p[0] * power_log(x, p[1]) / den;
            g[2] = 1.0 / den;
            g[3] = -num * xB / den2;
            g[4] = -num * p[3] * power_log(x, p[4]) / den2;
            g[5] = -num / den2;
            return;
        }
        case ModelId::phi4:
        case ModelId::lam6:
            g[0] = power(lg, p[1]);
            g[1] = p[0] * power_log(lg, p[1]);
            g[2] = 1.0;
            return;
        case ModelId::phi5:
            g[0] = lg * lg * lg;
            g[1] = lg * lg;
            g[2] = lg;
            g[3] = 1.0;
            return;
        case ModelId::phi6: {
            const double u = power(x, 1.0 / p[2]);
            const double bu = std::pow(p[1], u);
            g[0] = bu;
            g[1] = p[0] * u * std::pow(p[1], u - 1.0);
            // du/dc = -u log(x) / c^2
            const double du_dc = x == 0.0 ? 0.0 : -u * std::log(x) / (p[2] * p[2]);
            g[2] = p[0] * bu * std::log(p[1]) * du_dc;
            g[3] = 1.0;
            return;
        }
        case ModelId::phi7:
            g[0] = x * x * x;
            g[1] = x * x;
            g[2] = x;
            g[3] = 1.0;
            return;
        case ModelId::phi8:
            g[0] = power(x, p[1]);
            g[1] = p[0] * power_log(x, p[1]);
            g[2] = 1.0;
            return;
        case ModelId::phi9: {
            const double inv = 1.0 / x;
            g[0] = inv * inv * inv;
            g[1] = inv * inv;
            g[2] = inv;
            g[3] = 1.0;
            return;
        }
        case ModelId::lam1:
        case ModelId::lam2:
        case ModelId::lam3:
        case ModelId::lam4:
        case ModelId::lam5: {
            double term = 1.0;
            for (int j = 0; j <= ladder_degree(id); ++j) {
                g[static_cast<std::size_t>(j)] = term;
                term *= lg;
            }
            return;
        }
        case ModelId::lam7: {
            const double e = 1.0 / p[1];
            g[0] = power(lg, e);
            g[1] = -p[0] * power_log(lg, e) / (p[1] * p[1]);
            g[2] = 1.0;
            return;
        }
    }
}

}  // namespace unchecked

namespace {

void check_args(ModelId id, std::span<const double> p, double x) {
    const auto& s = spec(id);
    if (p.size() != s.param_count)
        throw std::invalid_argument(std::string(to_token(id)) + " expects " +
                                    std::to_string(s.param_count) + " parameters");
    for (double v : p) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite model parameter");
    }
    if (!in_bounds(id, p))
        throw std::invalid_argument(std::string(to_token(id)) + ": parameter outside its bounds");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw DomainError(std::string(to_token(id)) + ": x must be finite and non-negative");
    if (excludes_origin(id) && x == 0.0)
        throw DomainError(std::string(to_token(id)) + " is undefined at x = 0");
    if (x == 0.0) {
        const bool negative_power = (id == ModelId::phi8 && p[1] < 0) ||
                                    (id == ModelId::phi3 && (p[1] < 0 || p[4] < 0));
        if (negative_power)
            throw DomainError(std::string(to_token(id)) + ": negative power of 0");
    }
    if (is_rational(id) && unchecked::denominator(id, p, x) == 0.0)
        throw PoleError(std::string(to_token(id)) + ": denominator vanishes at x = " +
                        std::to_string(x));
}

}  // namespace

double evaluate(ModelId id, std::span<const double> p, double x) {
    check_args(id, p, x);
    const double y = unchecked::evaluate(id, p, x);
    if (!std::isfinite(y)) throw DomainError(std::string(to_token(id)) + ": non-finite value");
    return y;
}

std::vector<double> gradient(ModelId id, std::span<const double> p, double x) {
    check_args(id, p, x);
    std::vector<double> g(p.size());
    unchecked::gradient(id, p, x, g);
    for (double v : g) {
        if (!std::isfinite(v))
            throw DomainError(std::string(to_token(id)) + ": non-finite derivative");
    }
    return g;
}

void sample_start(ModelId id, Rng& rng, double x_max, std::span<double> p) {
    std::fill(p.begin(), p.end(), 0.0);
    const double xm = std::max(x_max, 1.0);
    auto exponent = [&](Bounds b) { return rng.log_uniform(b.lower, b.upper); };
    switch (id) {
        case ModelId::phi1:
            p[1] = rng.log_uniform(1e-3, 10.0) * xm;
            break;
        case ModelId::phi2:
            p[4] = rng.log_uniform(1e-3, 1.0) / (xm * xm * xm);
            p[5] = rng.log_uniform(1e-3, 1.0) / (xm * xm);
            p[6] = rng.log_uniform(1e-3, 1.0) / xm;
            p[7] = rng.log_uniform(1e-3, 1.0);
            break;
        case ModelId::phi3:
            p[1] = exponent(kExponent);
            p[4] = exponent(kExponent);
            p[3] = rng.log_uniform(1e-3, 1.0) / power(xm, p[4]);
            p[5] = rng.log_uniform(1e-3, 1.0);
            break;
        case ModelId::phi4:
        case ModelId::lam6:
        case ModelId::phi8:
            p[1] = exponent(kExponent);
            break;
        case ModelId::phi6: {
            p[2] = rng.uniform(1.0, 10.0);
            const double decay = rng.log_uniform(0.1, 20.0);
            p[1] = std::clamp(std::exp(-decay / power(xm, 1.0 / p[2])), 1e-12, 1e3);
            break;
        }
        case ModelId::lam7:
            p[1] = exponent(kRootExponent);
            break;
        default:
            break;
    }
}

}  // namespace rtg
