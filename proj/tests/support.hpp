#pragma once
// Shared generators for the test binaries.

#include <cmath>
#include <vector>

#include "rtg/curves.hpp"
#include "rtg/models.hpp"
#include "rtg/random.hpp"

namespace rtg::testing {

// Random well-behaved parameters: in bounds, denominators positive on x >= 0,
// and no overflow for x up to 1e6.
inline ParamVector generating_params(ModelId id, Rng& rng) {
    switch (id) {
        case ModelId::phi1: return {rng.uniform(1, 20), rng.log_uniform(10, 1e4)};
        case ModelId::phi2:
            return {rng.uniform(-1, 1),  rng.uniform(-1, 1),  rng.uniform(-1, 1),
                    rng.uniform(-1, 1),  rng.uniform(0.1, 1), rng.uniform(0.1, 1),
                    rng.uniform(0.1, 1), rng.uniform(0.1, 1)};
        case ModelId::phi3:
            return {rng.uniform(0.5, 5), rng.log_uniform(0.05, 3), rng.uniform(-1, 1),
                    rng.uniform(0.1, 1), rng.log_uniform(0.05, 3), rng.uniform(0.5, 2)};
        case ModelId::phi4:
        case ModelId::lam6:
            return {rng.uniform(0.5, 5), rng.log_uniform(0.05, 6), rng.uniform(-2, 2)};
        case ModelId::phi6:
            return {rng.uniform(-2, 2), rng.uniform(0.05, 0.95), rng.uniform(1, 10),
                    rng.uniform(-1, 1)};
        case ModelId::phi8:
            return {rng.uniform(0.5, 5), rng.log_uniform(0.05, 3), rng.uniform(-2, 2)};
        case ModelId::lam7:
            return {rng.uniform(0.5, 5), rng.log_uniform(0.2, 5), rng.uniform(-2, 2)};
        default: {
            ParamVector p(spec(id).param_count);
            for (auto& v : p) v = rng.uniform(-1, 1);
            return p;
        }
    }
}

// Noise-free curve y(k) = model(k) for k = 0..draws. The origin of a model
// undefined at 0 is filled with its value at 1.
inline AggregateCurve synthetic_curve(ModelId id, const ParamVector& p, std::int64_t draws) {
    AggregateCurve c;
    c.values.resize(static_cast<std::size_t>(draws) + 1);
    for (std::int64_t k = 0; k <= draws; ++k) {
        const double x = static_cast<double>(excludes_origin(id) && k == 0 ? 1 : k);
        c.values[static_cast<std::size_t>(k)] = evaluate(id, p, x);
    }
    return c;
}

}  // namespace rtg::testing
