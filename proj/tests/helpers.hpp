#pragma once

#include <random>

#include "nvc/nvc.hpp"

namespace testing_helpers {

// NV1 magnetic-only environment used by the decay-law checks.
inline nvc::NoiseEnvironment nv1_magnetic_env(double e_perp = 0.0) {
    nvc::NoiseEnvironment env = nvc::nv1_environment();
    env.E_perp = e_perp;
    env.electric.sigma = 0.0;
    return env;
}

// Transverse field configuration (E in the NV x-y plane, B along z), the
// geometry of the experiment.
struct TransverseConfig {
    nvc::FieldVector e;
    nvc::FieldVector b;
};

inline TransverseConfig random_transverse_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> e_mag(0.0, 1.66e7);  // up to 166 kV/cm
    std::uniform_real_distribution<double> phi(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> b_mag(1e-6, 5e-5);
    const double em = e_mag(rng);
    const double ph = phi(rng);
    return {{em * std::cos(ph), em * std::sin(ph), 0.0}, {0.0, 0.0, b_mag(rng)}};
}

}  // namespace testing_helpers
