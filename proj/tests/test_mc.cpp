#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "nvc/mc.hpp"
#include "nvc/presets.hpp"

using namespace nvc;
using Catch::Matchers::WithinAbs;
using testing_helpers::nv1_magnetic_env;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("noise-free sequences keep full coherence") {
    NoiseEnvironment env = nv1_magnetic_env();
    env.magnetic.sigma = 0.0;
    const auto taus = linspace(1e-7, 3e-6, 5);

    const auto ramsey = simulate_sequence_mc(SequenceKind::ramsey, taus, env, 100, 1);
    for (double p : ramsey.population) REQUIRE(p == 0.0);
    for (double s : ramsey.mc_std_error) REQUIRE(s == 0.0);

    const auto echo = simulate_sequence_mc(SequenceKind::hahn_echo, taus, env, 100, 1);
    for (double p : echo.population) REQUIRE(p == 1.0);
}

TEST_CASE("sequence input validation") {
    const NoiseEnvironment env = nv1_magnetic_env();
    CHECK_THROWS_AS(simulate_sequence_mc(SequenceKind::ramsey, {}, env, 100, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_sequence_mc(SequenceKind::ramsey, {2e-6, 1e-6}, env, 100, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_sequence_mc(SequenceKind::ramsey, {1e-6, 2e-6}, env, 99, 1),
                    std::invalid_argument);

    McOptions opts;
    opts.dt = 1.0;  // grossly violates the step rule
    CHECK_THROWS_AS(simulate_sequence_mc(SequenceKind::ramsey, {1e-6, 2e-6}, env, opts),
                    std::domain_error);
}

TEST_CASE("Ramsey MC tracks the analytic envelope") {
    const NoiseEnvironment env = nv1_magnetic_env();
    const auto taus = linspace(2e-7, 3e-6, 8);
    McOptions opts;
    opts.n_realizations = 2000;
    opts.seed = 11;
    const auto curve = simulate_sequence_mc(SequenceKind::ramsey, taus, env, opts);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double analytic = fid_envelope_analytic(taus[i], env);
        REQUIRE(std::abs(curve.population[i] - analytic) <= 3.5 * curve.mc_std_error[i]);
    }
}

TEST_CASE("Hahn-echo MC tracks the analytic envelope") {
    const NoiseEnvironment env = nv1_magnetic_env();
    const auto times = linspace(6e-5, 2.4e-4, 4);  // total 2*tau
    McOptions opts;
    opts.n_realizations = 1200;
    opts.seed = 12;
    const auto curve = simulate_sequence_mc(SequenceKind::hahn_echo, times, env, opts);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double analytic = echo_envelope_analytic(times[i], env);
        REQUIRE(std::abs(curve.population[i] - analytic) <= 3.5 * curve.mc_std_error[i]);
    }
}

TEST_CASE("independent channels multiply their envelopes") {
    NoiseEnvironment env = nv1_environment();
    env.E_perp = 8e6;
    env.electric.sigma = 4e4;   // exaggerated electric noise so both channels matter
    env.electric.tau_c = 5e-5;
    const auto taus = linspace(5e-7, 8e-6, 6);
    McOptions opts;
    opts.n_realizations = 3000;
    opts.seed = 21;
    const auto curve = simulate_sequence_mc(SequenceKind::ramsey, taus, env, opts);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double analytic = fid_envelope_analytic(taus[i], env);  // product of channels
        REQUIRE(std::abs(curve.population[i] - analytic) <= 3.5 * curve.mc_std_error[i]);
    }
}

TEST_CASE("fixed seed reproduces bit-identical curves; threads do not change results") {
    const NoiseEnvironment env = nv1_magnetic_env();
    const auto taus = linspace(2e-7, 3e-6, 6);
    McOptions serial;
    serial.n_realizations = 600;
    serial.seed = 5;
    const auto a = simulate_sequence_mc(SequenceKind::ramsey, taus, env, serial);
    const auto b = simulate_sequence_mc(SequenceKind::ramsey, taus, env, serial);
    REQUIRE(a.population == b.population);
    REQUIRE(a.mc_std_error == b.mc_std_error);

    McOptions parallel = serial;
    parallel.threads = 4;
    const auto c = simulate_sequence_mc(SequenceKind::ramsey, taus, env, parallel);
    REQUIRE(a.population == c.population);
    REQUIRE(a.mc_std_error == c.mc_std_error);

    McOptions reseeded = serial;
    reseeded.seed = 6;
    const auto d = simulate_sequence_mc(SequenceKind::ramsey, taus, env, reseeded);
    CHECK(a.population != d.population);
}

TEST_CASE("standard error scales as 1/sqrt(n)") {
    const NoiseEnvironment env = nv1_magnetic_env();
    const std::vector<double> taus = {1.5e-6};
    const auto small = simulate_sequence_mc(SequenceKind::ramsey, taus, env, 100, 30);
    const auto large = simulate_sequence_mc(SequenceKind::ramsey, taus, env, 10000, 31);
    const double ratio = small.mc_std_error[0] / large.mc_std_error[0];
    CHECK(ratio > 5.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("pooling disjoint seeds tightens the estimate") {
    const NoiseEnvironment env = nv1_magnetic_env();
    const std::vector<double> taus = {1.0e-6, 2.0e-6};
    const int k = 4, n = 800;
    for (std::size_t j = 0; j < taus.size(); ++j) {
        double pooled = 0.0, pooled_var = 0.0;
        for (int s = 0; s < k; ++s) {
            const auto c = simulate_sequence_mc(SequenceKind::ramsey, taus, env, n, 100 + s);
            pooled += c.population[j];
            pooled_var += c.mc_std_error[j] * c.mc_std_error[j];
        }
        pooled /= k;
        const double pooled_se = std::sqrt(pooled_var) / k;
        const double analytic = fid_envelope_analytic(taus[j], env);
        REQUIRE(std::abs(pooled - analytic) <= 3.0 * pooled_se);
        // pooled SE is ~1/sqrt(k) of a single batch
        const auto single = simulate_sequence_mc(SequenceKind::ramsey, taus, env, n, 100);
        CHECK(pooled_se < single.mc_std_error[j]);
    }
}

TEST_CASE("midpoint-rule discretization error is far below the MC error") {
    // Integrate the same fine-lattice paths at full and half resolution; the
    // difference is pure quadrature error and must stay below SE/3.
    const NoiseEnvironment env = nv1_magnetic_env();
    const double tau = 2e-6;
    const std::size_t n_coarse = 1000;
    const double dt_fine = tau / (2.0 * n_coarse);
    const double coef = sensitivity_factors(env).R_b * env.consts.mu_B * env.params.g_e /
                        env.consts.hbar;

    const int n_real = 500;
    double sum_fine = 0.0, sum_coarse = 0.0, sum_sq = 0.0;
    for (int r = 0; r < n_real; ++r) {
        const auto path = sample_ou_path(env.magnetic, dt_fine, 2 * n_coarse + 1, 71,
                                         static_cast<std::uint64_t>(r));
        double fine = 0.0, coarse = 0.0;
        for (std::size_t k = 0; k + 1 < path.samples.size(); ++k)
            fine += 0.5 * (path.samples[k] + path.samples[k + 1]) * dt_fine;
        for (std::size_t k = 0; k + 2 < path.samples.size(); k += 2)
            coarse += 0.5 * (path.samples[k] + path.samples[k + 2]) * (2.0 * dt_fine);
        sum_fine += std::cos(coef * fine);
        sum_coarse += std::cos(coef * coarse);
        sum_sq += std::cos(coef * fine) * std::cos(coef * fine);
    }
    const double mean_fine = sum_fine / n_real;
    const double mean_coarse = sum_coarse / n_real;
    const double var = sum_sq / n_real - mean_fine * mean_fine;
    const double se = std::sqrt(var / n_real) / 2.0;
    const double dp = 0.5 * std::abs(mean_fine - mean_coarse);  // population difference
    REQUIRE(dp < se / 3.0);
}

TEST_CASE("decay curve invariants") {
    const NoiseEnvironment env = nv1_magnetic_env();
    const auto taus = linspace(2e-7, 3e-6, 10);
    const auto curve = simulate_sequence_mc(SequenceKind::ramsey, taus, env, 500, 9);
    REQUIRE(curve.times.size() == curve.population.size());
    REQUIRE(curve.times.size() == curve.mc_std_error.size());
    for (std::size_t i = 0; i < curve.population.size(); ++i) {
        REQUIRE(curve.population[i] >= 0.0);
        REQUIRE(curve.population[i] <= 1.0);
        if (i > 0) REQUIRE(curve.times[i] > curve.times[i - 1]);
    }
}
