#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nvc/levmar.hpp"
#include "nvc/ou_process.hpp"

using namespace nvc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("exact-model data with init at the truth is recovered unchanged") {
    const std::vector<double> xs = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(2.0 * std::exp(-x / 0.7));
    auto model = [](double x, const Eigen::VectorXd& p) { return p[0] * std::exp(-x / p[1]); };
    const auto fit = nonlinear_least_squares(model, xs, ys, {}, vec({2.0, 0.7}),
                                             vec({0.0, 0.01}), vec({kInf, kInf}));
    CHECK(fit.converged);
    CHECK_THAT(fit.values[0], WithinRel(2.0, 1e-9));
    CHECK_THAT(fit.values[1], WithinRel(0.7, 1e-9));
    CHECK(fit.rss < 1e-20);
}

TEST_CASE("linear model matches the normal-equations solution") {
    // y = a x + b with the closed-form least-squares solution as oracle
    const std::vector<double> xs = {0.1, 0.7, 1.3, 2.2, 3.1, 4.5, 5.0, 6.3};
    const std::vector<double> ys = {0.9, 2.1, 3.6, 5.1, 7.2, 9.8, 10.4, 13.5};
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double a_ref = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double b_ref = (sy - a_ref * sx) / n;

    auto model = [](double x, const Eigen::VectorXd& p) { return p[0] * x + p[1]; };
    const auto fit = nonlinear_least_squares(model, xs, ys, {}, vec({1.0, 0.0}),
                                             vec({-kInf, -kInf}), vec({kInf, kInf}));
    CHECK(fit.converged);
    CHECK_THAT(fit.values[0], WithinRel(a_ref, 1e-10));
    CHECK_THAT(fit.values[1], WithinRel(b_ref, 1e-10));
}

TEST_CASE("reported uncertainties calibrate the pull distribution") {
    auto model = [](double x, const Eigen::VectorXd& p) { return p[0] * std::exp(-x / p[1]); };
    const double a_true = 1.0, b_true = 2.0, noise = 0.02;
    std::vector<double> xs;
    for (int i = 0; i < 30; ++i) xs.push_back(0.1 + 6.0 * i / 29.0);
    std::vector<double> sigma(xs.size(), noise);

    const CounterRng rng(314);
    std::vector<double> pulls;
    for (int rep = 0; rep < 200; ++rep) {
        const auto gen = rng.stream(static_cast<std::uint64_t>(rep));
        std::vector<double> ys;
        for (std::size_t i = 0; i < xs.size(); ++i)
            ys.push_back(a_true * std::exp(-xs[i] / b_true) +
                         noise * gen.normal(static_cast<std::uint64_t>(i)));
        const auto fit = nonlinear_least_squares(model, xs, ys, sigma, vec({0.8, 1.5}),
                                                 vec({0.0, 0.1}), vec({kInf, kInf}));
        REQUIRE(fit.converged);
        pulls.push_back((fit.values[0] - a_true) / fit.sigmas[0]);
        pulls.push_back((fit.values[1] - b_true) / fit.sigmas[1]);
    }
    double m = 0.0, v = 0.0;
    for (double p : pulls) m += p;
    m /= static_cast<double>(pulls.size());
    for (double p : pulls) v += (p - m) * (p - m);
    const double pull_std = std::sqrt(v / static_cast<double>(pulls.size() - 1));
    CHECK(pull_std > 0.8);
    CHECK(pull_std < 1.2);
    CHECK(std::abs(m) < 0.2);
}

TEST_CASE("iteration cap is reported as non-convergence, never silent success") {
    auto model = [](double x, const Eigen::VectorXd& p) { return p[0] * std::exp(-x / p[1]); };
    const std::vector<double> xs = {0.0, 1.0, 2.0, 3.0};
    const std::vector<double> ys = {3.0, 1.2, 0.5, 0.2};
    LmOptions opts;
    opts.max_iterations = 1;
    const auto fit = nonlinear_least_squares(model, xs, ys, {}, vec({50.0, 40.0}), vec({0.0, 0.01}),
                                             vec({kInf, kInf}), opts);
    CHECK_FALSE(fit.converged);
}

TEST_CASE("degenerate Jacobian is flagged") {
    // second parameter has no effect on the model
    auto model = [](double x, const Eigen::VectorXd& p) { return p[0] * x + 0.0 * p[1]; };
    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> ys = {2.0, 4.1, 5.9, 8.0};
    const auto fit = nonlinear_least_squares(model, xs, ys, {}, vec({1.0, 1.0}),
                                             vec({-kInf, -kInf}), vec({kInf, kInf}));
    CHECK(fit.ill_conditioned);
}

TEST_CASE("bound and size validation") {
    auto residuals = [](const Eigen::VectorXd& p) { return p; };
    CHECK_THROWS_AS(lm_minimize(residuals, vec({2.0}), vec({0.0}), vec({1.0})),
                    std::invalid_argument);
    auto model = [](double x, const Eigen::VectorXd& p) { return p[0] * x + p[1] + p[2]; };
    CHECK_THROWS_AS(nonlinear_least_squares(model, {1.0, 2.0}, {1.0, 2.0}, {},
                                            vec({1.0, 1.0, 1.0}), vec({-kInf, -kInf, -kInf}),
                                            vec({kInf, kInf, kInf})),
                    std::invalid_argument);
}

TEST_CASE("multi-start escapes a flat basin deterministically") {
    // Gaussian far from the init: the single-start gradient is essentially
    // zero, perturbed restarts reach the well
    auto model = [](double x, const Eigen::VectorXd& p) {
        const double u = x - p[0];
        return std::exp(-0.5 * u * u);
    };
    std::vector<double> xs, ys;
    for (int i = 0; i < 60; ++i) {
        xs.push_back(10.0 * i / 59.0);
        ys.push_back(std::exp(-0.5 * (xs.back() - 5.0) * (xs.back() - 5.0)));
    }
    LmOptions opts;
    opts.multistart = 16;
    opts.multistart_scale = 0.4;
    opts.seed = 7;
    const auto fit = nonlinear_least_squares(model, xs, ys, {}, vec({9.7}), vec({0.0}),
                                             vec({10.0}), opts);
    CHECK_THAT(fit.values[0], WithinAbs(5.0, 1e-6));

    const auto fit_again = nonlinear_least_squares(model, xs, ys, {}, vec({9.7}), vec({0.0}),
                                                   vec({10.0}), opts);
    CHECK(fit.values[0] == fit_again.values[0]);  // deterministic restarts
}

TEST_CASE("box bounds confine the solution") {
    auto model = [](double x, const Eigen::VectorXd& p) { return p[0] * x; };
    const std::vector<double> xs = {1.0, 2.0, 3.0};
    const std::vector<double> ys = {5.0, 10.0, 15.0};  // unconstrained optimum a = 5
    const auto fit = nonlinear_least_squares(model, xs, ys, {}, vec({1.0}), vec({0.0}), vec({2.0}));
    CHECK_THAT(fit.values[0], WithinAbs(2.0, 1e-9));
}
