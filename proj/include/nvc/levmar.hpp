#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nvc/ou_process.hpp"

namespace nvc {

struct FitResult {
    Eigen::VectorXd values;
    Eigen::VectorXd sigmas;       // standard uncertainties from residual variance and curvature
    double rss = 0.0;             // (weighted) residual sum of squares
    bool converged = false;
    int iterations = 0;
    bool ill_conditioned = false; // degenerate Jacobian encountered
};

struct LmOptions {
    int max_iterations = 200;
    double param_tol = 1e-10;     // relative parameter change
    double cost_tol = 1e-12;      // relative cost change
    double lambda0 = 1e-3;
    int multistart = 0;           // extra perturbed starts on top of the given init
    double multistart_scale = 0.2;
    std::uint64_t seed = 12345;
    Eigen::VectorXd diff_scale;   // optional per-parameter magnitude for the
                                  // finite-difference step of zero-valued parameters
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

namespace lm_detail {

inline Eigen::VectorXd clamp(Eigen::VectorXd p, const Eigen::VectorXd& lb,
                             const Eigen::VectorXd& ub) {
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = std::min(std::max(p[i], lb[i]), ub[i]);
    return p;
}

inline Eigen::MatrixXd jacobian(const ResidualFn& f, const Eigen::VectorXd& p,
                                const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                                Eigen::Index m, const Eigen::VectorXd& diff_scale) {
    const Eigen::Index k = p.size();
    const double p_scale = p.cwiseAbs().maxCoeff();
    Eigen::MatrixXd jac(m, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        // central difference; zero-valued parameters fall back to the caller
        // scale or to a fraction of the largest parameter
        double scale = std::abs(p[i]);
        if (scale == 0.0 && diff_scale.size() == k) scale = std::abs(diff_scale[i]);
        if (scale == 0.0) scale = (p_scale > 0.0) ? 0.01 * p_scale : 1.0;
        const double h = 1e-6 * scale;
        Eigen::VectorXd pl = p, ph = p;
        pl[i] = std::max(p[i] - h, lb[i]);
        ph[i] = std::min(p[i] + h, ub[i]);
        const double span = ph[i] - pl[i];
        if (span <= 0.0) {
            jac.col(i).setZero();
            continue;
        }
        jac.col(i) = (f(ph) - f(pl)) / span;
    }
    return jac;
}

inline FitResult run_single(const ResidualFn& f, Eigen::VectorXd p, const Eigen::VectorXd& lb,
                            const Eigen::VectorXd& ub, const LmOptions& opts) {
    FitResult out;
    Eigen::VectorXd r = f(p);
    const Eigen::Index m = r.size();
    double cost = r.squaredNorm();
    double lambda = opts.lambda0;

    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        const Eigen::MatrixXd jac = jacobian(f, p, lb, ub, m, opts.diff_scale);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;

        Eigen::VectorXd diag = jtj.diagonal();
        const double dmax = diag.maxCoeff();
        if (!(dmax > 0.0)) {
            out.ill_conditioned = true;
            break;
        }
        if (diag.minCoeff() < 1e-14 * dmax) out.ill_conditioned = true;
        for (Eigen::Index i = 0; i < diag.size(); ++i) diag[i] = std::max(diag[i], 1e-14 * dmax);

        bool accepted = false;
        while (lambda < 1e14) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            const Eigen::VectorXd step = a.ldlt().solve(-jtr);
            const Eigen::VectorXd p_new = clamp(p + step, lb, ub);
            const Eigen::VectorXd r_new = f(p_new);
            const double cost_new = r_new.squaredNorm();
            if (cost_new < cost) {
                const double dp = (p_new - p).cwiseQuotient(
                                      p.cwiseAbs().cwiseMax(1e-30)).cwiseAbs().maxCoeff();
                const double dc = (cost - cost_new) / std::max(cost, 1e-300);
                p = p_new;
                r = r_new;
                cost = cost_new;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (dp < opts.param_tol || dc < opts.cost_tol) out.converged = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted) {
            // no downhill step left at any damping: treat as converged to a
            // (possibly flat) minimum
            out.converged = true;
        }
        if (out.converged) {
            ++iter;
            break;
        }
    }

    out.values = p;
    out.rss = cost;
    out.iterations = iter;

    // covariance from the curvature at the solution, scaled by the residual variance
    const Eigen::Index k = p.size();
    out.sigmas = Eigen::VectorXd::Zero(k);
    const Eigen::MatrixXd jac = jacobian(f, p, lb, ub, m, opts.diff_scale);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jtj);
    if (es.info() == Eigen::Success) {
        const double emax = es.eigenvalues().cwiseAbs().maxCoeff();
        const double s2 = (m > k) ? cost / static_cast<double>(m - k) : 0.0;
        if (emax > 0.0) {
            Eigen::VectorXd inv = es.eigenvalues();
            for (Eigen::Index i = 0; i < inv.size(); ++i) {
                if (inv[i] > 1e-14 * emax) {
                    inv[i] = 1.0 / inv[i];
                } else {
                    inv[i] = 0.0;
                    out.ill_conditioned = true;
                }
            }
            const Eigen::MatrixXd cov =
                es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
            for (Eigen::Index i = 0; i < k; ++i)
                out.sigmas[i] = std::sqrt(std::max(cov(i, i), 0.0) * s2);
        } else {
            out.ill_conditioned = true;
        }
    }
    return out;
}

}  // namespace lm_detail

/// Levenberg-Marquardt minimization of |residuals(p)|^2 with box bounds.
/// Optional multi-start: perturbed copies of the init are run and the best
/// basin wins (ties broken by the lowest start index).
inline FitResult lm_minimize(const ResidualFn& residuals, const Eigen::VectorXd& init,
                             const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                             const LmOptions& opts = {}) {
    if (init.size() != lb.size() || init.size() != ub.size())
        throw std::invalid_argument("lm_minimize: bounds size mismatch");
    for (Eigen::Index i = 0; i < init.size(); ++i) {
        if (init[i] < lb[i] || init[i] > ub[i])
            throw std::invalid_argument("lm_minimize: init outside bounds");
    }

    FitResult best = lm_detail::run_single(residuals, init, lb, ub, opts);
    if (opts.multistart > 0) {
        const CounterRng rng(opts.seed);
        for (int s = 1; s <= opts.multistart; ++s) {
            Eigen::VectorXd p = init;
            const auto gen = rng.stream(static_cast<std::uint64_t>(s));
            for (Eigen::Index i = 0; i < p.size(); ++i) {
                const double eta = gen.normal(static_cast<std::uint64_t>(i));
                const double base = (p[i] != 0.0) ? std::abs(p[i]) : 1.0;
                p[i] += opts.multistart_scale * base * eta;
            }
            p = lm_detail::clamp(p, lb, ub);
            const FitResult trial = lm_detail::run_single(residuals, p, lb, ub, opts);
            if (trial.rss < best.rss) best = trial;
        }
    }
    return best;
}

/// Weighted least-squares fit of a scalar model y = f(x, p) to data points;
/// sigma_y may be empty (unweighted).
inline FitResult nonlinear_least_squares(
    const std::function<double(double, const Eigen::VectorXd&)>& model,
    const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sigma_y,
    const Eigen::VectorXd& init, const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
    const LmOptions& opts = {}) {
    if (x.size() != y.size()) throw std::invalid_argument("nonlinear_least_squares: x/y size mismatch");
    if (!sigma_y.empty() && sigma_y.size() != y.size())
        throw std::invalid_argument("nonlinear_least_squares: sigma size mismatch");
    if (static_cast<Eigen::Index>(x.size()) < init.size())
        throw std::invalid_argument("nonlinear_least_squares: fewer points than parameters");

    auto residuals = [&, model](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double w = sigma_y.empty() ? 1.0 : 1.0 / sigma_y[i];
            r[static_cast<Eigen::Index>(i)] = (y[i] - model(x[i], p)) * w;
        }
        return r;
    };
    return lm_minimize(residuals, init, lb, ub, opts);
}

}  // namespace nvc
