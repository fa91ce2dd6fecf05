#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nvc/coherence.hpp"
#include "nvc/hamiltonian.hpp"
#include "nvc/levmar.hpp"

namespace nvc {

/// Normalized PL spectrum: contrast 1 at the off-resonance baseline.
struct Spectrum {
    std::vector<double> frequencies;  // Hz, strictly increasing
    std::vector<double> contrast;

    void validate() const {
        if (frequencies.size() != contrast.size() || frequencies.size() < 2)
            throw std::invalid_argument("Spectrum: frequency/contrast size mismatch");
        for (std::size_t i = 1; i < frequencies.size(); ++i)
            if (frequencies[i] <= frequencies[i - 1])
                throw std::invalid_argument("Spectrum: frequencies must be strictly increasing");
    }
};

struct GaussianDip {
    double center = 0.0;  // Hz
    double width = 0.0;   // Gaussian std [Hz]
    double depth = 0.0;
};

struct GaussianDipModel {
    double baseline = 1.0;
    std::vector<GaussianDip> dips;

    double evaluate(double f) const {
        double y = baseline;
        for (const auto& d : dips) {
            const double u = (f - d.center) / d.width;
            y -= d.depth * std::exp(-0.5 * u * u);
        }
        return y;
    }
};

struct OdmrFit {
    GaussianDipModel model;
    FitResult fit;
};

/// Multi-Gaussian dip fit. Seeds come from local minima of a 5-point
/// moving-average smoothed spectrum that dip below baseline - 3 * noise_std;
/// widths are seeded at a quarter of the nominal hyperfine spacing.
inline OdmrFit fit_odmr_gaussians(const Spectrum& spectrum, int n_dips = 6,
                                  const LmOptions& opts = {}) {
    spectrum.validate();
    const auto& fs = spectrum.frequencies;
    const auto& ys = spectrum.contrast;
    const std::size_t n = fs.size();

    std::vector<double> smooth(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = (i >= 2) ? i - 2 : 0;
        const std::size_t hi = std::min(i + 2, n - 1);
        double s = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) s += ys[k];
        smooth[i] = s / static_cast<double>(hi - lo + 1);
    }

    std::vector<double> sorted_smooth = smooth;
    std::nth_element(sorted_smooth.begin(), sorted_smooth.begin() + n / 2, sorted_smooth.end());
    const double baseline = sorted_smooth[n / 2];

    double noise_var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = ys[i] - smooth[i];
        noise_var += d * d;
    }
    const double noise_std = std::sqrt(noise_var / static_cast<double>(n));
    const double threshold = baseline - 3.0 * noise_std;

    const double width_seed = 2.1e6 / 4.0;  // hyperfine spacing / 4

    struct Seed {
        double f, y;
    };
    std::vector<Seed> candidates;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (smooth[i] < threshold && smooth[i] <= smooth[i - 1] && smooth[i] < smooth[i + 1])
            candidates.push_back({fs[i], smooth[i]});
    }
    // deepest first; noise wiggles inside one dip collapse onto a single seed
    std::sort(candidates.begin(), candidates.end(),
              [](const Seed& a, const Seed& b) { return a.y < b.y; });
    std::vector<Seed> seeds;
    for (const auto& cand : candidates) {
        bool clashes = false;
        for (const auto& s : seeds) clashes = clashes || std::abs(cand.f - s.f) < width_seed;
        if (!clashes) seeds.push_back(cand);
    }
    if (static_cast<int>(seeds.size()) < n_dips) {
        throw std::runtime_error("fit_odmr_gaussians: detected only " +
                                 std::to_string(seeds.size()) + " dip(s), expected " +
                                 std::to_string(n_dips));
    }
    seeds.resize(n_dips);
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.f < b.f; });
    const double grid_step = (fs.back() - fs.front()) / static_cast<double>(n - 1);

    const Eigen::Index n_par = 1 + 3 * n_dips;
    Eigen::VectorXd init(n_par), lb(n_par), ub(n_par);
    init[0] = baseline;
    lb[0] = -std::numeric_limits<double>::infinity();
    ub[0] = std::numeric_limits<double>::infinity();
    for (int d = 0; d < n_dips; ++d) {
        init[1 + 3 * d] = seeds[d].f;
        init[2 + 3 * d] = width_seed;
        init[3 + 3 * d] = std::max(baseline - seeds[d].y, 1e-6);
        lb[1 + 3 * d] = fs.front();
        ub[1 + 3 * d] = fs.back();
        lb[2 + 3 * d] = grid_step;
        ub[2 + 3 * d] = fs.back() - fs.front();
        lb[3 + 3 * d] = 0.0;
        ub[3 + 3 * d] = std::numeric_limits<double>::infinity();
    }

    auto residuals = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(n);
        for (std::size_t i = 0; i < n; ++i) {
            double y = p[0];
            for (int d = 0; d < n_dips; ++d) {
                const double u = (fs[i] - p[1 + 3 * d]) / p[2 + 3 * d];
                y -= p[3 + 3 * d] * std::exp(-0.5 * u * u);
            }
            r[static_cast<Eigen::Index>(i)] = ys[i] - y;
        }
        return r;
    };

    OdmrFit out;
    out.fit = lm_minimize(residuals, init, lb, ub, opts);
    out.model.baseline = out.fit.values[0];
    out.model.dips.resize(n_dips);
    for (int d = 0; d < n_dips; ++d) {
        out.model.dips[d] = {out.fit.values[1 + 3 * d], out.fit.values[2 + 3 * d],
                             out.fit.values[3 + 3 * d]};
    }
    std::sort(out.model.dips.begin(), out.model.dips.end(),
              [](const GaussianDip& a, const GaussianDip& b) { return a.center < b.center; });
    return out;
}

/// B_z from the zero-field m_I = 0 line pair: h (f+ - f-) / (2 mu_B g_e).
inline double estimate_bz(const ResonanceSet& res, const NVParameters& p,
                          const PhysicalConstants& c = {}) {
    const double split = res.line(Branch::plus, 0).frequency_hz -
                         res.line(Branch::minus, 0).frequency_hz;
    return c.h * split / (2.0 * c.mu_B * p.g_e);
}

namespace fit_detail {

inline SensitivityFactors rfactors(double e_perp, double b_z, const NVParameters& p,
                                   const PhysicalConstants& c) {
    const double zeeman = c.mu_B * p.g_e * b_z;
    const double stark = p.d_perp_over_h * c.h * e_perp;
    const double denom = std::hypot(zeeman, stark);
    if (denom == 0.0) throw std::domain_error("sensitivity factors undefined at zero bias");
    return {zeeman / denom, stark / denom};
}

}  // namespace fit_detail

/// One measured set of six line positions at a transverse field E_perp.
struct ResonancePoint {
    double e_perp = 0.0;                       // V/m
    std::array<double, 6> frequencies_hz{};    // any order; sorted internally
};

struct DperpFit {
    double d_perp_over_h = 0.0;  // Hz/(V/m)
    FitResult fit;
};

/// Fits the non-axial dipole d_perp to resonance-vs-field data with B_z held
/// fixed and B_x = B_y = 0, minimizing the distance to the full nine-level
/// line positions.
inline DperpFit fit_dperp(const std::vector<ResonancePoint>& data, double b_z, NVParameters p,
                          const PhysicalConstants& c = {}, const LmOptions& opts = {}) {
    if (data.size() < 3) throw std::invalid_argument("fit_dperp: need at least 3 field points");

    std::vector<ResonancePoint> pts = data;
    for (auto& pt : pts) std::sort(pt.frequencies_hz.begin(), pt.frequencies_hz.end());

    auto residuals = [&, p](const Eigen::VectorXd& par) mutable {
        p.d_perp_over_h = par[0];
        Eigen::VectorXd r(6 * pts.size());
        Eigen::Index k = 0;
        for (const auto& pt : pts) {
            const auto model = resonance_frequencies(p, FieldVector{0.0, pt.e_perp, 0.0},
                                                     FieldVector{0.0, 0.0, b_z}, c)
                                   .frequencies_sorted();
            for (int i = 0; i < 6; ++i) r[k++] = pt.frequencies_hz[i] - model[i];
        }
        return r;
    };

    // overestimate from the outer-line span at the strongest field
    const auto& far = *std::max_element(pts.begin(), pts.end(),
                                        [](const auto& a, const auto& b) { return a.e_perp < b.e_perp; });
    double init = 0.1;
    if (far.e_perp > 0.0) {
        const double span = far.frequencies_hz[5] - far.frequencies_hz[0];
        const double zeeman = c.mu_B * p.g_e * b_z / c.h;
        const double est = std::sqrt(std::max(0.25 * span * span - zeeman * zeeman, 0.0)) / far.e_perp;
        init = std::clamp(est, 0.01, 1.0);
    }

    Eigen::VectorXd x0(1), lo(1), hi(1);
    x0[0] = init;
    lo[0] = 1e-4;
    hi[0] = 10.0;
    DperpFit out;
    out.fit = lm_minimize(residuals, x0, lo, hi, opts);
    out.d_perp_over_h = out.fit.values[0];
    return out;
}

struct DecayData {
    std::vector<double> times;       // tau (FID) or 2*tau (echo) [s]
    std::vector<double> population;
    std::vector<double> sigma;       // optional per-point uncertainty
};

struct DecayFit {
    double y0 = 0.0;
    double amplitude = 0.0;
    double t2 = 0.0;
    FitResult fit;
    bool span_warning = false;  // data does not cover [0.3 T2, 2 T2]
};

namespace fit_detail {

inline DecayFit fit_decay(const DecayData& data, double exponent, const LmOptions& opts) {
    if (data.times.size() < 5 || data.times.size() != data.population.size())
        throw std::invalid_argument("decay fit: need at least 5 (time, population) points");

    const auto& t = data.times;
    const auto& y = data.population;
    const std::size_t n = t.size();

    const double y0_init = y.back();
    const double a_init = y.front() - y0_init;
    double t2_init = t[n / 2];
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(y[i] - y0_init) <= std::abs(a_init) / std::numbers::e) {
            t2_init = std::max(t[i], t.front() > 0 ? t.front() : t[1]);
            break;
        }
    }

    auto model = [exponent](double x, const Eigen::VectorXd& p) {
        return p[0] + p[1] * std::exp(-std::pow(x / p[2], exponent));
    };

    Eigen::VectorXd init(3), lo(3), hi(3);
    init << y0_init, a_init, t2_init;
    const double inf = std::numeric_limits<double>::infinity();
    lo << -inf, -inf, t2_init * 1e-4;
    hi << inf, inf, t2_init * 1e4;

    DecayFit out;
    out.fit = nonlinear_least_squares(model, t, y, data.sigma, init, lo, hi, opts);
    out.y0 = out.fit.values[0];
    out.amplitude = out.fit.values[1];
    out.t2 = out.fit.values[2];
    out.span_warning = !(t.front() <= 0.3 * out.t2 && t.back() >= 2.0 * out.t2);
    return out;
}

}  // namespace fit_detail

/// y0 + A exp(-(tau/T2)^2), exponent fixed.
inline DecayFit fit_fid_decay(const DecayData& data, const LmOptions& opts = {}) {
    return fit_detail::fit_decay(data, 2.0, opts);
}

/// y0 + A exp(-(2tau/T2)^3), exponent fixed; times are total 2*tau.
inline DecayFit fit_echo_decay(const DecayData& data, const LmOptions& opts = {}) {
    return fit_detail::fit_decay(data, 3.0, opts);
}

/// Diagnostic variant with a free stretching exponent (not used by the
/// standard analysis chain).
struct FreeExponentFit {
    DecayFit base;
    double exponent = 0.0;
};

inline FreeExponentFit fit_decay_free_exponent(const DecayData& data, double exponent_init,
                                               const LmOptions& opts = {}) {
    if (data.times.size() < 6)
        throw std::invalid_argument("fit_decay_free_exponent: need at least 6 points");
    auto model = [](double x, const Eigen::VectorXd& p) {
        return p[0] + p[1] * std::exp(-std::pow(x / p[2], p[3]));
    };
    const auto seeded = fit_detail::fit_decay(data, exponent_init, opts);
    Eigen::VectorXd init(4), lo(4), hi(4);
    init << seeded.y0, seeded.amplitude, seeded.t2, exponent_init;
    const double inf = std::numeric_limits<double>::infinity();
    lo << -inf, -inf, seeded.t2 * 1e-4, 0.5;
    hi << inf, inf, seeded.t2 * 1e4, 6.0;
    FreeExponentFit out;
    out.base.fit = nonlinear_least_squares(model, data.times, data.population, data.sigma, init, lo,
                                           hi, opts);
    out.base.y0 = out.base.fit.values[0];
    out.base.amplitude = out.base.fit.values[1];
    out.base.t2 = out.base.fit.values[2];
    out.exponent = out.base.fit.values[3];
    return out;
}

struct T2Point {
    double e_perp = 0.0;   // V/m
    double t2 = 0.0;       // s
    double sigma_t2 = 0.0; // optional
};

using T2Series = std::vector<T2Point>;

namespace fit_detail {

inline void validate_series(const T2Series& series, std::size_t min_points, const char* who) {
    if (series.size() < min_points)
        throw std::invalid_argument(std::string(who) + ": too few field points");
    for (const auto& pt : series)
        if (!(pt.t2 > 0.0)) throw std::invalid_argument(std::string(who) + ": T2 must be > 0");
}

inline std::vector<double> weights(const T2Series& series) {
    std::vector<double> w;
    bool any = false;
    for (const auto& pt : series) any = any || pt.sigma_t2 > 0.0;
    if (!any) return w;
    w.reserve(series.size());
    for (const auto& pt : series) w.push_back(pt.sigma_t2 > 0.0 ? pt.sigma_t2 : 1.0);
    return w;
}

}  // namespace fit_detail

struct BsigmaFit {
    double b_sigma = 0.0;  // T
    FitResult fit;
};

/// Single-parameter fit of T2_fid(E_perp) = sqrt(2) hbar / (R_b mu_B g_e b_sigma).
inline BsigmaFit fit_bsigma(const T2Series& series, double b_z, const NVParameters& p,
                            const PhysicalConstants& c = {}, const LmOptions& opts = {}) {
    fit_detail::validate_series(series, 3, "fit_bsigma");

    auto model = [&](double e_perp, const Eigen::VectorXd& par) {
        const double rb = fit_detail::rfactors(e_perp, b_z, p, c).R_b;
        return std::numbers::sqrt2 * c.hbar / (rb * c.mu_B * p.g_e * par[0]);
    };

    std::vector<double> xs, ys;
    for (const auto& pt : series) {
        xs.push_back(pt.e_perp);
        ys.push_back(pt.t2);
    }
    const double rb0 = fit_detail::rfactors(series.front().e_perp, b_z, p, c).R_b;
    Eigen::VectorXd init(1), lo(1), hi(1);
    init[0] = std::numbers::sqrt2 * c.hbar / (rb0 * c.mu_B * p.g_e * series.front().t2);
    lo[0] = init[0] * 1e-4;
    hi[0] = init[0] * 1e4;

    BsigmaFit out;
    out.fit = nonlinear_least_squares(model, xs, ys, fit_detail::weights(series), init, lo, hi, opts);
    out.b_sigma = out.fit.values[0];
    return out;
}

struct TaucFit {
    double tau_c = 0.0;  // s
    FitResult fit;
};

/// Single-parameter fit of the magnetic-only echo law with b_sigma held at
/// the FID-fit value.
inline TaucFit fit_tauc_magnetic(const T2Series& series, double b_sigma, double b_z,
                                 const NVParameters& p, const PhysicalConstants& c = {},
                                 const LmOptions& opts = {}) {
    fit_detail::validate_series(series, 3, "fit_tauc_magnetic");

    auto model = [&](double e_perp, const Eigen::VectorXd& par) {
        const double rb = fit_detail::rfactors(e_perp, b_z, p, c).R_b;
        const double t = c.hbar / (rb * c.mu_B * p.g_e * b_sigma);
        return std::cbrt(12.0 * par[0] * t * t);
    };

    std::vector<double> xs, ys;
    for (const auto& pt : series) {
        xs.push_back(pt.e_perp);
        ys.push_back(pt.t2);
    }
    const double rb0 = fit_detail::rfactors(series.front().e_perp, b_z, p, c).R_b;
    const double t0 = c.hbar / (rb0 * c.mu_B * p.g_e * b_sigma);
    Eigen::VectorXd init(1), lo(1), hi(1);
    init[0] = std::pow(series.front().t2, 3.0) / (12.0 * t0 * t0);
    lo[0] = init[0] * 1e-6;
    hi[0] = init[0] * 1e6;

    TaucFit out;
    out.fit = nonlinear_least_squares(model, xs, ys, fit_detail::weights(series), init, lo, hi, opts);
    out.tau_c = out.fit.values[0];
    return out;
}

/// Two-parameter combined echo fit. The electric channel enters only through
/// the ratio tau_c^e / e_sigma^2; the fit parameter is the inverse strength
/// s = e_sigma^2 / tau_c^e, which vanishes when the channel is absent.
struct CombinedEchoFit {
    double tau_c_b = 0.0;    // s
    double strength = 0.0;   // e_sigma^2 / tau_c^e [(V/m)^2 / s]
    FitResult fit;

    double ratio() const {  // tau_c^e / e_sigma^2 [s (V/m)^-2]
        return strength > 0.0 ? 1.0 / strength : std::numeric_limits<double>::infinity();
    }
    double ratio_sigma() const {
        return strength > 0.0 ? fit.sigmas[1] / (strength * strength)
                              : std::numeric_limits<double>::infinity();
    }
};

inline CombinedEchoFit fit_combined_echo(const T2Series& series, double b_sigma, double b_z,
                                         const NVParameters& p, const PhysicalConstants& c = {},
                                         const LmOptions& opts = {}) {
    fit_detail::validate_series(series, 4, "fit_combined_echo");

    auto model = [&](double e_perp, const Eigen::VectorXd& par) {
        const auto r = fit_detail::rfactors(e_perp, b_z, p, c);
        const double tb_inner = c.hbar / (r.R_b * c.mu_B * p.g_e * b_sigma);
        const double inv_tb3 = 1.0 / (12.0 * par[0] * tb_inner * tb_inner);
        const double ke = r.R_e * p.d_perp_over_h * c.h / c.hbar;
        const double inv_te3 = par[1] * ke * ke / 12.0;
        return std::cbrt(1.0 / (inv_tb3 + inv_te3));
    };

    std::vector<double> xs, ys;
    for (const auto& pt : series) {
        xs.push_back(pt.e_perp);
        ys.push_back(pt.t2);
    }

    const auto& low = *std::min_element(series.begin(), series.end(),
                                        [](const auto& a, const auto& b) { return a.e_perp < b.e_perp; });
    const auto& high = *std::max_element(series.begin(), series.end(),
                                         [](const auto& a, const auto& b) { return a.e_perp < b.e_perp; });
    const double rb_low = fit_detail::rfactors(low.e_perp, b_z, p, c).R_b;
    const double t_low = c.hbar / (rb_low * c.mu_B * p.g_e * b_sigma);
    const double tauc_init = std::pow(low.t2, 3.0) / (12.0 * t_low * t_low);
    const auto r_high = fit_detail::rfactors(high.e_perp, b_z, p, c);
    const double ke_high = r_high.R_e * p.d_perp_over_h * c.h / c.hbar;
    double strength_init = 0.0;
    if (ke_high > 0.0)
        strength_init = 12.0 / (std::pow(high.t2, 3.0) * ke_high * ke_high);

    Eigen::VectorXd init(2), lo(2), hi(2);
    init << tauc_init, strength_init;
    lo << tauc_init * 1e-6, 0.0;
    hi << tauc_init * 1e6, std::numeric_limits<double>::infinity();

    LmOptions local = opts;
    if (local.diff_scale.size() == 0) {
        // the strength parameter may sit at 0; difference steps need its scale
        local.diff_scale = init.cwiseAbs();
        if (local.diff_scale[1] == 0.0) local.diff_scale[1] = 1.0;
    }

    CombinedEchoFit out;
    out.fit = nonlinear_least_squares(model, xs, ys, fit_detail::weights(series), init, lo, hi, local);
    out.tau_c_b = out.fit.values[0];
    out.strength = out.fit.values[1];
    return out;
}

/// Upper bound on e_sigma such that its FID influence stays ten times below
/// the magnetic one: (1/sqrt(10)) (R_b/R_e) mu_B g_e b_sigma / d_perp,
/// evaluated at the environment's E_perp.
inline double bound_esigma(double b_sigma, const NoiseEnvironment& env) {
    if (!(env.E_perp > 0.0)) throw std::invalid_argument("bound_esigma: E_perp must be > 0");
    const auto r = sensitivity_factors(env);
    if (r.R_e == 0.0) return std::numeric_limits<double>::infinity();
    const double d_perp_energy = env.params.d_perp_over_h * env.consts.h;  // J/(V/m)
    return (r.R_b / r.R_e) * env.consts.mu_B * env.params.g_e * b_sigma /
           (d_perp_energy * std::sqrt(10.0));
}

/// Upper bound on tau_c^e from the fitted ratio tau_c^e/e_sigma^2 [s (V/m)^-2]
/// and the e_sigma bound [V/m].
inline double bound_tauce(double ratio, double e_sigma_max) {
    if (ratio < 0.0 || e_sigma_max < 0.0)
        throw std::invalid_argument("bound_tauce: inputs must be non-negative");
    return ratio * e_sigma_max * e_sigma_max;
}

}  // namespace nvc
