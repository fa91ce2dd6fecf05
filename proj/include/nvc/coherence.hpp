#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nvc/constants.hpp"
#include "nvc/ou_process.hpp"

namespace nvc {

/// Static bias fields plus the two O-U noise channels acting on the dressed
/// m_I = 0 transition: the bath field b_z(t) (sigma in T) and the transverse
/// electric fluctuation e_y(t) (sigma in V/m).
struct NoiseEnvironment {
    double B_z = 0.0;     // T
    double E_perp = 0.0;  // V/m
    OUParams magnetic;    // b_z(t)
    OUParams electric;    // e_y(t)
    NVParameters params;
    PhysicalConstants consts;

    double zeeman_energy() const { return consts.mu_B * params.g_e * B_z; }            // J
    double stark_energy() const { return params.d_perp_over_h * consts.h * E_perp; }   // J
    double bias_energy() const { return std::hypot(zeeman_energy(), stark_energy()); }

    /// Noise amplitudes as angular frequencies, mu_B g_e b_sigma / hbar and
    /// d_perp e_sigma / hbar [rad/s].
    double omega_b_sigma() const { return consts.mu_B * params.g_e * magnetic.sigma / consts.hbar; }
    double omega_e_sigma() const {
        return params.d_perp_over_h * consts.h * electric.sigma / consts.hbar;
    }

    /// True when the bias splitting dominates both noise amplitudes by 10x,
    /// the validity regime of the linearized frequency fluctuation.
    bool in_linearized_regime() const {
        const double noise = std::max(consts.mu_B * params.g_e * magnetic.sigma,
                                      params.d_perp_over_h * consts.h * electric.sigma);
        return bias_energy() >= 10.0 * noise;
    }
};

struct SensitivityFactors {
    double R_b = 0.0;
    double R_e = 0.0;
};

/// Linear response of the dressed transition to magnetic vs transverse
/// electric fluctuations; R_b^2 + R_e^2 = 1.
inline SensitivityFactors sensitivity_factors(const NoiseEnvironment& env) {
    const double denom = env.bias_energy();
    if (denom == 0.0) {
        throw std::domain_error("sensitivity_factors: undefined for B_z = 0 and E_perp = 0");
    }
    return {env.zeeman_energy() / denom, env.stark_energy() / denom};
}

enum class DeltaOmegaMode { exact, linearized };

/// Resonance-frequency fluctuation [rad/s] for instantaneous noise values
/// b [T] and e [V/m].
inline double delta_omega(double b, double e, const NoiseEnvironment& env, DeltaOmegaMode mode) {
    const double gm = env.consts.mu_B * env.params.g_e;
    const double dp = env.params.d_perp_over_h * env.consts.h;
    if (mode == DeltaOmegaMode::exact) {
        const double shifted = std::hypot(gm * (env.B_z + b), dp * (env.E_perp + e));
        return (shifted - env.bias_energy()) / env.consts.hbar;
    }
    const auto r = sensitivity_factors(env);
    return r.R_b * gm * b / env.consts.hbar + r.R_e * dp * e / env.consts.hbar;
}

inline constexpr double kInfiniteT2 = std::numeric_limits<double>::infinity();

/// sqrt(2) hbar / (R_b mu_B g_e b_sigma): FID dephasing time from the
/// magnetic channel alone.
inline double t2_fid_magnetic(const NoiseEnvironment& env) {
    const double rate = sensitivity_factors(env).R_b * env.consts.mu_B * env.params.g_e *
                        env.magnetic.sigma;
    if (rate == 0.0) return kInfiniteT2;
    return std::numbers::sqrt2 * env.consts.hbar / rate;
}

/// (12 tau_c^b (hbar / (R_b mu_B g_e b_sigma))^2)^(1/3).
inline double t2_echo_magnetic(const NoiseEnvironment& env) {
    const double rate = sensitivity_factors(env).R_b * env.consts.mu_B * env.params.g_e *
                        env.magnetic.sigma;
    if (rate == 0.0) return kInfiniteT2;
    const double t = env.consts.hbar / rate;
    return std::cbrt(12.0 * env.magnetic.tau_c * t * t);
}

/// Electric-channel echo time (12 tau_c^e (hbar / (R_e d_perp e_sigma))^2)^(1/3).
inline double t2_echo_electric(const NoiseEnvironment& env) {
    const double rate = sensitivity_factors(env).R_e * env.params.d_perp_over_h * env.consts.h *
                        env.electric.sigma;
    if (rate == 0.0) return kInfiniteT2;
    const double t = env.consts.hbar / rate;
    return std::cbrt(12.0 * env.electric.tau_c * t * t);
}

/// sqrt(2) hbar / sqrt((R_b mu_B g_e b_sigma)^2 + (R_e d_perp e_sigma)^2).
inline double t2_fid_combined(const NoiseEnvironment& env) {
    const auto r = sensitivity_factors(env);
    const double wb = r.R_b * env.consts.mu_B * env.params.g_e * env.magnetic.sigma;
    const double we = r.R_e * env.params.d_perp_over_h * env.consts.h * env.electric.sigma;
    const double rate = std::hypot(wb, we);
    if (rate == 0.0) return kInfiniteT2;
    return std::numbers::sqrt2 * env.consts.hbar / rate;
}

/// Cube-law combination T_b T_e / (T_b^3 + T_e^3)^(1/3) of the two echo
/// channels; a channel with zero sigma drops out.
inline double t2_echo_combined(const NoiseEnvironment& env) {
    const double tb = t2_echo_magnetic(env);
    const double te = t2_echo_electric(env);
    if (std::isinf(tb)) return te;
    if (std::isinf(te)) return tb;
    return tb * te / std::cbrt(tb * tb * tb + te * te * te);
}

namespace envelope_detail {

// tau/tau_c - 1 + exp(-tau/tau_c), evaluated without cancellation
inline double fid_shape(double x) { return x + std::expm1(-x); }

// 2tau/tau_c - 3 - exp(-2tau/tau_c) + 4 exp(-tau/tau_c), x = tau/tau_c
inline double echo_shape(double x) { return 2.0 * x - std::expm1(-2.0 * x) + 4.0 * std::expm1(-x); }

}  // namespace envelope_detail

/// Per-channel FID decoherence exponent tau_c^2 (R w_sigma)^2 (tau/tau_c - 1 + e^(-tau/tau_c)).
inline double fid_exponent(double tau, double r_omega_sigma, double tau_c) {
    const double a = tau_c * r_omega_sigma;
    return a * a * envelope_detail::fid_shape(tau / tau_c);
}

/// Per-channel Hahn-echo exponent with the refocused O-U shape; two_tau is
/// the total free-evolution time.
inline double echo_exponent(double two_tau, double r_omega_sigma, double tau_c) {
    const double a = tau_c * r_omega_sigma;
    return a * a * envelope_detail::echo_shape(0.5 * two_tau / tau_c);
}

inline double total_fid_exponent(double tau, const NoiseEnvironment& env) {
    const auto r = sensitivity_factors(env);
    double chi = 0.0;
    if (env.magnetic.sigma > 0.0) chi += fid_exponent(tau, r.R_b * env.omega_b_sigma(), env.magnetic.tau_c);
    if (env.electric.sigma > 0.0) chi += fid_exponent(tau, r.R_e * env.omega_e_sigma(), env.electric.tau_c);
    return chi;
}

inline double total_echo_exponent(double two_tau, const NoiseEnvironment& env) {
    const auto r = sensitivity_factors(env);
    double chi = 0.0;
    if (env.magnetic.sigma > 0.0) chi += echo_exponent(two_tau, r.R_b * env.omega_b_sigma(), env.magnetic.tau_c);
    if (env.electric.sigma > 0.0) chi += echo_exponent(two_tau, r.R_e * env.omega_e_sigma(), env.electric.tau_c);
    return chi;
}

/// m_s = 0 population after a Ramsey sequence of free-evolution time tau;
/// starts at 0 and saturates at 1/2. Uncorrelated channels multiply.
inline double fid_envelope_analytic(double tau, const NoiseEnvironment& env) {
    if (tau < 0.0) throw std::invalid_argument("fid_envelope_analytic: tau must be >= 0");
    return 0.5 - 0.5 * std::exp(-total_fid_exponent(tau, env));
}

/// m_s = 0 population after a Hahn echo of total time 2*tau; starts at 1 and
/// decays to 1/2.
inline double echo_envelope_analytic(double two_tau, const NoiseEnvironment& env) {
    if (two_tau < 0.0) throw std::invalid_argument("echo_envelope_analytic: time must be >= 0");
    return 0.5 + 0.5 * std::exp(-total_echo_exponent(two_tau, env));
}

}  // namespace nvc
