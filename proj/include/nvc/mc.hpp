#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nvc/coherence.hpp"
#include "nvc/ou_process.hpp"

namespace nvc {

enum class SequenceKind { ramsey, hahn_echo };

/// Simulated (or analytic) decay curve. For Ramsey the time axis is the free
/// evolution time tau; for Hahn echo it is the total time 2*tau.
struct DecayCurve {
    SequenceKind kind = SequenceKind::ramsey;
    std::vector<double> times;
    std::vector<double> population;
    std::vector<double> mc_std_error;
    int n_realizations = 0;
    std::uint64_t seed = 0;
};

struct McOptions {
    int n_realizations = 10000;
    std::uint64_t seed = 1;
    int threads = 1;   // realizations are split across threads; results are
                       // independent of the thread count
    double dt = 0.0;   // 0 = choose automatically from the step rule
};

/// Largest admissible integration step for an environment and a maximum
/// sequence time: dt <= min(tau_c/100 per active channel, t_max/1000,
/// 0.1 / |delta_omega| at 5 sigma noise).
inline double mc_time_step_bound(const NoiseEnvironment& env, double t_max) {
    double bound = t_max / 1000.0;
    double rate5 = 0.0;
    const auto r = sensitivity_factors(env);
    if (env.magnetic.sigma > 0.0) {
        bound = std::min(bound, env.magnetic.tau_c / 100.0);
        rate5 += 5.0 * r.R_b * env.omega_b_sigma();
    }
    if (env.electric.sigma > 0.0) {
        bound = std::min(bound, env.electric.tau_c / 100.0);
        rate5 += 5.0 * r.R_e * env.omega_e_sigma();
    }
    if (rate5 > 0.0) bound = std::min(bound, 0.1 / rate5);
    return bound;
}

namespace mc_detail {

// Time lattice hitting every phase read-out time exactly: segments between
// consecutive event times, each subdivided to respect the step bound.
struct Lattice {
    std::vector<double> step;          // step duration per lattice interval
    std::vector<std::size_t> event_at; // lattice index of each event time
};

inline Lattice build_lattice(const std::vector<double>& events, double dt_max) {
    Lattice lat;
    lat.event_at.reserve(events.size());
    double prev = 0.0;
    for (double t : events) {
        if (t > prev) {
            const auto m = static_cast<std::size_t>(std::ceil((t - prev) / dt_max - 1e-12));
            const double h = (t - prev) / static_cast<double>(std::max<std::size_t>(m, 1));
            for (std::size_t i = 0; i < std::max<std::size_t>(m, 1); ++i) lat.step.push_back(h);
        }
        lat.event_at.push_back(lat.step.size());
        prev = t;
    }
    return lat;
}

// Cumulative midpoint-rule integral of one O-U channel along the lattice,
// recorded at the event indices. Exact O-U update per (possibly non-uniform)
// step keeps the marginal distribution exact for any step sizes.
inline void integrate_channel(const CounterRng::Stream& gen, const OUParams& p,
                              const Lattice& lat, std::vector<double>& integral_at_event) {
    double x = p.sigma * gen.normal(0);
    double integral = 0.0;
    std::size_t event = 0;
    const std::size_t n_events = lat.event_at.size();
    while (event < n_events && lat.event_at[event] == 0) integral_at_event[event++] = 0.0;
    for (std::size_t k = 0; k < lat.step.size(); ++k) {
        const double h = lat.step[k];
        const double alpha = std::exp(-h / p.tau_c);
        const double x_next = alpha * x + p.sigma * std::sqrt(1.0 - alpha * alpha) * gen.normal(k + 1);
        integral += 0.5 * (x + x_next) * h;
        x = x_next;
        while (event < n_events && lat.event_at[event] == k + 1) integral_at_event[event++] = integral;
    }
}

}  // namespace mc_detail

/// Monte Carlo Ramsey / Hahn-echo decay: per realization one b_z(t) and one
/// e_y(t) path are sampled and the accumulated phase integral of the
/// linearized frequency fluctuation is read out at every grid time (with the
/// pi-pulse sign flip at the echo midpoint). Pulses are instantaneous and
/// perfect. Deterministic for a fixed seed, independent of the thread count.
inline DecayCurve simulate_sequence_mc(SequenceKind kind, const std::vector<double>& times,
                                       const NoiseEnvironment& env, const McOptions& opts = {}) {
    if (times.empty()) throw std::invalid_argument("simulate_sequence_mc: empty time grid");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1]))
            throw std::invalid_argument("simulate_sequence_mc: times must be increasing and >= 0");
    }
    if (opts.n_realizations < 100)
        throw std::invalid_argument("simulate_sequence_mc: need at least 100 realizations");

    const double t_max = times.back();
    const double dt_bound = mc_time_step_bound(env, t_max);
    double dt = dt_bound;
    if (opts.dt > 0.0) {
        if (opts.dt > dt_bound * (1.0 + 1e-12)) {
            throw std::domain_error("simulate_sequence_mc: dt violates the step rule, need dt <= " +
                                    std::to_string(dt_bound));
        }
        dt = opts.dt;
    }

    // Event times where the cumulative phase integral is read out.
    std::vector<double> events;
    if (kind == SequenceKind::ramsey) {
        events = times;
    } else {
        events.reserve(2 * times.size());
        for (double t : times) events.push_back(0.5 * t);
        for (double t : times) events.push_back(t);
        std::sort(events.begin(), events.end());
        events.erase(std::unique(events.begin(), events.end()), events.end());
    }
    const auto lat = mc_detail::build_lattice(events, dt);

    std::vector<std::size_t> half_idx(times.size()), full_idx(times.size());
    auto event_index = [&](double t) {
        const auto it = std::lower_bound(events.begin(), events.end(), t);
        return static_cast<std::size_t>(it - events.begin());
    };
    for (std::size_t j = 0; j < times.size(); ++j) {
        full_idx[j] = event_index(times[j]);
        half_idx[j] = (kind == SequenceKind::hahn_echo) ? event_index(0.5 * times[j]) : 0;
    }

    const auto r = sensitivity_factors(env);
    const double coef_b = r.R_b * env.consts.mu_B * env.params.g_e / env.consts.hbar;
    const double coef_e = r.R_e * env.params.d_perp_over_h * env.consts.h / env.consts.hbar;
    const bool use_b = env.magnetic.sigma > 0.0;
    const bool use_e = env.electric.sigma > 0.0;

    const auto n_real = static_cast<std::size_t>(opts.n_realizations);
    const std::size_t n_pts = times.size();
    std::vector<double> cos_phi(n_pts * n_real);

    const CounterRng rng(opts.seed);
    auto run_block = [&](std::size_t r0, std::size_t r1) {
        std::vector<double> ib(events.size(), 0.0), ie(events.size(), 0.0);
        for (std::size_t rr = r0; rr < r1; ++rr) {
            if (use_b) mc_detail::integrate_channel(rng.stream(2 * rr), env.magnetic, lat, ib);
            if (use_e) mc_detail::integrate_channel(rng.stream(2 * rr + 1), env.electric, lat, ie);
            for (std::size_t j = 0; j < n_pts; ++j) {
                auto phase_at = [&](std::size_t ev) {
                    double p = 0.0;
                    if (use_b) p += coef_b * ib[ev];
                    if (use_e) p += coef_e * ie[ev];
                    return p;
                };
                double phi = phase_at(full_idx[j]);
                if (kind == SequenceKind::hahn_echo) phi = 2.0 * phase_at(half_idx[j]) - phi;
                cos_phi[j * n_real + rr] = std::cos(phi);
            }
        }
    };

    const int n_threads = std::max(1, opts.threads);
    if (n_threads == 1 || n_real < 2 * static_cast<std::size_t>(n_threads)) {
        run_block(0, n_real);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_real + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const std::size_t r0 = t * chunk;
            const std::size_t r1 = std::min(n_real, r0 + chunk);
            if (r0 < r1) pool.emplace_back(run_block, r0, r1);
        }
        for (auto& th : pool) th.join();
    }

    DecayCurve curve;
    curve.kind = kind;
    curve.times = times;
    curve.n_realizations = opts.n_realizations;
    curve.seed = opts.seed;
    curve.population.resize(n_pts);
    curve.mc_std_error.resize(n_pts);
    const double sign = (kind == SequenceKind::ramsey) ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n_pts; ++j) {
        // fixed-order reduction: identical result for any thread count
        double sum = 0.0;
        for (std::size_t rr = 0; rr < n_real; ++rr) sum += cos_phi[j * n_real + rr];
        const double mean = sum / static_cast<double>(n_real);
        double var = 0.0;
        for (std::size_t rr = 0; rr < n_real; ++rr) {
            const double d = cos_phi[j * n_real + rr] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n_real - 1);
        curve.population[j] = 0.5 + sign * 0.5 * mean;
        curve.mc_std_error[j] = std::sqrt(var / static_cast<double>(n_real)) / 2.0;
    }
    return curve;
}

inline DecayCurve simulate_sequence_mc(SequenceKind kind, const std::vector<double>& times,
                                       const NoiseEnvironment& env, int n_realizations,
                                       std::uint64_t seed) {
    McOptions opts;
    opts.n_realizations = n_realizations;
    opts.seed = seed;
    return simulate_sequence_mc(kind, times, env, opts);
}

}  // namespace nvc
