#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nvc {

/// Stationary Ornstein-Uhlenbeck parameters: amplitude sigma (field units)
/// and correlation time tau_c [s]; autocorrelation sigma^2 exp(-|t|/tau_c).
struct OUParams {
    double sigma = 0.0;
    double tau_c = 1.0;
};

namespace rng_detail {

inline constexpr std::uint64_t kGamma1 = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kGamma2 = 0xD1B54A32D192ED03ull;
inline constexpr std::uint64_t kGamma3 = 0x8CB92BA72F3D8DD7ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

inline double to_unit_interval(std::uint64_t w) {
    // (0, 1]; never 0 so log() stays finite
    return static_cast<double>((w >> 11) + 1) * 0x1.0p-53;
}

}  // namespace rng_detail

/// Counter-based normal generator: the variate for (stream, index) is a pure
/// function of (seed, stream, index), so realization r / step k can be
/// produced without generating any preceding draws. Streams separate
/// realizations, noise channels, and grid points in Monte Carlo runs.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed)
        : key_(rng_detail::mix64(seed + rng_detail::kGamma1)) {}

    std::uint64_t word(std::uint64_t stream, std::uint64_t index) const {
        return bound_word(stream_key(stream), index);
    }

    double uniform(std::uint64_t stream, std::uint64_t index) const {
        return rng_detail::to_unit_interval(word(stream, index));
    }

    /// Standard normal via Box-Muller on the word pair (2*index, 2*index+1).
    double normal(std::uint64_t stream, std::uint64_t index) const {
        return normal_from_key(stream_key(stream), index);
    }

    /// Generator bound to one stream; avoids re-hashing the stream key in
    /// tight sampling loops.
    class Stream {
    public:
        Stream(std::uint64_t key) : key_(key) {}
        double normal(std::uint64_t index) const { return normal_from_key(key_, index); }
        double uniform(std::uint64_t index) const {
            return rng_detail::to_unit_interval(bound_word(key_, index));
        }

    private:
        std::uint64_t key_;
    };

    Stream stream(std::uint64_t stream_id) const { return Stream(stream_key(stream_id)); }

private:
    std::uint64_t stream_key(std::uint64_t stream) const {
        return rng_detail::mix64(key_ ^ rng_detail::mix64(stream + rng_detail::kGamma2));
    }

    static std::uint64_t bound_word(std::uint64_t key, std::uint64_t index) {
        return rng_detail::mix64(key ^ rng_detail::mix64(index + rng_detail::kGamma3));
    }

    static double normal_from_key(std::uint64_t key, std::uint64_t index) {
        const double u1 = rng_detail::to_unit_interval(bound_word(key, 2 * index));
        const double u2 = rng_detail::to_unit_interval(bound_word(key, 2 * index + 1));
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t key_;
};

/// One sampled realization of an O-U process on a uniform time grid.
struct NoisePath {
    double dt = 0.0;
    std::vector<double> samples;
    std::uint64_t seed = 0;
    OUParams params;
};

/// Draws a stationary O-U path with the distribution-exact update
///   x_0 ~ N(0, sigma^2),  x_{k+1} = a x_k + sigma sqrt(1-a^2) xi_k,
/// a = exp(-dt/tau_c). Exact for any dt; bit-reproducible for fixed
/// (seed, realization, params, dt, n).
inline NoisePath sample_ou_path(const OUParams& p, double dt, std::size_t n, std::uint64_t seed,
                                std::uint64_t realization = 0) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_ou_path: dt must be > 0");
    if (n == 0) throw std::invalid_argument("sample_ou_path: n must be >= 1");
    if (!(p.tau_c > 0.0)) throw std::invalid_argument("sample_ou_path: tau_c must be > 0");
    if (p.sigma < 0.0) throw std::invalid_argument("sample_ou_path: sigma must be >= 0");

    const double alpha = std::exp(-dt / p.tau_c);
    const double step_sigma = p.sigma * std::sqrt(1.0 - alpha * alpha);

    const auto gen = CounterRng(seed).stream(realization);
    NoisePath path{dt, {}, seed, p};
    path.samples.resize(n);
    double x = p.sigma * gen.normal(0);
    path.samples[0] = x;
    for (std::size_t k = 1; k < n; ++k) {
        x = alpha * x + step_sigma * gen.normal(k);
        path.samples[k] = x;
    }
    return path;
}

/// Stationary autocorrelation estimate; lag l uses the 1/(n-l) normalization,
/// so the lag-0 entry is the sample variance.
inline std::vector<std::pair<double, double>> autocorrelation(const NoisePath& path,
                                                              std::size_t max_lag) {
    const std::size_t n = path.samples.size();
    if (n == 0) throw std::invalid_argument("autocorrelation: empty path");
    if (max_lag >= n) throw std::invalid_argument("autocorrelation: max_lag must be < path length");

    double mean = 0.0;
    for (double x : path.samples) mean += x;
    mean /= static_cast<double>(n);

    std::vector<std::pair<double, double>> acf;
    acf.reserve(max_lag + 1);
    for (std::size_t l = 0; l <= max_lag; ++l) {
        double c = 0.0;
        for (std::size_t k = 0; k + l < n; ++k)
            c += (path.samples[k] - mean) * (path.samples[k + l] - mean);
        c /= static_cast<double>(n - l);
        acf.emplace_back(static_cast<double>(l) * path.dt, c);
    }
    return acf;
}

}  // namespace nvc
