// Command-line front end for the NV spin-coherence toolkit: spin-level
// tables, synthetic ODMR spectra, T2 sweeps, Monte Carlo decay curves, and
// the inverse fitting pipeline.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nvc/nvc.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitNotConverged = 4;

struct RunConfig {
    nvc::NVParameters params;
    nvc::FieldVector e_field;  // V/m
    nvc::FieldVector b_field;  // T
    nvc::OUParams magnetic{0.0, 0.17};
    nvc::OUParams electric{0.0, 1.3824e-3};

    std::string sequence = "ramsey";
    double tau_start = 1e-7;
    double tau_stop = 3e-6;
    int tau_count = 20;
    bool tau_log = false;

    int n_realizations = 10000;
    std::uint64_t seed = 1;
    int threads = 1;
    double dt = 0.0;

    double f_start = 0.0;  // 0 = auto around the lines
    double f_stop = 0.0;
    int f_count = 2001;
    double linewidth = 3e5;
    double dip_depth = 0.02;

    double e_perp_max = 1.66e7;
    int e_perp_count = 12;

    std::string out;

    nvc::NoiseEnvironment environment() const {
        nvc::NoiseEnvironment env;
        env.B_z = b_field.z;
        env.E_perp = e_field.perp();
        env.magnetic = magnetic;
        env.electric = electric;
        env.params = params;
        return env;
    }
};

const std::set<std::string> kCartesianKeys = {"e_x_v_per_m", "e_y_v_per_m", "e_z_v_per_m",
                                              "b_x_t", "b_y_t", "b_z_t"};
const std::set<std::string> kSphericalKeys = {"e_mag_v_per_m", "e_theta_rad", "e_phi_rad",
                                              "b_mag_t", "b_theta_rad", "b_phi_rad"};
const std::set<std::string> kOtherKeys = {
    "d_gs_hz", "d_par_hz_per_v_per_m", "d_perp_hz_per_v_per_m", "a_par_hz", "a_perp_hz",
    "p_quad_hz", "g_e", "b_sigma_t", "b_tauc_s", "e_sigma_v_per_m", "e_tauc_s", "sequence",
    "tau_start_s", "tau_stop_s", "tau_count", "tau_spacing", "n_realizations", "seed", "threads",
    "dt_s", "f_start_hz", "f_stop_hz", "f_count", "linewidth_hz", "dip_depth",
    "e_perp_max_v_per_m", "e_perp_count", "out"};

void apply_preset(RunConfig& cfg, const std::string& name) {
    int idx = 0;
    if (name == "nv1") idx = 1;
    else if (name == "nv2") idx = 2;
    else if (name == "nv3") idx = 3;
    else throw std::invalid_argument("unknown preset '" + name + "' (expected nv1, nv2 or nv3)");
    const auto env = nvc::preset_environment(idx);
    cfg.params = env.params;
    cfg.b_field = {0.0, 0.0, env.B_z};
    cfg.magnetic = env.magnetic;
    cfg.electric = env.electric;
}

double num(const json& v, const std::string& key) {
    if (!v.is_number()) throw std::invalid_argument("config key '" + key + "' must be a number");
    return v.get<double>();
}

void apply_config_json(RunConfig& cfg, const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

    bool cartesian = false, spherical = false;
    for (const auto& [key, value] : j.items()) {
        if (kCartesianKeys.count(key)) cartesian = true;
        else if (kSphericalKeys.count(key)) spherical = true;
        else if (!kOtherKeys.count(key))
            throw std::invalid_argument("unknown config key '" + key + "'");
        (void)value;
    }
    if (cartesian && spherical)
        throw std::invalid_argument(
            "config mixes cartesian and spherical field keys; use exactly one style");

    auto get = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key)) return std::nullopt;
        return num(j.at(key), key);
    };

    if (auto v = get("d_gs_hz")) cfg.params.D_gs_over_h = *v;
    if (auto v = get("d_par_hz_per_v_per_m")) cfg.params.d_par_over_h = *v;
    if (auto v = get("d_perp_hz_per_v_per_m")) cfg.params.d_perp_over_h = *v;
    if (auto v = get("a_par_hz")) cfg.params.A_par_over_h = *v;
    if (auto v = get("a_perp_hz")) cfg.params.A_perp_over_h = *v;
    if (auto v = get("p_quad_hz")) cfg.params.P_over_h = *v;
    if (auto v = get("g_e")) cfg.params.g_e = *v;

    if (spherical) {
        nvc::SphericalDirection e{get("e_mag_v_per_m").value_or(0.0),
                                  get("e_theta_rad").value_or(0.0),
                                  get("e_phi_rad").value_or(0.0)};
        nvc::SphericalDirection b{get("b_mag_t").value_or(0.0), get("b_theta_rad").value_or(0.0),
                                  get("b_phi_rad").value_or(0.0)};
        cfg.e_field = nvc::spherical_to_cartesian(e);
        cfg.b_field = nvc::spherical_to_cartesian(b);
    } else {
        if (auto v = get("e_x_v_per_m")) cfg.e_field.x = *v;
        if (auto v = get("e_y_v_per_m")) cfg.e_field.y = *v;
        if (auto v = get("e_z_v_per_m")) cfg.e_field.z = *v;
        if (auto v = get("b_x_t")) cfg.b_field.x = *v;
        if (auto v = get("b_y_t")) cfg.b_field.y = *v;
        if (auto v = get("b_z_t")) cfg.b_field.z = *v;
    }

    if (auto v = get("b_sigma_t")) cfg.magnetic.sigma = *v;
    if (auto v = get("b_tauc_s")) cfg.magnetic.tau_c = *v;
    if (auto v = get("e_sigma_v_per_m")) cfg.electric.sigma = *v;
    if (auto v = get("e_tauc_s")) cfg.electric.tau_c = *v;

    if (j.contains("sequence")) cfg.sequence = j.at("sequence").get<std::string>();
    if (auto v = get("tau_start_s")) cfg.tau_start = *v;
    if (auto v = get("tau_stop_s")) cfg.tau_stop = *v;
    if (auto v = get("tau_count")) cfg.tau_count = static_cast<int>(*v);
    if (j.contains("tau_spacing")) {
        const auto s = j.at("tau_spacing").get<std::string>();
        if (s != "linear" && s != "log")
            throw std::invalid_argument("tau_spacing must be 'linear' or 'log'");
        cfg.tau_log = (s == "log");
    }
    if (auto v = get("n_realizations")) cfg.n_realizations = static_cast<int>(*v);
    if (auto v = get("seed")) cfg.seed = static_cast<std::uint64_t>(*v);
    if (auto v = get("threads")) cfg.threads = static_cast<int>(*v);
    if (auto v = get("dt_s")) cfg.dt = *v;
    if (auto v = get("f_start_hz")) cfg.f_start = *v;
    if (auto v = get("f_stop_hz")) cfg.f_stop = *v;
    if (auto v = get("f_count")) cfg.f_count = static_cast<int>(*v);
    if (auto v = get("linewidth_hz")) cfg.linewidth = *v;
    if (auto v = get("dip_depth")) cfg.dip_depth = *v;
    if (auto v = get("e_perp_max_v_per_m")) cfg.e_perp_max = *v;
    if (auto v = get("e_perp_count")) cfg.e_perp_count = static_cast<int>(*v);
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
}

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON run configuration");
    cmd->add_option("--preset", args.preset, "parameter preset: nv1, nv2 or nv3");
    cmd->add_option("--out", args.out, "output path (default: stdout)");
    cmd->add_option("--seed", args.seed, "random seed override");
}

RunConfig load_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.preset.empty()) apply_preset(cfg, args.preset);
    if (!args.config_path.empty()) {
        std::ifstream f(args.config_path);
        if (!f) throw std::invalid_argument("cannot open config file: " + args.config_path);
        json j;
        try {
            j = json::parse(f);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(std::string("config parse failure: ") + e.what());
        }
        apply_config_json(cfg, j);
    }
    if (args.seed) cfg.seed = *args.seed;
    if (!args.out.empty()) cfg.out = args.out;
    return cfg;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + out_path);
    f << text;
}

std::vector<double> make_time_grid(const RunConfig& cfg) {
    if (cfg.tau_count < 2) throw std::invalid_argument("tau_count must be >= 2");
    if (!(cfg.tau_stop > cfg.tau_start) || cfg.tau_start < 0.0)
        throw std::invalid_argument("need 0 <= tau_start < tau_stop");
    if (cfg.tau_log && !(cfg.tau_start > 0.0))
        throw std::invalid_argument("log spacing needs tau_start > 0");
    std::vector<double> grid(cfg.tau_count);
    for (int i = 0; i < cfg.tau_count; ++i) {
        const double u = static_cast<double>(i) / (cfg.tau_count - 1);
        grid[i] = cfg.tau_log
                      ? cfg.tau_start * std::pow(cfg.tau_stop / cfg.tau_start, u)
                      : cfg.tau_start + (cfg.tau_stop - cfg.tau_start) * u;
    }
    return grid;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_levels(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    const auto es = nvc::label_states(
        nvc::eigensolve(nvc::build_full_hamiltonian(cfg.params, cfg.e_field, cfg.b_field)));
    nvc::CsvWriter csv({"index", "eigenvalue_hz", "ms_label", "mi_label"});
    for (int i = 0; i < 9; ++i) {
        csv.add_row({static_cast<double>(i), es.eigenvalues[i] / (2.0 * std::numbers::pi),
                     static_cast<double>(es.labels[i].ms), static_cast<double>(es.labels[i].mi)});
    }
    emit(csv.str(), cfg.out);
    return kExitOk;
}

int cmd_odmr(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    if (!(cfg.linewidth > 0.0)) throw std::invalid_argument("linewidth_hz must be > 0");
    if (cfg.f_count < 2) throw std::invalid_argument("f_count must be >= 2");

    const auto res = nvc::resonance_frequencies(cfg.params, cfg.e_field, cfg.b_field);
    const double e_perp = cfg.e_field.perp();
    const double b_z = cfg.b_field.z;
    double theta = 0.0, phi_e = 0.0;
    if (e_perp > 0.0 || b_z != 0.0) {
        theta = nvc::mixing_angle(cfg.params, e_perp, b_z);
        phi_e = cfg.e_field.phi();
    }

    double f_lo = cfg.f_start, f_hi = cfg.f_stop;
    if (f_lo == 0.0 && f_hi == 0.0) {
        const auto fs = res.frequencies_sorted();
        f_lo = fs.front() - 5e6;
        f_hi = fs.back() + 5e6;
    }
    if (!(f_hi > f_lo)) throw std::invalid_argument("need f_start_hz < f_stop_hz");

    nvc::CsvWriter csv({"frequency_hz", "contrast"});
    for (int i = 0; i < cfg.f_count; ++i) {
        const double f = f_lo + (f_hi - f_lo) * i / (cfg.f_count - 1);
        double contrast = 1.0;
        for (const auto& line : res.lines) {
            const double weight = 2.0 * nvc::transition_rate(theta, phi_e, line.branch);
            const double u = (f - line.frequency_hz) / cfg.linewidth;
            contrast -= cfg.dip_depth * weight * std::exp(-0.5 * u * u);
        }
        csv.add_row({f, contrast});
    }
    emit(csv.str(), cfg.out);
    return kExitOk;
}

int cmd_t2(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    if (cfg.e_perp_count < 2) throw std::invalid_argument("e_perp_count must be >= 2");
    if (!(cfg.e_perp_max > 0.0)) throw std::invalid_argument("e_perp_max_v_per_m must be > 0");
    if (cfg.magnetic.sigma <= 0.0 && cfg.electric.sigma <= 0.0)
        throw std::domain_error("no noise channel configured: T2 is infinite");

    nvc::CsvWriter csv({"e_perp_kv_cm", "normalized_field", "t2_fid_s", "t2_echo_magnetic_s",
                        "t2_echo_combined_s"});
    nvc::NoiseEnvironment env = cfg.environment();
    for (int i = 0; i < cfg.e_perp_count; ++i) {
        env.E_perp = cfg.e_perp_max * i / (cfg.e_perp_count - 1);
        const double normalized = env.stark_energy() / env.zeeman_energy();
        csv.add_row({nvc::convert_unit(env.E_perp, nvc::Unit::volt_per_m, nvc::Unit::kilovolt_per_cm),
                     normalized, nvc::t2_fid_combined(env), nvc::t2_echo_magnetic(env),
                     nvc::t2_echo_combined(env)});
    }
    emit(csv.str(), cfg.out);
    return kExitOk;
}

int cmd_simulate(const CommonArgs& args, int threads_flag) {
    RunConfig cfg = load_config(args);
    if (threads_flag > 0) cfg.threads = threads_flag;

    nvc::SequenceKind kind;
    if (cfg.sequence == "ramsey") kind = nvc::SequenceKind::ramsey;
    else if (cfg.sequence == "hahn_echo") kind = nvc::SequenceKind::hahn_echo;
    else throw std::invalid_argument("sequence must be 'ramsey' or 'hahn_echo'");

    const auto grid = make_time_grid(cfg);
    const auto env = cfg.environment();

    nvc::McOptions opts;
    opts.n_realizations = cfg.n_realizations;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    opts.dt = cfg.dt;
    const auto curve = nvc::simulate_sequence_mc(kind, grid, env, opts);

    nvc::CsvWriter csv({"time_s", "population", "std_error", "analytic_population"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double analytic = (kind == nvc::SequenceKind::ramsey)
                                    ? nvc::fid_envelope_analytic(grid[i], env)
                                    : nvc::echo_envelope_analytic(grid[i], env);
        csv.add_row({grid[i], curve.population[i], curve.mc_std_error[i], analytic});
    }
    emit(csv.str(), cfg.out);
    return kExitOk;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

struct ReportParam {
    std::string name;
    double value;
    double sigma;
};

std::string fit_report(const std::string& kind, const std::vector<ReportParam>& params,
                       const nvc::FitResult& fit, std::optional<std::uint64_t> seed) {
    std::string s = "{\n";
    s += "  \"schema\": 1,\n";
    s += "  \"fit_kind\": \"" + json_escape(kind) + "\",\n";
    s += "  \"parameters\": [\n";
    for (std::size_t i = 0; i < params.size(); ++i) {
        s += "    {\"name\": \"" + json_escape(params[i].name) + "\", \"value\": " +
             nvc::format_g9(params[i].value) + ", \"sigma\": " + nvc::format_g9(params[i].sigma) +
             "}";
        s += (i + 1 < params.size()) ? ",\n" : "\n";
    }
    s += "  ],\n";
    s += "  \"rss\": " + nvc::format_g9(fit.rss) + ",\n";
    s += std::string("  \"converged\": ") + (fit.converged ? "true" : "false") + ",\n";
    if (seed) s += "  \"seed\": " + std::to_string(*seed) + ",\n";
    s += "  \"iterations\": " + std::to_string(fit.iterations) + "\n";
    s += "}\n";
    return s;
}

int column_of(const nvc::CsvTable& table, const std::vector<std::string>& names) {
    for (const auto& n : names) {
        const int i = table.column(n);
        if (i >= 0) return i;
    }
    std::string msg = "missing CSV column (tried:";
    for (const auto& n : names) msg += " " + n;
    throw std::invalid_argument(msg + ")");
}

nvc::T2Series load_t2_series(const std::string& path, const std::vector<std::string>& t2_names) {
    const auto table = nvc::read_csv_file(path);
    int e_col = -1;
    double e_scale = 1.0;
    if (table.column("e_perp_v_per_m") >= 0) {
        e_col = table.column("e_perp_v_per_m");
    } else if (table.column("e_perp_kv_cm") >= 0) {
        e_col = table.column("e_perp_kv_cm");
        e_scale = 1e5;
    } else {
        throw std::invalid_argument("missing CSV column e_perp_v_per_m (or e_perp_kv_cm)");
    }
    const int t_col = column_of(table, t2_names);
    const int s_col = table.column("sigma_t2_s");
    nvc::T2Series series;
    for (const auto& row : table.rows) {
        nvc::T2Point pt;
        pt.e_perp = row[e_col] * e_scale;
        pt.t2 = row[t_col];
        if (s_col >= 0) pt.sigma_t2 = row[s_col];
        series.push_back(pt);
    }
    return series;
}

int cmd_fit(const std::string& kind, const std::string& input, const CommonArgs& args,
            const std::string& decay_kind, double bz, double bsigma, int n_dips) {
    const RunConfig cfg = load_config(args);
    nvc::LmOptions opts;
    opts.multistart = 4;
    opts.seed = cfg.seed;

    std::vector<ReportParam> params;
    nvc::FitResult fit;

    if (kind == "odmr") {
        const auto table = nvc::read_csv_file(input);
        nvc::Spectrum spec;
        const int fc = table.require_column("frequency_hz");
        const int cc = table.require_column("contrast");
        for (const auto& row : table.rows) {
            spec.frequencies.push_back(row[fc]);
            spec.contrast.push_back(row[cc]);
        }
        const auto res = nvc::fit_odmr_gaussians(spec, n_dips, opts);
        fit = res.fit;
        params.push_back({"baseline", fit.values[0], fit.sigmas[0]});
        std::vector<int> order(n_dips);
        for (int d = 0; d < n_dips; ++d) order[d] = d;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return fit.values[1 + 3 * a] < fit.values[1 + 3 * b];
        });
        for (int d = 0; d < n_dips; ++d) {
            const int src = order[d];
            const std::string idx = std::to_string(d + 1);
            params.push_back({"center_" + idx + "_hz", fit.values[1 + 3 * src], fit.sigmas[1 + 3 * src]});
            params.push_back({"width_" + idx + "_hz", fit.values[2 + 3 * src], fit.sigmas[2 + 3 * src]});
            params.push_back({"depth_" + idx, fit.values[3 + 3 * src], fit.sigmas[3 + 3 * src]});
        }
    } else if (kind == "decay") {
        const auto table = nvc::read_csv_file(input);
        nvc::DecayData data;
        const int tc = table.require_column("time_s");
        const int pc = table.require_column("population");
        const int sc = table.column("std_error");
        for (const auto& row : table.rows) {
            data.times.push_back(row[tc]);
            data.population.push_back(row[pc]);
            if (sc >= 0) data.sigma.push_back(row[sc]);
        }
        if (!data.sigma.empty()) {
            for (double& s : data.sigma)
                if (!(s > 0.0)) { data.sigma.clear(); break; }  // unweighted if any sigma is 0
        }
        const bool echo = (decay_kind == "echo");
        const auto res = echo ? nvc::fit_echo_decay(data, opts) : nvc::fit_fid_decay(data, opts);
        fit = res.fit;
        params.push_back({"y0", res.y0, fit.sigmas[0]});
        params.push_back({"amplitude", res.amplitude, fit.sigmas[1]});
        params.push_back({echo ? "t2_echo_s" : "t2_fid_s", res.t2, fit.sigmas[2]});
    } else if (kind == "dperp") {
        const auto table = nvc::read_csv_file(input);
        const int ec = table.require_column("e_perp_v_per_m");
        std::vector<nvc::ResonancePoint> pts;
        for (const auto& row : table.rows) {
            nvc::ResonancePoint pt;
            pt.e_perp = row[ec];
            for (int i = 0; i < 6; ++i)
                pt.frequencies_hz[i] = row[table.require_column("f" + std::to_string(i + 1) + "_hz")];
            pts.push_back(pt);
        }
        const auto res = nvc::fit_dperp(pts, bz, cfg.params, {}, opts);
        fit = res.fit;
        params.push_back({"d_perp_hz_per_v_per_m", res.d_perp_over_h, fit.sigmas[0]});
    } else if (kind == "t2fid") {
        const auto series = load_t2_series(input, {"t2_s", "t2_fid_s"});
        const auto res = nvc::fit_bsigma(series, bz, cfg.params, {}, opts);
        fit = res.fit;
        params.push_back({"b_sigma_t", res.b_sigma, fit.sigmas[0]});
    } else if (kind == "t2echo") {
        const auto series = load_t2_series(input, {"t2_s", "t2_echo_combined_s"});
        const auto res = nvc::fit_combined_echo(series, bsigma, bz, cfg.params, {}, opts);
        fit = res.fit;
        params.push_back({"tau_c_b_s", res.tau_c_b, fit.sigmas[0]});
        params.push_back({"e_strength_v2_per_m2_per_s", res.strength, fit.sigmas[1]});
        params.push_back({"tau_c_e_over_e_sigma_sq_s_m2_per_v2", res.ratio(), res.ratio_sigma()});
    } else {
        throw std::invalid_argument("unknown fit kind '" + kind + "'");
    }

    emit(fit_report(kind, params, fit, cfg.seed), cfg.out);
    return fit.converged ? kExitOk : kExitNotConverged;
}

double parse_length(const std::string& text) {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    const std::string suffix = text.substr(pos);
    if (suffix.empty() || suffix == "m") return v;
    if (suffix == "cm") return v * 1e-2;
    if (suffix == "mm") return v * 1e-3;
    if (suffix == "um") return v * 1e-6;
    if (suffix == "nm") return v * 1e-9;
    throw std::invalid_argument("unknown length unit '" + suffix + "'");
}

double parse_charge(const std::string& text) {
    const nvc::PhysicalConstants c;
    if (text == "e") return c.elementary_charge;
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    const std::string suffix = text.substr(pos);
    if (suffix.empty() || suffix == "C") return v;
    if (suffix == "e") return v * c.elementary_charge;
    throw std::invalid_argument("unknown charge unit '" + suffix + "'");
}

std::string scalar_report(const std::string& name, double v_per_m, const std::string& format) {
    const double kv_cm = nvc::convert_unit(v_per_m, nvc::Unit::volt_per_m, nvc::Unit::kilovolt_per_cm);
    if (format == "json") {
        return "{\n  \"schema\": 1,\n  \"quantity\": \"" + name + "\",\n  \"value_v_per_m\": " +
               nvc::format_g9(v_per_m) + ",\n  \"value_kv_per_cm\": " + nvc::format_g9(kv_cm) +
               "\n}\n";
    }
    return name + " = " + nvc::format_g9(v_per_m) + " V/m (" + nvc::format_g9(kv_cm) + " kV/cm)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NV-center spin coherence toolkit"};
    app.require_subcommand(1);

    CommonArgs levels_args, odmr_args, t2_args, sim_args, fit_args;

    auto* levels = app.add_subcommand("levels", "nine-level eigenvalue table");
    add_common(levels, levels_args);

    auto* odmr = app.add_subcommand("odmr", "synthetic ODMR spectrum");
    add_common(odmr, odmr_args);

    auto* t2 = app.add_subcommand("t2", "T2 laws over an E_perp sweep");
    add_common(t2, t2_args);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo Ramsey / Hahn-echo decay");
    add_common(simulate, sim_args);
    int sim_threads = 0;
    simulate->add_option("--threads", sim_threads, "worker threads (deterministic result)");

    auto* fit = app.add_subcommand("fit", "inverse fits; JSON report");
    add_common(fit, fit_args);
    std::string fit_kind, fit_input, decay_kind = "fid";
    double fit_bz = 0.0, fit_bsigma = 0.0;
    int n_dips = 6;
    fit->add_option("kind", fit_kind, "odmr | decay | dperp | t2fid | t2echo")->required();
    fit->add_option("input", fit_input, "input CSV")->required();
    fit->add_option("--decay", decay_kind, "decay flavor: fid | echo");
    fit->add_option("--bz", fit_bz, "fixed B_z [T] (dperp, t2fid, t2echo)");
    fit->add_option("--bsigma", fit_bsigma, "fixed b_sigma [T] (t2echo)");
    fit->add_option("--n-dips", n_dips, "number of Gaussian dips (odmr)");

    auto* noise = app.add_subcommand("noise-path", "sample one O-U noise realization");
    double np_sigma = 0.0, np_tauc = 0.17, np_dt = 0.0;
    std::size_t np_n = 0, np_realization = 0;
    std::uint64_t np_seed = 1;
    std::string np_out;
    noise->add_option("--sigma", np_sigma, "process amplitude (field units)")->required();
    noise->add_option("--tauc", np_tauc, "correlation time [s]")->required();
    noise->add_option("--dt", np_dt, "sample spacing [s]")->required();
    noise->add_option("--n", np_n, "number of samples")->required();
    noise->add_option("--seed", np_seed, "random seed");
    noise->add_option("--realization", np_realization, "realization index");
    noise->add_option("--out", np_out, "output path (default: stdout)");

    auto* charge = app.add_subcommand("charge-field", "surface point-charge field at the NV");
    std::string q_text = "e", r_text, cf_format = "text", cf_out;
    double kd = 5.7, kout = 2.3;
    charge->add_option("--q", q_text, "charge (coulomb, or multiples of 'e')");
    charge->add_option("--r", r_text, "distance, with unit suffix (e.g. 40nm)")->required();
    charge->add_option("--kd", kd, "diamond dielectric constant");
    charge->add_option("--kout", kout, "outside dielectric constant");
    charge->add_option("--format", cf_format, "text | json");
    charge->add_option("--out", cf_out, "output path (default: stdout)");

    auto* ffv = app.add_subcommand("field-from-voltage", "uniform field from applied voltage");
    std::string gap_text, fv_format = "text", fv_out;
    double volts = 0.0;
    ffv->add_option("--v", volts, "applied voltage [V]")->required();
    ffv->add_option("--gap", gap_text, "electrode gap, with unit suffix (e.g. 10um)")->required();
    ffv->add_option("--format", fv_format, "text | json");
    ffv->add_option("--out", fv_out, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (levels->parsed()) return cmd_levels(levels_args);
        if (odmr->parsed()) return cmd_odmr(odmr_args);
        if (t2->parsed()) return cmd_t2(t2_args);
        if (simulate->parsed()) return cmd_simulate(sim_args, sim_threads);
        if (fit->parsed())
            return cmd_fit(fit_kind, fit_input, fit_args, decay_kind, fit_bz, fit_bsigma, n_dips);
        if (noise->parsed()) {
            const auto path = nvc::sample_ou_path({np_sigma, np_tauc}, np_dt, np_n, np_seed,
                                                  np_realization);
            nvc::CsvWriter csv({"time_s", "value"});
            for (std::size_t i = 0; i < path.samples.size(); ++i)
                csv.add_row({static_cast<double>(i) * path.dt, path.samples[i]});
            emit(csv.str(), np_out);
            return kExitOk;
        }
        if (charge->parsed()) {
            const double field = nvc::point_charge_field(parse_charge(q_text), parse_length(r_text),
                                                         kd, kout);
            emit(scalar_report("charge_field", field, cf_format), cf_out);
            return kExitOk;
        }
        if (ffv->parsed()) {
            nvc::ElectrodeGeometry g;
            g.applied_voltage = volts;
            g.gap = parse_length(gap_text);
            emit(scalar_report("field_from_voltage", nvc::uniform_field_from_voltage(g), fv_format),
                 fv_out);
            return kExitOk;
        }
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPhysics;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
