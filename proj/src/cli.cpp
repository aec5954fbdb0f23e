#include "swelab/cli.hpp"

#include "swelab/gaussian.hpp"
#include "swelab/io.hpp"
#include "swelab/lil.hpp"
#include "swelab/sampler.hpp"
#include "swelab/selftest.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

namespace swelab {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitResolutionError = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    json config;            // echoed verbatim into every output
    std::string command;
    std::uint64_t seed = 0;
    bool has_seed = false;
    unsigned threads = 1;
    std::optional<std::filesystem::path> out_dir;
};

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

json make_meta(const Context& ctx) {
    json meta;
    meta["command"] = ctx.command;
    meta["config"] = ctx.config;
    if (ctx.has_seed) meta["seed"] = ctx.seed;
    meta["threads"] = ctx.threads;
    meta["timestamp"] = iso_timestamp();
    return meta;
}

/// Fetches config[section][key] with a default; wrong JSON types surface as
/// config errors rather than exceptions from the JSON library.
template <typename T>
T cfg(const json& config, const std::string& section, const std::string& key,
      const T& fallback) {
    if (!config.contains(section)) return fallback;
    const auto& s = config.at(section);
    if (!s.is_object() || !s.contains(key)) return fallback;
    try {
        return s.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config." + section + "." + key + ": " + e.what());
    }
}

void emit(const Context& ctx, const json& meta, const json& results) {
    json doc;
    doc["meta"] = meta;
    doc["results"] = results;
    if (ctx.out_dir) {
        std::filesystem::create_directories(*ctx.out_dir);
        const auto path = *ctx.out_dir / (ctx.command + ".json");
        std::ofstream os(path);
        os << doc.dump(2) << '\n';
        std::cout << "wrote " << path.string() << '\n';
    } else {
        std::cout << doc.dump(2) << '\n';
    }
}

std::filesystem::path resolve_output(const Context& ctx, const std::string& name) {
    if (ctx.out_dir) {
        std::filesystem::create_directories(*ctx.out_dir);
        return *ctx.out_dir / name;
    }
    return name;
}

void require_seed(const Context& ctx) {
    if (!ctx.has_seed) {
        throw ConfigError("a seed is required: set config.experiment.seed or pass --seed");
    }
}

std::optional<TimeBand> band_from_config(const json& config) {
    if (!config.contains("grid") || !config["grid"].contains("band") ||
        config["grid"]["band"].is_null()) {
        return std::nullopt;
    }
    const auto& b = config["grid"]["band"];
    const double lo = b.value("s_lo", 0.0);
    const double hi = b.contains("s_hi") ? b["s_hi"].get<double>()
                                         : std::numeric_limits<double>::infinity();
    return TimeBand(lo, hi);
}

int cmd_selftest(Context& ctx) {
    const auto betas =
        cfg<std::vector<double>>(ctx.config, "model", "betas", {0.2, 0.5, 0.8});
    const auto checks = run_selftest(betas);

    json rows = json::array();
    json failures = json::array();
    std::size_t n_pass = 0;
    for (const auto& c : checks) {
        rows.push_back({{"name", c.name},
                        {"pass", c.pass},
                        {"deviation", c.deviation},
                        {"tolerance", c.tolerance},
                        {"detail", c.detail}});
        if (c.pass) {
            ++n_pass;
        } else {
            failures.push_back(c.name);
        }
    }
    json results;
    results["n_checks"] = checks.size();
    results["n_pass"] = n_pass;
    results["n_fail"] = checks.size() - n_pass;
    results["failures"] = failures;
    results["checks"] = rows;
    emit(ctx, make_meta(ctx), results);
    return failures.empty() ? kExitOk : kExitCheckFailure;
}

int cmd_sample(Context& ctx) {
    require_seed(ctx);
    const double beta = cfg<double>(ctx.config, "model", "beta", 0.5);
    const auto p = make_params(beta);

    GridSpec grid;
    grid.tau_values = cfg<std::vector<double>>(ctx.config, "grid", "tau_values", {1.0});
    grid.lambda_values =
        cfg<std::vector<double>>(ctx.config, "grid", "lambda_values", {1.0});
    grid.band = band_from_config(ctx.config);
    grid.validate();

    const auto n_reps = cfg<std::size_t>(ctx.config, "experiment", "n_reps", 1);
    const double max_jitter = cfg<double>(ctx.config, "experiment", "max_jitter", 1e-6);

    CovMatrix m = assemble_covariance(p, grid);
    factorize(m, max_jitter);
    const auto samples = sample(m, grid, ctx.seed, n_reps);

    const auto csv_name = cfg<std::string>(ctx.config, "output", "csv", "samples.csv");
    const auto csv_path = resolve_output(ctx, csv_name);
    {
        std::ofstream os(csv_path);
        write_csv(os, samples);
    }
    json results;
    results["grid_points"] = grid.size();
    results["n_reps"] = n_reps;
    results["jitter_used"] = m.jitter_used;
    // report configured names, not resolved paths, so identical configs
    // yield byte-identical result files regardless of --out
    results["csv"] = csv_name;
    if (ctx.config.contains("output") && ctx.config["output"].contains("binary")) {
        const auto bin_name = ctx.config["output"]["binary"].get<std::string>();
        const auto bin_path = resolve_output(ctx, bin_name);
        std::ofstream os(bin_path, std::ios::binary);
        for (const auto& s : samples) write_binary(os, s, beta);
        results["binary"] = bin_name;
    }
    // quick-look moments across replications, per grid point
    json variances = json::array();
    for (std::size_t i = 0; i < grid.tau_values.size(); ++i) {
        for (std::size_t j = 0; j < grid.lambda_values.size(); ++j) {
            double mean = 0.0, m2 = 0.0;
            for (const auto& s : samples) {
                mean += s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
            mean /= static_cast<double>(samples.size());
            for (const auto& s : samples) {
                const double d = s.values(static_cast<Eigen::Index>(i),
                                          static_cast<Eigen::Index>(j)) -
                                 mean;
                m2 += d * d;
            }
            variances.push_back({{"tau", grid.tau_values[i]},
                                 {"lambda", grid.lambda_values[j]},
                                 {"mean", mean},
                                 {"variance", samples.size() > 1
                                                  ? m2 / (static_cast<double>(samples.size()) - 1)
                                                  : 0.0}});
        }
    }
    results["moments"] = variances;
    emit(ctx, make_meta(ctx), results);
    return kExitOk;
}

int cmd_lil(Context& ctx) {
    require_seed(ctx);
    const double beta = cfg<double>(ctx.config, "model", "beta", 0.5);
    const auto p = make_params(beta);
    const double tau = cfg<double>(ctx.config, "experiment", "tau", 1.0);
    const double lambda = cfg<double>(ctx.config, "experiment", "lambda", 1.0);
    const auto n_reps = cfg<std::size_t>(ctx.config, "experiment", "n_reps", 200);
    const double q = cfg<double>(ctx.config, "scales", "q", 2.0);
    const int n_min = cfg<int>(ctx.config, "scales", "n_min", 3);
    const int n_max = cfg<int>(ctx.config, "scales", "n_max", 12);

    GridSpec grid;
    grid.tau_values = {tau};
    grid.lambda_values = oscillation_lambda_grid(lambda, q, n_min, n_max);
    grid.validate();
    CovMatrix m = assemble_covariance(p, grid);
    factorize(m, 1e-6);
    const auto samples = sample(m, grid, ctx.seed, n_reps);

    const double estimate = lil_constant_estimate(samples, p, tau, lambda, q, n_min, n_max);
    json results;
    results["lil_constant_estimate"] = estimate;
    results["k_beta"] = p.k_beta;
    results["ratio"] = estimate / p.k_beta;
    results["tau"] = tau;
    results["lambda"] = lambda;
    results["q"] = q;
    results["n_min"] = n_min;
    results["n_max"] = n_max;
    results["n_reps"] = n_reps;
    results["jitter_used"] = m.jitter_used;

    if (ctx.config.contains("output") && ctx.config["output"].contains("csv")) {
        const auto csv_name = ctx.config["output"]["csv"].get<std::string>();
        const auto path = resolve_output(ctx, csv_name);
        std::ofstream os(path);
        os << "replication_id,scale_index,h,raw_increment,lil_statistic,mod_statistic\n";
        for (const auto& s : samples) {
            for (const auto& r : oscillation_scan(s, p, tau, lambda, q, n_min, n_max)) {
                os << s.replication_id << ',' << r.scale_index << ','
                   << format_double(r.h) << ',' << format_double(r.raw_increment) << ','
                   << format_double(r.lil_statistic) << ','
                   << format_double(r.mod_statistic) << '\n';
            }
        }
        results["csv"] = csv_name;
    }
    emit(ctx, make_meta(ctx), results);
    return kExitOk;
}

int cmd_propagate(Context& ctx) {
    require_seed(ctx);
    const double beta = cfg<double>(ctx.config, "model", "beta", 0.5);
    const auto p = make_params(beta);
    const double tau0 = cfg<double>(ctx.config, "experiment", "tau0", 1.0);
    const auto n_runs = cfg<std::size_t>(ctx.config, "experiment", "n_runs", 1);

    PropagationConfig base;
    base.seed = ctx.seed;
    base.grid_pow = cfg<int>(ctx.config, "experiment", "grid_pow", base.grid_pow);
    base.depth = cfg<int>(ctx.config, "experiment", "depth", base.depth);
    base.min_depth = cfg<int>(ctx.config, "experiment", "min_depth", base.min_depth);
    base.threshold_mult =
        cfg<double>(ctx.config, "experiment", "threshold_mult", base.threshold_mult);
    base.taus = cfg<std::vector<double>>(ctx.config, "experiment", "taus", base.taus);
    base.n_controls = cfg<int>(ctx.config, "experiment", "n_controls", base.n_controls);
    base.scale_n_min = cfg<int>(ctx.config, "scales", "n_min", base.scale_n_min);
    base.scale_n_max = cfg<int>(ctx.config, "scales", "n_max", base.scale_n_max);
    base.stat_levels = cfg<int>(ctx.config, "experiment", "stat_levels", base.stat_levels);
    base.zero_u1 = cfg<bool>(ctx.config, "experiment", "zero_u1", base.zero_u1);

    json runs = json::array();
    std::vector<std::vector<double>> ratios_per_tau(base.taus.size());
    std::size_t n_skipped = 0;
    std::optional<std::filesystem::path> csv_path;
    std::string csv_name;
    std::ofstream csv;
    if (ctx.config.contains("output") && ctx.config["output"].contains("csv")) {
        csv_name = ctx.config["output"]["csv"].get<std::string>();
        csv_path = resolve_output(ctx, csv_name);
        csv.open(*csv_path);
        csv << "run_id,tau,column,lambda,scale_index,h,increment,mod_statistic\n";
    }

    for (std::size_t run = 0; run < n_runs; ++run) {
        PropagationConfig cfg_run = base;
        cfg_run.run_id = run;
        const auto rep = propagation_experiment(p, tau0, cfg_run);
        json jr;
        jr["run_id"] = run;
        jr["skipped"] = rep.skipped;
        if (rep.skipped) {
            ++n_skipped;
            jr["skip_reason"] = rep.skip_reason;
            runs.push_back(jr);
            continue;
        }
        jr["lambda_star"] = rep.lambda_star;
        jr["depth_achieved"] = rep.depth_achieved;
        jr["control_lambdas"] = rep.control_lambdas;
        json per_tau = json::array();
        for (std::size_t i = 0; i < rep.per_tau.size(); ++i) {
            const auto& st = rep.per_tau[i];
            per_tau.push_back({{"tau", st.tau},
                               {"stat_star", st.stat_star},
                               {"control_stats", st.control_stats},
                               {"elevation_ratio", st.elevation_ratio},
                               {"u2_stat_star", st.u2_stat_star},
                               {"envelope_center", st.envelope_center},
                               {"within_envelope", st.within_envelope}});
            ratios_per_tau[i].push_back(st.elevation_ratio);
        }
        jr["per_tau"] = per_tau;
        runs.push_back(jr);
        if (csv_path) {
            for (const auto& r : rep.records) {
                csv << run << ',' << format_double(r.tau) << ',' << r.column << ','
                    << format_double(r.lambda) << ',' << r.scale_index << ','
                    << format_double(r.h) << ',' << format_double(r.increment) << ','
                    << format_double(r.mod_statistic) << '\n';
            }
        }
    }

    json medians = json::array();
    for (std::size_t i = 0; i < base.taus.size(); ++i) {
        auto v = ratios_per_tau[i];
        std::sort(v.begin(), v.end());
        const double med =
            v.empty() ? 0.0
                      : (v.size() % 2 == 1 ? v[v.size() / 2]
                                           : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]));
        medians.push_back({{"tau", base.taus[i]}, {"median_elevation_ratio", med}});
    }
    json results;
    results["tau0"] = tau0;
    results["n_runs"] = n_runs;
    results["n_skipped"] = n_skipped;
    results["zero_u1"] = base.zero_u1;
    results["median_elevation_ratios"] = medians;
    results["runs"] = runs;
    // the 1.5 median-ratio threshold is an empirical choice, not a theorem
    results["threshold_note"] =
        "elevation thresholds are finite-scale artifact choices";
    if (csv_path) results["csv"] = csv_name;
    emit(ctx, make_meta(ctx), results);
    return kExitOk;
}

int cmd_slepian(Context& ctx) {
    const auto g1s = cfg<std::vector<double>>(ctx.config, "experiment", "g1_values",
                                              {0.5, 1.0, 1.5, 2.0});
    const auto g2s = cfg<std::vector<double>>(ctx.config, "experiment", "g2_values",
                                              {0.5, 1.0, 1.5, 2.0});
    const auto rs = cfg<std::vector<double>>(ctx.config, "experiment", "r_values",
                                             {0.15, 0.3, 0.45, 0.6});
    const double fd_tol = cfg<double>(ctx.config, "experiment", "fd_tol", 1e-5);
    const double residual_tol =
        cfg<double>(ctx.config, "experiment", "residual_tol", 1e-9);

    json rows = json::array();
    bool all_pass = true;
    for (double g1 : g1s) {
        for (double g2 : g2s) {
            for (double r : rs) {
                const auto rep = slepian_identity_check(g1, g2, r);
                const bool pass = rep.fd_deviation <= fd_tol && rep.bracket_found &&
                                  rep.residual <= residual_tol;
                all_pass = all_pass && pass;
                rows.push_back({{"identity", "slepian_mean_value"},
                                {"g1", g1},
                                {"g2", g2},
                                {"r", r},
                                {"p_r", rep.p_r},
                                {"p_zero", rep.p_zero},
                                {"fd_deviation", rep.fd_deviation},
                                {"fd_tolerance", fd_tol},
                                {"r_star", rep.r_star},
                                {"residual", rep.residual},
                                {"residual_tolerance", residual_tol},
                                {"pass", pass}});
            }
        }
    }
    // zero-threshold cross-check against the arcsine closed form
    double worst_closed = 0.0;
    for (double r : rs) {
        worst_closed = std::max(worst_closed,
                                std::abs(bivariate_upper_orthant(0.0, 0.0, r) -
                                         orthant_zero_closed_form(r)));
    }
    const bool closed_ok = worst_closed <= 1e-10;
    all_pass = all_pass && closed_ok;

    json results;
    results["checks"] = rows;
    results["orthant_closed_form_deviation"] = worst_closed;
    results["orthant_closed_form_pass"] = closed_ok;
    results["all_pass"] = all_pass;
    emit(ctx, make_meta(ctx), results);
    return all_pass ? kExitOk : kExitCheckFailure;
}

json config_schema() {
    json s;
    s["model"] = {{"beta", 0.5}, {"betas", {0.2, 0.5, 0.8}}};
    s["grid"] = {{"tau_values", {1.0}},
                 {"lambda_values", {1.0}},
                 {"band", {{"s_lo", 0.0}, {"s_hi", "omit for +infinity"}}}};
    s["scales"] = {{"q", 2.0}, {"n_min", 3}, {"n_max", 12}};
    s["experiment"] = {{"seed", "required for sample/lil/propagate"},
                       {"n_reps", 200},
                       {"max_jitter", 1e-6},
                       {"tau", 1.0},
                       {"lambda", 1.0},
                       {"tau0", 1.0},
                       {"n_runs", 1},
                       {"grid_pow", 12},
                       {"depth", 8},
                       {"min_depth", 6},
                       {"threshold_mult", 1.5},
                       {"taus", {1.0, 1.5, 2.0}},
                       {"n_controls", 3},
                       {"stat_levels", 2},
                       {"zero_u1", false},
                       {"g1_values", {0.5, 1.0, 1.5, 2.0}},
                       {"g2_values", {0.5, 1.0, 1.5, 2.0}},
                       {"r_values", {0.15, 0.3, 0.45, 0.6}},
                       {"fd_tol", 1e-5},
                       {"residual_tol", 1e-9}};
    s["output"] = {{"csv", "samples.csv"}, {"binary", "optional .bin path"}};
    return s;
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{
        "Numerical laboratory for the 1-D stochastic wave equation driven by\n"
        "Riesz-kernel colored noise: exact covariance calculus, exact Gaussian\n"
        "sampling, LIL statistics, and the singularity-propagation experiment.\n"
        "Config: one JSON document with sections {model, grid, scales,\n"
        "experiment, output}; see --emit-schema for every key and default."};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir, schema_path;
    std::uint64_t seed_flag = 0;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--emit-schema", schema_path,
                   "Write a JSON file documenting all config keys and defaults, then exit");

    Context ctx;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Path to the JSON config document");
        sub->add_option("--out", out_dir, "Output directory for JSON/CSV results");
        sub->add_option("--seed", seed_flag, "64-bit seed (overrides config)");
        sub->add_option("--threads", threads, "Worker pool size (default: hardware cores)");
    };
    auto* selftest = app.add_subcommand(
        "selftest", "Closed-form vs oracle suite across config.model.betas");
    auto* sample_cmd = app.add_subcommand(
        "sample", "Exact field samples on a (tau, lambda) grid, CSV/binary export");
    auto* lil = app.add_subcommand(
        "lil", "LIL constant estimate at a point vs K_beta");
    auto* propagate = app.add_subcommand(
        "propagate", "Singularity-propagation experiment (locate at tau0, test at tau >= tau0)");
    auto* slepian = app.add_subcommand(
        "slepian", "Bivariate orthant and Slepian mean-value identity checks");
    for (auto* sub : {selftest, sample_cmd, lil, propagate, slepian}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    if (!schema_path.empty()) {
        std::ofstream os(schema_path);
        os << config_schema().dump(2) << '\n';
        std::cout << "wrote " << schema_path << '\n';
        return kExitOk;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return kExitConfigError;
    }

    try {
        ctx.config = json::object();
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw ConfigError("cannot open config file: " + config_path);
            ctx.config = json::parse(is);
            if (!ctx.config.is_object()) {
                throw ConfigError("config must be a JSON object");
            }
        }
        if (!out_dir.empty()) ctx.out_dir = out_dir;
        ctx.threads = threads;
        if (ctx.config.contains("experiment") &&
            ctx.config["experiment"].contains("seed")) {
            ctx.seed = ctx.config["experiment"]["seed"].get<std::uint64_t>();
            ctx.has_seed = true;
        }
        for (auto* sub : {selftest, sample_cmd, lil, propagate, slepian}) {
            if (sub->parsed() && sub->count("--seed") > 0) {
                ctx.seed = seed_flag;
                ctx.has_seed = true;
            }
        }

        if (selftest->parsed()) {
            ctx.command = "selftest";
            return cmd_selftest(ctx);
        }
        if (sample_cmd->parsed()) {
            ctx.command = "sample";
            return cmd_sample(ctx);
        }
        if (lil->parsed()) {
            ctx.command = "lil";
            return cmd_lil(ctx);
        }
        if (propagate->parsed()) {
            ctx.command = "propagate";
            return cmd_propagate(ctx);
        }
        if (slepian->parsed()) {
            ctx.command = "slepian";
            return cmd_slepian(ctx);
        }
        return kExitConfigError;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const ResolutionError& e) {
        std::cerr << "resolution error: " << e.what() << '\n';
        return kExitResolutionError;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return kExitResolutionError;
    } catch (const ConditioningError& e) {
        std::cerr << "conditioning error: " << e.what() << '\n';
        return kExitResolutionError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

} // namespace swelab
