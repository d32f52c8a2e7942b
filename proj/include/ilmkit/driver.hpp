#ifndef ILMKIT_DRIVER_HPP
#define ILMKIT_DRIVER_HPP

#include <algorithm>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "ilmkit/config.hpp"
#include "ilmkit/csv.hpp"
#include "ilmkit/diagnostics.hpp"
#include "ilmkit/fit.hpp"
#include "ilmkit/likelihood.hpp"
#include "ilmkit/model.hpp"
#include "ilmkit/predictive.hpp"

namespace ilm::cli {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_data = 3;
constexpr int exit_numeric = 4;
constexpr int exit_convergence = 5;

inline Framework framework_from(const std::string& name) {
    if (name == "si") return Framework::SI;
    if (name == "sir") return Framework::SIR;
    if (name == "seir") return Framework::SEIR;
    throw config_error("unknown framework '" + name + "' (expected si, sir, or seir)");
}

inline ModelSpec model_from_config(const Config& cfg) {
    ModelSpec model;
    model.framework = framework_from(cfg.get("model", "framework"));
    const std::string kernel = cfg.get("model", "kernel");
    const std::vector<double> cps = cfg.get_doubles_or("model", "change_points");
    const bool estimated = cfg.get_bool_or("model", "estimate_change_points", false);
    if (kernel == "powerlaw") {
        if (!cps.empty()) throw config_error("powerlaw kernel takes no change points");
        model.kernel = KernelSpec::power_law();
    } else if (kernel == "constant") {
        model.kernel = KernelSpec::piecewise_constant(cps, estimated);
    } else if (kernel == "linear") {
        model.kernel = KernelSpec::piecewise_linear(cps, estimated);
    } else {
        throw config_error("unknown kernel '" + kernel +
                           "' (expected powerlaw, constant, or linear)");
    }
    model.latent_period = static_cast<int>(cfg.get_long_or("model", "latent_period", 0));
    model.infectious_period = static_cast<int>(cfg.get_long_or("model", "infectious_period", 0));
    model.sparks_enabled = cfg.get_bool_or("model", "sparks", false);
    model.validate();
    return model;
}

inline PriorDensity prior_from_value(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    std::string kind;
    in >> kind;
    auto number = [&](const char* what) {
        double x;
        if (!(in >> x))
            throw config_error("prior for '" + key + "': missing " + what + " in '" + value + "'");
        return x;
    };
    if (kind == "halfnormal") return PriorDensity::positive_half_normal(number("variance"));
    if (kind == "neghalfnormal") return PriorDensity::negative_half_normal(number("variance"));
    if (kind == "uniform") {
        const double a = number("lower bound");
        return PriorDensity::uniform(a, number("upper bound"));
    }
    throw config_error("prior for '" + key + "': unknown form '" + kind +
                       "' (expected halfnormal, neghalfnormal, or uniform)");
}

// Priors for every free parameter. Unlisted parameters fall back to the vague
// defaults (estimated change points have none and must be listed). Keys that
// name no free parameter are rejected.
inline PriorSpec priors_from_config(const Config& cfg, const ParameterLayout& layout) {
    PriorSpec spec;
    const bool linear = layout.kernel().family == KernelFamily::PiecewiseLinear;
    for (const std::string& name : layout.names()) {
        if (cfg.has("priors", name)) {
            spec.marginals.push_back(prior_from_value(name, cfg.get("priors", name)));
        } else if (name.rfind("delta", 0) == 0) {
            throw config_error("estimated change point '" + name +
                               "' needs an explicit prior in [priors]");
        } else if (linear && name.rfind("beta", 0) == 0) {
            spec.marginals.push_back(PriorDensity::negative_half_normal(1e5));
        } else {
            spec.marginals.push_back(PriorDensity::positive_half_normal(1e5));
        }
    }
    for (const auto& [key, value] : cfg.section("priors")) {
        if (key == "smoothing") continue;
        const auto& names = layout.names();
        if (std::find(names.begin(), names.end(), key) == names.end())
            throw config_error("[priors] key '" + key + "' names no free parameter");
    }
    if (cfg.has("priors", "smoothing"))
        spec.smoothing_scales = cfg.get_doubles("priors", "smoothing");
    spec.validate(layout);
    return spec;
}

inline std::uint64_t seed_from_config(const Config& cfg) {
    return static_cast<std::uint64_t>(cfg.get_long_or("run", "seed", 0));
}

inline std::string out_dir_from_config(const Config& cfg) {
    const std::string out = cfg.get_or("run", "out", "");
    if (out.empty()) throw config_error("missing output directory: set [run] out or pass --out");
    std::filesystem::create_directories(out);
    return out;
}

inline void write_manifest(const std::string& path,
                           const std::vector<std::pair<std::string, std::string>>& entries) {
    std::string s;
    for (const auto& [k, v] : entries) s += k + " = " + v + "\n";
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    s += std::string("timestamp = ") + stamp + "\n";
    write_text_file(path, s);
}

// ---- data loading -----------------------------------------------------------

struct LoadedData {
    Population pop;
    EventHistory history;
    Window window;
};

inline LoadedData load_data(const Config& cfg, const ModelSpec& model) {
    LoadedData data{read_population(cfg.get("data", "population")), {}, {}};
    const std::string events_path = cfg.get("data", "events");
    data.history.framework = model.framework;
    data.history.events = read_events(events_path, data.pop.size());
    int max_event = 0;
    for (const IndividualEvents& e : data.history.events)
        for (const auto& t : {e.exposure, e.infectious, e.removal})
            if (t) max_event = std::max(max_event, *t);
    const int t_max = static_cast<int>(cfg.get_long_or("data", "t_max", max_event));
    const int t_min = static_cast<int>(cfg.get_long_or("data", "t_min", 0));
    data.history.horizon = std::max(t_max, max_event);
    try {
        validate_history(data.history);
    } catch (const input_error& e) {
        throw data_error(events_path + ": " + e.what());
    }
    if (model.kernel.family == KernelFamily::PowerLaw && data.pop.has_coincident_pair())
        throw data_error("population has coincident individuals; power-law kernel undefined");
    data.window = {t_min, t_max};
    return data;
}

// ---- subcommands ------------------------------------------------------------

inline int cmd_simulate(const Config& cfg) {
    const ModelSpec model = model_from_config(cfg);
    const ParameterLayout layout = model.layout();
    const Population pop = read_population(cfg.get("data", "population"));
    const std::vector<double> theta = cfg.get_doubles("simulate", "true_params");
    if (theta.size() != layout.size()) {
        std::string names;
        for (const std::string& n : layout.names()) names += (names.empty() ? "" : " ") + n;
        throw config_error("true_params needs " + std::to_string(layout.size()) +
                           " values, in order: " + names);
    }
    SimulationConfig sim;
    sim.horizon = static_cast<int>(cfg.get_long("simulate", "horizon"));
    sim.initial_count = static_cast<int>(cfg.get_long_or("simulate", "initial_count", 1));
    for (double id : cfg.get_doubles_or("simulate", "initial_infectives"))
        sim.initial_infectives.push_back(static_cast<std::size_t>(id));
    sim.min_epidemic_size = static_cast<int>(cfg.get_long_or("simulate", "min_size", 0));
    sim.max_attempts = static_cast<int>(cfg.get_long_or("simulate", "max_attempts", 1000));
    sim.rng_seed = seed_from_config(cfg);

    const EventHistory history = simulate(pop, model, theta, sim);
    const std::vector<int> curve = epidemic_curve(history);
    int total = 0;
    for (std::size_t i = 0; i < history.size(); ++i)
        if (history.events[i].ever_infected()) ++total;

    const std::string out = out_dir_from_config(cfg);
    write_events(out + "/events.csv", history);
    write_curve(out + "/curve.csv", curve);
    write_manifest(out + "/manifest.txt",
                   {{"command", "simulate"},
                    {"seed", std::to_string(sim.rng_seed)},
                    {"population", cfg.get("data", "population")},
                    {"n", std::to_string(pop.size())},
                    {"horizon", std::to_string(sim.horizon)},
                    {"ever_infected", std::to_string(total)}});
    std::cout << "simulated " << total << "/" << pop.size() << " ever infected over "
              << sim.horizon << " steps -> " << out << "\n";
    return exit_ok;
}

inline FitOptions fit_options_from_config(const Config& cfg) {
    FitOptions opt;
    opt.chains = static_cast<int>(cfg.get_long_or("mcmc", "chains", 3));
    opt.chain.iterations = cfg.get_long_or("mcmc", "iterations", 60000);
    opt.chain.burn_in = cfg.get_long_or("mcmc", "burn_in", 10000);
    opt.chain.thin = static_cast<int>(cfg.get_long_or("mcmc", "thin", 10));
    opt.pilot_iterations = cfg.get_long_or("mcmc", "pilot_iterations", 0);
    opt.pilot_burn_in = cfg.get_long_or("mcmc", "pilot_burn_in", opt.pilot_iterations / 2);
    const std::string pairs = cfg.get_or("mcmc", "pairs", "auto");
    if (pairs == "none")
        opt.allow_pairs = false;
    else if (pairs != "auto")
        throw config_error("[mcmc] pairs must be 'auto' or 'none'");
    opt.pair_threshold = cfg.get_double_or("mcmc", "pair_threshold", 0.5);
    opt.init = cfg.get_doubles_or("mcmc", "init");
    opt.master_seed = seed_from_config(cfg);
    return opt;
}

struct DiagnosticsTable {
    std::vector<ParameterSummary> summary;
    std::vector<double> worst_geweke;  // largest |z| across chains
    std::vector<double> psrf;          // empty with a single chain
    bool warning = false;
};

inline DiagnosticsTable diagnostics_over(const std::vector<DrawMatrix>& chains,
                                         const DrawMatrix& pooled) {
    DiagnosticsTable table;
    table.summary = summarize(pooled);
    table.worst_geweke.assign(table.summary.size(), 0.0);
    for (const DrawMatrix& c : chains) {
        const std::vector<double> z = geweke(c);
        for (std::size_t p = 0; p < z.size(); ++p)
            if (std::abs(z[p]) > std::abs(table.worst_geweke[p])) table.worst_geweke[p] = z[p];
    }
    if (chains.size() >= 2) table.psrf = gelman_rubin(chains);
    for (std::size_t p = 0; p < table.summary.size(); ++p) {
        if (!geweke_pass(table.worst_geweke[p])) table.warning = true;
        if (!table.psrf.empty() && !gelman_rubin_pass(table.psrf[p])) table.warning = true;
    }
    return table;
}

inline std::string diagnostics_csv(const std::vector<std::string>& names,
                                   const DiagnosticsTable& table) {
    std::string s = "param,mean,median,q025,q975,geweke_z,psrf\n";
    for (std::size_t p = 0; p < names.size(); ++p) {
        const ParameterSummary& ps = table.summary[p];
        s += names[p] + "," + format_double(ps.mean) + "," + format_double(ps.median) + "," +
             format_double(ps.q025) + "," + format_double(ps.q975) + "," +
             format_double(table.worst_geweke[p]) + ",";
        if (!table.psrf.empty()) s += format_double(table.psrf[p]);
        s += "\n";
    }
    return s;
}

inline int cmd_fit(const Config& cfg) {
    const ModelSpec model = model_from_config(cfg);
    const ParameterLayout layout = model.layout();
    const LoadedData data = load_data(cfg, model);
    const PriorSpec priors = priors_from_config(cfg, layout);
    const FitOptions opt = fit_options_from_config(cfg);
    if (opt.chain.iterations <= opt.chain.burn_in)
        throw config_error("iterations must exceed burn_in: nothing to summarize");

    const LikelihoodEvaluator lik(data.pop, data.history, model, data.window);
    const FitResult fit = fit_model(lik, priors, opt);

    const std::string out = out_dir_from_config(cfg);
    std::vector<DrawMatrix> matrices;
    for (std::size_t c = 0; c < fit.chains.size(); ++c) {
        write_draws(out + "/chain" + std::to_string(c + 1) + ".csv", layout.names(),
                    fit.chains[c]);
        matrices.push_back(fit.chains[c].draws);
    }
    const DrawMatrix pooled = pool_draws(fit.chains);
    std::vector<double> pooled_lp;
    for (const ChainOutput& c : fit.chains)
        pooled_lp.insert(pooled_lp.end(), c.log_post.begin(), c.log_post.end());

    const DiagnosticsTable table = diagnostics_over(matrices, pooled);
    const DicReport dic_report =
        dic(pooled, [&lik](const std::vector<double>& t) { return lik.log_likelihood(t); },
            [&](const std::vector<double>& t) { return log_prior(t, priors, layout) != neg_inf; },
            &pooled_lp);

    std::string summary_csv = diagnostics_csv(layout.names(), table);
    summary_csv += "DIC," + format_double(dic_report.dic) + "," +
                   format_double(dic_report.mean_deviance) + "," +
                   format_double(dic_report.deviance_at_mean) + "," +
                   format_double(dic_report.p_d) + "," +
                   (dic_report.plug_in_fallback ? "plug_in_fallback" : "plug_in_mean") + ",\n";
    write_text_file(out + "/summary.csv", summary_csv);
    write_text_file(out + "/model.ini", cfg.serialize());

    std::vector<std::pair<std::string, std::string>> manifest{
        {"command", "fit"},
        {"seed", std::to_string(opt.master_seed)},
        {"chains", std::to_string(fit.chains.size())},
        {"iterations", std::to_string(opt.chain.iterations)},
        {"burn_in", std::to_string(opt.chain.burn_in)},
        {"thin", std::to_string(opt.chain.thin)},
        {"kept_draws", std::to_string(pooled.size())}};
    for (std::size_t c = 0; c < fit.chains.size(); ++c) {
        manifest.emplace_back("chain" + std::to_string(c + 1) + "_seed",
                              std::to_string(fit.chains[c].seed));
        std::string acc;
        for (double a : fit.chains[c].acceptance)
            acc += (acc.empty() ? "" : " ") + format_double(a);
        manifest.emplace_back("chain" + std::to_string(c + 1) + "_acceptance", acc);
    }
    for (std::size_t k = 0; k < fit.pairs.size(); ++k)
        manifest.emplace_back(
            "pair_block",
            layout.names()[static_cast<std::size_t>(fit.pairs[k].first)] + ":" +
                layout.names()[static_cast<std::size_t>(fit.pairs[k].second)] +
                " corr=" + format_double(fit.pair_correlations[k]));
    write_manifest(out + "/manifest.txt", manifest);

    for (std::size_t p = 0; p < layout.size(); ++p) {
        std::cout << layout.names()[p] << ": mean " << table.summary[p].mean << ", 95% PI ["
                  << table.summary[p].q025 << ", " << table.summary[p].q975 << "], geweke "
                  << table.worst_geweke[p];
        if (!table.psrf.empty()) std::cout << ", psrf " << table.psrf[p];
        std::cout << "\n";
    }
    std::cout << "DIC " << dic_report.dic << " (p_D " << dic_report.p_d << ") -> " << out << "\n";
    if (table.warning) {
        std::cerr << "warning: convergence diagnostics failed for at least one parameter\n";
        return exit_convergence;
    }
    return exit_ok;
}

inline std::vector<DrawsFile> read_run_chains(const std::string& run_dir) {
    std::vector<DrawsFile> chains;
    for (int c = 1;; ++c) {
        const std::string path = run_dir + "/chain" + std::to_string(c) + ".csv";
        if (!std::filesystem::exists(path)) break;
        chains.push_back(read_draws(path));
    }
    if (chains.empty()) throw data_error("no chain1.csv found under " + run_dir);
    for (const DrawsFile& c : chains)
        if (c.names != chains[0].names) throw data_error(run_dir + ": chains disagree on parameters");
    return chains;
}

inline int cmd_dic(const Config& cfg, const std::vector<std::string>& run_dirs) {
    if (run_dirs.empty()) throw config_error("dic needs at least one fitted run directory");
    struct Row {
        std::string name;
        DicReport report;
    };
    std::vector<Row> rows;
    for (const std::string& dir : run_dirs) {
        const Config model_cfg = Config::load(dir + "/model.ini");
        const ModelSpec model = model_from_config(model_cfg);
        const ParameterLayout layout = model.layout();
        const LoadedData data = load_data(cfg, model);
        const PriorSpec priors = priors_from_config(model_cfg, layout);
        const LikelihoodEvaluator lik(data.pop, data.history, model, data.window);
        const std::vector<DrawsFile> chains = read_run_chains(dir);
        if (chains[0].names != layout.names())
            throw data_error(dir + ": chain parameters do not match the model in model.ini");
        DrawMatrix pooled;
        std::vector<double> pooled_lp;
        for (const DrawsFile& c : chains) {
            pooled.insert(pooled.end(), c.draws.begin(), c.draws.end());
            pooled_lp.insert(pooled_lp.end(), c.log_post.begin(), c.log_post.end());
        }
        const DicReport report =
            dic(pooled, [&lik](const std::vector<double>& t) { return lik.log_likelihood(t); },
                [&](const std::vector<double>& t) {
                    return log_prior(t, priors, layout) != neg_inf;
                },
                &pooled_lp);
        rows.push_back({std::filesystem::path(dir).filename().string(), report});
    }
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.report.dic < b.report.dic; });

    std::string s = "model,dic,mean_deviance,deviance_at_mean,p_d,plug_in\n";
    for (const Row& r : rows)
        s += r.name + "," + format_double(r.report.dic) + "," +
             format_double(r.report.mean_deviance) + "," +
             format_double(r.report.deviance_at_mean) + "," + format_double(r.report.p_d) + "," +
             (r.report.plug_in_fallback ? "fallback" : "mean") + "\n";
    const std::string out = out_dir_from_config(cfg);
    write_text_file(out + "/dic.csv", s);
    std::cout << s;
    return exit_ok;
}

inline int cmd_predict(const Config& cfg, const std::vector<std::string>& run_dirs) {
    if (run_dirs.size() != 1) throw config_error("predict needs exactly one fitted run directory");
    const std::string dir = run_dirs[0];
    const Config model_cfg = Config::load(dir + "/model.ini");
    const ModelSpec model = model_from_config(model_cfg);
    const ParameterLayout layout = model.layout();
    const LoadedData data = load_data(cfg, model);
    const std::vector<DrawsFile> chains = read_run_chains(dir);
    if (chains[0].names != layout.names())
        throw data_error(dir + ": chain parameters do not match the model in model.ini");
    DrawMatrix pooled;
    for (const DrawsFile& c : chains) pooled.insert(pooled.end(), c.draws.begin(), c.draws.end());

    SimulationConfig sim;
    sim.horizon = data.window.t_max;
    for (std::size_t i = 0; i < data.history.size(); ++i)
        if (data.history.entry_time(i) == 0) sim.initial_infectives.push_back(i);
    if (sim.initial_infectives.empty())
        throw data_error("no initial infectives at t=0 in the observed events");
    const int replicates = static_cast<int>(cfg.get_long_or("predict", "replicates", 500));
    const std::uint64_t seed = seed_from_config(cfg);

    const PredictiveEnvelope env = predict(pooled, data.pop, model, sim, replicates, seed);
    const EventHistory observed = temporal_subset(data.history, 0, data.window.t_max);
    const double cov = coverage(env, epidemic_curve(observed));

    const std::string out = out_dir_from_config(cfg);
    write_envelope(out + "/envelope.csv", env);
    write_text_file(out + "/coverage.txt", "coverage," + format_double(cov) + "\n");
    write_manifest(out + "/manifest.txt", {{"command", "predict"},
                                           {"seed", std::to_string(seed)},
                                           {"replicates", std::to_string(replicates)},
                                           {"run", dir}});
    std::cout << "coverage " << cov << " over " << env.median.size() << " time points -> " << out
              << "\n";
    return exit_ok;
}

inline int cmd_diagnose(const Config& cfg, const std::vector<std::string>& run_dirs) {
    if (run_dirs.size() != 1) throw config_error("diagnose needs exactly one fitted run directory");
    const std::vector<DrawsFile> chains = read_run_chains(run_dirs[0]);
    std::vector<DrawMatrix> matrices;
    DrawMatrix pooled;
    for (const DrawsFile& c : chains) {
        matrices.push_back(c.draws);
        pooled.insert(pooled.end(), c.draws.begin(), c.draws.end());
    }
    const DiagnosticsTable table = diagnostics_over(matrices, pooled);
    const std::string out = out_dir_from_config(cfg);
    write_text_file(out + "/diagnostics.csv", diagnostics_csv(chains[0].names, table));
    for (std::size_t p = 0; p < chains[0].names.size(); ++p) {
        std::cout << chains[0].names[p] << ": geweke " << table.worst_geweke[p];
        if (!table.psrf.empty()) std::cout << ", psrf " << table.psrf[p];
        std::cout << (geweke_pass(table.worst_geweke[p]) &&
                              (table.psrf.empty() || gelman_rubin_pass(table.psrf[p]))
                          ? " (ok)"
                          : " (warning)")
                  << "\n";
    }
    return table.warning ? exit_convergence : exit_ok;
}

// ---- entry point ------------------------------------------------------------

inline void print_usage(std::ostream& os) {
    os << "usage: ilmkit <simulate|fit|dic|predict|diagnose> <config.ini> [run_dir...]\n"
          "              [--seed N] [--out DIR]\n";
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (args.empty()) {
            print_usage(std::cerr);
            return exit_config;
        }
        const std::string command = args[0];
        std::string config_path;
        std::vector<std::string> run_dirs;
        std::string seed_override, out_override;
        for (std::size_t k = 1; k < args.size(); ++k) {
            if (args[k] == "--seed" || args[k] == "--out") {
                if (k + 1 >= args.size())
                    throw config_error(args[k] + " needs a value");
                (args[k] == "--seed" ? seed_override : out_override) = args[k + 1];
                ++k;
            } else if (config_path.empty()) {
                config_path = args[k];
            } else {
                run_dirs.push_back(args[k]);
            }
        }
        if (config_path.empty()) {
            print_usage(std::cerr);
            return exit_config;
        }
        Config cfg = Config::load(config_path);
        if (!seed_override.empty()) cfg.set("run", "seed", seed_override);
        if (!out_override.empty()) cfg.set("run", "out", out_override);

        if (command == "simulate") return cmd_simulate(cfg);
        if (command == "fit") return cmd_fit(cfg);
        if (command == "dic") return cmd_dic(cfg, run_dirs);
        if (command == "predict") return cmd_predict(cfg, run_dirs);
        if (command == "diagnose") return cmd_diagnose(cfg, run_dirs);
        std::cerr << "unknown command '" << command << "'\n";
        print_usage(std::cerr);
        return exit_config;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const input_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
}

}  // namespace ilm::cli

#endif
