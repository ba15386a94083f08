#pragma once

// Command-line front end: simulate / bound / validate.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 matrix validation failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mdb/bounds.hpp"
#include "mdb/core_model.hpp"
#include "mdb/environment.hpp"
#include "mdb/errors.hpp"
#include "mdb/harness.hpp"

namespace mdb {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitValidation = 2;

/// Instance strings for `bound`: "synthetic:K[:link]" or "file:PATH".
inline InstanceSpec parse_instance_spec(const std::string& spec) {
    InstanceSpec out;
    if (spec.rfind("synthetic:", 0) == 0) {
        std::string rest = spec.substr(10);
        const auto colon = rest.find(':');
        const std::string k_str = rest.substr(0, colon);
        out.K = detail::to_uint("instance K", k_str);
        if (colon != std::string::npos) {
            auto link = parse_link(rest.substr(colon + 1));
            if (!link) throw ConfigError("instance: unknown link '" + rest.substr(colon + 1) + "'");
            out.link = *link;
        }
        return out;
    }
    if (spec.rfind("file:", 0) == 0) {
        out.kind = InstanceSpec::Kind::MatrixFile;
        out.matrix_path = spec.substr(5);
        return out;
    }
    throw ConfigError("instance: expected 'synthetic:K[:link]' or 'file:PATH'");
}

namespace detail {

inline nlohmann::json config_echo(const ExperimentConfig& cfg, std::size_t K) {
    nlohmann::json j;
    j["instance"] = cfg.instance.kind == InstanceSpec::Kind::Synthetic ? "synthetic" : "matrix";
    j["K"] = K;
    if (cfg.instance.kind == InstanceSpec::Kind::Synthetic) {
        j["link"] = std::string(to_string(cfg.instance.link));
    } else {
        j["matrix"] = cfg.instance.matrix_path;
    }
    j["policy"] = cfg.policy.name;
    j["alpha"] = effective_alpha(cfg, K);
    j["m"] = cfg.policy.m;
    if (cfg.policy.name == "doubler_bai") {
        j["a"] = cfg.policy.a;
        j["b"] = cfg.policy.b;
        j["baim_delta"] = cfg.policy.baim_confidence ? nlohmann::json(*cfg.policy.baim_confidence)
                                                     : nlohmann::json("epoch");
    }
    j["horizon"] = cfg.horizon;
    j["runs"] = cfg.runs;
    j["seed"] = cfg.base_seed;
    j["checkpoints"] = cfg.checkpoint_spec;
    return j;
}

inline int simulate(const std::string& config_path, std::optional<std::string> out_dir,
                    std::optional<std::size_t> threads, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg = load_config(config_path);
    if (threads) cfg.threads = *threads;
    const PreferenceMatrix P = build_instance(cfg.instance);
    validate_config(cfg, P.size());

    std::string dir;
    if (out_dir) {
        dir = *out_dir;
    } else if (const char* env = std::getenv(kOutputDirEnv)) {
        dir = env;
    } else {
        dir = "results";
    }
    std::filesystem::create_directories(dir);

    const ExperimentResult res = run_experiment(cfg, P);
    for (const auto& w : res.warnings) err << "warning: " << w << '\n';
    for (const auto& w : res.report.warnings) err << "warning: " << w << '\n';

    const std::filesystem::path base(dir);
    {
        std::ofstream f(base / "traces.csv", std::ios::binary);
        write_traces_csv(f, res);
    }
    {
        std::ofstream f(base / "summary.csv", std::ios::binary);
        write_summary_csv(f, res);
    }
    {
        nlohmann::json meta;
        meta["config"] = config_echo(cfg, P.size());
        meta["best_arm"] = P.best_arm() + 1;
        meta["wall_seconds"] = res.wall_seconds;
        meta["threads"] = cfg.threads;
        std::ofstream f(base / "metadata.json", std::ios::binary);
        f << meta.dump(2) << '\n';
    }
    const auto& r = res.report;
    out << res.policy << ": mean cumulative regret at t=" << r.t.back() << " is "
        << format_real(r.mean.back()) << " (variance " << format_real(r.variance.back())
        << ", " << r.runs << " runs)\n";
    out << "wrote " << (base / "traces.csv").string() << " and " << (base / "summary.csv").string()
        << '\n';
    return kExitOk;
}

struct BoundArgs {
    std::string policy;
    std::string instance;
    std::optional<double> alpha;
    std::size_t m = 2;
    double horizon = 1e6;
    std::optional<double> delta;
};

inline int bound(const BoundArgs& args, std::ostream& out) {
    const PreferenceMatrix P = build_instance(parse_instance_spec(args.instance));
    const GapTable g(P);
    const std::size_t K = P.size();
    out << "K = " << K << '\n';
    out << "best_arm = " << P.best_arm() + 1 << '\n';
    out << "delta_max = " << format_real(g.delta_max()) << '\n';
    out << "H = " << format_real(complexity_H(g)) << '\n';

    if (args.policy == "doubler_bai") {
        out << "# regret bound is asymptotic (unspecified constants); only H is reported\n";
    } else if (args.policy == "multisbm_feedback" || args.policy == "multisbm") {
        const double alpha =
            args.alpha ? *args.alpha
                       : recommended_alpha(K, static_cast<std::uint64_t>(args.horizon));
        out << "alpha = " << format_real(alpha) << '\n';
        out << "leading_bound = "
            << format_real(multisbm_feedback_leading_bound(g, alpha, args.horizon)) << '\n';
        out << "# excludes the O(ln ln T) tail\n";
    } else if (args.policy == "multirucb") {
        const double alpha = args.alpha.value_or(1.01);
        if (args.m < 2 || args.m > K) throw ConfigError("m must satisfy 2 <= m <= K");
        const InstanceComplexity c = instance_complexity(g, alpha, args.m);
        out << "alpha = " << format_real(alpha) << '\n';
        out << "m = " << args.m << '\n';
        out << "C_m2 = " << c.C_m2 << '\n';
        out << "D = " << format_real(c.D) << '\n';
        out << "bound = " << format_real(multirucb_bound(g, alpha, args.m, args.horizon)) << '\n';
        if (args.delta) {
            const double C = confidence_horizon_C(*args.delta, alpha, K);
            out << "C_delta = " << format_real(C) << '\n';
            out << "t_hat_bound = "
                << format_real(t_hat_bound(confidence_horizon_C(*args.delta / 2.0, alpha, K), c.D))
                << '\n';
        }
    } else if (args.policy != "uniform_random") {
        throw ConfigError("unknown policy '" + args.policy + "'");
    }
    return kExitOk;
}

inline int validate(const std::string& path, std::optional<std::size_t> declared_best,
                    std::ostream& out) {
    std::optional<ArmId> best;
    if (declared_best) {
        if (*declared_best < 1) throw ConfigError("--best is 1-based");
        best = *declared_best - 1;
    }
    const PreferenceMatrix P = load_matrix(path, best);
    out << "K = " << P.size() << '\n';
    if (P.is_condorcet_winner(P.best_arm())) {
        out << "Condorcet winner: arm " << P.best_arm() + 1 << '\n';
    } else {
        out << "no Condorcet winner; declared best: arm " << P.best_arm() + 1 << '\n';
    }
    return kExitOk;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-dueling bandit simulator"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Run a seeded experiment from a config file");
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> threads;
    sim->add_option("config", config_path, "Config file")->required();
    sim->add_option("--out", out_dir, "Output directory (default: $MDB_OUTPUT_DIR or ./results)");
    sim->add_option("--threads", threads, "Worker threads (overrides the config)");

    auto* bnd = app.add_subcommand("bound", "Print closed-form bound quantities");
    detail::BoundArgs bargs;
    bnd->add_option("--policy", bargs.policy, "Policy name")->required();
    bnd->add_option("--instance", bargs.instance, "synthetic:K[:link] or file:PATH")->required();
    bnd->add_option("--alpha", bargs.alpha, "Confidence parameter");
    bnd->add_option("--m", bargs.m, "Comparison set size");
    bnd->add_option("--horizon", bargs.horizon, "Horizon T");
    bnd->add_option("--delta", bargs.delta, "Confidence level for C(delta)");

    auto* val = app.add_subcommand("validate", "Check a preference-matrix file");
    std::string matrix_path;
    std::optional<std::size_t> declared_best;
    val->add_option("matrix", matrix_path, "Matrix file")->required();
    val->add_option("--best", declared_best, "Declared best arm (1-based) if no Condorcet winner");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("mdb");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        if (sim->parsed()) return detail::simulate(config_path, out_dir, threads, out, err);
        if (bnd->parsed()) return detail::bound(bargs, out);
        if (val->parsed()) return detail::validate(matrix_path, declared_best, out);
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace mdb
