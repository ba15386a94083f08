#pragma once

// Experiment runner: builds (environment, policy) pairs from a flat key/value
// config, runs seeded repetitions, samples cumulative regret at checkpoints
// and aggregates mean / sample variance across runs.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mdb/baim_lucb.hpp"
#include "mdb/core_model.hpp"
#include "mdb/environment.hpp"
#include "mdb/errors.hpp"
#include "mdb/policies.hpp"
#include "mdb/sbm_ucb.hpp"

namespace mdb {

/// Default output directory for `simulate` when --out is not given.
inline constexpr const char* kOutputDirEnv = "MDB_OUTPUT_DIR";

struct InstanceSpec {
    enum class Kind { Synthetic, MatrixFile };
    Kind kind = Kind::Synthetic;
    std::size_t K = 8;
    LinkKind link = LinkKind::Linear;
    std::string matrix_path;
    std::optional<ArmId> declared_best;
};

struct PolicySpec {
    std::string name;
    std::optional<double> alpha;
    std::size_t m = 2;
    double a = 10.0;
    double b = 1.1;
    /// Fixed BAIM confidence; unset means 1 / tau_{i+1} per epoch.
    std::optional<double> baim_confidence;
    std::optional<bool> additional_feedback;
};

struct ExperimentConfig {
    InstanceSpec instance;
    PolicySpec policy;
    std::uint64_t horizon = 10000;
    std::size_t runs = 1;
    std::uint64_t base_seed = 0;
    std::string checkpoint_spec = "log:50";
    std::size_t threads = 1;
};

struct RegretTrace {
    std::size_t run_id = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> t;
    std::vector<double> cumulative_regret;
};

struct AggregateReport {
    std::size_t runs = 0;
    std::vector<std::uint64_t> t;
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<std::string> warnings;
};

struct ExperimentResult {
    std::string policy;
    std::vector<RegretTrace> traces;
    AggregateReport report;
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
};

inline constexpr std::string_view kPolicyNames[] = {"doubler_bai", "multisbm_feedback", "multisbm",
                                                     "multirucb", "uniform_random"};

inline bool is_two_dueling(std::string_view policy) {
    return policy == "doubler_bai" || policy == "multisbm_feedback" || policy == "multisbm";
}

// ---------------------------------------------------------------------------
// Checkpoints

/// `count` distinct, roughly log-spaced integers in [1, T], always including 1 and T.
inline std::vector<std::uint64_t> log_checkpoints(std::size_t count, std::uint64_t T) {
    if (count == 0) throw ConfigError("checkpoint count must be positive");
    if (count > T) throw ConfigError("more checkpoints requested than time steps");
    if (count == 1) return {T};
    std::vector<std::uint64_t> out;
    out.reserve(count);
    const double log_T = std::log(static_cast<double>(T));
    for (std::size_t k = 0; k < count; ++k) {
        const double x = std::exp(log_T * static_cast<double>(k) / static_cast<double>(count - 1));
        auto v = static_cast<std::uint64_t>(std::llround(x));
        const std::uint64_t lo = out.empty() ? 1 : out.back() + 1;
        const std::uint64_t hi = T - (count - 1 - k);
        out.push_back(std::clamp(v, lo, hi));
    }
    return out;
}

inline std::vector<std::uint64_t> parse_checkpoints(std::string_view spec, std::uint64_t T) {
    auto parse_uint = [](std::string_view s) -> std::uint64_t {
        std::uint64_t v = 0;
        const auto* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc{} || ptr != end) {
            throw ConfigError("checkpoints: '" + std::string(s) + "' is not a positive integer");
        }
        return v;
    };
    if (spec.rfind("log:", 0) == 0) return log_checkpoints(parse_uint(spec.substr(4)), T);

    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const auto comma = spec.find(',', pos);
        auto item = spec.substr(pos, comma == std::string_view::npos ? spec.npos : comma - pos);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        out.push_back(parse_uint(item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] < 1 || out[i] > T) throw ConfigError("checkpoints must lie in [1, horizon]");
        if (i > 0 && out[i] <= out[i - 1]) {
            throw ConfigError("checkpoints must be strictly increasing");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config file

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double to_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(x)) {
        throw ConfigError(key + ": '" + v + "' is not a number");
    }
    return x;
}

inline std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
    }
    return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError(key + ": '" + v + "' is not a boolean");
}

}  // namespace detail

/// Parses `key = value` lines; `#` starts a comment line.
///
/// Keys: instance (synthetic|matrix), K, link, matrix, declared_best (1-based),
/// policy, alpha (number|auto), m, a, b, baim_delta (epoch|number),
/// additional_feedback, horizon, runs, seed, checkpoints (log:N | t1,t2,...), threads.
inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    bool have_policy = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = detail::trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        const std::string value = detail::trim(std::string_view(body).substr(eq + 1));

        if (key == "instance") {
            if (value == "synthetic") {
                cfg.instance.kind = InstanceSpec::Kind::Synthetic;
            } else if (value == "matrix") {
                cfg.instance.kind = InstanceSpec::Kind::MatrixFile;
            } else {
                throw ConfigError("instance: expected 'synthetic' or 'matrix'");
            }
        } else if (key == "K") {
            cfg.instance.K = detail::to_uint(key, value);
        } else if (key == "link") {
            auto link = parse_link(value);
            if (!link) throw ConfigError("link: expected linear, natural or logit");
            cfg.instance.link = *link;
        } else if (key == "matrix") {
            cfg.instance.matrix_path = value;
            cfg.instance.kind = InstanceSpec::Kind::MatrixFile;
        } else if (key == "declared_best") {
            const auto v = detail::to_uint(key, value);
            if (v < 1) throw ConfigError("declared_best is 1-based");
            cfg.instance.declared_best = v - 1;
        } else if (key == "policy") {
            cfg.policy.name = value;
            have_policy = true;
        } else if (key == "alpha") {
            if (value == "auto") {
                cfg.policy.alpha.reset();
            } else {
                cfg.policy.alpha = detail::to_real(key, value);
            }
        } else if (key == "m") {
            cfg.policy.m = detail::to_uint(key, value);
        } else if (key == "a") {
            cfg.policy.a = detail::to_real(key, value);
        } else if (key == "b") {
            cfg.policy.b = detail::to_real(key, value);
        } else if (key == "baim_delta") {
            if (value == "epoch") {
                cfg.policy.baim_confidence.reset();
            } else {
                cfg.policy.baim_confidence = detail::to_real(key, value);
            }
        } else if (key == "additional_feedback") {
            cfg.policy.additional_feedback = detail::to_bool(key, value);
        } else if (key == "horizon") {
            cfg.horizon = detail::to_uint(key, value);
        } else if (key == "runs") {
            cfg.runs = detail::to_uint(key, value);
        } else if (key == "seed") {
            cfg.base_seed = detail::to_uint(key, value);
        } else if (key == "checkpoints") {
            cfg.checkpoint_spec = value;
        } else if (key == "threads") {
            cfg.threads = detail::to_uint(key, value);
        } else {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (!have_policy) throw ConfigError("config is missing 'policy'");
    return cfg;
}

/// Reads a config file; a relative matrix path is resolved against the file's directory.
inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    ExperimentConfig cfg = parse_config(in);
    if (cfg.instance.kind == InstanceSpec::Kind::MatrixFile && !cfg.instance.matrix_path.empty()) {
        std::filesystem::path p(cfg.instance.matrix_path);
        if (p.is_relative()) {
            cfg.instance.matrix_path = (std::filesystem::path(path).parent_path() / p).string();
        }
    }
    return cfg;
}

inline PreferenceMatrix build_instance(const InstanceSpec& spec) {
    if (spec.kind == InstanceSpec::Kind::Synthetic) {
        if (spec.K < 3) throw ConfigError("synthetic instance needs K >= 3");
        return build_preference_matrix(synthetic_utilities(spec.K), spec.link);
    }
    if (spec.matrix_path.empty()) throw ConfigError("matrix instance needs a 'matrix' path");
    return load_matrix(spec.matrix_path, spec.declared_best);
}

/// alpha actually used by the policy (explicit value or the per-policy default).
inline double effective_alpha(const ExperimentConfig& cfg, std::size_t K) {
    if (cfg.policy.alpha) return *cfg.policy.alpha;
    const auto& name = cfg.policy.name;
    if (name == "multirucb") return 1.01;
    if (name == "multisbm_feedback" || name == "multisbm") {
        return cfg.horizon >= 16 ? recommended_alpha(K, cfg.horizon) : 3.0;
    }
    return 0.0;
}

/// Checks the config against an instance of K arms; returns non-fatal warnings.
inline std::vector<std::string> validate_config(const ExperimentConfig& cfg, std::size_t K) {
    std::vector<std::string> warnings;
    const auto& name = cfg.policy.name;
    static constexpr std::string_view excluded[] = {
        "doubler", "sparring", "multisparring", "mdb", "indselfsparring",
        "if", "btm", "savage", "scb"};
    if (std::find(std::begin(excluded), std::end(excluded), name) != std::end(excluded)) {
        throw ConfigError("policy '" + name +
                          "' is a third-party baseline that is not implemented; available: "
                          "doubler_bai, multisbm_feedback, multisbm, multirucb, uniform_random");
    }
    if (std::find(std::begin(kPolicyNames), std::end(kPolicyNames), name) == std::end(kPolicyNames)) {
        throw ConfigError("unknown policy '" + name + "'");
    }
    if (cfg.horizon < 1) throw ConfigError("horizon must be at least 1");
    if (cfg.runs < 1) throw ConfigError("runs must be at least 1");
    if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
    if (cfg.policy.m < 2 || cfg.policy.m > K) {
        throw ConfigError("m = " + std::to_string(cfg.policy.m) + " must satisfy 2 <= m <= K = " +
                          std::to_string(K));
    }
    parse_checkpoints(cfg.checkpoint_spec, cfg.horizon);

    const double alpha = effective_alpha(cfg, K);
    if (name == "multirucb") {
        if (!(alpha > 0.5)) throw ConfigError("multirucb: alpha must exceed 1/2");
        if (alpha <= 1.0) warnings.push_back("multirucb: alpha <= 1 is outside the regret guarantee (alpha > 1)");
    }
    if (name == "multisbm_feedback" || name == "multisbm") {
        if (!(alpha > 0.0)) throw ConfigError(name + ": alpha must be positive");
    }
    if (name == "doubler_bai") {
        try {
            EpochSchedule(cfg.policy.a, cfg.policy.b).validate_until(cfg.horizon);
        } catch (const ArgumentError& e) {
            throw ConfigError(e.what());
        }
        if (cfg.policy.baim_confidence) {
            const double d = *cfg.policy.baim_confidence;
            if (!(d > 0.0 && d <= 1.0)) throw ConfigError("baim_delta must be in (0,1]");
        }
    }
    return warnings;
}

inline std::unique_ptr<Policy> make_policy(const ExperimentConfig& cfg, std::size_t K) {
    const auto& p = cfg.policy;
    const double alpha = effective_alpha(cfg, K);
    if (p.name == "doubler_bai") {
        return std::make_unique<DoublerBai<LucbMachine>>(K, EpochSchedule(p.a, p.b), LucbMachine(K),
                                                         p.baim_confidence);
    }
    if (p.name == "multisbm_feedback") {
        return std::make_unique<MultiSbmFeedback>(K, alpha, p.additional_feedback.value_or(true));
    }
    if (p.name == "multisbm") {
        return std::make_unique<MultiSbmFeedback>(K, alpha, p.additional_feedback.value_or(false));
    }
    if (p.name == "multirucb") return std::make_unique<MultiRucb>(K, p.m, alpha);
    if (p.name == "uniform_random") return std::make_unique<UniformRandom>(K, p.m);
    throw ConfigError("unknown policy '" + p.name + "'");
}

// ---------------------------------------------------------------------------
// Running

inline RegretTrace run_single(const ExperimentConfig& cfg, const PreferenceMatrix& P,
                              const std::vector<std::uint64_t>& checkpoints, std::size_t run_id) {
    RegretTrace trace;
    trace.run_id = run_id;
    trace.seed = cfg.base_seed + run_id;
    trace.t.reserve(checkpoints.size());
    trace.cumulative_regret.reserve(checkpoints.size());

    Environment env(P, cfg.policy.m, trace.seed);
    auto policy = make_policy(cfg, P.size());
    std::size_t next = 0;
    for (std::uint64_t t = 1; t <= cfg.horizon && next < checkpoints.size(); ++t) {
        const ComparisonSet A = policy->select(t, env.rng());
        const auto outcomes = env.step(A);
        policy->observe(outcomes);
        if (t == checkpoints[next]) {
            trace.t.push_back(t);
            trace.cumulative_regret.push_back(env.cumulative_regret());
            ++next;
        }
    }
    return trace;
}

inline AggregateReport aggregate(const std::vector<RegretTrace>& traces) {
    if (traces.empty()) throw ContractViolation("aggregate: no traces");
    AggregateReport r;
    r.runs = traces.size();
    r.t = traces.front().t;
    for (const auto& tr : traces) {
        if (tr.t != r.t || tr.cumulative_regret.size() != r.t.size()) {
            throw ContractViolation("aggregate: traces have different checkpoints");
        }
    }
    const double n = static_cast<double>(traces.size());
    r.mean.assign(r.t.size(), 0.0);
    r.variance.assign(r.t.size(), 0.0);
    for (std::size_t k = 0; k < r.t.size(); ++k) {
        double sum = 0.0;
        for (const auto& tr : traces) sum += tr.cumulative_regret[k];
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& tr : traces) {
            const double d = tr.cumulative_regret[k] - mean;
            ss += d * d;
        }
        r.mean[k] = mean;
        r.variance[k] = traces.size() > 1 ? ss / (n - 1.0) : 0.0;
    }
    if (traces.size() == 1) r.warnings.push_back("single trace: variance reported as 0");
    return r;
}

/// Runs every repetition (seed = base_seed + run_id) and aggregates. Runs are
/// distributed over `threads` workers; results do not depend on the thread count.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const PreferenceMatrix& P) {
    ExperimentResult result;
    result.warnings = validate_config(cfg, P.size());
    const auto checkpoints = parse_checkpoints(cfg.checkpoint_spec, cfg.horizon);
    result.policy = std::string(make_policy(cfg, P.size())->name());

    const auto start = std::chrono::steady_clock::now();
    result.traces.resize(cfg.runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= cfg.runs) return;
            try {
                result.traces[r] = run_single(cfg, P, checkpoints, r);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min(cfg.threads, cfg.runs);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    result.report = aggregate(result.traces);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    PreferenceMatrix P = build_instance(cfg.instance);
    return run_experiment(cfg, P);
}

// ---------------------------------------------------------------------------
// Output

/// Shortest round-trip decimal form.
inline std::string format_real(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

/// Rows: policy,run_id,seed,t,cumulative_regret
inline void write_traces_csv(std::ostream& out, const ExperimentResult& res) {
    out << "policy,run_id,seed,t,cumulative_regret\n";
    for (const auto& tr : res.traces) {
        for (std::size_t k = 0; k < tr.t.size(); ++k) {
            out << res.policy << ',' << tr.run_id << ',' << tr.seed << ',' << tr.t[k] << ','
                << format_real(tr.cumulative_regret[k]) << '\n';
        }
    }
}

/// Rows: policy,t,mean_regret,variance
inline void write_summary_csv(std::ostream& out, const ExperimentResult& res) {
    out << "policy,t,mean_regret,variance\n";
    const auto& r = res.report;
    for (std::size_t k = 0; k < r.t.size(); ++k) {
        out << res.policy << ',' << r.t[k] << ',' << format_real(r.mean[k]) << ','
            << format_real(r.variance[k]) << '\n';
    }
}

}  // namespace mdb
