#pragma once

// Monte Carlo harness: flat-file experiment configs, a deterministic
// replication runner, and frequency-table reports in CSV and JSON.
//
// Determinism: every replication draws from streams derived solely from
// (seed, replication index), and results land in a per-replication slot
// before aggregation in index order — so reports are byte-identical across
// thread counts and repeated invocations.  Wall time appears in the JSON
// report as "elapsed_seconds" but is excluded from the canonical byte
// representation used for comparisons.

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "errors.hpp"
#include "factor.hpp"
#include "generators.hpp"
#include "methods.hpp"
#include "sdr.hpp"
#include "version.hpp"

namespace specdim {

struct ExperimentConfig {
    std::string example;                    // ex1 | ex2 | ex3 | ex4 | ex5
    std::string estimator;                  // sir | dee | factor
    long n = 0;
    long p = 0;
    int H = 10;
    std::vector<method_tag> methods{method_tag::tdrr, method_tag::rre, method_tag::re,
                                    method_tag::bic};
    std::string methods_text = "tdrr,rre,re,bic";
    long replications = 0;
    std::uint64_t seed = 42;
    CriteriaOverrides overrides;
    factor_cov cov = factor_cov::identity;  // ex5 only
    factor_dist dist = factor_dist::normal; // ex5 only
    std::string cov_text = "s1";
    std::string dist_text = "normal";
    double a_scale = -1.0;                  // ex3/ex4 drift override
    double a_exponent = -1.0;
};

namespace detail {

inline long parse_long(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        long out = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw input_error("config key '" + key + "': expected an integer, got '" + v + "'");
    }
}

inline double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw input_error("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

} // namespace detail

// Parse the flat key = value config format ('#' starts a comment).
// Recognized keys: example, estimator, n, p, H, methods, replications,
// seed, c1, c2, tau, alpha_n, d_max, rre_c, level, cov, factor_dist,
// a_scale, a_exponent.  Unknown keys are rejected by name.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    bool saw_example = false, saw_n = false, saw_p = false, saw_r = false, saw_estimator = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw input_error("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (val.empty())
            throw input_error("config key '" + key + "' has an empty value");

        if (key == "example") { cfg.example = val; saw_example = true; }
        else if (key == "estimator") { cfg.estimator = val; saw_estimator = true; }
        else if (key == "n") { cfg.n = detail::parse_long(val, key); saw_n = true; }
        else if (key == "p") { cfg.p = detail::parse_long(val, key); saw_p = true; }
        else if (key == "H") cfg.H = static_cast<int>(detail::parse_long(val, key));
        else if (key == "methods") { cfg.methods = parse_methods(val); cfg.methods_text = val; }
        else if (key == "replications") { cfg.replications = detail::parse_long(val, key); saw_r = true; }
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_long(val, key));
        else if (key == "c1") cfg.overrides.c1 = detail::parse_double(val, key);
        else if (key == "c2") cfg.overrides.c2 = detail::parse_double(val, key);
        else if (key == "tau") cfg.overrides.tau = detail::parse_double(val, key);
        else if (key == "alpha_n") cfg.overrides.alpha_n = detail::parse_double(val, key);
        else if (key == "d_max") cfg.overrides.d_max = static_cast<int>(detail::parse_long(val, key));
        else if (key == "rre_c") cfg.overrides.rre_c = detail::parse_double(val, key);
        else if (key == "level") cfg.overrides.level = detail::parse_double(val, key);
        else if (key == "cov") { cfg.cov = parse_factor_cov(val); cfg.cov_text = val; }
        else if (key == "factor_dist") { cfg.dist = parse_factor_dist(val); cfg.dist_text = val; }
        else if (key == "a_scale") cfg.a_scale = detail::parse_double(val, key);
        else if (key == "a_exponent") cfg.a_exponent = detail::parse_double(val, key);
        else throw input_error("unknown config key '" + key + "'");
    }

    if (!saw_example) throw input_error("config is missing required key 'example'");
    if (!saw_n) throw input_error("config is missing required key 'n'");
    if (!saw_p) throw input_error("config is missing required key 'p'");
    if (!saw_r) throw input_error("config is missing required key 'replications'");
    if (cfg.replications < 1) throw input_error("config key 'replications' must be at least 1");

    if (cfg.example == "ex5") {
        if (!saw_estimator) cfg.estimator = "factor";
        if (cfg.estimator != "factor")
            throw input_error("example ex5 requires estimator = factor");
        if (cfg.n < 4 || cfg.p < 4)
            throw input_error("example ex5 needs n >= 4 and p >= 4 (four common factors)");
    } else {
        parse_sdr_example(cfg.example); // validates the tag
        if (!saw_estimator)
            throw input_error("config is missing required key 'estimator' (sir or dee)");
        if (cfg.estimator != "sir" && cfg.estimator != "dee")
            throw input_error("estimator must be 'sir' or 'dee' for regression examples, got '" +
                              cfg.estimator + "'");
    }

    for (method_tag m : cfg.methods)
        if (m == method_tag::st && cfg.estimator != "sir")
            throw input_error("method 'st' requires estimator = sir");

    return cfg;
}

inline ExperimentConfig parse_experiment_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config file: " + path);
    return parse_experiment_config(in);
}

// ---------------------------------------------------------------------------
// Frequency report.

struct MethodFrequency {
    std::string method;
    std::map<int, long> counts; // estimated dimension -> replication count
    long errors = 0;            // replications that raised an estimator error
};

struct FrequencyReport {
    ExperimentConfig config;
    std::vector<MethodFrequency> rows; // one per configured method, in order
    long replications = 0;
    double elapsed_seconds = 0.0;
    std::string version = version_string;

    // Proportion of replications landing in a bucket.
    double proportion(const std::string& method, int q) const {
        for (const auto& row : rows)
            if (row.method == method) {
                auto it = row.counts.find(q);
                return it == row.counts.end()
                           ? 0.0
                           : static_cast<double>(it->second) / static_cast<double>(replications);
            }
        throw input_error("no such method in report: " + method);
    }
};

namespace detail {

// One replication; fills q_hats with per-method results (-1 = estimator
// error).  Estimator errors anywhere in the replication land in the error
// bucket; other exceptions propagate.
inline void run_one_replication(const ExperimentConfig& cfg, long rep,
                                std::vector<int>& q_hats) {
    q_hats.assign(cfg.methods.size(), -1);
    try {
        if (cfg.estimator == "factor") {
            FactorModelSpec spec;
            spec.n = cfg.n;
            spec.p = cfg.p;
            spec.dist = cfg.dist;
            spec.cov = cfg.cov;
            Eigen::MatrixXd panel =
                gen_factor(spec, cfg.seed, static_cast<std::uint64_t>(rep));
            EigenSpectrum spectrum = factor_spectrum(panel);
            for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
                try {
                    q_hats[m] =
                        run_factor_criteria(spectrum, {cfg.methods[m]}, cfg.overrides)
                            .front()
                            .q_hat;
                } catch (const estimator_error&) {
                }
            }
            return;
        }

        SdrModelSpec spec;
        spec.example = parse_sdr_example(cfg.example);
        spec.n = cfg.n;
        spec.p = cfg.p;
        spec.a_scale = cfg.a_scale;
        spec.a_exponent = cfg.a_exponent;
        SdrSample sample = gen_sdr(spec, cfg.seed, static_cast<std::uint64_t>(rep));

        SdrTarget target = cfg.estimator == "sir" ? sir_matrix(sample.x, sample.y, cfg.H)
                                                  : dee_sir_matrix(sample.x, sample.y);
        std::optional<int> h_for_st;
        if (cfg.estimator == "sir") h_for_st = cfg.H;
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            try {
                q_hats[m] = run_sdr_criteria(target.eig.spectrum, {cfg.methods[m]},
                                             cfg.overrides, h_for_st)
                                .front()
                                .q_hat;
            } catch (const estimator_error&) {
            }
        }
    } catch (const estimator_error&) {
        // generation or target construction failed: whole row stays -1
    }
}

} // namespace detail

// Run all replications.  Results are independent of `threads`.
inline FrequencyReport run_experiment(const ExperimentConfig& cfg, int threads = 1) {
    const auto t0 = std::chrono::steady_clock::now();
    const long R = cfg.replications;
    std::vector<std::vector<int>> slots(static_cast<std::size_t>(R));

    if (threads <= 1) {
        for (long r = 0; r < R; ++r)
            detail::run_one_replication(cfg, r, slots[static_cast<std::size_t>(r)]);
    } else {
        std::atomic<long> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (;;) {
                const long r = next.fetch_add(1);
                if (r >= R) return;
                try {
                    detail::run_one_replication(cfg, r, slots[static_cast<std::size_t>(r)]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    FrequencyReport report;
    report.config = cfg;
    report.replications = R;
    for (method_tag m : cfg.methods) report.rows.push_back({method_name(m), {}, 0});
    for (long r = 0; r < R; ++r) {
        const auto& row = slots[static_cast<std::size_t>(r)];
        for (std::size_t m = 0; m < row.size(); ++m) {
            if (row[m] < 0) ++report.rows[m].errors;
            else ++report.rows[m].counts[row[m]];
        }
    }
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// ---------------------------------------------------------------------------
// Serialization.

inline std::string report_to_csv(const FrequencyReport& rep) {
    std::string out = "method,q_hat,proportion,count\n";
    const double R = static_cast<double>(rep.replications);
    for (const auto& row : rep.rows) {
        for (const auto& [q, count] : row.counts) {
            out += row.method;
            out += ',';
            out += std::to_string(q);
            out += ',';
            out += format_double(static_cast<double>(count) / R);
            out += ',';
            out += std::to_string(count);
            out += '\n';
        }
        if (row.errors > 0) {
            out += row.method;
            out += ",error,";
            out += format_double(static_cast<double>(row.errors) / R);
            out += ',';
            out += std::to_string(row.errors);
            out += '\n';
        }
    }
    return out;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j{{"example", cfg.example}, {"estimator", cfg.estimator},
                     {"n", cfg.n},             {"p", cfg.p},
                     {"methods", cfg.methods_text}, {"replications", cfg.replications},
                     {"seed", cfg.seed}};
    if (cfg.estimator == "sir") j["H"] = cfg.H;
    if (cfg.example == "ex5") {
        j["cov"] = cfg.cov_text;
        j["factor_dist"] = cfg.dist_text;
    }
    if (cfg.a_scale >= 0) j["a_scale"] = cfg.a_scale;
    if (cfg.a_exponent >= 0) j["a_exponent"] = cfg.a_exponent;
    const CriteriaOverrides& ov = cfg.overrides;
    if (ov.c1 > 0) j["c1"] = ov.c1;
    if (ov.c2 > 0) j["c2"] = ov.c2;
    if (ov.tau > 0) j["tau"] = ov.tau;
    if (ov.alpha_n > 0) j["alpha_n"] = ov.alpha_n;
    if (ov.rre_c > 0) j["rre_c"] = ov.rre_c;
    if (ov.d_max > 0) j["d_max"] = ov.d_max;
    if (ov.level != 0.05) j["level"] = ov.level;
    return j;
}

inline std::string report_to_json(const FrequencyReport& rep) {
    nlohmann::json results = nlohmann::json::object();
    const double R = static_cast<double>(rep.replications);
    for (const auto& row : rep.rows) {
        nlohmann::json counts = nlohmann::json::object();
        nlohmann::json proportions = nlohmann::json::object();
        for (const auto& [q, count] : row.counts) {
            counts[std::to_string(q)] = count;
            proportions[std::to_string(q)] = static_cast<double>(count) / R;
        }
        if (row.errors > 0) {
            counts["error"] = row.errors;
            proportions["error"] = static_cast<double>(row.errors) / R;
        }
        results[row.method] = {{"counts", counts}, {"proportions", proportions}};
    }
    nlohmann::json j{{"schema", 1},
                     {"version", rep.version},
                     {"config", config_to_json(rep.config)},
                     {"replications", rep.replications},
                     {"elapsed_seconds", rep.elapsed_seconds},
                     {"results", results}};
    return j.dump(2) + "\n";
}

// The canonical byte representation of a JSON report: everything except the
// wall-time field.
inline std::string canonical_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    j.erase("elapsed_seconds");
    return j.dump(2) + "\n";
}

// Reconstruct the data content of a report from its JSON text (config echo,
// counts, errors); used to verify lossless round-trips.
struct ParsedReport {
    nlohmann::json config;
    long replications = 0;
    std::map<std::string, std::map<std::string, long>> counts;
};

inline ParsedReport report_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    if (!j.contains("schema") || j["schema"].get<int>() != 1)
        throw input_error("report JSON: unsupported schema");
    ParsedReport out;
    out.config = j.at("config");
    out.replications = j.at("replications").get<long>();
    for (const auto& [method, entry] : j.at("results").items())
        for (const auto& [q, count] : entry.at("counts").items())
            out.counts[method][q] = count.get<long>();
    return out;
}

} // namespace specdim
