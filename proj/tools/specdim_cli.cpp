// Command-line front end: dimension estimation from CSV data, factor-number
// estimation from panel CSVs, Monte Carlo experiments from config files, and
// kernel-regression fit diagnostics.
//
// Exit codes: 0 success, 2 input error (bad files, flags, configs),
// 3 numeric/estimator error.

#include <CLI11.hpp>

#include <specdim/csv.hpp>
#include <specdim/factor.hpp>
#include <specdim/harness.hpp>
#include <specdim/kernel_fit.hpp>
#include <specdim/sdr.hpp>
#include <specdim/version.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace specdim;

std::string join_values(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += format_double(v[i]);
    }
    return out;
}

// One trace block per method, in the pinned schema (method, round, index, value).
void append_trace(std::string& out, const DimensionEstimate& est) {
    auto emit = [&](const char* round, const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            out += est.method;
            out += ',';
            out += round;
            out += ',';
            out += std::to_string(i + 1);
            out += ',';
            out += format_double(values[i]);
            out += '\n';
        }
    };
    if (!est.shrunk.empty()) emit("shrunk", est.shrunk);
    emit("first", est.first_round);
    emit("second", est.second_round);
}

void write_trace(const std::string& path, const std::vector<DimensionEstimate>& ests) {
    std::string out = "method,round,index,value\n";
    for (const auto& e : ests) append_trace(out, e);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot write trace file: " + path);
    f << out;
}

void print_estimate(std::ostream& os, const DimensionEstimate& est, const char* label) {
    os << "method=" << est.method << ' ' << label << '=' << est.q_hat;
    if (est.no_qualifying) os << " (no index passed the threshold)";
    os << '\n';
    if (!est.shrunk.empty()) os << "  shrunk: " << join_values(est.shrunk) << '\n';
    if (!est.first_round.empty()) {
        os << (est.method == "TDRR" ? "  first: " : "  values: ")
           << join_values(est.first_round) << '\n';
    }
    if (!est.second_round.empty()) {
        os << (est.method == "ST" ? "  critical: " : "  second: ")
           << join_values(est.second_round) << '\n';
    }
    if (!est.qualifying.empty()) {
        os << "  qualifying:";
        for (int j : est.qualifying) os << ' ' << j;
        os << '\n';
    }
}

// Per-column location/scale standardization (mean 0, variance 1).  The
// spectra downstream are invariant to it; the flag exists so printed
// directions refer to standardized predictors.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out = x;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const double mean = out.col(j).mean();
        out.col(j).array() -= mean;
        const double sd = std::sqrt(out.col(j).squaredNorm() / static_cast<double>(out.rows()));
        if (sd == 0.0)
            throw degenerate_input_error("column " + std::to_string(j + 1) +
                                         " is constant; cannot standardize");
        out.col(j) /= sd;
    }
    return out;
}

struct CommonOverrideFlags {
    CriteriaOverrides ov;
    void attach(CLI::App* cmd) {
        cmd->add_option("--c1", ov.c1, "first-round ridge (default: sample-size rule)");
        cmd->add_option("--c2", ov.c2, "second-round ridge (default: sample-size rule)");
        cmd->add_option("--tau", ov.tau, "qualification threshold in (0,1), default 0.5");
        cmd->add_option("--alpha-n", ov.alpha_n, "penalty scale for the BIC-type criterion");
        cmd->add_option("--rre-c", ov.rre_c, "ridge for the ridged ratio criterion");
        cmd->add_option("--d-max", ov.d_max, "search bound for the plain ratio criterion");
        cmd->add_option("--level", ov.level, "sequential-test level, default 0.05");
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Model dimensionality from eigenvalue spectra: structural dimension "
                 "of regressions and the number of factors in approximate factor models."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("specdim ") + version_string);

    // ---- estimate-dim ------------------------------------------------------
    auto* dim = app.add_subcommand(
        "estimate-dim", "structural dimension of a regression from CSV data");
    std::string dim_input, dim_response, dim_estimator, dim_methods = "tdrr,rre,re,bic";
    std::string dim_trace;
    int dim_slices = 10;
    bool dim_standardize = false;
    CommonOverrideFlags dim_ov;
    dim->add_option("--input", dim_input, "CSV file with a header row")->required();
    dim->add_option("--response", dim_response, "name of the response column")->required();
    dim->add_option("--estimator", dim_estimator, "sir or dee")
        ->required()
        ->check(CLI::IsMember({"sir", "dee"}));
    dim->add_option("--slices", dim_slices, "slice count H for the sir estimator (default 10)");
    dim->add_option("--methods", dim_methods, "comma list from tdrr,rre,re,bic,st");
    dim->add_flag("--standardize", dim_standardize,
                  "rescale each predictor to mean 0, variance 1 first");
    dim->add_option("--emit-trace", dim_trace, "write the criterion traces to this CSV file");
    dim_ov.attach(dim);

    // ---- estimate-factors --------------------------------------------------
    auto* fac = app.add_subcommand(
        "estimate-factors", "number of common factors in a p x n panel CSV");
    std::string fac_input, fac_methods = "tdrr,rre,re,bic", fac_trace;
    bool fac_demean = false;
    int fac_k = 30;
    CommonOverrideFlags fac_ov;
    fac->add_option("--input", fac_input,
                    "CSV file: header row, then one row per variable, one column per observation")
        ->required();
    fac->add_flag("--demean", fac_demean, "center each variable across observations first");
    fac->add_option("--methods", fac_methods, "comma list from tdrr,rre,re,bic");
    fac->add_option("--eigenvalues", fac_k, "how many leading eigenvalues to print (default 30)");
    fac->add_option("--emit-trace", fac_trace, "write the criterion traces to this CSV file");
    fac_ov.attach(fac);

    // ---- simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo experiment from a config file");
    std::string sim_config, sim_out;
    int sim_threads = 1;
    sim->add_option("--config", sim_config, "flat key = value experiment config")->required();
    sim->add_option("--out", sim_out, "output prefix; writes PREFIX.csv and PREFIX.json")
        ->required();
    sim->add_option("--threads", sim_threads, "worker threads (results are identical for any count)");

    // ---- fit-rss -----------------------------------------------------------
    auto* fit = app.add_subcommand(
        "fit-rss", "kernel-regression residual diagnostics on the leading directions");
    std::string fit_input, fit_response, fit_estimator = "dee";
    int fit_q = 0, fit_slices = 10;
    double fit_bandwidth = -1.0;
    bool fit_grid = false, fit_full_grid = false, fit_cv = false;
    fit->add_option("--input", fit_input, "CSV file with a header row")->required();
    fit->add_option("--response", fit_response, "name of the response column")->required();
    fit->add_option("--q", fit_q, "number of leading directions to project on")->required();
    fit->add_option("--estimator", fit_estimator, "sir or dee (default dee)")
        ->check(CLI::IsMember({"sir", "dee"}));
    fit->add_option("--slices", fit_slices, "slice count H for the sir estimator (default 10)");
    fit->add_option("--bandwidth", fit_bandwidth, "evaluate one bandwidth (default: rule of thumb)");
    fit->add_flag("--grid", fit_grid, "evaluate the bandwidth grid l/20, l = 2..19");
    fit->add_flag("--full-grid", fit_full_grid, "extend the grid to l = 1..20");
    fit->add_flag("--cv", fit_cv, "choose the bandwidth by leave-one-out cross-validation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the diagnostic
        return 2;
    }

    if (dim->parsed()) {
        CsvTable table = read_csv(dim_input);
        const Eigen::Index y_col = table.column(dim_response);
        Eigen::VectorXd y = table.values.col(y_col);
        Eigen::MatrixXd x = table.without_column(y_col);
        if (dim_standardize) x = standardize_columns(x);

        const sdr_estimator est =
            dim_estimator == "sir" ? sdr_estimator::sir : sdr_estimator::dee;
        auto result = estimate_dimension(x, y, est, parse_methods(dim_methods),
                                         dim_ov.ov, dim_slices);

        std::cout << "rows=" << x.rows() << " predictors=" << x.cols()
                  << " response=" << dim_response << '\n';
        std::cout << "estimator=" << result.target.method << '\n';
        if (result.target.regularized)
            std::cout << "note: covariance was ridged to invert it\n";
        std::cout << "eigenvalues: " << join_values(result.target.eig.spectrum.values)
                  << "\n\n";
        for (const auto& e : result.estimates) print_estimate(std::cout, e, "q_hat");
        if (!dim_trace.empty()) {
            write_trace(dim_trace, result.estimates);
            std::cout << "trace written to " << dim_trace << '\n';
        }
        return 0;
    }

    if (fac->parsed()) {
        CsvTable table = read_csv(fac_input);
        auto result = estimate_num_factors(table.values, parse_methods(fac_methods),
                                           fac_ov.ov, fac_demean);
        const auto& lam = result.spectrum.values;
        const std::size_t k =
            std::min<std::size_t>(lam.size(), fac_k < 1 ? 0 : static_cast<std::size_t>(fac_k));
        std::cout << "panel: " << result.spectrum.p << " variables x "
                  << result.spectrum.n << " observations\n";
        std::cout << "eigenvalues (first " << k << "): "
                  << join_values(std::vector<double>(lam.begin(),
                                                     lam.begin() + static_cast<long>(k)))
                  << "\n\n";
        for (const auto& e : result.estimates) print_estimate(std::cout, e, "d_hat");
        if (!fac_trace.empty()) {
            write_trace(fac_trace, result.estimates);
            std::cout << "trace written to " << fac_trace << '\n';
        }
        return 0;
    }

    if (sim->parsed()) {
        auto cfg = parse_experiment_config_file(sim_config);
        auto report = run_experiment(cfg, sim_threads);

        const std::string csv = report_to_csv(report);
        const std::string csv_path = sim_out + ".csv";
        const std::string json_path = sim_out + ".json";
        {
            std::ofstream f(csv_path, std::ios::binary);
            if (!f) throw input_error("cannot write " + csv_path);
            f << csv;
        }
        {
            std::ofstream f(json_path, std::ios::binary);
            if (!f) throw input_error("cannot write " + json_path);
            f << report_to_json(report);
        }
        std::cout << csv;
        std::cout << "wrote " << csv_path << '\n';
        std::cout << "wrote " << json_path << '\n';
        return 0;
    }

    if (fit->parsed()) {
        CsvTable table = read_csv(fit_input);
        const Eigen::Index y_col = table.column(fit_response);
        Eigen::VectorXd y = table.values.col(y_col);
        Eigen::MatrixXd x = table.without_column(y_col);
        if (fit_q < 1 || fit_q > x.cols())
            throw input_error("--q must lie between 1 and the number of predictors (" +
                              std::to_string(x.cols()) + ")");

        SdrTarget target = fit_estimator == "sir" ? sir_matrix(x, y, fit_slices)
                                                  : dee_sir_matrix(x, y);
        auto design = project_leading_directions(x, target, fit_q);

        if (fit_cv) {
            double best_h = 0.0, best_loo = 0.0;
            bool first = true;
            for (double h : bandwidth_grid(fit_full_grid)) {
                const double loo = nw_fit(design.projected, y, h, true).rss;
                std::cout << "h=" << format_double(h) << " loo=" << format_double(loo)
                          << '\n';
                if (first || loo < best_loo) {
                    best_loo = loo;
                    best_h = h;
                    first = false;
                }
            }
            const auto refit = nw_fit(design.projected, y, best_h);
            std::cout << "cv_h=" << format_double(best_h)
                      << " rss=" << format_double(refit.rss) << '\n';
        } else if (fit_grid || fit_full_grid) {
            double best_h = 0.0, best_rss = 0.0;
            bool first = true;
            for (double h : bandwidth_grid(fit_full_grid)) {
                const double r = nw_fit(design.projected, y, h).rss;
                std::cout << "h=" << format_double(h) << " rss=" << format_double(r) << '\n';
                if (first || r < best_rss) {
                    best_rss = r;
                    best_h = h;
                    first = false;
                }
            }
            std::cout << "min_rss=" << format_double(best_rss)
                      << " at h=" << format_double(best_h) << '\n';
        } else {
            const double h =
                fit_bandwidth > 0 ? fit_bandwidth : bandwidth_rule(x.rows(), fit_q);
            const auto f = nw_fit(design.projected, y, h);
            std::cout << "h=" << format_double(h) << " rss=" << format_double(f.rss);
            if (!f.fallback_points.empty())
                std::cout << " (" << f.fallback_points.size()
                          << " empty neighborhoods fell back to the global mean)";
            std::cout << '\n';
        }
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const specdim::input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const specdim::estimator_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}
