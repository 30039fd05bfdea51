// Walks through the bundled fuel-consumption data set end to end: builds both
// inverse-regression target matrices, prints their spectra, compares every
// selection criterion, and finishes with a nonparametric lack-of-fit scan of
// the candidate dimensions.
//
// Run from the repository root:  ./build/demo_cars

#include <specdim/csv.hpp>
#include <specdim/kernel_fit.hpp>
#include <specdim/sdr.hpp>

#include <iostream>
#include <string>
#include <vector>

using namespace specdim;

namespace {

void print_targets(const std::string& title, const std::vector<DimensionEstimate>& fits) {
    std::cout << title << "\n";
    for (const auto& e : fits) {
        std::cout << "  " << e.method << " -> " << e.q_hat;
        if (e.no_qualifying) std::cout << " (no index passed the threshold)";
        std::cout << "\n";
    }
}

} // namespace

int main() try {
    auto table = read_csv("data/cars_design.csv");
    const Eigen::Index yc = table.column("mpg");
    const Eigen::VectorXd y = table.values.col(yc);
    const Eigen::MatrixXd x = table.without_column(yc);

    std::cout << "fuel-consumption data: " << x.rows() << " observations, "
              << x.cols() << " predictors\n\n";

    const std::vector<method_tag> methods{method_tag::tdrr, method_tag::rre,
                                          method_tag::re, method_tag::bic};

    auto dee = dee_sir_matrix(x, y);
    std::cout << "dichotomized-slicing target spectrum:\n ";
    for (double v : dee.eig.spectrum.values) std::cout << ' ' << format_double(v);
    std::cout << "\n";
    print_targets("selections (dichotomized slicing):",
                  run_sdr_criteria(dee.eig.spectrum, methods, {}, std::nullopt));

    auto sir = sir_matrix(x, y, 10);
    std::cout << "\nsliced-means target spectrum (10 slices):\n ";
    for (double v : sir.eig.spectrum.values) std::cout << ' ' << format_double(v);
    std::cout << "\n";
    {
        std::vector<method_tag> with_st = methods;
        with_st.push_back(method_tag::st);
        print_targets("selections (sliced means):",
                      run_sdr_criteria(sir.eig.spectrum, with_st, {}, 10));
    }

    // Lack-of-fit comparison: project onto the leading q directions of the
    // dichotomized-slicing target and scan the bandwidth grid.
    std::cout << "\nkernel lack-of-fit scan (projections of the dichotomized target):\n";
    for (int q : {1, 3, 4}) {
        auto proj = project_leading_directions(x, dee, q);
        double best_rss = -1.0, best_h = -1.0;
        for (double h : bandwidth_grid()) {
            auto fit = nw_fit(proj.projected, y, h);
            const double r = rss(fit.fitted, y);
            if (best_rss < 0.0 || r < best_rss) {
                best_rss = r;
                best_h = h;
            }
        }
        auto rule = nw_fit(proj.projected, y, bandwidth_rule(x.rows(), q));
        std::cout << "  q = " << q << ": grid-minimal rss = " << format_double(best_rss)
                  << " at h = " << format_double(best_h)
                  << ", rule-of-thumb rss = " << format_double(rss(rule.fitted, y)) << "\n";
    }
    std::cout << "\nlower lack-of-fit at q = 3 or 4 than at q = 1 indicates that a\n"
                 "single projection misses real structure in the regression.\n";
    return 0;
} catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
}
