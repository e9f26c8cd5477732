#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "wlab/dimension.hpp"
#include "wlab/transversality.hpp"

using namespace wlab;

namespace {

System sys_a() { return System(SystemSpec::equal(3).constant_lambda(0.6).cosine()); }
System sys_b() { return System(SystemSpec::equal(3).tau_power(0.2).cosine()); }

// log sum_i |I_i|^s lambda_i / |I_i|, written out from the definitions
double pressure_oracle(const std::vector<double>& lengths, const std::vector<double>& lambdas, double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) sum += std::pow(lengths[i], s) * lambdas[i] / lengths[i];
    return std::log(sum);
}

double bisect_root(const std::vector<double>& lengths, const std::vector<double>& lambdas) {
    double lo = 0.0, hi = 3.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (pressure_oracle(lengths, lambdas, mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("pressure at worked parameters") {
    const System a = sys_a();
    const double s_star = 2.0 + std::log(0.6) / std::log(3.0);
    CHECK(std::abs(pressure_eval(a, s_star)) < 1e-14);
    CHECK(pressure_eval(a, 0.0) > 0.0);
    CHECK(pressure_eval(a, 0.0) == doctest::Approx(std::log(3.0 * 1.8)));

    const System u(SystemSpec::with_breakpoints({0.0, 0.25, 0.7, 1.0}).tau_power(0.35).cosine());
    CHECK(std::abs(pressure_eval(u, 2.0 - 0.35)) < 1e-14);
    for (double s : {0.3, 1.1, 1.9})
        CHECK(pressure_eval(u, s) ==
              doctest::Approx(std::log(std::pow(0.25, s - 0.65) + std::pow(0.45, s - 0.65) + std::pow(0.3, s - 0.65))));
}

TEST_CASE("cylinder pressure equals the closed form for first-symbol potentials") {
    const System u(SystemSpec::with_breakpoints({0.0, 0.2, 0.55, 1.0}).lambda_per_interval({0.5, 0.6, 0.7}).cosine());
    for (double s : {1.0, 1.4, 1.9}) CHECK(pressure_cylinder_approx(u, s, 6) == doctest::Approx(pressure_eval(u, s)).epsilon(1e-12));
}

TEST_CASE("Bowen root against closed forms and bisection") {
    const BowenSolution a = bowen_solve(sys_a());
    CHECK(a.s_star == doctest::Approx(1.53503).epsilon(1e-5));
    CHECK(std::abs(a.s_star - (2.0 + std::log(0.6) / std::log(3.0))) < 1e-10);
    CHECK(std::abs(a.residual) < 1e-12);

    const BowenSolution b = bowen_solve(sys_b());
    CHECK(std::abs(b.s_star - 1.8) < 1e-10);
    for (double p : b.p_star) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-10));

    const BowenSolution c = bowen_solve(System(SystemSpec::with_breakpoints({0.0, 0.4, 1.0}).tau_power(0.3).cosine()));
    CHECK(std::abs(c.s_star - 1.7) < 1e-10);
    CHECK(c.p_star[0] == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(c.p_star[1] == doctest::Approx(0.6).epsilon(1e-10));

    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        const double a1 = 0.1 + 0.35 * uniform01(rng), a2 = a1 + 0.1 + 0.4 * uniform01(rng);
        const std::vector<double> len{a1, a2 - a1, 1.0 - a2};
        std::vector<double> lam;
        for (double l : len) lam.push_back(l + (1.0 - l) * (0.05 + 0.9 * uniform01(rng)));
        const System s(SystemSpec::with_breakpoints({0.0, a1, a2, 1.0}).lambda_per_interval(lam).cosine());
        const BowenSolution r = bowen_solve(s);
        CHECK(std::abs(r.s_star - bisect_root(len, lam)) < 1e-10);
        double total = 0.0;
        for (double p : r.p_star) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("dimension formulas") {
    const System a = sys_a();
    const DimPrediction u = formula_dims(BernoulliMeasure::uniform(3), a);
    CHECK(u.dim_mu == doctest::Approx(1.0 + std::log(1.8) / std::log(3.0)));
    CHECK(u.at_least_one);
    CHECK(u.argmin == 0);

    const DimPrediction r = formula_dims(BernoulliMeasure({0.98, 0.01, 0.01}), a);
    const double h = -(0.98 * std::log(0.98) + 0.02 * std::log(0.01));
    CHECK(r.dim_mu == doctest::Approx(h / -std::log(0.6)));
    CHECK(r.dim_mu == doctest::Approx(0.2191).epsilon(1e-3));
    CHECK_FALSE(r.at_least_one);
    CHECK(r.argmin == 1);

    // at h = -int log lambda both candidates equal 1
    const auto at = [&](double t) {
        return BernoulliMeasure({(1 - t) / 3 + t * 0.98, (1 - t) / 3 + t * 0.01, (1 - t) / 3 + t * 0.01});
    };
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 100; ++k) {
        const double mid = 0.5 * (lo + hi);
        const auto e = entropy_and_integrals(at(mid), a);
        (e.entropy + e.log_lambda > 0 ? lo : hi) = mid;
    }
    const DimPrediction m = formula_dims(at(lo), a);
    CHECK(m.first == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.second == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("least squares") {
    const std::vector<double> x{1, 2, 3, 4, 5}, y{2.5, 4.5, 6.5, 8.5, 10.5};
    const LinearFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(0.5));
    CHECK(f.stderr_slope < 1e-12);
    CHECK(f.points == 5);
}

TEST_CASE("box counting of a straight line") {
    GraphSample g;
    const std::size_t n = 100000;
    for (std::size_t k = 0; k < n; ++k) g.points.push_back({static_cast<double>(k) / n, static_cast<double>(k) / n});
    const BoxCountResult r = box_count_graph(g, 4, 14);
    CHECK(r.fit.slope == doctest::Approx(1.0).epsilon(0.02));
    std::ostringstream os;
    write_box_csv(os, r);
    CHECK(os.str().rfind("scale,count,box_count,raw_count\n", 0) == 0);

    CHECK_FALSE(r.undersampled);

    // 3e4 points leave fewer than 4 per column at 2^-14
    GraphSample sparse;
    for (std::size_t k = 0; k < 30000; ++k) sparse.points.push_back({k / 30000.0, k / 30000.0});
    const BoxCountResult s = box_count_graph(sparse, 4, 14);
    CHECK(s.undersampled);
    CHECK_FALSE(s.warning.empty());
}

TEST_CASE("correlation dimension controls") {
    Rng rng(2);
    std::vector<double> uni(20000);
    for (auto& v : uni) v = uniform01(rng);
    const CorrDimEstimate u = correlation_dim(uni);
    CHECK(u.fit.slope == doctest::Approx(1.0).epsilon(0.05));
    CHECK_FALSE(u.degenerate);

    const CorrDimEstimate d = correlation_dim(std::vector<double>(20000, 0.0));
    CHECK(d.degenerate);
    CHECK(d.fit.slope == 0.0);

    const System b = sys_b();
    const CorrDimEstimate t = correlation_dim(theta_distribution(b, BernoulliMeasure::critical(b), 0.3183098861837907, 20000, 3));
    CHECK(t.fit.slope >= 0.9);

    std::ostringstream os;
    write_corr_csv(os, u);
    CHECK(os.str().rfind("r,C\n", 0) == 0);
}

TEST_CASE("pointwise dimension of an atomic lift is zero") {
    PointwiseOptions o;
    o.anchors = 50;
    o.references = 2000;
    const PointwiseDimResult r = pointwise_dim_mu(sys_a(), BernoulliMeasure({1.0, 0.0, 0.0}), 4, o);
    CHECK(std::abs(r.mean) < 1e-9);
    CHECK(std::abs(r.median) < 1e-9);
}
