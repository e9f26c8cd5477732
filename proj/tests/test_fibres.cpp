#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "wlab/dimension.hpp"
#include "wlab/fibres.hpp"
#include "wlab/transversality.hpp"

using namespace wlab;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

System sys_b() { return System(SystemSpec::equal(3).tau_power(0.2).cosine()); }
System degenerate() { return System(SystemSpec::equal(3).constant_lambda(0.6).constant_g(1.0)); }

// X3 for the equal 3-partition with cosine g and gamma = 3^-0.8:
// -sum gamma^n g'(z_n), z_n = (xi_n + z_{n-1}) / 3, g' = -2 pi sin(2 pi .)
double x3_oracle(const SymbolWord& xi, double x, std::size_t depth) {
    const double gamma = std::pow(3.0, -0.8);
    long double z = x, sum = 0.0L, w = 1.0L;
    for (std::size_t n = 0; n < depth; ++n) {
        z = (xi[n] + z) / 3.0L;
        w *= gamma;
        sum += w * two_pi * std::sin(two_pi * static_cast<double>(z));
    }
    return static_cast<double>(sum);
}

SymbolWord random_word(std::size_t n, int cells, Rng& rng) {
    SymbolWord w;
    for (std::size_t k = 0; k < n; ++k) w.symbols.push_back(static_cast<Symbol>(rng() % static_cast<unsigned>(cells)));
    return w;
}

}  // namespace

TEST_CASE("X3 reduces to the gamma-weighted series of g'") {
    const System b = sys_b();
    const std::size_t depth = theta_field(b).depth;
    Rng rng(1);
    for (int t = 0; t < 200; ++t) {
        const SymbolWord xi = random_word(depth, 3, rng);
        const double x = uniform01(rng);
        CHECK(x3_eval(b, xi, x, 0.7, depth) == doctest::Approx(x3_oracle(xi, x, depth)).epsilon(1e-12).scale(1.0));
        CHECK(theta_eval(b, xi, x, depth) == doctest::Approx(x3_oracle(xi, x, depth)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("X3 truncation tail is geometric") {
    const System b = sys_b();
    const std::size_t n = 12;
    const double gamma = std::pow(3.0, -0.8);
    const double c = two_pi / (1.0 - gamma);
    Rng rng(2);
    for (int t = 0; t < 1000; ++t) {
        const SymbolWord xi = random_word(2 * n, 3, rng);
        const double x = uniform01(rng);
        CHECK(std::abs(x3_eval(b, xi, x, 0.0, n) - x3_eval(b, xi, x, 0.0, 2 * n)) <= std::pow(gamma, n) * c);
    }
    const ThetaField tf = theta_field(b);
    CHECK(tf.tail_bound <= 1e-10);
    CHECK(theta_field_with_depth(b, tf.depth - 1).tail_bound > 1e-10);
}

TEST_CASE("degenerate system has Theta identically zero") {
    const System d = degenerate();
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        const SymbolWord xi = random_word(30, 3, rng);
        const double x = uniform01(rng);
        CHECK(x3_eval(d, xi, x, 1.3, 30) == 0.0);
        CHECK(theta_eval(d, xi, x, 30) == 0.0);
        CHECK(theta_dx_eval(d, xi, x, 30) == 0.0);
    }
}

TEST_CASE("Theta and its derivative respect the geometric bounds") {
    const System b = sys_b();
    const double gamma = std::pow(3.0, -0.8);
    CHECK(gamma == doctest::Approx(0.41524).epsilon(1e-4));
    const double bound = two_pi * gamma / (1.0 - gamma);
    CHECK(bound == doctest::Approx(4.462).epsilon(1e-3));
    const double q = std::pow(3.0, -1.8);
    CHECK(theta_dx_bound(b) == doctest::Approx(two_pi * two_pi * q / (1.0 - q)));
    CHECK(theta_dx_bound(b) == doctest::Approx(6.341).epsilon(1e-3));

    const std::size_t depth = theta_field(b).depth;
    Rng rng(4);
    for (int t = 0; t < 2000; ++t) {
        const SymbolWord xi = random_word(depth, 3, rng);
        const double x = uniform01(rng);
        CHECK(std::abs(theta_eval(b, xi, x, depth)) <= bound);
        CHECK(std::abs(theta_dx_eval(b, xi, x, depth)) <= theta_dx_bound(b));
    }
}

TEST_CASE("Theta depends on xi only through its word") {
    const System b = sys_b();
    const std::size_t depth = theta_field(b).depth;
    const ddouble xi(0.123456789);
    const SymbolWord w = coding_word(b, xi, depth);
    // another point of the same depth-N cylinder
    const Cylinder c = cylinder_of(b, w);
    const ddouble other = ddouble(c.left) + ddouble(0.37) * ddouble(c.length());
    REQUIRE(coding_word(b, other, depth) == w);
    CHECK(theta_eval(b, xi, 0.3, depth) == theta_eval(b, other, 0.3, depth));
    CHECK(theta_eval(b, xi, 0.3, depth) == theta_eval(b, w, 0.3, depth));
}

TEST_CASE("theta_dx_eval agrees with central differences") {
    const System b = sys_b();
    const std::size_t depth = theta_field(b).depth;
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        const SymbolWord xi = random_word(depth, 3, rng);
        const double x = 0.05 + 0.9 * uniform01(rng);
        const double h = 1e-5;
        const double fd = (theta_eval(b, xi, x + h, depth) - theta_eval(b, xi, x - h, depth)) / (2 * h);
        CHECK(std::abs(fd - theta_dx_eval(b, xi, x, depth)) < 1e-7);
    }
    const System takagi(SystemSpec::equal(2).constant_lambda(0.7).sawtooth());
    CHECK_THROWS_AS(theta_dx_eval(takagi, SymbolWord{{1, 0, 0, 0}}, 0.0, 4), std::domain_error);
}

TEST_CASE("fibres: horizontal when X3 vanishes, quadrature otherwise") {
    const System d = degenerate();
    const FibreCurve flat = fibre_solve(d, SymbolWord{std::vector<Symbol>(30, 1)}, 0.4, 2.0, 30);
    for (double l : flat.l) CHECK(l == 2.0);

    const System b = sys_b();
    const std::size_t depth = theta_field(b).depth;
    Rng rng(6);
    for (int t = 0; t < 3; ++t) {
        const SymbolWord xi = random_word(depth, 3, rng);
        const double x = uniform01(rng), y = uniform01(rng);
        const FibreCurve f = fibre_solve(b, xi, x, y, depth);
        CHECK(f.max_residual < 1e-8);
        for (double v : {0.0, 0.25, 0.61, 1.0}) {
            // composite Simpson of the oracle X3 from x to v, 4000 panels
            const int panels = 4000;
            const double hh = (v - x) / panels;
            double s = x3_oracle(xi, x, depth) + x3_oracle(xi, v, depth);
            for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * x3_oracle(xi, x + k * hh, depth);
            CHECK(std::abs(f(v) - (y + s * hh / 3.0)) < 1e-8);
            CHECK(std::abs(fibre_antiderivative(b, xi, x, v, depth) - s * hh / 3.0) < 1e-8);
        }
    }
}

TEST_CASE("fibre CSV and invariance under F") {
    const System b = sys_b();
    const std::size_t depth = theta_field(b).depth;
    Rng rng(7);
    for (int t = 0; t < 4; ++t) {
        const SymbolWord xi = random_word(depth + 1, 3, rng);
        CHECK(fibre_invariance_residual(b, xi, uniform01(rng), uniform01(rng) - 0.5, depth) < 1e-6);
    }
    const FibreCurve f = fibre_solve(b, random_word(depth, 3, rng), 0.5, 0.0, depth);
    std::ostringstream os;
    write_fibre_csv(os, f);
    CHECK(os.str().rfind("v,l_ss\n", 0) == 0);
}

TEST_CASE("projection q_xi") {
    const System d = degenerate();
    const auto dp = truncation_depth(d, 1e-10);
    const SymbolWord w1(std::vector<Symbol>(30, 2));
    for (double x : {0.0, 0.3, 0.9}) CHECK(q_xi_eval(d, w1, x, dp, 30) == doctest::Approx(1.0 / 0.4).epsilon(1e-9));

    const System b = sys_b();
    const std::size_t depth = theta_field(b).depth;
    const auto plan = truncation_depth(b, 1e-10);
    Rng rng(8);
    const SymbolWord xi = random_word(depth, 3, rng);
    CHECK(q_xi_eval(b, xi, 0.0, plan, depth) == doctest::Approx(eval_W(b, ddouble(0.0), plan)).epsilon(1e-12));

    const QProjector q(b, xi, plan, depth);
    CHECK(q(0.42) == doctest::Approx(q_xi_eval(b, xi, 0.42, plan, depth)).epsilon(1e-8));
    std::vector<double> values(20000);
    for (auto& v : values) v = q(uniform01(rng));
    const CorrDimEstimate cd = correlation_dim(values);
    CHECK(cd.fit.slope > 0.9);
    CHECK(cd.fit.slope < 1.1);
}

TEST_CASE("eigen relation") {
    const System d = degenerate();
    CHECK(eigen_residual(d, ddouble(0.2), 0.55, 2.5, 1e-6, 30) < 1e-9);

    const System b = sys_b();
    const auto plan = truncation_depth(b, 1e-12);
    Rng rng(9);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const double xi = 0.01 + 0.98 * uniform01(rng), x = 0.01 + 0.98 * uniform01(rng);
        if (std::abs(xi - 1.0 / 3) < 1e-3 || std::abs(xi - 2.0 / 3) < 1e-3 || std::abs(x - 1.0 / 3) < 1e-3 ||
            std::abs(x - 2.0 / 3) < 1e-3)
            continue;
        worst = std::max(worst, eigen_residual(b, ddouble(xi), x, eval_W(b, ddouble(x), plan), 1e-6, 60));
    }
    CHECK(worst < 1e-5);

    // central differences: halving h divides the error by about 4
    const double r1 = eigen_residual(b, ddouble(0.21), 0.47, 0.3, 2e-3, 60);
    const double r2 = eigen_residual(b, ddouble(0.21), 0.47, 0.3, 1e-3, 60);
    CHECK(r2 / r1 == doctest::Approx(0.25).epsilon(0.1));

    CHECK_THROWS_AS(eigen_residual(b, ddouble(0.2), 1.0 / 3 + 1e-8, 0.0, 1e-6, 60), std::domain_error);
}

TEST_CASE("fibres with a common xi are translates") {
    const System b = sys_b();
    const std::size_t depth = theta_field(b).depth;
    Rng rng(10);
    const SymbolWord xi = random_word(depth, 3, rng);
    CHECK(parallel_check(b, xi, 0.3, 0.1, 0.9, 0.8, depth) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(parallel_check(b, xi, 0.3, 0.1, 0.9, 0.3, depth) == doctest::Approx(1.0).epsilon(1e-12));
    const double a1 = parallel_check(b, xi, 0.6, -0.4, 0.2, 0.05, depth);
    const double a2 = parallel_check(b, xi, 0.6, 1.1, 3.0, 0.05, depth);
    CHECK(std::abs(a1 - a2) < 1e-8);
}
