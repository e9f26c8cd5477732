#include <doctest.h>

#include <cmath>

#include "wlab/system.hpp"

using namespace wlab;

namespace {

System sys_a() { return System(SystemSpec::equal(3).constant_lambda(0.6).cosine()); }

bool has_code(const std::vector<Violation>& v, const std::string& code) {
    for (const auto& x : v)
        if (x.code == code) return true;
    return false;
}

}  // namespace

TEST_CASE("validate_system accepts System A and names every broken hypothesis") {
    CHECK(validate_system(SystemSpec::equal(3).constant_lambda(0.6).cosine()).empty());

    const auto weak = validate_system(SystemSpec::equal(3).constant_lambda(0.3).cosine());
    REQUIRE(weak.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(weak[i].code == "tau-prime-times-lambda");
        CHECK(weak[i].interval == i);
    }

    const auto bad = validate_system(SystemSpec::with_breakpoints({0.0, 0.5, 0.4, 1.0}).constant_lambda(0.9).cosine());
    CHECK(has_code(bad, "partition-not-increasing"));

    CHECK_THROWS_AS(System(SystemSpec::equal(3).constant_lambda(0.3).cosine()), InvalidSystem);
    CHECK(has_code(validate_system(SystemSpec::equal(3).tau_power(1.2).cosine()), "theta-range"));
}

TEST_CASE("tau on the equal 3-partition") {
    const System s = sys_a();
    CHECK(tau_apply(s, ddouble(0.5)).value() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(tau_apply(s, ddouble(0.1)).value() == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(tau_apply(s, ddouble(1.0)).value() == 1.0);
    CHECK(s.symbol_of(ddouble(1.0)) == 2);
}

TEST_CASE("inverse branches compose in word order") {
    const System s = sys_a();
    CHECK(inverse_branch(s, 1, ddouble(0.5)).value() == doctest::Approx(0.5));
    CHECK(inverse_branch(s, 2, ddouble(0.0)).value() == doctest::Approx(2.0 / 3.0).epsilon(1e-16));
    const double x = 0.37;
    const double by_hand = 2.0 / 3.0 + (x / 3.0) / 3.0;  // rho_2(rho_0(x))
    CHECK(inverse_branch(s, SymbolWord{{0, 2}}, ddouble(x)).value() == doctest::Approx(by_hand).epsilon(1e-15));
}

TEST_CASE("coding words") {
    const System s3 = sys_a();
    CHECK(coding_word(s3, ddouble(0.5), 4) == SymbolWord{{1, 1, 1, 1}});
    CHECK(coding_word(s3, ddouble(0.1), 2) == SymbolWord{{0, 0}});
    const System s2(SystemSpec::equal(2).constant_lambda(0.7).cosine());
    CHECK(coding_word(s2, ddouble(1.0) / ddouble(3.0), 3) == SymbolWord{{0, 1, 0}});
}

TEST_CASE("cylinders") {
    const System s = sys_a();
    const Cylinder c1 = cylinder_of(s, SymbolWord{{1}});
    CHECK(c1.left == doctest::Approx(1.0 / 3));
    CHECK(c1.right == doctest::Approx(2.0 / 3));
    const Cylinder c11 = cylinder_of(s, SymbolWord{{1, 1}});
    CHECK(c11.left == doctest::Approx(4.0 / 9));
    CHECK(c11.right == doctest::Approx(5.0 / 9));
    const Cylinder e = cylinder_of(s, SymbolWord{});
    CHECK(e.left == 0.0);
    CHECK(e.right == 1.0);

    // unequal partition: I_(0,1) = rho_0(I_1) = [0.4 * 0.4, 0.4 * 1]
    const System u(SystemSpec::with_breakpoints({0.0, 0.4, 1.0}).constant_lambda(0.8).cosine());
    const Cylinder c01 = cylinder_of(u, SymbolWord{{0, 1}});
    CHECK(c01.left == doctest::Approx(0.16));
    CHECK(c01.right == doctest::Approx(0.4));
}

TEST_CASE("Bernoulli masses") {
    const BernoulliMeasure u = BernoulliMeasure::uniform(3);
    CHECK(bernoulli_mass(u, SymbolWord{{0, 1, 2, 1, 0}}) == doctest::Approx(std::pow(1.0 / 3, 5)));
    const BernoulliMeasure p({0.5, 0.3, 0.2});
    CHECK(bernoulli_mass(p, SymbolWord{{0, 2}}) == doctest::Approx(0.10));
    CHECK(bernoulli_mass(p, SymbolWord{}) == 1.0);
    CHECK(bernoulli_log_mass(BernoulliMeasure({1.0, 0.0, 0.0}), SymbolWord{{1}}) == -INFINITY);
}

TEST_CASE("sample_point has the Bernoulli law and is deterministic") {
    const System s = sys_a();
    const BernoulliMeasure u = BernoulliMeasure::uniform(3);
    int zeros = 0;
    const int n = 100000;
    Rng rng(7);
    for (int k = 0; k < n; ++k) zeros += sample_coded_point(u, s, 8, rng).x.value() < 1.0 / 3 ? 1 : 0;
    CHECK(std::abs(zeros / double(n) - 1.0 / 3) < 0.01);

    const BernoulliMeasure dirac({1.0, 0.0, 0.0});
    CHECK(sample_point(dirac, s, 30, 3) < 1e-14);
    CHECK(sample_point(u, s, 40, 99) == sample_point(u, s, 40, 99));
}

TEST_CASE("entropy and Lyapunov integrals") {
    const System s = sys_a();
    const auto e = entropy_and_integrals(BernoulliMeasure::uniform(3), s);
    CHECK(e.entropy == doctest::Approx(std::log(3.0)));
    CHECK(e.log_lambda == doctest::Approx(std::log(0.6)));
    CHECK(e.log_tau_prime == doctest::Approx(std::log(3.0)));
    CHECK(e.log_gamma == doctest::Approx(-std::log(1.8)));  // gamma = 1 / (3 * 0.6)

    const auto r = entropy_and_integrals(BernoulliMeasure({0.98, 0.01, 0.01}), s);
    const double h = -(0.98 * std::log(0.98) + 2 * 0.01 * std::log(0.01));
    CHECK(r.entropy == doctest::Approx(h));
    CHECK(r.entropy == doctest::Approx(0.1119).epsilon(1e-3));
}

TEST_CASE("Shannon-McMillan-Breiman averages") {
    const System s = sys_a();
    CHECK(smb_empirical(BernoulliMeasure::uniform(3), s, ddouble(0.123), 30) == doctest::Approx(std::log(3.0)));
    CHECK(smb_empirical(BernoulliMeasure({1.0, 0.0, 0.0}), s, ddouble(0.0), 50) == 0.0);

    const BernoulliMeasure p({0.5, 0.3, 0.2});
    const double h = -(0.5 * std::log(0.5) + 0.3 * std::log(0.3) + 0.2 * std::log(0.2));
    CHECK(h == doctest::Approx(1.02965).epsilon(1e-5));
    Rng rng(11);
    const CodedPoint pt = sample_coded_point(p, s, 1000, rng);
    CHECK(std::abs(smb_empirical(p, pt.word) - h) < 0.05);
}

TEST_CASE("coding of a sampled point starts with its drawn word") {
    const System u(SystemSpec::with_breakpoints({0.0, 0.2, 0.55, 1.0}).lambda_per_interval({0.5, 0.6, 0.7}).cosine());
    const BernoulliMeasure p({0.5, 0.3, 0.2});
    Rng rng(5);
    for (int k = 0; k < 200; ++k) {
        const CodedPoint pt = sample_coded_point(p, u, 25, rng);
        CHECK(coding_word(u, pt.x, 25) == pt.word);
    }
}
