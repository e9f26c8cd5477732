#include "wlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "wlab/commands.hpp"
#include "wlab/dimension.hpp"
#include "wlab/fibres.hpp"
#include "wlab/parallel.hpp"
#include "wlab/transversality.hpp"
#include "wlab/weierstrass.hpp"

namespace wlab {

namespace fs = std::filesystem;

namespace {

System system_a() { return System(SystemSpec::equal(3).constant_lambda(0.6).cosine()); }
System system_b() { return System(SystemSpec::equal(3).tau_power(0.2).cosine()); }
System system_u() {
    return System(SystemSpec::with_breakpoints({0.0, 0.2, 0.55, 1.0}).lambda_per_interval({0.5, 0.6, 0.7}).cosine());
}
System system_pl() {
    return System(SystemSpec::with_breakpoints({0.0, 0.3, 1.0})
                      .lambda_per_interval({0.45, 0.8})
                      .piecewise_linear({2.0, -1.0}, {0.5, 0.7}));
}

SymbolWord random_word(const System& sys, std::size_t n, Rng& rng) {
    SymbolWord w;
    for (std::size_t k = 0; k < n; ++k) w.symbols.push_back(static_cast<Symbol>(rng() % static_cast<unsigned>(sys.cells())));
    return w;
}

/// x in (margin, 1 - margin) and away from the partition points.
double interior(const System& sys, Rng& rng, double margin) {
    for (;;) {
        const double x = uniform01(rng);
        bool ok = x > margin && x < 1.0 - margin;
        for (int i = 1; i < sys.cells(); ++i) ok = ok && std::abs(x - sys.left(i)) > margin;
        if (ok) return x;
    }
}

CheckResult below(std::string module, std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(module), std::move(name), value <= threshold, value, threshold, std::move(detail), 0.0};
}

// system-core

CheckResult cylinder_multiplicative(std::uint64_t seed) {
    Rng rng(derive_seed(seed, "verify.cylinder"));
    double worst = 0.0;
    for (const System& s : {system_a(), system_u()})
        for (int t = 0; t < 2000; ++t) {
            const SymbolWord w = random_word(s, 1 + rng() % 14, rng);
            const int j = static_cast<int>(rng() % static_cast<unsigned>(s.cells()));
            const double lhs = cylinder_of(s, w.then(j)).length();
            worst = std::max(worst, std::abs(lhs - cylinder_of(s, w).length() * s.length(j)));
        }
    return below("system-core", "cylinder length is multiplicative", worst, 1e-14);
}

CheckResult tau_inverts_rho(std::uint64_t seed) {
    Rng rng(derive_seed(seed, "verify.tau_rho"));
    double worst = 0.0;
    for (const System& s : {system_a(), system_u(), system_pl()})
        for (int t = 0; t < 1000; ++t) {
            const double x = uniform01(rng);
            if (x == 0.0) continue;
            for (int i = 0; i < s.cells(); ++i)
                worst = std::max(worst, std::abs(s.tau(s.rho(i, ddouble(x))).value() - x));
        }
    return below("system-core", "tau(rho_i x) = x", worst, 1e-14);
}

CheckResult coding_reverses(std::uint64_t seed) {
    Rng rng(derive_seed(seed, "verify.coding"));
    int bad = 0;
    for (const System& s : {system_a(), system_u()})
        for (int t = 0; t < 1000; ++t) {
            const SymbolWord w = random_word(s, 1 + rng() % 20, rng);
            const double x = 0.05 + 0.9 * uniform01(rng);
            SymbolWord rev = w;
            std::reverse(rev.symbols.begin(), rev.symbols.end());
            if (coding_word(s, inverse_branch(s, w, ddouble(x)), w.size()) != rev) ++bad;
        }
    return below("system-core", "coding of rho_w(x) is w reversed", bad, 0, "mismatching words out of 2000");
}

CheckResult critical_entropy() {
    double worst = 0.0;
    for (const System& s : {system_a(), system_u(), system_pl()}) {
        const auto e = entropy_and_integrals(BernoulliMeasure::critical(s), s);
        worst = std::max(worst, std::abs(e.entropy - e.log_tau_prime));
    }
    return below("system-core", "critical measure has h = int log tau'", worst, 1e-14);
}

CheckResult smb_converges(std::uint64_t seed) {
    const System s = system_u();
    const BernoulliMeasure m({0.5, 0.3, 0.2});
    const double h = entropy_and_integrals(m, s).entropy;
    std::vector<double> v(100);
    for (std::size_t k = 0; k < v.size(); ++k) {
        Rng rng(derive_seed(seed, "verify.smb", k));
        v[k] = smb_empirical(m, sample_coded_point(m, s, 1000, rng).word);
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / 100.0;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double se = std::sqrt(var / 99.0 / 100.0);
    return below("system-core", "SMB average within 3 SE of h at N = 1000", std::abs(mean - h), 3.0 * se,
                 fmt::format("mean {:.6f}, h {:.6f}", mean, h));
}

// weierstrass-eval

CheckResult downward_closure(std::uint64_t seed) {
    const double tol = 1e-9;
    double worst_ratio = 0.0;
    Rng rng(derive_seed(seed, "verify.closure"));
    for (const System& s : {system_a(), system_b(), system_pl()}) {
        const auto p1 = truncation_depth(s, tol), p2 = truncation_depth(s, tol / 10);
        for (int t = 0; t < 300; ++t) {
            const ddouble x(uniform01(rng));
            worst_ratio = std::max(worst_ratio, std::abs(eval_W(s, x, p1) - eval_W(s, x, p2)) / tol);
        }
    }
    return below("weierstrass-eval", "W at tol and tol/10 differ by at most tol", worst_ratio, 1.0,
                 "value is the worst difference in units of tol");
}

CheckResult graph_lift(std::uint64_t seed) {
    const double tol = 1e-9;
    double worst_ratio = 0.0;
    Rng rng(derive_seed(seed, "verify.lift"));
    for (const System& s : {system_a(), system_b(), system_u()}) {
        const auto plan = truncation_depth(s, tol);
        for (int t = 0; t < 1000; ++t) {
            const ddouble x(uniform01(rng));
            const SkewPoint p = skew_forward(s, x, eval_W(s, x, plan), 1);
            worst_ratio = std::max(worst_ratio, std::abs(p.y - eval_W(s, p.x, plan)) * s.lambda_min() / tol);
        }
    }
    return below("weierstrass-eval", "G lifts the graph over tau within tol / lambda_min", worst_ratio, 1.0,
                 "value in units of tol / lambda_min");
}

CheckResult closed_form_fibre(std::uint64_t seed) {
    double worst = 0.0;
    Rng rng(derive_seed(seed, "verify.closed_form"));
    for (const System& s : {system_a(), system_b(), system_pl()})
        for (int t = 0; t < 300; ++t) {
            const ddouble xi(uniform01(rng)), x(uniform01(rng));
            const double y = 4.0 * uniform01(rng) - 2.0;
            const std::size_t n = rng() % 31;
            const ExtendedPoint a = skew_inverse_fibre(s, xi, x, y, n);
            const ExtendedPoint b = skew_inverse_iterate(s, ExtendedPoint{xi, x, y}, n);
            worst = std::max({worst, std::abs(a.y - b.y), std::abs((a.x - b.x).value())});
        }
    return below("weierstrass-eval", "closed-form F^n equals iterated F", worst, 1e-10);
}

CheckResult baker_roundtrip(std::uint64_t seed) {
    double worst = 0.0;
    Rng rng(derive_seed(seed, "verify.baker"));
    for (const System& s : {system_a(), system_u()})
        for (int t = 0; t < 2000; ++t) {
            const ddouble xi(interior(s, rng, 1e-9)), x(interior(s, rng, 1e-9));
            const auto [a, b] = baker_map(s, xi, x);
            const auto [c, d] = baker_inverse(s, a, b);
            worst = std::max({worst, std::abs((c - xi).value()), std::abs((d - x).value())});
        }
    return below("weierstrass-eval", "B^-1 o B = id away from the boundary", worst, 1e-14);
}

CheckResult oscillation_refines(std::uint64_t seed) {
    Rng rng(derive_seed(seed, "verify.oscillation"));
    double worst = -1.0;
    constexpr std::size_t samples = 65;
    for (const System& s : {system_a(), system_u()}) {
        const auto plan = truncation_depth(s, 1e-9);
        for (int t = 0; t < 20; ++t) {
            const ddouble x(uniform01(rng));
            const auto osc = [&](const SymbolWord& w, const std::vector<double>& extra, std::vector<double>* keep) {
                const Cylinder c = cylinder_of(s, w);
                double lo = INFINITY, hi = -INFINITY;
                std::vector<double> vals = extra;
                for (std::size_t k = 0; k < samples; ++k) {
                    const double u = static_cast<double>(k) / (samples - 1);
                    const ddouble p = ddouble(c.left) + ddouble(c.length()) * ddouble(u);
                    vals.push_back(eval_W(s, p, plan));
                }
                for (double v : vals) lo = std::min(lo, v), hi = std::max(hi, v);
                if (keep) *keep = vals;
                return hi - lo;
            };
            for (std::size_t n = 1; n <= 10; ++n) {
                const SymbolWord w = coding_word(s, x, n + 1);
                std::vector<double> fine_vals;
                const double fine = osc(w, {}, &fine_vals);
                const double coarse = osc(w.prefix(n), fine_vals, nullptr);
                worst = std::max(worst, fine - coarse - 2.0 * plan.tail_bound);
            }
        }
    }
    return below("weierstrass-eval", "oscillation over I_{N+1} <= over I_N + 2 tail", worst, 0.0,
                 "value is max(osc_{N+1} - osc_N - 2 tail)");
}

// stable-fibres

CheckResult theta_bound(std::uint64_t seed) {
    double worst = 0.0;
    for (const System& s : {system_a(), system_b(), system_pl()}) {
        const std::size_t depth = theta_field(s).depth;
        const double bound = s.g_prime_sup_norm() * s.gamma_max() / (1.0 - s.gamma_max());
        const BernoulliMeasure m = BernoulliMeasure::critical(s);
        Rng rng(derive_seed(seed, "verify.theta_bound"));
        for (int t = 0; t < 10000; ++t) {
            const SymbolWord xi = draw_word(m, depth, rng);
            worst = std::max(worst, std::abs(theta_eval(s, xi, uniform01(rng), depth)) / bound);
        }
    }
    return below("stable-fibres", "sup |Theta| within the geometric bound", worst, 1.0,
                 "value is sup |Theta| / bound");
}

CheckResult eigen_relation(std::uint64_t seed) {
    const System s = system_b();
    const auto plan = truncation_depth(s, 1e-12);
    Rng rng(derive_seed(seed, "verify.eigen"));
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const double xi = interior(s, rng, 1e-4), x = interior(s, rng, 1e-4);
        const double y = eval_W(s, ddouble(x), plan) + (uniform01(rng) - 0.5);
        worst = std::max(worst, eigen_residual(s, ddouble(xi), x, y, 1e-6, 60));
    }
    return below("stable-fibres", "eigen-relation residual on System B", worst, 1e-5);
}

CheckResult fibre_invariance(std::uint64_t seed) {
    Rng rng(derive_seed(seed, "verify.fibre_invariance"));
    double worst = 0.0;
    for (const System& s : {system_b(), system_a()}) {
        const std::size_t depth = theta_field(s).depth;
        for (int t = 0; t < 8; ++t) {
            const SymbolWord xi = random_word(s, depth + 1, rng);
            const double x = uniform01(rng), y = uniform01(rng) - 0.5;
            worst = std::max(worst, fibre_invariance_residual(s, xi, x, y, depth));
        }
    }
    return below("stable-fibres", "fibre invariance under F", worst, 1e-6);
}

CheckResult fibres_parallel(std::uint64_t seed) {
    Rng rng(derive_seed(seed, "verify.parallel"));
    double worst = 0.0;
    for (const System& s : {system_b(), system_u()}) {
        const std::size_t depth = theta_field(s).depth;
        for (int t = 0; t < 10; ++t) {
            const SymbolWord xi = random_word(s, depth, rng);
            const double x = uniform01(rng), v = uniform01(rng);
            const double y = 2.0 * uniform01(rng) - 1.0, y2 = y + 0.25 + uniform01(rng);
            worst = std::max(worst, std::abs(parallel_check(s, xi, x, y, y2, v, depth) - 1.0));
        }
    }
    return below("stable-fibres", "fibres with common xi are vertical translates", worst, 1e-8);
}

CheckResult theta_dx_converges(std::uint64_t seed) {
    Rng rng(derive_seed(seed, "verify.theta_dx"));
    const System s = system_b();
    const std::size_t depth = theta_field(s).depth;
    double worst_ratio = 0.0;
    int floor_hits = 0;
    for (int t = 0; t < 50; ++t) {
        const SymbolWord xi = random_word(s, depth, rng);
        const double x = 0.1 + 0.8 * uniform01(rng);
        const double d = theta_dx_eval(s, xi, x, depth);
        const auto cd = [&](double h) {
            return (theta_eval(s, xi, x + h, depth) - theta_eval(s, xi, x - h, depth)) / (2.0 * h);
        };
        const double e1 = std::abs(cd(1e-2) - d), e2 = std::abs(cd(5e-3) - d);
        if (e1 < 1e-9) {
            ++floor_hits;
            continue;
        }
        worst_ratio = std::max(worst_ratio, e2 / e1);
    }
    return below("stable-fibres", "theta_dx matches central differences at order h^2", worst_ratio, 0.3,
                 fmt::format("worst error ratio for h -> h/2 (0.25 ideal); {} points at round-off floor", floor_hits));
}

// dimension-lab

CheckResult pressure_decreasing() {
    double worst = -INFINITY;
    for (const System& s : {system_a(), system_b(), system_u(), system_pl()})
        for (int k = 0; k < 300; ++k)
            worst = std::max(worst, pressure_eval(s, (k + 1) * 0.01) - pressure_eval(s, k * 0.01));
    return {"dimension-lab", "pressure strictly decreasing on the grid", worst < 0.0, worst, 0.0, "max P(s+ds) - P(s)", 0};
}

CheckResult bowen_closed_form(std::uint64_t seed) {
    Rng rng(derive_seed(seed, "verify.bowen"));
    double worst = 0.0, worst_res = 0.0;
    for (int l : {2, 3, 5})
        for (int t = 0; t < 20; ++t) {
            const double b = 1.0 / l + (1.0 - 1.0 / l) * (0.01 + 0.98 * uniform01(rng));
            const System s(SystemSpec::equal(l).constant_lambda(b).cosine());
            const BowenSolution r = bowen_solve(s);
            worst = std::max(worst, std::abs(r.s_star - (2.0 + std::log(b) / std::log(l))));
            worst_res = std::max(worst_res, std::abs(r.residual));
        }
    CheckResult c = below("dimension-lab", "Bowen root matches 2 + log b / log l", worst, 1e-10,
                          fmt::format("worst |residual| {:.3g}", worst_res));
    c.pass = c.pass && worst_res < 1e-12;
    return c;
}

CheckResult dims_at_equilibrium() {
    double worst = 0.0;
    for (const System& s : {system_a(), system_b(), system_u(), system_pl()}) {
        const BowenSolution b = bowen_solve(s);
        worst = std::max(worst, std::abs(formula_dims(BernoulliMeasure(b.p_star), s).dim_mu - b.s_star));
    }
    return below("dimension-lab", "formula_dims(p*) = s*", worst, 1e-10);
}

CheckResult regime_switch() {
    const System s = system_a();
    const std::vector<double> u{1.0 / 3, 1.0 / 3, 1.0 / 3}, e{0.98, 0.01, 0.01};
    const auto at = [&](double t) {
        std::vector<double> p(3);
        for (int i = 0; i < 3; ++i) p[i] = (1.0 - t) * u[i] + t * e[i];
        return BernoulliMeasure(p);
    };
    const auto crossing = [&](double t) {
        const auto m = at(t);
        const auto ei = entropy_and_integrals(m, s);
        return ei.entropy + ei.log_lambda;
    };
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
        const double mid = 0.5 * (lo + hi);
        (crossing(mid) > 0.0 ? lo : hi) = mid;
    }
    const int n = 2000;
    double max_jump = 0.0;
    int switches = 0;
    double prev = formula_dims(at(0.0), s).dim_mu;
    int prev_arg = formula_dims(at(0.0), s).argmin;
    for (int k = 1; k <= n; ++k) {
        const auto d = formula_dims(at(static_cast<double>(k) / n), s);
        max_jump = std::max(max_jump, std::abs(d.dim_mu - prev));
        switches += d.argmin != prev_arg ? 1 : 0;
        prev = d.dim_mu;
        prev_arg = d.argmin;
    }
    const auto before = formula_dims(at(lo - 1e-9), s), after = formula_dims(at(hi + 1e-9), s);
    const bool exact = before.argmin != after.argmin && before.at_least_one != after.at_least_one;
    CheckResult c{"dimension-lab", "regime switch at h = -int log lambda", exact && switches == 1 && max_jump < 0.01,
                  max_jump, 0.01,
                  fmt::format("crossing t = {:.12f}, {} argmin switches, max step {:.2e}", lo, switches, max_jump), 0};
    return c;
}

CheckResult box_count_control() {
    const std::size_t n = 1 << 20;
    GraphSample g;
    g.points.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = static_cast<double>(k) / n;
        g.points[k] = {x, x + 0.3 * std::sin(2.0 * std::numbers::pi * x)};
    }
    const BoxCountResult r = box_count_graph(g, 4, 14);
    return below("dimension-lab", "box count of a C1 graph within 0.03 of 1", std::abs(r.fit.slope - 1.0), 0.03,
                 fmt::format("slope {:.4f}", r.fit.slope));
}

CheckResult corr_dim_affine(std::uint64_t seed) {
    const System s = system_b();
    std::vector<double> v = theta_distribution(s, BernoulliMeasure::critical(s), 0.3, 20000, derive_seed(seed, "verify.corr"));
    std::vector<double> w(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) w[k] = -3.7 * v[k] + 2.0;
    const double a = correlation_dim(v).fit.slope, b = correlation_dim(w).fit.slope;
    return below("dimension-lab", "correlation dimension invariant under affine maps", std::abs(a - b), 0.01,
                 fmt::format("slopes {:.6f} and {:.6f}", a, b));
}

// transversality

CheckResult delta0_agrees() {
    double worst = 0.0;
    for (const System& s : {system_a(), system_b(), system_u(), system_pl(),
                            System(SystemSpec::equal(5).tau_power(0.3).cosine())})
        worst = std::max(worst, std::abs(delta0_grid(s, 1000).value - delta0_compute(s).value));
    return below("transversality", "delta0 from the grid equals the endpoint value", worst, 1e-12);
}

CheckResult cond2_reduces() {
    double worst = 0.0;
    int verdict_mismatch = 0;
    for (int l = 2; l <= 7; ++l)
        for (int k = 1; k <= 19; ++k) {
            const double th = 0.05 * k;
            const System s(SystemSpec::equal(l).tau_power(th).cosine());
            const Example2Check c = thm_example2_check(s);
            const double a = 1.0 / std::pow(std::pow(l, 1.0 - th) - 1.0, 2);
            const double b = 1.0 / std::pow(std::pow(l, 2.0 - th) - 1.0, 2);
            const double d0 = std::pow(std::sin(std::numbers::pi / l), 2);
            worst = std::max({worst, std::abs(c.cond2_sum - (a + b)), std::abs(c.delta0 - d0)});
            if (c.cond2 != (a + b < d0)) ++verdict_mismatch;
        }
    CheckResult c = below("transversality", "cond2 on equal partitions matches the closed form", worst, 1e-10,
                          fmt::format("{} verdict mismatches", verdict_mismatch));
    c.pass = c.pass && verdict_mismatch == 0;
    return c;
}

CheckResult pair_identity(std::uint64_t seed) {
    Rng rng(derive_seed(seed, "verify.pairs"));
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 1 + rng() % 5;
        std::vector<double> v(n), w(n);
        for (std::size_t a = 0; a < n; ++a) {
            v[a] = std::round(uniform01(rng) * 16.0) / 16.0;  // repeated atoms happen
            w[a] = 0.1 + uniform01(rng);
        }
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& x : w) x /= total;
        const double r = 0.02 + 0.3 * uniform01(rng);
        // r^-2 int (zeta[y - r, y + r])^2 dy, integrated exactly between consecutive breakpoints
        std::vector<double> cuts;
        for (double x : v) cuts.push_back(x - r), cuts.push_back(x + r);
        std::sort(cuts.begin(), cuts.end());
        double integral = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
            double mass = 0.0;
            for (std::size_t a = 0; a < n; ++a)
                if (std::abs(mid - v[a]) < r) mass += w[a];
            integral += mass * mass * (cuts[k + 1] - cuts[k]);
        }
        worst = std::max(worst, std::abs(integral / (r * r) - pair_norm_sq(v, w, r)));
    }
    return below("transversality", "pair sum equals the definitional integral", worst, 1e-12);
}

CheckResult ks_true_mixture(std::uint64_t seed) {
    const System s = system_b();
    const BernoulliMeasure m({0.5, 0.3, 0.2});
    int pass = 0;
    for (int rep = 0; rep < 100; ++rep)
        pass += selfsimilarity_check(s, m, 0.3, 20000, derive_seed(seed, "verify.ks", rep)).pass ? 1 : 0;
    return {"transversality", "KS self-similarity passes in >= 95 of 100 repetitions", pass >= 95,
            static_cast<double>(pass), 95.0, "repetitions below the 1% critical value", 0};
}

CheckResult scan_monotone() {
    const System s = system_b();
    std::vector<double> margins;
    for (std::size_t f : {1, 2, 4}) {
        ScanOptions o;
        o.n_xi = o.n_eta = 8 * f;
        o.n_x = 16 * f + 1;
        margins.push_back(eps_delta_scan_all(s, o).margin);
    }
    const bool ok = margins[1] <= margins[0] && margins[2] <= margins[1];
    return {"transversality", "scan margin non-increasing under refinement", ok, margins[2], margins[1],
            fmt::format("margins {:.6f}, {:.6f}, {:.6f}", margins[0], margins[1], margins[2]), 0};
}

// cli-io

RunConfig small_config(std::uint64_t seed) {
    RunConfig c;
    c.system = SystemSpec::equal(3).tau_power(0.2).cosine();
    c.compute.seed = seed;
    c.compute.samples = 20000;
    c.compute.graph_points = 1 << 16;
    c.compute.scale_min = 3;
    c.compute.scale_max = 10;
    c.compute.anchors = 200;
    c.compute.scan_xi = 16;
    c.compute.scan_x = 33;
    c.compute.tsujii_levels = 3;
    c.compute.ks_samples = 20000;
    return c;
}

const std::vector<std::string>& io_commands() {
    static const std::vector<std::string> c{"validate", "eval", "sample-graph", "bowen", "dims",
                                            "boxdim",   "theta", "transversality", "tsujii", "report"};
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& tag, std::uint64_t seed) {
    return fs::temp_directory_path() / fmt::format("wlab-verify-{}-{:x}", tag, seed);
}

CheckResult byte_identical(std::uint64_t seed) {
    const RunConfig c = small_config(seed);
    const unsigned saved = thread_count();
    std::vector<std::string> outputs[3];
    const unsigned workers[3] = {1, 3, 1};
    for (int run = 0; run < 3; ++run) {
        set_thread_count(workers[run]);
        const fs::path dir = scratch(fmt::format("bytes{}", run), seed);
        fs::remove_all(dir);
        for (const auto& cmd : io_commands()) {
            const CommandResult r = run_command(cmd, c, dir);
            for (const auto& f : r.files) outputs[run].push_back(cmd + "/" + f + "\n" + slurp(dir / f));
        }
        fs::remove_all(dir);
    }
    set_thread_count(saved);
    const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2];
    return {"cli-io", "byte-identical outputs across runs and worker counts", same,
            static_cast<double>(outputs[0].size()), 0, "value is the number of compared artifacts", 0};
}

/// Checks `required` lists of an object schema, following $ref into definitions.
bool conforms(const Json& doc, const Json& schema, const Json& root, std::string& why, const std::string& path) {
    if (schema.contains("$ref")) {
        const std::string ref = schema["$ref"].get<std::string>();
        return conforms(doc, root["definitions"][ref.substr(ref.rfind('/') + 1)], root, why, path);
    }
    if (schema.contains("required")) {
        if (!doc.is_object()) {
            why = path + " is not an object";
            return false;
        }
        for (const auto& k : schema["required"])
            if (!doc.contains(k.get<std::string>())) {
                why = fmt::format("{} lacks '{}'", path, k.get<std::string>());
                return false;
            }
    }
    if (schema.contains("properties") && doc.is_object())
        for (const auto& [k, sub] : schema["properties"].items())
            if (doc.contains(k) && !doc[k].is_null() && sub.is_object() &&
                !conforms(doc[k], sub, root, why, path + "." + k))
                return false;
    if (schema.contains("const") && doc != schema["const"]) {
        why = path + " differs from its constant";
        return false;
    }
    if (schema.contains("enum") &&
        std::find(schema["enum"].begin(), schema["enum"].end(), doc) == schema["enum"].end()) {
        why = path + " is not an allowed value";
        return false;
    }
    if (schema.contains("allOf"))
        for (const auto& part : schema["allOf"]) {
            const Json& cond = part["if"]["properties"]["kind"]["const"];
            if (doc.contains("kind") && doc["kind"] == cond && !conforms(doc, part["then"], root, why, path))
                return false;
        }
    return true;
}

CheckResult artifacts_well_formed(std::uint64_t seed) {
    const RunConfig c = small_config(seed);
    const fs::path dir = scratch("schema", seed);
    fs::remove_all(dir);
    std::size_t checked = 0;
    std::string why;
    bool ok = true;
    for (const auto& cmd : io_commands()) {
        const CommandResult r = run_command(cmd, c, dir);
        ok = ok && r.exit_code == exit_ok;
        if (r.exit_code != exit_ok && why.empty()) why = cmd + " did not exit 0";
        for (const auto& f : r.files) {
            const std::string text = slurp(dir / f);
            ++checked;
            if (f.ends_with(".csv")) {
                const std::string header = text.substr(0, text.find('\n'));
                const bool named = !header.empty() && std::isalpha(static_cast<unsigned char>(header[0]));
                const auto cols = std::count(header.begin(), header.end(), ',');
                std::istringstream rows(text);
                std::string line;
                std::getline(rows, line);
                bool consistent = true;
                while (std::getline(rows, line)) consistent = consistent && std::count(line.begin(), line.end(), ',') == cols;
                if (!named || !consistent) {
                    ok = false;
                    if (why.empty()) why = f + " has no header or ragged rows";
                }
            } else if (f.ends_with(".json") && f != "schema.json") {
                const Json doc = Json::parse(text);
                const Json schema = Json::parse(slurp(dir / "schema.json"));
                std::string w;
                if (!conforms(doc, schema, schema, w, f)) {
                    ok = false;
                    if (why.empty()) why = w;
                }
            }
        }
    }
    fs::remove_all(dir);
    return {"cli-io", "CSV headers present and JSON follows the emitted schema", ok, static_cast<double>(checked), 0,
            why.empty() ? "value is the number of checked artifacts" : why, 0};
}

CheckResult certification_rule() {
    int violations = 0, certified = 0;
    std::vector<SystemSpec> specs{SystemSpec::equal(3).tau_power(0.2).cosine(), SystemSpec::equal(3).constant_lambda(0.6).cosine(),
                                  SystemSpec::equal(2).tau_power(0.5).cosine(), SystemSpec::equal(3).tau_power(0.9).cosine(),
                                  SystemSpec::equal(4).tau_power(0.05).cosine(), SystemSpec::equal(3).tau_power(0.2).sawtooth()};
    for (int l = 2; l <= 6; ++l)
        for (int k = 1; k <= 9; ++k) specs.push_back(SystemSpec::equal(l).tau_power(0.1 * k).cosine());
    for (const auto& spec : specs) {
        const System s(spec);
        const Verdict v = certification_verdict(s);
        bool allowed = false;
        const auto& sp = s.spec();
        if (sp.g_kind == DisplacementKind::cosine && sp.lambda_kind == LambdaKind::tau_power)
            allowed = thm_example2_check(s).certified || cosine_lemma_check(s).holds;
        certified += v.certified ? 1 : 0;
        violations += v.certified && !allowed ? 1 : 0;
    }
    return {"cli-io", "certified verdict only when an analytic check holds", violations == 0 && certified > 0,
            static_cast<double>(violations), 0,
            fmt::format("{} of {} systems certified", certified, specs.size()), 0};
}

}  // namespace

std::vector<CheckResult> run_verify_suite(std::uint64_t seed) {
    const std::vector<std::function<CheckResult()>> checks{
        [&] { return cylinder_multiplicative(seed); },
        [&] { return tau_inverts_rho(seed); },
        [&] { return coding_reverses(seed); },
        [] { return critical_entropy(); },
        [&] { return smb_converges(seed); },
        [&] { return downward_closure(seed); },
        [&] { return graph_lift(seed); },
        [&] { return closed_form_fibre(seed); },
        [&] { return baker_roundtrip(seed); },
        [&] { return oscillation_refines(seed); },
        [&] { return theta_bound(seed); },
        [&] { return eigen_relation(seed); },
        [&] { return fibre_invariance(seed); },
        [&] { return fibres_parallel(seed); },
        [&] { return theta_dx_converges(seed); },
        [] { return pressure_decreasing(); },
        [&] { return bowen_closed_form(seed); },
        [] { return dims_at_equilibrium(); },
        [] { return regime_switch(); },
        [] { return box_count_control(); },
        [&] { return corr_dim_affine(seed); },
        [] { return delta0_agrees(); },
        [] { return cond2_reduces(); },
        [&] { return pair_identity(seed); },
        [&] { return ks_true_mixture(seed); },
        [] { return scan_monotone(); },
        [&] { return byte_identical(seed); },
        [&] { return artifacts_well_formed(seed); },
        [] { return certification_rule(); },
    };
    std::vector<CheckResult> out;
    for (std::size_t k = 0; k < checks.size(); ++k) {
        const auto& check = checks[k];
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r.pass = false;
            r.name = fmt::format("check {}", k + 1);
            r.detail = fmt::format("threw: {}", e.what());
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace wlab
