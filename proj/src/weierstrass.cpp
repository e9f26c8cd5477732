#include "wlab/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "wlab/parallel.hpp"

namespace wlab {

namespace {

// Beyond this many terms lambda^n is accumulated as a log to avoid underflow.
constexpr std::size_t log_space_threshold = 700;

double tail_for(const System& sys, std::size_t depth) {
    const double lmax = sys.lambda_max();
    return sys.g_sup_norm() * std::exp(static_cast<double>(depth) * std::log(lmax)) / (1.0 - lmax);
}

}  // namespace

TruncationPlan truncation_depth(const System& sys, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument(fmt::format("truncation tolerance must be positive, got {}", tol));
    const double lmax = sys.lambda_max();
    const double gsup = sys.g_sup_norm();
    if (gsup == 0.0 || gsup / (1.0 - lmax) <= tol) return {0, gsup / (1.0 - lmax)};
    // ||g|| lmax^N / (1 - lmax) <= tol  <=>  N >= log(tol (1 - lmax) / ||g||) / log(lmax)
    auto n = static_cast<std::size_t>(std::max(0.0, std::ceil(std::log(tol * (1.0 - lmax) / gsup) / std::log(lmax))));
    while (n > 0 && tail_for(sys, n - 1) <= tol) --n;
    while (tail_for(sys, n) > tol) ++n;
    return {n, tail_for(sys, n)};
}

TruncationPlan plan_with_depth(const System& sys, std::size_t depth) { return {depth, tail_for(sys, depth)}; }

double partial_sum(const System& sys, ddouble x, std::size_t terms) {
    double sum = 0.0;
    if (terms <= log_space_threshold) {
        double weight = 1.0;
        for (std::size_t j = 0; j < terms; ++j) {
            const int i = sys.symbol_of(x);
            sum += weight * sys.g_on(i, x.value());
            weight *= sys.lambda(i);
            x = sys.tau_on(i, x);
        }
        return sum;
    }
    double log_weight = 0.0;
    for (std::size_t j = 0; j < terms; ++j) {
        const int i = sys.symbol_of(x);
        sum += std::exp(log_weight) * sys.g_on(i, x.value());
        log_weight += std::log(sys.lambda(i));
        x = sys.tau_on(i, x);
    }
    return sum;
}

double eval_W(const System& sys, ddouble x, const TruncationPlan& plan) { return partial_sum(sys, x, plan.depth); }

GraphSample sample_graph(const System& sys, std::span<const double> xs, const TruncationPlan& plan) {
    GraphSample s;
    s.plan = plan;
    s.points.resize(xs.size());
    parallel_for(xs.size(), [&](std::size_t k) { s.points[k] = {xs[k], eval_W(sys, ddouble(xs[k]), plan)}; });
    return s;
}

GraphSample sample_graph_grid(const System& sys, std::size_t n, const TruncationPlan& plan) {
    GraphSample s;
    s.plan = plan;
    s.points.resize(n);
    parallel_for(n, [&](std::size_t k) {
        const ddouble x = dd_ratio(static_cast<long>(k), static_cast<long>(n));
        s.points[k] = {x.value(), eval_W(sys, x, plan)};
    });
    return s;
}

void write_csv(std::ostream& os, const GraphSample& sample) {
    os << "x,w\n";
    for (const auto& p : sample.points) os << fmt::format("{:.17g},{:.17g}\n", p.x, p.w);
}

SkewPoint skew_forward(const System& sys, ddouble x, double y, std::size_t n) {
    SkewPoint p{x, y, false};
    for (std::size_t k = 0; k < n; ++k) {
        const int i = sys.symbol_of(p.x);
        p.y = (p.y - sys.g_on(i, p.x.value())) / sys.lambda(i);
        p.x = sys.tau_on(i, p.x);
        if (!std::isfinite(p.y) || std::abs(p.y) > 1e300) {
            p.diverged = true;
            p.y = std::copysign(std::numeric_limits<double>::infinity(), p.y);
            break;
        }
    }
    return p;
}

std::pair<ddouble, ddouble> baker_map(const System& sys, ddouble xi, ddouble x) {
    const int i = sys.symbol_of(xi);
    return {sys.tau_on(i, xi), sys.rho(i, x)};
}

std::pair<ddouble, ddouble> baker_inverse(const System& sys, ddouble xi, ddouble x) {
    const int i = sys.symbol_of(x);
    return {sys.rho(i, xi), sys.tau_on(i, x)};
}

ExtendedPoint skew_inverse_step(const System& sys, const ExtendedPoint& p) {
    const int i = sys.symbol_of(p.xi);
    const ddouble z = sys.rho(i, p.x);
    return {sys.tau_on(i, p.xi), z, sys.lambda(i) * p.y + sys.g_on(i, z.value())};
}

ExtendedPoint skew_inverse_iterate(const System& sys, ExtendedPoint p, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) p = skew_inverse_step(sys, p);
    return p;
}

ExtendedPoint skew_inverse_fibre(const System& sys, ddouble xi, ddouble x, double y, std::size_t n) {
    const SymbolWord word = coding_word(sys, xi, n);
    // z_m = rho_[xi]_m(x); tau^j z_n = z_{n-j}
    std::vector<ddouble> z(n + 1);
    z[0] = x;
    for (std::size_t m = 1; m <= n; ++m) z[m] = sys.rho(word[m - 1], z[m - 1]);

    double lambda_n = 1.0;
    double w_n = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const int sym = word[n - 1 - j];
        w_n += lambda_n * sys.g_on(sym, z[n - j].value());
        lambda_n *= sys.lambda(sym);
    }
    ddouble xi_n = xi;
    for (std::size_t m = 0; m < n; ++m) xi_n = sys.tau_on(word[m], xi_n);
    return {xi_n, z[n], lambda_n * y + w_n};
}

double invariance_residual(const System& sys, ddouble xi, ddouble x, const TruncationPlan& plan) {
    const int i = sys.symbol_of(xi);
    const ddouble z = sys.rho(i, x);
    const double image = sys.lambda(i) * eval_W(sys, x, plan) + sys.g_on(i, z.value());
    return std::abs(image - eval_W(sys, z, plan));
}

double oscillation_ratio(const System& sys, ddouble x, std::size_t depth, std::size_t samples, const TruncationPlan& plan) {
    if (samples < 2) throw std::invalid_argument("oscillation_ratio needs at least 2 samples");
    const SymbolWord word = coding_word(sys, x, depth);
    double lambda_n = 1.0;
    for (std::size_t k = 0; k < word.size(); ++k) lambda_n *= sys.lambda(word[k]);

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t s = 0; s < samples; ++s) {
        // point of I_N(x): rho_{w_1} o ... o rho_{w_N}(u)
        ddouble u = dd_ratio(static_cast<long>(s), static_cast<long>(samples - 1));
        for (std::size_t k = word.size(); k-- > 0;) u = sys.rho(word[k], u);
        const double w = eval_W(sys, u, plan);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    return (hi - lo) / lambda_n;
}

}  // namespace wlab
