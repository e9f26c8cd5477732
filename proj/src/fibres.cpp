#include "wlab/fibres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace wlab {

namespace {

constexpr double pi = std::numbers::pi;

void require_symbols(const SymbolWord& xi, std::size_t depth) {
    if (xi.size() < depth)
        throw std::invalid_argument(fmt::format("xi word has {} symbols, depth {} requested", xi.size(), depth));
}

double g_second_sup(const System& sys) {
    return sys.spec().g_kind == DisplacementKind::cosine ? 4.0 * pi * pi : 0.0;
}

bool is_sawtooth(const System& sys) { return sys.spec().g_kind == DisplacementKind::sawtooth; }

// g(b) - g(a) on the branch i, accurate when b - a = d is tiny relative to a.
double g_increment(const System& sys, int i, double a, double b, double d) {
    switch (sys.spec().g_kind) {
        case DisplacementKind::cosine:
            return -2.0 * std::sin(pi * (a + b)) * std::sin(pi * d);
        case DisplacementKind::piecewise_linear:
            return sys.spec().g_slopes[i] * d;
        case DisplacementKind::sawtooth: {
            const double lo = std::min(a, b), hi = std::max(a, b);
            // kinks of dist(., Z) at k / 2
            const double first = std::floor(2.0 * lo) / 2.0 + 0.5;
            if (first >= hi) return sys.g_prime_on(i, 0.5 * (a + b)) * d;
            return sys.g(b) - sys.g(a);
        }
    }
    return 0.0;
}

double rk4_step(const System& sys, const SymbolWord& xi, std::size_t depth, double v, double l, double h) {
    const double k1 = x3_eval(sys, xi, v, l, depth);
    const double k2 = x3_eval(sys, xi, v + 0.5 * h, l + 0.5 * h * k1, depth);
    const double k3 = x3_eval(sys, xi, v + 0.5 * h, l + 0.5 * h * k2, depth);
    const double k4 = x3_eval(sys, xi, v + h, l + h * k3, depth);
    return l + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

double integrate(const System& sys, const SymbolWord& xi, double x, double y, double v, std::size_t depth,
                 double step) {
    if (is_sawtooth(sys)) return y + fibre_antiderivative(sys, xi, x, v, depth);
    const double span = v - x;
    if (span == 0.0) return y;
    const auto n = static_cast<std::size_t>(std::ceil(std::abs(span) / step));
    const double h = span / static_cast<double>(n);
    double l = y;
    for (std::size_t k = 0; k < n; ++k) l = rk4_step(sys, xi, depth, x + h * static_cast<double>(k), l, h);
    return l;
}

double hermite(double a, double b, double la, double lb, double sa, double sb, double u) {
    const double h = b - a;
    const double t = (u - a) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * la + (t3 - 2 * t2 + t) * h * sa + (-2 * t3 + 3 * t2) * lb + (t3 - t2) * h * sb;
}

FibreCurve solve_once(const System& sys, const SymbolWord& xi, double x, double y, std::size_t depth, double step) {
    FibreCurve c;
    c.xi = xi;
    c.x = x;
    c.y = y;
    c.step = step;
    c.depth = depth;
    const bool exact = is_sawtooth(sys);
    c.order = exact ? 0 : 4;

    const auto cells = static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
    std::vector<double> left_nodes, right_nodes;
    for (std::size_t k = 0; k <= cells; ++k) {
        const double v = std::min(1.0, static_cast<double>(k) * step);
        if (v < x) left_nodes.push_back(v);
        else if (v > x) right_nodes.push_back(v);
    }

    std::vector<double> lv, ll;
    double v = x, l = y;
    for (auto it = left_nodes.rbegin(); it != left_nodes.rend(); ++it) {
        l = exact ? y + fibre_antiderivative(sys, xi, x, *it, depth) : rk4_step(sys, xi, depth, v, l, *it - v);
        v = *it;
        lv.push_back(v);
        ll.push_back(l);
    }
    std::reverse(lv.begin(), lv.end());
    std::reverse(ll.begin(), ll.end());
    lv.push_back(x);
    ll.push_back(y);
    v = x;
    l = y;
    for (double node : right_nodes) {
        l = exact ? y + fibre_antiderivative(sys, xi, x, node, depth) : rk4_step(sys, xi, depth, v, l, node - v);
        v = node;
        lv.push_back(v);
        ll.push_back(l);
    }
    c.v = std::move(lv);
    c.l = std::move(ll);
    c.slope.resize(c.v.size());
    for (std::size_t k = 0; k < c.v.size(); ++k) c.slope[k] = x3_eval(sys, xi, c.v[k], c.l[k], depth);

    if (!exact) {
        for (std::size_t k = 0; k + 1 < c.v.size(); ++k) {
            const double a = c.v[k], b = c.v[k + 1];
            const double h = b - a;
            const double mid = 0.5 * (a + b);
            const double d = 1.5 * (c.l[k + 1] - c.l[k]) / h - 0.25 * (c.slope[k] + c.slope[k + 1]);
            const double lm = hermite(a, b, c.l[k], c.l[k + 1], c.slope[k], c.slope[k + 1], mid);
            c.max_residual = std::max(c.max_residual, std::abs(d - x3_eval(sys, xi, mid, lm, depth)));
        }
    }
    return c;
}

}  // namespace

ThetaField theta_field_with_depth(const System& sys, std::size_t depth) {
    const double gmax = sys.gamma_max();
    return {depth, std::pow(gmax, static_cast<double>(depth)) * sys.g_prime_sup_norm() / (1.0 - gmax)};
}

ThetaField theta_field(const System& sys, double target) {
    if (!(target > 0.0)) throw std::invalid_argument("theta tail target must be positive");
    std::size_t n = 1;
    while (theta_field_with_depth(sys, n).tail_bound > target) ++n;
    return theta_field_with_depth(sys, n);
}

double x3_eval(const System& sys, const SymbolWord& xi, double x, double y, std::size_t depth) {
    require_symbols(xi, depth);
    const bool track_fibre = !sys.lambda_piecewise_constant();
    double z = x, gam = 1.0, fibre = y, sum = 0.0;
    for (std::size_t n = 0; n < depth; ++n) {
        const int s = xi[n];
        z = sys.left(s) + sys.length(s) * z;
        gam *= sys.gamma(s);
        sum += gam * (fibre * sys.lambda_prime(s) + sys.g_prime_on(s, z));
        if (track_fibre) fibre = sys.lambda(s) * fibre + sys.g_on(s, z);
    }
    return -sum;
}

double x3_eval(const System& sys, ddouble xi, double x, double y, std::size_t depth) {
    return x3_eval(sys, coding_word(sys, xi, depth), x, y, depth);
}

double theta_eval(const System& sys, const SymbolWord& xi, double x, std::size_t depth) {
    double y = 0.0;
    if (!sys.lambda_piecewise_constant()) y = eval_W(sys, ddouble(x), truncation_depth(sys, 1e-12));
    return x3_eval(sys, xi, x, y, depth);
}

double theta_eval(const System& sys, ddouble xi, double x, std::size_t depth) {
    return theta_eval(sys, coding_word(sys, xi, depth), x, depth);
}

double theta_dx_eval(const System& sys, const SymbolWord& xi, double x, std::size_t depth) {
    require_symbols(xi, depth);
    const bool saw = is_sawtooth(sys);
    double z = x, gam = 1.0, dz = 1.0, sum = 0.0;
    for (std::size_t n = 0; n < depth; ++n) {
        const int s = xi[n];
        z = sys.left(s) + sys.length(s) * z;
        dz *= sys.length(s);
        gam *= sys.gamma(s);
        if (saw) {
            const double twice = 2.0 * z;
            if (twice == std::floor(twice))
                throw std::domain_error(fmt::format("sawtooth kink at z_{} = {}; derivative undefined", n + 1, z));
        }
        sum += gam * dz * sys.g_second_on(s, z);
    }
    return -sum;
}

double theta_dx_eval(const System& sys, ddouble xi, double x, std::size_t depth) {
    return theta_dx_eval(sys, coding_word(sys, xi, depth), x, depth);
}

double theta_dx_bound(const System& sys) {
    double q = 0.0;
    for (int i = 0; i < sys.cells(); ++i) q = std::max(q, sys.gamma(i) * sys.length(i));
    return g_second_sup(sys) * q / (1.0 - q);
}

void write_theta_csv(std::ostream& os, const std::vector<ThetaSample>& samples) {
    os << "xi,x,theta\n";
    for (const auto& s : samples) os << fmt::format("{:.17g},{:.17g},{:.17g}\n", s.xi, s.x, s.theta);
}

double FibreCurve::operator()(double u) const {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (u <= v.front()) return l.front();
    if (u >= v.back()) return l.back();
    const auto it = std::upper_bound(v.begin(), v.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - v.begin()) - 1;
    return hermite(v[k], v[k + 1], l[k], l[k + 1], slope[k], slope[k + 1], u);
}

FibreCurve fibre_solve(const System& sys, const SymbolWord& xi, double x, double y, std::size_t depth,
                       const FibreOptions& opts) {
    require_symbols(xi, depth);
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(fmt::format("fibre anchor x = {} outside [0, 1]", x));
    double step = opts.step;
    for (int level = 0;; ++level) {
        FibreCurve c = solve_once(sys, xi, x, y, depth, step);
        if (c.max_residual < opts.tolerance) return c;
        if (level >= opts.refinements)
            throw FibreFailure(fmt::format("fibre residual {:.3e} above {:.1e} at step {}", c.max_residual,
                                           opts.tolerance, step));
        step *= 0.5;
    }
}

double fibre_simpson(const System& sys, const SymbolWord& xi, double x, double v, std::size_t depth,
                     std::size_t panels) {
    if (panels == 0) throw std::invalid_argument("Simpson quadrature needs at least one panel");
    const double h = (v - x) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t k = 0; k < panels; ++k) {
        const double a = x + h * static_cast<double>(k);
        sum += x3_eval(sys, xi, a, 0.0, depth) + 4.0 * x3_eval(sys, xi, a + 0.5 * h, 0.0, depth) +
               x3_eval(sys, xi, a + h, 0.0, depth);
    }
    return sum * h / 6.0;
}

double fibre_antiderivative(const System& sys, const SymbolWord& xi, double x, double v, std::size_t depth) {
    require_symbols(xi, depth);
    double za = x, zb = v, gam = 1.0, scale = 1.0, sum = 0.0;
    const double dv = v - x;
    for (std::size_t n = 0; n < depth; ++n) {
        const int s = xi[n];
        za = sys.left(s) + sys.length(s) * za;
        zb = sys.left(s) + sys.length(s) * zb;
        scale *= sys.length(s);
        gam *= sys.gamma(s);
        sum += gam * g_increment(sys, s, za, zb, scale * dv) / scale;
    }
    return -sum;
}

double fibre_point(const System& sys, const SymbolWord& xi, double x, double y, double v, std::size_t depth,
                   double step) {
    require_symbols(xi, depth);
    return integrate(sys, xi, x, y, v, depth, step);
}

void write_fibre_csv(std::ostream& os, const FibreCurve& curve) {
    os << "v,l_ss\n";
    for (std::size_t k = 0; k < curve.v.size(); ++k) os << fmt::format("{:.17g},{:.17g}\n", curve.v[k], curve.l[k]);
}

double fibre_invariance_residual(const System& sys, const SymbolWord& xi, double x, double y, std::size_t depth,
                                 std::size_t grid) {
    require_symbols(xi, depth + 1);
    if (grid < 2) throw std::invalid_argument("fibre invariance grid needs at least 2 points");
    const int i = xi[0];
    const FibreCurve here = fibre_solve(sys, xi, x, y, depth);
    const double x2 = sys.rho(i, ddouble(x)).value();
    const double y2 = sys.lambda(i) * y + sys.g_on(i, x2);
    const FibreCurve there = fibre_solve(sys, xi.shifted(1), x2, y2, depth);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid; ++k) {
        const double v = static_cast<double>(k) / static_cast<double>(grid - 1);
        const double image = sys.rho(i, ddouble(v)).value();
        worst = std::max(worst, std::abs(there(image) - sys.lambda(i) * here(v) - sys.g_on(i, image)));
    }
    return worst;
}

double q_xi_eval(const System& sys, const SymbolWord& xi, double x, const TruncationPlan& plan, std::size_t depth) {
    return fibre_point(sys, xi, x, eval_W(sys, ddouble(x), plan), 0.0, depth);
}

QProjector::QProjector(const System& sys, SymbolWord xi, const TruncationPlan& plan, std::size_t depth, double step)
    : sys_(sys), xi_(std::move(xi)), plan_(plan), depth_(depth), step_(step) {
    require_symbols(xi_, depth_);
    const auto cells = static_cast<std::size_t>(std::ceil(1.0 / step_ - 1e-9));
    integral_.assign(cells + 1, 0.0);
    if (is_sawtooth(sys_)) return;
    for (std::size_t k = 0; k < cells; ++k)
        integral_[k + 1] = rk4_step(sys_, xi_, depth_, static_cast<double>(k) * step_, integral_[k], step_);
}

double QProjector::operator()(double x) const {
    const double w = eval_W(sys_, ddouble(x), plan_);
    if (is_sawtooth(sys_)) return w - fibre_antiderivative(sys_, xi_, 0.0, x, depth_);
    auto k = static_cast<std::size_t>(std::floor(x / step_));
    k = std::min(k, integral_.size() - 1);
    const double base = static_cast<double>(k) * step_;
    const double part = base == x ? integral_[k] : rk4_step(sys_, xi_, depth_, base, integral_[k], x - base);
    return w - part;
}

double eigen_residual(const System& sys, ddouble xi, double x, double y, double h, std::size_t depth) {
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    const double xd = xi.value();
    for (int k = 0; k <= sys.cells(); ++k) {
        const double a = k == sys.cells() ? 1.0 : sys.left(k);
        if (std::abs(xd - a) <= h) throw std::domain_error(fmt::format("xi = {} within {} of partition point {}", xd, h, a));
        if (std::abs(x - a) <= h) throw std::domain_error(fmt::format("x = {} within {} of partition point {}", x, h, a));
    }
    const int i = sys.symbol_of(xi);
    const double li = sys.length(i), ai = sys.left(i), lam = sys.lambda(i);
    auto F = [&](const Eigen::Vector3d& p) {
        const double z = ai + li * p[1];
        return Eigen::Vector3d((p[0] - ai) / li, z, lam * p[2] + sys.g_on(i, z));
    };
    const Eigen::Vector3d p(xd, x, y);
    Eigen::Matrix3d DF;
    for (int c = 0; c < 3; ++c) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e[c] = h;
        DF.col(c) = (F(p + e) - F(p - e)) / (2.0 * h);
    }
    const SymbolWord word = coding_word(sys, xi, depth + 1);
    const Eigen::Vector3d dir(0.0, 1.0, x3_eval(sys, word, x, y, depth));
    const double z = sys.rho(i, ddouble(x)).value();
    const Eigen::Vector3d image(0.0, 1.0, x3_eval(sys, word.shifted(1), z, lam * y + sys.g_on(i, z), depth));
    return (DF * dir - li * image).norm();
}

double parallel_check(const System& sys, const SymbolWord& xi, double x, double y, double y2, double v,
                      std::size_t depth) {
    if (y == y2) throw std::invalid_argument("parallel_check needs y != y'");
    return (fibre_point(sys, xi, x, y, v, depth) - fibre_point(sys, xi, x, y2, v, depth)) / (y - y2);
}

}  // namespace wlab
