#pragma once

// Evaluation of W(x) = sum_n lambda^n(x) g(tau^n x) and the skew products
// G(x, y) = (tau x, (y - g(x)) / lambda(x)) and its invertible extension
// F(xi, x, y) = (B(xi, x), lambda(rho_k(xi) x) y + g(rho_k(xi) x)).

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "wlab/system.hpp"

namespace wlab {

struct TruncationPlan {
    std::size_t depth = 0;   ///< number of series terms N
    double tail_bound = 0.0; ///< ||g|| lambda_max^N / (1 - lambda_max)
};

/// Smallest N with ||g|| lambda_max^N / (1 - lambda_max) <= tol.
TruncationPlan truncation_depth(const System& sys, double tol);
/// Plan with a fixed depth and the matching tail bound.
TruncationPlan plan_with_depth(const System& sys, std::size_t depth);

/// W_N(x), the partial sum with N = plan.depth terms.
double eval_W(const System& sys, ddouble x, const TruncationPlan& plan);
double partial_sum(const System& sys, ddouble x, std::size_t terms);

struct GraphPoint {
    double x = 0.0;
    double w = 0.0;
};

struct GraphSample {
    std::vector<GraphPoint> points;
    TruncationPlan plan;
};

GraphSample sample_graph(const System& sys, std::span<const double> xs, const TruncationPlan& plan);
/// Graph on the grid x_k = k / n, k = 0..n-1.
GraphSample sample_graph_grid(const System& sys, std::size_t n, const TruncationPlan& plan);
/// CSV with header `x,w`, 17 significant digits.
void write_csv(std::ostream& os, const GraphSample& sample);

struct SkewPoint {
    ddouble x;
    double y = 0.0;
    bool diverged = false;  ///< |y| left the representable range
};

/// n-fold iterate of G.
SkewPoint skew_forward(const System& sys, ddouble x, double y, std::size_t n);

struct ExtendedPoint {
    ddouble xi;
    ddouble x;
    double y = 0.0;
};

/// B(xi, x) = (tau xi, rho_k(xi)(x))
std::pair<ddouble, ddouble> baker_map(const System& sys, ddouble xi, ddouble x);
/// B^-1(xi, x) = (rho_k(x)(xi), tau x)
std::pair<ddouble, ddouble> baker_inverse(const System& sys, ddouble xi, ddouble x);

/// One application of F.
ExtendedPoint skew_inverse_step(const System& sys, const ExtendedPoint& p);
/// F^n by repeated application.
ExtendedPoint skew_inverse_iterate(const System& sys, ExtendedPoint p, std::size_t n);
/// F^n in closed form: lambda^n(rho_[xi]_n x) y + W_n(rho_[xi]_n x).
ExtendedPoint skew_inverse_fibre(const System& sys, ddouble xi, ddouble x, double y, std::size_t n);

/// |lambda(rho_i x) W(x) + g(rho_i x) - W(rho_i x)| with i = k(xi).
double invariance_residual(const System& sys, ddouble xi, ddouble x, const TruncationPlan& plan);

/// sup over sampled u, v in I_N(x) of |W(u) - W(v)|, divided by lambda^N(x).
double oscillation_ratio(const System& sys, ddouble x, std::size_t depth, std::size_t samples, const TruncationPlan& plan);

}  // namespace wlab
