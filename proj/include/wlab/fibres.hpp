#pragma once

// Strong stable direction X3 of the extension F, the slope field Theta and the
// strong stable fibres l_ss.

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "wlab/system.hpp"
#include "wlab/weierstrass.hpp"

namespace wlab {

/// Truncation of the X3 series.
struct ThetaField {
    std::size_t depth = 0;    ///< N_theta
    double tail_bound = 0.0;  ///< gamma_max^N (||y lambda'|| + ||g'||) / (1 - gamma_max)
};

/// Smallest depth whose geometric tail is below `target`.
ThetaField theta_field(const System& sys, double target = 1e-10);
ThetaField theta_field_with_depth(const System& sys, std::size_t depth);

/// X3(xi, x, y) = -sum_{n=1}^{N} gamma^n(z_n) (F^{n-1}(y) lambda'(z_n) + g'(z_n)),
/// z_n = rho_[xi]_n(x). Only the first N symbols of `xi` are read.
double x3_eval(const System& sys, const SymbolWord& xi, double x, double y, std::size_t depth);
double x3_eval(const System& sys, ddouble xi, double x, double y, std::size_t depth);

/// Theta(xi, x) = X3(xi, x, W(x)).
double theta_eval(const System& sys, const SymbolWord& xi, double x, std::size_t depth);
double theta_eval(const System& sys, ddouble xi, double x, std::size_t depth);

/// dTheta/dx by term-wise differentiation. Throws std::domain_error for the
/// sawtooth when some z_n hits a kink.
double theta_dx_eval(const System& sys, const SymbolWord& xi, double x, std::size_t depth);
double theta_dx_eval(const System& sys, ddouble xi, double x, std::size_t depth);

/// sup |dTheta/dx| bound (2 pi)^2 q / (1 - q), q = max gamma / tau'.
double theta_dx_bound(const System& sys);

struct ThetaSample {
    double xi = 0.0;
    double x = 0.0;
    double theta = 0.0;
};

/// CSV `xi,x,theta`.
void write_theta_csv(std::ostream& os, const std::vector<ThetaSample>& samples);

class FibreFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct FibreOptions {
    double step = 1.0 / 4096;
    int refinements = 1;       ///< step halvings allowed before giving up
    double tolerance = 1e-8;   ///< midpoint slope residual target
};

struct FibreCurve {
    SymbolWord xi;
    double x = 0.0;
    double y = 0.0;
    std::vector<double> v;      ///< increasing, includes the anchor
    std::vector<double> l;      ///< l_ss(v)
    std::vector<double> slope;  ///< X3(xi, v, l_ss(v))
    double step = 0.0;
    int order = 4;
    double max_residual = 0.0;  ///< max |Hermite derivative - X3| at step midpoints
    std::size_t depth = 0;

    /// Cubic Hermite interpolation of the stored nodes.
    double operator()(double u) const;
};

/// RK4 solution of l' = X3(xi, v, l), l(x) = y on [0, 1], integrated from x
/// outward. Sawtooth systems, whose X3 is a step function in v, integrate the
/// exact antiderivative instead.
FibreCurve fibre_solve(const System& sys, const SymbolWord& xi, double x, double y, std::size_t depth,
                       const FibreOptions& opts = {});

/// l_ss(v) - y by composite Simpson quadrature of X3 (valid because lambda' = 0).
double fibre_simpson(const System& sys, const SymbolWord& xi, double x, double v, std::size_t depth, std::size_t panels);

/// l_ss(v) - y from the closed-form antiderivative
/// -sum gamma^n (g(z_n(v)) - g(z_n(x))) / |I_[xi]_n|.
double fibre_antiderivative(const System& sys, const SymbolWord& xi, double x, double v, std::size_t depth);

/// Single fibre value l_ss(v) by RK4 from x to v.
double fibre_point(const System& sys, const SymbolWord& xi, double x, double y, double v, std::size_t depth,
                   double step = 1.0 / 4096);

void write_fibre_csv(std::ostream& os, const FibreCurve& curve);

/// max over the grid of |l'(rho_i v) - lambda_i l(v) - g(rho_i v)| where l is the
/// fibre through (xi, x, y), l' the fibre through F(xi, x, y) and i = xi_1.
/// `xi` must carry depth + 1 symbols.
double fibre_invariance_residual(const System& sys, const SymbolWord& xi, double x, double y, std::size_t depth,
                                 std::size_t grid = 257);

/// Fibre projection to the axis v = 0.
double q_xi_eval(const System& sys, const SymbolWord& xi, double x, const TruncationPlan& plan, std::size_t depth);

/// q_xi for many x with one integration pass over [0, 1].
class QProjector {
  public:
    QProjector(const System& sys, SymbolWord xi, const TruncationPlan& plan, std::size_t depth,
               double step = 1.0 / 4096);
    double operator()(double x) const;

  private:
    const System& sys_;
    SymbolWord xi_;
    TruncationPlan plan_;
    std::size_t depth_;
    double step_;
    std::vector<double> integral_;  ///< int_0^{k step} X3
};

/// || DF (0, 1, X3)^T - (1 / tau'(rho_k(xi) x)) (0, 1, X3 o F)^T || with DF by
/// central differences of step h. Throws std::domain_error when xi or x is
/// within h of a partition point or of the ends of [0, 1].
double eigen_residual(const System& sys, ddouble xi, double x, double y, double h, std::size_t depth);

/// (l_(xi,x,y)(v) - l_(xi,x,y')(v)) / (y - y').
double parallel_check(const System& sys, const SymbolWord& xi, double x, double y, double y2, double v,
                      std::size_t depth);

}  // namespace wlab
