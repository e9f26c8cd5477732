#pragma once

// Pressure, the Bowen equation, closed-form dimension predictions and the
// empirical estimators (box counting, correlation and pointwise dimension).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlab/system.hpp"
#include "wlab/weierstrass.hpp"

namespace wlab {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// P((1 - s) log tau' + log lambda) = log sum_i |I_i|^s / gamma_i.
double pressure_eval(const System& sys, double s);
/// (1/N) log sum_{|w| = N} exp(sup_{I_w} S_N phi), sup taken over the endpoints
/// and midpoint of each cylinder.
double pressure_cylinder_approx(const System& sys, double s, std::size_t depth);

class BracketFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct BowenSolution {
    double s_star = 0.0;
    double residual = 0.0;
    double bracket_lo = 1.0;
    double bracket_hi = 2.0;
    std::size_t iterations = 0;
    std::vector<double> p_star;  ///< |I_i|^{s*} / gamma_i
};

/// Root of s -> pressure_eval(sys, s) on [1, 2]. Throws BracketFailure when
/// the pressure does not change sign there.
BowenSolution bowen_solve(const System& sys);

struct DimPrediction {
    double entropy = 0.0;
    double log_tau_prime = 0.0;
    double log_lambda = 0.0;
    double first = 0.0;   ///< 1 + (h + int log lambda) / int log tau'
    double second = 0.0;  ///< h / (-int log lambda)
    double dim_mu = 0.0;  ///< min of the two
    int argmin = 0;       ///< 0 when `first` is the minimum
    bool at_least_one = false;  ///< h >= -int log lambda
    double graph_dim = 0.0;     ///< s(tau, lambda)
};

DimPrediction formula_dims(const BernoulliMeasure& measure, const System& sys);

struct BoxCountResult {
    std::vector<int> exponents;     ///< eps_k = 2^-exponents[k]
    std::vector<double> scales;
    std::vector<double> counts;     ///< sum over columns of max(1, envelope height / eps)
    std::vector<double> box_counts; ///< eps-boxes met by the column envelopes
    std::vector<double> raw_counts; ///< distinct boxes hit by sample points
    double envelope_pad = 0.0;      ///< extrapolated sub-spacing oscillation added to each column
    double envelope_exponent = 0.0; ///< fitted power of the spacing
    LinearFit fit;
    std::size_t window_first = 0;   ///< index range of the fit window
    std::size_t window_last = 0;
    double min_points_per_column = 0.0;
    bool undersampled = false;
    std::string warning;
};

/// Box counts of the graph over scales 2^-k0 ... 2^-k1 after min/max
/// normalisation of both coordinates. Each column is covered by the range of
/// the samples in it, widened by the oscillation expected below the sample
/// spacing. The slope of log counts is fitted after dropping `drop` scales at
/// each end.
BoxCountResult box_count_graph(const GraphSample& sample, int k0, int k1, std::size_t drop = 2);

struct CorrDimEstimate {
    std::vector<double> radii;
    std::vector<double> C;
    LinearFit fit;
    std::size_t n = 0;
    std::size_t window_first = 0;
    std::size_t window_last = 0;
    bool degenerate = false;
};

/// Pair correlation C(r) = 2 / (n (n - 1)) #{i < j : |v_i - v_j| < r} at
/// r = range * 2^-k, k = k_hi ... k_lo, slope fitted after dropping `drop` radii at each end.
CorrDimEstimate correlation_dim(std::vector<double> values, int k_lo = 4, int k_hi = 16, std::size_t drop = 2);

struct PointwiseDimResult {
    std::vector<double> radii;
    std::vector<double> slopes;  ///< one per anchor with a usable fit
    double median = 0.0;
    double iqr = 0.0;
    double mean = 0.0;
    double mean_stderr = 0.0;
    std::size_t anchors = 0;
    std::size_t references = 0;
};

struct PointwiseOptions {
    std::size_t anchors = 1000;
    std::size_t references = 100000;
    int k_lo = 3;   ///< largest radius 2^-k_lo
    int k_hi = 12;  ///< smallest radius 2^-k_hi
    std::size_t min_neighbours = 10;
    std::size_t sample_depth = 40;
    double tol = 1e-9;
};

/// Slopes of log mu(B(p, r)) against log r at graph points p = (x, W(x)),
/// x ~ nu_p.
PointwiseDimResult pointwise_dim_mu(const System& sys, const BernoulliMeasure& measure, std::uint64_t seed,
                                    const PointwiseOptions& opts = {});

void write_box_csv(std::ostream& os, const BoxCountResult& r);
void write_corr_csv(std::ostream& os, const CorrDimEstimate& r);

}  // namespace wlab
