#pragma once

// Sufficient conditions for equality of Hausdorff and box dimension: the
// separation constant delta0, the penalty G(s, t), the cosine transversality
// test, empirical (eps, delta) scans, correlation integrals of the Theta
// distributions and the self-similarity of those distributions.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wlab/dimension.hpp"
#include "wlab/fibres.hpp"
#include "wlab/system.hpp"

namespace wlab {

/// G(s, t) = (s^-1 (t^2 / (1 - t) + (t - s) / 2))^2 for 0 < s <= t < 1.
double G_eval(double s, double t);

struct Delta0 {
    double value = 1.0;
    int i = 0;
    int j = 1;
    double x = 0.0;
};

/// inf_{i != j} inf_x sin^2(pi (rho_i(x) - rho_j(x))) from the endpoints x = 0, 1.
Delta0 delta0_compute(const System& sys);
/// Same infimum over the grid x = k / grid_n, k = 0..grid_n.
Delta0 delta0_grid(const System& sys, std::size_t grid_n);

struct Example2Check {
    std::vector<std::vector<double>> cond1_margins;  ///< |I_j|^{-theta/(2-theta)} - |I_i|/|I_j|, diagonal 0
    double cond1_min_margin = 0.0;
    bool cond1 = false;
    double g_first = 0.0;   ///< G(min |I|^{1-theta}, max |I|^{1-theta})
    double g_second = 0.0;  ///< G(min |I|^{2-theta}, max |I|^{2-theta})
    double cond2_sum = 0.0;
    double delta0 = 0.0;
    double cond2_margin = 0.0;
    bool cond2 = false;
    bool certified = false;
    double claimed_dim = 0.0;  ///< 2 - theta when certified, NaN otherwise
};

/// Requires cosine g and tau-power lambda; throws std::invalid_argument otherwise.
Example2Check thm_example2_check(const System& sys);

struct CosineLemmaCheck {
    double g_gamma = 0.0;           ///< G(min gamma, max gamma)
    double g_gamma_over_tau = 0.0;  ///< G(min gamma / tau', max gamma / tau')
    double sum = 0.0;
    double delta0 = 0.0;
    bool holds = false;
};

/// Requires cosine g and tau-power lambda; throws std::invalid_argument otherwise.
CosineLemmaCheck cosine_lemma_check(const System& sys);

struct ScanOptions {
    std::size_t n_xi = 64;
    std::size_t n_eta = 64;
    std::size_t n_x = 256;
    std::size_t depth = 0;  ///< 0 selects theta_field(sys).depth
};

struct ScanResult {
    double margin = 0.0;  ///< min over the grid of max{|dTheta|, |dTheta'|}
    double xi = 0.0;
    double eta = 0.0;
    double x = 0.0;
    std::size_t evaluated = 0;
};

/// xi_k = a_i + |I_i| k / n_xi, eta_k = a_j + |I_j| k / n_eta, x_k = k / (n_x - 1).
ScanResult eps_delta_scan(const System& sys, int i, int j, const ScanOptions& opts = {});
/// Minimum of eps_delta_scan over all ordered pairs i < j.
ScanResult eps_delta_scan_all(const System& sys, const ScanOptions& opts = {});

/// Draws a depth-long word from the measure.
SymbolWord draw_word(const BernoulliMeasure& measure, std::size_t depth, Rng& rng);

/// n samples of Theta(xi, x) with xi ~ nu_p, drawn in fixed blocks so the
/// values do not depend on the worker count.
std::vector<double> theta_distribution(const System& sys, const BernoulliMeasure& measure, double x, std::size_t n,
                                       std::uint64_t seed, std::size_t depth = 0);

struct CorrelationIntegralOptions {
    std::size_t n_x = 200;      ///< base points x ~ nu_p
    std::size_t n_xi = 200;     ///< words per base point; all pairs are used
    std::size_t depth = 0;      ///< 0 selects theta_field(sys).depth
    std::size_t min_hits = 20;  ///< pairs with |dTheta| < 2r needed to trust a radius
};

struct CorrelationIntegralResult {
    std::vector<double> radii;
    std::vector<double> values;  ///< I_p(r)
    std::vector<double> stderr_values;  ///< jackknife over base points
    std::vector<std::size_t> hits;
    std::vector<bool> starved;
    std::size_t n_x = 0;
    std::size_t pairs_per_x = 0;
    double truncation_tail = 0.0;
};

/// I_p(r) = r^-2 E_x E_{xi, xi'} max(0, 2r - |Theta(xi, x) - Theta(xi', x)|).
CorrelationIntegralResult correlation_integral(const System& sys, const BernoulliMeasure& measure,
                                               const std::vector<double>& radii, std::uint64_t seed,
                                               const CorrelationIntegralOptions& opts = {});

/// Exact pair sum for finitely many atoms (value, weight) of one distribution:
/// r^-2 sum_{a, b} w_a w_b max(0, 2r - |v_a - v_b|).
double pair_norm_sq(const std::vector<double>& values, const std::vector<double>& weights, double r);

struct RecursionCheck {
    double beta = 0.0;
    double eps = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    double constant = 0.0;  ///< 8 delta^-1 max(4 alpha / eps, 1)
    CorrelationIntegralResult integrals;  ///< at r_k = eps (min gamma)^k / 8
    std::vector<double> slack;   ///< beta I(r_{k-1}) + constant - I(r_k), k >= 1
    std::vector<double> sigma;   ///< Monte-Carlo standard error of the slack
    std::vector<double> bound;   ///< beta^k I(r_0) + constant / (1 - beta)
    bool holds = false;          ///< every slack > -3 sigma
};

/// (max |I_i|^2 / lambda_i) / (min gamma)^2
double beta_constant(const System& sys);

/// Checks I(r_k) <= beta I(r_{k-1}) + 8 delta^-1 max(4 alpha / eps, 1) under the
/// critical measure. eps = delta = `transversal` (a transversality margin).
RecursionCheck beta_and_recursion_check(const System& sys, double transversal, std::size_t levels,
                                        std::uint64_t seed, const CorrelationIntegralOptions& opts = {});

struct KsResult {
    double distance = 0.0;
    double critical = 0.0;  ///< 1% two-sample critical value
    bool pass = false;      ///< distance below critical
    std::size_t n = 0;
};

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);
/// sqrt(-log(level / 2) / 2) sqrt((n + m) / (n m))
double ks_critical(std::size_t n, std::size_t m, double level = 0.01);

/// Compares Theta(., x) under nu_p with the mixture sum_i q_i f_* zeta_{p, rho_i x},
/// f(y) = gamma_i (y - g'(rho_i x)). `mixture` defaults to p; a different vector
/// gives the perturbation control.
KsResult selfsimilarity_check(const System& sys, const BernoulliMeasure& measure, double x, std::size_t n,
                              std::uint64_t seed, const std::vector<double>& mixture = {}, std::size_t depth = 0);

struct SweepFamily {
    double first_length = 0.5;  ///< |I_0|
    double gamma0 = 0.5;
    double gamma1 = 0.5;
    double slope0 = 1.0;   ///< g = slope_i x + intercept_i on I_i
    double slope1 = -1.0;
    double intercept0 = 0.0;
    double intercept1 = 1.0;
    bool sawtooth = false;  ///< use g = dist(x, Z) instead of the affine pieces

    bool operator==(const SweepFamily&) const = default;
};

/// SystemSpec of the family member at t; lambda_i = t |I_i| / gamma_i. Throws
/// std::invalid_argument naming the violated endpoint when t is outside
/// (max gamma_i, min gamma_i / sqrt|I_i|].
SystemSpec sweep_member(const SweepFamily& family, double t);
double sweep_t_min(const SweepFamily& family);
double sweep_t_max(const SweepFamily& family);

struct SweepRow {
    double t = 0.0;
    double s_bowen = 0.0;
    double boxdim = 0.0;
    double boxdim_err = 0.0;
    double corrdim = 0.0;
};

struct SweepOptions {
    std::size_t graph_points = 1 << 20;
    int k0 = 4;
    int k1 = 12;
    std::size_t theta_samples = 20000;
    double tol = 1e-9;
};

std::vector<SweepRow> example_sweep(const SweepFamily& family, const std::vector<double>& ts, std::uint64_t seed,
                                    const SweepOptions& opts = {});
/// CSV `t,s_bowen,boxdim,boxdim_err,corrdim`.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace wlab
