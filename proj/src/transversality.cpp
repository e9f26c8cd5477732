#include "wlab/transversality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "wlab/parallel.hpp"

namespace wlab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();
// samples drawn from one random stream; fixed so results ignore the worker count
constexpr std::size_t sample_block = 4096;

void require_cosine_tau_power(const System& sys, const char* what) {
    if (sys.spec().g_kind != DisplacementKind::cosine)
        throw std::invalid_argument(fmt::format("{} needs g(x) = cos(2 pi x)", what));
    if (sys.spec().lambda_kind != LambdaKind::tau_power)
        throw std::invalid_argument(fmt::format("{} needs lambda = (tau')^-theta", what));
}

std::size_t resolve_depth(const System& sys, std::size_t depth) { return depth > 0 ? depth : theta_field(sys).depth; }

double sin2_gap(const System& sys, int i, int j, double x) {
    const double d = sys.rho(i, ddouble(x)).value() - sys.rho(j, ddouble(x)).value();
    const double s = std::sin(pi * d);
    return s * s;
}

// Theta and Theta' of one grid side: rows are xi values, columns x values.
struct ThetaTable {
    std::vector<double> xi;
    std::vector<double> theta;
    std::vector<double> dtheta;  // NaN where undefined
};

ThetaTable theta_table(const System& sys, int i, std::size_t n, const std::vector<double>& xs, std::size_t depth) {
    ThetaTable t;
    t.xi.resize(n);
    t.theta.resize(n * xs.size());
    t.dtheta.resize(n * xs.size());
    parallel_for(n, [&](std::size_t k) {
        const ddouble xi = sys.left_dd(i) + sys.length_dd(i) * dd_ratio(static_cast<long>(k), static_cast<long>(n));
        t.xi[k] = xi.value();
        const SymbolWord w = coding_word(sys, xi, depth);
        for (std::size_t m = 0; m < xs.size(); ++m) {
            t.theta[k * xs.size() + m] = theta_eval(sys, w, xs[m], depth);
            try {
                t.dtheta[k * xs.size() + m] = theta_dx_eval(sys, w, xs[m], depth);
            } catch (const std::domain_error&) {
                t.dtheta[k * xs.size() + m] = nan;
            }
        }
    });
    return t;
}

double jackknife_se(const std::vector<double>& per_x) {
    const std::size_t n = per_x.size();
    if (n < 2) return nan;
    double total = 0.0;
    for (double v : per_x) total += v;
    std::vector<double> loo(n);
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += loo[k] = (total - per_x[k]) / static_cast<double>(n - 1);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    return std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * ss);
}

}  // namespace

double G_eval(double s, double t) {
    if (!(t < 1.0)) throw std::invalid_argument(fmt::format("G(s, t) needs t < 1, got t = {}", t));
    if (!(s > 0.0) || s > t) throw std::invalid_argument(fmt::format("G(s, t) needs 0 < s <= t, got s = {}, t = {}", s, t));
    const double v = (t * t / (1.0 - t) + (t - s) / 2.0) / s;
    return v * v;
}

Delta0 delta0_compute(const System& sys) {
    Delta0 best;
    best.value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sys.cells(); ++i)
        for (int j = 0; j < sys.cells(); ++j) {
            if (i == j) continue;
            for (double x : {0.0, 1.0}) {
                const double v = sin2_gap(sys, i, j, x);
                if (v < best.value) best = {v, i, j, x};
            }
        }
    return best;
}

Delta0 delta0_grid(const System& sys, std::size_t grid_n) {
    if (grid_n == 0) throw std::invalid_argument("delta0 grid needs at least one interval");
    Delta0 best;
    best.value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sys.cells(); ++i)
        for (int j = 0; j < sys.cells(); ++j) {
            if (i == j) continue;
            for (std::size_t k = 0; k <= grid_n; ++k) {
                const double x = static_cast<double>(k) / static_cast<double>(grid_n);
                const double v = sin2_gap(sys, i, j, x);
                if (v < best.value) best = {v, i, j, x};
            }
        }
    return best;
}

Example2Check thm_example2_check(const System& sys) {
    require_cosine_tau_power(sys, "the example-2 conditions");
    if (sys.spec().scale_t != 1.0) throw std::invalid_argument("the example-2 conditions need scale_t = 1");
    const int l = sys.cells();
    const double th = sys.spec().theta;
    Example2Check c;
    c.cond1_margins.assign(static_cast<std::size_t>(l), std::vector<double>(static_cast<std::size_t>(l), 0.0));
    c.cond1_min_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
            if (i == j) continue;
            const double m = std::pow(sys.length(j), -th / (2.0 - th)) - sys.length(i) / sys.length(j);
            c.cond1_margins[i][j] = m;
            c.cond1_min_margin = std::min(c.cond1_min_margin, m);
        }
    c.cond1 = c.cond1_min_margin > 0.0;
    const double lo = sys.min_length(), hi = sys.max_length();
    c.g_first = G_eval(std::pow(lo, 1.0 - th), std::pow(hi, 1.0 - th));
    c.g_second = G_eval(std::pow(lo, 2.0 - th), std::pow(hi, 2.0 - th));
    c.cond2_sum = c.g_first + c.g_second;
    c.delta0 = delta0_compute(sys).value;
    c.cond2_margin = c.delta0 - c.cond2_sum;
    c.cond2 = c.cond2_margin > 0.0;
    c.certified = c.cond1 && c.cond2;
    c.claimed_dim = c.certified ? 2.0 - th : nan;
    return c;
}

CosineLemmaCheck cosine_lemma_check(const System& sys) {
    require_cosine_tau_power(sys, "the cosine transversality test");
    double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
    double qmin = std::numeric_limits<double>::infinity(), qmax = 0.0;
    for (int i = 0; i < sys.cells(); ++i) {
        const double g = sys.gamma(i), q = g * sys.length(i);
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
        qmin = std::min(qmin, q);
        qmax = std::max(qmax, q);
    }
    CosineLemmaCheck c;
    c.g_gamma = G_eval(gmin, gmax);
    c.g_gamma_over_tau = G_eval(qmin, qmax);
    c.sum = c.g_gamma + c.g_gamma_over_tau;
    c.delta0 = delta0_compute(sys).value;
    c.holds = c.sum < c.delta0;
    return c;
}

ScanResult eps_delta_scan(const System& sys, int i, int j, const ScanOptions& opts) {
    if (i == j) throw std::invalid_argument("eps_delta_scan needs two different intervals");
    if (i < 0 || j < 0 || i >= sys.cells() || j >= sys.cells()) throw std::invalid_argument("interval index out of range");
    if (opts.n_xi == 0 || opts.n_eta == 0 || opts.n_x < 2) throw std::invalid_argument("scan grids are empty");
    const std::size_t depth = resolve_depth(sys, opts.depth);
    std::vector<double> xs(opts.n_x);
    for (std::size_t m = 0; m < opts.n_x; ++m) xs[m] = static_cast<double>(m) / static_cast<double>(opts.n_x - 1);
    const ThetaTable a = theta_table(sys, i, opts.n_xi, xs, depth);
    const ThetaTable b = theta_table(sys, j, opts.n_eta, xs, depth);

    std::vector<ScanResult> rows(opts.n_xi);
    parallel_for(opts.n_xi, [&](std::size_t k) {
        ScanResult best;
        best.margin = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < opts.n_eta; ++q)
            for (std::size_t m = 0; m < xs.size(); ++m) {
                const std::size_t ia = k * xs.size() + m, ib = q * xs.size() + m;
                double v = std::abs(a.theta[ia] - b.theta[ib]);
                const double dv = std::abs(a.dtheta[ia] - b.dtheta[ib]);
                if (std::isfinite(dv)) v = std::max(v, dv);
                if (v < best.margin) best = {v, a.xi[k], b.xi[q], xs[m], 0};
            }
        rows[k] = best;
    });
    ScanResult out = rows.front();
    for (const auto& r : rows)
        if (r.margin < out.margin) out = r;
    out.evaluated = opts.n_xi * opts.n_eta * opts.n_x;
    return out;
}

ScanResult eps_delta_scan_all(const System& sys, const ScanOptions& opts) {
    ScanResult best;
    best.margin = std::numeric_limits<double>::infinity();
    std::size_t total = 0;
    for (int i = 0; i < sys.cells(); ++i)
        for (int j = i + 1; j < sys.cells(); ++j) {
            const ScanResult r = eps_delta_scan(sys, i, j, opts);
            total += r.evaluated;
            if (r.margin < best.margin) best = r;
        }
    best.evaluated = total;
    return best;
}

SymbolWord draw_word(const BernoulliMeasure& measure, std::size_t depth, Rng& rng) {
    SymbolWord w;
    w.symbols.resize(depth);
    for (auto& s : w.symbols) s = static_cast<Symbol>(measure.draw(rng));
    return w;
}

double pair_norm_sq(const std::vector<double>& values, const std::vector<double>& weights, double r) {
    if (values.size() != weights.size()) throw std::invalid_argument("pair_norm_sq: size mismatch");
    if (!(r > 0.0)) throw std::invalid_argument("pair_norm_sq needs r > 0");
    double s = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a)
        for (std::size_t b = 0; b < values.size(); ++b)
            s += weights[a] * weights[b] * std::max(0.0, 2.0 * r - std::abs(values[a] - values[b]));
    return s / (r * r);
}

CorrelationIntegralResult correlation_integral(const System& sys, const BernoulliMeasure& measure,
                                               const std::vector<double>& radii, std::uint64_t seed,
                                               const CorrelationIntegralOptions& opts) {
    if (measure.cells() != sys.cells()) throw std::invalid_argument("measure and system have different alphabets");
    if (opts.n_x < 2 || opts.n_xi < 2) throw std::invalid_argument("correlation integral needs >= 2 samples per level");
    for (double r : radii)
        if (!(r > 0.0)) throw std::invalid_argument("correlation integral radii must be positive");
    const std::size_t depth = resolve_depth(sys, opts.depth);
    CorrelationIntegralResult res;
    res.radii = radii;
    res.n_x = opts.n_x;
    res.pairs_per_x = opts.n_xi * (opts.n_xi - 1) / 2;
    res.truncation_tail = theta_field_with_depth(sys, depth).tail_bound;

    const std::size_t nr = radii.size();
    std::vector<double> per_x(opts.n_x * nr, 0.0);
    std::vector<std::size_t> hits_x(opts.n_x * nr, 0);
    parallel_for(opts.n_x, [&](std::size_t k) {
        Rng rx(derive_seed(seed, "correlation.x", k));
        const double x = sample_coded_point(measure, sys, 40, rx).x.value();
        Rng rw(derive_seed(seed, "correlation.xi", k));
        std::vector<double> v(opts.n_xi);
        for (auto& t : v) t = theta_eval(sys, draw_word(measure, depth, rw), x, depth);
        std::sort(v.begin(), v.end());
        for (std::size_t q = 0; q < nr; ++q) {
            const double two_r = 2.0 * radii[q];
            double s = 0.0;
            std::size_t h = 0;
            for (std::size_t a = 0; a < v.size(); ++a)
                for (std::size_t b = a + 1; b < v.size() && v[b] - v[a] < two_r; ++b) {
                    s += two_r - (v[b] - v[a]);
                    ++h;
                }
            per_x[k * nr + q] = s / static_cast<double>(res.pairs_per_x) / (radii[q] * radii[q]);
            hits_x[k * nr + q] = h;
        }
    });
    for (std::size_t q = 0; q < nr; ++q) {
        std::vector<double> col(opts.n_x);
        double mean = 0.0;
        std::size_t hits = 0;
        for (std::size_t k = 0; k < opts.n_x; ++k) {
            col[k] = per_x[k * nr + q];
            mean += col[k];
            hits += hits_x[k * nr + q];
        }
        res.values.push_back(mean / static_cast<double>(opts.n_x));
        res.stderr_values.push_back(jackknife_se(col));
        res.hits.push_back(hits);
        res.starved.push_back(hits < opts.min_hits);
    }
    return res;
}

double beta_constant(const System& sys) {
    double top = 0.0;
    for (int i = 0; i < sys.cells(); ++i) top = std::max(top, sys.length(i) * sys.length(i) / sys.lambda(i));
    const double gmin = sys.gamma_min();
    return top / (gmin * gmin);
}

RecursionCheck beta_and_recursion_check(const System& sys, double transversal, std::size_t levels,
                                        std::uint64_t seed, const CorrelationIntegralOptions& opts) {
    if (!(transversal > 0.0)) throw std::invalid_argument("recursion check needs a positive transversality margin");
    if (levels < 1) throw std::invalid_argument("recursion check needs at least one level");
    RecursionCheck c;
    c.beta = beta_constant(sys);
    c.eps = transversal;
    c.delta = transversal;
    c.alpha = theta_dx_bound(sys);
    c.constant = 8.0 / c.delta * std::max(4.0 * c.alpha / c.eps, 1.0);
    std::vector<double> radii;
    for (std::size_t k = 0; k <= levels; ++k)
        radii.push_back(c.eps * std::pow(sys.gamma_min(), static_cast<double>(k)) / 8.0);
    c.integrals = correlation_integral(sys, BernoulliMeasure::critical(sys), radii, seed, opts);
    const auto& I = c.integrals.values;
    const auto& se = c.integrals.stderr_values;
    c.holds = true;
    for (std::size_t k = 0; k <= levels; ++k) {
        c.bound.push_back(std::pow(c.beta, static_cast<double>(k)) * I[0] +
                          (c.beta < 1.0 ? c.constant / (1.0 - c.beta) : std::numeric_limits<double>::infinity()));
        if (k == 0) continue;
        const double slack = c.beta * I[k - 1] + c.constant - I[k];
        const double sigma = std::sqrt(se[k] * se[k] + c.beta * c.beta * se[k - 1] * se[k - 1]);
        c.slack.push_back(slack);
        c.sigma.push_back(sigma);
        if (!(slack > -3.0 * sigma)) c.holds = false;
    }
    return c;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS distance needs two non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical(std::size_t n, std::size_t m, double level) {
    const double c = std::sqrt(-std::log(level / 2.0) / 2.0);
    return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

std::vector<double> theta_distribution(const System& sys, const BernoulliMeasure& measure, double x, std::size_t n,
                                       std::uint64_t seed, std::size_t depth) {
    depth = resolve_depth(sys, depth);
    std::vector<double> values(n);
    const std::size_t blocks = (n + sample_block - 1) / sample_block;
    parallel_for(blocks, [&](std::size_t blk) {
        Rng rng(derive_seed(seed, "theta.distribution", blk));
        for (std::size_t k = blk * sample_block; k < std::min(n, (blk + 1) * sample_block); ++k)
            values[k] = theta_eval(sys, draw_word(measure, depth, rng), x, depth);
    });
    return values;
}

KsResult selfsimilarity_check(const System& sys, const BernoulliMeasure& measure, double x, std::size_t n,
                              std::uint64_t seed, const std::vector<double>& mixture, std::size_t depth) {
    if (n == 0) throw std::invalid_argument("self-similarity check needs samples");
    if (measure.cells() != sys.cells()) throw std::invalid_argument("measure and system have different alphabets");
    const BernoulliMeasure mix(mixture.empty() ? measure.p() : mixture);
    if (mix.cells() != sys.cells()) throw std::invalid_argument("mixture has the wrong number of weights");
    depth = resolve_depth(sys, depth);

    std::vector<double> z(static_cast<std::size_t>(sys.cells())), shift(z.size());
    for (int i = 0; i < sys.cells(); ++i) {
        z[i] = sys.rho(i, ddouble(x)).value();
        shift[i] = sys.g_prime_on(i, z[i]);
    }
    std::vector<double> direct(n), mixed(n);
    const std::size_t blocks = (n + sample_block - 1) / sample_block;
    parallel_for(blocks, [&](std::size_t blk) {
        Rng ra(derive_seed(seed, "selfsimilar.direct", blk));
        Rng rb(derive_seed(seed, "selfsimilar.mixture", blk));
        for (std::size_t k = blk * sample_block; k < std::min(n, (blk + 1) * sample_block); ++k) {
            direct[k] = theta_eval(sys, draw_word(measure, depth, ra), x, depth);
            const int i = mix.draw(rb);
            mixed[k] = sys.gamma(i) * (theta_eval(sys, draw_word(measure, depth, rb), z[i], depth) - shift[i]);
        }
    });
    KsResult r;
    r.n = n;
    r.distance = ks_distance(std::move(direct), std::move(mixed));
    r.critical = ks_critical(n, n);
    r.pass = r.distance < r.critical;
    return r;
}

double sweep_t_min(const SweepFamily& f) { return std::max(f.gamma0, f.gamma1); }

double sweep_t_max(const SweepFamily& f) {
    return std::min(f.gamma0 / std::sqrt(f.first_length), f.gamma1 / std::sqrt(1.0 - f.first_length));
}

SystemSpec sweep_member(const SweepFamily& f, double t) {
    if (!(f.first_length > 0.0 && f.first_length < 1.0))
        throw std::invalid_argument(fmt::format("|I_0| = {} must lie in (0, 1)", f.first_length));
    if (!(f.gamma0 > 0.0 && f.gamma0 < 1.0 && f.gamma1 > 0.0 && f.gamma1 < 1.0))
        throw std::invalid_argument("sweep gammas must lie in (0, 1)");
    if (f.gamma0 * f.slope0 == f.gamma1 * f.slope1)
        throw std::invalid_argument("sweep family needs gamma_0 a_0 != gamma_1 a_1");
    const double lo = sweep_t_min(f), hi = sweep_t_max(f);
    if (!(t > lo)) throw std::invalid_argument(fmt::format("t = {} violates the open lower endpoint max gamma_i = {}", t, lo));
    if (t > hi * (1.0 + 1e-12))
        throw std::invalid_argument(fmt::format("t = {} violates the closed upper endpoint min gamma_i / sqrt|I_i| = {}", t, hi));
    const double l0 = f.first_length, l1 = 1.0 - l0;
    SystemSpec s = f.first_length == 0.5 ? SystemSpec::equal(2) : SystemSpec::with_breakpoints({0.0, l0, 1.0});
    s.lambda_per_interval({t * l0 / f.gamma0, t * l1 / f.gamma1});
    if (f.sawtooth) s.sawtooth();
    else s.piecewise_linear({f.slope0, f.slope1}, {f.intercept0, f.intercept1});
    return s;
}

std::vector<SweepRow> example_sweep(const SweepFamily& family, const std::vector<double>& ts, std::uint64_t seed,
                                    const SweepOptions& opts) {
    std::vector<SweepRow> rows;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = ts[k];
        const System sys(sweep_member(family, t));
        SweepRow row;
        row.t = t;
        row.s_bowen = bowen_solve(sys).s_star;
        const GraphSample g = sample_graph_grid(sys, opts.graph_points, truncation_depth(sys, opts.tol));
        const BoxCountResult box = box_count_graph(g, opts.k0, opts.k1);
        row.boxdim = box.fit.slope;
        row.boxdim_err = box.fit.stderr_slope;
        std::vector<double> values = theta_distribution(sys, BernoulliMeasure::critical(sys), 0.5,
                                                        opts.theta_samples, derive_seed(seed, "sweep.theta", k));
        const CorrDimEstimate cd = correlation_dim(std::move(values));
        row.corrdim = cd.degenerate ? 0.0 : cd.fit.slope;
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "t,s_bowen,boxdim,boxdim_err,corrdim\n";
    for (const auto& r : rows)
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.t, r.s_bowen, r.boxdim, r.boxdim_err, r.corrdim);
}

}  // namespace wlab
