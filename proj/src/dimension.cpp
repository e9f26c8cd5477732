#include "wlab/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "wlab/parallel.hpp"

namespace wlab {

namespace {

double log_sum_exp(const std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    return m;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    const auto n = static_cast<Eigen::Index>(x.size());
    if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        A(k, 0) = 1.0;
        A(k, 1) = x[static_cast<std::size_t>(k)];
        b(k) = y[static_cast<std::size_t>(k)];
    }
    const Eigen::Vector2d beta = A.colPivHouseholderQr().solve(b);
    LinearFit f;
    f.intercept = beta(0);
    f.slope = beta(1);
    f.points = x.size();
    if (n > 2) {
        const double rss = (A * beta - b).squaredNorm();
        const double sigma2 = rss / static_cast<double>(n - 2);
        const Eigen::Matrix2d cov = sigma2 * (A.transpose() * A).inverse();
        f.stderr_slope = std::sqrt(std::max(0.0, cov(1, 1)));
    }
    return f;
}

double pressure_eval(const System& sys, double s) {
    std::vector<double> terms(static_cast<std::size_t>(sys.cells()));
    for (int i = 0; i < sys.cells(); ++i) terms[i] = s * std::log(sys.length(i)) - std::log(sys.gamma(i));
    return log_sum_exp(terms);
}

double pressure_cylinder_approx(const System& sys, double s, std::size_t depth) {
    if (depth == 0) throw std::invalid_argument("cylinder pressure needs depth >= 1");
    const int l = sys.cells();
    const double words = std::pow(static_cast<double>(l), static_cast<double>(depth));
    if (words > 2e7) throw std::invalid_argument(fmt::format("{} cylinders of depth {} is too many", words, depth));

    auto phi = [&](ddouble y) {
        const int i = sys.symbol_of(y);
        return (1.0 - s) * -std::log(sys.length(i)) + std::log(sys.lambda(i));
    };
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(words));
    SymbolWord w;
    w.symbols.assign(depth, 0);
    for (;;) {
        const Cylinder c = cylinder_of(sys, w);
        double best = -std::numeric_limits<double>::infinity();
        for (double frac : {0.25, 0.5, 0.75}) {
            ddouble y = ddouble(c.left) + ddouble(frac) * ddouble(c.length());
            double acc = 0.0;
            for (std::size_t k = 0; k < depth; ++k) {
                acc += phi(y);
                y = sys.tau(y);
            }
            best = std::max(best, acc);
        }
        terms.push_back(best);
        std::size_t k = depth;
        while (k > 0 && w.symbols[k - 1] == l - 1) w.symbols[--k] = 0;
        if (k == 0) break;
        ++w.symbols[k - 1];
    }
    return log_sum_exp(terms) / static_cast<double>(depth);
}

BowenSolution bowen_solve(const System& sys) {
    BowenSolution out;
    const double p_lo = pressure_eval(sys, out.bracket_lo);
    const double p_hi = pressure_eval(sys, out.bracket_hi);
    if (!(p_lo > 0.0) || !(p_hi < 0.0))
        throw BracketFailure(fmt::format("pressure does not change sign on [1, 2]: P(1) = {}, P(2) = {}", p_lo, p_hi));

    boost::uintmax_t iters = 200;
    auto f = [&](double s) { return pressure_eval(sys, s); };
    const auto root = boost::math::tools::toms748_solve(f, out.bracket_lo, out.bracket_hi, p_lo, p_hi,
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
    double s = 0.5 * (root.first + root.second);
    const double pa = std::abs(f(root.first)), pb = std::abs(f(root.second)), pm = std::abs(f(s));
    if (pa <= pb && pa <= pm) s = root.first;
    else if (pb <= pm) s = root.second;
    out.s_star = s;
    out.residual = std::abs(f(s));
    out.iterations = static_cast<std::size_t>(iters);
    out.p_star.resize(static_cast<std::size_t>(sys.cells()));
    double total = 0.0;
    for (int i = 0; i < sys.cells(); ++i) total += out.p_star[i] = std::pow(sys.length(i), s) / sys.gamma(i);
    for (double& p : out.p_star) p /= total;
    return out;
}

DimPrediction formula_dims(const BernoulliMeasure& measure, const System& sys) {
    const EntropyIntegrals e = entropy_and_integrals(measure, sys);
    DimPrediction d;
    d.entropy = e.entropy;
    d.log_tau_prime = e.log_tau_prime;
    d.log_lambda = e.log_lambda;
    d.first = 1.0 + (e.entropy + e.log_lambda) / e.log_tau_prime;
    d.second = e.entropy / -e.log_lambda;
    d.at_least_one = e.entropy >= -e.log_lambda;
    d.argmin = d.first <= d.second ? 0 : 1;
    d.dim_mu = std::min(d.first, d.second);
    d.graph_dim = bowen_solve(sys).s_star;
    return d;
}

BoxCountResult box_count_graph(const GraphSample& sample, int k0, int k1, std::size_t drop) {
    if (k0 < 0 || k1 <= k0 || k1 > 26) throw std::invalid_argument(fmt::format("bad box scale range {}..{}", k0, k1));
    const auto& pts = sample.points;
    if (pts.size() < 2) throw std::invalid_argument("box counting needs at least two points");
    const std::size_t nscales = static_cast<std::size_t>(k1 - k0 + 1);
    if (nscales < 2 * drop + 2) throw std::invalid_argument("scale window too small for the fit");

    double xmin = pts.front().x, xmax = xmin, wmin = pts.front().w, wmax = wmin;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        wmin = std::min(wmin, p.w);
        wmax = std::max(wmax, p.w);
    }
    const double xspan = xmax > xmin ? xmax - xmin : 1.0;
    const double wspan = wmax > wmin ? wmax - wmin : 1.0;
    // grid samples cover [0, 1); normalise x over the sampled span plus one spacing
    const double xscale = xspan * (1.0 + 1.0 / static_cast<double>(pts.size() - 1));

    BoxCountResult res;
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a].x < pts[b].x; });

    const std::size_t fine_cols = std::size_t{1} << k1;
    std::vector<std::size_t> col_of(pts.size());
    std::vector<double> un(pts.size());
    std::vector<std::size_t> cpoints(fine_cols, 0);
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& p = pts[order[r]];
        const double u = (p.x - xmin) / xscale;
        col_of[r] = std::min(fine_cols - 1, static_cast<std::size_t>(u * static_cast<double>(fine_cols)));
        un[r] = (p.w - wmin) / wspan;
        ++cpoints[col_of[r]];
    }

    // Column extremes from every stride-th point. The graph is continuous, so a
    // column also reaches the first retained value of the next column.
    auto extremes = [&](std::size_t stride, std::vector<double>& lo, std::vector<double>& hi) {
        lo.assign(fine_cols, std::numeric_limits<double>::infinity());
        hi.assign(fine_cols, -std::numeric_limits<double>::infinity());
        for (std::size_t r = 0; r < order.size(); r += stride) {
            const std::size_t c = col_of[r];
            lo[c] = std::min(lo[c], un[r]);
            hi[c] = std::max(hi[c], un[r]);
            const std::size_t next = r + stride;
            if (next < order.size() && col_of[next] != c) {
                lo[c] = std::min(lo[c], un[next]);
                hi[c] = std::max(hi[c], un[next]);
            }
        }
    };
    std::vector<double> cmin, cmax, lo2, hi2, lo4, hi4;
    extremes(1, cmin, cmax);
    extremes(2, lo2, hi2);
    extremes(4, lo4, hi4);

    // Oscillation below the sample spacing scales like a power of the spacing;
    // extrapolate the mean column range to spacing zero from spacings h, 2h, 4h.
    double d1 = 0.0, d2 = 0.0;
    std::size_t used = 0;
    for (std::size_t c = 0; c < fine_cols; ++c) {
        if (!(cmax[c] >= cmin[c]) || !(hi4[c] >= lo4[c])) continue;
        d1 += (cmax[c] - cmin[c]) - (hi2[c] - lo2[c]);
        d2 += (hi2[c] - lo2[c]) - (hi4[c] - lo4[c]);
        ++used;
    }
    if (used > 0 && d1 > 0.0 && d2 > d1) {
        res.envelope_exponent = std::log2(d2 / d1);
        res.envelope_pad = (d1 / static_cast<double>(used)) / (std::exp2(res.envelope_exponent) - 1.0);
    }

    double min_pts = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < fine_cols; ++c) min_pts = std::min(min_pts, static_cast<double>(cpoints[c]));
    res.min_points_per_column = min_pts;
    if (min_pts < 4.0) {
        res.undersampled = true;
        res.warning = fmt::format("only {} sample points in some column at scale 2^-{}; counts may undershoot",
                                  min_pts, k1);
    }

    const double half_pad = 0.5 * res.envelope_pad;
    std::vector<unsigned char> mark;
    std::vector<std::size_t> touched;
    for (int k = k0; k <= k1; ++k) {
        const double eps = std::ldexp(1.0, -k);
        const std::size_t group = std::size_t{1} << (k1 - k);
        const std::size_t cols = std::size_t{1} << k;
        const std::size_t rows = cols + 1;
        double variation = 0.0, boxes = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t f = c * group; f < (c + 1) * group; ++f) {
                lo = std::min(lo, cmin[f]);
                hi = std::max(hi, cmax[f]);
            }
            if (lo > hi) continue;
            lo -= half_pad;
            hi += half_pad;
            variation += std::max(1.0, (hi - lo) / eps);
            boxes += std::floor(hi / eps) - std::floor(lo / eps) + 1.0;
        }
        // raw: distinct boxes containing a sample point
        mark.assign(rows, 0);
        double raw = 0.0;
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols; ++c) {
            touched.clear();
            while (r < order.size() && col_of[r] / group == c) {
                const auto row = std::min(rows - 1, static_cast<std::size_t>(un[r] / eps));
                if (!mark[row]) {
                    mark[row] = 1;
                    touched.push_back(row);
                }
                ++r;
            }
            raw += static_cast<double>(touched.size());
            for (std::size_t t : touched) mark[t] = 0;
        }
        res.exponents.push_back(k);
        res.scales.push_back(eps);
        res.counts.push_back(variation);
        res.box_counts.push_back(boxes);
        res.raw_counts.push_back(raw);
    }

    res.window_first = drop;
    res.window_last = nscales - 1 - drop;
    std::vector<double> lx, ly;
    for (std::size_t k = res.window_first; k <= res.window_last; ++k) {
        lx.push_back(-std::log(res.scales[k]));
        ly.push_back(std::log(res.counts[k]));
    }
    res.fit = fit_line(lx, ly);
    return res;
}

CorrDimEstimate correlation_dim(std::vector<double> values, int k_lo, int k_hi, std::size_t drop) {
    if (values.size() < 2) throw std::invalid_argument("correlation dimension needs at least two values");
    if (k_hi <= k_lo) throw std::invalid_argument("correlation radii range is empty");
    CorrDimEstimate est;
    est.n = values.size();
    std::sort(values.begin(), values.end());
    const double range = values.back() - values.front();
    if (!(range > 0.0)) {
        est.degenerate = true;
        return est;
    }
    const double pairs = 0.5 * static_cast<double>(est.n) * static_cast<double>(est.n - 1);
    for (int k = k_hi; k >= k_lo; --k) {
        const double r = range * std::ldexp(1.0, -k);
        std::size_t count = 0, j = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (j < i + 1) j = i + 1;
            while (j < values.size() && values[j] - values[i] < r) ++j;
            count += j - i - 1;
        }
        est.radii.push_back(r);
        est.C.push_back(static_cast<double>(count) / pairs);
    }
    std::vector<double> lx, ly;
    const std::size_t m = est.radii.size();
    est.window_first = std::min(drop, m - 1);
    est.window_last = m > drop ? m - 1 - drop : 0;
    for (std::size_t k = est.window_first; k <= est.window_last; ++k) {
        if (est.C[k] <= 0.0) continue;
        lx.push_back(std::log(est.radii[k]));
        ly.push_back(std::log(est.C[k]));
    }
    if (lx.size() >= 2) est.fit = fit_line(lx, ly);
    return est;
}

PointwiseDimResult pointwise_dim_mu(const System& sys, const BernoulliMeasure& measure, std::uint64_t seed,
                                    const PointwiseOptions& opts) {
    if (measure.cells() != sys.cells()) throw std::invalid_argument("measure and system have different alphabets");
    if (opts.k_hi <= opts.k_lo) throw std::invalid_argument("pointwise radii range is empty");
    const TruncationPlan plan = truncation_depth(sys, opts.tol);

    auto lift = [&](std::size_t n, std::uint64_t stream) {
        std::vector<GraphPoint> pts(n);
        parallel_for(n, [&](std::size_t k) {
            Rng rng(derive_seed(seed, stream == 0 ? "pointwise.reference" : "pointwise.anchor", k));
            const CodedPoint cp = sample_coded_point(measure, sys, opts.sample_depth, rng);
            pts[k] = {cp.x.value(), eval_W(sys, cp.x, plan)};
        });
        return pts;
    };
    std::vector<GraphPoint> refs = lift(opts.references, 0);
    const std::vector<GraphPoint> anchors = lift(opts.anchors, 1);
    std::sort(refs.begin(), refs.end(), [](const GraphPoint& a, const GraphPoint& b) { return a.x < b.x; });
    std::vector<double> rx(refs.size());
    for (std::size_t k = 0; k < refs.size(); ++k) rx[k] = refs[k].x;

    PointwiseDimResult res;
    res.anchors = anchors.size();
    res.references = refs.size();
    const std::size_t nr = static_cast<std::size_t>(opts.k_hi - opts.k_lo + 1);
    for (int k = opts.k_lo; k <= opts.k_hi; ++k) res.radii.push_back(std::ldexp(1.0, -k));
    const double rmax = res.radii.front();

    std::vector<double> slope(anchors.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(anchors.size(), [&](std::size_t a) {
        const GraphPoint p = anchors[a];
        std::vector<std::size_t> hist(nr + 1, 0);
        auto it = std::lower_bound(rx.begin(), rx.end(), p.x - rmax);
        for (auto k = static_cast<std::size_t>(it - rx.begin()); k < refs.size() && refs[k].x <= p.x + rmax; ++k) {
            const double d = std::hypot(refs[k].x - p.x, refs[k].w - p.w);
            if (d >= rmax) continue;
            // largest j with d < radii[j]
            std::size_t j = 0;
            while (j + 1 < nr && d < res.radii[j + 1]) ++j;
            ++hist[j];
        }
        std::vector<double> lx, ly;
        std::size_t cum = 0;
        for (std::size_t j = nr; j-- > 0;) {
            cum += hist[j];
            if (cum >= opts.min_neighbours) {
                lx.push_back(std::log(res.radii[j]));
                ly.push_back(std::log(static_cast<double>(cum)));
            }
        }
        if (lx.size() >= 3) slope[a] = fit_line(lx, ly).slope;
    });
    for (double s : slope)
        if (std::isfinite(s)) res.slopes.push_back(s);
    if (!res.slopes.empty()) {
        res.median = median_of(res.slopes);
        res.mean = std::accumulate(res.slopes.begin(), res.slopes.end(), 0.0) / static_cast<double>(res.slopes.size());
        double ss = 0.0;
        for (double v : res.slopes) ss += (v - res.mean) * (v - res.mean);
        if (res.slopes.size() > 1) res.mean_stderr = std::sqrt(ss / static_cast<double>(res.slopes.size() - 1) / static_cast<double>(res.slopes.size()));
        res.iqr = quantile(res.slopes, 0.75) - quantile(res.slopes, 0.25);
    }
    return res;
}

void write_box_csv(std::ostream& os, const BoxCountResult& r) {
    os << "scale,count,box_count,raw_count\n";
    for (std::size_t k = 0; k < r.scales.size(); ++k)
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", r.scales[k], r.counts[k], r.box_counts[k],
                          r.raw_counts[k]);
}

void write_corr_csv(std::ostream& os, const CorrDimEstimate& r) {
    os << "r,C\n";
    for (std::size_t k = 0; k < r.radii.size(); ++k) os << fmt::format("{:.17g},{:.17g}\n", r.radii[k], r.C[k]);
}

}  // namespace wlab
