#include "wlab/system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

namespace wlab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string join_messages(const std::vector<Violation>& v) {
    std::string out = "invalid system:";
    for (const auto& x : v) out += " [" + x.code + "] " + x.message + ";";
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// SystemSpec builders

SystemSpec SystemSpec::equal(int cells) {
    SystemSpec s;
    s.equal_cells = cells;
    s.breakpoints.resize(static_cast<std::size_t>(std::max(cells, 0)) + 1);
    for (int i = 0; i <= cells; ++i) s.breakpoints[i] = static_cast<double>(i) / cells;
    return s;
}

SystemSpec SystemSpec::with_breakpoints(std::vector<double> breakpoints) {
    SystemSpec s;
    s.breakpoints = std::move(breakpoints);
    return s;
}

SystemSpec& SystemSpec::constant_lambda(double value) {
    lambda_kind = LambdaKind::per_interval;
    lambda_values.assign(breakpoints.empty() ? 0 : breakpoints.size() - 1, value);
    return *this;
}

SystemSpec& SystemSpec::lambda_per_interval(std::vector<double> values) {
    lambda_kind = LambdaKind::per_interval;
    lambda_values = std::move(values);
    return *this;
}

SystemSpec& SystemSpec::tau_power(double th) {
    lambda_kind = LambdaKind::tau_power;
    theta = th;
    lambda_values.clear();
    return *this;
}

SystemSpec& SystemSpec::cosine() {
    g_kind = DisplacementKind::cosine;
    g_slopes.clear();
    g_intercepts.clear();
    return *this;
}

SystemSpec& SystemSpec::sawtooth() {
    g_kind = DisplacementKind::sawtooth;
    g_slopes.clear();
    g_intercepts.clear();
    return *this;
}

SystemSpec& SystemSpec::piecewise_linear(std::vector<double> slopes, std::vector<double> intercepts) {
    g_kind = DisplacementKind::piecewise_linear;
    g_slopes = std::move(slopes);
    g_intercepts = std::move(intercepts);
    return *this;
}

SystemSpec& SystemSpec::constant_g(double c) {
    const std::size_t n = breakpoints.empty() ? 0 : breakpoints.size() - 1;
    return piecewise_linear(std::vector<double>(n, 0.0), std::vector<double>(n, c));
}

SystemSpec& SystemSpec::scaled(double t) {
    scale_t = t;
    return *this;
}

// ---------------------------------------------------------------------------
// validation

std::vector<Violation> validate_system(const SystemSpec& spec) {
    std::vector<Violation> out;
    const auto& a = spec.breakpoints;

    if (a.size() < 3) {
        out.push_back({"partition-size", fmt::format("need at least 2 intervals, got {}", a.size() < 2 ? 0 : a.size() - 1)});
        return out;
    }
    if (a.size() - 1 > 255) {
        out.push_back({"partition-size", "at most 255 intervals are supported"});
        return out;
    }
    bool partition_ok = true;
    if (!std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; })) {
        out.push_back({"partition-range", "breakpoints must lie in [0, 1]"});
        partition_ok = false;
    }
    if (a.front() != 0.0 || a.back() != 1.0) {
        out.push_back({"partition-range", "partition must span [0, 1]"});
        partition_ok = false;
    }
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        if (!(a[i] < a[i + 1])) {
            out.push_back({"partition-not-increasing", "partition not strictly increasing", static_cast<int>(i)});
            partition_ok = false;
            break;
        }
    }
    if (spec.equal_cells != 0 && spec.equal_cells != static_cast<int>(a.size()) - 1) {
        out.push_back({"partition-size", "equal_cells does not match the number of breakpoints"});
        partition_ok = false;
    }
    const int cells = static_cast<int>(a.size()) - 1;

    if (!(spec.scale_t > 0.0) || !std::isfinite(spec.scale_t)) {
        out.push_back({"scale-t", fmt::format("scale_t must be positive, got {}", spec.scale_t)});
        return out;
    }

    bool lambda_ok = true;
    if (spec.lambda_kind == LambdaKind::per_interval) {
        if (static_cast<int>(spec.lambda_values.size()) != cells) {
            out.push_back({"lambda-count", fmt::format("expected {} lambda values, got {}", cells, spec.lambda_values.size())});
            lambda_ok = false;
        }
    } else if (!(spec.theta > 0.0 && spec.theta < 1.0)) {
        out.push_back({"theta-range", fmt::format("theta must lie in (0, 1), got {}", spec.theta)});
        lambda_ok = false;
    }

    if (spec.g_kind == DisplacementKind::piecewise_linear &&
        (static_cast<int>(spec.g_slopes.size()) != cells || static_cast<int>(spec.g_intercepts.size()) != cells)) {
        out.push_back({"g-count", fmt::format("piecewise-linear g needs {} slopes and intercepts", cells)});
    }
    if (spec.g_kind == DisplacementKind::piecewise_linear) {
        for (std::size_t i = 0; i < spec.g_slopes.size(); ++i) {
            if (!std::isfinite(spec.g_slopes[i]) || i >= spec.g_intercepts.size() || !std::isfinite(spec.g_intercepts[i])) {
                out.push_back({"g-range", "g coefficients must be finite", static_cast<int>(i)});
            }
        }
    }

    if (!partition_ok || !lambda_ok) return out;

    for (int i = 0; i < cells; ++i) {
        const double len = a[i + 1] - a[i];
        const double lam = spec.scale_t * (spec.lambda_kind == LambdaKind::per_interval ? spec.lambda_values[i]
                                                                                        : std::pow(len, spec.theta));
        if (!(lam > 0.0 && lam < 1.0)) {
            out.push_back({"lambda-range", fmt::format("lambda = {} not in (0, 1) on I_{}", lam, i), i});
            continue;
        }
        // expansion inf tau' = 1 / |I_i| > 1 holds automatically for l >= 2
        if (!(lam / len > 1.0)) {
            out.push_back({"tau-prime-times-lambda", fmt::format("tau' * lambda = {} <= 1 on I_{}", lam / len, i), i});
        }
    }
    return out;
}

InvalidSystem::InvalidSystem(std::vector<Violation> violations)
    : std::invalid_argument(join_messages(violations)), violations_(std::move(violations)) {}

// ---------------------------------------------------------------------------
// SymbolWord

SymbolWord SymbolWord::then(int j) const {
    SymbolWord w = *this;
    w.symbols.push_back(static_cast<Symbol>(j));
    return w;
}

SymbolWord SymbolWord::shifted(std::size_t n) const {
    SymbolWord w;
    if (n < symbols.size()) w.symbols.assign(symbols.begin() + static_cast<std::ptrdiff_t>(n), symbols.end());
    return w;
}

SymbolWord SymbolWord::prefix(std::size_t n) const {
    SymbolWord w;
    w.symbols.assign(symbols.begin(), symbols.begin() + static_cast<std::ptrdiff_t>(std::min(n, symbols.size())));
    return w;
}

// ---------------------------------------------------------------------------
// System

System::System(SystemSpec spec) : spec_(std::move(spec)) {
    if (auto v = validate_system(spec_); !v.empty()) throw InvalidSystem(std::move(v));

    const int cells = static_cast<int>(spec_.breakpoints.size()) - 1;
    left_.resize(cells);
    length_.resize(cells);
    inv_length_.resize(cells);
    lambda_.resize(cells);
    gamma_.resize(cells);
    for (int i = 0; i < cells; ++i) {
        if (spec_.equal_cells > 0) {
            left_[i] = dd_ratio(i, cells);
            length_[i] = dd_ratio(1, cells);
            inv_length_[i] = ddouble(static_cast<double>(cells));
        } else {
            left_[i] = ddouble(spec_.breakpoints[i]);
            length_[i] = ddouble(spec_.breakpoints[i + 1]) - ddouble(spec_.breakpoints[i]);
            inv_length_[i] = ddouble(1.0) / length_[i];
        }
        const double len = length_[i].value();
        const double base = spec_.lambda_kind == LambdaKind::per_interval ? spec_.lambda_values[i] : std::pow(len, spec_.theta);
        lambda_[i] = spec_.scale_t * base;
        gamma_[i] = len / lambda_[i];
    }

    switch (spec_.g_kind) {
        case DisplacementKind::cosine:
            g_sup_ = 1.0;
            g_prime_sup_ = two_pi;
            break;
        case DisplacementKind::sawtooth:
            g_sup_ = 1.0;
            g_prime_sup_ = 1.0;
            break;
        case DisplacementKind::piecewise_linear:
            for (int i = 0; i < cells; ++i) {
                const double s = spec_.g_slopes[i], c = spec_.g_intercepts[i];
                g_sup_ = std::max({g_sup_, std::abs(s * spec_.breakpoints[i] + c), std::abs(s * spec_.breakpoints[i + 1] + c)});
                g_prime_sup_ = std::max(g_prime_sup_, std::abs(s));
            }
            break;
    }
}

double System::min_length() const {
    double m = 1.0;
    for (const auto& l : length_) m = std::min(m, l.value());
    return m;
}

double System::max_length() const {
    double m = 0.0;
    for (const auto& l : length_) m = std::max(m, l.value());
    return m;
}

double System::lambda_max() const { return *std::max_element(lambda_.begin(), lambda_.end()); }
double System::lambda_min() const { return *std::min_element(lambda_.begin(), lambda_.end()); }
double System::gamma_max() const { return *std::max_element(gamma_.begin(), gamma_.end()); }
double System::gamma_min() const { return *std::min_element(gamma_.begin(), gamma_.end()); }

int System::symbol_of(ddouble x) const {
    for (int i = cells() - 1; i > 0; --i) {
        if (!(x < left_[i])) return i;
    }
    return 0;
}

ddouble System::tau(ddouble x) const {
    return tau_on(symbol_of(x), x);
}

double System::g(double x) const {
    switch (spec_.g_kind) {
        case DisplacementKind::cosine:
            return std::cos(two_pi * x);
        case DisplacementKind::sawtooth: {
            const double f = x - std::floor(x);
            return std::min(f, 1.0 - f);
        }
        case DisplacementKind::piecewise_linear:
            return g_on(symbol_of(ddouble(x)), x);
    }
    return 0.0;
}

double System::g_on(int i, double x) const {
    if (spec_.g_kind == DisplacementKind::piecewise_linear) return spec_.g_slopes[i] * x + spec_.g_intercepts[i];
    return g(x);
}

double System::g_prime_on(int i, double x) const {
    switch (spec_.g_kind) {
        case DisplacementKind::cosine:
            return -two_pi * std::sin(two_pi * x);
        case DisplacementKind::sawtooth: {
            const double f = x - std::floor(x);
            return f < 0.5 ? 1.0 : -1.0;
        }
        case DisplacementKind::piecewise_linear:
            return spec_.g_slopes[i];
    }
    return 0.0;
}

double System::g_second_on(int, double x) const {
    if (spec_.g_kind == DisplacementKind::cosine) return -two_pi * two_pi * std::cos(two_pi * x);
    return 0.0;
}

// ---------------------------------------------------------------------------
// coding and cylinders

ddouble tau_apply(const System& sys, ddouble x) { return sys.tau(x); }

ddouble inverse_branch(const System& sys, int i, ddouble x) { return sys.rho(i, x); }

ddouble inverse_branch(const System& sys, const SymbolWord& word, ddouble x) {
    for (std::size_t k = 0; k < word.size(); ++k) x = sys.rho(word[k], x);
    return x;
}

SymbolWord coding_word(const System& sys, ddouble x, std::size_t depth) {
    SymbolWord w;
    w.symbols.reserve(depth);
    for (std::size_t k = 0; k < depth; ++k) {
        const int i = sys.symbol_of(x);
        w.symbols.push_back(static_cast<Symbol>(i));
        x = sys.tau(x);
    }
    return w;
}

Cylinder cylinder_of(const System& sys, const SymbolWord& word) {
    ddouble lo(0.0), hi(1.0);
    for (std::size_t k = word.size(); k-- > 0;) {
        lo = sys.rho(word[k], lo);
        hi = sys.rho(word[k], hi);
    }
    return Cylinder{word, lo.value(), hi.value()};
}

// ---------------------------------------------------------------------------
// Bernoulli measures

BernoulliMeasure::BernoulliMeasure(std::vector<double> p) : p_(std::move(p)) {
    if (p_.size() < 2) throw std::invalid_argument("probability vector needs at least 2 entries");
    double sum = 0.0;
    for (double v : p_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("probabilities must be non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument(fmt::format("probabilities sum to {:.17g}, not 1", sum));
    cumulative_.resize(p_.size());
    std::partial_sum(p_.begin(), p_.end(), cumulative_.begin());
}

BernoulliMeasure BernoulliMeasure::uniform(int cells) {
    return BernoulliMeasure(std::vector<double>(static_cast<std::size_t>(cells), 1.0 / cells));
}

BernoulliMeasure BernoulliMeasure::critical(const System& sys) {
    std::vector<double> p(static_cast<std::size_t>(sys.cells()));
    for (int i = 0; i < sys.cells(); ++i) p[i] = sys.length(i);
    return BernoulliMeasure(std::move(p));
}

int BernoulliMeasure::draw(Rng& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    for (std::size_t i = 0; i < cumulative_.size(); ++i) {
        if (u < cumulative_[i]) return static_cast<int>(i);
    }
    for (std::size_t i = p_.size(); i-- > 0;) {
        if (p_[i] > 0.0) return static_cast<int>(i);
    }
    return 0;
}

double bernoulli_mass(const BernoulliMeasure& measure, const SymbolWord& word) {
    double m = 1.0;
    for (std::size_t k = 0; k < word.size(); ++k) m *= measure[word[k]];
    return m;
}

double bernoulli_log_mass(const BernoulliMeasure& measure, const SymbolWord& word) {
    double s = 0.0;
    for (std::size_t k = 0; k < word.size(); ++k) {
        const double p = measure[word[k]];
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        s += std::log(p);
    }
    return s;
}

CodedPoint sample_coded_point(const BernoulliMeasure& measure, const System& sys, std::size_t depth, Rng& rng) {
    CodedPoint cp;
    cp.word.symbols.resize(depth);
    for (auto& s : cp.word.symbols) s = static_cast<Symbol>(measure.draw(rng));
    ddouble x(uniform01(rng));
    for (std::size_t k = depth; k-- > 0;) x = sys.rho(cp.word[k], x);
    cp.x = x;
    return cp;
}

double sample_point(const BernoulliMeasure& measure, const System& sys, std::size_t depth, std::uint64_t seed) {
    Rng rng(seed);
    return sample_coded_point(measure, sys, depth, rng).x.value();
}

EntropyIntegrals entropy_and_integrals(const BernoulliMeasure& measure, const System& sys) {
    if (measure.cells() != sys.cells()) throw std::invalid_argument("measure and system have different numbers of symbols");
    EntropyIntegrals e;
    for (int i = 0; i < sys.cells(); ++i) {
        const double p = measure[i];
        if (p > 0.0) e.entropy -= p * std::log(p);
        e.log_tau_prime -= p * std::log(sys.length(i));
        e.log_lambda += p * std::log(sys.lambda(i));
    }
    e.log_gamma = -e.log_tau_prime - e.log_lambda;
    return e;
}

double smb_empirical(const BernoulliMeasure& measure, const SymbolWord& word) {
    if (word.empty()) throw std::invalid_argument("smb_empirical needs N >= 1");
    const double lm = bernoulli_log_mass(measure, word);
    if (!std::isfinite(lm)) return std::numeric_limits<double>::infinity();
    return -lm / static_cast<double>(word.size());
}

double smb_empirical(const BernoulliMeasure& measure, const System& sys, ddouble x, std::size_t depth) {
    return smb_empirical(measure, coding_word(sys, x, depth));
}

}  // namespace wlab
