#pragma once

// Piecewise expanding full-branch maps, their symbolic coding and Bernoulli
// measures.

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlab/ddouble.hpp"
#include "wlab/rng.hpp"

namespace wlab {

enum class LambdaKind { per_interval, tau_power };
enum class DisplacementKind { cosine, sawtooth, piecewise_linear };

/// The triple (tau, lambda, g). Every branch of tau is the increasing affine
/// bijection of I_i = [a_i, a_{i+1}) onto [0, 1).
struct SystemSpec {
    std::vector<double> breakpoints;  ///< a_0 = 0 < a_1 < ... < a_l = 1
    int equal_cells = 0;              ///< > 0 means a_i = i / equal_cells exactly

    LambdaKind lambda_kind = LambdaKind::per_interval;
    std::vector<double> lambda_values;  ///< per interval (per_interval kind)
    double theta = 0.0;                 ///< lambda = (tau')^-theta (tau_power kind)

    DisplacementKind g_kind = DisplacementKind::cosine;
    std::vector<double> g_slopes;      ///< g(x) = slope_i * x + intercept_i on I_i
    std::vector<double> g_intercepts;

    double scale_t = 1.0;  ///< global multiplier applied to lambda

    bool operator==(const SystemSpec&) const = default;

    static SystemSpec equal(int cells);
    static SystemSpec with_breakpoints(std::vector<double> breakpoints);

    SystemSpec& constant_lambda(double value);
    SystemSpec& lambda_per_interval(std::vector<double> values);
    SystemSpec& tau_power(double theta);
    SystemSpec& cosine();
    SystemSpec& sawtooth();
    SystemSpec& piecewise_linear(std::vector<double> slopes, std::vector<double> intercepts);
    SystemSpec& constant_g(double c);
    SystemSpec& scaled(double t);
};

struct Violation {
    std::string code;
    std::string message;
    int interval = -1;  ///< offending interval, -1 when not interval specific
};

/// Every violated hypothesis; empty means valid. Never throws.
std::vector<Violation> validate_system(const SystemSpec& spec);

class InvalidSystem : public std::invalid_argument {
  public:
    explicit InvalidSystem(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

  private:
    std::vector<Violation> violations_;
};

using Symbol = std::uint8_t;

/// Finite coding word (omega_1, ..., omega_N).
struct SymbolWord {
    std::vector<Symbol> symbols;

    std::size_t size() const { return symbols.size(); }
    bool empty() const { return symbols.empty(); }
    int operator[](std::size_t k) const { return symbols[k]; }
    bool operator==(const SymbolWord&) const = default;

    /// w * j
    SymbolWord then(int j) const;
    /// Drop the first `n` symbols.
    SymbolWord shifted(std::size_t n = 1) const;
    SymbolWord prefix(std::size_t n) const;
};

struct Cylinder {
    SymbolWord word;
    double left = 0.0;
    double right = 1.0;

    double length() const { return right - left; }
};

/// Validated, immutable view of a SystemSpec with all per-interval constants
/// precomputed.
class System {
  public:
    /// Throws InvalidSystem if validate_system reports anything.
    explicit System(SystemSpec spec);

    const SystemSpec& spec() const { return spec_; }
    int cells() const { return static_cast<int>(length_.size()); }

    double left(int i) const { return left_[i].value(); }
    double length(int i) const { return length_[i].value(); }
    ddouble left_dd(int i) const { return left_[i]; }
    ddouble length_dd(int i) const { return length_[i]; }
    double min_length() const;
    double max_length() const;

    /// lambda on I_i with scale_t applied.
    double lambda(int i) const { return lambda_[i]; }
    /// gamma_i = 1 / (tau' lambda) on I_i.
    double gamma(int i) const { return gamma_[i]; }
    double lambda_max() const;
    double lambda_min() const;
    double gamma_max() const;
    double gamma_min() const;
    /// lambda' on I_i; zero for every supported weight family.
    double lambda_prime(int) const { return 0.0; }
    bool lambda_piecewise_constant() const { return true; }

    /// k(x) under the half-open convention, x = 1 belongs to the last interval.
    int symbol_of(ddouble x) const;
    ddouble tau(ddouble x) const;
    /// tau on a point already known to lie in the closure of I_i.
    ddouble tau_on(int i, ddouble x) const {
        if (spec_.equal_cells > 0) return (x - left_[i]) * inv_length_[i];
        return (x - left_[i]) / length_[i];
    }
    /// rho_i(x) = a_i + |I_i| x
    ddouble rho(int i, ddouble x) const { return left_[i] + length_[i] * x; }

    double g(double x) const;
    /// g on the closure of I_i (continuous extension of the branch).
    double g_on(int i, double x) const;
    double g_prime_on(int i, double x) const;
    double g_second_on(int i, double x) const;
    double g_sup_norm() const { return g_sup_; }
    double g_prime_sup_norm() const { return g_prime_sup_; }

  private:
    SystemSpec spec_;
    std::vector<ddouble> left_;
    std::vector<ddouble> length_;
    std::vector<ddouble> inv_length_;
    std::vector<double> lambda_;
    std::vector<double> gamma_;
    double g_sup_ = 0.0;
    double g_prime_sup_ = 0.0;
};

ddouble tau_apply(const System& sys, ddouble x);
ddouble inverse_branch(const System& sys, int i, ddouble x);
/// rho_(w_1, ..., w_n) = rho_{w_n} o ... o rho_{w_1}
ddouble inverse_branch(const System& sys, const SymbolWord& word, ddouble x);
SymbolWord coding_word(const System& sys, ddouble x, std::size_t depth);
Cylinder cylinder_of(const System& sys, const SymbolWord& word);

class BernoulliMeasure {
  public:
    explicit BernoulliMeasure(std::vector<double> p);

    static BernoulliMeasure uniform(int cells);
    /// p_c = (|I_0|, ..., |I_{l-1}|), the Lebesgue measure.
    static BernoulliMeasure critical(const System& sys);

    const std::vector<double>& p() const { return p_; }
    int cells() const { return static_cast<int>(p_.size()); }
    double operator[](int i) const { return p_[i]; }

    int draw(Rng& rng) const;

  private:
    std::vector<double> p_;
    std::vector<double> cumulative_;
};

double bernoulli_mass(const BernoulliMeasure& measure, const SymbolWord& word);
/// log of bernoulli_mass; -infinity for zero mass.
double bernoulli_log_mass(const BernoulliMeasure& measure, const SymbolWord& word);

/// A nu_p sample together with the coding word it was built from.
struct CodedPoint {
    SymbolWord word;
    ddouble x;
};

/// Draws `depth` symbols from p and maps a uniform point through the inverse
/// branches so that the coding of x starts with the drawn word.
CodedPoint sample_coded_point(const BernoulliMeasure& measure, const System& sys, std::size_t depth, Rng& rng);
double sample_point(const BernoulliMeasure& measure, const System& sys, std::size_t depth, std::uint64_t seed);

struct EntropyIntegrals {
    double entropy = 0.0;        ///< h_nu
    double log_tau_prime = 0.0;  ///< int log tau' dnu
    double log_lambda = 0.0;     ///< int log lambda dnu
    double log_gamma = 0.0;      ///< int log gamma dnu
};

EntropyIntegrals entropy_and_integrals(const BernoulliMeasure& measure, const System& sys);

/// -log nu_p(I_N(x)) / N using the coding of x computed from its orbit.
double smb_empirical(const BernoulliMeasure& measure, const System& sys, ddouble x, std::size_t depth);
/// Same quantity from a known coding word (exact for sampled points).
double smb_empirical(const BernoulliMeasure& measure, const SymbolWord& word);

}  // namespace wlab
