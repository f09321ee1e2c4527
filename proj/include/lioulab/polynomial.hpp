// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lioulab {

/// Non-isotropic dilation weights sigma_1..sigma_n with sigma_1 = 1 and
/// sigma non-decreasing; delta_lambda(x) = (lambda^{sigma_i} x_i).
class DilationWeights {
  public:
    explicit DilationWeights(std::vector<int> sigma);

    int dim() const { return static_cast<int>(sigma_.size()); }
    int operator[](int i) const { return sigma_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& sigma() const { return sigma_; }

    /// Homogeneous dimension D = sum of the weights.
    int homogeneous_dimension() const;

    bool operator==(const DilationWeights&) const = default;

  private:
    std::vector<int> sigma_;
};

/// Multivariate polynomial over the rationals in variables x1..xn.
/// Terms are kept in a canonically ordered map keyed by exponent vector,
/// with no zero coefficients stored, so equality is structural equality.
/// Immutable after construction.
class Polynomial {
  public:
    using Exponents = std::vector<unsigned>;
    using TermMap = std::map<Exponents, Rational>;

    explicit Polynomial(int n);
    Polynomial(int n, TermMap terms);

    static Polynomial zero(int n) { return Polynomial(n); }
    static Polynomial constant(int n, const Rational& c);
    /// The monomial x_{i+1} (0-based variable index).
    static Polynomial variable(int n, int i);
    static Polynomial monomial(int n, Exponents exps, const Rational& c);

    int dim() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    const TermMap& terms() const { return terms_; }

    Polynomial operator+(const Polynomial& rhs) const;
    Polynomial operator-(const Polynomial& rhs) const;
    Polynomial operator*(const Polynomial& rhs) const;
    Polynomial operator-() const;
    Polynomial scaled(const Rational& c) const;
    Polynomial pow(unsigned e) const;

    bool operator==(const Polynomial& rhs) const;
    bool operator!=(const Polynomial& rhs) const { return !(*this == rhs); }

    /// Partial derivative with respect to variable index i (0-based).
    Polynomial derivative(int i) const;

    /// Substitutes x_i -> lambda^{sigma_i} x_i with exact rational lambda.
    Polynomial dilate(const Rational& lambda, const DilationWeights& w) const;

    /// Sets to zero all variables with index in [from, to).
    Polynomial substitute_zero(int from, int to) const;

    /// Keeps the first n_new variables; requires that no surviving term uses
    /// a dropped variable.
    Polynomial truncate_vars(int n_new) const;

    /// Weighted degree of a monomial is sum alpha_i * sigma_i. Returns the
    /// common weighted degree of all terms, or nullopt when mixed; the zero
    /// polynomial reports nullopt as well (callers handle it separately).
    std::optional<long> weighted_degree(const DilationWeights& w) const;

    double evaluate(std::span<const double> x) const;

    std::string to_string() const;

  private:
    void compile();

    int n_;
    TermMap terms_;

    // Evaluation cache with double coefficients, built once at construction;
    // keeps the exact-arithmetic layer off the numeric hot path.
    struct CompiledTerm {
        double coeff;
        std::vector<unsigned> exps;
    };
    std::vector<CompiledTerm> compiled_;
};

/// Parses the polynomial grammar: variables x1..xn, integer/rational
/// constants, +, -, *, ^ with non-negative integer exponents, parentheses.
/// Throws std::invalid_argument on malformed input or non-polynomial syntax.
Polynomial parse_polynomial(const std::string& text, int n);

}  // namespace lioulab
