// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/polynomial.hpp"

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace lioulab {

/// Thrown when an expression is evaluated outside its domain (division by
/// zero, log of a non-positive value, fractional power of a negative base,
/// derivative of a fractional power at zero). Never silently NaN.
class EvalDomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Immutable scalar expression tree over variables x1..xn with +, -, *, /,
/// rational powers, sqrt, exp, log, abs and real constants. Supports plain
/// evaluation, forward-mode gradients and symbolic differentiation.
class ScalarExpr {
  public:
    static constexpr int kMaxVars = 16;

    ScalarExpr();  // the constant 0

    static ScalarExpr constant(double c);
    static ScalarExpr variable(int i);  // 0-based index

    double eval(std::span<const double> x) const;

    /// Forward-mode value + gradient; grad.size() must equal x.size().
    double eval_grad(std::span<const double> x, std::span<double> grad) const;

    /// Symbolic partial derivative as a new tree.
    ScalarExpr derivative(int var) const;

    /// 1 + highest variable index appearing (0 for constants).
    int num_vars() const;

    bool is_constant(double* value = nullptr) const;

    std::string to_string() const;

    friend ScalarExpr operator+(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator-(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator*(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator/(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator-(const ScalarExpr&);
    friend ScalarExpr pow(const ScalarExpr&, const Rational& exponent);
    friend ScalarExpr sqrt(const ScalarExpr&);
    friend ScalarExpr exp(const ScalarExpr&);
    friend ScalarExpr log(const ScalarExpr&);
    friend ScalarExpr abs(const ScalarExpr&);

    /// Matches c * t^p (t = x1); returns (c, p) when the tree has that shape.
    std::optional<std::pair<double, double>> match_scaled_power() const;

    struct Node;
    explicit ScalarExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    const std::shared_ptr<const Node>& root() const { return root_; }

  private:
    std::shared_ptr<const Node> root_;
};

inline ScalarExpr operator+(const ScalarExpr& a, double b) { return a + ScalarExpr::constant(b); }
inline ScalarExpr operator+(double a, const ScalarExpr& b) { return ScalarExpr::constant(a) + b; }
inline ScalarExpr operator-(const ScalarExpr& a, double b) { return a - ScalarExpr::constant(b); }
inline ScalarExpr operator-(double a, const ScalarExpr& b) { return ScalarExpr::constant(a) - b; }
inline ScalarExpr operator*(const ScalarExpr& a, double b) { return a * ScalarExpr::constant(b); }
inline ScalarExpr operator*(double a, const ScalarExpr& b) { return ScalarExpr::constant(a) * b; }
inline ScalarExpr operator/(const ScalarExpr& a, double b) { return a / ScalarExpr::constant(b); }
inline ScalarExpr operator/(double a, const ScalarExpr& b) { return ScalarExpr::constant(a) / b; }

/// Exact-coefficient polynomial lifted into the expression language.
ScalarExpr poly_to_expr(const Polynomial& p);

/// Parses the expression grammar (variables x1..xn, rational/decimal
/// constants, + - * /, ^ with rational exponents, sqrt/exp/log/abs).
/// A nonempty var_alias names an extra identifier for x1 (e.g. "t" in
/// one-variable profiles such as q_hat).
ScalarExpr parse_scalar_expr(const std::string& text, int n, const std::string& var_alias = "");

}  // namespace lioulab
