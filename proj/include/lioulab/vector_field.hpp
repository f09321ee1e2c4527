// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/polynomial.hpp"

#include <span>
#include <string>
#include <vector>

namespace lioulab {

/// Result of the homogeneity-degree test: a vector field can have a single
/// degree, every degree (the zero field), or none (mixed degrees).
struct HomogeneityDegree {
    enum class Kind { none, any, value };
    Kind kind = Kind::none;
    int degree = 0;

    bool compatible_with(int d) const {
        return kind == Kind::any || (kind == Kind::value && degree == d);
    }
    static HomogeneityDegree none() { return {Kind::none, 0}; }
    static HomogeneityDegree any() { return {Kind::any, 0}; }
    static HomogeneityDegree value(int d) { return {Kind::value, d}; }
};

/// Vector field X = sum_j a_j(x) d/dx_j with polynomial coefficients.
/// Immutable after construction.
class PolyVectorField {
  public:
    explicit PolyVectorField(std::vector<Polynomial> coeffs);
    static PolyVectorField zero(int n);
    /// The coordinate field d/dx_i.
    static PolyVectorField coordinate(int n, int i);

    int dim() const { return n_; }
    const Polynomial& coeff(int j) const { return coeffs_[static_cast<std::size_t>(j)]; }
    const std::vector<Polynomial>& coeffs() const { return coeffs_; }
    bool is_zero() const;

    PolyVectorField operator+(const PolyVectorField& rhs) const;
    PolyVectorField operator-(const PolyVectorField& rhs) const;
    PolyVectorField operator-() const;
    PolyVectorField scaled(const Rational& c) const;
    bool operator==(const PolyVectorField& rhs) const;
    bool operator!=(const PolyVectorField& rhs) const { return !(*this == rhs); }

    /// Directional derivative Xp = sum_j a_j d_j p, exact.
    Polynomial apply(const Polynomial& p) const;

    /// Numeric coefficient vector X_x.
    void evaluate(std::span<const double> x, std::span<double> out) const;
    std::vector<double> evaluate(std::span<const double> x) const;

    std::string to_string() const;

  private:
    int n_;
    std::vector<Polynomial> coeffs_;
};

/// [X,Y] = XY - YX as a first-order field; second-order terms cancel exactly.
PolyVectorField lie_bracket(const PolyVectorField& x, const PolyVectorField& y);

/// div(X_x) = sum_j d_j a_j, exact.
Polynomial divergence(const PolyVectorField& x);

/// Degree d with X(f o delta_lambda) = lambda^d (Xf) o delta_lambda, i.e.
/// each nonzero coefficient a_j is delta_lambda-homogeneous of weighted
/// degree sigma_j - d. The zero field is homogeneous of every degree.
HomogeneityDegree homogeneity_degree(const PolyVectorField& x, const DilationWeights& w);

/// Parses a field literal from n coefficient strings in the polynomial grammar.
PolyVectorField parse_vector_field(const std::vector<std::string>& coeff_strings, int n);

}  // namespace lioulab
