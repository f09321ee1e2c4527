// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/vector_field.hpp"

#include <span>
#include <string>
#include <vector>

namespace lioulab {

/// Minimal row-major dense matrix, large enough for frames (n <= a few).
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

struct FrameCheckReport {
    bool homogeneous_degree_one = false;
    bool divergence_free = false;
    std::string detail;
    bool ok() const { return homogeneous_degree_one && divergence_free; }
};

/// A family X = {X_1,...,X_m} (m >= 2) of polynomial vector fields together
/// with the dilation weights under which each field is homogeneous of
/// degree 1 (assumption (H1); divergence-free follows and is re-checked).
class Frame {
  public:
    /// Validates (H1): throws std::invalid_argument with the failing detail.
    Frame(std::vector<PolyVectorField> fields, DilationWeights weights);

    /// Builds without the (H1) validation; used by checkers on raw literals.
    struct Unchecked {};
    Frame(Unchecked, std::vector<PolyVectorField> fields, DilationWeights weights);

    int dim() const { return n_; }
    int generators() const { return static_cast<int>(fields_.size()); }
    const PolyVectorField& field(int i) const { return fields_[static_cast<std::size_t>(i)]; }
    const std::vector<PolyVectorField>& fields() const { return fields_; }
    const DilationWeights& weights() const { return weights_; }

    FrameCheckReport structural_report() const;

  private:
    int n_;
    std::vector<PolyVectorField> fields_;
    DilationWeights weights_;
};

/// One element of the generated Lie wreath: the bracket word over generator
/// indices (left-nested, [X_{w0},[X_{w1},[...]]]) and the resulting field.
struct BracketElement {
    std::vector<int> word;
    PolyVectorField field;
};

struct LieBasisResult {
    std::vector<BracketElement> elements;
    int step = 0;
};

/// All generators and left-nested brackets up to word length max_step,
/// dropping exact zeros and +-duplicates (canonical structural equality).
LieBasisResult generate_brackets(const Frame& f, int max_step);

/// dim span{Z_x}: rank-revealing Gaussian elimination; a pivot counts as
/// zero when |pivot| < 1e-9 * (largest entry magnitude of the matrix).
int rank_at(std::span<const PolyVectorField> fields, std::span<const double> x);

struct HoermanderReport {
    bool satisfied = false;
    int step = 0;                      // minimal step achieving full rank everywhere
    std::vector<double> worst_point;   // a point of deficient rank when unsatisfied
    int worst_rank = 0;
};

/// Checks the rank condition at every supplied point (origin always added).
/// max_step <= 0 selects the default max_step = n.
HoermanderReport check_hoermander(const Frame& f, std::span<const std::vector<double>> points,
                                  int max_step = 0);

struct PrincipalMatrixResult {
    std::vector<double> point;
    Matrix S;  // n x m, column i = (X_i)_x
    Matrix A;  // n x n, A = S S^T
};

PrincipalMatrixResult principal_matrix(const Frame& f, std::span<const double> x);

/// Non-total degeneracy: A(x) != 0 at every supplied point.
bool check_ntd(const Frame& f, std::span<const std::vector<double>> points);

/// Polynomial group law on R^n: product_k(x, y) in 2n variables, where
/// variables x1..xn are the left factor and x_{n+1}..x_{2n} the right one.
class GroupLaw {
  public:
    GroupLaw(int n, std::vector<Polynomial> product);

    int dim() const { return n_; }
    const std::vector<Polynomial>& product() const { return product_; }

    /// x * y for numeric points.
    std::vector<double> compose(std::span<const double> x, std::span<const double> y) const;

    /// Jacobian of the left translation tau_a: y -> a*y, evaluated at y.
    Matrix translation_jacobian(std::span<const double> a, std::span<const double> y) const;

  private:
    int n_;
    std::vector<Polynomial> product_;               // in 2n variables
    std::vector<std::vector<Polynomial>> dproduct_; // d product_k / d y_i, cached
};

/// Jacobian basis J_1..J_n of Lie(G): J_i has coefficient column equal to
/// the i-th column of the Jacobian of y -> x*y at y = 0, as polynomials in x.
std::vector<PolyVectorField> jacobian_basis(const GroupLaw& g);

}  // namespace lioulab
