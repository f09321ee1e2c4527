// SPDX-License-Identifier: Apache-2.0
#include "lioulab/frame.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lioulab {

namespace {

void check_dims(const std::vector<PolyVectorField>& fields, const DilationWeights& weights) {
    if (fields.size() < 2) throw std::invalid_argument("frame needs at least 2 generators");
    const int n = fields.front().dim();
    for (const auto& f : fields) {
        if (f.dim() != n) throw std::invalid_argument("frame fields must share the dimension");
    }
    if (weights.dim() != n) throw std::invalid_argument("weights dimension mismatch");
}

}  // namespace

Frame::Frame(std::vector<PolyVectorField> fields, DilationWeights weights)
    : n_(fields.empty() ? 0 : fields.front().dim()),
      fields_(std::move(fields)),
      weights_(std::move(weights)) {
    check_dims(fields_, weights_);
    const FrameCheckReport rep = structural_report();
    if (!rep.ok()) throw std::invalid_argument("frame violates (H1): " + rep.detail);
}

Frame::Frame(Unchecked, std::vector<PolyVectorField> fields, DilationWeights weights)
    : n_(fields.empty() ? 0 : fields.front().dim()),
      fields_(std::move(fields)),
      weights_(std::move(weights)) {
    check_dims(fields_, weights_);
}

FrameCheckReport Frame::structural_report() const {
    FrameCheckReport rep;
    rep.homogeneous_degree_one = true;
    rep.divergence_free = true;
    std::ostringstream detail;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        const auto deg = homogeneity_degree(fields_[i], weights_);
        if (!deg.compatible_with(1)) {
            rep.homogeneous_degree_one = false;
            detail << "field " << (i + 1) << " is not delta_lambda-homogeneous of degree 1; ";
        }
        if (!divergence(fields_[i]).is_zero()) {
            rep.divergence_free = false;
            detail << "field " << (i + 1) << " has nonzero divergence; ";
        }
    }
    rep.detail = detail.str();
    return rep;
}

LieBasisResult generate_brackets(const Frame& f, int max_step) {
    if (max_step < 1) throw std::invalid_argument("max_step must be >= 1");
    LieBasisResult out;
    out.step = max_step;

    auto sign_canonical = [](const PolyVectorField& x) {
        // Orient so the first nonzero coefficient's leading term is positive.
        for (int j = 0; j < x.dim(); ++j) {
            const auto& p = x.coeff(j);
            if (p.is_zero()) continue;
            if (p.terms().begin()->second < 0) return -x;
            return x;
        }
        return x;
    };

    auto known = [&](const PolyVectorField& x) {
        const PolyVectorField cx = sign_canonical(x);
        for (const auto& e : out.elements)
            if (sign_canonical(e.field) == cx) return true;
        return false;
    };

    std::vector<BracketElement> level;
    for (int i = 0; i < f.generators(); ++i) {
        BracketElement e{{i}, f.field(i)};
        if (!e.field.is_zero() && !known(e.field)) out.elements.push_back(e);
        level.push_back(std::move(e));
    }
    for (int s = 2; s <= max_step; ++s) {
        std::vector<BracketElement> next;
        for (int i = 0; i < f.generators(); ++i) {
            for (const auto& b : level) {
                if (b.field.is_zero()) continue;
                PolyVectorField br = lie_bracket(f.field(i), b.field);
                std::vector<int> word;
                word.reserve(b.word.size() + 1);
                word.push_back(i);
                word.insert(word.end(), b.word.begin(), b.word.end());
                if (!br.is_zero() && !known(br))
                    out.elements.push_back({word, br});
                next.push_back({std::move(word), std::move(br)});
            }
        }
        level = std::move(next);
    }
    return out;
}

int rank_at(std::span<const PolyVectorField> fields, std::span<const double> x) {
    if (fields.empty()) return 0;
    const int n = fields.front().dim();
    const int k = static_cast<int>(fields.size());
    // Columns are the evaluated fields; eliminate on the n x k matrix.
    Matrix m(n, k);
    std::vector<double> col(static_cast<std::size_t>(n));
    double scale = 0.0;
    for (int j = 0; j < k; ++j) {
        fields[static_cast<std::size_t>(j)].evaluate(x, col);
        for (int i = 0; i < n; ++i) {
            m.at(i, j) = col[static_cast<std::size_t>(i)];
            scale = std::max(scale, std::abs(col[static_cast<std::size_t>(i)]));
        }
    }
    if (scale == 0.0) return 0;
    const double tol = 1e-9 * scale;

    int rank = 0;
    int row = 0;
    for (int j = 0; j < k && row < n; ++j) {
        int piv = -1;
        double best = tol;
        for (int i = row; i < n; ++i) {
            if (std::abs(m.at(i, j)) > best) {
                best = std::abs(m.at(i, j));
                piv = i;
            }
        }
        if (piv < 0) continue;
        for (int c = 0; c < k; ++c) std::swap(m.at(row, c), m.at(piv, c));
        const double p = m.at(row, j);
        for (int i = row + 1; i < n; ++i) {
            const double factor = m.at(i, j) / p;
            if (factor == 0.0) continue;
            for (int c = j; c < k; ++c) m.at(i, c) -= factor * m.at(row, c);
        }
        ++row;
        ++rank;
    }
    return rank;
}

HoermanderReport check_hoermander(const Frame& f, std::span<const std::vector<double>> points,
                                  int max_step) {
    if (max_step <= 0) max_step = f.dim();
    std::vector<std::vector<double>> pts(points.begin(), points.end());
    const std::vector<double> origin(static_cast<std::size_t>(f.dim()), 0.0);
    if (std::find(pts.begin(), pts.end(), origin) == pts.end()) pts.push_back(origin);

    const LieBasisResult basis = generate_brackets(f, max_step);
    HoermanderReport rep;
    for (int s = 1; s <= max_step; ++s) {
        std::vector<PolyVectorField> sub;
        for (const auto& e : basis.elements)
            if (static_cast<int>(e.word.size()) <= s) sub.push_back(e.field);
        bool all_full = true;
        for (const auto& p : pts) {
            const int r = rank_at(sub, p);
            if (r < f.dim()) {
                all_full = false;
                if (s == max_step) {
                    rep.worst_point = p;
                    rep.worst_rank = r;
                }
            }
        }
        if (all_full) {
            rep.satisfied = true;
            rep.step = s;
            return rep;
        }
    }
    rep.satisfied = false;
    rep.step = 0;
    return rep;
}

PrincipalMatrixResult principal_matrix(const Frame& f, std::span<const double> x) {
    PrincipalMatrixResult out;
    out.point.assign(x.begin(), x.end());
    const int n = f.dim();
    const int m = f.generators();
    out.S = Matrix(n, m);
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) {
        f.field(i).evaluate(x, col);
        for (int r = 0; r < n; ++r) out.S.at(r, i) = col[static_cast<std::size_t>(r)];
    }
    out.A = Matrix(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i) acc += out.S.at(r, i) * out.S.at(c, i);
            out.A.at(r, c) = acc;
        }
    }
    return out;
}

bool check_ntd(const Frame& f, std::span<const std::vector<double>> points) {
    for (const auto& p : points) {
        const auto pm = principal_matrix(f, p);
        bool nonzero = false;
        for (double v : pm.A.data) {
            if (v != 0.0) {
                nonzero = true;
                break;
            }
        }
        if (!nonzero) return false;
    }
    return true;
}

GroupLaw::GroupLaw(int n, std::vector<Polynomial> product)
    : n_(n), product_(std::move(product)) {
    if (n_ <= 0) throw std::invalid_argument("group law dimension must be positive");
    if (static_cast<int>(product_.size()) != n_)
        throw std::invalid_argument("group law needs n product polynomials");
    for (const auto& p : product_) {
        if (p.dim() != 2 * n_)
            throw std::invalid_argument("group law polynomials must have 2n variables");
    }
    // Neutral element at the origin: product(x, 0) = x and product(0, y) = y.
    for (int k = 0; k < n_; ++k) {
        const Polynomial right_zero = product_[static_cast<std::size_t>(k)].substitute_zero(n_, 2 * n_);
        if (right_zero != Polynomial::variable(2 * n_, k))
            throw std::invalid_argument("group law violates product(x, 0) = x");
        const Polynomial left_zero = product_[static_cast<std::size_t>(k)].substitute_zero(0, n_);
        Polynomial yk = Polynomial::variable(2 * n_, n_ + k);
        if (left_zero != yk)
            throw std::invalid_argument("group law violates product(0, y) = y");
    }
    dproduct_.resize(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k) {
        dproduct_[static_cast<std::size_t>(k)].reserve(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i)
            dproduct_[static_cast<std::size_t>(k)].push_back(
                product_[static_cast<std::size_t>(k)].derivative(n_ + i));
    }
}

std::vector<double> GroupLaw::compose(std::span<const double> x, std::span<const double> y) const {
    std::vector<double> xy(static_cast<std::size_t>(2 * n_));
    std::copy(x.begin(), x.end(), xy.begin());
    std::copy(y.begin(), y.end(), xy.begin() + n_);
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k)
        out[static_cast<std::size_t>(k)] = product_[static_cast<std::size_t>(k)].evaluate(xy);
    return out;
}

Matrix GroupLaw::translation_jacobian(std::span<const double> a, std::span<const double> y) const {
    std::vector<double> ay(static_cast<std::size_t>(2 * n_));
    std::copy(a.begin(), a.end(), ay.begin());
    std::copy(y.begin(), y.end(), ay.begin() + n_);
    Matrix j(n_, n_);
    for (int k = 0; k < n_; ++k)
        for (int i = 0; i < n_; ++i)
            j.at(k, i) = dproduct_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)].evaluate(ay);
    return j;
}

std::vector<PolyVectorField> jacobian_basis(const GroupLaw& g) {
    const int n = g.dim();
    std::vector<PolyVectorField> basis;
    basis.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<Polynomial> coeffs;
        coeffs.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            // a_{ik}(x) = d product_k / d y_i at y = 0, as a polynomial in x.
            Polynomial d = g.product()[static_cast<std::size_t>(k)].derivative(n + i);
            d = d.substitute_zero(n, 2 * n);
            coeffs.push_back(d.truncate_vars(n));
        }
        basis.emplace_back(std::move(coeffs));
    }
    return basis;
}

}  // namespace lioulab
