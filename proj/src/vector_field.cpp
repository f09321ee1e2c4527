// SPDX-License-Identifier: Apache-2.0
#include "lioulab/vector_field.hpp"

#include <sstream>
#include <stdexcept>

namespace lioulab {

PolyVectorField::PolyVectorField(std::vector<Polynomial> coeffs)
    : n_(coeffs.empty() ? 0 : coeffs.front().dim()), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("vector field needs coefficients");
    if (static_cast<int>(coeffs_.size()) != n_)
        throw std::invalid_argument("vector field needs exactly n coefficient polynomials");
    for (const auto& c : coeffs_) {
        if (c.dim() != n_)
            throw std::invalid_argument("coefficient polynomial dimension mismatch");
    }
}

PolyVectorField PolyVectorField::zero(int n) {
    return PolyVectorField(std::vector<Polynomial>(static_cast<std::size_t>(n), Polynomial::zero(n)));
}

PolyVectorField PolyVectorField::coordinate(int n, int i) {
    std::vector<Polynomial> c(static_cast<std::size_t>(n), Polynomial::zero(n));
    c[static_cast<std::size_t>(i)] = Polynomial::constant(n, 1);
    return PolyVectorField(std::move(c));
}

bool PolyVectorField::is_zero() const {
    for (const auto& c : coeffs_)
        if (!c.is_zero()) return false;
    return true;
}

PolyVectorField PolyVectorField::operator+(const PolyVectorField& rhs) const {
    if (n_ != rhs.n_) throw std::invalid_argument("vector field dimension mismatch");
    std::vector<Polynomial> out;
    out.reserve(coeffs_.size());
    for (std::size_t j = 0; j < coeffs_.size(); ++j) out.push_back(coeffs_[j] + rhs.coeffs_[j]);
    return PolyVectorField(std::move(out));
}

PolyVectorField PolyVectorField::operator-(const PolyVectorField& rhs) const {
    return *this + (-rhs);
}

PolyVectorField PolyVectorField::operator-() const {
    std::vector<Polynomial> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.push_back(-c);
    return PolyVectorField(std::move(out));
}

PolyVectorField PolyVectorField::scaled(const Rational& c) const {
    std::vector<Polynomial> out;
    out.reserve(coeffs_.size());
    for (const auto& p : coeffs_) out.push_back(p.scaled(c));
    return PolyVectorField(std::move(out));
}

bool PolyVectorField::operator==(const PolyVectorField& rhs) const {
    return n_ == rhs.n_ && coeffs_ == rhs.coeffs_;
}

Polynomial PolyVectorField::apply(const Polynomial& p) const {
    if (p.dim() != n_) throw std::invalid_argument("polynomial dimension mismatch in apply");
    Polynomial acc = Polynomial::zero(n_);
    for (int j = 0; j < n_; ++j) {
        const Polynomial& aj = coeffs_[static_cast<std::size_t>(j)];
        if (aj.is_zero()) continue;
        acc = acc + aj * p.derivative(j);
    }
    return acc;
}

void PolyVectorField::evaluate(std::span<const double> x, std::span<double> out) const {
    if (static_cast<int>(out.size()) != n_)
        throw std::invalid_argument("output span dimension mismatch");
    for (int j = 0; j < n_; ++j)
        out[static_cast<std::size_t>(j)] = coeffs_[static_cast<std::size_t>(j)].evaluate(x);
}

std::vector<double> PolyVectorField::evaluate(std::span<const double> x) const {
    std::vector<double> out(static_cast<std::size_t>(n_));
    evaluate(x, out);
    return out;
}

std::string PolyVectorField::to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
        if (j) os << ", ";
        os << coeffs_[j].to_string();
    }
    os << "]";
    return os.str();
}

PolyVectorField lie_bracket(const PolyVectorField& x, const PolyVectorField& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("vector field dimension mismatch");
    const int n = x.dim();
    // [X,Y]^j = X(b_j) - Y(a_j); the second-order parts of XY - YX cancel.
    std::vector<Polynomial> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) out.push_back(x.apply(y.coeff(j)) - y.apply(x.coeff(j)));
    return PolyVectorField(std::move(out));
}

Polynomial divergence(const PolyVectorField& x) {
    Polynomial acc = Polynomial::zero(x.dim());
    for (int j = 0; j < x.dim(); ++j) acc = acc + x.coeff(j).derivative(j);
    return acc;
}

HomogeneityDegree homogeneity_degree(const PolyVectorField& x, const DilationWeights& w) {
    if (w.dim() != x.dim()) throw std::invalid_argument("weights dimension mismatch");
    bool all_zero = true;
    std::optional<long> d;
    for (int j = 0; j < x.dim(); ++j) {
        const Polynomial& aj = x.coeff(j);
        if (aj.is_zero()) continue;
        all_zero = false;
        auto wd = aj.weighted_degree(w);
        if (!wd) return HomogeneityDegree::none();
        const long dj = static_cast<long>(w[j]) - *wd;
        if (!d)
            d = dj;
        else if (*d != dj)
            return HomogeneityDegree::none();
    }
    if (all_zero) return HomogeneityDegree::any();
    return HomogeneityDegree::value(static_cast<int>(*d));
}

PolyVectorField parse_vector_field(const std::vector<std::string>& coeff_strings, int n) {
    if (static_cast<int>(coeff_strings.size()) != n)
        throw std::invalid_argument("vector field literal needs n coefficient strings");
    std::vector<Polynomial> coeffs;
    coeffs.reserve(coeff_strings.size());
    for (const auto& s : coeff_strings) coeffs.push_back(parse_polynomial(s, n));
    return PolyVectorField(std::move(coeffs));
}

}  // namespace lioulab
