// SPDX-License-Identifier: Apache-2.0
#include "lioulab/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lioulab {

DilationWeights::DilationWeights(std::vector<int> sigma) : sigma_(std::move(sigma)) {
    if (sigma_.empty()) throw std::invalid_argument("dilation weights must be non-empty");
    if (sigma_.front() != 1) throw std::invalid_argument("sigma_1 must equal 1");
    for (std::size_t i = 0; i + 1 < sigma_.size(); ++i) {
        if (sigma_[i] > sigma_[i + 1])
            throw std::invalid_argument("dilation weights must be non-decreasing");
    }
    for (int s : sigma_) {
        if (s <= 0) throw std::invalid_argument("dilation weights must be positive");
    }
}

int DilationWeights::homogeneous_dimension() const {
    int d = 0;
    for (int s : sigma_) d += s;
    return d;
}

Polynomial::Polynomial(int n) : n_(n) {
    if (n <= 0) throw std::invalid_argument("polynomial dimension must be positive");
}

Polynomial::Polynomial(int n, TermMap terms) : n_(n), terms_(std::move(terms)) {
    if (n <= 0) throw std::invalid_argument("polynomial dimension must be positive");
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (static_cast<int>(it->first.size()) != n_)
            throw std::invalid_argument("exponent vector length does not match dimension");
        if (it->second == 0)
            it = terms_.erase(it);
        else
            ++it;
    }
    compile();
}

Polynomial Polynomial::constant(int n, const Rational& c) {
    TermMap t;
    if (c != 0) t.emplace(Exponents(static_cast<std::size_t>(n), 0u), c);
    return Polynomial(n, std::move(t));
}

Polynomial Polynomial::variable(int n, int i) {
    if (i < 0 || i >= n) throw std::invalid_argument("variable index out of range");
    Exponents e(static_cast<std::size_t>(n), 0u);
    e[static_cast<std::size_t>(i)] = 1u;
    TermMap t;
    t.emplace(std::move(e), Rational(1));
    return Polynomial(n, std::move(t));
}

Polynomial Polynomial::monomial(int n, Exponents exps, const Rational& c) {
    TermMap t;
    if (c != 0) t.emplace(std::move(exps), c);
    return Polynomial(n, std::move(t));
}

bool Polynomial::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() != 1) return false;
    const auto& e = terms_.begin()->first;
    return std::all_of(e.begin(), e.end(), [](unsigned a) { return a == 0; });
}

Polynomial Polynomial::operator+(const Polynomial& rhs) const {
    if (n_ != rhs.n_) throw std::invalid_argument("polynomial dimension mismatch");
    TermMap out = terms_;
    for (const auto& [e, c] : rhs.terms_) {
        auto [it, inserted] = out.emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) out.erase(it);
        }
    }
    return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::operator-(const Polynomial& rhs) const { return *this + (-rhs); }

Polynomial Polynomial::operator-() const {
    TermMap out;
    for (const auto& [e, c] : terms_) out.emplace(e, -c);
    return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::scaled(const Rational& c) const {
    TermMap out;
    if (c != 0) {
        for (const auto& [e, k] : terms_) out.emplace(e, k * c);
    }
    return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
    if (n_ != rhs.n_) throw std::invalid_argument("polynomial dimension mismatch");
    TermMap out;
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : rhs.terms_) {
            Exponents e(static_cast<std::size_t>(n_));
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            auto [it, inserted] = out.emplace(std::move(e), ca * cb);
            if (!inserted) {
                it->second += ca * cb;
                if (it->second == 0) out.erase(it);
            }
        }
    }
    return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::pow(unsigned e) const {
    Polynomial out = Polynomial::constant(n_, 1);
    Polynomial b = *this;
    while (e > 0) {
        if (e & 1u) out = out * b;
        b = b * b;
        e >>= 1u;
    }
    return out;
}

bool Polynomial::operator==(const Polynomial& rhs) const {
    return n_ == rhs.n_ && terms_ == rhs.terms_;
}

Polynomial Polynomial::derivative(int i) const {
    if (i < 0 || i >= n_) throw std::invalid_argument("variable index out of range");
    TermMap out;
    for (const auto& [e, c] : terms_) {
        const unsigned a = e[static_cast<std::size_t>(i)];
        if (a == 0) continue;
        Exponents de = e;
        de[static_cast<std::size_t>(i)] = a - 1;
        auto [it, inserted] = out.emplace(std::move(de), c * a);
        if (!inserted) it->second += c * a;
    }
    return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::dilate(const Rational& lambda, const DilationWeights& w) const {
    if (w.dim() != n_) throw std::invalid_argument("weights dimension mismatch");
    TermMap out;
    for (const auto& [e, c] : terms_) {
        unsigned wd = 0;
        for (std::size_t i = 0; i < e.size(); ++i)
            wd += e[i] * static_cast<unsigned>(w[static_cast<int>(i)]);
        out.emplace(e, c * rational_pow(lambda, wd));
    }
    return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::substitute_zero(int from, int to) const {
    TermMap out;
    for (const auto& [e, c] : terms_) {
        bool survives = true;
        for (int i = from; i < to; ++i) {
            if (e[static_cast<std::size_t>(i)] != 0) {
                survives = false;
                break;
            }
        }
        if (survives) {
            auto [it, inserted] = out.emplace(e, c);
            if (!inserted) it->second += c;
        }
    }
    return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::truncate_vars(int n_new) const {
    if (n_new <= 0 || n_new > n_) throw std::invalid_argument("bad truncation size");
    TermMap out;
    for (const auto& [e, c] : terms_) {
        for (int i = n_new; i < n_; ++i) {
            if (e[static_cast<std::size_t>(i)] != 0)
                throw std::invalid_argument("polynomial uses a variable beyond truncation");
        }
        out.emplace(Exponents(e.begin(), e.begin() + n_new), c);
    }
    return Polynomial(n_new, std::move(out));
}

std::optional<long> Polynomial::weighted_degree(const DilationWeights& w) const {
    if (w.dim() != n_) throw std::invalid_argument("weights dimension mismatch");
    std::optional<long> deg;
    for (const auto& [e, c] : terms_) {
        long wd = 0;
        for (std::size_t i = 0; i < e.size(); ++i)
            wd += static_cast<long>(e[i]) * w[static_cast<int>(i)];
        if (!deg)
            deg = wd;
        else if (*deg != wd)
            return std::nullopt;
    }
    return deg;
}

void Polynomial::compile() {
    compiled_.clear();
    compiled_.reserve(terms_.size());
    for (const auto& [e, c] : terms_) compiled_.push_back({to_double(c), e});
}

double Polynomial::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("point dimension mismatch");
    double acc = 0.0;
    for (const auto& t : compiled_) {
        double m = t.coeff;
        for (std::size_t i = 0; i < t.exps.size(); ++i) {
            unsigned a = t.exps[i];
            double xi = x[i];
            while (a--) m *= xi;
        }
        acc += m;
    }
    return acc;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        Rational mag = c < 0 ? Rational(-c) : c;
        if (first) {
            if (c < 0) os << "-";
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        bool any_var = false;
        std::ostringstream vars;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (any_var) vars << "*";
            vars << "x" << (i + 1);
            if (e[i] > 1) vars << "^" << e[i];
            any_var = true;
        }
        if (!any_var) {
            os << lioulab::to_string(mag);
        } else if (mag == 1) {
            os << vars.str();
        } else {
            os << lioulab::to_string(mag) << "*" << vars.str();
        }
    }
    return os.str();
}

namespace {

// Recursive-descent parser for the polynomial literal grammar.
class PolyParser {
  public:
    PolyParser(const std::string& s, int n) : s_(s), n_(n) {}

    Polynomial parse() {
        Polynomial p = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw std::invalid_argument("unexpected trailing input in polynomial: '" + s_ + "'");
        return p;
    }

  private:
    Polynomial expr() {
        skip_ws();
        bool neg = false;
        while (peek() == '+' || peek() == '-') {
            if (get() == '-') neg = !neg;
            skip_ws();
        }
        Polynomial acc = term();
        if (neg) acc = -acc;
        skip_ws();
        while (peek() == '+' || peek() == '-') {
            char op = get();
            Polynomial t = term();
            acc = (op == '+') ? acc + t : acc - t;
            skip_ws();
        }
        return acc;
    }

    Polynomial term() {
        Polynomial acc = factor();
        skip_ws();
        while (peek() == '*') {
            get();
            acc = acc * factor();
            skip_ws();
        }
        return acc;
    }

    Polynomial factor() {
        Polynomial b = base();
        skip_ws();
        if (peek() == '^') {
            get();
            skip_ws();
            unsigned e = natural();
            return b.pow(e);
        }
        return b;
    }

    Polynomial base() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            get();
            Polynomial p = expr();
            skip_ws();
            if (get() != ')') throw std::invalid_argument("missing ')' in polynomial");
            return p;
        }
        if (c == '-') {  // unary minus inside a factor, e.g. "2*-3" is rejected upstream
            get();
            return -base();
        }
        if (c == 'x') {
            get();
            unsigned idx = natural();
            if (idx < 1 || static_cast<int>(idx) > n_)
                throw std::invalid_argument("variable index out of range in polynomial");
            return Polynomial::variable(n_, static_cast<int>(idx) - 1);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num = digits();
            skip_ws();
            if (peek() == '/') {
                get();
                skip_ws();
                std::string den = digits();
                return Polynomial::constant(n_, rational_from_string(num + "/" + den));
            }
            return Polynomial::constant(n_, rational_from_string(num));
        }
        throw std::invalid_argument("unexpected character in polynomial: '" + std::string(1, c) + "'");
    }

    std::string digits() {
        skip_ws();
        std::string out;
        while (std::isdigit(static_cast<unsigned char>(peek()))) out.push_back(get());
        if (out.empty()) throw std::invalid_argument("expected number in polynomial");
        return out;
    }

    unsigned natural() {
        const std::string d = digits();
        if (d.size() > 9) throw std::invalid_argument("integer literal too large");
        return static_cast<unsigned>(std::stoul(d));
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    char get() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }

    const std::string& s_;
    int n_;
    std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, int n) {
    return PolyParser(text, n).parse();
}

}  // namespace lioulab
