// SPDX-License-Identifier: Apache-2.0
#include "lioulab/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <sstream>

namespace lioulab {

struct ScalarExpr::Node {
    enum class Op { constant, variable, add, sub, mul, div, pow, exp, log, abs, neg };
    Op op;
    double c = 0.0;
    int var = 0;
    Rational exponent;  // for Op::pow
    std::shared_ptr<const Node> a, b;
};

using Node = ScalarExpr::Node;
using Op = Node::Op;

namespace {

std::shared_ptr<const Node> make_const(double c) {
    auto n = std::make_shared<Node>();
    n->op = Op::constant;
    n->c = c;
    return n;
}

std::shared_ptr<const Node> make_var(int i) {
    if (i < 0 || i >= ScalarExpr::kMaxVars)
        throw std::invalid_argument("variable index out of supported range");
    auto n = std::make_shared<Node>();
    n->op = Op::variable;
    n->var = i;
    return n;
}

bool is_const(const std::shared_ptr<const Node>& n, double* v = nullptr) {
    if (n->op != Op::constant) return false;
    if (v) *v = n->c;
    return true;
}

std::shared_ptr<const Node> make_binary(Op op, std::shared_ptr<const Node> a,
                                        std::shared_ptr<const Node> b) {
    double ca = 0.0, cb = 0.0;
    const bool fa = is_const(a, &ca), fb = is_const(b, &cb);
    if (fa && fb) {
        switch (op) {
            case Op::add: return make_const(ca + cb);
            case Op::sub: return make_const(ca - cb);
            case Op::mul: return make_const(ca * cb);
            case Op::div:
                if (cb != 0.0) return make_const(ca / cb);
                break;  // keep the node; evaluation reports the domain error
            default: break;
        }
    }
    if (op == Op::add) {
        if (fa && ca == 0.0) return b;
        if (fb && cb == 0.0) return a;
    }
    if (op == Op::sub && fb && cb == 0.0) return a;
    if (op == Op::mul) {
        if ((fa && ca == 0.0) || (fb && cb == 0.0)) return make_const(0.0);
        if (fa && ca == 1.0) return b;
        if (fb && cb == 1.0) return a;
    }
    if (op == Op::div && fb && cb == 1.0) return a;
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

std::shared_ptr<const Node> make_unary(Op op, std::shared_ptr<const Node> a) {
    double ca;
    if (is_const(a, &ca)) {
        switch (op) {
            case Op::neg: return make_const(-ca);
            case Op::abs: return make_const(std::abs(ca));
            case Op::exp: return make_const(std::exp(ca));
            case Op::log:
                if (ca > 0.0) return make_const(std::log(ca));
                break;
            default: break;
        }
    }
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    return n;
}

std::shared_ptr<const Node> make_pow(std::shared_ptr<const Node> a, const Rational& e) {
    if (e == 0) return make_const(1.0);
    if (e == 1) return a;
    double ca;
    if (is_const(a, &ca)) {
        if (denominator(e) == 1) {
            const double v = std::pow(ca, to_double(e));
            if (std::isfinite(v)) return make_const(v);
        } else if (ca > 0.0) {
            return make_const(std::pow(ca, to_double(e)));
        }
    }
    auto n = std::make_shared<Node>();
    n->op = Op::pow;
    n->a = std::move(a);
    n->exponent = e;
    return n;
}

double eval_pow(double base, const Rational& e) {
    const double ed = to_double(e);
    if (denominator(e) == 1) {
        if (base == 0.0 && e < 0) throw EvalDomainError("zero raised to a negative power");
        return std::pow(base, ed);
    }
    if (base < 0.0) throw EvalDomainError("fractional power of a negative base");
    if (base == 0.0) {
        if (e < 0) throw EvalDomainError("zero raised to a negative power");
        return 0.0;
    }
    return std::pow(base, ed);
}

double eval_node(const Node* n, std::span<const double> x) {
    switch (n->op) {
        case Op::constant: return n->c;
        case Op::variable:
            if (n->var >= static_cast<int>(x.size()))
                throw std::invalid_argument("expression references a variable beyond the point");
            return x[static_cast<std::size_t>(n->var)];
        case Op::add: return eval_node(n->a.get(), x) + eval_node(n->b.get(), x);
        case Op::sub: return eval_node(n->a.get(), x) - eval_node(n->b.get(), x);
        case Op::mul: return eval_node(n->a.get(), x) * eval_node(n->b.get(), x);
        case Op::div: {
            const double num = eval_node(n->a.get(), x);
            const double den = eval_node(n->b.get(), x);
            if (den == 0.0) throw EvalDomainError("division by zero");
            return num / den;
        }
        case Op::pow: return eval_pow(eval_node(n->a.get(), x), n->exponent);
        case Op::exp: return std::exp(eval_node(n->a.get(), x));
        case Op::log: {
            const double v = eval_node(n->a.get(), x);
            if (v <= 0.0) throw EvalDomainError("log of a non-positive value");
            return std::log(v);
        }
        case Op::abs: return std::abs(eval_node(n->a.get(), x));
        case Op::neg: return -eval_node(n->a.get(), x);
    }
    throw std::logic_error("unreachable expression op");
}

// Forward-mode dual evaluation; gradient buffers live on the stack.
struct Dual {
    double v;
    std::array<double, ScalarExpr::kMaxVars> g;
};

void evalg_node(const Node* n, std::span<const double> x, Dual& out) {
    const int nv = static_cast<int>(x.size());
    switch (n->op) {
        case Op::constant:
            out.v = n->c;
            std::fill_n(out.g.begin(), nv, 0.0);
            return;
        case Op::variable:
            if (n->var >= nv)
                throw std::invalid_argument("expression references a variable beyond the point");
            out.v = x[static_cast<std::size_t>(n->var)];
            std::fill_n(out.g.begin(), nv, 0.0);
            out.g[static_cast<std::size_t>(n->var)] = 1.0;
            return;
        case Op::add:
        case Op::sub:
        case Op::mul:
        case Op::div: {
            Dual lhs, rhs;
            evalg_node(n->a.get(), x, lhs);
            evalg_node(n->b.get(), x, rhs);
            switch (n->op) {
                case Op::add:
                    out.v = lhs.v + rhs.v;
                    for (int i = 0; i < nv; ++i) out.g[i] = lhs.g[i] + rhs.g[i];
                    return;
                case Op::sub:
                    out.v = lhs.v - rhs.v;
                    for (int i = 0; i < nv; ++i) out.g[i] = lhs.g[i] - rhs.g[i];
                    return;
                case Op::mul:
                    out.v = lhs.v * rhs.v;
                    for (int i = 0; i < nv; ++i) out.g[i] = lhs.g[i] * rhs.v + lhs.v * rhs.g[i];
                    return;
                default:
                    if (rhs.v == 0.0) throw EvalDomainError("division by zero");
                    out.v = lhs.v / rhs.v;
                    for (int i = 0; i < nv; ++i)
                        out.g[i] = (lhs.g[i] - out.v * rhs.g[i]) / rhs.v;
                    return;
            }
        }
        case Op::pow: {
            Dual base;
            evalg_node(n->a.get(), x, base);
            out.v = eval_pow(base.v, n->exponent);
            const double ed = to_double(n->exponent);
            double dcoef;
            if (base.v == 0.0) {
                // d/dx base^e at base = 0: zero for e > 1, identity for e = 1
                // (handled by make_pow), undefined (infinite) for e < 1.
                if (n->exponent > 1) {
                    dcoef = 0.0;
                } else {
                    throw EvalDomainError("derivative of power at zero base");
                }
            } else {
                dcoef = ed * eval_pow(base.v, n->exponent - 1);
            }
            for (int i = 0; i < nv; ++i) out.g[i] = dcoef * base.g[i];
            return;
        }
        case Op::exp: {
            Dual a;
            evalg_node(n->a.get(), x, a);
            out.v = std::exp(a.v);
            for (int i = 0; i < nv; ++i) out.g[i] = out.v * a.g[i];
            return;
        }
        case Op::log: {
            Dual a;
            evalg_node(n->a.get(), x, a);
            if (a.v <= 0.0) throw EvalDomainError("log of a non-positive value");
            out.v = std::log(a.v);
            for (int i = 0; i < nv; ++i) out.g[i] = a.g[i] / a.v;
            return;
        }
        case Op::abs: {
            Dual a;
            evalg_node(n->a.get(), x, a);
            out.v = std::abs(a.v);
            const double s = a.v > 0.0 ? 1.0 : (a.v < 0.0 ? -1.0 : 0.0);
            for (int i = 0; i < nv; ++i) out.g[i] = s * a.g[i];
            return;
        }
        case Op::neg: {
            Dual a;
            evalg_node(n->a.get(), x, a);
            out.v = -a.v;
            for (int i = 0; i < nv; ++i) out.g[i] = -a.g[i];
            return;
        }
    }
    throw std::logic_error("unreachable expression op");
}

std::shared_ptr<const Node> diff_node(const std::shared_ptr<const Node>& n, int var) {
    switch (n->op) {
        case Op::constant: return make_const(0.0);
        case Op::variable: return make_const(n->var == var ? 1.0 : 0.0);
        case Op::add: return make_binary(Op::add, diff_node(n->a, var), diff_node(n->b, var));
        case Op::sub: return make_binary(Op::sub, diff_node(n->a, var), diff_node(n->b, var));
        case Op::mul:
            return make_binary(Op::add, make_binary(Op::mul, diff_node(n->a, var), n->b),
                               make_binary(Op::mul, n->a, diff_node(n->b, var)));
        case Op::div: {
            // (a'b - ab') / b^2
            auto num = make_binary(Op::sub, make_binary(Op::mul, diff_node(n->a, var), n->b),
                                   make_binary(Op::mul, n->a, diff_node(n->b, var)));
            return make_binary(Op::div, num, make_pow(n->b, Rational(2)));
        }
        case Op::pow: {
            // e * a^(e-1) * a'
            auto coeff = make_binary(Op::mul, make_const(to_double(n->exponent)),
                                     make_pow(n->a, n->exponent - 1));
            return make_binary(Op::mul, coeff, diff_node(n->a, var));
        }
        case Op::exp: return make_binary(Op::mul, make_unary(Op::exp, n->a), diff_node(n->a, var));
        case Op::log: return make_binary(Op::div, diff_node(n->a, var), n->a);
        case Op::abs:
            // d|a| = a/|a| * a'; undefined on {a = 0}, reported at evaluation.
            return make_binary(Op::mul, make_binary(Op::div, n->a, make_unary(Op::abs, n->a)),
                               diff_node(n->a, var));
        case Op::neg: return make_unary(Op::neg, diff_node(n->a, var));
    }
    throw std::logic_error("unreachable expression op");
}

int max_var_node(const Node* n) {
    switch (n->op) {
        case Op::constant: return 0;
        case Op::variable: return n->var + 1;
        case Op::add:
        case Op::sub:
        case Op::mul:
        case Op::div:
            return std::max(max_var_node(n->a.get()), max_var_node(n->b.get()));
        default: return max_var_node(n->a.get());
    }
}

int precedence(Op op) {
    switch (op) {
        case Op::add:
        case Op::sub: return 1;
        case Op::mul:
        case Op::div: return 2;
        case Op::neg: return 3;
        case Op::pow: return 4;
        default: return 5;
    }
}

void print_node(const Node* n, std::ostream& os, int parent_prec) {
    const int prec = precedence(n->op);
    const bool parens = prec < parent_prec;
    if (parens) os << "(";
    switch (n->op) {
        case Op::constant: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n->c;
            std::string s = tmp.str();
            if (n->c < 0) {
                os << "(" << s << ")";
            } else {
                os << s;
            }
            break;
        }
        case Op::variable: os << "x" << (n->var + 1); break;
        case Op::add:
            print_node(n->a.get(), os, prec);
            os << " + ";
            print_node(n->b.get(), os, prec);
            break;
        case Op::sub:
            print_node(n->a.get(), os, prec);
            os << " - ";
            print_node(n->b.get(), os, prec + 1);
            break;
        case Op::mul:
            print_node(n->a.get(), os, prec);
            os << "*";
            print_node(n->b.get(), os, prec);
            break;
        case Op::div:
            print_node(n->a.get(), os, prec);
            os << "/";
            print_node(n->b.get(), os, prec + 1);
            break;
        case Op::pow:
            print_node(n->a.get(), os, prec + 1);
            os << "^";
            if (denominator(n->exponent) == 1 && n->exponent >= 0) {
                os << n->exponent.str();
            } else {
                os << "(" << n->exponent.str() << ")";
            }
            break;
        case Op::exp:
            os << "exp(";
            print_node(n->a.get(), os, 0);
            os << ")";
            break;
        case Op::log:
            os << "log(";
            print_node(n->a.get(), os, 0);
            os << ")";
            break;
        case Op::abs:
            os << "abs(";
            print_node(n->a.get(), os, 0);
            os << ")";
            break;
        case Op::neg:
            os << "-";
            print_node(n->a.get(), os, prec + 1);
            break;
    }
    if (parens) os << ")";
}

}  // namespace

ScalarExpr::ScalarExpr() : root_(make_const(0.0)) {}

ScalarExpr ScalarExpr::constant(double c) { return ScalarExpr(make_const(c)); }
ScalarExpr ScalarExpr::variable(int i) { return ScalarExpr(make_var(i)); }

double ScalarExpr::eval(std::span<const double> x) const { return eval_node(root_.get(), x); }

double ScalarExpr::eval_grad(std::span<const double> x, std::span<double> grad) const {
    if (x.size() != grad.size()) throw std::invalid_argument("gradient span size mismatch");
    if (static_cast<int>(x.size()) > kMaxVars)
        throw std::invalid_argument("too many variables for gradient evaluation");
    Dual d;
    evalg_node(root_.get(), x, d);
    std::copy_n(d.g.begin(), x.size(), grad.begin());
    return d.v;
}

ScalarExpr ScalarExpr::derivative(int var) const { return ScalarExpr(diff_node(root_, var)); }

int ScalarExpr::num_vars() const { return max_var_node(root_.get()); }

bool ScalarExpr::is_constant(double* value) const {
    return is_const(root_, value);
}

std::string ScalarExpr::to_string() const {
    std::ostringstream os;
    print_node(root_.get(), os, 0);
    return os.str();
}

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
    return ScalarExpr(make_binary(Op::add, a.root_, b.root_));
}
ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) {
    return ScalarExpr(make_binary(Op::sub, a.root_, b.root_));
}
ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
    return ScalarExpr(make_binary(Op::mul, a.root_, b.root_));
}
ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) {
    return ScalarExpr(make_binary(Op::div, a.root_, b.root_));
}
ScalarExpr operator-(const ScalarExpr& a) { return ScalarExpr(make_unary(Op::neg, a.root_)); }
ScalarExpr pow(const ScalarExpr& a, const Rational& e) { return ScalarExpr(make_pow(a.root_, e)); }
ScalarExpr sqrt(const ScalarExpr& a) { return pow(a, Rational(1, 2)); }
ScalarExpr exp(const ScalarExpr& a) { return ScalarExpr(make_unary(Op::exp, a.root_)); }
ScalarExpr log(const ScalarExpr& a) { return ScalarExpr(make_unary(Op::log, a.root_)); }
ScalarExpr abs(const ScalarExpr& a) { return ScalarExpr(make_unary(Op::abs, a.root_)); }

std::optional<std::pair<double, double>> ScalarExpr::match_scaled_power() const {
    const Node* n = root_.get();
    double scale = 1.0;
    if (n->op == Op::mul) {
        double c;
        if (is_const(n->a, &c)) {
            scale = c;
            n = n->b.get();
        } else if (is_const(n->b, &c)) {
            scale = c;
            n = n->a.get();
        } else {
            return std::nullopt;
        }
    }
    if (n->op == Op::constant) return std::make_pair(scale * n->c, 0.0);
    if (n->op == Op::variable && n->var == 0) return std::make_pair(scale, 1.0);
    if (n->op == Op::pow && n->a->op == Op::variable && n->a->var == 0)
        return std::make_pair(scale, to_double(n->exponent));
    if (n->op == Op::div) {
        double c;
        if (is_const(n->a, &c) && n->b->op == Op::pow && n->b->a->op == Op::variable &&
            n->b->a->var == 0)
            return std::make_pair(scale * c, -to_double(n->b->exponent));
    }
    return std::nullopt;
}

ScalarExpr poly_to_expr(const Polynomial& p) {
    ScalarExpr acc = ScalarExpr::constant(0.0);
    for (const auto& [e, c] : p.terms()) {
        ScalarExpr term = ScalarExpr::constant(to_double(c));
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            term = term * pow(ScalarExpr::variable(static_cast<int>(i)), Rational(e[i]));
        }
        acc = acc + term;
    }
    return acc;
}

namespace {

class ExprParser {
  public:
    ExprParser(const std::string& s, int n, std::string alias)
        : s_(s), n_(n), alias_(std::move(alias)) {}

    ScalarExpr parse() {
        ScalarExpr e = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw std::invalid_argument("unexpected trailing input in expression: '" + s_ + "'");
        return e;
    }

  private:
    ScalarExpr expr() {
        skip_ws();
        bool neg = false;
        while (peek() == '+' || peek() == '-') {
            if (get() == '-') neg = !neg;
            skip_ws();
        }
        ScalarExpr acc = term();
        if (neg) acc = -acc;
        skip_ws();
        while (peek() == '+' || peek() == '-') {
            const char op = get();
            ScalarExpr t = term();
            acc = (op == '+') ? acc + t : acc - t;
            skip_ws();
        }
        return acc;
    }

    ScalarExpr term() {
        ScalarExpr acc = unary();
        skip_ws();
        while (peek() == '*' || peek() == '/') {
            const char op = get();
            ScalarExpr u = unary();
            acc = (op == '*') ? acc * u : acc / u;
            skip_ws();
        }
        return acc;
    }

    ScalarExpr unary() {
        skip_ws();
        if (peek() == '-') {
            get();
            return -unary();
        }
        return postfix();
    }

    ScalarExpr postfix() {
        ScalarExpr base = primary();
        skip_ws();
        while (peek() == '^') {
            get();
            base = pow(base, exponent());
        }
        return base;
    }

    Rational exponent() {
        skip_ws();
        bool parens = false;
        if (peek() == '(') {
            get();
            parens = true;
            skip_ws();
        }
        bool neg = false;
        if (peek() == '-') {
            get();
            neg = true;
            skip_ws();
        }
        std::string num = digits();
        std::string den = "1";
        skip_ws();
        if (peek() == '/') {
            get();
            den = digits();
        }
        if (parens) {
            skip_ws();
            if (get() != ')') throw std::invalid_argument("missing ')' after exponent");
        }
        Rational r = rational_from_string(num + "/" + den);
        return neg ? Rational(-r) : r;
    }

    ScalarExpr primary() {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            get();
            ScalarExpr e = expr();
            skip_ws();
            if (get() != ')') throw std::invalid_argument("missing ')' in expression");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string ident = identifier();
            if (ident == "sqrt" || ident == "exp" || ident == "log" || ident == "abs") {
                skip_ws();
                if (get() != '(') throw std::invalid_argument("expected '(' after " + ident);
                ScalarExpr arg = expr();
                skip_ws();
                if (get() != ')') throw std::invalid_argument("missing ')' after " + ident);
                if (ident == "sqrt") return sqrt(arg);
                if (ident == "exp") return exp(arg);
                if (ident == "log") return log(arg);
                return abs(arg);
            }
            if (!alias_.empty() && ident == alias_) return ScalarExpr::variable(0);
            if (ident.size() >= 2 && ident[0] == 'x' &&
                ident.find_first_not_of("0123456789", 1) == std::string::npos) {
                const int idx = std::stoi(ident.substr(1));
                if (idx < 1 || idx > n_)
                    throw std::invalid_argument("variable index out of range in expression");
                return ScalarExpr::variable(idx - 1);
            }
            throw std::invalid_argument("unknown identifier '" + ident + "' in expression");
        }
        throw std::invalid_argument("unexpected character in expression: '" + std::string(1, c) +
                                    "'");
    }

    ScalarExpr number() {
        std::string out;
        bool saw_dot = false, saw_exp = false;
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                out.push_back(c);
                ++pos_;
            } else if (c == '.' && !saw_dot && !saw_exp) {
                saw_dot = true;
                out.push_back(c);
                ++pos_;
            } else if ((c == 'e' || c == 'E') && !saw_exp && !out.empty()) {
                saw_exp = true;
                out.push_back(c);
                ++pos_;
                if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                    out.push_back(s_[pos_]);
                    ++pos_;
                }
            } else {
                break;
            }
        }
        if (out.empty()) throw std::invalid_argument("expected number in expression");
        return ScalarExpr::constant(std::stod(out));
    }

    std::string identifier() {
        std::string out;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])))) {
            out.push_back(s_[pos_]);
            ++pos_;
        }
        return out;
    }

    std::string digits() {
        skip_ws();
        std::string out;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            out.push_back(s_[pos_]);
            ++pos_;
        }
        if (out.empty()) throw std::invalid_argument("expected digits in expression");
        return out;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    char get() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }

    const std::string& s_;
    int n_;
    std::string alias_;
    std::size_t pos_ = 0;
};

}  // namespace

ScalarExpr parse_scalar_expr(const std::string& text, int n, const std::string& var_alias) {
    return ExprParser(text, n, var_alias).parse();
}

}  // namespace lioulab
