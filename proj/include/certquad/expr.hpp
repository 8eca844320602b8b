#pragma once

#include "certquad/errors.hpp"

#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

namespace certquad {

enum class ExprKind {
    Constant, Variable,
    Add, Sub, Mul, Div,
    Pow,   // base raised to a constant real exponent
    Neg,
    Sin, Cos, Exp, Log, Abs,
};

namespace detail {

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind;
    double num = 0.0;  // Constant value, or the exponent of a Pow
    NodePtr lhs, rhs;  // unary nodes use lhs only
};

inline NodePtr make_node(ExprKind k, double num, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->num = num;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

inline NodePtr make_const(double v) { return make_node(ExprKind::Constant, v); }
inline NodePtr make_var() { return make_node(ExprKind::Variable, 0.0); }

inline bool is_const(const NodePtr& n, double v) {
    return n->kind == ExprKind::Constant && n->num == v;
}

// ---------------------------------------------------------------------------
// evaluation

inline double finite_or_throw(double v, const char* ctx) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite value in ") + ctx);
    return v;
}

inline double eval_node(const ExprNode& n, double t) {
    switch (n.kind) {
    case ExprKind::Constant: return n.num;
    case ExprKind::Variable: return t;
    case ExprKind::Add: return finite_or_throw(eval_node(*n.lhs, t) + eval_node(*n.rhs, t), "+");
    case ExprKind::Sub: return finite_or_throw(eval_node(*n.lhs, t) - eval_node(*n.rhs, t), "-");
    case ExprKind::Mul: return finite_or_throw(eval_node(*n.lhs, t) * eval_node(*n.rhs, t), "*");
    case ExprKind::Div: {
        const double den = eval_node(*n.rhs, t);
        if (den == 0.0) throw DomainError("division by zero");
        return finite_or_throw(eval_node(*n.lhs, t) / den, "/");
    }
    case ExprKind::Pow: {
        const double base = eval_node(*n.lhs, t);
        const double e = n.num;
        if (base < 0.0 && std::nearbyint(e) != e)
            throw DomainError("fractional power of a negative base");
        if (base == 0.0 && e < 0.0) throw DomainError("zero raised to a negative power");
        return finite_or_throw(std::pow(base, e), "^");
    }
    case ExprKind::Neg: return -eval_node(*n.lhs, t);
    case ExprKind::Sin: return std::sin(eval_node(*n.lhs, t));
    case ExprKind::Cos: return std::cos(eval_node(*n.lhs, t));
    case ExprKind::Exp: return finite_or_throw(std::exp(eval_node(*n.lhs, t)), "exp");
    case ExprKind::Log: {
        const double a = eval_node(*n.lhs, t);
        if (a <= 0.0) throw DomainError("log of a non-positive value");
        return std::log(a);
    }
    case ExprKind::Abs: return std::abs(eval_node(*n.lhs, t));
    }
    throw DomainError("corrupt expression node");
}

// ---------------------------------------------------------------------------
// simplification: constant folding plus 0/1 identity elimination, purely
// syntactic, applied bottom-up

inline NodePtr simplify_node(const NodePtr& n);

inline NodePtr fold_if_const(const NodePtr& n) {
    const bool lc = !n->lhs || n->lhs->kind == ExprKind::Constant;
    const bool rc = !n->rhs || n->rhs->kind == ExprKind::Constant;
    if (n->kind == ExprKind::Constant || n->kind == ExprKind::Variable || !lc || !rc) return n;
    try {
        const double v = eval_node(*n, 0.0);
        return make_const(v);
    } catch (const DomainError&) {
        return n;  // e.g. 1/0 or log(-1): keep the node, fail at evaluation time
    }
}

inline NodePtr simplify_node(const NodePtr& n) {
    if (n->kind == ExprKind::Constant || n->kind == ExprKind::Variable) return n;

    NodePtr l = n->lhs ? simplify_node(n->lhs) : nullptr;
    NodePtr r = n->rhs ? simplify_node(n->rhs) : nullptr;
    NodePtr cur = (l == n->lhs && r == n->rhs) ? n : make_node(n->kind, n->num, l, r);
    cur = fold_if_const(cur);
    if (cur->kind == ExprKind::Constant) return cur;

    switch (cur->kind) {
    case ExprKind::Add:
        if (is_const(cur->lhs, 0.0)) return cur->rhs;
        if (is_const(cur->rhs, 0.0)) return cur->lhs;
        break;
    case ExprKind::Sub:
        if (is_const(cur->rhs, 0.0)) return cur->lhs;
        if (is_const(cur->lhs, 0.0)) return simplify_node(make_node(ExprKind::Neg, 0.0, cur->rhs));
        break;
    case ExprKind::Mul:
        if (is_const(cur->lhs, 0.0) || is_const(cur->rhs, 0.0)) return make_const(0.0);
        if (is_const(cur->lhs, 1.0)) return cur->rhs;
        if (is_const(cur->rhs, 1.0)) return cur->lhs;
        break;
    case ExprKind::Div:
        if (is_const(cur->rhs, 1.0)) return cur->lhs;
        break;
    case ExprKind::Pow:
        if (cur->num == 1.0) return cur->lhs;
        if (cur->num == 0.0) return make_const(1.0);
        break;
    case ExprKind::Neg:
        if (cur->lhs->kind == ExprKind::Constant) return make_const(-cur->lhs->num);
        if (cur->lhs->kind == ExprKind::Neg) return cur->lhs->lhs;
        break;
    default:
        break;
    }
    return cur;
}

// ---------------------------------------------------------------------------
// differentiation (w.r.t. t); results are simplified by the caller

inline NodePtr diff_node(const NodePtr& n) {
    using K = ExprKind;
    switch (n->kind) {
    case K::Constant: return make_const(0.0);
    case K::Variable: return make_const(1.0);
    case K::Add: return make_node(K::Add, 0.0, diff_node(n->lhs), diff_node(n->rhs));
    case K::Sub: return make_node(K::Sub, 0.0, diff_node(n->lhs), diff_node(n->rhs));
    case K::Mul:  // (fg)' = f'g + fg'
        return make_node(K::Add, 0.0,
                         make_node(K::Mul, 0.0, diff_node(n->lhs), n->rhs),
                         make_node(K::Mul, 0.0, n->lhs, diff_node(n->rhs)));
    case K::Div:  // (f/g)' = (f'g - fg') / g^2
        return make_node(K::Div, 0.0,
                         make_node(K::Sub, 0.0,
                                   make_node(K::Mul, 0.0, diff_node(n->lhs), n->rhs),
                                   make_node(K::Mul, 0.0, n->lhs, diff_node(n->rhs))),
                         make_node(K::Pow, 2.0, n->rhs));
    case K::Pow:  // (f^c)' = c f^(c-1) f'
        return make_node(K::Mul, 0.0,
                         make_node(K::Mul, 0.0, make_const(n->num),
                                   make_node(K::Pow, n->num - 1.0, n->lhs)),
                         diff_node(n->lhs));
    case K::Neg: return make_node(K::Neg, 0.0, diff_node(n->lhs));
    case K::Sin: return make_node(K::Mul, 0.0, make_node(K::Cos, 0.0, n->lhs), diff_node(n->lhs));
    case K::Cos:
        return make_node(K::Mul, 0.0,
                         make_node(K::Neg, 0.0, make_node(K::Sin, 0.0, n->lhs)),
                         diff_node(n->lhs));
    case K::Exp: return make_node(K::Mul, 0.0, make_node(K::Exp, 0.0, n->lhs), diff_node(n->lhs));
    case K::Log: return make_node(K::Div, 0.0, diff_node(n->lhs), n->lhs);
    case K::Abs: throw NonDifferentiable("abs has no derivative at 0");
    }
    throw NonDifferentiable("corrupt expression node");
}

// ---------------------------------------------------------------------------
// canonical printing: minimal parentheses that survive a re-parse structurally

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// ^ binds tightest, then unary -, then * /, then + -; atoms rank above all.
inline int print_prec(const ExprNode& n) {
    switch (n.kind) {
    case ExprKind::Add: case ExprKind::Sub: return 1;
    case ExprKind::Mul: case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    case ExprKind::Pow: return 4;
    case ExprKind::Constant: return n.num < 0.0 ? 3 : 5;  // "-2" prints like a negation
    default: return 5;
    }
}

inline std::string print_node(const ExprNode& n);

inline std::string print_child(const ExprNode& c, int min_prec) {
    std::string s = print_node(c);
    if (print_prec(c) < min_prec) return "(" + s + ")";
    return s;
}

inline std::string print_node(const ExprNode& n) {
    switch (n.kind) {
    case ExprKind::Constant: return format_double(n.num);
    case ExprKind::Variable: return "t";
    // left operand keeps its own precedence level; the right operand of a
    // left-associative chain needs parens even at equal precedence, otherwise
    // a-(b-c) would re-parse as (a-b)-c
    case ExprKind::Add: return print_child(*n.lhs, 1) + "+" + print_child(*n.rhs, 2);
    case ExprKind::Sub: return print_child(*n.lhs, 1) + "-" + print_child(*n.rhs, 2);
    case ExprKind::Mul: return print_child(*n.lhs, 2) + "*" + print_child(*n.rhs, 3);
    case ExprKind::Div: return print_child(*n.lhs, 2) + "/" + print_child(*n.rhs, 3);
    case ExprKind::Neg: return "-" + print_child(*n.lhs, 3);
    case ExprKind::Pow: return print_child(*n.lhs, 5) + "^" + format_double(n.num);
    case ExprKind::Sin: return "sin(" + print_node(*n.lhs) + ")";
    case ExprKind::Cos: return "cos(" + print_node(*n.lhs) + ")";
    case ExprKind::Exp: return "exp(" + print_node(*n.lhs) + ")";
    case ExprKind::Log: return "log(" + print_node(*n.lhs) + ")";
    case ExprKind::Abs: return "abs(" + print_node(*n.lhs) + ")";
    }
    return "?";
}

inline bool equal_nodes(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->num != b->num) return false;
    return equal_nodes(a->lhs, b->lhs) && equal_nodes(a->rhs, b->rhs);
}

}  // namespace detail

/// Immutable symbolic expression in one variable t.
///
/// Grammar (EBNF):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' number)?
///   base   := number | 't' | func '(' expr ')' | '(' expr ')' | '-' base
///   func   := sin | cos | exp | log | abs
/// with precedence ^ > unary - > *,/ > +,-. abs evaluates but has no
/// derivative. Parsing preserves structure; simplification is a separate step.
class Expression {
public:
    /// Evaluate at t. Throws DomainError instead of producing NaN/inf.
    double operator()(double t) const { return detail::eval_node(*root_, t); }

    /// Symbolic derivative, simplified (constant folding, 0/1 elimination).
    /// Throws NonDifferentiable if the tree contains abs.
    Expression derivative() const {
        return Expression(detail::simplify_node(detail::diff_node(root_)));
    }

    Expression simplified() const { return Expression(detail::simplify_node(root_)); }

    /// Canonical text form; parse(str()) re-parses to a structurally equal tree.
    std::string str() const { return detail::print_node(*root_); }

    ExprKind kind() const { return root_->kind; }
    bool is_constant() const { return root_->kind == ExprKind::Constant; }

    /// Constant value or Pow exponent of the root node.
    double number() const { return root_->num; }

    /// Child subexpression (0 = left/argument, 1 = right).
    Expression child(int i = 0) const {
        const detail::NodePtr& c = (i == 0) ? root_->lhs : root_->rhs;
        if (!c) throw std::out_of_range("expression node has no such child");
        return Expression(c);
    }

    static Expression parse(std::string_view source);

private:
    explicit Expression(detail::NodePtr root) : root_(std::move(root)) {}
    detail::NodePtr root_;

    friend Expression constant(double);
    friend Expression variable();
    friend Expression operator+(const Expression&, const Expression&);
    friend Expression operator-(const Expression&, const Expression&);
    friend Expression operator*(const Expression&, const Expression&);
    friend Expression operator/(const Expression&, const Expression&);
    friend Expression operator-(const Expression&);
    friend Expression pow(const Expression&, double);
    friend Expression sin(const Expression&);
    friend Expression cos(const Expression&);
    friend Expression exp(const Expression&);
    friend Expression log(const Expression&);
    friend Expression abs(const Expression&);
    friend bool structurally_equal(const Expression&, const Expression&);
};

// ---------------------------------------------------------------------------
// construction helpers

inline Expression constant(double v) { return Expression(detail::make_const(v)); }
inline Expression variable() { return Expression(detail::make_var()); }

inline Expression operator+(const Expression& a, const Expression& b) {
    return Expression(detail::make_node(ExprKind::Add, 0.0, a.root_, b.root_));
}
inline Expression operator-(const Expression& a, const Expression& b) {
    return Expression(detail::make_node(ExprKind::Sub, 0.0, a.root_, b.root_));
}
inline Expression operator*(const Expression& a, const Expression& b) {
    return Expression(detail::make_node(ExprKind::Mul, 0.0, a.root_, b.root_));
}
inline Expression operator/(const Expression& a, const Expression& b) {
    return Expression(detail::make_node(ExprKind::Div, 0.0, a.root_, b.root_));
}
inline Expression operator-(const Expression& a) {
    return Expression(detail::make_node(ExprKind::Neg, 0.0, a.root_));
}
inline Expression pow(const Expression& base, double exponent) {
    return Expression(detail::make_node(ExprKind::Pow, exponent, base.root_));
}
inline Expression sin(const Expression& a) {
    return Expression(detail::make_node(ExprKind::Sin, 0.0, a.root_));
}
inline Expression cos(const Expression& a) {
    return Expression(detail::make_node(ExprKind::Cos, 0.0, a.root_));
}
inline Expression exp(const Expression& a) {
    return Expression(detail::make_node(ExprKind::Exp, 0.0, a.root_));
}
inline Expression log(const Expression& a) {
    return Expression(detail::make_node(ExprKind::Log, 0.0, a.root_));
}
inline Expression abs(const Expression& a) {
    return Expression(detail::make_node(ExprKind::Abs, 0.0, a.root_));
}

inline Expression operator+(double a, const Expression& b) { return constant(a) + b; }
inline Expression operator+(const Expression& a, double b) { return a + constant(b); }
inline Expression operator-(double a, const Expression& b) { return constant(a) - b; }
inline Expression operator-(const Expression& a, double b) { return a - constant(b); }
inline Expression operator*(double a, const Expression& b) { return constant(a) * b; }
inline Expression operator*(const Expression& a, double b) { return a * constant(b); }
inline Expression operator/(double a, const Expression& b) { return constant(a) / b; }
inline Expression operator/(const Expression& a, double b) { return a / constant(b); }

inline bool structurally_equal(const Expression& a, const Expression& b) {
    return detail::equal_nodes(a.root_, b.root_);
}

inline double evaluate(const Expression& e, double t) { return e(t); }
inline Expression differentiate(const Expression& e) { return e.derivative(); }
inline std::string to_string(const Expression& e) { return e.str(); }

// ---------------------------------------------------------------------------
// parser

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr run() {
        skip_ws();
        if (at_end()) throw SyntaxError(pos_, "empty expression");
        NodePtr e = parse_expr();
        skip_ws();
        if (!at_end()) throw SyntaxError(pos_, "unexpected trailing input");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return at_end() ? '\0' : src_[pos_]; }
    void skip_ws() {
        while (!at_end() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                             src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (peek() == c) { ++pos_; return true; }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr e = parse_term();
        for (;;) {
            if (accept('+')) e = make_node(ExprKind::Add, 0.0, e, parse_term());
            else if (accept('-')) e = make_node(ExprKind::Sub, 0.0, e, parse_term());
            else return e;
        }
    }

    NodePtr parse_term() {
        NodePtr e = parse_factor();
        for (;;) {
            if (accept('*')) e = make_node(ExprKind::Mul, 0.0, e, parse_factor());
            else if (accept('/')) e = make_node(ExprKind::Div, 0.0, e, parse_factor());
            else return e;
        }
    }

    // factor := '-' factor | base ('^' ['-'] number)?
    // Handling '-' here (not inside base) keeps ^ tighter than unary minus,
    // so -t^2 parses as -(t^2).
    NodePtr parse_factor() {
        if (accept('-')) {
            NodePtr inner = parse_factor();
            if (inner->kind == ExprKind::Constant)  // fold "-1.5" into one literal
                return make_const(-inner->num);
            return make_node(ExprKind::Neg, 0.0, inner);
        }
        NodePtr base = parse_base();
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            double sign = 1.0;
            if (peek() == '-') { sign = -1.0; ++pos_; skip_ws(); }
            const double e = parse_number();
            return make_node(ExprKind::Pow, sign * e, base);
        }
        return base;
    }

    NodePtr parse_base() {
        skip_ws();
        if (at_end()) throw SyntaxError(pos_, "expected an operand");
        const char c = peek();
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!accept(')')) throw SyntaxError(pos_, "expected ')'");
            return e;
        }
        if ((c >= '0' && c <= '9') || c == '.') return make_const(parse_number());
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return parse_identifier();
        throw SyntaxError(pos_, std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (!at_end() && ((src_[pos_] >= 'a' && src_[pos_] <= 'z') ||
                             (src_[pos_] >= 'A' && src_[pos_] <= 'Z')))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));
        if (name == "t") return make_var();
        ExprKind k;
        if (name == "sin") k = ExprKind::Sin;
        else if (name == "cos") k = ExprKind::Cos;
        else if (name == "exp") k = ExprKind::Exp;
        else if (name == "log") k = ExprKind::Log;
        else if (name == "abs") k = ExprKind::Abs;
        else throw UnknownIdentifier(start, name);
        if (!accept('(')) throw SyntaxError(pos_, "expected '(' after '" + name + "'");
        NodePtr arg = parse_expr();
        if (!accept(')')) throw SyntaxError(pos_, "expected ')'");
        return make_node(k, 0.0, arg);
    }

    // number := digits ['.' digits] [('e'|'E') ['+'|'-'] digits] | '.' digits ...
    double parse_number() {
        skip_ws();
        const std::size_t start = pos_;
        bool any_digit = false;
        while (!at_end() && src_[pos_] >= '0' && src_[pos_] <= '9') { ++pos_; any_digit = true; }
        if (!at_end() && src_[pos_] == '.') {
            ++pos_;
            while (!at_end() && src_[pos_] >= '0' && src_[pos_] <= '9') { ++pos_; any_digit = true; }
        }
        if (!any_digit) throw SyntaxError(start, "expected a number");
        if (!at_end() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t probe = pos_ + 1;
            if (probe < src_.size() && (src_[probe] == '+' || src_[probe] == '-')) ++probe;
            if (probe < src_.size() && src_[probe] >= '0' && src_[probe] <= '9') {
                pos_ = probe;
                while (!at_end() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
            }
        }
        double value = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (res.ec != std::errc{} || res.ptr != src_.data() + pos_)
            throw SyntaxError(start, "malformed number");
        return value;
    }
};

}  // namespace detail

inline Expression Expression::parse(std::string_view source) {
    return Expression(detail::Parser(source).run());
}

inline Expression parse(std::string_view source) { return Expression::parse(source); }

}  // namespace certquad
