#include "dualpair/expr.hpp"

#include "dualpair/error.hpp"
#include "eval_detail.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

namespace dualpair {

struct Expr::Node {
    Op op;
    Func func = Func::Sin;
    double value = 0.0;
    std::string name;
    Expr a{std::shared_ptr<const Node>()};  // empty for leaves
    Expr b{std::shared_ptr<const Node>()};
};

namespace {

std::shared_ptr<const Expr::Node> zero_node()
{
    static const auto z = [] {
        auto n = std::make_shared<Expr::Node>();
        n->op = Op::Number;
        return std::shared_ptr<const Expr::Node>(n);
    }();
    return z;
}

}  // namespace

std::string_view func_name(Func f)
{
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Sqrt: return "sqrt";
        case Func::Log: return "log";
    }
    return "?";
}

Expr::Expr() : node_(zero_node()) {}

Expr Expr::number(double v)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Number;
    n->value = v;
    return Expr(std::move(n));
}

Expr Expr::symbol(std::string name)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Symbol;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::pi()
{
    auto n = std::make_shared<Node>();
    n->op = Op::Pi;
    return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(lhs);
    n->b = std::move(rhs);
    return Expr(std::move(n));
}

Expr Expr::negate(Expr operand)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Neg;
    n->a = std::move(operand);
    return Expr(std::move(n));
}

Expr Expr::call(Func f, Expr arg)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Call;
    n->func = f;
    n->a = std::move(arg);
    return Expr(std::move(n));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Func Expr::func() const { return node_->func; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }
const Expr& Expr::operand() const { return node_->a; }

// ---------------------------------------------------------------------------
// Simplifying constructors

namespace {

bool finite_fold(double v) { return std::isfinite(v); }

}  // namespace

Expr operator+(const Expr& a, const Expr& b)
{
    if (a.is_number(0.0)) return b;
    if (b.is_number(0.0)) return a;
    if (a.is_number() && b.is_number() && finite_fold(a.value() + b.value()))
        return Expr::number(a.value() + b.value());
    return Expr::binary(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b)
{
    if (b.is_number(0.0)) return a;
    if (a.is_number(0.0)) return -b;
    if (a.is_number() && b.is_number() && finite_fold(a.value() - b.value()))
        return Expr::number(a.value() - b.value());
    return Expr::binary(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b)
{
    if (a.is_number(0.0) || b.is_number(0.0)) return Expr();
    if (a.is_number(1.0)) return b;
    if (b.is_number(1.0)) return a;
    if (a.is_number(-1.0)) return -b;
    if (b.is_number(-1.0)) return -a;
    if (a.is_number() && b.is_number() && finite_fold(a.value() * b.value()))
        return Expr::number(a.value() * b.value());
    return Expr::binary(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b)
{
    if (b.is_number(1.0)) return a;
    if (a.is_number() && b.is_number() && b.value() != 0.0 && finite_fold(a.value() / b.value()))
        return Expr::number(a.value() / b.value());
    return Expr::binary(Op::Div, a, b);
}

Expr operator-(const Expr& a)
{
    if (a.is_number()) return Expr::number(0.0 - a.value());  // no negative zero
    if (a.op() == Op::Neg) return a.operand();
    return Expr::negate(a);
}

Expr pow(const Expr& base, const Expr& exponent)
{
    if (exponent.is_number(1.0)) return base;
    if (exponent.is_number(0.0)) return Expr::number(1.0);
    return Expr::binary(Op::Pow, base, exponent);
}

Expr sin(const Expr& a) { return Expr::call(Func::Sin, a); }
Expr cos(const Expr& a) { return Expr::call(Func::Cos, a); }
Expr exp(const Expr& a) { return Expr::call(Func::Exp, a); }
Expr sqrt(const Expr& a) { return Expr::call(Func::Sqrt, a); }
Expr log(const Expr& a) { return Expr::call(Func::Log, a); }

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

namespace {

// Binding strength of the printed form; higher binds tighter.
int precedence(const Expr& e)
{
    switch (e.op()) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        case Op::Number: return e.value() < 0.0 || std::signbit(e.value()) ? 3 : 5;
        default: return 5;
    }
}

void print(const Expr& e, std::string& out);

void print_at(const Expr& e, int min_prec, std::string& out)
{
    if (precedence(e) < min_prec) {
        out += '(';
        print(e, out);
        out += ')';
    } else {
        print(e, out);
    }
}

void print(const Expr& e, std::string& out)
{
    switch (e.op()) {
        case Op::Number: out += format_number(e.value()); return;
        case Op::Symbol: out += e.name(); return;
        case Op::Pi: out += "pi"; return;
        case Op::Add:
        case Op::Sub:
            print_at(e.lhs(), 1, out);
            out += e.op() == Op::Add ? " + " : " - ";
            print_at(e.rhs(), 2, out);
            return;
        case Op::Mul:
        case Op::Div:
            print_at(e.lhs(), 2, out);
            out += e.op() == Op::Mul ? "*" : "/";
            print_at(e.rhs(), 3, out);
            return;
        case Op::Pow:
            print_at(e.lhs(), 5, out);
            out += '^';
            print_at(e.rhs(), 3, out);
            return;
        case Op::Neg:
            out += '-';
            print_at(e.operand(), 3, out);
            return;
        case Op::Call:
            out += func_name(e.func());
            out += '(';
            print(e.operand(), out);
            out += ')';
            return;
    }
}

}  // namespace

std::string to_string(const Expr& e)
{
    std::string out;
    print(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

[[noreturn]] void domain_error(const Expr& e, const char* what)
{
    throw EvalError(std::string("domain violation: ") + what + " in '" + to_string(e) + "'", to_string(e));
}

}  // namespace

double apply_div(double num, double den, const Expr& where)
{
    if (den == 0.0) domain_error(where, "division by zero");
    return num / den;
}

double apply_pow(double base, double exponent, const Expr& where)
{
    if (base < 0.0 && exponent != std::nearbyint(exponent)) domain_error(where, "negative base with non-integer exponent");
    if (base == 0.0 && exponent < 0.0) domain_error(where, "zero raised to a negative power");
    const double r = std::pow(base, exponent);
    if (!std::isfinite(r)) domain_error(where, "overflow");
    return r;
}

double apply_func(Func f, double x, const Expr& where)
{
    switch (f) {
        case Func::Sin: return std::sin(x);
        case Func::Cos: return std::cos(x);
        case Func::Exp: {
            const double r = std::exp(x);
            if (!std::isfinite(r)) domain_error(where, "overflow");
            return r;
        }
        case Func::Sqrt:
            if (x < 0.0) domain_error(where, "square root of a negative number");
            return std::sqrt(x);
        case Func::Log:
            if (x <= 0.0) domain_error(where, "logarithm of a non-positive number");
            return std::log(x);
    }
    return 0.0;
}

double eval(const Expr& e, const Environment& env)
{
    switch (e.op()) {
        case Op::Number: return e.value();
        case Op::Pi: return std::numbers::pi;
        case Op::Symbol: {
            auto it = env.find(e.name());
            if (it == env.end()) throw EvalError("unbound name '" + e.name() + "'", e.name());
            return it->second;
        }
        case Op::Add: return eval(e.lhs(), env) + eval(e.rhs(), env);
        case Op::Sub: return eval(e.lhs(), env) - eval(e.rhs(), env);
        case Op::Mul: return eval(e.lhs(), env) * eval(e.rhs(), env);
        case Op::Div: {
            const double num = eval(e.lhs(), env);
            return apply_div(num, eval(e.rhs(), env), e);
        }
        case Op::Pow: {
            const double base = eval(e.lhs(), env);
            return apply_pow(base, eval(e.rhs(), env), e);
        }
        case Op::Neg: return -eval(e.operand(), env);
        case Op::Call: return apply_func(e.func(), eval(e.operand(), env), e);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Differentiation

bool depends_on(const Expr& e, std::string_view name)
{
    switch (e.op()) {
        case Op::Number:
        case Op::Pi: return false;
        case Op::Symbol: return e.name() == name;
        case Op::Neg:
        case Op::Call: return depends_on(e.operand(), name);
        default: return depends_on(e.lhs(), name) || depends_on(e.rhs(), name);
    }
}

Expr diff(const Expr& e, std::string_view var)
{
    switch (e.op()) {
        case Op::Number:
        case Op::Pi: return Expr();
        case Op::Symbol: return Expr::number(e.name() == var ? 1.0 : 0.0);
        case Op::Add: return diff(e.lhs(), var) + diff(e.rhs(), var);
        case Op::Sub: return diff(e.lhs(), var) - diff(e.rhs(), var);
        case Op::Mul: return diff(e.lhs(), var) * e.rhs() + e.lhs() * diff(e.rhs(), var);
        case Op::Div: {
            const Expr& u = e.lhs();
            const Expr& v = e.rhs();
            const Expr du = diff(u, var);
            const Expr dv = diff(v, var);
            if (dv.is_number(0.0)) return du / v;
            return (du * v - u * dv) / pow(v, Expr::number(2.0));
        }
        case Op::Pow: {
            const Expr& base = e.lhs();
            const Expr& exponent = e.rhs();
            const Expr dbase = diff(base, var);
            if (!depends_on(exponent, var)) {
                if (dbase.is_number(0.0)) return Expr();
                const Expr reduced = exponent.is_number() ? Expr::number(exponent.value() - 1.0)
                                                          : exponent - Expr::number(1.0);
                return exponent * pow(base, reduced) * dbase;
            }
            const Expr dexp = diff(exponent, var);
            return e * (dexp * log(base) + exponent * dbase / base);
        }
        case Op::Neg: return -diff(e.operand(), var);
        case Op::Call: {
            const Expr& a = e.operand();
            const Expr da = diff(a, var);
            if (da.is_number(0.0)) return Expr();
            switch (e.func()) {
                case Func::Sin: return cos(a) * da;
                case Func::Cos: return -(sin(a) * da);
                case Func::Exp: return e * da;
                case Func::Sqrt: return da / (Expr::number(2.0) * e);
                case Func::Log: return da / a;
            }
        }
    }
    return Expr();
}

// ---------------------------------------------------------------------------

bool same(const Expr& a, const Expr& b)
{
    if (a.node() == b.node()) return true;
    if (a.op() != b.op()) return false;
    switch (a.op()) {
        case Op::Number: return a.value() == b.value();
        case Op::Pi: return true;
        case Op::Symbol: return a.name() == b.name();
        case Op::Neg: return same(a.operand(), b.operand());
        case Op::Call: return a.func() == b.func() && same(a.operand(), b.operand());
        default: return same(a.lhs(), b.lhs()) && same(a.rhs(), b.rhs());
    }
}

namespace {

void collect_names(const Expr& e, std::set<std::string>& out)
{
    switch (e.op()) {
        case Op::Number:
        case Op::Pi: return;
        case Op::Symbol: out.insert(e.name()); return;
        case Op::Neg:
        case Op::Call: collect_names(e.operand(), out); return;
        default:
            collect_names(e.lhs(), out);
            collect_names(e.rhs(), out);
    }
}

}  // namespace

std::set<std::string> free_names(const Expr& e)
{
    std::set<std::string> out;
    collect_names(e, out);
    return out;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements)
{
    switch (e.op()) {
        case Op::Number:
        case Op::Pi: return e;
        case Op::Symbol: {
            auto it = replacements.find(e.name());
            return it == replacements.end() ? e : it->second;
        }
        case Op::Neg: return Expr::negate(substitute(e.operand(), replacements));
        case Op::Call: return Expr::call(e.func(), substitute(e.operand(), replacements));
        default:
            return Expr::binary(e.op(), substitute(e.lhs(), replacements), substitute(e.rhs(), replacements));
    }
}

}  // namespace dualpair
