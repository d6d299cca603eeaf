#pragma once

// Expression trees for scalar fields, map components and bivector entries.
//
// Grammar (one-pass recursive descent):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' factor)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')' | 'pi'
//
// Names are resolved only at evaluation time. Chart coordinates and named
// parameters share the syntax; `diff` differentiates with respect to one name
// and treats every other name as a constant.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dualpair {

enum class Op : std::uint8_t { Number, Symbol, Pi, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Func : std::uint8_t { Sin, Cos, Exp, Sqrt, Log };

std::string_view func_name(Func f);

using Environment = std::map<std::string, double, std::less<>>;

/// Immutable, cheaply copyable handle to an expression tree.
class Expr {
public:
    struct Node;

    /// The literal 0.
    Expr();

    static Expr number(double v);
    static Expr symbol(std::string name);
    static Expr pi();
    /// Unsimplified constructors; the parser uses these so that the tree it
    /// returns mirrors the source text exactly.
    static Expr binary(Op op, Expr lhs, Expr rhs);
    static Expr negate(Expr operand);
    static Expr call(Func f, Expr arg);

    Op op() const;
    double value() const;              ///< Number only
    const std::string& name() const;   ///< Symbol only
    Func func() const;                 ///< Call only
    const Expr& lhs() const;           ///< binary ops
    const Expr& rhs() const;           ///< binary ops
    const Expr& operand() const;       ///< Neg and Call

    bool is_number() const { return op() == Op::Number; }
    bool is_number(double v) const { return is_number() && value() == v; }

    const Node* node() const noexcept { return node_.get(); }

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Simplifying constructors: 0*x -> 0, x+0 -> x, 1*x -> x, x^1 -> x, --x -> x,
// and folding of finite numeric subterms. No algebraic identities beyond that.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr sqrt(const Expr& a);
Expr log(const Expr& a);

Expr parse(std::string_view text);

/// Canonical text form. parse(to_string(e)) evaluates bit-identically to e.
std::string to_string(const Expr& e);

double eval(const Expr& e, const Environment& env);

Expr diff(const Expr& e, std::string_view var);

/// Structural equality.
bool same(const Expr& a, const Expr& b);

std::set<std::string> free_names(const Expr& e);
bool depends_on(const Expr& e, std::string_view name);

Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements);

/// Format a double with 17 significant digits (round-trip exact).
std::string format_number(double v);

/// Flat stack program compiled from an Expr for hot evaluation loops.
/// Variables are bound to slots of an input span; the remaining names are
/// folded in as constants from `constants` at compile time.
class Program {
public:
    Program() = default;
    Program(const Expr& e, std::span<const std::string> slots, const Environment& constants);

    double operator()(std::span<const double> values) const;

    /// True if the program reads no slot.
    bool is_constant() const noexcept { return constant_; }

private:
    struct Instr {
        std::uint8_t code;
        std::int32_t slot;
        double value;
    };
    std::vector<Instr> code_;
    std::vector<Expr> sources_;  // parallel to code_, for error messages
    std::size_t max_depth_ = 0;
    bool constant_ = true;
};

}  // namespace dualpair
