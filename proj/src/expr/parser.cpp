#include "dualpair/error.hpp"
#include "dualpair/expr.hpp"

#include <cctype>
#include <charconv>
#include <optional>

namespace dualpair {

ParseError::ParseError(std::string message, std::size_t offset, std::vector<std::string> expected)
    : Error([&] {
          std::string full = "syntax error at offset " + std::to_string(offset) + ": " + message;
          if (!expected.empty()) {
              full += " (expected ";
              for (std::size_t i = 0; i < expected.size(); ++i) {
                  if (i) full += ", ";
                  full += expected[i];
              }
              full += ")";
          }
          return full;
      }()),
      offset_(offset),
      expected_(std::move(expected))
{
}

EvalError::EvalError(std::string message, std::string subexpression)
    : Error(std::move(message)), subexpression_(std::move(subexpression))
{
}

ConfigError::ConfigError(std::string path, const std::string& message)
    : Error(path.empty() ? message : path + ": " + message), path_(std::move(path))
{
}

namespace {

const std::vector<std::string> kOperandStart = {"number", "name", "'('", "'-'", "'pi'"};

std::optional<Func> lookup_func(std::string_view name)
{
    if (name == "sin") return Func::Sin;
    if (name == "cos") return Func::Cos;
    if (name == "exp") return Func::Exp;
    if (name == "sqrt") return Func::Sqrt;
    if (name == "log") return Func::Log;
    return std::nullopt;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr parse_all()
    {
        Expr e = expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_,
                             {"operator", "end of input"});
        return e;
    }

private:
    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expr()
    {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) lhs = Expr::binary(Op::Add, lhs, term());
            else if (accept('-')) lhs = Expr::binary(Op::Sub, lhs, term());
            else return lhs;
        }
    }

    Expr term()
    {
        Expr lhs = factor();
        for (;;) {
            if (accept('*')) lhs = Expr::binary(Op::Mul, lhs, factor());
            else if (accept('/')) lhs = Expr::binary(Op::Div, lhs, factor());
            else return lhs;
        }
    }

    Expr factor()
    {
        if (accept('-')) return Expr::negate(factor());
        return power();
    }

    Expr power()
    {
        Expr base = atom();
        if (accept('^')) return Expr::binary(Op::Pow, base, factor());
        return base;
    }

    Expr atom()
    {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_, kOperandStart);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = expr();
            if (!accept(')')) throw ParseError("unbalanced parenthesis", position(), {"')'"});
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return named();
        throw ParseError("unexpected '" + std::string(1, c) + "'", pos_, kOperandStart);
    }

    std::size_t position()
    {
        skip_ws();
        return pos_;
    }

    Expr number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
            return n;
        };
        std::size_t n = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) throw ParseError("malformed number", start, {"digit"});
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) throw ParseError("malformed exponent", pos_, {"digit"});
        }
        double v = 0.0;
        const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
            throw ParseError("number out of range", start, {"number"});
        return Expr::number(v);
    }

    Expr named()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "pi") return Expr::pi();

        skip_ws();
        const bool call = pos_ < text_.size() && text_[pos_] == '(';
        const auto f = lookup_func(name);
        if (call) {
            if (!f) throw ParseError("unknown function '" + std::string(name) + "'", start, {"sin", "cos", "exp", "sqrt", "log"});
            ++pos_;
            Expr arg = expr();
            if (!accept(')')) throw ParseError("unbalanced parenthesis", position(), {"')'"});
            return Expr::call(*f, arg);
        }
        if (f) throw ParseError("function '" + std::string(name) + "' requires parentheses", pos_, {"'('"});
        return Expr::symbol(std::string(name));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text)
{
    return Parser(text).parse_all();
}

}  // namespace dualpair
