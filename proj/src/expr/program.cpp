#include "dualpair/error.hpp"
#include "dualpair/expr.hpp"
#include "eval_detail.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace dualpair {

namespace {

enum Code : std::uint8_t { kConst, kLoad, kAdd, kSub, kMul, kDiv, kPow, kNeg, kSin, kCos, kExp, kSqrt, kLog };

Code call_code(Func f)
{
    switch (f) {
        case Func::Sin: return kSin;
        case Func::Cos: return kCos;
        case Func::Exp: return kExp;
        case Func::Sqrt: return kSqrt;
        case Func::Log: return kLog;
    }
    return kSin;
}

}  // namespace

Program::Program(const Expr& e, std::span<const std::string> slots, const Environment& constants)
{
    std::size_t depth = 0;
    auto push = [&](std::uint8_t code, std::int32_t slot, double value, const Expr& src, int stack_delta) {
        code_.push_back({code, slot, value});
        sources_.push_back(src);
        depth = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(depth) + stack_delta);
        max_depth_ = std::max(max_depth_, depth);
    };

    auto emit = [&](auto&& self, const Expr& x) -> void {
        switch (x.op()) {
            case Op::Number: push(kConst, -1, x.value(), x, 1); return;
            case Op::Pi: push(kConst, -1, std::numbers::pi, x, 1); return;
            case Op::Symbol: {
                auto it = std::find(slots.begin(), slots.end(), x.name());
                if (it != slots.end()) {
                    constant_ = false;
                    push(kLoad, static_cast<std::int32_t>(it - slots.begin()), 0.0, x, 1);
                    return;
                }
                auto c = constants.find(x.name());
                if (c == constants.end()) throw EvalError("unbound name '" + x.name() + "'", x.name());
                push(kConst, -1, c->second, x, 1);
                return;
            }
            case Op::Neg:
                self(self, x.operand());
                push(kNeg, -1, 0.0, x, 0);
                return;
            case Op::Call:
                self(self, x.operand());
                push(call_code(x.func()), -1, 0.0, x, 0);
                return;
            default: {
                self(self, x.lhs());
                self(self, x.rhs());
                Code c = kAdd;
                switch (x.op()) {
                    case Op::Add: c = kAdd; break;
                    case Op::Sub: c = kSub; break;
                    case Op::Mul: c = kMul; break;
                    case Op::Div: c = kDiv; break;
                    case Op::Pow: c = kPow; break;
                    default: break;
                }
                push(c, -1, 0.0, x, -1);
                return;
            }
        }
    };
    emit(emit, e);
}

double Program::operator()(std::span<const double> values) const
{
    if (code_.empty()) return 0.0;
    constexpr std::size_t kInline = 32;
    std::array<double, kInline> small{};
    std::vector<double> large;
    double* stack = small.data();
    if (max_depth_ > kInline) {
        large.resize(max_depth_);
        stack = large.data();
    }
    std::size_t top = 0;
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& in = code_[i];
        switch (in.code) {
            case kConst: stack[top++] = in.value; break;
            case kLoad: stack[top++] = values[static_cast<std::size_t>(in.slot)]; break;
            case kAdd: --top; stack[top - 1] += stack[top]; break;
            case kSub: --top; stack[top - 1] -= stack[top]; break;
            case kMul: --top; stack[top - 1] *= stack[top]; break;
            case kDiv: --top; stack[top - 1] = apply_div(stack[top - 1], stack[top], sources_[i]); break;
            case kPow: --top; stack[top - 1] = apply_pow(stack[top - 1], stack[top], sources_[i]); break;
            case kNeg: stack[top - 1] = -stack[top - 1]; break;
            case kSin: stack[top - 1] = std::sin(stack[top - 1]); break;
            case kCos: stack[top - 1] = std::cos(stack[top - 1]); break;
            case kExp: stack[top - 1] = apply_func(Func::Exp, stack[top - 1], sources_[i]); break;
            case kSqrt: stack[top - 1] = apply_func(Func::Sqrt, stack[top - 1], sources_[i]); break;
            case kLog: stack[top - 1] = apply_func(Func::Log, stack[top - 1], sources_[i]); break;
        }
    }
    return stack[0];
}

}  // namespace dualpair
