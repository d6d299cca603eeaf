#pragma once

// Hand-rolled random generators for the property tests.

#include "dualpair/expr.hpp"
#include "dualpair/manifold.hpp"
#include "dualpair/symplin.hpp"

#include <random>
#include <string>
#include <vector>

namespace testing_support {

using namespace dualpair;

/// Random expressions over the given variables. Every generated expression is
/// defined and smooth on all of R^n: divisors, sqrt and log arguments are
/// kept bounded away from zero by construction.
class ExprGenerator {
public:
    ExprGenerator(std::vector<std::string> vars, std::uint64_t seed) : vars_(std::move(vars)), rng_(seed) {}

    Expr operator()(int depth = 4) { return gen(depth); }

    std::mt19937_64& rng() { return rng_; }

private:
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    Expr leaf()
    {
        switch (pick(4)) {
        case 0: {
            // short decimals so that printing is exercised on both integers and fractions
            const int v = std::uniform_int_distribution<int>(-20, 20)(rng_);
            return Expr::number(v / 8.0);
        }
        case 1: return Expr::pi();
        default: return Expr::symbol(vars_[static_cast<std::size_t>(pick(static_cast<int>(vars_.size())))]);
        }
    }

    Expr gen(int depth)
    {
        if (depth <= 0 || pick(5) == 0) return leaf();
        const Expr a = gen(depth - 1);
        switch (pick(11)) {
        case 0: return Expr::binary(Op::Add, a, gen(depth - 1));
        case 1: return Expr::binary(Op::Sub, a, gen(depth - 1));
        case 2: return Expr::binary(Op::Mul, a, gen(depth - 1));
        case 3: {
            const Expr den = Expr::binary(Op::Add, Expr::number(2.0), Expr::call(Func::Sin, gen(depth - 1)));
            return Expr::binary(Op::Div, a, den);
        }
        case 4: return Expr::binary(Op::Pow, a, Expr::number(static_cast<double>(2 + pick(2))));
        case 5: return Expr::negate(a);
        case 6: return Expr::call(Func::Sin, a);
        case 7: return Expr::call(Func::Cos, a);
        case 8: return Expr::call(Func::Exp, Expr::call(Func::Sin, a));
        case 9:
            return Expr::call(Func::Sqrt,
                              Expr::binary(Op::Add, Expr::number(1.0), Expr::binary(Op::Pow, a, Expr::number(2.0))));
        default:
            return Expr::call(Func::Log, Expr::binary(Op::Add, Expr::number(2.0), Expr::call(Func::Cos, a)));
        }
    }

    std::vector<std::string> vars_;
    std::mt19937_64 rng_;
};

inline Environment random_env(const std::vector<std::string>& vars, std::mt19937_64& rng, double lo = -1.5,
                              double hi = 1.5)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Environment env;
    for (const auto& v : vars) env[v] = u(rng);
    return env;
}

/// Random nondegenerate antisymmetric n x n matrix with moderate conditioning.
inline Matrix random_symplectic_bivector(Index n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    while (true) {
        Matrix a(n, n);
        for (Index i = 0; i < n; ++i) {
            a(i, i) = 0.0;
            for (Index j = i + 1; j < n; ++j) {
                a(i, j) = g(rng);
                a(j, i) = -a(i, j);
            }
        }
        const Eigen::VectorXd s = singular_values(a);
        if (s[n - 1] > 1e-3 * s[0]) return a;
    }
}

/// Random subspace of R^n of the given dimension.
inline Subspace random_subspace(Index n, Index k, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix v(n, k);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < k; ++j) v(i, j) = g(rng);
    return Subspace::span(v);
}

}  // namespace testing_support
