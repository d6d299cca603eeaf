#pragma once

// Property sweeps shared by the unit tests and the acceptance binary.

#include "generators.hpp"

#include "dualpair/cli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace testing_support {

/// Central difference with step eps^(1/3) * (1 + |x|).
inline double central_difference(const std::function<double(double)>& f, double x)
{
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(x));
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct FdSweep {
    int cases = 0;
    double worst = 0.0;  ///< max |symbolic - fd| / (1 + |symbolic|)
    std::string worst_expr;
};

/// Symbolic derivatives of random expressions against finite differences.
inline FdSweep random_expr_fd_sweep(int count, std::uint64_t seed)
{
    const std::vector<std::string> vars{"x", "y", "z"};
    ExprGenerator gen(vars, seed);
    FdSweep s;
    for (int k = 0; k < count; ++k) {
        const Expr e = gen(4);
        const Environment env = random_env(vars, gen.rng());
        const std::string& v = vars[static_cast<std::size_t>(k) % vars.size()];
        const double symbolic = eval(diff(e, v), env);
        const double fd = central_difference(
            [&](double t) {
                Environment shifted = env;
                shifted[v] = t;
                return eval(e, shifted);
            },
            env.at(v));
        const double err = std::abs(symbolic - fd) / (1.0 + std::abs(symbolic));
        if (err > s.worst || s.cases == 0) {
            s.worst = std::max(s.worst, err);
            s.worst_expr = to_string(e);
        }
        ++s.cases;
    }
    return s;
}

/// Jacobians of every map in every corpus config against finite differences
/// at the plan's grid points (at most `per_map` of them, evenly strided).
inline FdSweep corpus_jacobian_sweep(std::size_t per_map = 40)
{
    FdSweep s;
    for (const auto& name : corpus_names()) {
        const Config c = parse_config_text(corpus_get(name));
        for (const auto& m : c.maps) {
            GridSpec spec = c.plan.grid;
            if (!(m.source() == c.diagram.total())) spec = GridSpec{};
            const SampleGrid grid = SampleGrid::build(m.source(), spec);
            const std::size_t n = std::min(per_map, grid.size());
            for (std::size_t k = 0; k < n; ++k) {
                const Vector p = grid.points()[k * grid.size() / n];
                const Matrix j = m.jacobian(p);
                for (std::size_t col = 0; col < m.source().dim(); ++col) {
                    const Index ci = static_cast<Index>(col);
                    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(p[ci]));
                    Vector plus = p;
                    Vector minus = p;
                    plus[ci] += h;
                    minus[ci] -= h;
                    // angle-valued components are differenced modulo 2pi
                    const Vector fd_col = m.target().difference(m(plus), m(minus)) / (2.0 * h);
                    for (std::size_t r = 0; r < m.target().dim(); ++r) {
                        const double fd = fd_col[static_cast<Index>(r)];
                        const double sym = j(static_cast<Index>(r), ci);
                        const double err = std::abs(sym - fd) / (1.0 + std::abs(sym));
                        if (err >= s.worst) {
                            s.worst = err;
                            s.worst_expr = name + ":" + m.name();
                        }
                        ++s.cases;
                    }
                }
            }
        }
    }
    return s;
}

struct SymplinSweep {
    int cases = 0;
    int dimension_failures = 0;
    int double_complement_failures = 0;
    int two_path_failures = 0;
    int annihilator_failures = 0;
    double worst_angle = 0.0;
};

/// Random subspaces of random symplectic spaces, n in {2,4,6,8,10}.
inline SymplinSweep symplin_sweep(int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    SymplinSweep s;
    for (int k = 0; k < count; ++k) {
        const Index n = 2 * (1 + k % 5);
        const Matrix b = random_symplectic_bivector(n, rng);
        const Index dim = std::uniform_int_distribution<Index>(0, n)(rng);
        const Subspace v = random_subspace(n, dim, rng);

        const Subspace vw = symplectic_orthogonal(v, b);
        if (v.dim() + vw.dim() != n) ++s.dimension_failures;

        const SubspaceComparison back = subspace_equal(symplectic_orthogonal(vw, b), v);
        if (!back.equal) ++s.double_complement_failures;
        s.worst_angle = std::max(s.worst_angle, back.max_angle);

        // Direct definition: w with w^T omega v = 0 for all v, omega = (B#)^-1.
        const Matrix omega = b.inverse();
        const Subspace direct = v.dim() == 0 ? Subspace::full(n) : nullspace(v.basis().transpose() * omega.transpose());
        const SubspaceComparison two = subspace_equal(direct, vw);
        if (!two.equal) ++s.two_path_failures;
        s.worst_angle = std::max(s.worst_angle, two.max_angle);

        const Subspace ann = annihilator(v);
        const SubspaceComparison ann2 = subspace_equal(annihilator(ann), v);
        double kill = 0.0;
        if (ann.dim() > 0 && v.dim() > 0) kill = (ann.basis().transpose() * v.basis()).cwiseAbs().maxCoeff();
        if (ann.dim() != n - v.dim() || !ann2.equal || kill > 1e-10) ++s.annihilator_failures;
        s.worst_angle = std::max(s.worst_angle, ann2.max_angle);
        ++s.cases;
    }
    return s;
}

}  // namespace testing_support
