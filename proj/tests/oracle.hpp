#pragma once

// Brute-force centralizer oracle. The basis is enumerated here as expression
// text and brackets are evaluated pointwise through symbolic differentiation,
// so nothing is shared with the trigonometric-polynomial algebra under test.
// The kernel of the collocation matrix over many random points equals the
// exact kernel once the points outnumber the image dimension.

#include "support.hpp"

#include "dualpair/symplin.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

struct OracleBasis {
    int frequency = 0;
    int degree = 0;
    std::optional<int> total_degree;
};

inline std::vector<std::string> oracle_basis(const Chart& c, const OracleBasis& spec)
{
    std::vector<std::pair<std::string, int>> acc{{"1", 0}};
    for (const auto& k : c.coordinates()) {
        std::vector<std::pair<std::string, int>> factors{{"1", 0}};
        if (k.periodic) {
            for (int f = 1; f <= spec.frequency; ++f) {
                factors.push_back({"cos(" + std::to_string(f) + "*" + k.name + ")", 0});
                factors.push_back({"sin(" + std::to_string(f) + "*" + k.name + ")", 0});
            }
        } else {
            for (int d = 1; d <= spec.degree; ++d) factors.push_back({k.name + "^" + std::to_string(d), d});
        }
        std::vector<std::pair<std::string, int>> next;
        for (const auto& [a, da] : acc)
            for (const auto& [b, db] : factors) {
                if (spec.total_degree && da + db > *spec.total_degree) continue;
                next.push_back({a + "*" + b, da + db});
            }
        acc = std::move(next);
    }
    std::vector<std::string> out;
    for (const auto& [s, d] : acc) out.push_back(s);
    return out;
}

/// Dimension of {f in span(basis) : {f, g} = 0 for every generator g}.
inline Index oracle_centralizer_dim(const BivectorField& b, const std::vector<std::string>& generators,
                                    const OracleBasis& spec, std::size_t points, std::uint64_t seed = 7)
{
    const Chart& c = b.chart();
    const auto basis = oracle_basis(c, spec);
    std::vector<ScalarField> fs;
    for (const auto& s : basis) fs.emplace_back(c, parse(s), b.parameters());
    std::vector<ScalarField> gs;
    for (const auto& s : generators) gs.emplace_back(c, parse(s), b.parameters());

    std::mt19937_64 rng(seed);
    Matrix a(static_cast<Index>(points * gs.size()), static_cast<Index>(fs.size()));
    for (std::size_t p = 0; p < points; ++p) {
        const Vector m = random_point(c, rng);
        const Matrix bm = b(m);
        std::vector<Vector> dg;
        for (const auto& g : gs) dg.push_back(g.differential(m));
        for (std::size_t j = 0; j < fs.size(); ++j) {
            const Vector df = fs[j].differential(m);
            for (std::size_t k = 0; k < gs.size(); ++k)
                a(static_cast<Index>(p * gs.size() + k), static_cast<Index>(j)) = df.dot(bm * dg[k]);
        }
    }
    return kernel(a, 1e-9).space.dim();
}

}  // namespace testing_support
