#include "dualpair/error.hpp"
#include "dualpair/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>

namespace dualpair {

namespace {

struct Images {
    std::vector<TrigPoly> columns;  ///< X_h[b] for each source basis element b
    std::vector<TrigPoly> velocity; ///< X_h = B# dh componentwise
};

Images derivation_images(const ScalarField& h, const BivectorField& b, const FunctionSpace& source)
{
    const Chart& chart = source.chart();
    if (!(h.chart() == chart) || !(b.chart() == chart))
        throw InvariantError("derivation: generator, bivector and space must share a chart");
    const std::size_t n = chart.dim();
    const auto periodic = source.periodic_flags();

    const TrigPoly hp = to_trig_poly(h.body(), chart, h.parameters());
    std::vector<TrigPoly> dh;
    for (std::size_t j = 0; j < n; ++j) dh.push_back(hp.derivative(j));

    Images im;
    for (std::size_t i = 0; i < n; ++i) {
        TrigPoly v(periodic);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || dh[j].is_zero()) continue;
            const Expr& e = b.entry(i, j);
            if (e.is_number(0.0)) continue;
            v += to_trig_poly(e, chart, b.parameters()) * dh[j];
        }
        im.velocity.push_back(std::move(v));
    }

    im.columns.reserve(source.dim());
    for (std::size_t k = 0; k < source.dim(); ++k) {
        const TrigPoly g = TrigPoly::monomial(periodic, source.mode(k));
        TrigPoly col(periodic);
        for (std::size_t i = 0; i < n; ++i) {
            if (source.mode(k)[i] == 0 || im.velocity[i].is_zero()) continue;
            col += g.derivative(i) * im.velocity[i];
        }
        im.columns.push_back(std::move(col));
    }
    return im;
}

// Smallest spec of the source's shape holding `source` and every image.
BasisSpec enlarged_spec(const FunctionSpace& source, const std::vector<const Images*>& all)
{
    const Chart& chart = source.chart();
    const auto periodic = source.periodic_flags();
    BasisSpec spec = source.spec();
    int total = spec.total_degree.value_or(0);
    for (const Images* im : all)
        for (const auto& col : im->columns)
            for (const auto& [m, c] : col.terms()) {
                int deg = 0;
                for (std::size_t i = 0; i < m.size(); ++i) {
                    const std::string& name = chart.coordinate(i).name;
                    if (periodic[i]) {
                        spec.frequency[name] = std::max(spec.frequency[name], std::abs(m[i]));
                    } else {
                        spec.degree[name] = std::max(spec.degree[name], m[i]);
                        deg += m[i];
                    }
                }
                total = std::max(total, deg);
            }
    if (spec.total_degree) spec.total_degree = total;
    return spec;
}

std::optional<double> resonance_margin(const Images& im, const FunctionSpace& space)
{
    const auto periodic = space.periodic_flags();
    std::vector<double> v;
    std::vector<int> bound;
    bool moving = false;
    for (std::size_t i = 0; i < periodic.size(); ++i) {
        if (!periodic[i]) continue;
        const TrigPoly& p = im.velocity[i];
        const double c = p.constant_term();
        if (p.terms().size() > (c != 0.0 ? 1u : 0u)) return std::nullopt;
        if (c == 0.0) continue;  // modes along fixed angles are invariant, not resonant
        v.push_back(c);
        bound.push_back(space.spec().frequency.at(space.chart().coordinate(i).name));
        moving = true;
    }
    if (!moving) return std::nullopt;
    double combos = 1.0;
    for (int k : bound) combos *= 2.0 * k + 1.0;
    if (combos > 1e7) return std::nullopt;

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> k(v.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = -bound[i];
    while (true) {
        bool nonzero = false;
        double dot = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) {
            nonzero = nonzero || k[i] != 0;
            dot += k[i] * v[i];
        }
        if (nonzero) best = std::min(best, std::abs(dot));
        std::size_t i = 0;
        while (i < k.size() && ++k[i] > bound[i]) k[i] = -bound[i], ++i;
        if (i == k.size()) break;
    }
    return std::isfinite(best) ? std::optional<double>(best) : std::nullopt;
}

}  // namespace

Derivation derivation_matrix(const ScalarField& h, const BivectorField& b, const FunctionSpace& source,
                             std::size_t max_target_dim)
{
    const Images im = derivation_images(h, b, source);
    auto target = std::make_shared<const FunctionSpace>(source.chart(), enlarged_spec(source, {&im}), max_target_dim);
    Derivation d;
    d.target = target;
    d.matrix = Matrix::Zero(static_cast<Index>(target->dim()), static_cast<Index>(source.dim()));
    for (std::size_t k = 0; k < im.columns.size(); ++k)
        for (const auto& [m, c] : im.columns[k].terms())
            d.matrix(static_cast<Index>(*target->index_of(m)), static_cast<Index>(k)) = c;
    return d;
}

CoefficientSubspace centralizer(std::shared_ptr<const FunctionSpace> space, const std::vector<ScalarField>& generators,
                                const BivectorField& b, double kernel_tol, CentralizerInfo* info,
                                std::size_t max_target_dim)
{
    if (!space) throw InvariantError("centralizer: no function space");
    std::vector<Images> images;
    images.reserve(generators.size());
    for (const auto& h : generators) images.push_back(derivation_images(h, b, *space));

    std::vector<const Images*> all;
    for (const auto& im : images) all.push_back(&im);
    const BasisSpec target = enlarged_spec(*space, all);
    const std::size_t target_dim = basis_dimension(space->chart(), target);
    if (target_dim > max_target_dim)
        throw InvariantError("derivation target of dimension " + std::to_string(target_dim) + " exceeds the limit of " +
                             std::to_string(max_target_dim));

    // Stack the derivations, keeping only rows that are not identically zero.
    std::map<std::pair<std::size_t, Mode>, Index> rows;
    for (std::size_t g = 0; g < images.size(); ++g)
        for (const auto& col : images[g].columns)
            for (const auto& [m, c] : col.terms()) rows.emplace(std::make_pair(g, m), 0);
    Index next = 0;
    for (auto& [key, r] : rows) r = next++;

    Matrix stacked = Matrix::Zero(next, static_cast<Index>(space->dim()));
    for (std::size_t g = 0; g < images.size(); ++g)
        for (std::size_t k = 0; k < images[g].columns.size(); ++k)
            for (const auto& [m, c] : images[g].columns[k].terms())
                stacked(rows.at({g, m}), static_cast<Index>(k)) = c;

    CoefficientSubspace out{space, Subspace::full(static_cast<Index>(space->dim()))};
    double gap = 0.0;
    if (next > 0) {
        Kernel k = kernel(stacked, kernel_tol);
        out.subspace = std::move(k.space);
        gap = k.gap;
    }
    if (info) {
        info->gap = gap;
        info->rows = static_cast<std::size_t>(next);
        info->target_dim = target_dim;
        info->resonance.clear();
        for (std::size_t g = 0; g < images.size(); ++g)
            info->resonance.push_back({to_string(generators[g].body()), resonance_margin(images[g], *space)});
    }
    return out;
}

}  // namespace dualpair
