#include "dualpair/error.hpp"
#include "dualpair/funcspace.hpp"

#include <numbers>

namespace dualpair {

namespace {

// Pullbacks of the per-coordinate target factors, indexed by code.
struct FactorTable {
    std::vector<std::map<int, TrigPoly>> table;

    const TrigPoly& get(std::size_t coord, int code) const { return table.at(coord).at(code); }
};

FactorTable factor_table(const SmoothMap& pi, const FunctionSpace& target_space, const std::vector<bool>& periodic)
{
    const Chart& src = pi.source();
    const Chart& tgt = pi.target();
    FactorTable ft;
    for (std::size_t i = 0; i < tgt.dim(); ++i) {
        int top = 0;
        for (std::size_t k = 0; k < target_space.dim(); ++k) top = std::max(top, std::abs(target_space.mode(k)[i]));
        std::map<int, TrigPoly> row;
        row.emplace(0, TrigPoly::constant(periodic, 1.0));
        const Expr& u = pi.components()[i];
        if (tgt.coordinate(i).periodic) {
            const TrigPoly c1 = to_trig_poly(cos(u), src, pi.parameters());
            const TrigPoly s1 = to_trig_poly(sin(u), src, pi.parameters());
            TrigPoly c = TrigPoly::constant(periodic, 1.0);
            TrigPoly s(periodic);
            for (int k = 1; k <= top; ++k) {
                TrigPoly nc = c * c1 - s * s1;
                TrigPoly ns = s * c1 + c * s1;
                c = std::move(nc);
                s = std::move(ns);
                row.emplace(k, c);
                row.emplace(-k, s);
            }
        } else {
            const TrigPoly p = to_trig_poly(u, src, pi.parameters());
            TrigPoly acc = TrigPoly::constant(periodic, 1.0);
            for (int d = 1; d <= top; ++d) {
                acc = acc * p;
                row.emplace(d, acc);
            }
        }
        ft.table.push_back(std::move(row));
    }
    return ft;
}

HoweInclusion inclusion(const CoefficientSubspace& outer, const CoefficientSubspace& inner, const HoweSpec& spec)
{
    const Inclusion inc = subspace_contains(outer.subspace, inner.subspace, spec.angle_tol);
    HoweInclusion r;
    r.holds = inc.contained;
    r.max_angle = inc.max_angle;
    if (!r.holds)
        for (const auto& w : witnesses(inner.subspace, outer.subspace, spec.max_witnesses, spec.angle_tol))
            r.witnesses.push_back(inner.space->pretty(w));
    return r;
}

Chart local_chart(const Chart& c, const std::map<std::string, std::pair<double, double>, std::less<>>& window)
{
    std::vector<Coordinate> coords;
    for (const auto& x : c.coordinates()) {
        Coordinate y{x.name, false, x.bounds};
        if (auto it = window.find(x.name); it != window.end()) y.bounds = it->second;
        else if (x.periodic) y.bounds = std::make_pair(0.0, 2.0 * std::numbers::pi);
        coords.push_back(std::move(y));
    }
    return Chart(c.name(), std::move(coords));
}

BivectorField rebuild(const BivectorField& b, const Chart& chart)
{
    return BivectorField(b.name(), chart, b.entries(), b.parameters());
}

}  // namespace

PullbackResult pullback_span(const SmoothMap& pi, const BasisSpec& target_spec, std::shared_ptr<const FunctionSpace> space,
                             bool strict)
{
    if (!space) throw InvariantError("pullback_span: no function space");
    if (!(pi.source() == space->chart())) throw InvariantError("pullback_span: map does not start on the space's chart");
    const FunctionSpace target(pi.target(), target_spec);
    const auto periodic = space->periodic_flags();
    const FactorTable ft = factor_table(pi, target, periodic);

    PullbackResult r;
    r.target_basis = target.dim();
    Matrix cols(static_cast<Index>(space->dim()), static_cast<Index>(target.dim()));
    Index kept = 0;
    for (std::size_t k = 0; k < target.dim(); ++k) {
        TrigPoly f = TrigPoly::constant(periodic, 1.0);
        const Mode& m = target.mode(k);
        for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i] != 0) f = f * ft.get(i, m[i]);
        auto v = space->coefficients(f);
        if (!v) {
            if (strict)
                throw InvariantError("pullback of '" + target.basis_name(k) + "' along '" + pi.name() +
                                     "' leaves the function space");
            r.escaped.push_back(target.basis_name(k));
            continue;
        }
        cols.col(kept++) = *v;
    }
    r.span = {space, Subspace::span(cols.leftCols(kept))};
    return r;
}

std::vector<ScalarField> pullback_generators(const SmoothMap& pi)
{
    std::vector<ScalarField> gens;
    for (std::size_t i = 0; i < pi.target().dim(); ++i) {
        const Expr& u = pi.components()[i];
        if (pi.target().coordinate(i).periodic) {
            gens.emplace_back(pi.source(), cos(u), pi.parameters());
            gens.emplace_back(pi.source(), sin(u), pi.parameters());
        } else {
            gens.emplace_back(pi.source(), u, pi.parameters());
        }
    }
    return gens;
}

HoweReport howe_truncated_check(const DualPairDiagram& d, const HoweSpec& spec)
{
    d.validate();
    auto space = std::make_shared<const FunctionSpace>(d.total(), spec.space, spec.max_target_dim);

    HoweReport r;
    r.space_dim = space->dim();
    const PullbackResult f1 = pullback_span(d.left.map, spec.left_target, space);
    const PullbackResult f2 = pullback_span(d.right.map, spec.right_target, space);
    r.escaped_left = f1.escaped;
    r.escaped_right = f2.escaped;
    const CoefficientSubspace f1c = centralizer(space, pullback_generators(d.left.map), d.structure, spec.kernel_tol,
                                                &r.left_info, spec.max_target_dim);
    const CoefficientSubspace f2c = centralizer(space, pullback_generators(d.right.map), d.structure, spec.kernel_tol,
                                                &r.right_info, spec.max_target_dim);
    r.dim_f1 = f1.span.dim();
    r.dim_f2 = f2.span.dim();
    r.dim_f1c = f1c.dim();
    r.dim_f2c = f2c.dim();

    r.f2_in_f1c = inclusion(f1c, f2.span, spec);
    r.f1c_in_f2 = inclusion(f2.span, f1c, spec);
    r.f1_in_f2c = inclusion(f2c, f1.span, spec);
    r.f2c_in_f1 = inclusion(f1.span, f2c, spec);
    r.left_equal = r.f2_in_f1c.holds && r.f1c_in_f2.holds;
    r.right_equal = r.f1_in_f2c.holds && r.f2c_in_f1.holds;
    r.consistent = r.left_equal && r.right_equal;
    return r;
}

DualPairDiagram localize(const DualPairDiagram& d,
                         const std::map<std::string, std::pair<double, double>, std::less<>>& window)
{
    const Chart total = local_chart(d.total(), window);
    DualPairDiagram out;
    out.name = d.name;
    out.structure = rebuild(d.structure, total);
    for (auto [from, to] : {std::pair{&d.left, &out.left}, std::pair{&d.right, &out.right}}) {
        const Chart target = local_chart(from->map.target(), window);
        to->map = SmoothMap(from->map.name(), total, target, from->map.components(), from->map.parameters());
        if (from->bivector) to->bivector = rebuild(*from->bivector, target);
        to->fibers_connected = from->fibers_connected;
        to->bivector_inferred = from->bivector_inferred;
    }
    return out;
}

}  // namespace dualpair
