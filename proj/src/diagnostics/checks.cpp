#include "dualpair/diagnostics.hpp"
#include "dualpair/error.hpp"

#include <algorithm>
#include <cmath>

namespace dualpair {

void DualPairDiagram::validate() const
{
    const Chart& m = total();
    for (const Leg* leg : {&left, &right}) {
        if (!(leg->map.source() == m))
            throw InvariantError("diagram '" + name + "': map '" + leg->map.name() + "' does not start on '" + m.name() + "'");
        if (leg->bivector && !(leg->bivector->chart() == leg->map.target()))
            throw InvariantError("diagram '" + name + "': bivector '" + leg->bivector->name() + "' does not live on '" +
                                 leg->map.target().name() + "'");
    }
}

DualPairDiagram swap_legs(const DualPairDiagram& d)
{
    DualPairDiagram s = d;
    std::swap(s.left, s.right);
    return s;
}

PoissonMapReport check_poisson_map(const SmoothMap& pi, const BivectorField& bm, const BivectorField& bp,
                                   const SampleGrid& grid, double tol)
{
    if (!(pi.source() == bm.chart())) throw InvariantError("check_poisson_map: source chart mismatch");
    if (!(pi.target() == bp.chart())) throw InvariantError("check_poisson_map: target chart mismatch");
    if (!(grid.chart() == pi.source())) throw InvariantError("check_poisson_map: grid lives on another chart");

    PoissonMapReport r;
    double largest = 0.0;
    for (const auto& m : grid.points()) {
        const Matrix j = pi.jacobian(m);
        const Matrix pushed = j * bm(m) * j.transpose();
        const Vector image = pi(m);
        if (!pi.target().contains(image)) throw InvariantError("check_poisson_map: image outside target chart");
        const Matrix target = bp(image);
        const double residual = (pushed - target).cwiseAbs().maxCoeff();
        largest = std::max({largest, pushed.cwiseAbs().maxCoeff(), target.cwiseAbs().maxCoeff()});
        if (r.points == 0 || residual > r.max_residual) {
            r.max_residual = residual;
            r.worst_point = m;
        }
        ++r.points;
    }
    r.scale = 1.0 + largest;
    r.pass = r.max_residual <= tol * r.scale;
    return r;
}

LWVerdict lw_check_at(const DualPairDiagram& d, const Vector& m, double rank_tol, double angle_tol)
{
    LWVerdict v;
    v.point = m;
    const Matrix b = d.structure(m);
    if (!is_nondegenerate(b)) throw InvariantError("lw_check_at: total-space bivector is degenerate at sample point");
    const Subspace k1 = nullspace(d.left.map.jacobian(m), rank_tol);
    const Subspace k2 = nullspace(d.right.map.jacobian(m), rank_tol);
    const Subspace k1w = symplectic_orthogonal(k1, b);
    const SubspaceComparison c = subspace_equal(k1w, k2, angle_tol);
    v.dim_k1 = k1.dim();
    v.dim_k2 = k2.dim();
    v.dim_k1_omega = k1w.dim();
    v.max_angle = c.max_angle;
    v.pass = c.equal;
    return v;
}

RankScanReport rank_scan(const SmoothMap& pi, const SampleGrid& grid, double rank_tol)
{
    RankScanReport r;
    for (const auto& m : grid.points()) {
        const Index rank = numerical_rank(pi.jacobian(m), rank_tol);
        if (!r.witnesses.count(rank)) r.witnesses.emplace(rank, m);
        ++r.counts[rank];
    }
    r.constant_rank = r.counts.size() == 1;
    r.submersion = r.constant_rank && !r.counts.empty() &&
                   r.counts.begin()->first == static_cast<Index>(pi.target().dim());
    return r;
}

DimensionVerdict dimension_check(const DualPairDiagram& d)
{
    DimensionVerdict v;
    v.dim_m = d.total().dim();
    v.dim_p1 = d.left.map.target().dim();
    v.dim_p2 = d.right.map.target().dim();
    v.pass = v.dim_p1 + v.dim_p2 == v.dim_m;
    return v;
}

LeafReport leaf_correspondence_check(const DualPairDiagram& d, const Vector& m, double rank_tol)
{
    LeafReport r;
    r.point = m;
    const Matrix b = d.structure(m);
    if (!is_nondegenerate(b)) throw InvariantError("leaf_correspondence_check: total-space bivector is degenerate");
    const Matrix j1 = d.left.map.jacobian(m);
    const Subspace k2 = nullspace(d.right.map.jacobian(m), rank_tol);
    const Subspace k2w = symplectic_orthogonal(k2, b);
    const Subspace s = sum(k2, k2w);
    r.image_dim = s.dim() == 0 ? 0 : numerical_rank(j1 * s.basis(), rank_tol);

    const Matrix b1 = d.left.bivector ? (*d.left.bivector)(d.left.map(m)) : Matrix(j1 * b * j1.transpose());
    r.leaf_rank = numerical_rank(b1, rank_tol);
    r.consistent = r.image_dim == r.leaf_rank;
    r.global_caveat = d.left.fibers_connected != FiberConnectivity::Yes ||
                      d.right.fibers_connected != FiberConnectivity::Yes;
    return r;
}

}  // namespace dualpair
