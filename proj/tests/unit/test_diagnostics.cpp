#include "../support.hpp"

#include "dualpair/diagnostics.hpp"
#include "dualpair/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace dualpair;
using namespace testing_support;

namespace {

Vector vec(std::initializer_list<double> v)
{
    Vector p(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) p[i++] = x;
    return p;
}

SampleGrid grid_of(const DualPairDiagram& d, std::size_t per = 5)
{
    GridSpec s;
    s.points_per_axis = per;
    return SampleGrid::build(d.total(), s);
}

std::vector<Vector> points_of(const DualPairDiagram& d, std::size_t per = 5) { return grid_of(d, per).points(); }

std::vector<DualPairDiagram> all_diagrams() { return {giacobbe(), kronecker(), u2_momentum(), t5r_block(), r4_split()}; }

}  // namespace

TEST_CASE("sample grids")
{
    const SampleGrid g = SampleGrid::build(giacobbe().total(), GridSpec{});
    CHECK(g.size() == 49);
    const double first = 2.0 * std::numbers::pi / 7.0 * std::numbers::inv_pi;
    CHECK(g.points()[0][0] == doctest::Approx(first));

    GridSpec s;
    s.points_per_axis = 5;
    const SampleGrid r = SampleGrid::build(standard_r4(), s);
    CHECK(r.size() == 625);
    bool has_origin = false;
    for (const auto& p : r.points()) has_origin = has_origin || p.isZero(0.0);
    CHECK(has_origin);

    s.include = {Vector::Zero(4), vec({0.1, 0.2, 0.3, 0.4})};
    CHECK(SampleGrid::build(standard_r4(), s).size() == 626);

    s.jitter = 0.3;
    s.seed = 11;
    const SampleGrid a = SampleGrid::build(standard_r4(), s);
    const SampleGrid b = SampleGrid::build(standard_r4(), s);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points()[i] == b.points()[i]);
    s.seed = 12;
    CHECK(SampleGrid::build(standard_r4(), s).points()[0] != a.points()[0]);

    const Chart bounded("B", {{"x", false, std::make_pair(0.0, 1.0)}});
    CHECK_THROWS_AS(SampleGrid(bounded, {vec({2.0})}), InvariantError);
}

TEST_CASE("Poisson map checks")
{
    const DualPairDiagram g = giacobbe();
    const PoissonMapReport p1 = check_poisson_map(g.left.map, g.structure, *g.left.bivector, grid_of(g));
    CHECK(p1.pass);
    CHECK(p1.max_residual == 0.0);

    const DualPairDiagram u = u2_momentum();
    CHECK(check_poisson_map(u.right.map, u.structure, *u.right.bivector, grid_of(u)).pass);
    const PoissonMapReport zero =
        check_poisson_map(u.right.map, u.structure, BivectorField::zero("z", u.right.map.target()), grid_of(u));
    CHECK(!zero.pass);
    CHECK(zero.max_residual > 0.1);
    CHECK_THROWS_AS(check_poisson_map(u.right.map, g.structure, *u.right.bivector, grid_of(u)), InvariantError);
}

TEST_CASE("gl(2) brackets of the outer-product components")
{
    // Brute force: {x_i y_j, x_k y_l} through the symbolic bracket on R^4
    // against the target structure at pi(m).
    const DualPairDiagram u = u2_momentum();
    const Chart& m = u.total();
    std::mt19937_64 rng(21);
    for (int t = 0; t < 20; ++t) {
        const Vector p = random_point(m, rng, -2, 2);
        const Matrix target = (*u.right.bivector)(u.right.map(p));
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = 0; b < 4; ++b) {
                const double direct = bracket_field(u.right.map.component_field(a), u.right.map.component_field(b),
                                                    u.structure)(p);
                CHECK(direct == doctest::Approx(target(static_cast<Index>(a), static_cast<Index>(b))).epsilon(1e-12));
            }
        // {z11, z21} = z21
        CHECK(target(0, 2) == doctest::Approx(p[1] * p[2]));
    }
}

TEST_CASE("Lie-Weinstein check")
{
    const DualPairDiagram g = giacobbe();
    for (const auto& m : points_of(g, 7)) {
        const LWVerdict v = lw_check_at(g, m);
        CHECK(v.pass);
        CHECK(v.dim_k1 == 1);
        CHECK(v.dim_k2 == 1);
    }
    const DualPairDiagram k = kronecker();
    for (const auto& m : points_of(k, 3)) {
        const LWVerdict v = lw_check_at(k, m);
        CHECK(!v.pass);
        CHECK(v.dim_k1_omega == 1);
        CHECK(v.dim_k2 == 3);
    }
    const LWVerdict o = lw_check_at(u2_momentum(), Vector::Zero(4));
    CHECK(!o.pass);
    CHECK(o.dim_k1 == 4);
    CHECK(o.dim_k1_omega == 0);
    CHECK(o.dim_k2 == 4);

    DualPairDiagram flat = g;
    flat.structure = BivectorField::zero("zero", g.total());
    CHECK_THROWS_AS(lw_check_at(flat, vec({1, 1})), InvariantError);
}

TEST_CASE("LW verdicts are symmetric in the legs and imply complementary kernels")
{
    for (const auto& d : all_diagrams()) {
        CAPTURE(d.name);
        const DualPairDiagram s = swap_legs(d);
        for (const auto& m : points_of(d, d.total().dim() > 4 ? 2 : 4)) {
            const LWVerdict a = lw_check_at(d, m);
            const LWVerdict b = lw_check_at(s, m);
            CHECK(a.pass == b.pass);
            if (a.pass) CHECK(a.dim_k1 + a.dim_k2 == static_cast<Index>(d.total().dim()));
        }
    }
}

TEST_CASE("rank scans")
{
    const DualPairDiagram k = kronecker();
    const RankScanReport r = rank_scan(k.left.map, grid_of(k));
    CHECK(r.constant_rank);
    CHECK(r.submersion);
    CHECK(r.counts.begin()->first == 1);

    const DualPairDiagram u = u2_momentum();
    const RankScanReport ru = rank_scan(u.left.map, grid_of(u));
    CHECK(!ru.constant_rank);
    CHECK(!ru.submersion);
    REQUIRE(ru.counts.size() == 2);
    CHECK(ru.counts.count(0) == 1);
    CHECK(ru.counts.count(1) == 1);
    CHECK(ru.witnesses.at(0).isZero(0.0));

    const DualPairDiagram g = giacobbe();
    CHECK(rank_scan(g.right.map, grid_of(g)).submersion);
}

TEST_CASE("dimension check")
{
    CHECK(dimension_check(giacobbe()).pass);
    CHECK(!dimension_check(kronecker()).pass);
    const DimensionVerdict t = dimension_check(t5r_block());
    CHECK(!t.pass);
    CHECK(t.dim_m == 6);
    CHECK(t.dim_p1 == 4);
    CHECK(t.dim_p2 == 1);
    CHECK(dimension_check(r4_split()).pass);
}

TEST_CASE("pushforward bivectors")
{
    const DualPairDiagram t = t5r_block();
    const SampleGrid gt = grid_of(t, 3);
    const PushforwardReport r = pushforward_bivector(t.left.map, t.structure, gt);
    CHECK(r.projectable);
    REQUIRE(r.fitted);
    CHECK(r.rank_counts.size() == 1);
    CHECK(r.rank_counts.begin()->first == 2);
    CHECK(r.preimage_shortfalls == 0);
    const Matrix c = (*r.fitted)(Vector::Zero(4));
    const Environment& p = t.structure.parameters();
    CHECK(c(0, 1) == doctest::Approx(p.at("c12")));
    CHECK(c(0, 2) == doctest::Approx(p.at("c13")));
    CHECK(c(1, 2) == doctest::Approx(p.at("c23")));
    CHECK(c.row(3).isZero(0.0));
    CHECK(c.col(3).isZero(0.0));
    CHECK(check_poisson_map(t.left.map, t.structure, *r.fitted, gt, 1e-8).pass);

    const DualPairDiagram u = u2_momentum();
    const SampleGrid gu = grid_of(u);
    const PushforwardReport ru = pushforward_bivector(u.right.map, u.structure, gu);
    CHECK(ru.projectable);
    REQUIRE(ru.fitted);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 10; ++k) {
        const Vector z = random_point(ru.fitted->chart(), rng, -3, 3);
        CHECK(((*ru.fitted)(z) - (*u.right.bivector)(z)).cwiseAbs().maxCoeff() <= 1e-9);
    }
    CHECK(check_poisson_map(u.right.map, u.structure, *ru.fitted, gu, 1e-8).pass);

    // (y1, x1*x2): {m1, m2} = -x2 varies along the fibers
    const Chart r2("M", {line("m1"), line("m2")});
    const SmoothMap bad("bad", standard_r4(), r2, exprs({"y1", "x1*x2"}));
    const PushforwardReport rb = pushforward_bivector(bad, standard_r4_structure(), gu);
    CHECK(!rb.projectable);
    CHECK(rb.max_variation > 0.1);
}

TEST_CASE("diagram completion fills missing leg bivectors")
{
    DualPairDiagram t = t5r_block();
    REQUIRE(!t.left.bivector);
    complete_diagram(t, grid_of(t, 3));
    REQUIRE(t.left.bivector);
    CHECK(t.left.bivector_inferred);
    CHECK(!t.right.bivector_inferred);
}

TEST_CASE("leaf correspondence")
{
    const DualPairDiagram t = t5r_block();
    for (const auto& m : points_of(t, 2)) {
        const LeafReport r = leaf_correspondence_check(t, m);
        CHECK(r.image_dim == 3);
        CHECK(r.leaf_rank == 2);
        CHECK(!r.consistent);
    }
    const LeafReport s = leaf_correspondence_check(r4_split(), vec({0.1, 0.2, 0.3, 0.4}));
    CHECK(s.image_dim == 2);
    CHECK(s.leaf_rank == 2);
    CHECK(s.consistent);
    CHECK(!s.global_caveat);
    const LeafReport g = leaf_correspondence_check(giacobbe(), vec({0.5, 0.5}));
    CHECK(g.image_dim == 0);
    CHECK(g.leaf_rank == 0);
    CHECK(g.consistent);
    CHECK(g.global_caveat);
}

TEST_CASE("diagram validation")
{
    DualPairDiagram d = giacobbe();
    CHECK_NOTHROW(d.validate());
    d.left.bivector = BivectorField::zero("z", d.total());
    CHECK_THROWS_AS(d.validate(), InvariantError);
    d = giacobbe();
    d.right.map = kronecker().left.map;
    CHECK_THROWS_AS(d.validate(), InvariantError);
}
