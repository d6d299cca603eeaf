#pragma once

// Hand-built charts, structures and diagrams shared by the unit tests. These
// are assembled directly from the library types, not from the config loader,
// so tests of the loader can compare against them.

#include "dualpair/diagnostics.hpp"
#include "dualpair/manifold.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using namespace dualpair;

inline Coordinate angle(std::string name) { return {std::move(name), true, std::nullopt}; }
inline Coordinate line(std::string name) { return {std::move(name), false, std::nullopt}; }

inline std::vector<Expr> exprs(const std::vector<std::string>& texts)
{
    std::vector<Expr> out;
    for (const auto& t : texts) out.push_back(parse(t));
    return out;
}

inline BivectorField bivector(std::string name, const Chart& chart, const std::vector<std::vector<std::string>>& rows,
                              Environment params = {})
{
    std::vector<std::vector<Expr>> e;
    for (const auto& r : rows) e.push_back(exprs(r));
    return BivectorField(std::move(name), chart, std::move(e), std::move(params));
}

inline Chart standard_r4()
{
    return Chart("R4", {line("x1"), line("x2"), line("y1"), line("y2")});
}

inline BivectorField standard_r4_structure()
{
    return bivector("omega", standard_r4(),
                    {{"0", "0", "1", "0"}, {"0", "0", "0", "1"}, {"-1", "0", "0", "0"}, {"0", "-1", "0", "0"}});
}

inline BivectorField standard_plane_structure(const Chart& c)
{
    return bivector("area", c, {{"0", "1"}, {"-1", "0"}});
}

inline DualPairDiagram giacobbe()
{
    const Chart t2("T2", {angle("th1"), angle("th2")});
    const Chart s1a("S1_left", {angle("u")});
    const Chart s1b("S1_right", {angle("v")});
    DualPairDiagram d;
    d.name = "giacobbe";
    d.structure = standard_plane_structure(t2);
    d.left = {SmoothMap("pi1", t2, s1a, exprs({"th1"})), BivectorField::zero("zero", s1a), FiberConnectivity::Yes};
    d.right = {SmoothMap("pi2", t2, s1b, exprs({"2*th1"})), BivectorField::zero("zero", s1b), FiberConnectivity::No};
    return d;
}

inline Environment kronecker_params(double l1 = 1.0, double l2 = std::sqrt(2.0), double l3 = std::sqrt(3.0))
{
    return {{"l1", l1}, {"l2", l2}, {"l3", l3}};
}

inline DualPairDiagram kronecker(Environment params = kronecker_params())
{
    const Chart m("T3xR", {angle("th1"), angle("th2"), angle("th3"), line("x")});
    const Chart r("R", {line("s")});
    DualPairDiagram d;
    d.name = "kronecker";
    d.structure = bivector("B", m,
                           {{"0", "1", "0", "l1"}, {"-1", "0", "0", "l2"}, {"0", "0", "0", "l3"},
                            {"-l1", "-l2", "-l3", "0"}},
                           params);
    d.left = {SmoothMap("pi", m, r, exprs({"x"})), BivectorField::zero("zero", r), FiberConnectivity::Yes};
    d.right = d.left;
    return d;
}

inline DualPairDiagram u2_momentum()
{
    const Chart m = standard_r4();
    const Chart r("R", {line("s")});
    const Chart gl("gl2", {line("z11"), line("z12"), line("z21"), line("z22")});
    DualPairDiagram d;
    d.name = "u2";
    d.structure = standard_r4_structure();
    d.left = {SmoothMap("pi1", m, r, exprs({"x1*y1 + x2*y2"})), BivectorField::zero("zero", r), FiberConnectivity::Yes};
    // {z_ij, z_kl} = d_il z_kj - d_jk z_il
    const BivectorField lie = bivector("gl2_dual", gl,
                                       {{"0", "-z12", "z21", "0"},
                                        {"z12", "0", "z22 - z11", "-z12"},
                                        {"-z21", "-(z22 - z11)", "0", "z21"},
                                        {"0", "z12", "-z21", "0"}});
    d.right = {SmoothMap("pi2", m, gl, exprs({"x1*y1", "x1*y2", "x2*y1", "x2*y2"})), lie, FiberConnectivity::Yes};
    return d;
}

inline Environment t5r_params()
{
    Environment p;
    const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31};
    const char* names[] = {"a11", "a12", "a13", "a21", "a22", "a23", "b1", "b2", "c12", "c13", "c23"};
    for (int i = 0; i < 11; ++i) p[names[i]] = std::sqrt(static_cast<double>(primes[i]));
    return p;
}

inline DualPairDiagram t5r_block()
{
    const Chart m("T5xR", {angle("th1"), angle("th2"), angle("ph1"), angle("ph2"), angle("ph3"), line("x")});
    const Chart p1("T3xR", {angle("u1"), angle("u2"), angle("u3"), line("s")});
    const Chart p2("R", {line("t")});
    DualPairDiagram d;
    d.name = "t5r";
    d.structure = bivector("B", m,
                           {{"0", "0", "a11", "a12", "a13", "b1"},
                            {"0", "0", "a21", "a22", "a23", "b2"},
                            {"-a11", "-a21", "0", "c12", "c13", "0"},
                            {"-a12", "-a22", "-c12", "0", "c23", "0"},
                            {"-a13", "-a23", "-c13", "-c23", "0", "0"},
                            {"-b1", "-b2", "0", "0", "0", "0"}},
                           t5r_params());
    d.left = {SmoothMap("pi1", m, p1, exprs({"ph1", "ph2", "ph3", "x"})), std::nullopt, FiberConnectivity::Yes};
    d.right = {SmoothMap("pi2", m, p2, exprs({"x"})), BivectorField::zero("zero", p2), FiberConnectivity::Yes};
    return d;
}

inline DualPairDiagram r4_split()
{
    const Chart m = standard_r4();
    const Chart p1("P1", {line("q1"), line("p1")});
    const Chart p2("P2", {line("q2"), line("p2")});
    DualPairDiagram d;
    d.name = "split";
    d.structure = standard_r4_structure();
    d.left = {SmoothMap("pi1", m, p1, exprs({"x1", "y1"})), standard_plane_structure(p1), FiberConnectivity::Yes};
    d.right = {SmoothMap("pi2", m, p2, exprs({"x2", "y2"})), standard_plane_structure(p2), FiberConnectivity::Yes};
    return d;
}

/// Uniform point in the chart: periodic in [0, 2pi), others in [lo, hi].
inline Vector random_point(const Chart& c, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector p(static_cast<Index>(c.dim()));
    for (std::size_t i = 0; i < c.dim(); ++i) {
        const auto& k = c.coordinate(i);
        if (k.periodic) p[static_cast<Index>(i)] = 2.0 * std::numbers::pi * u(rng);
        else p[static_cast<Index>(i)] = lo + (hi - lo) * u(rng);
    }
    return p;
}

}  // namespace testing_support
