#include "../properties.hpp"
#include "../support.hpp"

#include "dualpair/error.hpp"
#include "dualpair/symplin.hpp"

#include <doctest.h>

#include <cmath>

using namespace dualpair;
using namespace testing_support;

namespace {

Matrix cols(std::initializer_list<std::initializer_list<double>> columns)
{
    const Index k = static_cast<Index>(columns.size());
    const Index n = static_cast<Index>(columns.begin()->size());
    Matrix m(n, k);
    Index j = 0;
    for (const auto& c : columns) {
        Index i = 0;
        for (double v : c) m(i++, j) = v;
        ++j;
    }
    return m;
}

Matrix plane() { return cols({{0, -1}, {1, 0}}); }

}  // namespace

TEST_CASE("nullspace examples")
{
    Matrix j(1, 2);
    j << 2, 0;
    const Subspace k = nullspace(j);
    REQUIRE(k.dim() == 1);
    CHECK(subspace_equal(k, Subspace::span(cols({{0, 1}}))).equal);
    CHECK(nullspace(Matrix::Zero(4, 4)).dim() == 4);
    CHECK(nullspace(Matrix::Identity(3, 3)).dim() == 0);
    CHECK(nullspace(Matrix::Identity(3, 3)).ambient() == 3);
    const Kernel full = kernel(Matrix::Identity(2, 2));
    CHECK(full.gap == 1.0);
    CHECK(kernel(Matrix::Zero(2, 2)).gap == 0.0);
}

TEST_CASE("annihilator examples")
{
    const Subspace a = annihilator(Subspace::span(cols({{0, 1}})));
    CHECK(subspace_equal(a, Subspace::span(cols({{1, 0}}))).equal);
    CHECK(annihilator(Subspace(3)).dim() == 3);
    CHECK(annihilator(Subspace::full(3)).dim() == 0);
}

TEST_CASE("symplectic orthogonal examples")
{
    const Subspace line = Subspace::span(cols({{0, 1}}));
    CHECK(subspace_equal(symplectic_orthogonal(line, plane()), line).equal);

    const DualPairDiagram k = kronecker();
    const Matrix b = k.structure(Vector::Zero(4));
    const Subspace angles = Subspace::span(cols({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}}));
    const Subspace w = symplectic_orthogonal(angles, b);
    REQUIRE(w.dim() == 1);
    CHECK(subspace_equal(w, Subspace::span(cols({{1, std::sqrt(2.0), std::sqrt(3.0), 0}}))).equal);
    const SubspaceComparison c = subspace_equal(angles, w);
    CHECK(!c.equal);
    CHECK(c.dim_v == 3);
    CHECK(c.dim_w == 1);

    const Matrix omega = standard_r4_structure()(Vector::Zero(4));
    const Subspace dx1 = Subspace::span(cols({{1, 0, 0, 0}}));
    CHECK(subspace_equal(symplectic_orthogonal(dx1, omega),
                         Subspace::span(cols({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}})))
              .equal);
    CHECK(symplectic_orthogonal(Subspace::full(4), omega).dim() == 0);
    CHECK(symplectic_orthogonal(Subspace(4), omega).dim() == 4);
    CHECK_THROWS_AS(symplectic_orthogonal(dx1, Matrix::Zero(4, 4)), InvariantError);
}

TEST_CASE("subspace comparison")
{
    const Subspace v = Subspace::span(cols({{1, 2, 3}, {0, 1, -1}}));
    const SubspaceComparison self = subspace_equal(v, v);
    CHECK(self.equal);
    CHECK(self.max_angle <= 1e-15);
    CHECK(subspace_equal(Subspace::span(cols({{0, 1}})), Subspace::span(cols({{0, -2}}))).equal);
    CHECK(!subspace_equal(Subspace::span(cols({{1, 0}})), Subspace::span(cols({{1, 1e-3}}))).equal);
    CHECK(subspace_equal(Subspace(3), Subspace(3)).equal);
    CHECK_THROWS_AS(subspace_equal(Subspace(2), Subspace(3)), InvariantError);

    const Inclusion in = subspace_contains(v, Subspace::span(cols({{1, 3, 2}})));
    CHECK(in.contained);
    CHECK(!subspace_contains(v, Subspace::span(cols({{1, 0, 0}}))).contained);
    CHECK(complement_within(v, Subspace::span(cols({{1, 3, 2}}))).dim() == 1);
    CHECK(sum(v, Subspace::span(cols({{1, 0, 0}}))).dim() == 3);
}

TEST_CASE("rank and spectrum")
{
    Matrix tall(6, 2);
    tall.setZero();
    tall(0, 0) = 3.0;
    tall(5, 1) = 4.0;
    const Eigen::VectorXd s = singular_values(tall);
    CHECK(s[0] == doctest::Approx(4.0));
    CHECK(s[1] == doctest::Approx(3.0));
    CHECK(numerical_rank(tall) == 2);
    Matrix near = Matrix::Identity(3, 3);
    near(2, 2) = 1e-12;
    CHECK(numerical_rank(near) == 2);
    CHECK(numerical_rank(near, 1e-13) == 3);
    CHECK(numerical_rank(Matrix::Zero(2, 3)) == 0);
}

TEST_CASE("random symplectic property suite")
{
    const SymplinSweep s = symplin_sweep(500, 7);
    CHECK(s.cases == 500);
    CHECK(s.dimension_failures == 0);
    CHECK(s.double_complement_failures == 0);
    CHECK(s.two_path_failures == 0);
    CHECK(s.annihilator_failures == 0);
    CHECK(s.worst_angle <= 1e-7);
}
