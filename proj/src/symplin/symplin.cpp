#include "dualpair/symplin.hpp"

#include "dualpair/error.hpp"
#include "dualpair/manifold.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace dualpair {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Square upper-triangular factor with the same singular values as a.
MatrixXd compress_rows(const MatrixXd& a)
{
    if (a.rows() <= a.cols()) return a;
    Eigen::HouseholderQR<MatrixXd> qr(a);
    return qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
}

}  // namespace

Subspace::Subspace(Index ambient) : ambient_(ambient), basis_(ambient, 0) {}

Subspace Subspace::span(const MatrixXd& vectors, double rel_tol)
{
    Subspace s(vectors.rows());
    if (vectors.cols() == 0 || vectors.rows() == 0) return s;
    Eigen::BDCSVD<MatrixXd> svd(vectors, Eigen::ComputeThinU);
    const VectorXd& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    if (smax == 0.0) return s;
    Index rank = 0;
    while (rank < sv.size() && sv[rank] > rel_tol * smax) ++rank;
    s.basis_ = svd.matrixU().leftCols(rank);
    return s;
}

Subspace Subspace::from_orthonormal(MatrixXd basis)
{
    const Index k = basis.cols();
    if (k > 0) {
        const double dev = (basis.transpose() * basis - MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
        if (dev > 1e-6) throw InvariantError("subspace basis is not orthonormal");
        if (dev > 1e-12) {
            // Roundoff from large decompositions; one QR pass restores it.
            Eigen::HouseholderQR<MatrixXd> qr(basis);
            basis = qr.householderQ() * MatrixXd::Identity(basis.rows(), k);
        }
    }
    Subspace s(basis.rows());
    s.basis_ = std::move(basis);
    return s;
}

Subspace Subspace::full(Index ambient)
{
    Subspace s(ambient);
    s.basis_ = MatrixXd::Identity(ambient, ambient);
    return s;
}

VectorXd singular_values(const MatrixXd& a)
{
    if (a.size() == 0) return VectorXd();
    Eigen::BDCSVD<MatrixXd> svd(compress_rows(a));
    return svd.singularValues();
}

Index numerical_rank(const MatrixXd& a, double rel_tol)
{
    const VectorXd sv = singular_values(a);
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    Index r = 0;
    while (r < sv.size() && sv[r] > rel_tol * sv[0]) ++r;
    return r;
}

Kernel kernel(const MatrixXd& a, double rel_tol)
{
    const Index n = a.cols();
    Kernel k{Subspace::full(n), VectorXd(), 0.0};
    if (a.rows() == 0 || n == 0) return k;

    // A row-compressed matrix has the same right singular vectors.
    const MatrixXd r = compress_rows(a);
    Eigen::BDCSVD<MatrixXd> svd(r, Eigen::ComputeFullV);
    k.singular_values = svd.singularValues();
    const double smax = k.singular_values.size() ? k.singular_values[0] : 0.0;
    if (smax == 0.0) return k;
    Index rank = 0;
    while (rank < k.singular_values.size() && k.singular_values[rank] > rel_tol * smax) ++rank;
    k.gap = k.singular_values[rank - 1] / smax;
    k.space = Subspace::from_orthonormal(svd.matrixV().rightCols(n - rank));
    return k;
}

Subspace annihilator(const Subspace& v)
{
    if (v.dim() == 0) return Subspace::full(v.ambient());
    return nullspace(v.basis().transpose());
}

Subspace symplectic_orthogonal(const Subspace& v, const MatrixXd& b)
{
    if (b.rows() != v.ambient() || b.cols() != v.ambient())
        throw InvariantError("symplectic_orthogonal: dimension mismatch");
    if (!is_nondegenerate(b)) throw InvariantError("symplectic_orthogonal: degenerate bivector");
    const MatrixXd image = b * annihilator(v).basis();
    Subspace out(v.ambient());
    if (image.cols() == 0) return out;
    // b is invertible, so the image has full column rank.
    Eigen::HouseholderQR<MatrixXd> qr(image);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(image.rows(), image.cols());
    return Subspace::from_orthonormal(std::move(q));
}

double max_principal_angle(const Subspace& a, const Subspace& b)
{
    if (a.ambient() != b.ambient()) throw InvariantError("principal angles: ambient dimension mismatch");
    const Subspace& small = a.dim() <= b.dim() ? a : b;
    const Subspace& big = a.dim() <= b.dim() ? b : a;
    if (small.dim() == 0) return 0.0;
    const MatrixXd m = big.basis().transpose() * small.basis();
    const MatrixXd residual = small.basis() - big.basis() * m;
    const VectorXd cosines = singular_values(m);
    const VectorXd sines = singular_values(residual);
    const double c = cosines.size() >= small.dim() ? cosines[small.dim() - 1] : 0.0;
    const double s = sines.size() ? sines[0] : 0.0;
    return std::atan2(s, c);
}

SubspaceComparison subspace_equal(const Subspace& v, const Subspace& w, double tol)
{
    if (v.ambient() != w.ambient()) throw InvariantError("subspace_equal: ambient dimension mismatch");
    SubspaceComparison c;
    c.dim_v = v.dim();
    c.dim_w = w.dim();
    c.max_angle = max_principal_angle(v, w);
    c.equal = c.dim_v == c.dim_w && c.max_angle <= tol;
    return c;
}

Inclusion subspace_contains(const Subspace& outer, const Subspace& inner, double tol)
{
    if (outer.ambient() != inner.ambient()) throw InvariantError("subspace_contains: ambient dimension mismatch");
    Inclusion inc;
    if (inner.dim() == 0) {
        inc.contained = true;
        return inc;
    }
    const MatrixXd residual = inner.basis() - outer.basis() * (outer.basis().transpose() * inner.basis());
    const VectorXd sines = singular_values(residual);
    const double s = sines.size() ? std::min(1.0, sines[0]) : 0.0;
    inc.max_angle = std::asin(s);
    inc.contained = inc.max_angle <= tol;
    return inc;
}

Subspace complement_within(const Subspace& outer, const Subspace& inner, double tol)
{
    if (outer.ambient() != inner.ambient()) throw InvariantError("complement_within: ambient dimension mismatch");
    Subspace out(outer.ambient());
    if (outer.dim() == 0) return out;
    const MatrixXd residual = outer.basis() - inner.basis() * (inner.basis().transpose() * outer.basis());
    Eigen::BDCSVD<MatrixXd> svd(residual, Eigen::ComputeThinU);
    const VectorXd& sv = svd.singularValues();
    Index rank = 0;
    while (rank < sv.size() && sv[rank] > tol) ++rank;
    return Subspace::from_orthonormal(svd.matrixU().leftCols(rank));
}

Subspace sum(const Subspace& a, const Subspace& b, double rel_tol)
{
    if (a.ambient() != b.ambient()) throw InvariantError("sum: ambient dimension mismatch");
    MatrixXd all(a.ambient(), a.dim() + b.dim());
    all << a.basis(), b.basis();
    return Subspace::span(all, rel_tol);
}

}  // namespace dualpair
