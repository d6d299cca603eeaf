#pragma once

// Finite-dimensional subspace algebra: kernels, annihilators, symplectic
// orthogonal complements and principal-angle comparison.

#include <Eigen/Dense>

namespace dualpair {

using Index = Eigen::Index;

/// A linear subspace of R^n held as an orthonormal n x k basis. k may be 0.
class Subspace {
public:
    explicit Subspace(Index ambient = 0);

    /// Orthonormal basis of the column span; singular values at or below
    /// rel_tol * sigma_max are dropped.
    static Subspace span(const Eigen::MatrixXd& vectors, double rel_tol = 1e-9);
    /// Columns must already be orthonormal (checked to 1e-12).
    static Subspace from_orthonormal(Eigen::MatrixXd basis);
    static Subspace full(Index ambient);

    Index ambient() const noexcept { return ambient_; }
    Index dim() const noexcept { return basis_.cols(); }
    const Eigen::MatrixXd& basis() const noexcept { return basis_; }
    Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }

private:
    Index ambient_;
    Eigen::MatrixXd basis_;
};

/// Singular values in decreasing order. Tall inputs are reduced by a
/// Householder QR first, which leaves the spectrum unchanged.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);

/// Number of singular values above rel_tol * sigma_max.
Index numerical_rank(const Eigen::MatrixXd& a, double rel_tol = 1e-9);

struct Kernel {
    Subspace space;
    Eigen::VectorXd singular_values;
    /// Smallest retained singular value over sigma_max; 1 when the rank is
    /// full, 0 when the matrix vanishes.
    double gap = 0.0;
};

/// Span of right singular vectors whose singular value is at most
/// rel_tol * sigma_max (everything when sigma_max is 0).
Kernel kernel(const Eigen::MatrixXd& a, double rel_tol = 1e-9);

inline Subspace nullspace(const Eigen::MatrixXd& a, double rel_tol = 1e-9)
{
    return kernel(a, rel_tol).space;
}

/// Covectors vanishing on v, identified with R^n through the coordinate basis.
Subspace annihilator(const Subspace& v);

/// v^omega = B#(v°). Throws InvariantError if b is degenerate.
Subspace symplectic_orthogonal(const Subspace& v, const Eigen::MatrixXd& b);

/// Largest principal angle between a and b, taken over min(dim a, dim b)
/// angles. 0 if either is the zero subspace.
double max_principal_angle(const Subspace& a, const Subspace& b);

struct SubspaceComparison {
    bool equal = false;
    double max_angle = 0.0;
    Index dim_v = 0;
    Index dim_w = 0;
};

SubspaceComparison subspace_equal(const Subspace& v, const Subspace& w, double tol = 1e-7);

struct Inclusion {
    bool contained = false;
    /// Largest angle between a vector of `inner` and `outer`.
    double max_angle = 0.0;
};

Inclusion subspace_contains(const Subspace& outer, const Subspace& inner, double tol = 1e-7);

/// Orthogonal complement of `inner` inside `outer`; directions whose residual
/// after projecting out `inner` is at most `tol` are discarded.
Subspace complement_within(const Subspace& outer, const Subspace& inner, double tol = 1e-7);

Subspace sum(const Subspace& a, const Subspace& b, double rel_tol = 1e-9);

}  // namespace dualpair
