#pragma once

#include "dualpair/expr.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dualpair {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Coordinate {
    std::string name;
    bool periodic = false;
    /// Closed interval for non-periodic coordinates; empty means all of R.
    std::optional<std::pair<double, double>> bounds;

    bool operator==(const Coordinate&) const = default;
};

/// A single coordinate chart. Periodic coordinates live in R/2piZ.
class Chart {
public:
    Chart() = default;
    Chart(std::string name, std::vector<Coordinate> coordinates);

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return coords_.size(); }
    const std::vector<Coordinate>& coordinates() const noexcept { return coords_; }
    const Coordinate& coordinate(std::size_t i) const { return coords_.at(i); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::optional<std::size_t> index_of(std::string_view name) const;

    bool has_periodic() const;
    bool contains(const Vector& m) const;
    /// Periodic components reduced to [0, 2pi).
    Vector wrap(const Vector& m) const;
    /// Componentwise difference with periodic components reduced to (-pi, pi].
    Vector difference(const Vector& a, const Vector& b) const;

    bool operator==(const Chart& other) const { return name_ == other.name_ && coords_ == other.coords_; }

private:
    std::string name_;
    std::vector<Coordinate> coords_;
    std::vector<std::string> names_;
};

/// `arg = sum_i winding[i]*coord_i + offset`, with offset free of periodic
/// coordinates. winding[i] is zero for non-periodic coordinates.
struct AngleForm {
    std::vector<long> winding;
    Expr offset;
};

/// Decomposes `arg` into an integer combination of the chart's periodic
/// coordinates. Returns nullopt if `arg` is not affine in them; throws
/// InvariantError("non-integer winding") if a coefficient is not an integer.
std::optional<AngleForm> angle_form(const Expr& arg, const Chart& chart, const Environment& params);

/// Throws InvariantError unless every free name is a coordinate or parameter
/// and periodic coordinates only enter through sin/cos of integer combinations.
void validate_torus_scalar(const Expr& e, const Chart& chart, const Environment& params);

class ScalarField {
public:
    ScalarField() = default;
    ScalarField(Chart chart, Expr body, Environment params = {});

    const Chart& chart() const noexcept { return chart_; }
    const Expr& body() const noexcept { return body_; }
    const Environment& parameters() const noexcept { return params_; }
    const Expr& partial(std::size_t i) const { return partials_.at(i); }

    double operator()(const Vector& m) const;
    /// dh(m) in the coordinate basis.
    Vector differential(const Vector& m) const;

private:
    Chart chart_;
    Expr body_;
    Environment params_;
    std::vector<Expr> partials_;
    Program program_;
    std::vector<Program> partial_programs_;
};

class SmoothMap {
public:
    SmoothMap() = default;
    SmoothMap(std::string name, Chart source, Chart target, std::vector<Expr> components, Environment params = {});

    const std::string& name() const noexcept { return name_; }
    const Chart& source() const noexcept { return source_; }
    const Chart& target() const noexcept { return target_; }
    const std::vector<Expr>& components() const noexcept { return components_; }
    const Environment& parameters() const noexcept { return params_; }
    const Expr& jacobian_entry(std::size_t i, std::size_t j) const { return jacobian_.at(i * source_.dim() + j); }

    /// Image point; periodic target components are wrapped.
    Vector operator()(const Vector& m) const;
    /// target-dim x source-dim matrix of exact partial derivatives.
    Matrix jacobian(const Vector& m) const;

    /// Component i as a scalar field on the source chart.
    ScalarField component_field(std::size_t i) const;

private:
    std::string name_;
    Chart source_;
    Chart target_;
    std::vector<Expr> components_;
    Environment params_;
    std::vector<Expr> jacobian_;
    std::vector<Program> programs_;
    std::vector<Program> jacobian_programs_;
};

/// B#(m) as a matrix of expressions. Entry (j,i) must be the syntactic
/// negation of (i,j) and the diagonal zero.
class BivectorField {
public:
    BivectorField() = default;
    BivectorField(std::string name, Chart chart, std::vector<std::vector<Expr>> entries, Environment params = {});

    /// Builds a bivector from its strict upper triangle (row-major), filling
    /// the lower triangle with negations.
    static BivectorField from_upper(std::string name, Chart chart, const std::vector<Expr>& upper, Environment params = {});
    /// All entries zero.
    static BivectorField zero(std::string name, Chart chart);

    const std::string& name() const noexcept { return name_; }
    const Chart& chart() const noexcept { return chart_; }
    const Environment& parameters() const noexcept { return params_; }
    const Expr& entry(std::size_t i, std::size_t j) const { return entries_.at(i).at(j); }
    const std::vector<std::vector<Expr>>& entries() const noexcept { return entries_; }
    bool is_constant() const noexcept { return constant_; }

    Matrix operator()(const Vector& m) const;

private:
    std::string name_;
    Chart chart_;
    std::vector<std::vector<Expr>> entries_;
    Environment params_;
    std::vector<Program> upper_;  // strict upper triangle, row-major
    bool constant_ = true;
};

struct TangentVector {
    Vector base;
    Vector components;
};

struct Covector {
    Vector base;
    Vector components;
};

using PointFunction = std::function<double(const Vector&)>;

/// Evaluator of {f,g}(m) = df(m)^T B#(m) dg(m). Summed over i<j so that
/// {f,g} = -{g,f} holds bit for bit.
PointFunction poisson_bracket(const ScalarField& f, const ScalarField& g, const BivectorField& b);

/// {f,g} as a symbolic scalar field.
ScalarField bracket_field(const ScalarField& f, const ScalarField& g, const BivectorField& b);

/// X_h(m) = B#(m) dh(m).
std::function<TangentVector(const Vector&)> hamiltonian_vf(const ScalarField& h, const BivectorField& b);

/// {{f,g},h} + {{g,h},f} + {{h,f},g} at m.
double jacobiator(const BivectorField& b, const ScalarField& f, const ScalarField& g, const ScalarField& h,
                  const Vector& m);

/// max |jacobiator| over all triples of coordinate functions at m.
double coordinate_jacobiator(const BivectorField& b, const Vector& m);

struct BivectorReport {
    bool antisymmetric = true;
    bool nondegenerate = true;
    double min_abs_det = 0.0;
    Vector worst_point;
};

/// Nondegenerate iff |det B#(m)| > tol * (max |entry|)^n at every sample.
BivectorReport validate_bivector(const BivectorField& b, std::span<const Vector> samples, double tol = 1e-9);

/// Single-matrix form of the nondegeneracy test above.
bool is_nondegenerate(const Matrix& b, double tol = 1e-9);

}  // namespace dualpair
