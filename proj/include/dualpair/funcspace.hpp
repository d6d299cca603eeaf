#pragma once

// Truncated Fourier x polynomial function spaces and centralizer computations.
//
// A basis element is a product over coordinates of one factor each:
//   periodic coordinate: 1, cos(k th), sin(k th)   for 1 <= k <= K
//   other coordinates:   x^d                        for 0 <= d <= D
// A factor is encoded as one int per coordinate (a Mode): for periodic
// coordinates k > 0 means cos(k th), k < 0 means sin(|k| th), 0 means 1; for
// the others it is the degree.

#include "dualpair/diagnostics.hpp"
#include "dualpair/manifold.hpp"
#include "dualpair/symplin.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dualpair {

using Mode = std::vector<int>;

struct BasisSpec {
    std::map<std::string, int, std::less<>> frequency;  ///< max frequency per periodic coordinate
    std::map<std::string, int, std::less<>> degree;     ///< max degree per other coordinate
    std::optional<int> total_degree;                    ///< cap on the summed polynomial degree

    /// Same K for every periodic and same D for every other coordinate.
    static BasisSpec uniform(const Chart& chart, int frequency, int degree, std::optional<int> total_degree = {});

    bool operator==(const BasisSpec&) const = default;
};

/// Sparse real trigonometric-polynomial x polynomial function.
class TrigPoly {
public:
    explicit TrigPoly(std::vector<bool> periodic = {});

    static TrigPoly constant(std::vector<bool> periodic, double c);
    static TrigPoly monomial(std::vector<bool> periodic, Mode mode, double c = 1.0);

    const std::vector<bool>& periodic() const noexcept { return periodic_; }
    const std::map<Mode, double>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    /// Value of the constant mode.
    double constant_term() const;

    void add(const Mode& m, double c);
    TrigPoly& operator+=(const TrigPoly& o);
    TrigPoly& operator*=(double s);
    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
    friend TrigPoly operator-(TrigPoly a, TrigPoly b) { return a += (b *= -1.0); }
    friend TrigPoly operator*(TrigPoly a, double s) { return a *= s; }
    friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b);

    TrigPoly derivative(std::size_t coordinate) const;
    double operator()(const Vector& point) const;

private:
    std::vector<bool> periodic_;
    std::map<Mode, double> terms_;
};

/// Exact expansion of `e`. Throws InvariantError if `e` is not a polynomial in
/// the non-periodic coordinates times a trigonometric polynomial in the
/// periodic ones (parameters and constant subterms are evaluated).
TrigPoly to_trig_poly(const Expr& e, const Chart& chart, const Environment& params);

class FunctionSpace {
public:
    FunctionSpace() = default;
    /// Throws InvariantError if the spec does not cover the chart, names an
    /// unknown coordinate, or holds a negative bound.
    FunctionSpace(Chart chart, BasisSpec spec, std::size_t max_dim = 200000);

    const Chart& chart() const noexcept { return chart_; }
    const BasisSpec& spec() const noexcept { return spec_; }
    std::size_t dim() const noexcept { return modes_.size(); }
    const Mode& mode(std::size_t i) const { return modes_.at(i); }
    std::optional<std::size_t> index_of(const Mode& m) const;
    std::vector<bool> periodic_flags() const;

    /// e.g. "cos(2*th1)*x^2"; the constant is "1".
    std::string basis_name(std::size_t i) const;
    double basis_value(std::size_t i, const Vector& point) const;

    /// Coefficient vector of `f`; nullopt if a mode falls outside the space.
    std::optional<Vector> coefficients(const TrigPoly& f) const;
    double evaluate(const Vector& coefficients, const Vector& point) const;
    /// Readable sum with coefficients rounded to multiples of `round`.
    std::string pretty(const Vector& coefficients, double round = 1e-10) const;

private:
    Chart chart_;
    BasisSpec spec_;
    std::vector<Mode> modes_;
    std::map<Mode, std::size_t> index_;
};

std::size_t basis_dimension(const Chart& chart, const BasisSpec& spec);

/// Graded order used for basis layout and witness selection.
bool graded_less(const Mode& a, const Mode& b, const std::vector<bool>& periodic);

struct CoefficientSubspace {
    std::shared_ptr<const FunctionSpace> space;
    Subspace subspace;

    std::size_t dim() const { return static_cast<std::size_t>(subspace.dim()); }
};

struct Derivation {
    Matrix matrix;  ///< target.dim() x source.dim()
    std::shared_ptr<const FunctionSpace> target;
};

/// Matrix of g -> {g, h} = X_h[g] from `source` into the smallest space of
/// the same shape that holds every image exactly.
Derivation derivation_matrix(const ScalarField& h, const BivectorField& b, const FunctionSpace& source,
                             std::size_t max_target_dim = 200000);

struct ResonanceMargin {
    std::string generator;
    /// min over nonzero integer k with |k_i| <= K of |k . v|, where v is the
    /// constant periodic part of X_h and k is supported where v_i != 0;
    /// absent if X_h is not constant there.
    std::optional<double> min_abs;
};

struct CentralizerInfo {
    double gap = 0.0;  ///< smallest retained singular value / largest
    std::size_t rows = 0;
    std::size_t target_dim = 0;
    std::vector<ResonanceMargin> resonance;
};

/// Common kernel of the derivations of all generators.
CoefficientSubspace centralizer(std::shared_ptr<const FunctionSpace> space, const std::vector<ScalarField>& generators,
                                const BivectorField& b, double kernel_tol = 1e-9, CentralizerInfo* info = nullptr,
                                std::size_t max_target_dim = 200000);

struct PullbackResult {
    CoefficientSubspace span;
    std::size_t target_basis = 0;
    /// Target basis elements whose pullback leaves the truncation.
    std::vector<std::string> escaped;
};

/// span{b o pi : b in target basis}. Elements escaping `space` are skipped
/// and listed, or rejected with InvariantError when `strict`.
PullbackResult pullback_span(const SmoothMap& pi, const BasisSpec& target_spec,
                             std::shared_ptr<const FunctionSpace> space, bool strict = false);

/// Generators of pi^* C(P): z o pi for non-periodic target coordinates,
/// cos and sin of the component for periodic ones.
std::vector<ScalarField> pullback_generators(const SmoothMap& pi);

/// Witnesses for the failure of `inner` in `outer`: basis of the part of
/// `inner` orthogonal to `outer`, reduced to echelon form in basis order and
/// normalized to leading coefficient 1.
std::vector<Vector> witnesses(const Subspace& inner, const Subspace& outer, std::size_t max_count, double tol = 1e-7);

struct HoweSpec {
    BasisSpec space;
    BasisSpec left_target;
    BasisSpec right_target;
    double kernel_tol = 1e-9;
    double angle_tol = 1e-7;
    std::size_t max_witnesses = 3;
    std::size_t max_target_dim = 200000;
};

struct HoweInclusion {
    bool holds = false;
    double max_angle = 0.0;
    std::vector<std::string> witnesses;
};

struct HoweReport {
    std::size_t space_dim = 0;
    std::size_t dim_f1 = 0;
    std::size_t dim_f2 = 0;
    std::size_t dim_f1c = 0;
    std::size_t dim_f2c = 0;
    HoweInclusion f2_in_f1c;
    HoweInclusion f1c_in_f2;
    HoweInclusion f1_in_f2c;
    HoweInclusion f2c_in_f1;
    bool left_equal = false;   ///< F1^c == F2
    bool right_equal = false;  ///< F2^c == F1
    bool consistent = false;
    CentralizerInfo left_info;
    CentralizerInfo right_info;
    std::vector<std::string> escaped_left;
    std::vector<std::string> escaped_right;
};

HoweReport howe_truncated_check(const DualPairDiagram& d, const HoweSpec& spec);

/// The diagram on a coordinate window: every coordinate becomes a bounded
/// non-periodic one, so the truncated check runs on polynomial germs.
DualPairDiagram localize(const DualPairDiagram& d, const std::map<std::string, std::pair<double, double>, std::less<>>& window);

}  // namespace dualpair
