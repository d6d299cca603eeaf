#include "dualpair/manifold.hpp"

#include "dualpair/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace dualpair {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool reserved_name(std::string_view n)
{
    return n == "pi" || n == "sin" || n == "cos" || n == "exp" || n == "sqrt" || n == "log";
}

bool valid_identifier(std::string_view n)
{
    if (n.empty() || !(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_')) return false;
    for (char c : n)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Chart

Chart::Chart(std::string name, std::vector<Coordinate> coordinates) : name_(std::move(name)), coords_(std::move(coordinates))
{
    if (coords_.empty()) throw InvariantError("chart '" + name_ + "' has no coordinates");
    std::set<std::string> seen;
    for (const auto& c : coords_) {
        if (!valid_identifier(c.name) || reserved_name(c.name))
            throw InvariantError("chart '" + name_ + "': invalid coordinate name '" + c.name + "'");
        if (!seen.insert(c.name).second)
            throw InvariantError("chart '" + name_ + "': duplicate coordinate '" + c.name + "'");
        if (c.periodic && c.bounds)
            throw InvariantError("chart '" + name_ + "': periodic coordinate '" + c.name + "' cannot carry bounds");
        if (c.bounds && !(c.bounds->first < c.bounds->second))
            throw InvariantError("chart '" + name_ + "': empty interval for '" + c.name + "'");
        names_.push_back(c.name);
    }
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const
{
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

bool Chart::has_periodic() const
{
    for (const auto& c : coords_)
        if (c.periodic) return true;
    return false;
}

bool Chart::contains(const Vector& m) const
{
    if (static_cast<std::size_t>(m.size()) != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!std::isfinite(m[i])) return false;
        const auto& b = coords_[i].bounds;
        if (b && (m[i] < b->first || m[i] > b->second)) return false;
    }
    return true;
}

Vector Chart::wrap(const Vector& m) const
{
    Vector out = m;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!coords_[i].periodic) continue;
        double v = std::fmod(out[i], kTwoPi);
        if (v < 0.0) v += kTwoPi;
        if (v >= kTwoPi) v = 0.0;
        out[i] = v;
    }
    return out;
}

Vector Chart::difference(const Vector& a, const Vector& b) const
{
    Vector d = a - b;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!coords_[i].periodic) continue;
        d[i] = std::remainder(d[i], kTwoPi);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Torus well-definedness

namespace {

bool mentions_periodic(const Expr& e, const Chart& chart)
{
    for (const auto& n : free_names(e)) {
        auto i = chart.index_of(n);
        if (i && chart.coordinate(*i).periodic) return true;
    }
    return false;
}

bool mentions_coordinate(const Expr& e, const Chart& chart)
{
    for (const auto& n : free_names(e))
        if (chart.index_of(n)) return true;
    return false;
}

struct Affine {
    std::vector<double> coeff;  // per chart coordinate, periodic only
    Expr rest;
};

std::optional<double> constant_value(const Expr& e, const Chart& chart, const Environment& params)
{
    if (mentions_coordinate(e, chart)) return std::nullopt;
    try {
        return eval(e, params);
    } catch (const EvalError&) {
        return std::nullopt;
    }
}

std::optional<Affine> decompose(const Expr& e, const Chart& chart, const Environment& params)
{
    const std::size_t n = chart.dim();
    if (!mentions_periodic(e, chart)) return Affine{std::vector<double>(n, 0.0), e};
    switch (e.op()) {
        case Op::Symbol: {
            Affine a{std::vector<double>(n, 0.0), Expr()};
            a.coeff[*chart.index_of(e.name())] = 1.0;
            return a;
        }
        case Op::Add:
        case Op::Sub: {
            auto l = decompose(e.lhs(), chart, params);
            auto r = decompose(e.rhs(), chart, params);
            if (!l || !r) return std::nullopt;
            const double s = e.op() == Op::Add ? 1.0 : -1.0;
            for (std::size_t i = 0; i < n; ++i) l->coeff[i] += s * r->coeff[i];
            l->rest = e.op() == Op::Add ? l->rest + r->rest : l->rest - r->rest;
            return l;
        }
        case Op::Neg: {
            auto a = decompose(e.operand(), chart, params);
            if (!a) return std::nullopt;
            for (auto& c : a->coeff) c = -c;
            a->rest = -a->rest;
            return a;
        }
        case Op::Mul: {
            auto lc = constant_value(e.lhs(), chart, params);
            auto rc = constant_value(e.rhs(), chart, params);
            if (!lc && !rc) return std::nullopt;
            const double k = lc ? *lc : *rc;
            auto a = decompose(lc ? e.rhs() : e.lhs(), chart, params);
            if (!a) return std::nullopt;
            for (auto& c : a->coeff) c *= k;
            a->rest = (lc ? e.lhs() : e.rhs()) * a->rest;
            return a;
        }
        case Op::Div: {
            auto rc = constant_value(e.rhs(), chart, params);
            if (!rc || *rc == 0.0) return std::nullopt;
            auto a = decompose(e.lhs(), chart, params);
            if (!a) return std::nullopt;
            for (auto& c : a->coeff) c /= *rc;
            a->rest = a->rest / e.rhs();
            return a;
        }
        default: return std::nullopt;
    }
}

}  // namespace

std::optional<AngleForm> angle_form(const Expr& arg, const Chart& chart, const Environment& params)
{
    auto a = decompose(arg, chart, params);
    if (!a) return std::nullopt;
    AngleForm out;
    out.winding.assign(chart.dim(), 0);
    for (std::size_t i = 0; i < chart.dim(); ++i) {
        const double c = a->coeff[i];
        const double r = std::nearbyint(c);
        if (std::abs(c - r) > 1e-9)
            throw InvariantError("non-integer winding " + format_number(c) + " of '" + chart.names()[i] + "' in '" +
                                 to_string(arg) + "'");
        out.winding[i] = static_cast<long>(r);
    }
    out.offset = a->rest;
    return out;
}

namespace {

void check_names(const Expr& e, const Chart& chart, const Environment& params)
{
    for (const auto& n : free_names(e)) {
        if (chart.index_of(n)) continue;
        if (params.count(n)) continue;
        throw InvariantError("unknown name '" + n + "' in '" + to_string(e) + "' on chart '" + chart.name() + "'");
    }
}

void check_periodic_usage(const Expr& e, const Chart& chart, const Environment& params)
{
    switch (e.op()) {
        case Op::Number:
        case Op::Pi: return;
        case Op::Symbol: {
            auto i = chart.index_of(e.name());
            if (i && chart.coordinate(*i).periodic)
                throw InvariantError("periodic coordinate '" + e.name() +
                                     "' may only appear inside sin or cos of an integer combination");
            return;
        }
        case Op::Call:
            if ((e.func() == Func::Sin || e.func() == Func::Cos) && mentions_periodic(e.operand(), chart)) {
                if (!angle_form(e.operand(), chart, params))
                    throw InvariantError("argument '" + to_string(e.operand()) +
                                         "' is not an integer combination of periodic coordinates");
                return;
            }
            check_periodic_usage(e.operand(), chart, params);
            return;
        case Op::Neg: check_periodic_usage(e.operand(), chart, params); return;
        default:
            check_periodic_usage(e.lhs(), chart, params);
            check_periodic_usage(e.rhs(), chart, params);
    }
}

}  // namespace

void validate_torus_scalar(const Expr& e, const Chart& chart, const Environment& params)
{
    check_names(e, chart, params);
    check_periodic_usage(e, chart, params);
}

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(Chart chart, Expr body, Environment params)
    : chart_(std::move(chart)), body_(std::move(body)), params_(std::move(params))
{
    validate_torus_scalar(body_, chart_, params_);
    program_ = Program(body_, chart_.names(), params_);
    for (const auto& n : chart_.names()) {
        partials_.push_back(diff(body_, n));
        partial_programs_.emplace_back(partials_.back(), chart_.names(), params_);
    }
}

double ScalarField::operator()(const Vector& m) const
{
    return program_(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
}

Vector ScalarField::differential(const Vector& m) const
{
    Vector d(chart_.dim());
    const std::span<const double> v(m.data(), static_cast<std::size_t>(m.size()));
    for (std::size_t i = 0; i < chart_.dim(); ++i) d[static_cast<Eigen::Index>(i)] = partial_programs_[i](v);
    return d;
}

// ---------------------------------------------------------------------------
// SmoothMap

SmoothMap::SmoothMap(std::string name, Chart source, Chart target, std::vector<Expr> components, Environment params)
    : name_(std::move(name)),
      source_(std::move(source)),
      target_(std::move(target)),
      components_(std::move(components)),
      params_(std::move(params))
{
    if (components_.size() != target_.dim())
        throw InvariantError("map '" + name_ + "' has " + std::to_string(components_.size()) +
                             " components but target '" + target_.name() + "' has dimension " +
                             std::to_string(target_.dim()));
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const Expr& c = components_[i];
        check_names(c, source_, params_);
        if (target_.coordinate(i).periodic) {
            auto form = angle_form(c, source_, params_);
            if (!form || mentions_coordinate(form->offset, source_))
                throw InvariantError("map '" + name_ + "': component " + std::to_string(i) + " '" + to_string(c) +
                                     "' onto periodic coordinate must be an integer combination of periodic "
                                     "coordinates plus a constant");
            for (std::size_t j = 0; j < source_.dim(); ++j)
                if (form->winding[j] != 0 && !source_.coordinate(j).periodic)
                    throw InvariantError("map '" + name_ + "': non-periodic coordinate in angle component");
        } else {
            check_periodic_usage(c, source_, params_);
        }
    }
    for (const auto& c : components_) {
        programs_.emplace_back(c, source_.names(), params_);
        for (const auto& n : source_.names()) {
            jacobian_.push_back(diff(c, n));
            jacobian_programs_.emplace_back(jacobian_.back(), source_.names(), params_);
        }
    }
}

Vector SmoothMap::operator()(const Vector& m) const
{
    const std::span<const double> v(m.data(), static_cast<std::size_t>(m.size()));
    Vector out(target_.dim());
    for (std::size_t i = 0; i < programs_.size(); ++i) out[static_cast<Eigen::Index>(i)] = programs_[i](v);
    return target_.wrap(out);
}

Matrix SmoothMap::jacobian(const Vector& m) const
{
    const std::span<const double> v(m.data(), static_cast<std::size_t>(m.size()));
    const std::size_t rows = target_.dim();
    const std::size_t cols = source_.dim();
    Matrix j(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = jacobian_programs_[r * cols + c](v);
    return j;
}

ScalarField SmoothMap::component_field(std::size_t i) const
{
    if (target_.coordinate(i).periodic)
        throw InvariantError("component " + std::to_string(i) + " of '" + name_ +
                             "' is an angle and not a function on the source");
    return ScalarField(source_, components_.at(i), params_);
}

// ---------------------------------------------------------------------------
// BivectorField

namespace {

std::optional<double> numeric_entry(const Expr& e, const Environment& params)
{
    if (!free_names(e).empty()) {
        for (const auto& n : free_names(e))
            if (!params.count(n)) return std::nullopt;
    }
    try {
        return eval(e, params);
    } catch (const EvalError&) {
        return std::nullopt;
    }
}

bool negation_of(const Expr& a, const Expr& b, const Environment& params)
{
    if (a.op() == Op::Neg && same(a.operand(), b)) return true;
    if (b.op() == Op::Neg && same(b.operand(), a)) return true;
    auto va = numeric_entry(a, params);
    auto vb = numeric_entry(b, params);
    return va && vb && *va == -*vb;
}

}  // namespace

BivectorField::BivectorField(std::string name, Chart chart, std::vector<std::vector<Expr>> entries, Environment params)
    : name_(std::move(name)), chart_(std::move(chart)), entries_(std::move(entries)), params_(std::move(params))
{
    const std::size_t n = chart_.dim();
    if (entries_.size() != n) throw InvariantError("bivector '" + name_ + "' must have " + std::to_string(n) + " rows");
    for (const auto& row : entries_)
        if (row.size() != n) throw InvariantError("bivector '" + name_ + "' must be " + std::to_string(n) + "x" + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) validate_torus_scalar(entries_[i][j], chart_, params_);
        auto d = numeric_entry(entries_[i][i], params_);
        if (!d || *d != 0.0)
            throw InvariantError("antisymmetry violated at (" + std::to_string(i) + "," + std::to_string(i) + ")");
        for (std::size_t j = i + 1; j < n; ++j)
            if (!negation_of(entries_[i][j], entries_[j][i], params_))
                throw InvariantError("antisymmetry violated at (" + std::to_string(j) + "," + std::to_string(i) + ")");
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            upper_.emplace_back(entries_[i][j], chart_.names(), params_);
            constant_ = constant_ && upper_.back().is_constant();
        }
}

BivectorField BivectorField::from_upper(std::string name, Chart chart, const std::vector<Expr>& upper, Environment params)
{
    const std::size_t n = chart.dim();
    if (upper.size() != n * (n - 1) / 2) throw InvariantError("bivector '" + name + "': wrong number of upper entries");
    std::vector<std::vector<Expr>> e(n, std::vector<Expr>(n));
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            e[i][j] = upper[k++];
            e[j][i] = -e[i][j];
        }
    return BivectorField(std::move(name), std::move(chart), std::move(e), std::move(params));
}

BivectorField BivectorField::zero(std::string name, Chart chart)
{
    const std::size_t n = chart.dim();
    return BivectorField(std::move(name), std::move(chart), std::vector<std::vector<Expr>>(n, std::vector<Expr>(n)));
}

Matrix BivectorField::operator()(const Vector& m) const
{
    const std::size_t n = chart_.dim();
    const std::span<const double> v(m.data(), static_cast<std::size_t>(m.size()));
    Matrix b = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double x = upper_[k++](v);
            b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x;
            b(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = -x;
        }
    return b;
}

// ---------------------------------------------------------------------------
// Brackets

namespace {

void require_same_chart(const Chart& a, const Chart& b, const char* what)
{
    if (!(a == b)) throw InvariantError(std::string(what) + ": chart mismatch ('" + a.name() + "' vs '" + b.name() + "')");
}

double contract(const Vector& df, const Matrix& b, const Vector& dg)
{
    double s = 0.0;
    const Eigen::Index n = b.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) s += b(i, j) * (df[i] * dg[j] - df[j] * dg[i]);
    return s;
}

}  // namespace

PointFunction poisson_bracket(const ScalarField& f, const ScalarField& g, const BivectorField& b)
{
    require_same_chart(f.chart(), b.chart(), "poisson_bracket");
    require_same_chart(g.chart(), b.chart(), "poisson_bracket");
    return [f, g, b](const Vector& m) { return contract(f.differential(m), b(m), g.differential(m)); };
}

ScalarField bracket_field(const ScalarField& f, const ScalarField& g, const BivectorField& b)
{
    require_same_chart(f.chart(), b.chart(), "bracket_field");
    require_same_chart(g.chart(), b.chart(), "bracket_field");
    const std::size_t n = b.chart().dim();
    Expr sum;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const Expr& bij = b.entry(i, j);
            if (bij.is_number(0.0)) continue;
            sum = sum + bij * (f.partial(i) * g.partial(j) - f.partial(j) * g.partial(i));
        }
    Environment params = b.parameters();
    params.insert(f.parameters().begin(), f.parameters().end());
    params.insert(g.parameters().begin(), g.parameters().end());
    return ScalarField(b.chart(), sum, std::move(params));
}

std::function<TangentVector(const Vector&)> hamiltonian_vf(const ScalarField& h, const BivectorField& b)
{
    require_same_chart(h.chart(), b.chart(), "hamiltonian_vf");
    return [h, b](const Vector& m) { return TangentVector{m, b(m) * h.differential(m)}; };
}

double jacobiator(const BivectorField& b, const ScalarField& f, const ScalarField& g, const ScalarField& h,
                  const Vector& m)
{
    const ScalarField fg = bracket_field(f, g, b);
    const ScalarField gh = bracket_field(g, h, b);
    const ScalarField hf = bracket_field(h, f, b);
    return poisson_bracket(fg, h, b)(m) + poisson_bracket(gh, f, b)(m) + poisson_bracket(hf, g, b)(m);
}

double coordinate_jacobiator(const BivectorField& b, const Vector& m)
{
    const Chart& chart = b.chart();
    std::vector<ScalarField> coords;
    for (std::size_t i = 0; i < chart.dim(); ++i) {
        if (chart.coordinate(i).periodic) continue;
        coords.emplace_back(chart, Expr::symbol(chart.names()[i]), b.parameters());
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i)
        for (std::size_t j = i + 1; j < coords.size(); ++j)
            for (std::size_t k = j + 1; k < coords.size(); ++k)
                worst = std::max(worst, std::abs(jacobiator(b, coords[i], coords[j], coords[k], m)));
    return worst;
}

bool is_nondegenerate(const Matrix& b, double tol)
{
    const double scale = b.cwiseAbs().maxCoeff();
    if (scale == 0.0) return false;
    const double det = b.fullPivLu().determinant();
    return std::abs(det) > tol * std::pow(scale, static_cast<double>(b.rows()));
}

BivectorReport validate_bivector(const BivectorField& b, std::span<const Vector> samples, double tol)
{
    BivectorReport r;
    r.min_abs_det = std::numeric_limits<double>::infinity();
    for (const auto& m : samples) {
        const Matrix bm = b(m);
        if ((bm + bm.transpose()).cwiseAbs().maxCoeff() != 0.0) r.antisymmetric = false;
        const double det = std::abs(bm.fullPivLu().determinant());
        if (det < r.min_abs_det) {
            r.min_abs_det = det;
            r.worst_point = m;
        }
        if (!is_nondegenerate(bm, tol)) r.nondegenerate = false;
    }
    if (samples.empty()) r.min_abs_det = 0.0;
    return r;
}

}  // namespace dualpair
