#include "dualpair/error.hpp"
#include "dualpair/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace dualpair {

namespace {

int rank_of(int code, bool periodic)
{
    if (!periodic) return code;
    if (code > 0) return 2 * code;
    if (code < 0) return -2 * code - 1;
    return 0;
}

int grade_of(const Mode& m)
{
    int g = 0;
    for (int c : m) g += std::abs(c);
    return g;
}

int poly_degree(const Mode& m, const std::vector<bool>& periodic)
{
    int d = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!periodic[i]) d += m[i];
    return d;
}

// Allowed codes per coordinate.
std::vector<std::vector<int>> axis_codes(const Chart& chart, const BasisSpec& spec)
{
    for (const auto& [name, k] : spec.frequency) {
        auto i = chart.index_of(name);
        if (!i || !chart.coordinate(*i).periodic)
            throw InvariantError("basis spec: '" + name + "' is not a periodic coordinate of '" + chart.name() + "'");
        if (k < 0) throw InvariantError("basis spec: negative frequency for '" + name + "'");
    }
    for (const auto& [name, d] : spec.degree) {
        auto i = chart.index_of(name);
        if (!i || chart.coordinate(*i).periodic)
            throw InvariantError("basis spec: '" + name + "' is not a non-periodic coordinate of '" + chart.name() + "'");
        if (d < 0) throw InvariantError("basis spec: negative degree for '" + name + "'");
    }
    if (spec.total_degree && *spec.total_degree < 0) throw InvariantError("basis spec: negative total degree");

    std::vector<std::vector<int>> codes;
    for (const auto& c : chart.coordinates()) {
        std::vector<int> axis{0};
        if (c.periodic) {
            auto it = spec.frequency.find(c.name);
            if (it == spec.frequency.end()) throw InvariantError("basis spec: no frequency for '" + c.name + "'");
            for (int k = 1; k <= it->second; ++k) {
                axis.push_back(k);
                axis.push_back(-k);
            }
        } else {
            auto it = spec.degree.find(c.name);
            if (it == spec.degree.end()) throw InvariantError("basis spec: no degree for '" + c.name + "'");
            for (int d = 1; d <= it->second; ++d) axis.push_back(d);
        }
        codes.push_back(std::move(axis));
    }
    return codes;
}

std::string factor_name(const std::string& coord, int code, bool periodic)
{
    if (periodic) {
        const int k = std::abs(code);
        const std::string arg = k == 1 ? coord : std::to_string(k) + "*" + coord;
        return (code > 0 ? "cos(" : "sin(") + arg + ")";
    }
    return code == 1 ? coord : coord + "^" + std::to_string(code);
}

std::string format_coefficient(double c)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", c);
    return buf;
}

}  // namespace

BasisSpec BasisSpec::uniform(const Chart& chart, int frequency, int degree, std::optional<int> total_degree)
{
    BasisSpec s;
    for (const auto& c : chart.coordinates()) {
        if (c.periodic) s.frequency[c.name] = frequency;
        else s.degree[c.name] = degree;
    }
    s.total_degree = total_degree;
    return s;
}

bool graded_less(const Mode& a, const Mode& b, const std::vector<bool>& periodic)
{
    const int ga = grade_of(a);
    const int gb = grade_of(b);
    if (ga != gb) return ga < gb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int ra = rank_of(a[i], periodic[i]);
        const int rb = rank_of(b[i], periodic[i]);
        if (ra != rb) return ra > rb;
    }
    return false;
}

std::size_t basis_dimension(const Chart& chart, const BasisSpec& spec)
{
    const auto codes = axis_codes(chart, spec);
    // Number of polynomial-degree combinations by total degree.
    std::vector<double> by_degree{1.0};
    double trig = 1.0;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (chart.coordinate(i).periodic) {
            trig *= static_cast<double>(codes[i].size());
            continue;
        }
        const std::size_t top = codes[i].size() - 1;
        std::vector<double> next(by_degree.size() + top, 0.0);
        for (std::size_t d = 0; d < by_degree.size(); ++d)
            for (std::size_t e = 0; e <= top; ++e) next[d + e] += by_degree[d];
        by_degree = std::move(next);
    }
    double poly = 0.0;
    for (std::size_t d = 0; d < by_degree.size(); ++d)
        if (!spec.total_degree || static_cast<int>(d) <= *spec.total_degree) poly += by_degree[d];
    const double total = trig * poly;
    if (total > 1e15) throw InvariantError("basis too large");
    return static_cast<std::size_t>(total);
}

FunctionSpace::FunctionSpace(Chart chart, BasisSpec spec, std::size_t max_dim)
    : chart_(std::move(chart)), spec_(std::move(spec))
{
    const std::size_t want = basis_dimension(chart_, spec_);
    if (want > max_dim)
        throw InvariantError("function space of dimension " + std::to_string(want) + " exceeds the limit of " +
                             std::to_string(max_dim));
    const auto codes = axis_codes(chart_, spec_);
    const auto periodic = periodic_flags();
    const std::size_t n = codes.size();

    modes_.reserve(want);
    std::vector<std::size_t> pick(n, 0);
    Mode m(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) m[i] = codes[i][pick[i]];
        if (!spec_.total_degree || poly_degree(m, periodic) <= *spec_.total_degree) modes_.push_back(m);
        std::size_t i = 0;
        while (i < n && ++pick[i] == codes[i].size()) pick[i++] = 0;
        if (i == n) break;
    }
    std::sort(modes_.begin(), modes_.end(),
              [&periodic](const Mode& a, const Mode& b) { return graded_less(a, b, periodic); });
    for (std::size_t i = 0; i < modes_.size(); ++i) index_.emplace(modes_[i], i);
}

std::optional<std::size_t> FunctionSpace::index_of(const Mode& m) const
{
    auto it = index_.find(m);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<bool> FunctionSpace::periodic_flags() const
{
    std::vector<bool> p;
    for (const auto& c : chart_.coordinates()) p.push_back(c.periodic);
    return p;
}

std::string FunctionSpace::basis_name(std::size_t i) const
{
    const Mode& m = mode(i);
    std::string out;
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (m[k] == 0) continue;
        if (!out.empty()) out += "*";
        out += factor_name(chart_.coordinate(k).name, m[k], chart_.coordinate(k).periodic);
    }
    return out.empty() ? "1" : out;
}

double FunctionSpace::basis_value(std::size_t i, const Vector& point) const
{
    return TrigPoly::monomial(periodic_flags(), mode(i))(point);
}

std::optional<Vector> FunctionSpace::coefficients(const TrigPoly& f) const
{
    Vector v = Vector::Zero(static_cast<Index>(dim()));
    for (const auto& [m, c] : f.terms()) {
        auto i = index_of(m);
        if (!i) return std::nullopt;
        v[static_cast<Index>(*i)] = c;
    }
    return v;
}

double FunctionSpace::evaluate(const Vector& coefficients, const Vector& point) const
{
    if (static_cast<std::size_t>(coefficients.size()) != dim())
        throw InvariantError("evaluate: coefficient vector has wrong length");
    TrigPoly f(periodic_flags());
    for (std::size_t i = 0; i < dim(); ++i) f.add(mode(i), coefficients[static_cast<Index>(i)]);
    return f(point);
}

std::string FunctionSpace::pretty(const Vector& coefficients, double round) const
{
    std::string out;
    for (std::size_t i = 0; i < dim(); ++i) {
        double c = coefficients[static_cast<Index>(i)];
        if (round > 0.0) c = std::round(c / round) * round;
        if (c == 0.0) continue;
        const std::string name = basis_name(i);
        const double a = std::abs(c);
        std::string term;
        if (name == "1") term = format_coefficient(a);
        else if (a == 1.0) term = name;
        else term = format_coefficient(a) + "*" + name;
        if (out.empty()) out = c < 0 ? "-" + term : term;
        else out += (c < 0 ? " - " : " + ") + term;
    }
    return out.empty() ? "0" : out;
}

std::vector<Vector> witnesses(const Subspace& inner, const Subspace& outer, std::size_t max_count, double tol)
{
    const Subspace extra = complement_within(inner, outer, tol);
    Matrix rows = extra.basis().transpose();
    const Index r = rows.rows();
    const Index n = rows.cols();
    std::vector<Index> pivots;
    Index next = 0;
    for (Index col = 0; col < n && next < r; ++col) {
        Index best = next;
        for (Index i = next + 1; i < r; ++i)
            if (std::abs(rows(i, col)) > std::abs(rows(best, col))) best = i;
        if (std::abs(rows(best, col)) <= 1e-9) continue;
        rows.row(next).swap(rows.row(best));
        rows.row(next) /= rows(next, col);
        for (Index i = 0; i < r; ++i)
            if (i != next) rows.row(i) -= rows(i, col) * rows.row(next);
        pivots.push_back(col);
        ++next;
    }
    std::vector<Vector> out;
    for (Index i = 0; i < next && out.size() < max_count; ++i) {
        Vector v = rows.row(i).transpose();
        for (Index k = 0; k < n; ++k)
            if (std::abs(v[k]) <= 1e-10) v[k] = 0.0;
        v[pivots[static_cast<std::size_t>(i)]] = 1.0;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace dualpair
