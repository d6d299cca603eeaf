#include "dualpair/error.hpp"
#include "dualpair/funcspace.hpp"

#include <array>
#include <cmath>
#include <cstdlib>

namespace dualpair {

namespace {

struct Factor {
    int code;
    double coef;
};

// Product of two single-coordinate periodic factors; at most two terms.
int periodic_product(int a, int b, Factor out[2])
{
    if (a == 0) {
        out[0] = {b, 1.0};
        return 1;
    }
    if (b == 0) {
        out[0] = {a, 1.0};
        return 1;
    }
    const int p = std::abs(a);
    const int q = std::abs(b);
    if (a > 0 && b > 0) {  // cos p cos q
        out[0] = {std::abs(p - q), 0.5};
        out[1] = {p + q, 0.5};
        return 2;
    }
    if (a < 0 && b < 0) {  // sin p sin q
        out[0] = {std::abs(p - q), 0.5};
        out[1] = {p + q, -0.5};
        return 2;
    }
    // sin s cos c = (sin(s+c) + sin(s-c)) / 2
    const int s = a < 0 ? p : q;
    const int c = a < 0 ? q : p;
    out[0] = {-(s + c), 0.5};
    if (s == c) return 1;
    out[1] = s > c ? Factor{-(s - c), 0.5} : Factor{-(c - s), -0.5};
    return 2;
}

}  // namespace

TrigPoly::TrigPoly(std::vector<bool> periodic) : periodic_(std::move(periodic)) {}

TrigPoly TrigPoly::constant(std::vector<bool> periodic, double c)
{
    TrigPoly p(std::move(periodic));
    p.add(Mode(p.periodic_.size(), 0), c);
    return p;
}

TrigPoly TrigPoly::monomial(std::vector<bool> periodic, Mode mode, double c)
{
    if (mode.size() != periodic.size()) throw InvariantError("monomial: mode has wrong length");
    TrigPoly p(std::move(periodic));
    p.add(mode, c);
    return p;
}

double TrigPoly::constant_term() const
{
    auto it = terms_.find(Mode(periodic_.size(), 0));
    return it == terms_.end() ? 0.0 : it->second;
}

void TrigPoly::add(const Mode& m, double c)
{
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (inserted) return;
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o)
{
    if (periodic_.empty() && terms_.empty()) periodic_ = o.periodic_;
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
}

TrigPoly& TrigPoly::operator*=(double s)
{
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
}

TrigPoly operator*(const TrigPoly& a, const TrigPoly& b)
{
    const auto& per = a.periodic_.empty() ? b.periodic_ : a.periodic_;
    TrigPoly r(per);
    const std::size_t n = per.size();
    std::vector<std::array<Factor, 2>> factors(n);
    std::vector<int> counts(n);
    Mode m(n);
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            for (std::size_t i = 0; i < n; ++i) {
                if (per[i]) {
                    counts[i] = periodic_product(ma[i], mb[i], factors[i].data());
                } else {
                    factors[i][0] = {ma[i] + mb[i], 1.0};
                    counts[i] = 1;
                }
            }
            // Expand the per-coordinate sums.
            std::vector<int> pick(n, 0);
            while (true) {
                double c = ca * cb;
                for (std::size_t i = 0; i < n; ++i) {
                    m[i] = factors[i][pick[i]].code;
                    c *= factors[i][pick[i]].coef;
                }
                r.add(m, c);
                std::size_t i = 0;
                while (i < n && ++pick[i] == counts[i]) pick[i++] = 0;
                if (i == n) break;
            }
        }
    }
    return r;
}

TrigPoly TrigPoly::derivative(std::size_t coordinate) const
{
    if (coordinate >= periodic_.size()) throw InvariantError("derivative: coordinate out of range");
    TrigPoly r(periodic_);
    for (const auto& [m, c] : terms_) {
        const int k = m[coordinate];
        if (k == 0) continue;
        Mode d = m;
        if (periodic_[coordinate]) {
            d[coordinate] = -k;  // cos k -> -k sin k, sin k -> k cos k
            r.add(d, -k * c);
        } else {
            d[coordinate] = k - 1;
            r.add(d, k * c);
        }
    }
    return r;
}

double TrigPoly::operator()(const Vector& point) const
{
    if (static_cast<std::size_t>(point.size()) != periodic_.size())
        throw InvariantError("TrigPoly: point has wrong dimension");
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
        double v = c;
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double x = point[static_cast<Index>(i)];
            const int k = m[i];
            if (k == 0) continue;
            if (periodic_[i]) v *= k > 0 ? std::cos(k * x) : std::sin(-k * x);
            else v *= std::pow(x, k);
        }
        sum += v;
    }
    return sum;
}

// ---------------------------------------------------------------------------

namespace {

struct Converter {
    const Chart& chart;
    const Environment& params;
    std::vector<bool> periodic;

    [[noreturn]] void reject(const Expr& e) const
    {
        throw InvariantError("not trig-polynomial form: " + to_string(e));
    }

    bool coordinate_free(const Expr& e) const
    {
        for (const auto& n : free_names(e))
            if (chart.index_of(n)) return false;
        return true;
    }

    TrigPoly constant(double c) const { return TrigPoly::constant(periodic, c); }

    // cos(k u) and sin(k u) for the unit winding `u = coord_i`, scaled by sign.
    std::pair<TrigPoly, TrigPoly> unit_phase(std::size_t i, long k) const
    {
        Mode m(periodic.size(), 0);
        const int a = static_cast<int>(std::labs(k));
        m[i] = a;
        TrigPoly c = TrigPoly::monomial(periodic, m);
        m[i] = -a;
        TrigPoly s = TrigPoly::monomial(periodic, m, k < 0 ? -1.0 : 1.0);
        return {c, s};
    }

    TrigPoly phase(const Expr& e, const Expr& arg, bool want_cos) const
    {
        auto form = angle_form(arg, chart, params);
        if (!form || !coordinate_free(form->offset)) reject(e);
        TrigPoly c = constant(1.0);
        TrigPoly s(periodic);
        for (std::size_t i = 0; i < form->winding.size(); ++i) {
            if (form->winding[i] == 0) continue;
            auto [ci, si] = unit_phase(i, form->winding[i]);
            TrigPoly nc = c * ci - s * si;
            TrigPoly ns = c * si + s * ci;
            c = std::move(nc);
            s = std::move(ns);
        }
        const double off = eval(form->offset, params);
        const double co = std::cos(off);
        const double so = std::sin(off);
        // cos(a + o) = cos a cos o - sin a sin o; sin(a + o) = sin a cos o + cos a sin o
        if (want_cos) return c * co - s * so;
        return s * co + c * so;
    }

    TrigPoly operator()(const Expr& e) const
    {
        if (coordinate_free(e)) return constant(eval(e, params));
        switch (e.op()) {
            case Op::Symbol: {
                const std::size_t i = *chart.index_of(e.name());
                if (periodic[i]) reject(e);
                Mode m(periodic.size(), 0);
                m[i] = 1;
                return TrigPoly::monomial(periodic, m);
            }
            case Op::Add: return (*this)(e.lhs()) + (*this)(e.rhs());
            case Op::Sub: return (*this)(e.lhs()) - (*this)(e.rhs());
            case Op::Mul: return (*this)(e.lhs()) * (*this)(e.rhs());
            case Op::Neg: return (*this)(e.operand()) * -1.0;
            case Op::Div: {
                if (!coordinate_free(e.rhs())) reject(e);
                const double d = eval(e.rhs(), params);
                if (d == 0.0) throw EvalError("division by zero", to_string(e));
                return (*this)(e.lhs()) * (1.0 / d);
            }
            case Op::Pow: {
                if (!coordinate_free(e.rhs())) reject(e);
                const double p = eval(e.rhs(), params);
                if (p < 0.0 || p != std::floor(p) || p > 64.0) reject(e);
                const TrigPoly base = (*this)(e.lhs());
                TrigPoly r = constant(1.0);
                for (int k = 0; k < static_cast<int>(p); ++k) r = r * base;
                return r;
            }
            case Op::Call: {
                if (e.func() == Func::Cos) return phase(e, e.operand(), true);
                if (e.func() == Func::Sin) return phase(e, e.operand(), false);
                reject(e);
            }
            default: reject(e);
        }
    }
};

}  // namespace

TrigPoly to_trig_poly(const Expr& e, const Chart& chart, const Environment& params)
{
    std::vector<bool> periodic;
    for (const auto& c : chart.coordinates()) periodic.push_back(c.periodic);
    Converter conv{chart, params, periodic};
    for (const auto& n : free_names(e))
        if (!chart.index_of(n) && !params.count(n))
            throw InvariantError("unknown name '" + n + "' in " + to_string(e));
    return conv(e);
}

}  // namespace dualpair
