#include "dualpair/diagnostics.hpp"
#include "dualpair/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace dualpair {

namespace {

struct PreimageSearch {
    const SmoothMap& pi;

    double residual(const Vector& x, const Vector& y) const
    {
        return pi.target().difference(pi(x), y).norm();
    }

    /// Damped Gauss-Newton with minimum-norm steps. Returns nullopt when the
    /// iteration stalls or leaves the chart.
    std::optional<Vector> solve(Vector x, const Vector& y) const
    {
        const Chart& src = pi.source();
        const double goal = 1e-12 * (1.0 + y.norm());
        double r = residual(x, y);
        for (int it = 0; it < 60 && r > goal; ++it) {
            const Vector f = pi.target().difference(pi(x), y);
            const Matrix j = pi.jacobian(x);
            const Vector step = -j.completeOrthogonalDecomposition().solve(f);
            double alpha = 1.0;
            bool improved = false;
            while (alpha > 1e-8) {
                const Vector trial = src.wrap(x + alpha * step);
                if (src.contains(trial)) {
                    const double rt = residual(trial, y);
                    if (rt < r) {
                        x = trial;
                        r = rt;
                        improved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if (!improved) break;
        }
        if (r > goal) return std::nullopt;
        return x;
    }
};

double max_pairwise(const std::vector<Matrix>& values)
{
    double v = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a)
        for (std::size_t b = a + 1; b < values.size(); ++b)
            v = std::max(v, (values[a] - values[b]).cwiseAbs().maxCoeff());
    return v;
}

double snap(double c)
{
    const double r = std::nearbyint(c);
    return std::abs(c - r) <= 1e-10 ? r : c;
}

// Least-squares fit of each upper entry against [1, z_linear...]; returns the
// fitted field when every residual is within tol * scale.
std::optional<BivectorField> fit_affine(const SmoothMap& pi, const std::vector<PushforwardSample>& samples,
                                        double tol, double scale, double& worst)
{
    const Chart& target = pi.target();
    const std::size_t n = target.dim();
    std::vector<std::size_t> linear;
    for (std::size_t i = 0; i < n; ++i)
        if (!target.coordinate(i).periodic) linear.push_back(i);
    const Index cols = static_cast<Index>(1 + linear.size());
    const Index rows = static_cast<Index>(samples.size());
    if (rows < cols) return std::nullopt;

    Matrix design(rows, cols);
    for (Index s = 0; s < rows; ++s) {
        design(s, 0) = 1.0;
        for (std::size_t k = 0; k < linear.size(); ++k)
            design(s, static_cast<Index>(k + 1)) = samples[static_cast<std::size_t>(s)].target_point[static_cast<Index>(linear[k])];
    }
    const auto decomposition = design.completeOrthogonalDecomposition();
    if (decomposition.rank() < cols) return std::nullopt;

    worst = 0.0;
    std::vector<Expr> upper;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            Vector rhs(rows);
            for (Index s = 0; s < rows; ++s)
                rhs[s] = samples[static_cast<std::size_t>(s)].value(static_cast<Index>(i), static_cast<Index>(j));
            Vector coef = decomposition.solve(rhs);
            for (Index c = 0; c < cols; ++c) {
                coef[c] = snap(coef[c]);
                if (std::abs(coef[c]) <= 1e-12 * scale) coef[c] = 0.0;
            }
            worst = std::max(worst, (design * coef - rhs).cwiseAbs().maxCoeff());
            Expr e = Expr::number(coef[0]);
            for (std::size_t k = 0; k < linear.size(); ++k)
                e = e + Expr::number(coef[static_cast<Index>(k + 1)]) * Expr::symbol(target.names()[linear[k]]);
            upper.push_back(e);
        }
    if (worst > tol * scale) return std::nullopt;
    return BivectorField::from_upper("pushforward(" + pi.name() + ")", target, upper);
}

}  // namespace

PushforwardReport pushforward_bivector(const SmoothMap& pi, const BivectorField& bm, const SampleGrid& grid,
                                       const PushforwardOptions& options)
{
    if (!(pi.source() == bm.chart())) throw InvariantError("pushforward_bivector: chart mismatch");
    if (grid.size() == 0) throw InvariantError("pushforward_bivector: empty grid");
    const Chart& src = pi.source();
    const auto& pts = grid.points();
    const std::size_t count = std::min(options.target_points, pts.size());
    const std::size_t want = std::max<std::size_t>(options.fiber_samples, 1);

    std::mt19937_64 rng(options.seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    PushforwardReport r;
    PreimageSearch search{pi};
    double largest = 0.0;
    // seeded selection; a fixed stride can alias with the lattice
    std::vector<std::size_t> chosen(pts.size());
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
    for (std::size_t k = 0; k < count; ++k) std::swap(chosen[k], chosen[k + rng() % (pts.size() - k)]);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t base = chosen[k];
        const Vector& m0 = pts[base];
        PushforwardSample s;
        s.target_point = pi(m0);
        s.preimages.push_back(m0);

        const std::size_t stride = std::max<std::size_t>(1, pts.size() / (4 * want + 1));
        for (std::size_t attempt = 1; attempt <= 4 * want && s.preimages.size() < want; ++attempt) {
            Vector start = pts[(base + attempt * stride + 1) % pts.size()];
            for (Index i = 0; i < start.size(); ++i) start[i] += 0.05 * (2.0 * uniform() - 1.0);
            start = src.wrap(start);
            if (!src.contains(start)) start = pts[(base + attempt * stride + 1) % pts.size()];
            auto x = search.solve(start, s.target_point);
            if (!x) continue;
            bool distinct = true;
            for (const auto& p : s.preimages) distinct = distinct && src.difference(*x, p).norm() > 1e-3;
            if (distinct) s.preimages.push_back(*x);
        }
        if (s.preimages.size() < 2) ++r.preimage_shortfalls;

        std::vector<Matrix> values;
        for (const auto& p : s.preimages) {
            const Matrix j = pi.jacobian(p);
            values.push_back(j * bm(p) * j.transpose());
            largest = std::max(largest, values.back().cwiseAbs().maxCoeff());
        }
        s.value = values.front();
        s.variation = max_pairwise(values);
        r.max_variation = std::max(r.max_variation, s.variation);
        ++r.rank_counts[numerical_rank(s.value, options.rank_tol)];
        r.samples.push_back(std::move(s));
    }
    r.scale = 1.0 + largest;
    r.projectable = r.max_variation <= options.tol * r.scale;
    if (r.projectable) r.fitted = fit_affine(pi, r.samples, options.tol, r.scale, r.fit_residual);
    return r;
}

void complete_diagram(DualPairDiagram& d, const SampleGrid& grid, const PushforwardOptions& options)
{
    for (Leg* leg : {&d.left, &d.right}) {
        if (leg->bivector) continue;
        PushforwardReport r = pushforward_bivector(leg->map, d.structure, grid, options);
        if (r.fitted) {
            leg->bivector = std::move(r.fitted);
            leg->bivector_inferred = true;
        }
    }
}

}  // namespace dualpair
