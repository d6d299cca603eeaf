#include "dualpair/diagnostics.hpp"
#include "dualpair/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace dualpair {

SampleGrid::SampleGrid(const Chart& chart, std::vector<Vector> points) : chart_(chart), points_(std::move(points))
{
    for (const auto& p : points_)
        if (!chart_.contains(p))
            throw InvariantError("grid point outside chart '" + chart_.name() + "'");
}

SampleGrid SampleGrid::build(const Chart& chart, const GridSpec& spec)
{
    if (spec.points_per_axis == 0) throw InvariantError("grid needs at least one point per axis");
    const std::size_t n = chart.dim();
    const std::size_t per = spec.points_per_axis;

    std::vector<std::vector<double>> axes(n);
    std::vector<double> spacing(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Coordinate& c = chart.coordinate(i);
        if (c.periodic) {
            spacing[i] = 2.0 * std::numbers::pi / static_cast<double>(per);
            for (std::size_t k = 0; k < per; ++k)
                axes[i].push_back(spacing[i] * (static_cast<double>(k) + std::numbers::inv_pi));
            continue;
        }
        std::pair<double, double> w{-1.0, 1.0};
        if (auto it = spec.windows.find(c.name); it != spec.windows.end()) w = it->second;
        else if (c.bounds) w = *c.bounds;
        if (per == 1) {
            axes[i].push_back(0.5 * (w.first + w.second));
            continue;
        }
        spacing[i] = (w.second - w.first) / static_cast<double>(per - 1);
        for (std::size_t k = 0; k < per; ++k)
            axes[i].push_back(k + 1 == per ? w.second : w.first + spacing[i] * static_cast<double>(k));
    }

    std::mt19937_64 rng(spec.seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > 50'000'000 / per) throw InvariantError("grid too large");
        total *= per;
    }

    std::vector<Vector> points;
    points.reserve(total + spec.include.size());
    for (std::size_t t = 0; t < total; ++t) {
        Vector p(n);
        std::size_t rem = t;
        for (std::size_t i = n; i-- > 0;) {
            p[static_cast<Index>(i)] = axes[i][rem % per];
            rem /= per;
        }
        if (spec.jitter > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                double v = p[static_cast<Index>(i)] + spec.jitter * spacing[i] * (2.0 * uniform() - 1.0);
                const auto& b = chart.coordinate(i).bounds;
                if (b) v = std::clamp(v, b->first, b->second);
                p[static_cast<Index>(i)] = v;
            }
            p = chart.wrap(p);
        }
        points.push_back(std::move(p));
    }
    for (const auto& extra : spec.include) {
        if (static_cast<std::size_t>(extra.size()) != n)
            throw InvariantError("included grid point has wrong dimension");
        bool present = false;
        for (const auto& p : points) present = present || p == extra;
        if (!present) points.push_back(extra);
    }
    return SampleGrid(chart, std::move(points));
}

std::string to_string(FiberConnectivity c)
{
    switch (c) {
        case FiberConnectivity::Yes: return "yes";
        case FiberConnectivity::No: return "no";
        case FiberConnectivity::Unknown: return "unknown";
    }
    return "unknown";
}

}  // namespace dualpair
