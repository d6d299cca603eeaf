#include "dualpair/flows.hpp"

#include "dualpair/error.hpp"
#include "dualpair/symplin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>

namespace dualpair {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Trajectory::Trajectory(Chart chart, double dt, std::string hamiltonian, Environment parameters)
    : chart_(std::move(chart)), dt_(dt), hamiltonian_(std::move(hamiltonian)), params_(std::move(parameters))
{
    for (std::size_t i = 0; i < chart_.dim(); ++i)
        if (chart_.coordinate(i).periodic) periodic_.push_back(i);
}

void Trajectory::push(double t, const Vector& unwrapped)
{
    const std::size_t n = chart_.dim();
    if (static_cast<std::size_t>(unwrapped.size()) != n) throw InvariantError("trajectory sample has wrong dimension");
    times_.push_back(t);
    const std::size_t base = values_.size();
    values_.insert(values_.end(), unwrapped.data(), unwrapped.data() + n);
    for (std::size_t i : periodic_) {
        const double turns = std::floor(unwrapped[static_cast<Index>(i)] / two_pi);
        double w = unwrapped[static_cast<Index>(i)] - turns * two_pi;
        if (w >= two_pi) w = 0.0;  // rounding at the seam
        values_[base + i] = w;
        turns_.push_back(static_cast<std::int64_t>(turns));
    }
}

Vector Trajectory::point(std::size_t k) const
{
    if (k >= size()) throw InvariantError("trajectory index out of range");
    const std::size_t n = chart_.dim();
    return Eigen::Map<const Vector>(values_.data() + k * n, static_cast<Index>(n));
}

Vector Trajectory::unwrapped(std::size_t k) const
{
    Vector p = point(k);
    for (std::size_t j = 0; j < periodic_.size(); ++j)
        p[static_cast<Index>(periodic_[j])] += two_pi * static_cast<double>(turns_[k * periodic_.size() + j]);
    return p;
}

Trajectory integrate_hamiltonian(const ScalarField& h, const BivectorField& b, const Vector& start, double T, double dt)
{
    const Chart& chart = h.chart();
    if (!(b.chart() == chart)) throw InvariantError("integrate_hamiltonian: Hamiltonian and bivector charts differ");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvariantError("integrate_hamiltonian: dt must be positive");
    if (!(T >= dt) || !std::isfinite(T)) throw InvariantError("integrate_hamiltonian: T must be at least dt");
    if (static_cast<std::size_t>(start.size()) != chart.dim() || !chart.contains(chart.wrap(start)))
        throw InvariantError("integrate_hamiltonian: start point outside chart '" + chart.name() + "'");

    const bool constant_b = b.is_constant();
    const Matrix b0 = b(chart.wrap(start));
    auto field = [&](const Vector& x) -> Vector {
        const Vector w = chart.wrap(x);
        if (!chart.contains(w)) throw InvariantError("trajectory left chart '" + chart.name() + "'");
        return (constant_b ? b0 : b(w)) * h.differential(w);
    };

    Trajectory traj(chart, dt, to_string(h.body()), h.parameters());
    Vector x = start;
    traj.initial_energy = h(chart.wrap(x));
    traj.push(0.0, x);

    const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t0 = static_cast<double>(k - 1) * dt;
        const double t1 = k == steps ? T : static_cast<double>(k) * dt;
        const double s = t1 - t0;
        const Vector k1 = field(x);
        const Vector k2 = field(x + 0.5 * s * k1);
        const Vector k3 = field(x + 0.5 * s * k2);
        const Vector k4 = field(x + s * k3);
        x += (s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const Vector w = chart.wrap(x);
        if (!chart.contains(w) || !w.allFinite())
            throw InvariantError("trajectory left chart '" + chart.name() + "' at t=" + fmt(t1));
        traj.drift = std::max(traj.drift, std::abs(h(w) - traj.initial_energy));
        traj.push(t1, x);
    }
    return traj;
}

CoverageReport fiber_coverage_probe(const Trajectory& traj, const std::vector<std::string>& fiber_coordinates,
                                    std::size_t resolution)
{
    const Chart& chart = traj.chart();
    if (fiber_coordinates.empty()) throw InvariantError("coverage probe needs at least one coordinate");
    if (resolution == 0) throw InvariantError("coverage probe needs a positive resolution");
    std::vector<std::size_t> idx;
    for (const auto& name : fiber_coordinates) {
        auto i = chart.index_of(name);
        if (!i) throw InvariantError("coverage probe: unknown coordinate '" + name + "'");
        if (!chart.coordinate(*i).periodic)
            throw InvariantError("coverage probe: coordinate '" + name + "' is not periodic");
        idx.push_back(*i);
    }
    const std::size_t k = idx.size();
    std::size_t cells = 1;
    for (std::size_t j = 0; j < k; ++j) {
        if (cells > 10'000'000 / resolution) throw InvariantError("coverage probe grid too large");
        cells *= resolution;
    }

    std::vector<int> dist(cells, -1);
    std::deque<std::size_t> queue;
    const double n = static_cast<double>(resolution);
    for (std::size_t s = 0; s < traj.size(); ++s) {
        std::size_t cell = 0;
        for (std::size_t j = 0; j < k; ++j) {
            auto c = static_cast<std::size_t>(traj.coordinate(s, idx[j]) / two_pi * n);
            cell = cell * resolution + std::min(c, resolution - 1);
        }
        if (dist[cell] < 0) {
            dist[cell] = 0;
            queue.push_back(cell);
        }
    }

    CoverageReport r;
    r.coordinates = fiber_coordinates;
    r.resolution = resolution;
    r.cells = cells;
    r.visited = queue.size();
    r.covered_fraction = static_cast<double>(r.visited) / static_cast<double>(cells);

    // Multi-source BFS over the periodic grid with king moves.
    std::size_t neighbours = 1;
    for (std::size_t j = 0; j < k; ++j) neighbours *= 3;
    std::vector<std::size_t> digits(k);
    int far = 0;
    while (!queue.empty()) {
        const std::size_t cell = queue.front();
        queue.pop_front();
        far = std::max(far, dist[cell]);
        std::size_t rem = cell;
        for (std::size_t j = k; j-- > 0;) {
            digits[j] = rem % resolution;
            rem /= resolution;
        }
        for (std::size_t m = 0; m < neighbours; ++m) {
            std::size_t code = m;
            std::size_t next = 0;
            for (std::size_t j = 0; j < k; ++j) {
                const std::size_t step = code % 3;
                code /= 3;
                const std::size_t d = (digits[j] + resolution + step - 1) % resolution;
                next = next * resolution + d;
            }
            if (dist[next] < 0) {
                dist[next] = dist[cell] + 1;
                queue.push_back(next);
            }
        }
    }
    r.max_gap = r.visited == 0 ? 1.0 : static_cast<double>(far) / n;
    return r;
}

void write_trajectory(std::ostream& out, const Trajectory& traj)
{
    const Chart& c = traj.chart();
    out << "# chart " << c.name() << "\n# hamiltonian " << traj.hamiltonian() << "\n# parameters";
    for (const auto& [name, v] : traj.parameters()) out << ' ' << name << '=' << fmt(v);
    out << "\n# dt " << fmt(traj.dt()) << "\n# t";
    for (const auto& n : c.names()) out << ' ' << n;
    out << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << fmt(traj.time(k));
        for (std::size_t i = 0; i < c.dim(); ++i) out << ' ' << fmt(traj.coordinate(k, i));
        out << '\n';
    }
}

}  // namespace dualpair
