#pragma once

// Fixed-step Hamiltonian flows and torus coverage statistics.

#include "dualpair/manifold.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace dualpair {

/// Samples of a Hamiltonian trajectory. Periodic coordinates are stored
/// wrapped to [0, 2pi) with the number of full turns kept alongside.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(Chart chart, double dt, std::string hamiltonian, Environment parameters);

    const Chart& chart() const noexcept { return chart_; }
    double dt() const noexcept { return dt_; }
    const std::string& hamiltonian() const noexcept { return hamiltonian_; }
    const Environment& parameters() const noexcept { return params_; }

    std::size_t size() const noexcept { return times_.size(); }
    double time(std::size_t k) const { return times_.at(k); }
    Vector point(std::size_t k) const;
    Vector unwrapped(std::size_t k) const;
    /// Raw coordinate i of sample k.
    double coordinate(std::size_t k, std::size_t i) const { return values_[k * chart_.dim() + i]; }

    /// max_k |h(gamma_k) - h(gamma_0)|.
    double drift = 0.0;
    double initial_energy = 0.0;

    /// Appends the sample; `unwrapped` is the continuous state.
    void push(double t, const Vector& unwrapped);

private:
    Chart chart_;
    double dt_ = 0.0;
    std::string hamiltonian_;
    Environment params_;
    std::vector<double> times_;
    std::vector<double> values_;
    std::vector<std::int64_t> turns_;
    std::vector<std::size_t> periodic_;
};

/// Classical RK4 for X_h = B# dh from `start` over [0, T]. The last step is
/// shortened so that the final sample sits at T. Every step is stored.
/// Throws InvariantError on bad arguments or when the path leaves the chart.
Trajectory integrate_hamiltonian(const ScalarField& h, const BivectorField& b, const Vector& start, double T,
                                 double dt);

struct CoverageReport {
    std::vector<std::string> coordinates;
    std::size_t resolution = 0;
    std::size_t cells = 0;
    std::size_t visited = 0;
    double covered_fraction = 0.0;
    /// Largest Chebyshev distance from an empty cell to a visited one, as a
    /// fraction of the full circle.
    double max_gap = 0.0;
};

/// Bins the samples into an N^k grid over the named periodic coordinates.
CoverageReport fiber_coverage_probe(const Trajectory& traj, const std::vector<std::string>& fiber_coordinates,
                                    std::size_t resolution);

/// One line per sample: time then coordinates (wrapped), after a '#' header.
void write_trajectory(std::ostream& out, const Trajectory& traj);

}  // namespace dualpair
