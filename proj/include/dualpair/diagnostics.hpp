#pragma once

// Pointwise and grid-level dual-pair diagnostics.

#include "dualpair/manifold.hpp"
#include "dualpair/symplin.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dualpair {

struct GridSpec {
    std::size_t points_per_axis = 7;
    /// Sampling interval for non-periodic coordinates; falls back to the
    /// coordinate bounds, then to [-1, 1].
    std::map<std::string, std::pair<double, double>, std::less<>> windows;
    /// Points always appended to the lattice (deduplicated).
    std::vector<Vector> include;
    /// Uniform jitter as a fraction of the lattice spacing.
    double jitter = 0.0;
    std::uint64_t seed = 0;
};

/// Deterministic sample points. Periodic axes use the offset lattice
/// 2pi(k + 1/pi)/N so that no sample sits on a symmetry line.
class SampleGrid {
public:
    SampleGrid() = default;
    /// Throws InvariantError if a point lies outside the chart.
    SampleGrid(const Chart& chart, std::vector<Vector> points);

    static SampleGrid build(const Chart& chart, const GridSpec& spec);

    const Chart& chart() const noexcept { return chart_; }
    const std::vector<Vector>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }

private:
    Chart chart_;
    std::vector<Vector> points_;
};

enum class FiberConnectivity { Yes, No, Unknown };

std::string to_string(FiberConnectivity c);

struct PushforwardReport;

struct Leg {
    SmoothMap map;
    std::optional<BivectorField> bivector;
    FiberConnectivity fibers_connected = FiberConnectivity::Unknown;
    /// True when `bivector` was produced by pushforward_bivector.
    bool bivector_inferred = false;
};

struct DualPairDiagram {
    std::string name;
    BivectorField structure;  ///< B# on the total space
    Leg left;
    Leg right;

    const Chart& total() const { return structure.chart(); }
    /// Throws InvariantError on chart incompatibilities.
    void validate() const;
};

/// Same diagram with the legs exchanged.
DualPairDiagram swap_legs(const DualPairDiagram& d);

// ---------------------------------------------------------------------------

struct PoissonMapReport {
    bool pass = false;
    double max_residual = 0.0;
    double scale = 1.0;
    Vector worst_point;
    std::size_t points = 0;
};

/// Checks T pi B_M# T pi^T = B_P#(pi(m)) over the grid.
/// pass iff max residual <= tol * scale, scale = 1 + max |entry| seen.
PoissonMapReport check_poisson_map(const SmoothMap& pi, const BivectorField& bm, const BivectorField& bp,
                                   const SampleGrid& grid, double tol = 1e-9);

struct LWVerdict {
    Vector point;
    Index dim_k1 = 0;
    Index dim_k2 = 0;
    Index dim_k1_omega = 0;
    double max_angle = 0.0;
    bool pass = false;
};

/// (ker T_m pi_1)^omega == ker T_m pi_2. Throws if B_M(m) is degenerate.
LWVerdict lw_check_at(const DualPairDiagram& d, const Vector& m, double rank_tol = 1e-9, double angle_tol = 1e-7);

struct RankScanReport {
    std::map<Index, Vector> witnesses;  ///< rank -> first point attaining it
    std::map<Index, std::size_t> counts;
    bool constant_rank = false;
    bool submersion = false;
};

RankScanReport rank_scan(const SmoothMap& pi, const SampleGrid& grid, double rank_tol = 1e-9);

struct DimensionVerdict {
    std::size_t dim_m = 0;
    std::size_t dim_p1 = 0;
    std::size_t dim_p2 = 0;
    bool pass = false;
};

DimensionVerdict dimension_check(const DualPairDiagram& d);

struct PushforwardOptions {
    std::size_t fiber_samples = 3;
    std::size_t target_points = 12;
    double tol = 1e-8;
    double rank_tol = 1e-9;
    std::uint64_t seed = 0;
};

struct PushforwardSample {
    Vector target_point;
    std::vector<Vector> preimages;
    Matrix value;            ///< T pi B_M# T pi^T at the first preimage
    double variation = 0.0;  ///< max pairwise entry difference along the fiber
};

struct PushforwardReport {
    std::vector<PushforwardSample> samples;
    bool projectable = false;
    double max_variation = 0.0;
    double scale = 1.0;
    /// Target points for which fewer than two preimages were found.
    std::size_t preimage_shortfalls = 0;
    /// Rank of the candidate target bivector -> number of samples.
    std::map<Index, std::size_t> rank_counts;
    /// Present when every entry is affine in the non-periodic target
    /// coordinates (constant in the periodic ones).
    std::optional<BivectorField> fitted;
    double fit_residual = 0.0;
};

PushforwardReport pushforward_bivector(const SmoothMap& pi, const BivectorField& bm, const SampleGrid& grid,
                                       const PushforwardOptions& options = {});

/// Fills missing leg bivectors from fitted pushforwards. Legs whose
/// pushforward is not projectable or not affine are left empty.
void complete_diagram(DualPairDiagram& d, const SampleGrid& grid, const PushforwardOptions& options = {});

struct LeafReport {
    Vector point;
    Index image_dim = 0;   ///< dim T pi_1 (K_2 + K_2^omega)
    Index leaf_rank = 0;   ///< rank B_1#(pi_1(m))
    bool consistent = false;
    /// Set when the pointwise test cannot see a global failure, i.e. the
    /// fibers of either leg are not declared connected.
    bool global_caveat = false;
};

/// Necessary pointwise condition for the symplectic-leaf correspondence.
LeafReport leaf_correspondence_check(const DualPairDiagram& d, const Vector& m, double rank_tol = 1e-9);

}  // namespace dualpair
