#include "dualpair/cli.hpp"

#include "dualpair/error.hpp"
#include "dualpair/flows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace dualpair {

namespace {

json vec(const Vector& v)
{
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json matrix_text(const BivectorField& b)
{
    json rows = json::array();
    for (const auto& r : b.entries()) {
        json row = json::array();
        for (const auto& e : r) row.push_back(to_string(e));
        rows.push_back(row);
    }
    return rows;
}

std::string fmt(double v, const char* f = "%.6g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string describe(const Truncation& t)
{
    std::string s = "K=" + std::to_string(t.frequency) + ", D=" + std::to_string(t.degree);
    if (t.total_degree) s += ", total degree <= " + std::to_string(*t.total_degree);
    for (const auto& [k, v] : t.overrides) s += ", " + k + ":" + std::to_string(v);
    return s;
}

const char* verdict(bool pass) { return pass ? "pass" : "fail"; }

json block(const char* name, const char* v) { return {{"name", name}, {"verdict", v}}; }

/// Runs `f`; library errors become an inconclusive block.
json guarded_block(const char* name, const std::function<json()>& f)
{
    try {
        return f();
    } catch (const Error& e) {
        json j = block(name, "inconclusive");
        j["error"] = e.what();
        return j;
    }
}

const Leg& leg_of(const DualPairDiagram& d, const std::string& side) { return side == "left" ? d.left : d.right; }

struct Outcome {
    bool structure_ok = true;
    std::string invalid_reason;
    std::optional<bool> lw;
    std::optional<bool> howe;
    std::string witness;
    std::optional<bool> dimension;
    std::optional<std::pair<Index, Index>> leaf_mismatch;
    std::vector<std::string> not_projectable;
};

json rank_json(const RankScanReport& r)
{
    json counts = json::object();
    json wits = json::object();
    for (const auto& [rank, n] : r.counts) counts[std::to_string(rank)] = n;
    for (const auto& [rank, p] : r.witnesses) wits[std::to_string(rank)] = vec(p);
    return {{"ranks", counts}, {"witnesses", wits}, {"constant_rank", r.constant_rank}, {"submersion", r.submersion}};
}

json inclusion_json(const HoweInclusion& i)
{
    return {{"holds", i.holds}, {"max_angle", i.max_angle}, {"witnesses", i.witnesses}};
}

json info_json(const CentralizerInfo& info)
{
    json res = json::array();
    for (const auto& r : info.resonance) {
        json e = {{"generator", r.generator}};
        e["min_abs"] = r.min_abs ? json(*r.min_abs) : json(nullptr);
        res.push_back(e);
    }
    return {{"gap", info.gap}, {"rows", info.rows}, {"target_dim", info.target_dim}, {"resonance", res}};
}

}  // namespace

json run_plan(const Config& c, const RunOptions& options)
{
    AnalysisPlan plan = c.plan;
    if (options.seed) {
        plan.grid.seed = *options.seed;
        if (plan.pushforward) plan.pushforward->options.seed = *options.seed;
    }
    if (options.tol) {
        plan.rank_tol = *options.tol;
        if (plan.pushforward) plan.pushforward->options.rank_tol = *options.tol;
        if (plan.howe) plan.howe->kernel_tol = *options.tol;
    }

    DualPairDiagram d = c.diagram;
    const SampleGrid grid = SampleGrid::build(d.total(), plan.grid);
    Outcome out;
    json checks = json::array();
    std::vector<std::string> notes;

    // Total-space structure: always checked.
    {
        const BivectorReport br = validate_bivector(d.structure, grid.points());
        double jac = 0.0;
        for (const auto& m : grid.points()) jac = std::max(jac, coordinate_jacobiator(d.structure, m));
        const bool ok = br.antisymmetric && br.nondegenerate && jac <= plan.poisson_tol;
        json j = block("structure", verdict(ok));
        j["bivector"] = d.structure.name();
        j["points"] = grid.size();
        j["nondegenerate"] = br.nondegenerate;
        j["min_abs_det"] = br.min_abs_det;
        j["max_jacobiator"] = jac;
        checks.push_back(j);
        if (!ok) {
            out.structure_ok = false;
            out.invalid_reason = !br.nondegenerate ? "structure '" + d.structure.name() + "' is degenerate"
                                                   : "structure '" + d.structure.name() + "' fails the Jacobi identity";
        }
    }

    std::optional<RankScanReport> ranks[2];
    auto leg_ranks = [&](int side) -> const RankScanReport& {
        if (!ranks[side]) ranks[side] = rank_scan(side == 0 ? d.left.map : d.right.map, grid, plan.rank_tol);
        return *ranks[side];
    };

    if (plan.enabled("poisson_maps")) {
        checks.push_back(guarded_block("poisson_maps", [&] {
            json legs = json::object();
            bool all = true;
            bool any_missing = false;
            for (const char* side : {"left", "right"}) {
                const Leg& leg = leg_of(d, side);
                if (!leg.bivector) {
                    legs[side] = {{"verdict", "inconclusive"}, {"reason", "no bivector declared"}};
                    any_missing = true;
                    continue;
                }
                const PoissonMapReport r = check_poisson_map(leg.map, d.structure, *leg.bivector, grid, plan.poisson_tol);
                legs[side] = {{"verdict", verdict(r.pass)}, {"bivector", leg.bivector->name()},
                              {"max_residual", r.max_residual}, {"scale", r.scale},
                              {"worst_point", vec(r.worst_point)}, {"points", r.points}};
                if (!r.pass) {
                    all = false;
                    if (out.invalid_reason.empty())
                        out.invalid_reason = std::string(side) + " leg is not a Poisson map onto '" + leg.bivector->name() + "'";
                }
            }
            json j = block("poisson_maps", !all ? "fail" : any_missing ? "inconclusive" : "pass");
            j["legs"] = legs;
            return j;
        }));
    }

    if (plan.enabled("lw_scan")) {
        checks.push_back(guarded_block("lw_scan", [&] {
            std::size_t passed = 0;
            std::map<std::string, std::size_t> dims;  // "dim K1^omega vs dim K2"
            std::optional<LWVerdict> first_failure;
            double worst_pass_angle = 0.0;
            for (const auto& m : grid.points()) {
                const LWVerdict v = lw_check_at(d, m, plan.rank_tol, plan.angle_tol);
                ++dims[std::to_string(v.dim_k1_omega) + " vs " + std::to_string(v.dim_k2)];
                if (v.pass) {
                    ++passed;
                    worst_pass_angle = std::max(worst_pass_angle, v.max_angle);
                } else if (!first_failure) {
                    first_failure = v;
                }
            }
            const bool sub_left = leg_ranks(0).submersion;
            const bool sub_right = leg_ranks(1).submersion;
            const bool all = passed == grid.size();
            out.lw = all && sub_left && sub_right;
            json j = block("lw_scan", verdict(*out.lw));
            j["points"] = grid.size();
            j["passed"] = passed;
            j["failed"] = grid.size() - passed;
            j["dimensions"] = dims;
            j["max_angle_passing"] = worst_pass_angle;
            j["submersion"] = {{"left", sub_left}, {"right", sub_right}};
            if (first_failure)
                j["first_failure"] = {{"point", vec(first_failure->point)}, {"dim_k1", first_failure->dim_k1},
                                      {"dim_k2", first_failure->dim_k2}, {"dim_k1_omega", first_failure->dim_k1_omega},
                                      {"max_angle", first_failure->max_angle}};
            return j;
        }));
    }

    if (plan.enabled("rank_scan")) {
        checks.push_back(guarded_block("rank_scan", [&] {
            const RankScanReport& l = leg_ranks(0);
            const RankScanReport& r = leg_ranks(1);
            json j = block("rank_scan", verdict(l.submersion && r.submersion));
            j["legs"] = {{"left", rank_json(l)}, {"right", rank_json(r)}};
            return j;
        }));
    }

    if (plan.enabled("dimension")) {
        const DimensionVerdict v = dimension_check(d);
        out.dimension = v.pass;
        json j = block("dimension", verdict(v.pass));
        j["dim_m"] = v.dim_m;
        j["dim_p1"] = v.dim_p1;
        j["dim_p2"] = v.dim_p2;
        checks.push_back(j);
        if (!v.pass)
            notes.push_back("dim M = " + std::to_string(v.dim_m) + " differs from dim P1 + dim P2 = " +
                            std::to_string(v.dim_p1 + v.dim_p2) + "; the legs cannot have symplectically complementary kernels");
    }

    if (plan.enabled("pushforward") && plan.pushforward) {
        checks.push_back(guarded_block("pushforward", [&] {
            json legs = json::object();
            bool all = true;
            for (const auto& side : plan.pushforward->legs) {
                Leg& leg = side == "left" ? d.left : d.right;
                const PushforwardReport r = pushforward_bivector(leg.map, d.structure, grid, plan.pushforward->options);
                json ranks_seen = json::object();
                for (const auto& [rank, n] : r.rank_counts) ranks_seen[std::to_string(rank)] = n;
                json l = {{"verdict", verdict(r.projectable)}, {"projectable", r.projectable},
                          {"max_variation", r.max_variation}, {"scale", r.scale},
                          {"samples", r.samples.size()}, {"preimage_shortfalls", r.preimage_shortfalls},
                          {"ranks", ranks_seen}};
                if (r.fitted) {
                    l["fitted"] = matrix_text(*r.fitted);
                    l["fit_residual"] = r.fit_residual;
                    if (!leg.bivector) {
                        leg.bivector = *r.fitted;
                        leg.bivector_inferred = true;
                        notes.push_back(side + " leg bivector inferred by pushforward");
                    }
                }
                if (!r.projectable) {
                    all = false;
                    out.not_projectable.push_back(side);
                }
                if (r.preimage_shortfalls > 0)
                    notes.push_back(side + " leg pushforward found a single preimage for " +
                                    std::to_string(r.preimage_shortfalls) + " target points");
                legs[side] = l;
            }
            json j = block("pushforward", verdict(all));
            j["legs"] = legs;
            return j;
        }));
    }

    if (plan.enabled("howe") && plan.howe) {
        const HowePlan& hp = *plan.howe;
        checks.push_back(guarded_block("howe", [&] {
            const DualPairDiagram local = hp.local_window ? localize(d, *hp.local_window) : d;
            HoweSpec spec;
            spec.space = hp.space.resolve(local.total());
            spec.left_target = hp.left_target.resolve(local.left.map.target());
            spec.right_target = hp.right_target.resolve(local.right.map.target());
            spec.kernel_tol = hp.kernel_tol.value_or(1e-9);
            spec.angle_tol = plan.angle_tol;
            const HoweReport r = howe_truncated_check(local, spec);
            out.howe = r.consistent;
            for (const HoweInclusion* inc : {&r.f2_in_f1c, &r.f1c_in_f2, &r.f1_in_f2c, &r.f2c_in_f1})
                if (!inc->holds && out.witness.empty() && !inc->witnesses.empty()) out.witness = inc->witnesses.front();

            json j = block("howe", verdict(r.consistent));
            j["truncation"] = {{"space", describe(hp.space)}, {"left_target", describe(hp.left_target)},
                               {"right_target", describe(hp.right_target)}};
            j["localized"] = hp.local_window.has_value();
            j["space_dim"] = r.space_dim;
            j["dim_f1"] = r.dim_f1;
            j["dim_f2"] = r.dim_f2;
            j["dim_f1c"] = r.dim_f1c;
            j["dim_f2c"] = r.dim_f2c;
            j["inclusions"] = {{"f2_in_f1c", inclusion_json(r.f2_in_f1c)}, {"f1c_in_f2", inclusion_json(r.f1c_in_f2)},
                               {"f1_in_f2c", inclusion_json(r.f1_in_f2c)}, {"f2c_in_f1", inclusion_json(r.f2c_in_f1)}};
            j["left_equal"] = r.left_equal;
            j["right_equal"] = r.right_equal;
            j["centralizer_f1"] = info_json(r.left_info);
            j["centralizer_f2"] = info_json(r.right_info);
            j["escaped_left"] = r.escaped_left;
            j["escaped_right"] = r.escaped_right;

            notes.push_back("Howe result is evidence at truncation only (space " + describe(hp.space) + "; targets " +
                            describe(hp.left_target) + " and " + describe(hp.right_target) + ")");
            for (const CentralizerInfo* info : {&r.left_info, &r.right_info})
                for (const auto& m : info->resonance)
                    if (m.min_abs)
                        notes.push_back("resonance margin for generator " + m.generator + ": " + fmt(*m.min_abs));
            if (!r.escaped_left.empty() || !r.escaped_right.empty())
                notes.push_back("target basis elements whose pullbacks leave the truncation were dropped");
            return j;
        }));
    }

    if (plan.enabled("leaf") && plan.leaf) {
        checks.push_back(guarded_block("leaf", [&] {
            const std::size_t total = grid.size();
            const std::size_t want = plan.leaf->points == 0 ? total : std::min(plan.leaf->points, total);
            std::map<std::string, std::size_t> pairs;  // "image_dim vs leaf_rank"
            std::size_t consistent = 0;
            bool caveat = false;
            for (std::size_t k = 0; k < want; ++k) {
                const LeafReport r = leaf_correspondence_check(d, grid.points()[k * total / want], plan.rank_tol);
                ++pairs[std::to_string(r.image_dim) + " vs " + std::to_string(r.leaf_rank)];
                caveat = caveat || r.global_caveat;
                if (r.consistent) ++consistent;
                else if (!out.leaf_mismatch) out.leaf_mismatch = std::make_pair(r.image_dim, r.leaf_rank);
            }
            json j = block("leaf", verdict(consistent == want));
            j["points"] = want;
            j["consistent"] = consistent;
            j["dimensions"] = pairs;
            j["left_bivector"] = !d.left.bivector ? "pushed forward pointwise"
                                 : d.left.bivector_inferred ? "inferred"
                                                            : "declared";
            j["global_caveat"] = caveat;
            if (caveat) notes.push_back("leaf check is pointwise; fibers are not declared connected on both legs");
            return j;
        }));
    }

    if (plan.enabled("flow_probe") && plan.flow_probe) {
        const FlowPlan& fp = *plan.flow_probe;
        checks.push_back(guarded_block("flow_probe", [&] {
            const SmoothMap& hm = c.map(fp.hamiltonian);
            const Trajectory t = integrate_hamiltonian(hm.component_field(0), d.structure, fp.start, fp.T, fp.dt);
            const double bound = 1e-6 * (1.0 + std::abs(t.initial_energy));
            bool ok = t.drift <= bound;
            json j = block("flow_probe", "pass");
            j["hamiltonian"] = fp.hamiltonian;
            j["T"] = fp.T;
            j["dt"] = fp.dt;
            j["samples"] = t.size();
            j["initial_energy"] = t.initial_energy;
            j["drift"] = t.drift;
            j["drift_bound"] = bound;
            j["end"] = vec(t.point(t.size() - 1));
            if (!fp.fiber.empty()) {
                const CoverageReport cr = fiber_coverage_probe(t, fp.fiber, fp.resolution);
                j["coverage"] = {{"coordinates", cr.coordinates}, {"resolution", cr.resolution}, {"cells", cr.cells},
                                 {"visited", cr.visited}, {"covered_fraction", cr.covered_fraction},
                                 {"max_gap", cr.max_gap}};
                if (fp.min_covered) {
                    j["coverage"]["min_covered"] = *fp.min_covered;
                    ok = ok && cr.covered_fraction >= *fp.min_covered;
                }
                notes.push_back("coverage of " + fp.hamiltonian + " flow over the fiber: " +
                                fmt(cr.covered_fraction, "%.4f") + " of " + std::to_string(cr.cells) +
                                " cells (finite-time evidence)");
            }
            j["verdict"] = verdict(ok);
            return j;
        }));
    }

    // Classification.
    std::string classification;
    std::string summary;
    if (!out.invalid_reason.empty()) {
        classification = "invalid-diagram";
        summary = "invalid diagram: " + out.invalid_reason;
    } else {
        const bool lw = out.lw.value_or(false);
        const bool howe = out.howe.value_or(false);
        const bool refuted = out.howe.has_value() && !*out.howe;
        const std::string wit = out.witness.empty() ? "" : " (witness " + out.witness + ")";
        if (lw && howe) {
            classification = "LW+Howe-consistent";
            summary = "LW and Howe-consistent at truncation";
        } else if (lw) {
            classification = "LW-only-pointwise";
            summary = refuted ? "LW, not Howe" + wit : "LW, Howe not established";
        } else if (howe) {
            classification = "Howe-consistent-not-LW";
            summary = "Howe-consistent at truncation, not LW";
        } else {
            classification = "neither";
            summary = refuted ? "neither LW nor Howe" + wit : "not LW, Howe not established";
        }
        if (!out.lw) notes.push_back("lw_scan was not run; LW is not established");
        if (out.dimension && !*out.dimension) summary += "; dimension check fails";
        if (out.leaf_mismatch)
            summary += "; leaf correspondence inconsistent (" + std::to_string(out.leaf_mismatch->first) + " vs " +
                       std::to_string(out.leaf_mismatch->second) + ")";
        for (const auto& side : out.not_projectable) summary += "; " + side + " leg not projectable";
    }
    for (const char* side : {"left", "right"}) {
        const Leg& leg = leg_of(c.diagram, side);
        if (leg.fibers_connected == FiberConnectivity::No) {
            if (classification != "invalid-diagram") summary += std::string("; fibers of ") + side + " leg declared disconnected";
            notes.push_back(std::string(side) +
                            " leg fibers declared disconnected; the passage between the LW and Howe conditions needs connected fibers");
        } else if (leg.fibers_connected == FiberConnectivity::Unknown) {
            notes.push_back(std::string(side) + " leg fiber connectivity not declared");
        }
    }
    notes.push_back("openness of the leg maps is not checked");
    std::vector<std::string> unique_notes;
    for (const auto& n : notes)
        if (std::find(unique_notes.begin(), unique_notes.end(), n) == unique_notes.end()) unique_notes.push_back(n);

    json report;
    report["version"] = config_version;
    report["tool_version"] = std::string(tool_version);
    report["config_digest"] = sha256_hex(canonical_dump(serialize(c)));
    report["diagram"] = c.diagram.name;
    json opts = json::object();
    if (options.seed) opts["seed"] = *options.seed;
    if (options.tol) opts["tol"] = *options.tol;
    report["options"] = opts;
    report["checks"] = checks;
    report["classification"] = classification;
    report["summary"] = summary;
    report["notes"] = unique_notes;
    return report;
}

}  // namespace dualpair
