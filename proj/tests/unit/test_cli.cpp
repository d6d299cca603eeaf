#include "../support.hpp"

#include "dualpair/cli.hpp"
#include "dualpair/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace dualpair;
using namespace testing_support;

namespace {

json corpus_json(const std::string& name) { return json::parse(corpus_get(name)); }

/// Expects parse_config to fail with the given path and a message containing `fragment`.
void expect_error(const json& doc, const std::string& path, const std::string& fragment)
{
    try {
        parse_config(doc);
        FAIL("accepted: " << doc.dump());
    } catch (const ConfigError& e) {
        CHECK(e.path() == path);
        const std::string message = e.what();
        CAPTURE(message);
        CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
}

bool same_bivector(const BivectorField& a, const BivectorField& b)
{
    if (!(a.chart() == b.chart())) return false;
    for (std::size_t i = 0; i < a.chart().dim(); ++i)
        for (std::size_t j = 0; j < a.chart().dim(); ++j)
            if (!same(a.entry(i, j), b.entry(i, j))) return false;
    return a.parameters() == b.parameters();
}

bool same_map(const SmoothMap& a, const SmoothMap& b)
{
    if (!(a.source() == b.source()) || !(a.target() == b.target()) || a.name() != b.name()) return false;
    for (std::size_t i = 0; i < a.components().size(); ++i)
        if (!same(a.components()[i], b.components()[i])) return false;
    return a.parameters() == b.parameters();
}

bool same_leg(const Leg& a, const Leg& b)
{
    if (!same_map(a.map, b.map) || a.fibers_connected != b.fibers_connected) return false;
    if (a.bivector.has_value() != b.bivector.has_value()) return false;
    return !a.bivector || (a.bivector->name() == b.bivector->name() && same_bivector(*a.bivector, *b.bivector));
}

bool same_config(const Config& a, const Config& b)
{
    if (a.version != b.version || a.parameters != b.parameters || a.parameter_sources != b.parameter_sources) return false;
    if (a.charts != b.charts || a.bivectors.size() != b.bivectors.size() || a.maps.size() != b.maps.size()) return false;
    for (std::size_t i = 0; i < a.bivectors.size(); ++i)
        if (a.bivectors[i].name() != b.bivectors[i].name() || !same_bivector(a.bivectors[i], b.bivectors[i])) return false;
    for (std::size_t i = 0; i < a.maps.size(); ++i)
        if (!same_map(a.maps[i], b.maps[i])) return false;
    if (a.diagram.name != b.diagram.name || !same_bivector(a.diagram.structure, b.diagram.structure)) return false;
    if (!same_leg(a.diagram.left, b.diagram.left) || !same_leg(a.diagram.right, b.diagram.right)) return false;
    const AnalysisPlan& p = a.plan;
    const AnalysisPlan& q = b.plan;
    if (p.checks != q.checks || p.rank_tol != q.rank_tol || p.angle_tol != q.angle_tol || p.poisson_tol != q.poisson_tol)
        return false;
    if (p.grid.points_per_axis != q.grid.points_per_axis || p.grid.windows != q.grid.windows ||
        p.grid.include.size() != q.grid.include.size() || p.grid.jitter != q.grid.jitter || p.grid.seed != q.grid.seed)
        return false;
    if (p.howe.has_value() != q.howe.has_value() || p.flow_probe.has_value() != q.flow_probe.has_value()) return false;
    if (p.howe && (!(p.howe->space == q.howe->space) || !(p.howe->left_target == q.howe->left_target) ||
                   !(p.howe->right_target == q.howe->right_target) || p.howe->kernel_tol != q.howe->kernel_tol))
        return false;
    if (p.flow_probe && (p.flow_probe->start != q.flow_probe->start || p.flow_probe->T != q.flow_probe->T ||
                         p.flow_probe->dt != q.flow_probe->dt || p.flow_probe->fiber != q.flow_probe->fiber))
        return false;
    if (p.pushforward.has_value() != q.pushforward.has_value()) return false;
    if (p.pushforward && p.pushforward->legs != q.pushforward->legs) return false;
    return p.leaf.has_value() == q.leaf.has_value();
}

const json& check_block(const json& report, const std::string& name)
{
    for (const auto& c : report.at("checks"))
        if (c.at("name") == name) return c;
    throw std::runtime_error("no check block " + name);
}

}  // namespace

TEST_CASE("corpus listing")
{
    CHECK(corpus_names() ==
          std::vector<std::string>{"giacobbe_torus", "kronecker_t3r", "u2_momentum_r4", "t5r_block", "r4_split_symplectic"});
    try {
        corpus_get("nope");
        FAIL("no error");
    } catch (const ConfigError& e) {
        for (const auto& n : corpus_names()) CHECK(std::string(e.what()).find(n) != std::string::npos);
    }
}

TEST_CASE("corpus configs match the hand-built diagrams")
{
    const Config g = parse_config_text(corpus_get("giacobbe_torus"));
    const DualPairDiagram ref = giacobbe();
    CHECK(g.diagram.total() == ref.total());
    CHECK(same_bivector(g.diagram.structure, ref.structure));
    CHECK(same(g.diagram.right.map.components()[0], parse("2*th1")));
    CHECK(g.diagram.right.fibers_connected == FiberConnectivity::No);
    CHECK(g.plan.enabled("lw_scan"));
    REQUIRE(g.plan.howe);
    CHECK(g.plan.howe->space.frequency == 4);

    const Config k = parse_config_text(corpus_get("kronecker_t3r"));
    CHECK(k.parameters.at("l2") == std::sqrt(2.0));
    CHECK(k.parameters.at("l3") == std::sqrt(3.0));
    CHECK((k.diagram.structure(Vector::Zero(4)) - kronecker().structure(Vector::Zero(4))).isZero(0.0));

    const Config u = parse_config_text(corpus_get("u2_momentum_r4"));
    CHECK(same_map(u.diagram.right.map, u2_momentum().right.map));
    CHECK(same_bivector(*u.diagram.right.bivector, *u2_momentum().right.bivector));

    const Config t = parse_config_text(corpus_get("t5r_block"));
    CHECK(t.parameters == t5r_params());
    CHECK(!t.diagram.left.bivector);
    CHECK((t.diagram.structure(Vector::Zero(6)) - t5r_block().structure(Vector::Zero(6))).isZero(0.0));

    const Config s = parse_config_text(corpus_get("r4_split_symplectic"));
    CHECK(s.plan.checks == check_names());
}

TEST_CASE("serialization round-trips every corpus entry")
{
    for (const auto& name : corpus_names()) {
        CAPTURE(name);
        const Config a = parse_config_text(corpus_get(name));
        const json doc = serialize(a);
        const Config b = parse_config(doc);
        CHECK(same_config(a, b));
        CHECK(canonical_dump(serialize(b)) == canonical_dump(doc));
        const Config c = parse_config_text(canonical_dump(doc));
        CHECK(same_config(a, c));
    }
}

TEST_CASE("load_config reads files")
{
    const auto path = std::filesystem::temp_directory_path() / "dualpair_test_config.json";
    {
        std::ofstream out(path);
        out << corpus_get("giacobbe_torus");
    }
    const Config c = load_config(path);
    CHECK(c.diagram.name == "giacobbe_torus");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config(path), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{ not json"), ConfigError);
}

TEST_CASE("config errors carry field paths")
{
    json doc = corpus_json("giacobbe_torus");
    doc["bivectors"][0]["matrix"] = json::array({json::array({"0", "1"}), json::array({"1", "0"})});
    expect_error(doc, "bivectors[0].matrix", "antisymmetry violated at (1,0)");

    doc = corpus_json("giacobbe_torus");
    doc["maps"][1]["components"] = {"th1/2"};
    expect_error(doc, "maps[1].components", "non-integer winding");

    doc = corpus_json("giacobbe_torus");
    doc["extra"] = 1;
    expect_error(doc, "extra", "unknown field");

    doc = corpus_json("giacobbe_torus");
    doc["charts"][0]["coordinates"][0]["periodc"] = true;
    expect_error(doc, "charts[0].coordinates[0].periodc", "unknown field");

    doc = corpus_json("giacobbe_torus");
    doc.erase("maps");
    expect_error(doc, "maps", "missing required field");

    doc = corpus_json("giacobbe_torus");
    doc["maps"][0]["components"] = {"th1 +"};
    expect_error(doc, "maps[0].components[0]", "syntax error at offset 5");

    doc = corpus_json("giacobbe_torus");
    doc["maps"][0]["components"] = {"th3"};
    expect_error(doc, "maps[0].components[0]", "unknown name 'th3'");

    doc = corpus_json("giacobbe_torus");
    doc["diagram"]["left"]["map"] = "pi9";
    expect_error(doc, "diagram.left.map", "unknown map 'pi9'");

    doc = corpus_json("giacobbe_torus");
    doc["diagram"]["left"]["bivector"] = "zero_right";
    expect_error(doc, "diagram.left.bivector", "does not live on");

    doc = corpus_json("giacobbe_torus");
    doc["diagram"]["left"]["fibers_connected"] = "maybe";
    expect_error(doc, "diagram.left.fibers_connected", "expected");

    doc = corpus_json("giacobbe_torus");
    doc["version"] = 2;
    expect_error(doc, "version", "out of range");

    doc = corpus_json("kronecker_t3r");
    doc["parameters"] = {{"l1", "l2"}, {"l2", "l1"}, {"l3", "1"}};
    expect_error(doc, "parameters.l1", "cyclic");

    doc = corpus_json("kronecker_t3r");
    doc["parameters"]["l3"] = "0";
    expect_error(doc, "diagram.structure", "degenerate");

    doc = corpus_json("kronecker_t3r");
    doc["parameters"]["x"] = 1;
    expect_error(doc, "charts[0]", "clashes");

    doc = corpus_json("giacobbe_torus");
    doc["plan"]["checks"] = {"lw_scan", "bogus"};
    expect_error(doc, "plan.checks[1]", "unknown check");

    doc = corpus_json("giacobbe_torus");
    doc["plan"]["checks"] = {"lw_scan"};
    expect_error(doc, "plan.howe", "not enabled");

    doc = corpus_json("giacobbe_torus");
    doc["plan"].erase("howe");
    expect_error(doc, "plan.howe", "missing required field");

    doc = corpus_json("giacobbe_torus");
    doc["plan"]["howe"]["space"]["frequency"] = -1;
    expect_error(doc, "plan.howe.space.frequency", "out of range");

    doc = corpus_json("giacobbe_torus");
    doc["plan"]["howe"]["space"]["overrides"] = {{"zz", 1}};
    expect_error(doc, "plan.howe.space", "unknown coordinate");

    doc = corpus_json("kronecker_t3r");
    doc["plan"]["flow_probe"]["dt"] = 0;
    expect_error(doc, "plan.flow_probe.dt", "positive");

    doc = corpus_json("kronecker_t3r");
    doc["plan"]["flow_probe"]["fiber"] = {"x"};
    expect_error(doc, "plan.flow_probe.fiber[0]", "not a periodic coordinate");

    doc = corpus_json("kronecker_t3r");
    doc["plan"]["grid"]["windows"] = {{"th1", {0, 1}}};
    expect_error(doc, "plan.grid.windows.th1", "non-periodic");

    doc = corpus_json("u2_momentum_r4");
    doc["plan"]["tolerances"] = {{"rank", -1}};
    expect_error(doc, "plan.tolerances.rank", "positive");

    doc = corpus_json("u2_momentum_r4");
    doc["plan"]["grid"]["include"] = {{0, 0, 0}};
    expect_error(doc, "plan.grid.include[0]", "expected 4 coordinates");
}

TEST_CASE("parameters may be numbers or expressions")
{
    json doc = corpus_json("kronecker_t3r");
    doc["parameters"] = {{"l1", 1}, {"l2", "sqrt(2)"}, {"l3", "l2*l2/2 + 1"}};
    const Config c = parse_config(doc);
    CHECK(c.parameters.at("l3") == doctest::Approx(2.0));
    CHECK(c.parameter_sources.size() == 3);
    CHECK(same_config(c, parse_config(serialize(c))));
}

TEST_CASE("canonical dump and digest")
{
    json j = {{"b", 0.1}, {"a", {1, 2.5, nullptr}}, {"c", std::nan("")}, {"d", json::object()}, {"e", "x\"y"}};
    CHECK(canonical_dump(j) ==
          "{\n  \"a\": [\n    1,\n    2.5,\n    null\n  ],\n  \"b\": 0.10000000000000001,\n  \"c\": null,\n"
          "  \"d\": {},\n  \"e\": \"x\\\"y\"\n}\n");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("corpus reports")
{
    const json g = run_plan(parse_config_text(corpus_get("giacobbe_torus")));
    CHECK(g.at("classification") == "LW-only-pointwise");
    CHECK(g.at("summary") == "LW, not Howe (witness cos(th1)); fibers of right leg declared disconnected");
    CHECK(check_block(g, "lw_scan").at("passed") == 49);
    CHECK(check_block(g, "howe").at("inclusions").at("f1c_in_f2").at("witnesses")[0] == "cos(th1)");
    CHECK(g.at("config_digest").get<std::string>().size() == 64);

    const json u = run_plan(parse_config_text(corpus_get("u2_momentum_r4")));
    CHECK(u.at("classification") == "Howe-consistent-not-LW");
    const json& ranks = check_block(u, "rank_scan").at("legs").at("left").at("ranks");
    CHECK(ranks.size() == 2);
    CHECK(ranks.contains("0"));
    CHECK(ranks.contains("1"));
    const json& howe = check_block(u, "howe");
    CHECK(howe.at("left_equal") == true);
    CHECK(howe.at("right_equal") == true);

    const json s = run_plan(parse_config_text(corpus_get("r4_split_symplectic")));
    CHECK(s.at("classification") == "LW+Howe-consistent");
    for (const auto& c : s.at("checks")) {
        CAPTURE(c.at("name"));
        CHECK(c.at("verdict") == "pass");
    }
}

TEST_CASE("reports are deterministic and honour overrides")
{
    const Config c = parse_config_text(corpus_get("u2_momentum_r4"));
    const std::string a = canonical_dump(run_plan(c));
    const std::string b = canonical_dump(run_plan(c));
    CHECK(a == b);
    const json r = run_plan(c, RunOptions{std::uint64_t{5}, 1e-10});
    CHECK(r.at("options").at("seed") == 5);
    CHECK(r.at("classification") == json::parse(a).at("classification"));
}

TEST_CASE("invalid diagrams are classified, not rejected")
{
    json doc = corpus_json("u2_momentum_r4");
    // a declared target structure that the leg does not respect
    doc["bivectors"][2]["matrix"] = {{"0", "z12", "-z21", "0"},
                                     {"-z12", "0", "-(z22 - z11)", "z12"},
                                     {"z21", "z22 - z11", "0", "-z21"},
                                     {"0", "-z12", "z21", "0"}};
    const json r = run_plan(parse_config(doc));
    CHECK(r.at("classification") == "invalid-diagram");
    CHECK(check_block(r, "poisson_maps").at("verdict") == "fail");
}
