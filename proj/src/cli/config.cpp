#include "dualpair/cli.hpp"

#include "dualpair/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dualpair {

namespace {

// A JSON value together with its location in the document.
struct Node {
    const json& j;
    std::string path;

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path, msg); }

    Node at(const char* key) const
    {
        if (!j.is_object()) fail("expected an object");
        auto it = j.find(key);
        if (it == j.end()) throw ConfigError(join(key), "missing required field");
        return {*it, join(key)};
    }
    Node at(std::size_t i) const { return {j.at(i), path + "[" + std::to_string(i) + "]"}; }
    bool has(const char* key) const { return j.is_object() && j.contains(key) && !j.at(key).is_null(); }
    std::string join(const std::string& key) const { return path.empty() ? key : path + "." + key; }

    void only(std::initializer_list<const char*> keys) const
    {
        if (!j.is_object()) fail("expected an object");
        for (const auto& [k, v] : j.items()) {
            bool known = false;
            for (const char* allowed : keys) known = known || k == allowed;
            if (!known) throw ConfigError(join(k), "unknown field");
        }
    }

    const json& array() const
    {
        if (!j.is_array()) fail("expected an array");
        return j;
    }
    std::size_t size() const { return array().size(); }

    std::string str() const
    {
        if (!j.is_string()) fail("expected a string");
        return j.get<std::string>();
    }
    double number() const
    {
        if (!j.is_number()) fail("expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail("expected a finite number");
        return v;
    }
    long long integer(long long lo, long long hi) const
    {
        if (!j.is_number_integer() && !j.is_number_unsigned()) fail("expected an integer");
        const long long v = j.get<long long>();
        if (v < lo || v > hi) fail("value " + std::to_string(v) + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return v;
    }
    bool boolean() const
    {
        if (!j.is_boolean()) fail("expected true or false");
        return j.get<bool>();
    }
    /// An expression given as text or as a plain number.
    Expr expr() const
    {
        if (j.is_number()) return Expr::number(number());
        try {
            return parse(str());
        } catch (const ParseError& e) {
            fail(e.what());
        }
    }
    double positive(bool allow_zero = false) const
    {
        const double v = number();
        if (allow_zero ? v < 0.0 : v <= 0.0) fail(allow_zero ? "must be non-negative" : "must be positive");
        return v;
    }
};

template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

double scalar(const Node& n, const Environment& params)
{
    const Expr e = n.expr();
    return guarded(n.path, [&] {
        for (const auto& name : free_names(e))
            if (!params.count(name)) throw ConfigError(n.path, "unknown name '" + name + "'");
        const double v = eval(e, params);
        if (!std::isfinite(v)) throw ConfigError(n.path, "value is not finite");
        return v;
    });
}

std::string expr_text(const Node& n)
{
    if (n.j.is_number()) return format_number(n.number());
    (void)n.expr();
    return n.str();
}

void check_name(const Node& n, const std::string& name)
{
    static const std::set<std::string> reserved{"pi", "sin", "cos", "exp", "sqrt", "log"};
    bool ok = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
    for (char ch : name) ok = ok && (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_');
    if (!ok || reserved.count(name)) n.fail("invalid name '" + name + "'");
}

Environment load_parameters(const Node& n, std::vector<std::pair<std::string, std::string>>& sources)
{
    if (!n.j.is_object()) n.fail("expected an object");
    std::vector<std::pair<std::string, Expr>> pending;
    for (const auto& [name, v] : n.j.items()) {
        const Node item{v, n.join(name)};
        check_name(item, name);
        sources.emplace_back(name, expr_text(item));
        pending.emplace_back(name, item.expr());
    }
    Environment env;
    // Parameters may refer to each other; resolve in dependency order.
    while (!pending.empty()) {
        bool progress = false;
        for (auto it = pending.begin(); it != pending.end();) {
            bool ready = true;
            for (const auto& f : free_names(it->second)) ready = ready && env.count(f);
            if (!ready) {
                ++it;
                continue;
            }
            const std::string path = n.join(it->first);
            const double v = guarded(path, [&] { return eval(it->second, env); });
            if (!std::isfinite(v)) throw ConfigError(path, "value is not finite");
            env[it->first] = v;
            it = pending.erase(it);
            progress = true;
        }
        if (!progress)
            throw ConfigError(n.join(pending.front().first), "unresolved or cyclic reference in '" +
                                                                  to_string(pending.front().second) + "'");
    }
    return env;
}

Chart load_chart(const Node& n)
{
    n.only({"name", "coordinates"});
    const std::string name = n.at("name").str();
    const Node cs = n.at("coordinates");
    std::vector<Coordinate> coords;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const Node c = cs.at(i);
        c.only({"name", "periodic", "bounds"});
        Coordinate k;
        k.name = c.at("name").str();
        if (c.has("periodic")) k.periodic = c.at("periodic").boolean();
        if (c.has("bounds")) {
            const Node b = c.at("bounds");
            if (b.size() != 2) b.fail("expected [lo, hi]");
            k.bounds = std::make_pair(b.at(std::size_t{0}).number(), b.at(std::size_t{1}).number());
        }
        coords.push_back(std::move(k));
    }
    return guarded(n.path, [&] { return Chart(name, std::move(coords)); });
}

template <class T>
const T& find_named(const std::vector<T>& items, const Node& ref, const char* kind)
{
    const std::string name = ref.str();
    for (const auto& it : items)
        if (it.name() == name) return it;
    ref.fail(std::string("unknown ") + kind + " '" + name + "'");
}

void check_names_against(const Node& n, const Environment& params, const Chart& chart, const Expr& e)
{
    for (const auto& name : free_names(e))
        if (!params.count(name) && !chart.index_of(name))
            n.fail("unknown name '" + name + "' (neither a coordinate of '" + chart.name() + "' nor a parameter)");
}

BivectorField load_bivector(const Node& n, const std::vector<Chart>& charts, const Environment& params)
{
    n.only({"name", "chart", "matrix"});
    const std::string name = n.at("name").str();
    const Chart& chart = find_named(charts, n.at("chart"), "chart");
    const Node m = n.at("matrix");
    if (m.size() != chart.dim()) m.fail("expected " + std::to_string(chart.dim()) + " rows");
    std::vector<std::vector<Expr>> rows;
    for (std::size_t i = 0; i < chart.dim(); ++i) {
        const Node r = m.at(i);
        if (r.size() != chart.dim()) r.fail("expected " + std::to_string(chart.dim()) + " entries");
        std::vector<Expr> row;
        for (std::size_t j = 0; j < chart.dim(); ++j) {
            const Node e = r.at(j);
            row.push_back(e.expr());
            check_names_against(e, params, chart, row.back());
        }
        rows.push_back(std::move(row));
    }
    return guarded(m.path, [&] { return BivectorField(name, chart, std::move(rows), params); });
}

SmoothMap load_map(const Node& n, const std::vector<Chart>& charts, const Environment& params)
{
    n.only({"name", "source", "target", "components"});
    const std::string name = n.at("name").str();
    const Chart& src = find_named(charts, n.at("source"), "chart");
    const Chart& tgt = find_named(charts, n.at("target"), "chart");
    const Node cs = n.at("components");
    if (cs.size() != tgt.dim()) cs.fail("expected " + std::to_string(tgt.dim()) + " components");
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        comps.push_back(cs.at(i).expr());
        check_names_against(cs.at(i), params, src, comps.back());
    }
    return guarded(cs.path, [&] { return SmoothMap(name, src, tgt, std::move(comps), params); });
}

FiberConnectivity connectivity(const Node& n)
{
    const std::string s = n.str();
    if (s == "yes") return FiberConnectivity::Yes;
    if (s == "no") return FiberConnectivity::No;
    if (s == "unknown") return FiberConnectivity::Unknown;
    n.fail("expected \"yes\", \"no\" or \"unknown\"");
}

Vector reference_point(const Chart& c)
{
    Vector p = Vector::Zero(static_cast<Index>(c.dim()));
    for (std::size_t i = 0; i < c.dim(); ++i)
        if (const auto& b = c.coordinate(i).bounds) p[static_cast<Index>(i)] = 0.5 * (b->first + b->second);
    return p;
}

Leg load_leg(const Node& n, const Config& c, const Chart& total)
{
    n.only({"map", "bivector", "fibers_connected"});
    Leg leg;
    leg.map = find_named(c.maps, n.at("map"), "map");
    if (!(leg.map.source() == total))
        n.at("map").fail("map '" + leg.map.name() + "' does not start on '" + total.name() + "'");
    if (n.has("bivector")) {
        leg.bivector = find_named(c.bivectors, n.at("bivector"), "bivector");
        if (!(leg.bivector->chart() == leg.map.target()))
            n.at("bivector").fail("bivector '" + leg.bivector->name() + "' does not live on '" +
                                  leg.map.target().name() + "'");
    }
    if (n.has("fibers_connected")) leg.fibers_connected = connectivity(n.at("fibers_connected"));
    return leg;
}

Truncation load_truncation(const Node& n)
{
    n.only({"frequency", "degree", "total_degree", "overrides"});
    Truncation t;
    if (n.has("frequency")) t.frequency = static_cast<int>(n.at("frequency").integer(0, 64));
    if (n.has("degree")) t.degree = static_cast<int>(n.at("degree").integer(0, 64));
    if (n.has("total_degree")) t.total_degree = static_cast<int>(n.at("total_degree").integer(0, 256));
    if (n.has("overrides")) {
        const Node o = n.at("overrides");
        if (!o.j.is_object()) o.fail("expected an object");
        for (const auto& [k, v] : o.j.items()) t.overrides[k] = static_cast<int>(Node{v, o.join(k)}.integer(0, 64));
    }
    return t;
}

std::pair<double, double> interval(const Node& n)
{
    if (n.size() != 2) n.fail("expected [lo, hi]");
    const double lo = n.at(std::size_t{0}).number();
    const double hi = n.at(std::size_t{1}).number();
    if (!(lo < hi)) n.fail("empty interval");
    return {lo, hi};
}

void resolve_truncation(const Node& n, const Truncation& t, const Chart& chart)
{
    guarded(n.path, [&] {
        const std::size_t dim = basis_dimension(chart, t.resolve(chart));
        if (dim > 200000) throw ConfigError(n.path, "truncation of dimension " + std::to_string(dim) + " is too large");
        return 0;
    });
}

AnalysisPlan load_plan(const Node& n, const Config& c)
{
    n.only({"grid", "tolerances", "checks", "pushforward", "howe", "leaf", "flow_probe"});
    const Chart& total = c.diagram.total();
    AnalysisPlan p;

    if (n.has("grid")) {
        const Node g = n.at("grid");
        g.only({"points_per_axis", "windows", "include", "jitter", "seed"});
        if (g.has("points_per_axis")) p.grid.points_per_axis = static_cast<std::size_t>(g.at("points_per_axis").integer(1, 1000));
        if (g.has("windows")) {
            const Node w = g.at("windows");
            if (!w.j.is_object()) w.fail("expected an object");
            for (const auto& [k, v] : w.j.items()) {
                const Node item{v, w.join(k)};
                auto i = total.index_of(k);
                if (!i || total.coordinate(*i).periodic) item.fail("'" + k + "' is not a non-periodic coordinate of '" + total.name() + "'");
                p.grid.windows[k] = interval(item);
            }
        }
        if (g.has("include")) {
            const Node inc = g.at("include");
            for (std::size_t k = 0; k < inc.size(); ++k) {
                const Node pt = inc.at(k);
                if (pt.size() != total.dim()) pt.fail("expected " + std::to_string(total.dim()) + " coordinates");
                Vector v(static_cast<Index>(total.dim()));
                for (std::size_t i = 0; i < total.dim(); ++i) v[static_cast<Index>(i)] = scalar(pt.at(i), c.parameters);
                if (!total.contains(v)) pt.fail("point outside chart '" + total.name() + "'");
                p.grid.include.push_back(std::move(v));
            }
        }
        if (g.has("jitter")) {
            p.grid.jitter = g.at("jitter").positive(true);
            if (p.grid.jitter >= 0.5) g.at("jitter").fail("must be below 0.5");
        }
        if (g.has("seed")) p.grid.seed = static_cast<std::uint64_t>(g.at("seed").integer(0, (1LL << 53)));
        std::size_t total_points = 1;
        for (std::size_t i = 0; i < total.dim(); ++i) {
            total_points *= p.grid.points_per_axis;
            if (total_points > 2'000'000) g.fail("grid has too many points");
        }
    }
    if (n.has("tolerances")) {
        const Node t = n.at("tolerances");
        t.only({"rank", "angle", "poisson"});
        if (t.has("rank")) p.rank_tol = t.at("rank").positive();
        if (t.has("angle")) p.angle_tol = t.at("angle").positive();
        if (t.has("poisson")) p.poisson_tol = t.at("poisson").positive();
    }

    const Node checks = n.at("checks");
    std::set<std::string> enabled;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const std::string name = checks.at(i).str();
        if (std::find(check_names().begin(), check_names().end(), name) == check_names().end())
            checks.at(i).fail("unknown check '" + name + "'");
        if (!enabled.insert(name).second) checks.at(i).fail("duplicate check '" + name + "'");
    }
    for (const auto& name : check_names())
        if (enabled.count(name)) p.checks.push_back(name);

    auto block = [&](const char* key) -> std::optional<Node> {
        if (!n.has(key)) return std::nullopt;
        if (!enabled.count(key)) n.at(key).fail("parameters given for a check that is not enabled");
        return n.at(key);
    };

    if (auto b = block("pushforward")) {
        b->only({"legs", "fiber_samples", "target_points", "tol", "seed"});
        PushforwardPlan pf;
        if (b->has("legs")) {
            pf.legs.clear();
            const Node legs = b->at("legs");
            for (std::size_t i = 0; i < legs.size(); ++i) {
                const std::string leg = legs.at(i).str();
                if (leg != "left" && leg != "right") legs.at(i).fail("expected \"left\" or \"right\"");
                if (std::find(pf.legs.begin(), pf.legs.end(), leg) != pf.legs.end()) legs.at(i).fail("duplicate leg");
                pf.legs.push_back(leg);
            }
        }
        if (b->has("fiber_samples")) pf.options.fiber_samples = static_cast<std::size_t>(b->at("fiber_samples").integer(1, 64));
        if (b->has("target_points")) pf.options.target_points = static_cast<std::size_t>(b->at("target_points").integer(1, 10000));
        if (b->has("tol")) pf.options.tol = b->at("tol").positive();
        if (b->has("seed")) pf.options.seed = static_cast<std::uint64_t>(b->at("seed").integer(0, (1LL << 53)));
        p.pushforward = pf;
    } else if (enabled.count("pushforward")) {
        p.pushforward = PushforwardPlan{};
    }

    if (auto b = block("howe")) {
        b->only({"space", "left_target", "right_target", "kernel_tol", "local_window"});
        HowePlan h;
        h.space = load_truncation(b->at("space"));
        h.left_target = load_truncation(b->at("left_target"));
        h.right_target = load_truncation(b->at("right_target"));
        if (b->has("kernel_tol")) h.kernel_tol = b->at("kernel_tol").positive();
        if (b->has("local_window")) {
            const Node w = b->at("local_window");
            if (!w.j.is_object()) w.fail("expected an object");
            std::map<std::string, std::pair<double, double>, std::less<>> win;
            for (const auto& [k, v] : w.j.items()) win[k] = interval(Node{v, w.join(k)});
            h.local_window = win;
        }
        DualPairDiagram d = c.diagram;
        if (h.local_window) d = guarded(b->at("local_window").path, [&] { return localize(c.diagram, *h.local_window); });
        resolve_truncation(b->at("space"), h.space, d.total());
        resolve_truncation(b->at("left_target"), h.left_target, d.left.map.target());
        resolve_truncation(b->at("right_target"), h.right_target, d.right.map.target());
        p.howe = h;
    } else if (enabled.count("howe")) {
        throw ConfigError(n.join("howe"), "missing required field");
    }

    if (auto b = block("leaf")) {
        b->only({"points"});
        LeafPlan l;
        if (b->has("points")) l.points = static_cast<std::size_t>(b->at("points").integer(0, 10'000'000));
        p.leaf = l;
    } else if (enabled.count("leaf")) {
        p.leaf = LeafPlan{};
    }

    if (auto b = block("flow_probe")) {
        b->only({"hamiltonian", "start", "T", "dt", "fiber", "resolution", "min_covered"});
        FlowPlan f;
        const Node hn = b->at("hamiltonian");
        f.hamiltonian = hn.str();
        const SmoothMap& h = find_named(c.maps, hn, "map");
        if (!(h.source() == total)) hn.fail("map '" + f.hamiltonian + "' does not start on '" + total.name() + "'");
        if (h.target().dim() != 1) hn.fail("map '" + f.hamiltonian + "' is not scalar");
        const Node st = b->at("start");
        if (st.size() != total.dim()) st.fail("expected " + std::to_string(total.dim()) + " coordinates");
        f.start.resize(static_cast<Index>(total.dim()));
        for (std::size_t i = 0; i < total.dim(); ++i) f.start[static_cast<Index>(i)] = scalar(st.at(i), c.parameters);
        if (!total.contains(total.wrap(f.start))) st.fail("start outside chart '" + total.name() + "'");
        f.T = b->at("T").positive();
        f.dt = b->at("dt").positive();
        if (f.T < f.dt) b->at("T").fail("T must be at least dt");
        if (f.T / f.dt > 5e7) b->at("T").fail("too many steps");
        if (b->has("fiber")) {
            const Node fb = b->at("fiber");
            for (std::size_t i = 0; i < fb.size(); ++i) {
                const std::string name = fb.at(i).str();
                auto k = total.index_of(name);
                if (!k || !total.coordinate(*k).periodic) fb.at(i).fail("'" + name + "' is not a periodic coordinate");
                f.fiber.push_back(name);
            }
        }
        if (b->has("resolution")) f.resolution = static_cast<std::size_t>(b->at("resolution").integer(1, 1000));
        if (b->has("min_covered")) {
            f.min_covered = b->at("min_covered").positive(true);
            if (*f.min_covered > 1.0) b->at("min_covered").fail("must be at most 1");
        }
        p.flow_probe = f;
    } else if (enabled.count("flow_probe")) {
        throw ConfigError(n.join("flow_probe"), "missing required field");
    }
    return p;
}

json truncation_json(const Truncation& t)
{
    json j = {{"frequency", t.frequency}, {"degree", t.degree}};
    if (t.total_degree) j["total_degree"] = *t.total_degree;
    if (!t.overrides.empty()) {
        json o = json::object();
        for (const auto& [k, v] : t.overrides) o[k] = v;
        j["overrides"] = o;
    }
    return j;
}

json vector_json(const Vector& v)
{
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

}  // namespace

BasisSpec Truncation::resolve(const Chart& chart) const
{
    BasisSpec s = BasisSpec::uniform(chart, frequency, degree, total_degree);
    for (const auto& [name, v] : overrides) {
        auto i = chart.index_of(name);
        if (!i) throw InvariantError("truncation override for unknown coordinate '" + name + "'");
        if (chart.coordinate(*i).periodic) s.frequency[name] = v;
        else s.degree[name] = v;
    }
    return s;
}

bool AnalysisPlan::enabled(std::string_view check) const
{
    return std::find(checks.begin(), checks.end(), check) != checks.end();
}

const SmoothMap& Config::map(std::string_view name) const
{
    for (const auto& m : maps)
        if (m.name() == name) return m;
    throw ConfigError("maps", "unknown map '" + std::string(name) + "'");
}

const std::vector<std::string>& check_names()
{
    static const std::vector<std::string> names{"poisson_maps", "lw_scan", "rank_scan", "dimension",
                                                "pushforward",  "howe",    "leaf",      "flow_probe"};
    return names;
}

Config parse_config(const json& doc)
{
    const Node root{doc, ""};
    root.only({"version", "parameters", "charts", "bivectors", "maps", "diagram", "plan"});
    Config c;
    c.version = static_cast<int>(root.at("version").integer(config_version, config_version));
    if (root.has("parameters")) c.parameters = load_parameters(root.at("parameters"), c.parameter_sources);

    const Node charts = root.at("charts");
    for (std::size_t i = 0; i < charts.size(); ++i) {
        Chart ch = load_chart(charts.at(i));
        for (const auto& other : c.charts)
            if (other.name() == ch.name()) charts.at(i).at("name").fail("duplicate chart '" + ch.name() + "'");
        for (const auto& name : ch.names())
            if (c.parameters.count(name))
                charts.at(i).fail("coordinate '" + name + "' clashes with a parameter of the same name");
        c.charts.push_back(std::move(ch));
    }

    if (root.has("bivectors")) {
        const Node bs = root.at("bivectors");
        for (std::size_t i = 0; i < bs.size(); ++i) {
            BivectorField b = load_bivector(bs.at(i), c.charts, c.parameters);
            for (const auto& other : c.bivectors)
                if (other.name() == b.name()) bs.at(i).at("name").fail("duplicate bivector '" + b.name() + "'");
            c.bivectors.push_back(std::move(b));
        }
    }
    const Node ms = root.at("maps");
    for (std::size_t i = 0; i < ms.size(); ++i) {
        SmoothMap m = load_map(ms.at(i), c.charts, c.parameters);
        for (const auto& other : c.maps)
            if (other.name() == m.name()) ms.at(i).at("name").fail("duplicate map '" + m.name() + "'");
        c.maps.push_back(std::move(m));
    }

    const Node d = root.at("diagram");
    d.only({"name", "structure", "left", "right"});
    c.diagram.name = d.at("name").str();
    c.diagram.structure = find_named(c.bivectors, d.at("structure"), "bivector");
    const Chart& total = c.diagram.total();
    if (c.diagram.structure.is_constant() && !is_nondegenerate(c.diagram.structure(reference_point(total))))
        d.at("structure").fail("bivector '" + c.diagram.structure.name() + "' is degenerate");
    c.diagram.left = load_leg(d.at("left"), c, total);
    c.diagram.right = load_leg(d.at("right"), c, total);

    c.plan = load_plan(root.at("plan"), c);
    return c;
}

Config parse_config_text(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

Config load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json serialize(const Config& c)
{
    json doc;
    doc["version"] = c.version;
    json params = json::object();
    for (const auto& [name, text] : c.parameter_sources) params[name] = text;
    doc["parameters"] = params;

    json charts = json::array();
    for (const auto& ch : c.charts) {
        json coords = json::array();
        for (const auto& k : ch.coordinates()) {
            json e = {{"name", k.name}, {"periodic", k.periodic}};
            if (k.bounds) e["bounds"] = {k.bounds->first, k.bounds->second};
            coords.push_back(e);
        }
        charts.push_back({{"name", ch.name()}, {"coordinates", coords}});
    }
    doc["charts"] = charts;

    json bivs = json::array();
    for (const auto& b : c.bivectors) {
        json rows = json::array();
        for (const auto& r : b.entries()) {
            json row = json::array();
            for (const auto& e : r) row.push_back(to_string(e));
            rows.push_back(row);
        }
        bivs.push_back({{"name", b.name()}, {"chart", b.chart().name()}, {"matrix", rows}});
    }
    doc["bivectors"] = bivs;

    json maps = json::array();
    for (const auto& m : c.maps) {
        json comps = json::array();
        for (const auto& e : m.components()) comps.push_back(to_string(e));
        maps.push_back({{"name", m.name()}, {"source", m.source().name()}, {"target", m.target().name()}, {"components", comps}});
    }
    doc["maps"] = maps;

    auto leg = [](const Leg& l) {
        json j = {{"map", l.map.name()}, {"fibers_connected", to_string(l.fibers_connected)}};
        if (l.bivector) j["bivector"] = l.bivector->name();
        return j;
    };
    doc["diagram"] = {{"name", c.diagram.name},
                      {"structure", c.diagram.structure.name()},
                      {"left", leg(c.diagram.left)},
                      {"right", leg(c.diagram.right)}};

    const AnalysisPlan& p = c.plan;
    json plan;
    json grid = {{"points_per_axis", p.grid.points_per_axis}, {"jitter", p.grid.jitter}, {"seed", p.grid.seed}};
    if (!p.grid.windows.empty()) {
        json w = json::object();
        for (const auto& [k, v] : p.grid.windows) w[k] = {v.first, v.second};
        grid["windows"] = w;
    }
    if (!p.grid.include.empty()) {
        json inc = json::array();
        for (const auto& v : p.grid.include) inc.push_back(vector_json(v));
        grid["include"] = inc;
    }
    plan["grid"] = grid;
    plan["tolerances"] = {{"rank", p.rank_tol}, {"angle", p.angle_tol}, {"poisson", p.poisson_tol}};
    plan["checks"] = p.checks;
    if (p.pushforward) {
        const auto& o = p.pushforward->options;
        plan["pushforward"] = {{"legs", p.pushforward->legs},
                               {"fiber_samples", o.fiber_samples},
                               {"target_points", o.target_points},
                               {"tol", o.tol},
                               {"seed", o.seed}};
    }
    if (p.howe) {
        json h = {{"space", truncation_json(p.howe->space)},
                  {"left_target", truncation_json(p.howe->left_target)},
                  {"right_target", truncation_json(p.howe->right_target)}};
        if (p.howe->kernel_tol) h["kernel_tol"] = *p.howe->kernel_tol;
        if (p.howe->local_window) {
            json w = json::object();
            for (const auto& [k, v] : *p.howe->local_window) w[k] = {v.first, v.second};
            h["local_window"] = w;
        }
        plan["howe"] = h;
    }
    if (p.leaf) plan["leaf"] = {{"points", p.leaf->points}};
    if (p.flow_probe) {
        const FlowPlan& f = *p.flow_probe;
        json j = {{"hamiltonian", f.hamiltonian}, {"start", vector_json(f.start)}, {"T", f.T},
                  {"dt", f.dt}, {"resolution", f.resolution}};
        if (!f.fiber.empty()) j["fiber"] = f.fiber;
        if (f.min_covered) j["min_covered"] = *f.min_covered;
        plan["flow_probe"] = j;
    }
    doc["plan"] = plan;
    return doc;
}

}  // namespace dualpair
