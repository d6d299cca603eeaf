#include "dualpair/cli.hpp"
#include "dualpair/error.hpp"
#include "dualpair/flows.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace dualpair;

namespace {

void emit(const std::string& text, const std::string& path)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("write to '" + path + "' failed");
}

RunOptions run_options(const std::optional<std::uint64_t>& seed, const std::optional<double>& tol)
{
    RunOptions o;
    o.seed = seed;
    if (tol) {
        if (!(*tol > 0.0)) throw ConfigError("--tol", "must be positive");
        o.tol = tol;
    }
    return o;
}

int flow(const Config& c, const std::string& hamiltonian, double T, double dt, const std::vector<double>& start,
         const std::string& dump)
{
    const SmoothMap& h = c.map(hamiltonian);
    const Chart& total = c.diagram.total();
    if (!(h.source() == total)) throw ConfigError("--hamiltonian", "map '" + hamiltonian + "' does not start on '" + total.name() + "'");
    if (h.target().dim() != 1) throw ConfigError("--hamiltonian", "map '" + hamiltonian + "' is not scalar");

    Vector x = Vector::Zero(static_cast<Index>(total.dim()));
    if (!start.empty()) {
        if (start.size() != total.dim()) throw ConfigError("--start", "expected " + std::to_string(total.dim()) + " values");
        for (std::size_t i = 0; i < start.size(); ++i) x[static_cast<Index>(i)] = start[i];
    } else if (c.plan.flow_probe && c.plan.flow_probe->hamiltonian == hamiltonian) {
        x = c.plan.flow_probe->start;
    } else {
        for (std::size_t i = 0; i < total.dim(); ++i)
            if (const auto& b = total.coordinate(i).bounds) x[static_cast<Index>(i)] = 0.5 * (b->first + b->second);
    }

    const Trajectory t = integrate_hamiltonian(h.component_field(0), c.diagram.structure, x, T, dt);
    json summary = {{"hamiltonian", hamiltonian}, {"T", T}, {"dt", dt}, {"samples", t.size()},
                    {"initial_energy", t.initial_energy}, {"drift", t.drift}};
    json end = json::array();
    const Vector last = t.point(t.size() - 1);
    for (Index i = 0; i < last.size(); ++i) end.push_back(last[i]);
    summary["end"] = end;
    if (!dump.empty()) {
        std::ofstream out(dump);
        if (!out) throw Error("cannot write '" + dump + "'");
        write_trajectory(out, t);
        summary["dump"] = dump;
    }
    std::cout << canonical_dump(summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dual pair diagnostics for diagrams of Poisson maps"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;

    CLI::App* check = app.add_subcommand("check", "Run the analysis plan of a config and print the report");
    check->add_option("config", config_path, "Config file")->required();
    check->add_option("--out", out_path, "Write the report to this file");
    check->add_option("--seed", seed, "Override grid and sampling seeds");
    check->add_option("--tol", tol, "Override rank and kernel tolerances");

    CLI::App* corpus = app.add_subcommand("corpus", "Built-in example diagrams");
    corpus->require_subcommand(1);
    corpus->add_subcommand("list", "List corpus entries");
    std::string entry;
    CLI::App* show = corpus->add_subcommand("show", "Print a corpus config");
    show->add_option("name", entry)->required();
    CLI::App* run = corpus->add_subcommand("run", "Run a corpus entry and print the report");
    run->add_option("name", entry)->required();
    run->add_option("--out", out_path, "Write the report to this file");
    run->add_option("--seed", seed, "Override grid and sampling seeds");
    run->add_option("--tol", tol, "Override rank and kernel tolerances");

    CLI::App* flow_cmd = app.add_subcommand("flow", "Integrate a Hamiltonian flow on the total space");
    std::string hamiltonian;
    double T = 0.0;
    double dt = 0.0;
    std::string dump;
    std::vector<double> start;
    flow_cmd->add_option("config", config_path, "Config file")->required();
    flow_cmd->add_option("--hamiltonian", hamiltonian, "Name of a scalar map")->required();
    flow_cmd->add_option("--T", T, "Final time")->required();
    flow_cmd->add_option("--dt", dt, "Step size")->required();
    flow_cmd->add_option("--dump", dump, "Write the trajectory to this file");
    flow_cmd->add_option("--start", start, "Start point")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (check->parsed()) {
            const Config c = load_config(config_path);
            emit(canonical_dump(run_plan(c, run_options(seed, tol))), out_path);
        } else if (corpus->got_subcommand("list")) {
            for (const auto& n : corpus_names()) std::cout << n << '\n';
        } else if (show->parsed()) {
            std::cout << corpus_get(entry);
        } else if (run->parsed()) {
            const Config c = parse_config_text(corpus_get(entry));
            emit(canonical_dump(run_plan(c, run_options(seed, tol))), out_path);
        } else if (flow_cmd->parsed()) {
            return flow(load_config(config_path), hamiltonian, T, dt, start, dump);
        }
    } catch (const ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return 1;
    } catch (const InvariantError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
