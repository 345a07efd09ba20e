// kspulse: traveling-pulse analysis for the chemotaxis system with small
// cell diffusion. Subcommands map onto the library stages; all of them read
// a run configuration and write CSV/JSON into the output directory.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ks/pde.hpp"
#include "ks/phase_plane.hpp"
#include "ks/pipeline.hpp"
#include "ks/spectrum.hpp"
#include "ks/trap.hpp"

using namespace ks;
using nlohmann::json;

namespace {

struct Common {
    std::string config_path;
    std::string out_dir;
    std::string speed_override;
};

RunConfig load(const Common& c) {
    RunConfig cfg =
        c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
    if (!c.out_dir.empty()) {
        cfg.out_dir = c.out_dir;
    } else if (const char* env = std::getenv("KS_OUT_DIR")) {
        if (cfg.out_dir == "out") cfg.out_dir = env;
    }
    if (!c.speed_override.empty()) cfg.speed = c.speed_override;
    return cfg;
}

int run_stages(RunConfig cfg, std::initializer_list<const char*> stages) {
    cfg.stages.clear();
    for (const char* s : stages) cfg.stages.push_back(s);
    const PipelineResult res = run_pipeline(cfg);
    std::cout << res.report["results"].dump(2) << std::endl;
    return res.any_failed ? 1 : 0;
}

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "run configuration file");
    cmd->add_option("--out", c.out_dir, "output directory");
    cmd->add_option("--s", c.speed_override, "traveling speed or 'auto'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"traveling-pulse toolkit for the chemotaxis system"};
    app.require_subcommand(1);

    Common c;
    int samples_override = 0;
    std::string ladder_override, rho_override, mode = "both";
    double tau_override = 0.0;
    int nodes_override = 0, resolvent_samples = 0;
    std::string stages_override;

    auto* cmd_eq = app.add_subcommand("equilibria", "classify the pulse equilibria");
    add_common(cmd_eq, c);

    auto* cmd_win = app.add_subcommand("speed-window", "admissible speed window");
    add_common(cmd_win, c);

    auto* cmd_trap = app.add_subcommand("certify-trap",
                                        "build and certify the trapping region");
    add_common(cmd_trap, c);
    cmd_trap->add_option("--samples", samples_override, "samples per curve");

    auto* cmd_shoot = app.add_subcommand("shoot", "heteroclinic shot to the attractor");
    add_common(cmd_shoot, c);

    auto* cmd_cont = app.add_subcommand("continue-eps",
                                        "epsilon continuation toward the reduced orbit");
    add_common(cmd_cont, c);
    cmd_cont->add_option("--ladder", ladder_override, "comma list of epsilons");

    auto* cmd_spec = app.add_subcommand("spectrum", "tail dispersion curves");
    add_common(cmd_spec, c);
    cmd_spec->add_option("--rho", rho_override, "comma list of weights");
    cmd_spec->add_option("--tau-range", tau_override, "half width of the tau grid");

    auto* cmd_res = app.add_subcommand("resolvent-check",
                                       "diffusion-block resolvent oracle");
    add_common(cmd_res, c);
    cmd_res->add_option("--samples", resolvent_samples, "number of (lambda, f) draws");

    auto* cmd_pde = app.add_subcommand("pde-sim", "direct simulation cross-check");
    add_common(cmd_pde, c);
    cmd_pde->add_option("--nodes", nodes_override, "grid nodes");
    cmd_pde->add_option("--mode", mode, "speed|growth|both");

    auto* cmd_pipe = app.add_subcommand("pipeline", "full analysis pipeline");
    add_common(cmd_pipe, c);
    cmd_pipe->add_option("--stages", stages_override, "comma list of stages");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_eq->parsed())
            return run_stages(load(c),
                              {"model", "states", "window", "equilibria"});
        if (cmd_win->parsed())
            return run_stages(load(c), {"model", "states", "window"});
        if (cmd_trap->parsed()) {
            RunConfig cfg = load(c);
            if (samples_override > 0) cfg.samples_per_curve = samples_override;
            cfg.stages = {"model", "states", "window", "equilibria", "trap"};
            const PipelineResult res = run_pipeline(cfg);
            std::cout << res.report["results"].dump(2) << std::endl;
            return res.any_failed ? 1 : 0;
        }
        if (cmd_shoot->parsed())
            return run_stages(load(c), {"model", "states", "window",
                                        "equilibria", "trap", "shoot"});
        if (cmd_cont->parsed()) {
            RunConfig cfg = load(c);
            if (!ladder_override.empty()) {
                cfg.ladder.clear();
                std::stringstream ss(ladder_override);
                std::string item;
                while (std::getline(ss, item, ','))
                    cfg.ladder.push_back(std::stod(item));
            }
            cfg.stages = {"model",       "states", "window", "equilibria",
                          "trap",        "shoot",  "continue"};
            const PipelineResult res = run_pipeline(cfg);
            std::cout << res.report["results"].dump(2) << std::endl;
            return res.any_failed ? 1 : 0;
        }
        if (cmd_spec->parsed()) {
            RunConfig cfg = load(c);
            if (!rho_override.empty()) {
                cfg.rho_grid.clear();
                std::stringstream ss(rho_override);
                std::string item;
                while (std::getline(ss, item, ','))
                    cfg.rho_grid.push_back(std::stod(item));
            }
            if (tau_override > 0.0) cfg.tau_max = tau_override;
            cfg.stages = {"model", "states", "window", "spectrum"};
            const PipelineResult res = run_pipeline(cfg);
            std::cout << res.report["results"].dump(2) << std::endl;
            return res.any_failed ? 1 : 0;
        }
        if (cmd_res->parsed()) {
            RunConfig cfg = load(c);
            if (resolvent_samples > 0) cfg.resolvent_samples = resolvent_samples;
            cfg.stages = {"model", "states", "window", "resolvent"};
            const PipelineResult res = run_pipeline(cfg);
            std::cout << res.report["results"].dump(2) << std::endl;
            return res.any_failed ? 1 : 0;
        }
        if (cmd_pde->parsed()) {
            RunConfig cfg = load(c);
            if (nodes_override > 0) cfg.pde_nodes = nodes_override;
            cfg.pde_mode = mode;
            cfg.stages = {"model", "states", "window", "pde"};
            const PipelineResult res = run_pipeline(cfg);
            std::cout << res.report["results"].dump(2) << std::endl;
            return res.any_failed ? 1 : 0;
        }
        if (cmd_pipe->parsed()) {
            RunConfig cfg = load(c);
            if (!stages_override.empty()) {
                cfg.stages.clear();
                std::stringstream ss(stages_override);
                std::string item;
                while (std::getline(ss, item, ','))
                    cfg.stages.push_back(item);
            }
            const PipelineResult res = run_pipeline(cfg);
            std::cout << "report written to " << cfg.out_dir << "/report.json"
                      << std::endl;
            return res.any_failed ? 1 : 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return e.code() == "config-error" ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
