// Run configuration: flat INI-style key/value sections, one level deep.
// Parse failures carry the offending line number.

#ifndef KS_CONFIG_HPP
#define KS_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "ks/common.hpp"

namespace ks {

struct RunConfig {
    // [model]
    std::string family = "tanh-quadratic";
    std::map<std::string, double> model_params;  // includes chi

    // [wave]
    double u_minus = 1.25;
    std::string branch = "above";
    std::string speed = "auto";  // "auto" or a number
    double epsilon = 1e-2;

    // [ladder]
    std::vector<double> ladder = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

    // [trap]
    double margin = 0.5;
    int samples_per_curve = 10000;

    // [orbit]
    double offset = 1e-7;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double event_tol = 1e-6;
    double max_length = 1e4;

    // [spectrum]
    double tau_max = 2.0;
    int tau_points = 401;
    std::vector<double> rho_grid = {0.0, 0.1, 0.5, 1.0, 2.0, 5.0};

    // [resolvent]
    double resolvent_halfwidth = 30.0;
    double resolvent_spacing = 1e-2;
    int resolvent_samples = 10;
    std::uint64_t seed = 12345;

    // [pde]
    int pde_nodes = 4096;
    double pde_epsilon_speed = 1e-1;
    double pde_epsilon_growth = 1e-2;
    std::string pde_boundary = "neumann";
    double perturb_amplitude = 1e-5;
    double pde_horizon = 0.0;   // 0 picks a default from the growth rate
    int pde_frame_stride = 0;   // steps between frame dumps; 0 = final only
    std::string pde_mode = "both";  // speed | growth | both

    // [run]
    std::vector<std::string> stages = {"all"};
    std::string out_dir = "out";

    bool stage_enabled(const std::string& name) const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Round-trip serialization of the effective configuration.
std::string dump_config(const RunConfig& cfg);

}  // namespace ks

#endif
