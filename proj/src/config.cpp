#include "ks/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ks {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_number(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw Error("config-error", "line " + std::to_string(line) +
                                        ": expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& v, int line) {
    const double x = parse_number(v, line);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
        throw Error("config-error",
                    "line " + std::to_string(line) + ": expected an integer");
    return i;
}

std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_number(item, line));
    }
    if (out.empty())
        throw Error("config-error",
                    "line " + std::to_string(line) + ": empty list");
    return out;
}

std::vector<std::string> parse_names(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

bool RunConfig::stage_enabled(const std::string& name) const {
    for (const auto& s : stages)
        if (s == "all" || s == name) return true;
    return false;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find_first_of("#;");
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw Error("config-error",
                            "line " + std::to_string(line) + ": unterminated section");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw Error("config-error",
                        "line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty() || val.empty())
            throw Error("config-error",
                        "line " + std::to_string(line) + ": empty key or value");

        if (section == "model") {
            if (key == "family")
                cfg.family = val;
            else
                cfg.model_params[key] = parse_number(val, line);
        } else if (section == "wave") {
            if (key == "u_minus")
                cfg.u_minus = parse_number(val, line);
            else if (key == "branch") {
                if (val != "above" && val != "below")
                    throw Error("config-error", "line " + std::to_string(line) +
                                                    ": branch must be above|below");
                cfg.branch = val;
            } else if (key == "s")
                cfg.speed = val == "auto" ? val
                                          : std::to_string(parse_number(val, line));
            else if (key == "epsilon")
                cfg.epsilon = parse_number(val, line);
            else
                throw Error("config-error", "line " + std::to_string(line) +
                                                ": unknown key '" + key + "'");
        } else if (section == "ladder") {
            if (key == "epsilons")
                cfg.ladder = parse_list(val, line);
            else
                throw Error("config-error", "line " + std::to_string(line) +
                                                ": unknown key '" + key + "'");
        } else if (section == "trap") {
            if (key == "margin")
                cfg.margin = parse_number(val, line);
            else if (key == "samples_per_curve")
                cfg.samples_per_curve = parse_int(val, line);
            else
                throw Error("config-error", "line " + std::to_string(line) +
                                                ": unknown key '" + key + "'");
        } else if (section == "orbit") {
            if (key == "offset")
                cfg.offset = parse_number(val, line);
            else if (key == "rel_tol")
                cfg.rel_tol = parse_number(val, line);
            else if (key == "abs_tol")
                cfg.abs_tol = parse_number(val, line);
            else if (key == "event_tol")
                cfg.event_tol = parse_number(val, line);
            else if (key == "max_length")
                cfg.max_length = parse_number(val, line);
            else
                throw Error("config-error", "line " + std::to_string(line) +
                                                ": unknown key '" + key + "'");
        } else if (section == "spectrum") {
            if (key == "tau_max")
                cfg.tau_max = parse_number(val, line);
            else if (key == "tau_points")
                cfg.tau_points = parse_int(val, line);
            else if (key == "rho_grid")
                cfg.rho_grid = parse_list(val, line);
            else
                throw Error("config-error", "line " + std::to_string(line) +
                                                ": unknown key '" + key + "'");
        } else if (section == "resolvent") {
            if (key == "halfwidth")
                cfg.resolvent_halfwidth = parse_number(val, line);
            else if (key == "spacing")
                cfg.resolvent_spacing = parse_number(val, line);
            else if (key == "samples")
                cfg.resolvent_samples = parse_int(val, line);
            else if (key == "seed")
                cfg.seed = static_cast<std::uint64_t>(parse_number(val, line));
            else
                throw Error("config-error", "line " + std::to_string(line) +
                                                ": unknown key '" + key + "'");
        } else if (section == "pde") {
            if (key == "nodes")
                cfg.pde_nodes = parse_int(val, line);
            else if (key == "epsilon_speed")
                cfg.pde_epsilon_speed = parse_number(val, line);
            else if (key == "epsilon_growth")
                cfg.pde_epsilon_growth = parse_number(val, line);
            else if (key == "boundary") {
                if (val != "neumann" && val != "periodic")
                    throw Error("config-error",
                                "line " + std::to_string(line) +
                                    ": boundary must be neumann|periodic");
                cfg.pde_boundary = val;
            } else if (key == "perturb_amplitude")
                cfg.perturb_amplitude = parse_number(val, line);
            else if (key == "horizon")
                cfg.pde_horizon = parse_number(val, line);
            else if (key == "frame_stride")
                cfg.pde_frame_stride = parse_int(val, line);
            else if (key == "mode") {
                if (val != "speed" && val != "growth" && val != "both")
                    throw Error("config-error",
                                "line " + std::to_string(line) +
                                    ": mode must be speed|growth|both");
                cfg.pde_mode = val;
            }
            else
                throw Error("config-error", "line " + std::to_string(line) +
                                                ": unknown key '" + key + "'");
        } else if (section == "run") {
            if (key == "stages")
                cfg.stages = parse_names(val);
            else if (key == "out_dir")
                cfg.out_dir = val;
            else
                throw Error("config-error", "line " + std::to_string(line) +
                                                ": unknown key '" + key + "'");
        } else {
            throw Error("config-error", "line " + std::to_string(line) +
                                            ": unknown section '" + section + "'");
        }
    }

    if (!(cfg.u_minus > 0.0))
        throw Error("config-error", "u_minus must be positive");
    if (!(cfg.margin > 0.0 && cfg.margin < 1.0))
        throw Error("config-error", "trap margin must lie in (0,1)");
    for (double e : cfg.ladder)
        if (e < 0.0) throw Error("config-error", "ladder epsilons must be >= 0");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("config-error", "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream o;
    o.precision(17);
    o << "[model]\nfamily = " << cfg.family << "\n";
    for (const auto& [k, v] : cfg.model_params) o << k << " = " << v << "\n";
    o << "\n[wave]\nu_minus = " << cfg.u_minus << "\nbranch = " << cfg.branch
      << "\ns = " << cfg.speed << "\nepsilon = " << cfg.epsilon << "\n";
    o << "\n[ladder]\nepsilons = ";
    for (std::size_t i = 0; i < cfg.ladder.size(); ++i)
        o << (i ? ", " : "") << cfg.ladder[i];
    o << "\n\n[trap]\nmargin = " << cfg.margin
      << "\nsamples_per_curve = " << cfg.samples_per_curve << "\n";
    o << "\n[orbit]\noffset = " << cfg.offset << "\nrel_tol = " << cfg.rel_tol
      << "\nabs_tol = " << cfg.abs_tol << "\nevent_tol = " << cfg.event_tol
      << "\nmax_length = " << cfg.max_length << "\n";
    o << "\n[spectrum]\ntau_max = " << cfg.tau_max
      << "\ntau_points = " << cfg.tau_points << "\nrho_grid = ";
    for (std::size_t i = 0; i < cfg.rho_grid.size(); ++i)
        o << (i ? ", " : "") << cfg.rho_grid[i];
    o << "\n\n[resolvent]\nhalfwidth = " << cfg.resolvent_halfwidth
      << "\nspacing = " << cfg.resolvent_spacing
      << "\nsamples = " << cfg.resolvent_samples << "\nseed = " << cfg.seed
      << "\n";
    o << "\n[pde]\nnodes = " << cfg.pde_nodes
      << "\nepsilon_speed = " << cfg.pde_epsilon_speed
      << "\nepsilon_growth = " << cfg.pde_epsilon_growth
      << "\nboundary = " << cfg.pde_boundary
      << "\nperturb_amplitude = " << cfg.perturb_amplitude;
    if (cfg.pde_horizon > 0.0) o << "\nhorizon = " << cfg.pde_horizon;
    if (cfg.pde_frame_stride > 0)
        o << "\nframe_stride = " << cfg.pde_frame_stride;
    if (cfg.pde_mode != "both") o << "\nmode = " << cfg.pde_mode;
    o << "\n\n[run]\nstages = ";
    for (std::size_t i = 0; i < cfg.stages.size(); ++i)
        o << (i ? ", " : "") << cfg.stages[i];
    o << "\nout_dir = " << cfg.out_dir << "\n";
    return o.str();
}

}  // namespace ks
