#include "havoq/config.hpp"

#include "havoq/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace havoq {

namespace {

using ordered_json = nlohmann::ordered_json;

double get_or(const ordered_json& j, const std::string& key, double fallback) {
    if (j.contains(key)) {
        return j.at(key).get<double>();
    }
    return fallback;
}

int get_or(const ordered_json& j, const std::string& key, int fallback) {
    if (j.contains(key)) {
        return j.at(key).get<int>();
    }
    return fallback;
}

bool get_or(const ordered_json& j, const std::string& key, bool fallback) {
    if (j.contains(key)) {
        return j.at(key).get<bool>();
    }
    return fallback;
}

void require(const ordered_json& physics, const char* key, const std::string& system) {
    if (!physics.contains(key)) {
        throw ConfigError("config: system '" + system + "' requires physics." + key);
    }
}

} // namespace

std::string to_string(SystemKind k) {
    switch (k) {
        case SystemKind::qho: return "qho";
        case SystemKind::kerr: return "kerr";
        case SystemKind::cross_kerr: return "cross_kerr";
        case SystemKind::jaynes_cummings: return "jaynes_cummings";
        case SystemKind::modulated: return "modulated";
        case SystemKind::kerr_closed: return "kerr_closed";
    }
    throw ConfigError("config: unknown system kind");
}

SystemKind system_from_string(const std::string& s) {
    if (s == "qho") return SystemKind::qho;
    if (s == "kerr") return SystemKind::kerr;
    if (s == "cross_kerr") return SystemKind::cross_kerr;
    if (s == "jaynes_cummings") return SystemKind::jaynes_cummings;
    if (s == "modulated") return SystemKind::modulated;
    if (s == "kerr_closed") return SystemKind::kerr_closed;
    throw ConfigError("config: unknown system '" + s + "'");
}

void ExperimentConfig::validate() const {
    if (omega_x <= 0.0 || omega_y <= 0.0) {
        throw ConfigError("config: oscillation frequencies must be positive");
    }
    if (temperature <= 0.0) {
        throw ConfigError("config: temperature must be positive");
    }
    if (kappa < 0.0) {
        throw ConfigError("config: kappa must be nonnegative");
    }
    if (n_x < 2 || n_y < 2) {
        throw ConfigError("config: Fock truncations must be at least 2");
    }
    if (grid.t_f <= 0.0 || grid.dt <= 0.0) {
        throw ConfigError("config: grid times must be positive");
    }
    if (mhavok.m < 2) {
        throw ConfigError("config: embedding dimension must be at least 2");
    }
    if (mhavok.tau <= 0.0 || mhavok.tau >= 1.0) {
        throw ConfigError("config: tau must be in (0, 1)");
    }
    if (mhavok.r < 0 || mhavok.r_max < 1) {
        throw ConfigError("config: bad cutoff rank settings");
    }
    if (tail_fraction <= 0.0 || tail_fraction > 1.0) {
        throw ConfigError("config: tail_fraction must be in (0, 1]");
    }
    if (system == SystemKind::modulated && omega_f <= 0.0) {
        throw ConfigError("config: modulated system requires omega_f > 0");
    }
    if (system == SystemKind::kerr_closed && kappa != 0.0) {
        throw ConfigError("config: kerr_closed runs with kappa = 0");
    }
}

ExperimentConfig parse_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
    }
    if (!j.contains("system")) {
        throw ConfigError("config: missing 'system'");
    }

    ExperimentConfig c;
    c.system = system_from_string(j.at("system").get<std::string>());
    const ordered_json physics = j.contains("physics") ? j.at("physics") : ordered_json::object();

    const std::string sysname = to_string(c.system);
    switch (c.system) {
        case SystemKind::kerr:
        case SystemKind::kerr_closed:
            require(physics, "chi_x", sysname);
            require(physics, "chi_y", sysname);
            break;
        case SystemKind::cross_kerr:
            require(physics, "chi_xy", sysname);
            break;
        case SystemKind::jaynes_cummings:
            require(physics, "g", sysname);
            break;
        case SystemKind::modulated:
            require(physics, "delta", sysname);
            require(physics, "omega_f", sysname);
            break;
        case SystemKind::qho:
            break;
    }

    c.omega_x = get_or(physics, "omega_x", c.omega_x);
    c.omega_y = get_or(physics, "omega_y", c.omega_y);
    c.temperature = get_or(physics, "temperature", c.temperature);
    c.kappa = get_or(physics, "kappa",
                     c.system == SystemKind::kerr_closed ? 0.0 : c.kappa);
    c.phi = get_or(physics, "phi", c.phi);
    c.common_environment = get_or(physics, "common_environment", c.common_environment);
    if (physics.contains("ordering")) {
        const std::string ord = physics.at("ordering").get<std::string>();
        if (ord == "aa_dag") {
            c.ordering = NumberOrdering::annihilation_first;
        } else if (ord == "dag_a") {
            c.ordering = NumberOrdering::creation_first;
        } else {
            throw ConfigError("config: ordering must be 'aa_dag' or 'dag_a'");
        }
    }
    c.chi_x = get_or(physics, "chi_x", c.chi_x);
    c.chi_y = get_or(physics, "chi_y", c.chi_y);
    c.chi_xy = get_or(physics, "chi_xy", c.chi_xy);
    c.omega_q = get_or(physics, "omega_q", c.omega_q);
    c.g = get_or(physics, "g", c.g);
    c.gamma = get_or(physics, "gamma", c.gamma);
    c.gamma_phi = get_or(physics, "gamma_phi", c.gamma_phi);
    c.delta = get_or(physics, "delta", c.delta);
    c.omega_f = get_or(physics, "omega_f", c.omega_f);
    c.alpha_re = get_or(physics, "alpha_re", c.alpha_re);
    c.alpha_im = get_or(physics, "alpha_im", c.alpha_im);
    c.n_x = get_or(physics, "n_x", c.n_x);
    c.n_y = get_or(physics, "n_y", c.n_y);
    c.tail_fraction = get_or(physics, "tail_fraction", c.tail_fraction);

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        c.grid.t_f = get_or(g, "t_f", c.grid.t_f);
        c.grid.dt = get_or(g, "dt", c.grid.dt);
    }
    if (j.contains("mhavok")) {
        const auto& m = j.at("mhavok");
        c.mhavok.m = get_or(m, "m", c.mhavok.m);
        c.mhavok.tau = get_or(m, "tau", c.mhavok.tau);
        c.mhavok.r_max = get_or(m, "r_max", c.mhavok.r_max);
        if (m.contains("r")) {
            if (m.at("r").is_string()) {
                if (m.at("r").get<std::string>() != "auto") {
                    throw ConfigError("config: mhavok.r must be an integer or \"auto\"");
                }
                c.mhavok.r = 0;
            } else {
                c.mhavok.r = m.at("r").get<int>();
            }
        }
    }
    if (j.contains("baselines")) {
        const auto& b = j.at("baselines");
        c.baselines.fft = get_or(b, "fft", c.baselines.fft);
        c.baselines.pencil = get_or(b, "pencil", c.baselines.pencil);
        c.baselines.pencil_l = get_or(b, "pencil_L", c.baselines.pencil_l);
        c.baselines.pencil_p = get_or(b, "pencil_p", c.baselines.pencil_p);
    }
    if (j.contains("out_dir")) {
        c.out_dir = j.at("out_dir").get<std::string>();
    }

    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    ordered_json j;
    j["system"] = to_string(c.system);
    ordered_json physics;
    physics["omega_x"] = c.omega_x;
    physics["omega_y"] = c.omega_y;
    physics["temperature"] = c.temperature;
    physics["kappa"] = c.kappa;
    physics["phi"] = c.phi;
    physics["common_environment"] = c.common_environment;
    physics["ordering"] = c.ordering == NumberOrdering::annihilation_first ? "aa_dag" : "dag_a";
    physics["chi_x"] = c.chi_x;
    physics["chi_y"] = c.chi_y;
    physics["chi_xy"] = c.chi_xy;
    physics["omega_q"] = c.omega_q;
    physics["g"] = c.g;
    physics["gamma"] = c.gamma;
    physics["gamma_phi"] = c.gamma_phi;
    physics["delta"] = c.delta;
    physics["omega_f"] = c.omega_f;
    physics["alpha_re"] = c.alpha_re;
    physics["alpha_im"] = c.alpha_im;
    physics["n_x"] = c.n_x;
    physics["n_y"] = c.n_y;
    physics["tail_fraction"] = c.tail_fraction;
    j["physics"] = physics;
    j["grid"] = {{"t_f", c.grid.t_f}, {"dt", c.grid.dt}};
    ordered_json mh;
    mh["m"] = c.mhavok.m;
    mh["tau"] = c.mhavok.tau;
    if (c.mhavok.r == 0) {
        mh["r"] = "auto";
    } else {
        mh["r"] = c.mhavok.r;
    }
    mh["r_max"] = c.mhavok.r_max;
    j["mhavok"] = mh;
    j["baselines"] = {{"fft", c.baselines.fft},
                      {"pencil", c.baselines.pencil},
                      {"pencil_L", c.baselines.pencil_l},
                      {"pencil_p", c.baselines.pencil_p}};
    j["out_dir"] = c.out_dir;
    return j.dump(2);
}

SweepSpec parse_sweep(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("sweep: JSON parse failure: ") + e.what());
    }
    SweepSpec s;
    if (j.contains("points")) {
        for (const auto& p : j.at("points")) {
            s.point_overrides.push_back(p.dump());
        }
    } else {
        if (!j.contains("parameter") || !j.contains("values")) {
            throw ConfigError("sweep: need 'parameter' and 'values' (or 'points')");
        }
        s.parameter = j.at("parameter").get<std::string>();
        if (j.at("values").is_object()) {
            const auto& v = j.at("values");
            const double lo = v.at("start").get<double>();
            const double hi = v.at("stop").get<double>();
            const int count = v.at("count").get<int>();
            if (count < 1) {
                throw ConfigError("sweep: linspace count must be positive");
            }
            for (int i = 0; i < count; ++i) {
                s.values.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
            }
        } else {
            s.values = j.at("values").get<std::vector<double>>();
        }
    }
    if (s.size() == 0) {
        throw ConfigError("sweep: no sweep points");
    }
    return s;
}

SweepSpec load_sweep(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("sweep: cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_sweep(ss.str());
}

ExperimentConfig apply_sweep_point(const ExperimentConfig& base, const SweepSpec& sweep,
                                   size_t index) {
    if (index >= sweep.size()) {
        throw ConfigError("sweep: point index out of range");
    }
    ordered_json j = ordered_json::parse(serialize_config(base));
    if (!sweep.point_overrides.empty()) {
        const ordered_json over = ordered_json::parse(sweep.point_overrides[index]);
        for (const auto& [key, value] : over.items()) {
            // One level of nesting ("physics.kappa" style) or whole sections.
            const auto dot = key.find('.');
            if (dot == std::string::npos) {
                j[key] = value;
            } else {
                j[key.substr(0, dot)][key.substr(dot + 1)] = value;
            }
        }
    } else {
        const auto dot = sweep.parameter.find('.');
        if (dot == std::string::npos) {
            j[sweep.parameter] = sweep.values[index];
        } else {
            j[sweep.parameter.substr(0, dot)][sweep.parameter.substr(dot + 1)] =
                sweep.values[index];
        }
    }
    return parse_config(j.dump());
}

} // namespace havoq
