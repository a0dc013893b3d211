#include "hml/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hml {

using nlohmann::json;

std::string scan_kind_name(ScanKind k) {
    switch (k) {
        case ScanKind::beta2: return "beta2";
        case ScanKind::inf_plus_hole: return "inf_plus_hole";
        case ScanKind::all: return "all";
    }
    throw ConfigError("unnamed scan kind");
}

ScanKind scan_kind_from_name(const std::string& name) {
    if (name == "beta2") return ScanKind::beta2;
    if (name == "inf_plus_hole") return ScanKind::inf_plus_hole;
    if (name == "all") return ScanKind::all;
    throw ConfigError("unknown scan kind: " + name);
}

std::string pole_mode_name(PoleMode m) {
    return m == PoleMode::finite_pole ? "finite_pole" : "far_sphere";
}

PoleMode pole_mode_from_name(const std::string& name) {
    if (name == "finite_pole") return PoleMode::finite_pole;
    if (name == "far_sphere") return PoleMode::far_sphere;
    throw ConfigError("unknown pole mode: " + name);
}

namespace {

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

Vec parse_vec(const json& j, int dim, const char* where) {
    if (!j.is_array() || (j.size() != 2 && j.size() != 3))
        throw ConfigError(std::string(where) + " must be a 2- or 3-vector");
    if (static_cast<int>(j.size()) != dim)
        throw ConfigError(std::string(where) + " does not match the ambient dimension");
    Vec v;
    v.x = j.at(0).get<double>();
    v.y = j.at(1).get<double>();
    v.z = j.size() == 3 ? j.at(2).get<double>() : 0.0;
    return v;
}

json vec_json(const Vec& v, int dim) {
    json out = json::array();
    out.push_back(v.x);
    out.push_back(v.y);
    if (dim == 3) out.push_back(v.z);
    return out;
}

int spec_branching(const IfsSpec& spec) {
    switch (spec.family) {
        case Family::corner_cantor_2d: return 4;
        case Family::corner_cantor_3d: return 8;
        case Family::custom: return static_cast<int>(spec.maps.size());
    }
    return 0;
}

ExperimentConfig parse_checked(const json& root) {
    expect_keys(root,
                {"model", "lattice", "sample", "beta", "walk", "analysis",
                 "disk_sanity", "seed", "workers"},
                "config");
    if (!root.contains("model")) throw ConfigError("config needs a model block");

    ExperimentConfig cfg;

    const json& jm = root.at("model");
    expect_keys(jm, {"family", "ambient_dim", "lambda", "maps", "point_cap"}, "model");
    cfg.model.family = family_from_name(jm.at("family").get<std::string>());
    cfg.model.lambda = jm.at("lambda").get<double>();
    if (cfg.model.family == Family::custom) {
        cfg.model.ambient_dim = jm.at("ambient_dim").get<int>();
        if (!jm.contains("maps")) throw ConfigError("custom model needs maps");
        for (const json& m : jm.at("maps")) {
            expect_keys(m, {"ratio", "offset"}, "model.maps");
            SimilarityMap map;
            map.ratio = m.at("ratio").get<double>();
            map.offset = parse_vec(m.at("offset"), cfg.model.ambient_dim, "map offset");
            cfg.model.maps.push_back(map);
        }
    } else {
        if (jm.contains("maps")) throw ConfigError("corner families derive their maps");
        cfg.model.ambient_dim = cfg.model.family == Family::corner_cantor_3d ? 3 : 2;
        if (jm.contains("ambient_dim") &&
            jm.at("ambient_dim").get<int>() != cfg.model.ambient_dim)
            throw ConfigError("ambient_dim contradicts the family");
    }
    if (jm.contains("point_cap")) cfg.model.point_cap = jm.at("point_cap").get<std::uint64_t>();

    if (root.contains("lattice")) {
        expect_keys(root.at("lattice"), {"max_depth"}, "lattice");
        cfg.lattice_depth = root.at("lattice").value("max_depth", cfg.lattice_depth);
    }
    if (cfg.lattice_depth < 1) throw ConfigError("lattice max_depth must be at least 1");

    if (root.contains("sample")) {
        expect_keys(root.at("sample"), {"depth"}, "sample");
        cfg.sample_depth = root.at("sample").value("depth", cfg.sample_depth);
    }
    if (cfg.sample_depth < 0) cfg.sample_depth = cfg.lattice_depth + 2;
    if (cfg.sample_depth < cfg.lattice_depth + 2)
        throw ConfigError("sample depth must be at least lattice depth + 2");

    if (root.contains("beta")) {
        const json& jb = root.at("beta");
        expect_keys(jb, {"angle_grid", "line_step", "depth_min", "depth_max", "kind"},
                    "beta");
        cfg.beta.angle_grid = jb.value("angle_grid", cfg.beta.angle_grid);
        cfg.beta.line_step = jb.value("line_step", cfg.beta.line_step);
        cfg.beta.depth_min = jb.value("depth_min", cfg.beta.depth_min);
        cfg.beta.depth_max = jb.value("depth_max", cfg.beta.depth_max);
        if (jb.contains("kind"))
            cfg.beta.kind = scan_kind_from_name(jb.at("kind").get<std::string>());
    }
    if (cfg.beta.depth_max < 0) cfg.beta.depth_max = cfg.lattice_depth;
    if (cfg.beta.angle_grid < 2) throw ConfigError("beta angle_grid must be at least 2");
    if (!(cfg.beta.line_step > 0.0 && cfg.beta.line_step <= 0.5))
        throw ConfigError("beta line_step must lie in (0, 0.5]");
    if (cfg.beta.depth_min < 0 || cfg.beta.depth_min > cfg.beta.depth_max ||
        cfg.beta.depth_max > cfg.lattice_depth)
        throw ConfigError("beta depth range must sit inside the lattice");

    if (root.contains("walk")) {
        const json& jw = root.at("walk");
        expect_keys(jw,
                    {"n_walkers", "eps", "shrink", "pole_mode", "pole", "radius_factor",
                     "r_escape", "max_steps"},
                    "walk");
        cfg.walk.n_walkers = jw.value("n_walkers", cfg.walk.n_walkers);
        cfg.walk.eps = jw.value("eps", cfg.walk.eps);
        cfg.walk.shrink = jw.value("shrink", cfg.walk.shrink);
        if (jw.contains("pole_mode"))
            cfg.walk.pole_mode = pole_mode_from_name(jw.at("pole_mode").get<std::string>());
        if (jw.contains("pole"))
            cfg.walk.pole = parse_vec(jw.at("pole"), cfg.model.ambient_dim, "walk pole");
        cfg.walk.radius_factor = jw.value("radius_factor", cfg.walk.radius_factor);
        cfg.walk.r_escape = jw.value("r_escape", cfg.walk.r_escape);
        cfg.walk.max_steps = jw.value("max_steps", cfg.walk.max_steps);
    }
    if (cfg.walk.n_walkers == 0) cfg.walk.n_walkers = 100000;

    const int branching = spec_branching(cfg.model);
    bool m0_given = false;
    bool k_max_given = false;
    bool scan_depth_given = false;
    if (root.contains("analysis")) {
        const json& ja = root.at("analysis");
        expect_keys(ja,
                    {"r0", "m0", "k_max", "t_prime", "factor", "stop_scan_depth",
                     "stop_m0", "quantile", "n_bootstrap"},
                    "analysis");
        cfg.analysis.r0 = ja.value("r0", cfg.analysis.r0);
        cfg.analysis.m0 = ja.value("m0", cfg.analysis.m0);
        cfg.analysis.k_max = ja.value("k_max", cfg.analysis.k_max);
        cfg.analysis.t_prime = ja.value("t_prime", cfg.analysis.t_prime);
        cfg.analysis.factor = ja.value("factor", cfg.analysis.factor);
        cfg.analysis.stop_scan_depth = ja.value("stop_scan_depth", cfg.analysis.stop_scan_depth);
        cfg.analysis.stop_m0 = ja.value("stop_m0", cfg.analysis.stop_m0);
        cfg.analysis.quantile = ja.value("quantile", cfg.analysis.quantile);
        cfg.analysis.n_bootstrap = ja.value("n_bootstrap", cfg.analysis.n_bootstrap);
        m0_given = ja.contains("m0");
        k_max_given = ja.contains("k_max");
        scan_depth_given = ja.contains("stop_scan_depth");
    }
    // Unspecified window parameters shrink to fit the lattice; explicit
    // values are validated as given.
    if (!scan_depth_given)
        cfg.analysis.stop_scan_depth =
            std::min(cfg.analysis.stop_scan_depth, cfg.lattice_depth - 1);
    if (branching > 0) {
        const Word r0 = word_from_string(cfg.analysis.r0, branching);
        const int room = cfg.lattice_depth - r0.depth;
        if (!m0_given && room >= 1)
            cfg.analysis.m0 = std::min(cfg.analysis.m0, room);
        if (!k_max_given)
            cfg.analysis.k_max = std::max(
                1, std::min(cfg.analysis.k_max, room / std::max(1, cfg.analysis.m0)));
        if (cfg.analysis.m0 < 1) throw ConfigError("analysis m0 must be at least 1");
        if (cfg.analysis.k_max < 1) throw ConfigError("analysis k_max must be at least 1");
        if (r0.depth + cfg.analysis.k_max * cfg.analysis.m0 > cfg.lattice_depth)
            throw ConfigError("analysis window r0 + k_max * m0 exceeds the lattice depth");
    }
    if (!(cfg.analysis.factor > 0.0)) throw ConfigError("analysis factor must be positive");
    if (cfg.analysis.stop_scan_depth < 0 ||
        cfg.analysis.stop_scan_depth >= cfg.lattice_depth)
        throw ConfigError("stop_scan_depth must leave room below the scanned cubes");
    if (cfg.analysis.stop_m0 < 1) throw ConfigError("stop_m0 must be at least 1");
    if (!(cfg.analysis.quantile > 0.0 && cfg.analysis.quantile < 1.0))
        throw ConfigError("analysis quantile must lie in (0, 1)");
    if (cfg.analysis.n_bootstrap < 0) throw ConfigError("n_bootstrap must be nonnegative");
    if (cfg.analysis.t_prime != 0.0 && cfg.model.lambda > 0.0 && cfg.model.lambda < 1.0 &&
        branching > 1) {
        const double s = std::log(static_cast<double>(branching)) /
                         std::log(1.0 / cfg.model.lambda);
        if (!(cfg.analysis.t_prime > 0.0 && cfg.analysis.t_prime < s))
            throw ConfigError("analysis t_prime must lie in (0, s)");
    }

    if (root.contains("disk_sanity")) {
        const json& jd = root.at("disk_sanity");
        expect_keys(jd, {"walkers", "arcs", "eps"}, "disk_sanity");
        cfg.disk_sanity.enabled = true;
        cfg.disk_sanity.walkers = jd.value("walkers", cfg.disk_sanity.walkers);
        cfg.disk_sanity.arcs = jd.value("arcs", cfg.disk_sanity.arcs);
        cfg.disk_sanity.eps = jd.value("eps", cfg.disk_sanity.eps);
        if (cfg.disk_sanity.walkers == 0) throw ConfigError("disk_sanity walkers must be positive");
        if (cfg.disk_sanity.arcs < 2) throw ConfigError("disk_sanity needs at least 2 arcs");
        if (!(cfg.disk_sanity.eps > 0.0 && cfg.disk_sanity.eps < 0.5))
            throw ConfigError("disk_sanity eps must lie in (0, 0.5)");
    }

    cfg.seed = root.value("seed", cfg.seed);
    cfg.workers = root.value("workers", cfg.workers);
    if (cfg.workers < 1) throw ConfigError("workers must be at least 1");

    cfg.walk.seed = cfg.seed;
    cfg.walk.n_workers = cfg.workers;
    return cfg;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return parse_checked(root);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInput("config file not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string canonical_json(const ExperimentConfig& cfg) {
    json root;
    json jm;
    jm["family"] = family_name(cfg.model.family);
    jm["ambient_dim"] = cfg.model.ambient_dim;
    jm["lambda"] = cfg.model.lambda;
    jm["point_cap"] = cfg.model.point_cap;
    if (cfg.model.family == Family::custom) {
        json maps = json::array();
        for (const SimilarityMap& m : cfg.model.maps) {
            json jmap;
            jmap["ratio"] = m.ratio;
            jmap["offset"] = vec_json(m.offset, cfg.model.ambient_dim);
            maps.push_back(jmap);
        }
        jm["maps"] = maps;
    }
    root["model"] = jm;
    root["lattice"] = json{{"max_depth", cfg.lattice_depth}};
    root["sample"] = json{{"depth", cfg.sample_depth}};
    root["beta"] = json{{"angle_grid", cfg.beta.angle_grid},
                        {"line_step", cfg.beta.line_step},
                        {"depth_min", cfg.beta.depth_min},
                        {"depth_max", cfg.beta.depth_max},
                        {"kind", scan_kind_name(cfg.beta.kind)}};
    root["walk"] = json{{"n_walkers", cfg.walk.n_walkers},
                        {"eps", cfg.walk.eps},
                        {"shrink", cfg.walk.shrink},
                        {"pole_mode", pole_mode_name(cfg.walk.pole_mode)},
                        {"pole", vec_json(cfg.walk.pole, cfg.model.ambient_dim)},
                        {"radius_factor", cfg.walk.radius_factor},
                        {"r_escape", cfg.walk.r_escape},
                        {"max_steps", cfg.walk.max_steps}};
    root["analysis"] = json{{"r0", cfg.analysis.r0},
                            {"m0", cfg.analysis.m0},
                            {"k_max", cfg.analysis.k_max},
                            {"t_prime", cfg.analysis.t_prime},
                            {"factor", cfg.analysis.factor},
                            {"stop_scan_depth", cfg.analysis.stop_scan_depth},
                            {"stop_m0", cfg.analysis.stop_m0},
                            {"quantile", cfg.analysis.quantile},
                            {"n_bootstrap", cfg.analysis.n_bootstrap}};
    // presence of the block is the enable flag, so a disabled check owns
    // no canonical keys at all
    if (cfg.disk_sanity.enabled)
        root["disk_sanity"] = json{{"walkers", cfg.disk_sanity.walkers},
                                   {"arcs", cfg.disk_sanity.arcs},
                                   {"eps", cfg.disk_sanity.eps}};
    root["seed"] = cfg.seed;
    root["workers"] = cfg.workers;
    return root.dump();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

std::string config_digest(const ExperimentConfig& cfg) {
    return fnv1a_hex(canonical_json(cfg));
}

} // namespace hml
