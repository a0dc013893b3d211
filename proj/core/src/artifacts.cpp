#include "hml/artifacts.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace hml {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create directory " + dir + ": " + ec.message());
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(text.data(), last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw MissingInput("malformed number in artifact: '" + text + "'");
    return v;
}

namespace {

constexpr const char* kDigestPrefix = "# config_digest=";

std::ofstream open_out(const std::string& dir, const char* name) {
    ensure_dir(dir);
    const fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    return out;
}

json vec_json(const Vec& v, int dim) {
    json out = json::array();
    out.push_back(v.x);
    out.push_back(v.y);
    if (dim == 3) out.push_back(v.z);
    return out;
}

Vec vec_from_json(const json& j) {
    Vec v;
    v.x = j.at(0).get<double>();
    v.y = j.at(1).get<double>();
    v.z = j.size() > 2 ? j.at(2).get<double>() : 0.0;
    return v;
}

void dump_json(const std::string& dir, const char* name, const json& j) {
    auto out = open_out(dir, name);
    out << j.dump(2) << '\n';
}

json read_json_checked(const std::string& path, const std::string& expect_digest) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInput("missing artifact: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw MissingInput("malformed artifact " + path + ": " + e.what());
    }
    const std::string digest = j.value("config_digest", std::string());
    if (digest != expect_digest)
        throw DigestMismatch("artifact " + path + " carries config digest '" + digest +
                             "', expected '" + expect_digest + "'");
    return j;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::size_t column(const CsvTable& t, const std::string& name, const std::string& path) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return i;
    throw MissingInput("artifact " + path + " lacks column " + name);
}

} // namespace

void write_model_json(const std::string& dir, const IfsModel& model,
                      const std::string& digest) {
    json j;
    j["family"] = family_name(model.family);
    j["ambient_dim"] = model.ambient_dim;
    j["lambda"] = model.lambda;
    json maps = json::array();
    for (const SimilarityMap& m : model.maps) {
        json jm;
        jm["ratio"] = m.ratio;
        jm["offset"] = vec_json(m.offset, model.ambient_dim);
        maps.push_back(jm);
    }
    j["maps"] = maps;
    j["s"] = model.s;
    j["C0"] = model.c0_certified;
    j["bbox"] = json{{"lo", vec_json(model.bbox.lo, model.ambient_dim)},
                     {"hi", vec_json(model.bbox.hi, model.ambient_dim)}};
    j["config_digest"] = digest;
    dump_json(dir, "model.json", j);
}

void write_cubes_csv(const std::string& dir, const CubeLattice& lat,
                     const std::string& digest) {
    auto out = open_out(dir, "cubes.csv");
    const bool spatial = lat.model().ambient_dim == 3;
    out << kDigestPrefix << digest << '\n';
    out << (spatial ? "id,parent_id,generation,cx,cy,cz,side,mu_mass\n"
                    : "id,parent_id,generation,cx,cy,side,mu_mass\n");
    for (int g = 0; g <= lat.max_depth(); ++g) {
        for (std::uint64_t code = 0; code < lat.gen_size(g); ++code) {
            const Word w{g, code};
            const Vec& c = lat.center(w);
            out << lat.id(w) << ',' << (g == 0 ? std::string() : lat.id(lat.parent(w)))
                << ',' << g << ',' << format_double(c.x) << ',' << format_double(c.y);
            if (spatial) out << ',' << format_double(c.z);
            out << ',' << format_double(lat.ell(g)) << ',' << format_double(lat.mu(g))
                << '\n';
        }
    }
}

void write_betas_csv(const std::string& dir, const NonflatnessScan& scan,
                     const CubeLattice& lat, const std::string& digest) {
    auto out = open_out(dir, "betas.csv");
    out << kDigestPrefix << digest << '\n';
    out << "cube_id,r,beta2,beta_inf,beta_hole,beta1,line_angle,line_offset,"
           "grid_angles,err_bound\n";
    for (const ScanRow& row : scan.rows) {
        out << lat.id(row.word) << ',' << format_double(row.r) << ','
            << format_double(row.beta2) << ',' << format_double(row.beta_inf) << ','
            << format_double(row.beta_hole) << ',' << format_double(row.beta1) << ','
            << format_double(row.line.angle()) << ','
            << format_double(row.line.normal.dot(row.line.anchor)) << ','
            << scan.angle_grid << ',' << format_double(row.err_bound) << '\n';
    }
}

void write_omega_csv(const std::string& dir, const OmegaEstimate& omega,
                     const std::string& digest) {
    auto out = open_out(dir, "omega.csv");
    const CubeLattice& lat = omega.lattice();
    out << kDigestPrefix << digest << '\n';
    out << "cube_id,generation,hits,total,omega_hat,ci_low,ci_high\n";
    for (int g = 0; g <= lat.max_depth(); ++g) {
        for (std::uint64_t code = 0; code < lat.gen_size(g); ++code) {
            const Word w{g, code};
            const Interval ci = omega.ci(w);
            out << lat.id(w) << ',' << g << ',' << omega.hits(w) << ',' << omega.total()
                << ',' << format_double(omega.omega(w)) << ',' << format_double(ci.lo)
                << ',' << format_double(ci.hi) << '\n';
        }
    }
}

void write_run_meta(const std::string& dir, const WalkConfig& walk,
                    const WalkDiagnostics& diag, const std::string& digest) {
    json j;
    j["walk"] = json{{"n_walkers", walk.n_walkers},
                     {"eps", walk.eps},
                     {"shrink", walk.shrink},
                     {"pole_mode", pole_mode_name(walk.pole_mode)},
                     {"pole", vec_json(walk.pole, 3)},
                     {"radius_factor", walk.radius_factor},
                     {"r_escape", walk.r_escape},
                     {"max_steps", walk.max_steps},
                     {"seed", walk.seed},
                     {"n_workers", walk.n_workers}};
    j["diagnostics"] = json{{"n_walkers", diag.n_walkers},
                            {"absorbed", diag.absorbed},
                            {"truncated", diag.truncated},
                            {"resampled", diag.resampled},
                            {"steps_total", diag.steps_total},
                            {"eps_applied", diag.eps_applied},
                            {"wall_time_s", diag.wall_time_s}};
    j["config_digest"] = digest;
    dump_json(dir, "run_meta.json", j);
}

void write_disk_sanity(const std::string& dir, const DiskCheck& check,
                       const std::string& digest) {
    json j;
    j["arcs"] = check.arcs;
    j["walkers"] = check.walkers;
    j["eps"] = check.eps;
    j["seed"] = check.seed;
    j["n_workers"] = check.n_workers;
    j["counts"] = check.counts;
    j["chi_square"] = check.chi_square;
    j["threshold"] = check.threshold;
    j["max_abs_sigma"] = check.max_abs_sigma;
    j["pass"] = check.pass;
    j["wall_time_s"] = check.wall_time_s;
    j["config_digest"] = digest;
    dump_json(dir, "disk_sanity.json", j);
}

void write_decay_csv(const std::string& dir, const DecaySeries& decay,
                     const std::string& digest) {
    auto out = open_out(dir, "decay.csv");
    out << kDigestPrefix << digest << '\n';
    out << "k,S_k,S_k_ci_low,S_k_ci_high\n";
    for (std::size_t k = 0; k < decay.s_values.size(); ++k)
        out << k << ',' << format_double(decay.s_values[k]) << ','
            << format_double(decay.s_ci[k].lo) << ',' << format_double(decay.s_ci[k].hi)
            << '\n';
}

void write_stopping_csv(const std::string& dir, const std::vector<StoppingReport>& reports,
                        const CubeLattice& lat, const std::string& digest) {
    auto out = open_out(dir, "stopping.csv");
    out << kDigestPrefix << digest << '\n';
    out << "Q_id,found,P_id,direction,jump,m_used,significant\n";
    for (const StoppingReport& r : reports) {
        out << lat.id(r.q) << ',' << (r.found ? "true" : "false") << ',';
        if (r.found)
            out << lat.id(r.p) << ','
                << (r.direction == JumpDirection::up ? "up" : "down") << ','
                << format_double(r.jump);
        else
            out << ",,0";
        out << ',' << r.m_used << ',' << (r.significant ? "true" : "false") << '\n';
    }
}

void write_report_json(const std::string& dir, const ReportSummary& summary,
                       const std::string& digest) {
    json j;
    j["gamma_hat"] = summary.gamma_hat;
    j["gamma_ci"] = json::array({summary.gamma_ci.lo, summary.gamma_ci.hi});
    j["t_bound"] = summary.t_bound;
    j["content_bound"] = summary.content_bound;
    j["omega_excess"] = summary.omega_excess;
    j["dim_hat"] = summary.dim_hat;
    j["config_digest"] = digest;
    dump_json(dir, "report.json", j);
}

CsvTable read_csv(const std::string& path, const std::string& expect_digest) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInput("missing artifact: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind(kDigestPrefix, 0) != 0)
        throw MissingInput("artifact lacks a digest line: " + path);
    const std::string digest = line.substr(std::string(kDigestPrefix).size());
    if (digest != expect_digest)
        throw DigestMismatch("artifact " + path + " carries config digest '" + digest +
                             "', expected '" + expect_digest + "'");
    CsvTable table;
    if (!std::getline(in, line)) throw MissingInput("artifact lacks a header: " + path);
    table.header = split_csv(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        table.rows.push_back(split_csv(line));
    }
    return table;
}

RunMeta read_run_meta(const std::string& dir, const std::string& expect_digest) {
    const fs::path p = fs::path(dir) / "run_meta.json";
    const json j = read_json_checked(p.string(), expect_digest);
    RunMeta meta;
    try {
        const json& w = j.at("walk");
        meta.walk.n_walkers = w.at("n_walkers").get<std::uint64_t>();
        meta.walk.eps = w.at("eps").get<double>();
        meta.walk.shrink = w.at("shrink").get<double>();
        meta.walk.pole_mode = pole_mode_from_name(w.at("pole_mode").get<std::string>());
        meta.walk.pole = vec_from_json(w.at("pole"));
        meta.walk.radius_factor = w.at("radius_factor").get<double>();
        meta.walk.r_escape = w.at("r_escape").get<double>();
        meta.walk.max_steps = w.at("max_steps").get<std::uint64_t>();
        meta.walk.seed = w.at("seed").get<std::uint64_t>();
        meta.walk.n_workers = w.at("n_workers").get<int>();
        const json& d = j.at("diagnostics");
        meta.diag.n_walkers = d.at("n_walkers").get<std::uint64_t>();
        meta.diag.absorbed = d.at("absorbed").get<std::uint64_t>();
        meta.diag.truncated = d.at("truncated").get<std::uint64_t>();
        meta.diag.resampled = d.at("resampled").get<std::uint64_t>();
        meta.diag.steps_total = d.at("steps_total").get<std::uint64_t>();
        meta.diag.eps_applied = d.at("eps_applied").get<double>();
        meta.diag.wall_time_s = d.at("wall_time_s").get<double>();
        meta.diag.seed = meta.walk.seed;
        meta.diag.n_workers = meta.walk.n_workers;
    } catch (const json::exception& e) {
        throw MissingInput("malformed artifact " + p.string() + ": " + e.what());
    }
    return meta;
}

OmegaEstimate read_omega(const std::string& dir, const CubeLattice& lat,
                         const std::string& expect_digest) {
    const fs::path p = fs::path(dir) / "omega.csv";
    const CsvTable t = read_csv(p.string(), expect_digest);
    const std::size_t id_col = column(t, "cube_id", p.string());
    const std::size_t gen_col = column(t, "generation", p.string());
    const std::size_t hits_col = column(t, "hits", p.string());

    std::vector<std::uint64_t> hits(lat.gen_size(lat.max_depth()), 0);
    std::uint64_t seen = 0;
    for (const auto& row : t.rows) {
        if (std::stoi(row.at(gen_col)) != lat.max_depth()) continue;
        const Word w = word_from_string(row.at(id_col), lat.branching());
        if (w.depth != lat.max_depth() || w.code >= hits.size())
            throw MissingInput("omega.csv row does not match the lattice: " + row.at(id_col));
        hits[w.code] = std::stoull(row.at(hits_col));
        ++seen;
    }
    if (seen != hits.size())
        throw MissingInput("omega.csv does not cover the deepest generation");
    const RunMeta meta = read_run_meta(dir, expect_digest);
    return OmegaEstimate::from_hits(lat, std::move(hits), meta.diag);
}

ReportSummary read_report_json(const std::string& dir, const std::string& expect_digest) {
    const fs::path p = fs::path(dir) / "report.json";
    const json j = read_json_checked(p.string(), expect_digest);
    ReportSummary out;
    try {
        out.gamma_hat = j.at("gamma_hat").get<double>();
        out.gamma_ci = {j.at("gamma_ci").at(0).get<double>(),
                        j.at("gamma_ci").at(1).get<double>()};
        out.t_bound = j.at("t_bound").get<double>();
        out.content_bound = j.at("content_bound").get<double>();
        out.omega_excess = j.at("omega_excess").get<double>();
        out.dim_hat = j.at("dim_hat").get<double>();
    } catch (const json::exception& e) {
        throw MissingInput("malformed artifact " + p.string() + ": " + e.what());
    }
    return out;
}

bool has_disk_sanity(const std::string& dir) {
    return fs::exists(fs::path(dir) / "disk_sanity.json");
}

DiskCheck read_disk_sanity(const std::string& dir, const std::string& expect_digest) {
    const fs::path p = fs::path(dir) / "disk_sanity.json";
    const json j = read_json_checked(p.string(), expect_digest);
    DiskCheck out;
    try {
        out.arcs = j.at("arcs").get<int>();
        out.walkers = j.at("walkers").get<std::uint64_t>();
        out.eps = j.at("eps").get<double>();
        out.seed = j.at("seed").get<std::uint64_t>();
        out.n_workers = j.at("n_workers").get<int>();
        out.counts = j.at("counts").get<std::vector<std::uint64_t>>();
        out.chi_square = j.at("chi_square").get<double>();
        out.threshold = j.at("threshold").get<double>();
        out.max_abs_sigma = j.at("max_abs_sigma").get<double>();
        out.pass = j.at("pass").get<bool>();
        out.wall_time_s = j.at("wall_time_s").get<double>();
    } catch (const json::exception& e) {
        throw MissingInput("malformed artifact " + p.string() + ": " + e.what());
    }
    return out;
}

} // namespace hml
