#include "hml/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hml/analysis.hpp"

namespace hml {

namespace fs = std::filesystem;

namespace {

struct Stage {
    ExperimentConfig cfg;
    IfsModel model;
    CubeLattice lat;
    std::string digest;
};

Stage open_stage(const ExperimentConfig& cfg) {
    Stage st;
    st.cfg = cfg;
    st.model = build_ifs(cfg.model);
    st.lat = build_lattice(st.model, cfg.lattice_depth);
    st.digest = config_digest(cfg);
    return st;
}

// Six significant digits for prose; artifacts keep full precision.
std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::size_t column_of(const CsvTable& t, const std::string& name, const std::string& path) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return i;
    throw MissingInput("artifact " + path + " lacks column " + name);
}

std::ofstream open_text(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    return out;
}

struct BetaRow {
    std::string id;
    int generation = 0;
    double beta2 = 0.0;
    double beta_inf = 0.0;
    double beta_hole = 0.0;
    double beta1 = 0.0;
};

std::vector<BetaRow> load_beta_rows(const std::string& dir, const std::string& digest) {
    const fs::path p = fs::path(dir) / "betas.csv";
    const CsvTable t = read_csv(p.string(), digest);
    const std::size_t c_id = column_of(t, "cube_id", p.string());
    const std::size_t c_b2 = column_of(t, "beta2", p.string());
    const std::size_t c_bi = column_of(t, "beta_inf", p.string());
    const std::size_t c_bh = column_of(t, "beta_hole", p.string());
    const std::size_t c_b1 = column_of(t, "beta1", p.string());
    std::vector<BetaRow> rows;
    rows.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        BetaRow row;
        row.id = r.at(c_id);
        row.generation = static_cast<int>(row.id.size()) - 1;
        row.beta2 = parse_double(r.at(c_b2));
        row.beta_inf = parse_double(r.at(c_bi));
        row.beta_hole = parse_double(r.at(c_bh));
        row.beta1 = parse_double(r.at(c_b1));
        rows.push_back(std::move(row));
    }
    return rows;
}

double leading_coefficient(const BetaRow& row, ScanKind kind) {
    return kind == ScanKind::inf_plus_hole ? row.beta_inf + row.beta_hole : row.beta2;
}

void write_histogram(std::ofstream& out, const char* name, std::vector<double> values) {
    values.erase(std::remove_if(values.begin(), values.end(),
                                [](double v) { return std::isnan(v); }),
                 values.end());
    if (values.empty()) return;
    const double hi = *std::max_element(values.begin(), values.end());
    if (!(hi > 0.0)) {
        out << name << ",0,0," << values.size() << '\n';
        return;
    }
    constexpr int n_bins = 16;
    const double width = hi / n_bins;
    std::vector<std::uint64_t> counts(n_bins, 0);
    for (double v : values) {
        int b = static_cast<int>(v / width);
        if (b >= n_bins) b = n_bins - 1;
        if (b < 0) b = 0;
        ++counts[b];
    }
    for (int b = 0; b < n_bins; ++b)
        out << name << ',' << format_double(b * width) << ','
            << format_double((b + 1) * width) << ',' << counts[b] << '\n';
}

constexpr const char* kPlotStub = R"PY(#!/usr/bin/env python3
"""Render the report figures from the CSV files next to this script.

Falls back to printing one summary line per file when matplotlib is not
installed; the CSV files are the actual deliverable.
"""
import csv
import pathlib

HERE = pathlib.Path(__file__).resolve().parent


def load(name):
    with open(HERE / name, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    return rows[0], rows[1:]


def main():
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        plt = None

    try:
        _, rows = load("decay_curve.csv")
    except OSError:
        rows = []
    if rows:
        ks = [int(r[0]) for r in rows]
        sk = [float(r[1]) for r in rows]
        lo = [float(r[2]) for r in rows]
        hi = [float(r[3]) for r in rows]
        print("decay_curve.csv:", list(zip(ks, sk)))
        if plt:
            fig, ax = plt.subplots()
            ax.fill_between(ks, lo, hi, alpha=0.3)
            ax.plot(ks, sk, marker="o")
            ax.set_yscale("log")
            ax.set_xlabel("k")
            ax.set_ylabel("S_k")
            fig.savefig(HERE / "decay_curve.png", dpi=150)

    try:
        _, rows = load("beta_hist.csv")
    except OSError:
        rows = []
    if rows:
        names = sorted({r[0] for r in rows})
        print("beta_hist.csv:", ", ".join(names))
        if plt:
            fig, ax = plt.subplots()
            for name in names:
                sub = [r for r in rows if r[0] == name]
                mids = [(float(r[1]) + float(r[2])) / 2 for r in sub]
                counts = [int(r[3]) for r in sub]
                ax.plot(mids, counts, drawstyle="steps-mid", label=name)
            ax.set_xlabel("coefficient value")
            ax.set_ylabel("cubes")
            ax.legend()
            fig.savefig(HERE / "beta_hist.png", dpi=150)

    try:
        _, rows = load("dimension_slopes.csv")
    except OSError:
        rows = []
    if rows:
        slopes = [float(r[1]) for r in rows]
        print("dimension_slopes.csv:", len(slopes), "cubes")
        if plt:
            fig, ax = plt.subplots()
            ax.hist(slopes, bins=32)
            ax.set_xlabel("local slope")
            ax.set_ylabel("cubes")
            fig.savefig(HERE / "dimension_slopes.png", dpi=150)


if __name__ == "__main__":
    main()
)PY";

} // namespace

void cmd_generate(const ExperimentConfig& cfg, const std::string& out_dir) {
    const Stage st = open_stage(cfg);
    write_model_json(out_dir, st.model, st.digest);
    write_cubes_csv(out_dir, st.lat, st.digest);
}

void cmd_betas(const ExperimentConfig& cfg, const std::string& out_dir) {
    const Stage st = open_stage(cfg);
    const MuSample sample = cylinder_points(st.model, cfg.sample_depth);
    const DistanceOracle oracle(st.model);
    const NonflatnessScan scan =
        scan_nonflatness(st.lat, sample, oracle, cfg.beta.kind, cfg.beta.depth_min,
                         cfg.beta.depth_max, cfg.beta.angle_grid, cfg.beta.line_step);
    write_betas_csv(out_dir, scan, st.lat, st.digest);
}

void cmd_harmonic(const ExperimentConfig& cfg, const std::string& out_dir) {
    const Stage st = open_stage(cfg);
    const OmegaEstimate omega = run_walkers(st.model, st.lat, cfg.walk);
    WalkConfig effective = cfg.walk;
    effective.eps = omega.diagnostics().eps_applied / st.model.diam;
    write_omega_csv(out_dir, omega, st.digest);
    write_run_meta(out_dir, effective, omega.diagnostics(), st.digest);
    if (cfg.disk_sanity.enabled) {
        const DiskCheck check =
            run_disk_check(cfg.disk_sanity.walkers, cfg.disk_sanity.arcs,
                           cfg.disk_sanity.eps, mix_seed(cfg.seed, 0x6469736bULL),
                           cfg.workers);
        write_disk_sanity(out_dir, check, st.digest);
    }
}

void cmd_analyze(const ExperimentConfig& cfg, const std::string& out_dir) {
    const Stage st = open_stage(cfg);
    const OmegaEstimate omega = read_omega(out_dir, st.lat, st.digest);
    const Word r0 = word_from_string(cfg.analysis.r0, st.lat.branching());

    const DecaySeries decay =
        decay_series(st.lat, omega, r0, cfg.analysis.m0, cfg.analysis.k_max);
    write_decay_csv(out_dir, decay, st.digest);

    std::vector<StoppingReport> reports;
    for (int g = 0; g <= cfg.analysis.stop_scan_depth; ++g) {
        const int scan_depth = std::min(cfg.analysis.stop_m0, st.lat.max_depth() - g);
        if (scan_depth < 1) continue;
        for (std::uint64_t code = 0; code < st.lat.gen_size(g); ++code) {
            const Word q{g, code};
            if (omega.hits(q) == 0) continue;   // no data, no verdict
            reports.push_back(
                find_stopping_cube(st.lat, omega, q, scan_depth, cfg.analysis.factor));
        }
    }
    write_stopping_csv(out_dir, reports, st.lat, st.digest);

    double t_prime = cfg.analysis.t_prime;
    if (t_prime == 0.0) {
        const double t_min =
            admissible_t_prime_min(st.model, cfg.analysis.m0, decay.gamma_hat);
        t_prime = 0.5 * (std::max(t_min, 0.0) + st.model.s);
    }
    const DimensionBound bound =
        dimension_bound(st.lat, omega, r0, cfg.analysis.m0, decay.gamma_hat,
                        cfg.analysis.k_max, t_prime);
    const LocalDimension local =
        local_dimension(st.lat, omega, cfg.analysis.quantile, cfg.analysis.n_bootstrap,
                        mix_seed(cfg.seed, 0x64696d00ULL));

    ReportSummary summary;
    summary.gamma_hat = decay.gamma_hat;
    summary.gamma_ci = decay.gamma_ci;
    summary.t_bound = bound.t;
    summary.content_bound = bound.content_bound;
    summary.omega_excess = bound.omega_excess;
    summary.dim_hat = local.dim_hat;
    summary.dim_ci = local.ci;
    write_report_json(out_dir, summary, st.digest);
}

void cmd_report(const ExperimentConfig& cfg, const std::string& out_dir) {
    const Stage st = open_stage(cfg);
    const std::vector<BetaRow> betas = load_beta_rows(out_dir, st.digest);
    const CsvTable decay = read_csv((fs::path(out_dir) / "decay.csv").string(), st.digest);
    const CsvTable stopping =
        read_csv((fs::path(out_dir) / "stopping.csv").string(), st.digest);
    const ReportSummary summary = read_report_json(out_dir, st.digest);
    const RunMeta meta = read_run_meta(out_dir, st.digest);
    const OmegaEstimate omega = read_omega(out_dir, st.lat, st.digest);
    const LocalDimension local =
        local_dimension(st.lat, omega, cfg.analysis.quantile, cfg.analysis.n_bootstrap,
                        mix_seed(cfg.seed, 0x64696d00ULL));

    // Flatness summary over the scanned generations.
    double delta0 = std::numeric_limits<double>::infinity();
    std::string argmin_id;
    std::vector<int> gens;
    std::vector<double> gen_min;
    std::vector<std::uint64_t> gen_count;
    for (const BetaRow& row : betas) {
        const double lead = leading_coefficient(row, cfg.beta.kind);
        if (std::isnan(lead)) continue;
        if (lead < delta0) {
            delta0 = lead;
            argmin_id = row.id;
        }
        auto it = std::find(gens.begin(), gens.end(), row.generation);
        if (it == gens.end()) {
            gens.push_back(row.generation);
            gen_min.push_back(lead);
            gen_count.push_back(1);
        } else {
            const std::size_t i = it - gens.begin();
            gen_min[i] = std::min(gen_min[i], lead);
            ++gen_count[i];
        }
    }

    // Stopping-cube tallies.
    const std::string stop_path = (fs::path(out_dir) / "stopping.csv").string();
    const std::size_t sc_q = column_of(stopping, "Q_id", stop_path);
    const std::size_t sc_found = column_of(stopping, "found", stop_path);
    const std::size_t sc_p = column_of(stopping, "P_id", stop_path);
    const std::size_t sc_dir = column_of(stopping, "direction", stop_path);
    const std::size_t sc_jump = column_of(stopping, "jump", stop_path);
    const std::size_t sc_m = column_of(stopping, "m_used", stop_path);
    const std::size_t sc_sig = column_of(stopping, "significant", stop_path);
    std::uint64_t n_found = 0, n_up = 0, n_down = 0, n_sig = 0;
    for (const auto& row : stopping.rows) {
        if (row.at(sc_found) != "true") continue;
        ++n_found;
        if (row.at(sc_dir) == "up") ++n_up;
        else ++n_down;
        if (row.at(sc_sig) == "true") ++n_sig;
    }

    std::ostringstream md;
    md << "# Harmonic measure laboratory report\n\n";
    md << "config digest: `" << st.digest << "`\n\n";

    md << "## Model\n\n";
    md << "| field | value |\n|---|---|\n";
    md << "| family | " << family_name(st.model.family) << " |\n";
    md << "| ambient dimension | " << st.model.ambient_dim << " |\n";
    md << "| contraction ratio | " << fmt6(st.model.lambda) << " |\n";
    md << "| branching | " << st.model.branching() << " |\n";
    md << "| regularity exponent s | " << fmt6(st.model.s) << " |\n";
    md << "| diameter | " << fmt6(st.model.diam) << " |\n";
    md << "| separation | " << fmt6(st.model.sep) << " |\n";
    md << "| certified regularity constant | " << fmt6(st.model.c0_certified) << " |\n";
    md << "| lattice depth | " << st.lat.max_depth() << " |\n\n";

    md << "## Flatness scan\n\n";
    if (betas.empty()) {
        md << "No scanned cubes.\n\n";
    } else {
        md << "delta0_hat = " << fmt6(delta0) << " at cube `" << argmin_id
           << "` (leading coefficient: "
           << (cfg.beta.kind == ScanKind::inf_plus_hole ? "sup + hole" : "mean-square")
           << ").\n\n";
        md << "| generation | cubes | min leading coefficient |\n|---|---|---|\n";
        for (std::size_t i = 0; i < gens.size(); ++i)
            md << "| " << gens[i] << " | " << gen_count[i] << " | " << fmt6(gen_min[i])
               << " |\n";
        md << '\n';
    }

    md << "## Harmonic measure run\n\n";
    md << meta.diag.n_walkers << " walkers, " << meta.diag.absorbed << " absorbed, "
       << meta.diag.truncated << " truncated, " << meta.diag.resampled
       << " far-field returns; absorption shell " << fmt6(meta.diag.eps_applied)
       << "; seed " << meta.walk.seed << ", " << meta.walk.n_workers << " workers.\n\n";
    if (has_disk_sanity(out_dir)) {
        const DiskCheck disk = read_disk_sanity(out_dir, st.digest);
        md << "Disk sanity (" << disk.arcs << " arcs, " << disk.walkers
           << " walkers): chi-square = " << fmt6(disk.chi_square)
           << (disk.chi_square < disk.threshold ? " < " : " >= ") << fmt6(disk.threshold)
           << " (99.9% quantile, " << (disk.arcs - 1)
           << " dof), max arc deviation = " << fmt6(disk.max_abs_sigma)
           << " sigma: " << (disk.pass ? "PASS" : "FAIL") << ".\n\n";
    }

    md << "## Density jumps\n\n";
    md << "Scanned " << stopping.rows.size() << " cubes of generations 0.."
       << cfg.analysis.stop_scan_depth << " (factor " << fmt6(cfg.analysis.factor)
       << ", depth " << cfg.analysis.stop_m0 << "): " << n_found << " jumps found ("
       << n_up << " up, " << n_down << " down), " << n_sig << " significant.\n\n";
    if (n_found > 0) {
        md << "| Q | P | direction | jump | m | significant |\n|---|---|---|---|---|---|\n";
        for (const auto& row : stopping.rows) {
            if (row.at(sc_found) != "true") continue;
            md << "| `" << row.at(sc_q) << "` | `" << row.at(sc_p) << "` | "
               << row.at(sc_dir) << " | " << fmt6(parse_double(row.at(sc_jump))) << " | "
               << row.at(sc_m) << " | " << row.at(sc_sig) << " |\n";
        }
        md << '\n';
    }

    md << "## Decay and dimension\n\n";
    const std::string decay_path = (fs::path(out_dir) / "decay.csv").string();
    const std::size_t dc_k = column_of(decay, "k", decay_path);
    const std::size_t dc_s = column_of(decay, "S_k", decay_path);
    const std::size_t dc_lo = column_of(decay, "S_k_ci_low", decay_path);
    const std::size_t dc_hi = column_of(decay, "S_k_ci_high", decay_path);
    md << "| k | S_k | 95% interval |\n|---|---|---|\n";
    for (const auto& row : decay.rows)
        md << "| " << row.at(dc_k) << " | " << fmt6(parse_double(row.at(dc_s))) << " | ["
           << fmt6(parse_double(row.at(dc_lo))) << ", "
           << fmt6(parse_double(row.at(dc_hi))) << "] |\n";
    md << '\n';
    md << "gamma_hat = " << fmt6(summary.gamma_hat) << " (95% CI ["
       << fmt6(summary.gamma_ci.lo) << ", " << fmt6(summary.gamma_ci.hi) << "])\n\n";
    md << "- decay factor below one: "
       << (summary.gamma_ci.hi < 1.0 ? "yes (CI excludes 1)" : "not significant") << '\n';
    md << "- dimension bound t = " << fmt6(summary.t_bound)
       << " with heavy-cube content " << fmt6(summary.content_bound)
       << " and light-cube mass " << fmt6(summary.omega_excess) << '\n';
    md << "- local dimension (quantile " << fmt6(cfg.analysis.quantile)
       << "): dim_hat = " << fmt6(local.dim_hat) << " (bootstrap CI ["
       << fmt6(local.ci.lo) << ", " << fmt6(local.ci.hi) << "], " << local.n_cubes
       << " cubes)\n";
    md << "- significant density jumps: " << n_sig << " of " << stopping.rows.size()
       << " scanned cubes\n";

    auto md_out = open_text(fs::path(out_dir) / "report.md");
    md_out << md.str();

    // Plot-ready data files.
    const fs::path plotdir = fs::path(out_dir) / "plotdata";
    ensure_dir(plotdir.string());

    auto curve = open_text(plotdir / "decay_curve.csv");
    curve << "# config_digest=" << st.digest << '\n';
    curve << "k,S_k,ci_low,ci_high\n";
    for (const auto& row : decay.rows)
        curve << row.at(dc_k) << ',' << row.at(dc_s) << ',' << row.at(dc_lo) << ','
              << row.at(dc_hi) << '\n';

    auto hist = open_text(plotdir / "beta_hist.csv");
    hist << "# config_digest=" << st.digest << '\n';
    hist << "coefficient,bin_low,bin_high,count\n";
    {
        std::vector<double> v2, vi, vh, v1;
        for (const BetaRow& row : betas) {
            v2.push_back(row.beta2);
            vi.push_back(row.beta_inf);
            vh.push_back(row.beta_hole);
            v1.push_back(row.beta1);
        }
        write_histogram(hist, "beta2", std::move(v2));
        write_histogram(hist, "beta_inf", std::move(vi));
        write_histogram(hist, "beta_hole", std::move(vh));
        write_histogram(hist, "beta1", std::move(v1));
    }

    auto slopes = open_text(plotdir / "dimension_slopes.csv");
    slopes << "# config_digest=" << st.digest << '\n';
    slopes << "cube_id,slope,omega\n";
    {
        std::size_t i = 0;
        const int deepest = st.lat.max_depth();
        for (std::uint64_t code = 0; code < st.lat.gen_size(deepest); ++code) {
            const Word w{deepest, code};
            if (omega.hits(w) == 0) continue;
            slopes << st.lat.id(w) << ',' << format_double(local.slopes.at(i)) << ','
                   << format_double(local.weights.at(i)) << '\n';
            ++i;
        }
    }

    auto stub = open_text(plotdir / "plot.py");
    stub << kPlotStub;
}

} // namespace hml
