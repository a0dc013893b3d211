// Release gate. Each criterion prints exactly one [PASS]/[FAIL] line with
// the measured numbers behind the verdict; the exit code is the number of
// failures. Criterion 9 drives the installed CLI binary, whose path must be
// passed as argv[1].
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <boost/multiprecision/cpp_int.hpp>

#include "hml/analysis.hpp"
#include "hml/beta.hpp"
#include "hml/errors.hpp"
#include "hml/fractal.hpp"
#include "hml/lattice.hpp"
#include "hml/wos.hpp"

namespace fs = std::filesystem;
using namespace hml;
using Rat = boost::multiprecision::cpp_rational;

namespace {

std::string g_hml_bin;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& on_fail) {
        if (!cond) {
            ok = false;
            detail << " !" << on_fail;
        }
    }
};

IfsModel corner_model(double lambda) {
    IfsSpec spec;
    spec.family = Family::corner_cantor_2d;
    spec.lambda = lambda;
    return build_ifs(spec);
}

// ---------------------------------------------------------------- C1
// Walkers released at the center of the unit disk must land uniformly on the
// circle; the engine's only closed-form cross-check.
bool c1_disk_exit_law(std::string& detail) {
    Check c;
    const DiskCheck dc = run_disk_check(100000, 16, 1e-3, 20260815u, 1);
    c.require(dc.pass, "uniformity check failed");
    c.require(dc.wall_time_s < 60.0, "too slow");
    c.detail << "chi2=" << dc.chi_square << " (limit " << dc.threshold
             << "), max|sigma|=" << dc.max_abs_sigma << ", "
             << dc.wall_time_s << "s";
    detail = c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------- C2
// The closed-form mean-square flatness must match a dense line grid from
// below (it minimizes over all lines, the grid over a subset) and must
// vanish on exactly collinear inputs.
bool c2_beta2_vs_grid(std::string& detail) {
    Check c;
    std::mt19937_64 rng(20260815u);
    std::uniform_real_distribution<double> coord(0.0, 1.0);
    std::uniform_real_distribution<double> wdist(0.5, 1.5);

    const int n_angles = 10000;
    const int n_offsets = 1000;
    const double pi = std::acos(-1.0);
    double worst_excess = 0.0;  // pca - grid, should stay <= ~0
    double worst_gap = 0.0;     // grid - pca, small for a dense grid

    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Vec> pts(20);
        std::vector<double> w(20);
        for (int i = 0; i < 20; ++i) {
            pts[i] = {coord(rng), coord(rng), 0.0};
            w[i] = wdist(rng);
        }
        const Vec x{0.5, 0.5, 0.0};
        const double r = 0.75;
        const double pca = beta2_points(pts, w, 2, x, r).value;

        // Per angle the grid cost is quadratic in the offset, so evaluating
        // A - 2Bc + Wc^2 on the offset grid equals the pointwise sum.
        double best = 1e300;
        double wsum = 0.0;
        for (double wi : w) wsum += wi;
        for (int a = 0; a < n_angles; ++a) {
            const double th = pi * (a + 0.5) / n_angles;
            const Vec n{std::cos(th), std::sin(th), 0.0};
            double A = 0.0;
            double B = 0.0;
            for (int i = 0; i < 20; ++i) {
                const double p = n.dot(pts[i] - x);
                A += w[i] * p * p;
                B += w[i] * p;
            }
            for (int j = 0; j < n_offsets; ++j) {
                const double off = -r + (j + 0.5) * (2.0 * r / n_offsets);
                const double msq = A - 2.0 * B * off + wsum * off * off;
                best = std::min(best, msq);
            }
        }
        const double grid = std::sqrt(std::max(0.0, best) / (wsum * r * r));
        worst_excess = std::max(worst_excess, pca - grid);
        worst_gap = std::max(worst_gap, grid - pca);
    }
    c.require(worst_excess <= 1e-9, "exact minimum above grid minimum");

    // Exactly collinear dyadic points: the residual must be zero to fp noise.
    double worst_collinear = 0.0;
    for (int k = 0; k < 10; ++k) {
        const Vec a{k / 16.0, 0.25 + k / 32.0, 0.0};
        const Vec d{0.5, 0.25, 0.0};
        std::vector<Vec> pts;
        std::vector<double> w;
        for (int i = 0; i < 16; ++i) {
            pts.push_back(a + (i / 16.0) * d);
            w.push_back(1.0 + (i % 4) / 4.0);
        }
        const Vec x = a + 0.5 * d;
        worst_collinear =
            std::max(worst_collinear, beta2_points(pts, w, 2, x, 1.0).value);
    }
    c.require(worst_collinear <= 1e-12, "collinear residual too large");

    c.detail << "100 random clouds, 10000x1000 grid: max(pca-grid)="
             << worst_excess << ", max(grid-pca)=" << worst_gap
             << ", collinear max=" << worst_collinear;
    detail = c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------- C3
// Lattice bookkeeping must be exact and the boundary collars of a cube must
// be empty below the first-generation gap and decay with a positive fitted
// exponent above it.
bool c3_lattice_audit(std::string& detail) {
    Check c;
    const IfsModel model = corner_model(0.25);
    const CubeLattice lat = build_lattice(model, 6);

    c.require(lat.n_cubes() == 5461, "cube count");
    std::uint64_t expect = 1;
    for (int g = 0; g <= 6; ++g) {
        c.require(lat.gen_size(g) == expect, "generation size");
        expect *= 4;
        c.require(lat.mu(g) * std::ldexp(1.0, 2 * g) == 1.0, "mass not exact");
        if (g < 6) {
            const double ratio = lat.ell(g) / lat.ell(g + 1);
            c.require(std::abs(ratio - 4.0) <= 4e-12, "scale ratio");
        }
    }

    // Membership agreement between the inner ball and the cylinder range.
    const MuSample sample = cylinder_points(model, 8);
    const Word q{2, 9};
    const double r_in = lat.c_inner() * lat.ell(2);
    const std::uint64_t span = 1ULL << 12;  // 4^6 points per depth-2 cylinder
    std::uint64_t ball_points = 0;
    bool membership_ok = true;
    for (std::uint64_t i = 0; i < sample.points.size(); ++i) {
        const bool inside = i >= q.code * span && i < (q.code + 1) * span;
        const double d = dist(sample.points[i], lat.center(q));
        if (d <= r_in) {
            ++ball_points;
            if (!inside) membership_ok = false;
        }
        if (inside && d > lat.ell(2)) membership_ok = false;
    }
    c.require(membership_ok && ball_points > 0, "inner-ball membership");

    // Collars: the nearest sibling sits sep away, which is
    // sep / (lambda * diam) cube side lengths; below that the collar is
    // empty, above it the mass follows a positive power of t.
    const DistanceOracle oracle(model);
    const Word q1{1, 0};
    const double gap_units = model.sep / (model.lambda * model.diam);
    const ThinBoundaryAudit empty =
        audit_thin_boundary(lat, sample, oracle, q1, {0.2, 0.5, 1.0, 1.3});
    for (const auto& row : empty.rows)
        c.require(row.collar_mass == 0.0, "collar below the gap not empty");
    c.require(empty.fit_points == 0, "degenerate fit rows");

    const ThinBoundaryAudit fit = audit_thin_boundary(
        lat, sample, oracle, q1, {1.5, 1.6, 1.7, 1.8, 1.9, 2.0});
    c.require(fit.fit_points >= 2, "not enough collar rows to fit");
    c.require(fit.eta_hat > 0.0, "collar exponent not positive");
    double prev = -1.0;
    for (const auto& row : fit.rows) {
        c.require(row.ratio >= prev && row.ratio >= 0.0 && row.ratio <= 1.0,
                  "collar ratios not monotone in [0,1]");
        prev = row.ratio;
    }

    c.detail << "5461 cubes exact, gap=" << gap_units
             << " sides, collar(t<=1.3)=0, eta_hat=" << fit.eta_hat
             << ", c1_hat=" << fit.c1_hat;
    detail = c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------- C4
// A five-map model with hand-picked square masses admits an exact rational
// factor-16 density drop at the first child, and the mass-decay bound holds
// rationally; the floating pipeline must reproduce both.
bool c4_planted_jump(std::string& detail) {
    Check c;

    // Rational side. mu_i = 1/5, omega chosen so omega_i / mu_i are exact
    // squares: omega = (1, 49, 25, 4, 1) / 80.
    const long num[5] = {1, 49, 25, 4, 1};
    const Rat mu(1, 5);
    Rat omega_sum = 0;
    for (long n : num) omega_sum += Rat(n, 80);
    c.require(omega_sum == 1, "omega does not sum to one");

    // Child 0 drops by exactly 16: omega_0 / mu = (1/80) / (1/5) = 1/16.
    c.require(Rat(1, 80) * 16 == mu, "planted drop is not exactly 16");

    // S_1 = sum mu_i sqrt(omega_i / mu_i) with rational square roots
    // (1,7,5,2,1)/4, against the bound gamma = 1 - (1/4) mu_min.
    const long root[5] = {1, 7, 5, 2, 1};
    Rat s1 = 0;
    for (long b : root) s1 += mu * Rat(b, 4);
    const Rat gamma = 1 - Rat(1, 4) * mu;
    c.require(s1 == Rat(4, 5), "S1 is not 4/5");
    c.require(s1 <= gamma, "decay bound violated rationally");

    // Cauchy-Schwarz over the uniform weights, exactly: equality holds iff
    // the vector is constant.
    std::mt19937_64 rng(404u);
    std::uniform_int_distribution<long> numer(0, 99);
    std::uniform_int_distribution<long> denom(1, 20);
    bool cs_ok = true;
    for (int t = 0; t < 205; ++t) {
        std::vector<Rat> b(5);
        if (t < 5) {
            const Rat v(numer(rng) + 1, denom(rng));
            for (auto& bi : b) bi = v;
        } else {
            for (auto& bi : b) bi = Rat(numer(rng), denom(rng));
        }
        Rat mean = 0, mean_sq = 0;
        bool constant = true;
        for (const Rat& bi : b) {
            mean += bi * mu;
            mean_sq += bi * bi * mu;
            if (bi != b[0]) constant = false;
        }
        const Rat lhs = mean * mean;
        if (constant ? lhs != mean_sq : lhs >= mean_sq) cs_ok = false;
    }
    c.require(cs_ok, "rational Cauchy-Schwarz audit failed");

    // Floating pipeline on the same model: offsets (1 - lambda) times the
    // four corners and the center, masses scaled to small integers so the
    // comparisons stay exact in doubles.
    IfsSpec spec;
    spec.family = Family::custom;
    spec.ambient_dim = 2;
    spec.lambda = 0.2;
    const double s = 0.8;
    spec.maps = {{0.2, {0.0, 0.0, 0.0}},
                 {0.2, {s, 0.0, 0.0}},
                 {0.2, {0.0, s, 0.0}},
                 {0.2, {s, s, 0.0}},
                 {0.2, {s / 2, s / 2, 0.0}}};
    const IfsModel model = build_ifs(spec);
    const CubeLattice lat = build_lattice(model, 1);
    const OmegaEstimate est =
        OmegaEstimate::exact(lat, {1.0, 49.0, 25.0, 4.0, 1.0});

    const Word root_w{0, 0};
    const StoppingReport stop = find_stopping_cube(lat, est, root_w, 1, 16.0);
    c.require(stop.found, "stopping cube not found");
    c.require(stop.direction == JumpDirection::down, "wrong jump direction");
    c.require(stop.p.depth == 1 && stop.p.code == 0, "wrong stopping cube");
    c.require(stop.jump == 16.0, "jump is not exactly 16");
    c.require(stop.significant, "exact jump not significant");

    const DecaySeries dec = decay_series(lat, est, root_w, 1, 1);
    const double ratio = dec.s_values[1] / dec.s_values[0];
    c.require(std::abs(ratio - 0.8) <= 1e-12, "S1/S0 is not 0.8");
    c.require(std::abs(dec.gamma_hat - 0.8) <= 1e-12, "gamma_hat is not 0.8");
    c.require(dec.gamma_hat <= 0.95, "gamma_hat above the rational bound");

    c.detail << "drop=16 exact, S1=4/5 <= gamma=19/20, CS audit 205 cases, "
             << "pipeline jump=" << stop.jump << ", gamma_hat=" << dec.gamma_hat;
    detail = c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------- C5
// The flatness scan must be positive, stable across generations, and agree
// with a dense literal grid on the scanned minimizers.
bool c5_scan_cross_check(std::string& detail) {
    Check c;
    const IfsModel model = corner_model(0.25);
    const CubeLattice lat = build_lattice(model, 6);
    const MuSample sample = cylinder_points(model, 7);
    const DistanceOracle oracle(model);

    const NonflatnessScan scan =
        scan_nonflatness(lat, sample, oracle, ScanKind::beta2, 0, 5);
    c.require(scan.delta0 > 0.0, "flatness floor not positive");

    double gmin = 1e300, gmax = 0.0;
    for (double v : scan.per_gen_min) {
        gmin = std::min(gmin, v);
        gmax = std::max(gmax, v);
    }
    c.require(gmax / gmin <= 1.05, "per-generation minima drift above 5%");

    // Brute check on the global argmin plus each generation's argmin.
    std::vector<Word> targets{scan.argmin};
    for (int g = 0; g <= 5; ++g) {
        const ScanRow* best = nullptr;
        for (const auto& row : scan.rows)
            if (row.word.depth == g && (!best || row.beta2 < best->beta2))
                best = &row;
        c.require(best != nullptr, "generation missing from scan");
        if (best) targets.push_back(best->word);
    }

    const double pi = std::acos(-1.0);
    double worst_excess = 0.0, worst_gap = 0.0;
    for (const Word& q : targets) {
        const Vec x = lat.center(q);
        const double r = lat.ell(q.depth);
        std::vector<Vec> pts;
        for (const Vec& p : sample.points)
            if (dist(p, x) <= r) pts.push_back(p);
        const double wsum = sample.weight * pts.size();

        double best = 1e300;
        for (int a = 0; a < 2000; ++a) {
            const double th = pi * (a + 0.5) / 2000;
            const Vec n{std::cos(th), std::sin(th), 0.0};
            double A = 0.0, B = 0.0;
            for (const Vec& p : pts) {
                const double pr = n.dot(p - x);
                A += sample.weight * pr * pr;
                B += sample.weight * pr;
            }
            for (int j = 0; j < 500; ++j) {
                const double off = -r + (j + 0.5) * (2.0 * r / 500);
                best = std::min(best, A - 2.0 * B * off + wsum * off * off);
            }
        }
        const double grid = std::sqrt(std::max(0.0, best) / (wsum * r * r));

        double pca = 0.0;
        for (const auto& row : scan.rows)
            if (row.word.depth == q.depth && row.word.code == q.code)
                pca = row.beta2;
        worst_excess = std::max(worst_excess, pca - grid);
        worst_gap = std::max(worst_gap, grid - pca);
    }
    c.require(worst_excess <= 1e-9, "scan value above literal grid");
    c.require(worst_gap <= 0.02, "scan value far below literal grid");

    c.detail << "delta0=" << scan.delta0 << ", per-gen spread="
             << gmax / gmin << ", grid agreement on " << targets.size()
             << " cubes: max(pca-grid)=" << worst_excess << ", max(grid-pca)="
             << worst_gap;
    detail = c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------- C6
// A full walker run on the planar model must certify mass decay (gamma
// confidence interval strictly below one) and locate density drops under
// every shallow cube.
bool c6_walker_decay(std::string& detail) {
    Check c;
    const auto t0 = Clock::now();
    const IfsModel model = corner_model(0.25);
    const CubeLattice lat = build_lattice(model, 6);

    WalkConfig cfg;
    cfg.n_walkers = 1200000;
    cfg.seed = 101;
    const OmegaEstimate est = run_walkers(model, lat, cfg);

    const DecaySeries dec = decay_series(lat, est, Word{0, 0}, 2, 3);
    c.require(dec.gamma_ci.hi < 1.0, "gamma CI reaches 1");
    c.require(dec.gamma_hat > 0.0 && dec.gamma_hat < 1.0, "gamma_hat range");

    std::uint64_t found = 0, significant = 0, scanned = 0;
    for (int g = 0; g <= 2; ++g) {
        for (std::uint64_t code = 0; code < lat.gen_size(g); ++code) {
            const Word q{g, code};
            const StoppingReport rep =
                find_stopping_cube(lat, est, q, std::min(6, 6 - g), 16.0);
            ++scanned;
            if (rep.found && rep.direction == JumpDirection::down) ++found;
            if (rep.found && rep.significant) ++significant;
        }
    }
    c.require(found == scanned, "not every shallow cube has a drop");
    c.require(significant >= 1, "no drop survives its confidence interval");

    c.detail << "gamma_hat=" << dec.gamma_hat << " CI [" << dec.gamma_ci.lo
             << ", " << dec.gamma_ci.hi << "], drops " << found << "/"
             << scanned << " (" << significant << " significant), "
             << seconds_since(t0) << "s";
    detail = c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------- C7
// The cumulative sup-flatness budget must stay within a constant factor of
// the mean-flatness budget as the generation window deepens.
bool c7_flatness_budget(std::string& detail) {
    Check c;
    const auto t0 = Clock::now();
    c.detail << "ratios";
    for (double lambda : {0.25, 0.2}) {
        const IfsModel model = corner_model(lambda);
        const CubeLattice lat = build_lattice(model, 6);
        const MuSample sample = cylinder_points(model, 8);
        const auto rows =
            flatness_budget_series(lat, sample, Word{0, 0}, 4, 360);
        c.require(rows.size() == 5, "row count");

        double rmin = 1e300, rmax = 0.0;
        c.detail << " lambda=" << lambda << ":";
        for (std::size_t n = 1; n < rows.size(); ++n) {
            const double ratio = rows[n].ratio;
            c.require(std::isfinite(ratio) && ratio > 0.0, "ratio not finite");
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
            c.detail << " " << ratio;
        }
        c.require(rmax / rmin < 4.0, "budget ratio drifts by 4x");
        c.detail << " (spread " << rmax / rmin << ")";
    }
    c.detail << ", " << seconds_since(t0) << "s";
    detail = c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------- C8
// Hitting estimates must not depend on the pole: two far poles on opposite
// sides must agree on every generation-2 cube within joint confidence
// intervals.
bool c8_pole_agreement(std::string& detail) {
    Check c;
    const auto t0 = Clock::now();
    const IfsModel model = corner_model(0.25);
    const CubeLattice lat = build_lattice(model, 3);
    const Vec ctr = model.bbox.center();
    const double d = model.diam;

    WalkConfig cfg;
    cfg.n_walkers = 200000;
    cfg.seed = 55;
    cfg.pole_mode = PoleMode::finite_pole;
    const double dist_diams = 100.0;
    const std::vector<Vec> poles{{ctr.x - dist_diams * d, ctr.y, 0.0},
                                 {ctr.x + dist_diams * d, ctr.y, 0.0}};
    const PoleComparison cmp = pole_consistency(model, lat, cfg, poles, 2);

    int overlap = 0;
    for (const auto& row : cmp.rows) overlap += row.ci_overlap ? 1 : 0;
    c.require(dist_diams >= 10.0, "poles closer than ten diameters");
    c.require(cmp.all_within_ci, "pole estimates disagree");

    c.detail << "poles at " << dist_diams << " diam, overlap " << overlap
             << "/" << cmp.rows.size() << ", max|log ratio|="
             << cmp.max_abs_log_ratio << ", " << seconds_since(t0) << "s";
    detail = c.detail.str();
    return c.ok;
}

// ---------------------------------------------------------------- C9
// Two CLI runs of the full pipeline from one config must produce identical
// artifacts; only recorded wall times may differ.
int run_stage(const std::string& stage, const fs::path& cfg, const fs::path& out) {
    const std::string cmd = g_hml_bin + " " + stage + " --config " + cfg.string() +
                            " --out " + out.string() + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    if (st == -1 || !WIFEXITED(st)) return -1;
    return WEXITSTATUS(st);
}

std::vector<std::string> relative_files(const fs::path& dir) {
    std::vector<std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file())
            out.push_back(fs::relative(e.path(), dir).string());
    std::sort(out.begin(), out.end());
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string drop_wall_time_lines(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line))
        if (line.find("wall_time") == std::string::npos) out << line << '\n';
    return out.str();
}

bool c9_rerun_identical(std::string& detail) {
    Check c;
    const auto t0 = Clock::now();
    const fs::path base = fs::temp_directory_path() / "hml_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    const fs::path cfg = base / "config.json";
    {
        std::ofstream out(cfg);
        out << R"({
  "seed": 7,
  "workers": 1,
  "model": {"family": "corner_cantor_2d", "lambda": 0.25},
  "lattice": {"max_depth": 4},
  "sample": {"depth": 6},
  "beta": {"kind": "all", "angle_grid": 90, "depth_max": 3},
  "walk": {"n_walkers": 60000},
  "analysis": {"m0": 1, "k_max": 3, "stop_scan_depth": 2, "stop_m0": 2},
  "disk_sanity": {"walkers": 20000, "arcs": 16, "eps": 0.001}
})";
    }

    const char* stages[] = {"generate", "betas", "harmonic", "analyze", "report"};
    for (const char* run : {"a", "b"}) {
        const fs::path out = base / run;
        fs::create_directories(out);
        for (const char* stage : stages) {
            const int rc = run_stage(stage, cfg, out);
            c.require(rc == 0, std::string(stage) + " exited " + std::to_string(rc));
            if (rc != 0) break;
        }
        if (!c.ok) break;
    }

    std::size_t n_files = 0;
    if (c.ok) {
        const auto files_a = relative_files(base / "a");
        const auto files_b = relative_files(base / "b");
        c.require(files_a == files_b, "file sets differ");
        n_files = files_a.size();
        c.require(n_files >= 8, "pipeline produced too few files");
        if (files_a == files_b) {
            for (const auto& rel : files_a) {
                std::string lhs = read_file(base / "a" / rel);
                std::string rhs = read_file(base / "b" / rel);
                const std::string name = fs::path(rel).filename().string();
                if (name == "run_meta.json" || name == "disk_sanity.json") {
                    lhs = drop_wall_time_lines(lhs);
                    rhs = drop_wall_time_lines(rhs);
                }
                c.require(lhs == rhs, rel + " differs between runs");
            }
        }
    }

    c.detail << "5 stages x 2 runs, " << n_files
             << " files byte-compared (wall times excluded), "
             << seconds_since(t0) << "s";
    detail = c.detail.str();
    return c.ok;
}

struct Criterion {
    const char* name;
    bool (*fn)(std::string&);
};

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-hml-binary>\n", argv[0]);
        return 64;
    }
    g_hml_bin = argv[1];

    const Criterion criteria[] = {
        {"C1 disk exit law", c1_disk_exit_law},
        {"C2 exact flatness vs grid", c2_beta2_vs_grid},
        {"C3 lattice and collar audit", c3_lattice_audit},
        {"C4 planted density drop", c4_planted_jump},
        {"C5 scan vs literal grid", c5_scan_cross_check},
        {"C6 walker decay certificate", c6_walker_decay},
        {"C7 flatness budget bounded", c7_flatness_budget},
        {"C8 pole independence", c8_pole_agreement},
        {"C9 deterministic rerun", c9_rerun_identical},
    };

    int failures = 0;
    for (const Criterion& cr : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = cr.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", cr.name, detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}
