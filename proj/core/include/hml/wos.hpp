#pragma once

#include <cstdint>
#include <thread>
#include <vector>

#include "hml/lattice.hpp"
#include "hml/rng.hpp"
#include "hml/stats.hpp"

namespace hml {

enum class PoleMode { finite_pole, far_sphere };

// Walk parameters. Lengths are expressed in units of diam(E) and scaled
// internally; determinism contract: outputs are a pure function of
// (domain, config) including n_workers, with worker w consuming only the
// stream derived from (seed, w) and a fixed share of walkers.
struct WalkConfig {
    double eps = 0.0;             // absorption shell; 0 derives the default
                                  // lambda^(max_depth + 2)
    double shrink = 0.95;         // jump radius as a fraction of the distance
    PoleMode pole_mode = PoleMode::far_sphere;
    Vec pole;                     // finite_pole start
    double radius_factor = 10.0;  // far_sphere start radius
    double r_escape = 12.0;       // far-field control radius
    std::uint64_t max_steps = 100000;
    std::uint64_t n_walkers = 0;
    std::uint64_t seed = 1;
    int n_workers = 1;
};

struct WalkDiagnostics {
    std::uint64_t n_walkers = 0;
    std::uint64_t absorbed = 0;
    std::uint64_t truncated = 0;   // hit max_steps
    std::uint64_t resampled = 0;   // far-field control events
    std::uint64_t steps_total = 0;
    std::uint64_t seed = 0;
    int n_workers = 0;
    double eps_applied = 0.0;      // absolute absorption shell
    double wall_time_s = 0.0;
};

// Absorbed-mass estimate per cube, aggregated from deepest-generation hit
// counts (each absorbed walker lands in exactly one deepest cube, so every
// generation's masses sum to the absorbed total by construction). Synthetic
// estimates carry exact masses and degenerate intervals instead.
class OmegaEstimate {
public:
    static OmegaEstimate from_hits(const CubeLattice& lat,
                                   std::vector<std::uint64_t> deepest_hits,
                                   WalkDiagnostics diag);
    static OmegaEstimate exact(const CubeLattice& lat, std::vector<double> deepest_masses);

    const CubeLattice& lattice() const { return *lat_; }
    bool is_exact() const { return exact_; }
    std::uint64_t total() const { return total_; }
    const WalkDiagnostics& diagnostics() const { return diag_; }

    std::uint64_t hits(const Word& w) const;
    // Estimated omega mass of the cube (hits / total, or the exact mass).
    double omega(const Word& w) const;
    Interval ci(const Word& w) const;

    const std::vector<std::uint64_t>& deepest_hits() const { return hits_deepest_; }

private:
    const CubeLattice* lat_ = nullptr;
    bool exact_ = false;
    std::uint64_t total_ = 0;
    std::vector<std::uint64_t> hits_deepest_;
    std::vector<std::uint64_t> hits_cum_;   // prefix sums, size + 1
    std::vector<double> mass_cum_;          // exact mode prefix sums
    WalkDiagnostics diag_;
};

// Runs n_walkers against the attractor and bins absorptions by the nearest
// deepest-generation cube. Throws NoAbsorption when more than half the
// walkers hit the step limit.
OmegaEstimate run_walkers(const IfsModel& model, const CubeLattice& lat,
                          const WalkConfig& cfg);

struct PoleComparisonRow {
    Word word;
    std::vector<double> omega;      // one entry per pole
    std::vector<Interval> ci;
    bool ci_overlap = true;         // pairwise overlap of all pole intervals
};

struct PoleComparison {
    std::vector<PoleComparisonRow> rows;   // cubes of the chosen generation
    double max_abs_log_ratio = 0.0;        // over cubes hit under every pole
    bool all_within_ci = true;
    int generation = 0;
};

// Independent runs from each pole (streams split per pole), compared on one
// generation of cubes.
PoleComparison pole_consistency(const IfsModel& model, const CubeLattice& lat,
                                const WalkConfig& cfg, const std::vector<Vec>& poles,
                                int generation);

// Self-check against the one domain with a closed-form exit law: walkers
// dropped at the center of the unit disk must land uniformly, so every equal
// arc of the circle carries mass 1/arcs.
struct DiskCheck {
    int arcs = 0;
    std::uint64_t walkers = 0;
    double eps = 0.0;              // absolute absorption shell
    std::uint64_t seed = 0;
    int n_workers = 0;
    std::vector<std::uint64_t> counts;
    double chi_square = 0.0;
    double threshold = 0.0;        // 99.9% chi-square quantile, arcs - 1 dof
    double max_abs_sigma = 0.0;    // worst arc deviation in binomial sigmas
    bool pass = false;             // chi_square < threshold and max_abs_sigma < 4
    double wall_time_s = 0.0;
};

DiskCheck run_disk_check(std::uint64_t walkers, int arcs, double eps,
                         std::uint64_t seed, int n_workers);

// Generic engine, exposed so tests can drive analytic domains (e.g. a
// circle) through the exact same walk logic. Domain requirements:
//   int dim();                      2 or 3
//   Vec center(); double diam();    far-field reference frame
//   double distance(Vec, cutoff);   value in [dist, dist + slack], slack() bound
//   uint32_t bin(Vec);              absorption bin in [0, n_bins)
struct EngineCounters {
    std::uint64_t absorbed = 0;
    std::uint64_t truncated = 0;
    std::uint64_t resampled = 0;
    std::uint64_t steps = 0;
};

template <class Domain>
void walk_worker(const Domain& dom, const WalkConfig& cfg, std::uint64_t seed,
                 std::uint64_t stream, std::uint64_t count,
                 std::vector<std::uint64_t>& hits, EngineCounters& ctr) {
    StreamRng rng(seed, stream);
    const int dim = dom.dim();
    const Vec center = dom.center();
    const double diam = dom.diam();
    const double eps_abs = cfg.eps * diam;
    const double slack = dom.slack();
    const double step_cap = 8.0 * diam;            // planar step bound
    const double far_radius = cfg.r_escape * diam;
    const double start_radius = cfg.radius_factor * diam;
    const double cutoff = (cfg.r_escape + 2.0) * diam;

    for (std::uint64_t i = 0; i < count; ++i) {
        Vec x = cfg.pole_mode == PoleMode::finite_pole
                    ? cfg.pole
                    : center + rng.next_dir(dim) * start_radius;
        bool done = false;
        for (std::uint64_t step = 0; step < cfg.max_steps; ++step) {
            ++ctr.steps;
            const double d = dom.distance(x, cutoff);
            if (d <= eps_abs) {
                ++hits[dom.bin(x)];
                ++ctr.absorbed;
                done = true;
                break;
            }
            double radius = cfg.shrink * (d - slack);
            if (dim == 2) radius = std::min(radius, step_cap);
            if (radius <= 0.0) {
                // Distance resolved below the oracle slack: treat as contact.
                ++hits[dom.bin(x)];
                ++ctr.absorbed;
                done = true;
                break;
            }
            x = x + rng.next_dir(dim) * radius;

            const Vec rel = x - center;
            const double rho = rel.norm();
            if (rho > far_radius) {
                ++ctr.resampled;
                if (dim == 2) {
                    // Exact re-entry: a planar Brownian path outside the
                    // control circle returns almost surely, first touching
                    // the circle at an angle offset with Poisson kernel law
                    // (parameter R / rho around the current direction).
                    const double ang = std::atan2(rel.y, rel.x) +
                                       rng.next_poisson_angle(far_radius / rho);
                    x = center + Vec{std::cos(ang), std::sin(ang), 0.0} * far_radius;
                } else if (cfg.pole_mode == PoleMode::far_sphere) {
                    // Conditioning on return, restarted uniformly on the
                    // start sphere.
                    x = center + rng.next_dir3() * start_radius;
                } else {
                    // Rejection form of conditioning on hitting the set.
                    x = cfg.pole;
                }
            }
        }
        if (!done) ++ctr.truncated;
    }
}

template <class Domain>
std::vector<std::uint64_t> run_walk_engine(const Domain& dom, const WalkConfig& cfg,
                                           std::uint32_t n_bins, EngineCounters& total) {
    if (!(cfg.shrink >= 0.9 && cfg.shrink < 1.0))
        throw ConfigError("shrink must lie in [0.9, 1)");
    if (!(cfg.r_escape > 4.0)) throw ConfigError("r_escape must exceed 4");
    if (cfg.pole_mode == PoleMode::far_sphere && !(cfg.r_escape > cfg.radius_factor) &&
        dom.dim() == 3)
        throw ConfigError("r_escape must exceed radius_factor for spatial far starts");
    if (cfg.n_walkers == 0) throw ConfigError("n_walkers must be positive");
    if (cfg.n_workers < 1) throw ConfigError("n_workers must be positive");
    if (!(cfg.eps > 0.0)) throw ConfigError("eps must be positive");

    const int w = cfg.n_workers;
    std::vector<std::vector<std::uint64_t>> hits(w, std::vector<std::uint64_t>(n_bins, 0));
    std::vector<EngineCounters> counters(w);

    const std::uint64_t base = cfg.n_walkers / static_cast<std::uint64_t>(w);
    const std::uint64_t extra = cfg.n_walkers % static_cast<std::uint64_t>(w);
    auto count_of = [&](int i) {
        return base + (static_cast<std::uint64_t>(i) < extra ? 1 : 0);
    };

    if (w == 1) {
        walk_worker(dom, cfg, cfg.seed, 0, cfg.n_walkers, hits[0], counters[0]);
    } else {
        std::vector<std::thread> threads;
        for (int i = 0; i < w; ++i)
            threads.emplace_back([&, i] {
                walk_worker(dom, cfg, cfg.seed, static_cast<std::uint64_t>(i), count_of(i),
                            hits[i], counters[i]);
            });
        for (auto& t : threads) t.join();
    }

    std::vector<std::uint64_t> merged(n_bins, 0);
    for (int i = 0; i < w; ++i) {
        for (std::uint32_t b = 0; b < n_bins; ++b) merged[b] += hits[i][b];
        total.absorbed += counters[i].absorbed;
        total.truncated += counters[i].truncated;
        total.resampled += counters[i].resampled;
        total.steps += counters[i].steps;
    }
    return merged;
}

} // namespace hml
