#include "hml/wos.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace hml {

OmegaEstimate OmegaEstimate::from_hits(const CubeLattice& lat,
                                       std::vector<std::uint64_t> deepest_hits,
                                       WalkDiagnostics diag) {
    if (deepest_hits.size() != lat.gen_size(lat.max_depth()))
        throw ConfigError("hit vector does not match the deepest generation");
    OmegaEstimate est;
    est.lat_ = &lat;
    est.exact_ = false;
    est.hits_deepest_ = std::move(deepest_hits);
    est.hits_cum_.assign(est.hits_deepest_.size() + 1, 0);
    for (std::size_t i = 0; i < est.hits_deepest_.size(); ++i)
        est.hits_cum_[i + 1] = est.hits_cum_[i] + est.hits_deepest_[i];
    est.total_ = est.hits_cum_.back();
    est.diag_ = diag;
    return est;
}

OmegaEstimate OmegaEstimate::exact(const CubeLattice& lat, std::vector<double> deepest_masses) {
    if (deepest_masses.size() != lat.gen_size(lat.max_depth()))
        throw ConfigError("mass vector does not match the deepest generation");
    OmegaEstimate est;
    est.lat_ = &lat;
    est.exact_ = true;
    est.mass_cum_.assign(deepest_masses.size() + 1, 0.0);
    for (std::size_t i = 0; i < deepest_masses.size(); ++i) {
        if (deepest_masses[i] < 0.0) throw ConfigError("negative mass");
        est.mass_cum_[i + 1] = est.mass_cum_[i] + deepest_masses[i];
    }
    est.total_ = 1;
    return est;
}

std::uint64_t OmegaEstimate::hits(const Word& w) const {
    const auto range = descendant_range(*lat_, w, lat_->max_depth() - w.depth);
    if (exact_) return mass_cum_[range.end] > mass_cum_[range.begin] ? 1 : 0;
    return hits_cum_[range.end] - hits_cum_[range.begin];
}

double OmegaEstimate::omega(const Word& w) const {
    const auto range = descendant_range(*lat_, w, lat_->max_depth() - w.depth);
    if (exact_) return mass_cum_[range.end] - mass_cum_[range.begin];
    if (total_ == 0) return 0.0;
    return static_cast<double>(hits_cum_[range.end] - hits_cum_[range.begin]) /
           static_cast<double>(total_);
}

Interval OmegaEstimate::ci(const Word& w) const {
    if (exact_) {
        const double v = omega(w);
        return {v, v};
    }
    return wilson_interval(hits(w), total_);
}

namespace {

// Attractor-backed domain for the generic engine.
struct AttractorDomain {
    const IfsModel* model;
    const DistanceOracle* oracle;
    int deepest;
    Vec center_;
    double diam_;

    int dim() const { return model->ambient_dim; }
    Vec center() const { return center_; }
    double diam() const { return diam_; }
    double slack() const { return oracle->tol(); }
    double distance(const Vec& x, double cutoff) const {
        return oracle->to_attractor(x, cutoff);
    }
    std::uint32_t bin(const Vec& x) const {
        return static_cast<std::uint32_t>(oracle->nearest_cylinder(x, deepest).code);
    }
};

} // namespace

OmegaEstimate run_walkers(const IfsModel& model, const CubeLattice& lat,
                          const WalkConfig& cfg) {
    WalkConfig c = cfg;
    double lam_deep = 1.0;
    for (int i = 0; i < lat.max_depth(); ++i) lam_deep *= model.lambda;
    if (c.eps <= 0.0) c.eps = lam_deep * model.lambda * model.lambda;
    if (c.eps > lam_deep)
        throw ConfigError("eps must not exceed lambda^max_depth (deepest cube scale)");

    DistanceOracle oracle(model);
    AttractorDomain dom{&model, &oracle, lat.max_depth(), lat.model().bbox.center(),
                        model.diam};

    const auto t0 = std::chrono::steady_clock::now();
    EngineCounters ctr;
    auto hits = run_walk_engine(dom, c, static_cast<std::uint32_t>(lat.gen_size(lat.max_depth())),
                                ctr);
    const auto t1 = std::chrono::steady_clock::now();

    if (ctr.truncated * 2 > c.n_walkers)
        throw NoAbsorption("more than half of the walkers hit the step limit (" +
                           std::to_string(ctr.truncated) + " of " +
                           std::to_string(c.n_walkers) + ")");

    WalkDiagnostics diag;
    diag.n_walkers = c.n_walkers;
    diag.absorbed = ctr.absorbed;
    diag.truncated = ctr.truncated;
    diag.resampled = ctr.resampled;
    diag.steps_total = ctr.steps;
    diag.seed = c.seed;
    diag.n_workers = c.n_workers;
    diag.eps_applied = c.eps * model.diam;
    diag.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    return OmegaEstimate::from_hits(lat, std::move(hits), diag);
}

PoleComparison pole_consistency(const IfsModel& model, const CubeLattice& lat,
                                const WalkConfig& cfg, const std::vector<Vec>& poles,
                                int generation) {
    if (poles.size() < 2) throw ConfigError("pole_consistency needs at least two poles");
    if (generation < 0 || generation > lat.max_depth())
        throw DepthExceeded("comparison generation outside the lattice");

    std::vector<OmegaEstimate> runs;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        WalkConfig c = cfg;
        c.pole_mode = PoleMode::finite_pole;
        c.pole = poles[i];
        c.seed = mix_seed(cfg.seed, 0x706f6c65ULL + i);  // per-pole stream family
        runs.push_back(run_walkers(model, lat, c));
    }

    PoleComparison cmp;
    cmp.generation = generation;
    const std::uint64_t n = lat.gen_size(generation);
    for (std::uint64_t c = 0; c < n; ++c) {
        const Word w{generation, c};
        PoleComparisonRow row;
        row.word = w;
        bool all_hit = true;
        for (const auto& run : runs) {
            row.omega.push_back(run.omega(w));
            row.ci.push_back(run.ci(w));
            if (run.hits(w) == 0) all_hit = false;
        }
        for (std::size_t a = 0; a < runs.size(); ++a)
            for (std::size_t b = a + 1; b < runs.size(); ++b)
                if (row.ci[a].lo > row.ci[b].hi || row.ci[b].lo > row.ci[a].hi)
                    row.ci_overlap = false;
        if (all_hit) {
            for (std::size_t a = 0; a < runs.size(); ++a)
                for (std::size_t b = a + 1; b < runs.size(); ++b)
                    cmp.max_abs_log_ratio =
                        std::max(cmp.max_abs_log_ratio,
                                 std::abs(std::log(row.omega[a] / row.omega[b])));
        }
        cmp.all_within_ci = cmp.all_within_ci && row.ci_overlap;
        cmp.rows.push_back(std::move(row));
    }
    return cmp;
}

namespace {

// Unit circle as absorbing boundary; a walker dropped inside never leaves.
struct DiskDomain {
    int arcs;

    int dim() const { return 2; }
    Vec center() const { return {0.0, 0.0, 0.0}; }
    double diam() const { return 2.0; }
    double slack() const { return 0.0; }
    double distance(const Vec& x, double) const { return std::abs(1.0 - x.norm()); }
    std::uint32_t bin(const Vec& x) const {
        constexpr double tau = 6.283185307179586476925286766559;
        const double frac = std::atan2(x.y, x.x) / tau + 0.5;   // [0, 1]
        const auto idx = static_cast<std::uint32_t>(frac * static_cast<double>(arcs));
        return std::min(idx, static_cast<std::uint32_t>(arcs - 1));
    }
};

} // namespace

DiskCheck run_disk_check(std::uint64_t walkers, int arcs, double eps,
                         std::uint64_t seed, int n_workers) {
    if (arcs < 2) throw ConfigError("disk check needs at least 2 arcs");
    if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("disk check eps must lie in (0, 0.5)");

    DiskDomain dom{arcs};
    WalkConfig cfg;
    cfg.eps = eps / dom.diam();    // the engine scales the shell by diam
    cfg.pole_mode = PoleMode::finite_pole;
    cfg.pole = {0.0, 0.0, 0.0};
    cfg.n_walkers = walkers;
    cfg.seed = seed;
    cfg.n_workers = n_workers;

    const auto t0 = std::chrono::steady_clock::now();
    EngineCounters ctr;
    auto counts = run_walk_engine(dom, cfg, static_cast<std::uint32_t>(arcs), ctr);
    const auto t1 = std::chrono::steady_clock::now();

    DiskCheck out;
    out.arcs = arcs;
    out.walkers = walkers;
    out.eps = eps;
    out.seed = seed;
    out.n_workers = n_workers;
    out.counts = std::move(counts);
    out.chi_square = chi_square_uniform(out.counts);
    out.threshold = chi_square_quantile_999(arcs - 1);
    const double n = static_cast<double>(walkers);
    const double p0 = 1.0 / static_cast<double>(arcs);
    const double sigma = std::sqrt(n * p0 * (1.0 - p0));
    for (auto c : out.counts)
        out.max_abs_sigma = std::max(
            out.max_abs_sigma, std::abs(static_cast<double>(c) - n * p0) / sigma);
    out.pass = out.chi_square < out.threshold && out.max_abs_sigma < 4.0;
    out.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    return out;
}

} // namespace hml
