#include "hml/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "hml/stats.hpp"

namespace hml {

Word CubeLattice::word_at(std::uint64_t index) const {
    int g = 0;
    while (index >= gen_offset_[g + 1]) ++g;
    return {g, index - gen_offset_[g]};
}

double CubeLattice::c_inner() const {
    return std::min(1.0, model_.sep / (model_.lambda * model_.diam));
}

CubeLattice build_lattice(const IfsModel& model, int max_depth) {
    if (!(model.lambda < 1.0 / 3.0))
        throw BadRatio("cube lattice requires ratio below 1/3, got " +
                       std::to_string(model.lambda));
    if (max_depth < 0) throw ConfigError("max_depth must be non-negative");

    CubeLattice lat;
    lat.model_ = model;
    lat.max_depth_ = max_depth;
    lat.gen_offset_.assign(static_cast<std::size_t>(max_depth) + 2, 0);
    std::uint64_t size = 1;
    for (int g = 0; g <= max_depth; ++g) {
        lat.gen_offset_[g + 1] = lat.gen_offset_[g] + size;
        if (g < max_depth) {
            if (size > model.point_cap / static_cast<std::uint64_t>(model.branching()))
                throw CapExceeded("cube count exceeds point budget at depth " +
                                  std::to_string(g + 1));
            size *= static_cast<std::uint64_t>(model.branching());
        }
    }
    lat.ell_.resize(static_cast<std::size_t>(max_depth) + 1);
    lat.mu_.resize(static_cast<std::size_t>(max_depth) + 1);
    double ell = model.diam;
    double mu = 1.0;
    for (int g = 0; g <= max_depth; ++g) {
        lat.ell_[g] = ell;
        lat.mu_[g] = mu;
        ell *= model.lambda;
        mu /= static_cast<double>(model.branching());
    }

    lat.centers_.resize(lat.n_cubes());
    lat.centers_[0] = model.base_point;
    // Children reuse the parent frame: center(w b) = f_w(f_b(base)).
    for (int g = 0; g < max_depth; ++g) {
        const std::uint64_t n = lat.gen_size(g);
        for (std::uint64_t c = 0; c < n; ++c) {
            const auto fr = word_frame(model, Word{g, c});
            for (int b = 0; b < model.branching(); ++b) {
                const Vec child = model.maps[b](model.base_point);
                lat.centers_[lat.gen_offset(g + 1) +
                             c * static_cast<std::uint64_t>(model.branching()) +
                             static_cast<std::uint64_t>(b)] =
                    child * fr.scale + fr.shift;
            }
        }
    }
    return lat;
}

CodeRange descendant_range(const CubeLattice& lat, const Word& q, int rel) {
    if (rel < 0) throw ConfigError("relative generation must be non-negative");
    if (q.depth + rel > lat.max_depth())
        throw DepthExceeded("descendants at generation " + std::to_string(q.depth + rel) +
                            " exceed lattice depth " + std::to_string(lat.max_depth()));
    std::uint64_t span = 1;
    for (int i = 0; i < rel; ++i) span *= static_cast<std::uint64_t>(lat.branching());
    return {q.depth + rel, q.code * span, (q.code + 1) * span};
}

std::vector<Word> descendants(const CubeLattice& lat, const Word& q, int j, int k) {
    if (j < 0 || k < j) throw ConfigError("invalid generation window");
    std::vector<Word> out;
    for (int i = j; i <= k; ++i) {
        const auto r = descendant_range(lat, q, i);
        for (std::uint64_t c = r.begin; c < r.end; ++c) out.push_back({r.generation, c});
    }
    return out;
}

std::vector<Word> dilate(const CubeLattice& lat, const DistanceOracle& oracle,
                         const Word& q, double factor) {
    if (factor < 0.0) throw ConfigError("dilation factor must be non-negative");
    const double reach = factor * lat.ell(q.depth);
    const Vec& z = lat.center(q);
    std::vector<Word> out;
    const std::uint64_t n = lat.gen_size(q.depth);
    for (std::uint64_t c = 0; c < n; ++c) {
        const Word p{q.depth, c};
        if (c == q.code) {
            out.push_back(p);
            continue;
        }
        if (dist(z, lat.center(p)) <= reach) {
            out.push_back(p);
            continue;
        }
        if (dist_to_box(z, word_box(lat.model(), p)) > reach) continue;
        if (oracle.to_cylinder(z, p, reach + 2.0 * oracle.tol()) - oracle.tol() <= reach)
            out.push_back(p);
    }
    return out;
}

ThinBoundaryAudit audit_thin_boundary(const CubeLattice& lat, const MuSample& sample,
                                      const DistanceOracle& oracle, const Word& q,
                                      const std::vector<double>& t_grid) {
    if (sample.depth < q.depth + 2)
        throw InsufficientDepth("thin boundary audit needs a sample at least two "
                                "generations below the cube");
    if (t_grid.empty()) throw ConfigError("empty t grid");

    const double ell = lat.ell(q.depth);
    double t_max = 0.0;
    for (double t : t_grid) {
        if (t < 0.0) throw ConfigError("t grid must be non-negative");
        t_max = std::max(t_max, t);
    }

    // Sample points of Q occupy one contiguous block.
    std::uint64_t span = 1;
    for (int i = 0; i < sample.depth - q.depth; ++i)
        span *= static_cast<std::uint64_t>(lat.branching());
    const std::uint64_t lo = q.code * span;
    const std::uint64_t hi = lo + span;

    std::vector<double> dists;
    dists.reserve(span);
    const double cutoff = t_max * ell + 2.0 * oracle.tol();
    for (std::uint64_t i = lo; i < hi; ++i) {
        const Vec& p = sample.points[i];
        dists.push_back(q.depth == 0 ? DistanceOracle::kNoCutoff
                                     : oracle.to_complement(p, q, cutoff));
    }
    std::sort(dists.begin(), dists.end());

    ThinBoundaryAudit audit;
    const double mu_q = lat.mu(q.depth);
    for (double t : t_grid) {
        const auto it = std::upper_bound(dists.begin(), dists.end(), t * ell);
        const double mass =
            sample.weight * static_cast<double>(std::distance(dists.begin(), it));
        audit.rows.push_back({t, mass, mass / mu_q});
    }

    std::vector<double> lx, ly;
    for (const auto& row : audit.rows) {
        if (row.ratio > 0.0 && row.ratio < 1.0 && row.t > 0.0) {
            lx.push_back(std::log(row.t));
            ly.push_back(std::log(row.ratio));
        }
    }
    // Collapse duplicate abscissae so a constant grid cannot fake a fit.
    bool distinct = false;
    for (std::size_t i = 1; i < lx.size(); ++i)
        if (lx[i] != lx[0]) distinct = true;
    if (lx.size() >= 2 && distinct) {
        const auto fit = fit_line(lx, ly);
        audit.eta_hat = fit.slope;
        audit.c1_hat = std::exp(fit.intercept);
        audit.fit_points = static_cast<int>(lx.size());
    }
    return audit;
}

} // namespace hml
