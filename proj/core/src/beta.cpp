#include "hml/beta.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hml/stats.hpp"

namespace hml {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Vec angle_normal(double theta) { return {std::cos(theta), std::sin(theta), 0.0}; }

void require_planar(int dim, const char* op) {
    if (dim != 2) throw ConfigError(std::string(op) + " is defined for ambient dimension 2");
}

} // namespace

int recommended_sample_depth(const IfsModel& model, int deepest_generation) {
    int d = deepest_generation;
    double scale = 1.0;
    while (scale > 1.0 / 32.0) {
        scale *= model.lambda;
        ++d;
    }
    return d;
}

BetaResult beta2_points(const std::vector<Vec>& points, const std::vector<double>& weights,
                        int dim, const Vec& x, double r) {
    if (points.size() != weights.size())
        throw ConfigError("beta2: points and weights must align");
    if (!(r > 0.0)) throw ConfigError("beta2: radius must be positive");

    double w_total = 0.0;
    Vec mean{};
    const double r2 = r * r;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec d = points[i] - x;
        if (d.norm2() > r2) continue;
        w_total += weights[i];
        mean = mean + d * weights[i];
    }
    if (w_total <= 0.0) throw EmptyBall("beta2: no mass in the ball");
    mean = mean * (1.0 / w_total);

    // Covariance in the ball frame. The minimizing affine subspace passes
    // through the centroid, normal to the smallest principal direction.
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec d = points[i] - x;
        if (d.norm2() > r2) continue;
        const Vec c = d - mean;
        const double w = weights[i];
        cov(0, 0) += w * c.x * c.x;
        cov(0, 1) += w * c.x * c.y;
        cov(0, 2) += w * c.x * c.z;
        cov(1, 1) += w * c.y * c.y;
        cov(1, 2) += w * c.y * c.z;
        cov(2, 2) += w * c.z * c.z;
    }
    cov(1, 0) = cov(0, 1);
    cov(2, 0) = cov(0, 2);
    cov(2, 1) = cov(1, 2);

    Vec normal;
    double lambda_min = 0.0;
    if (dim == 2) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver;
        solver.computeDirect(cov.topLeftCorner<2, 2>());
        lambda_min = solver.eigenvalues()(0);
        normal = {solver.eigenvectors()(0, 0), solver.eigenvectors()(1, 0), 0.0};
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
        solver.computeDirect(cov);
        lambda_min = solver.eigenvalues()(0);
        normal = {solver.eigenvectors()(0, 0), solver.eigenvectors()(1, 0),
                  solver.eigenvectors()(2, 0)};
    }

    // Evaluate the residual explicitly instead of reading lambda_min off the
    // solver: for (near-)collinear inputs the per-point projections cancel to
    // machine zero where the assembled covariance keeps O(eps * scale^2) noise.
    (void)lambda_min;
    double residual = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec d = points[i] - x;
        if (d.norm2() > r2) continue;
        const double proj = (d - mean).dot(normal);
        residual += weights[i] * proj * proj;
    }

    BetaResult res;
    res.value = std::sqrt(std::max(0.0, residual) / w_total) / r;
    res.line = LineParam{normal, x + mean};
    res.err_bound = 0.0;
    return res;
}

BetaResult beta2_ball(const MuSample& sample, int dim, const Vec& x, double r) {
    std::vector<double> weights(sample.points.size(), sample.weight);
    return beta2_points(sample.points, weights, dim, x, r);
}

BetaResult beta_inf_points(const std::vector<Vec>& points, const Vec& x, double r,
                           int angle_grid) {
    if (!(r > 0.0)) throw ConfigError("beta_inf: radius must be positive");
    if (angle_grid < 1) throw ConfigError("beta_inf: need at least one angle");

    std::vector<Vec> inside;
    const double r2 = r * r;
    for (const auto& p : points)
        if ((p - x).norm2() <= r2) inside.push_back(p - x);
    if (inside.empty()) throw EmptyBall("beta_inf: no points in the ball");

    BetaResult res;
    res.value = DistanceOracle::kNoCutoff;
    for (int j = 0; j < angle_grid; ++j) {
        const double theta = kPi * static_cast<double>(j) / static_cast<double>(angle_grid);
        const Vec n = angle_normal(theta);
        double lo = DistanceOracle::kNoCutoff, hi = -DistanceOracle::kNoCutoff;
        for (const auto& p : inside) {
            const double s = n.dot(p);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        // Best offset for this direction straddles the signed range.
        const double value = (hi - lo) * 0.5 / r;
        if (value < res.value) {
            res.value = value;
            res.line = LineParam{n, x + n * ((hi + lo) * 0.5)};
        }
    }
    res.err_bound = kPi / static_cast<double>(angle_grid);
    return res;
}

BetaResult beta_inf_ball(const MuSample& sample, const Vec& x, double r, int angle_grid) {
    return beta_inf_points(sample.points, x, r, angle_grid);
}

BetaResult beta_hole_ball(const DistanceOracle& oracle, const Vec& x, double r,
                          int angle_grid, double line_step) {
    if (!(r > 0.0)) throw ConfigError("beta_hole: radius must be positive");
    if (angle_grid < 1 || !(line_step > 0.0) || line_step > 1.0)
        throw ConfigError("beta_hole: bad grid parameters");

    const double h = line_step * r;
    const int n_off = static_cast<int>(std::ceil(2.0 / line_step));
    // Lines with sup distance at least r cannot beat the cap, so the scan
    // may abandon them early; 1 is also the reported sentinel when every
    // line crosses a hole of a full radius.
    double best = 1.0;
    BetaResult res;
    res.line = LineParam{angle_normal(0.0), x};
    bool found = false;

    for (int j = 0; j < angle_grid; ++j) {
        const double theta = kPi * static_cast<double>(j) / static_cast<double>(angle_grid);
        const Vec n = angle_normal(theta);
        const Vec u{-n.y, n.x, 0.0};
        for (int k = 0; k < n_off; ++k) {
            const double c = -r + (static_cast<double>(k) + 0.5) * h;
            if (std::abs(c) >= r) continue;
            const double half = std::sqrt(r * r - c * c);
            const Vec base = x + n * c;
            const double cutoff = best * r + 2.0 * oracle.tol();
            double line_max = 0.0;
            const int m_end = static_cast<int>(std::floor(2.0 * half / h));
            for (int m = 0; m <= m_end + 1; ++m) {
                const double t = m <= m_end ? -half + static_cast<double>(m) * h : half;
                const double d = oracle.to_attractor(base + u * t, cutoff);
                line_max = std::max(line_max, d);
                if (line_max >= best * r) break;
            }
            if (line_max < best * r) {
                best = line_max / r;
                res.line = LineParam{n, base};
                found = true;
            }
        }
    }
    res.value = best;
    res.err_bound = line_step + kPi / static_cast<double>(angle_grid);
    (void)found;
    return res;
}

BetaResult beta1_points(const std::vector<Vec>& points, const std::vector<double>& weights,
                        const Vec& x, double r, double s_exponent, int angle_grid) {
    if (points.size() != weights.size())
        throw ConfigError("beta1: points and weights must align");
    if (!(r > 0.0)) throw ConfigError("beta1: radius must be positive");
    if (angle_grid < 1) throw ConfigError("beta1: need at least one angle");

    std::vector<std::pair<double, double>> proj;  // (signed dist, weight) scratch
    std::vector<std::size_t> inside;
    const double r2 = r * r;
    double w_total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if ((points[i] - x).norm2() <= r2) {
            inside.push_back(i);
            w_total += weights[i];
        }
    }
    if (w_total <= 0.0) throw EmptyBall("beta1: no mass in the ball");

    const double norm = std::pow(r, s_exponent) * r;
    BetaResult res;
    res.value = DistanceOracle::kNoCutoff;
    for (int j = 0; j < angle_grid; ++j) {
        const double theta = kPi * static_cast<double>(j) / static_cast<double>(angle_grid);
        const Vec n = angle_normal(theta);
        proj.clear();
        for (auto i : inside) proj.emplace_back(n.dot(points[i] - x), weights[i]);
        const double med = weighted_median(proj);
        double sum = 0.0;
        for (const auto& [sd, w] : proj) sum += w * std::abs(sd - med);
        const double value = sum / norm;
        if (value < res.value) {
            res.value = value;
            res.line = LineParam{n, x + n * med};
        }
    }
    res.err_bound = (kPi / static_cast<double>(angle_grid)) * w_total * r / norm;
    return res;
}

BetaResult beta1_cube(const CubeLattice& lat, const MuSample& sample, const Word& q,
                      int angle_grid) {
    require_planar(lat.model().ambient_dim, "beta1_cube");
    if (sample.depth < q.depth + 2)
        throw InsufficientDepth("beta1_cube: sample must be at least two generations below");
    std::vector<double> weights(sample.points.size(), sample.weight);
    return beta1_points(sample.points, weights, lat.center(q), lat.ell(q.depth),
                        lat.model().s, angle_grid);
}

NonflatnessScan scan_nonflatness(const CubeLattice& lat, const MuSample& sample,
                                 const DistanceOracle& oracle, ScanKind kind,
                                 int g_min, int g_max, int angle_grid, double line_step) {
    if (g_min < 0 || g_max < g_min || g_max > lat.max_depth())
        throw ConfigError("scan_nonflatness: bad generation window");
    if (sample.depth < g_max + 2)
        throw InsufficientDepth("scan_nonflatness: sample must reach two generations "
                                "below the deepest scanned cube");
    const int dim = lat.model().ambient_dim;
    if (kind != ScanKind::beta2) require_planar(dim, "sup/hole scan");

    NonflatnessScan scan;
    scan.angle_grid = angle_grid;
    scan.line_step = line_step;
    scan.delta0 = DistanceOracle::kNoCutoff;

    std::vector<double> weights(sample.points.size(), sample.weight);
    for (int g = g_min; g <= g_max; ++g) {
        double gen_min = DistanceOracle::kNoCutoff;
        const std::uint64_t n = lat.gen_size(g);
        for (std::uint64_t c = 0; c < n; ++c) {
            const Word wq{g, c};
            ScanRow row;
            row.word = wq;
            row.r = lat.ell(g);
            const Vec& z = lat.center(wq);

            double leading = 0.0;
            if (kind == ScanKind::beta2 || kind == ScanKind::all) {
                const auto b2 = beta2_points(sample.points, weights, dim, z, row.r);
                row.beta2 = b2.value;
                row.line = b2.line;
                row.err_bound = b2.err_bound;
                leading = b2.value;
            }
            if (kind == ScanKind::inf_plus_hole || (kind == ScanKind::all && dim == 2)) {
                const auto bi = beta_inf_ball(sample, z, row.r, angle_grid);
                const auto bh = beta_hole_ball(oracle, z, row.r, angle_grid, line_step);
                row.beta_inf = bi.value;
                row.beta_hole = bh.value;
                if (kind == ScanKind::inf_plus_hole) {
                    row.line = bi.line;
                    row.err_bound = bi.err_bound + bh.err_bound;
                    leading = bi.value + bh.value;
                }
            }
            if (kind == ScanKind::all && dim == 2) {
                const auto b1 = beta1_cube(lat, sample, wq, angle_grid);
                row.beta1 = b1.value;
            }

            gen_min = std::min(gen_min, leading);
            if (leading < scan.delta0) {
                scan.delta0 = leading;
                scan.argmin = wq;
            }
            scan.rows.push_back(row);
        }
        scan.per_gen_min.push_back(gen_min);
    }
    return scan;
}

std::vector<FlatnessBudgetRow> flatness_budget_series(const CubeLattice& lat,
                                                      const MuSample& sample,
                                                      const Word& r_cube, int n_max,
                                                      int angle_grid) {
    require_planar(lat.model().ambient_dim, "flatness_budget_series");
    if (n_max < 0 || r_cube.depth + n_max > lat.max_depth())
        throw DepthExceeded("flatness_budget_series: window exceeds lattice depth");
    if (sample.depth < r_cube.depth + n_max + 2)
        throw InsufficientDepth("flatness_budget_series: sample too shallow");

    const double s = lat.model().s;
    const double rhs_scale = std::pow(lat.ell(r_cube.depth), s);
    std::vector<FlatnessBudgetRow> rows;
    double lhs = 0.0, rhs_beta = 0.0;
    for (int rel = 0; rel <= n_max; ++rel) {
        const auto range = descendant_range(lat, r_cube, rel);
        const double ell_s = std::pow(lat.ell(range.generation), s);
        for (std::uint64_t c = range.begin; c < range.end; ++c) {
            const Word q{range.generation, c};
            const auto bi = beta_inf_ball(sample, lat.center(q), lat.ell(q.depth), angle_grid);
            const auto b1 = beta1_cube(lat, sample, q, angle_grid);
            lhs += bi.value * bi.value * ell_s;
            rhs_beta += b1.value * b1.value * ell_s;
        }
        rows.push_back({rel, lhs, rhs_beta, rhs_scale, lhs / (rhs_beta + rhs_scale)});
    }
    return rows;
}

} // namespace hml
