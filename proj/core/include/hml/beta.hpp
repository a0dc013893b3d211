#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "hml/geometry.hpp"
#include "hml/lattice.hpp"

namespace hml {

inline constexpr int kDefaultAngleGrid = 720;
inline constexpr double kDefaultLineStep = 1.0 / 256.0;

// Smallest sample depth whose quadrature scale lambda^d * diam is at most
// (lambda^g * diam) / 32, i.e. fine enough for balls of generation-g cubes.
int recommended_sample_depth(const IfsModel& model, int deepest_generation);

struct BetaResult {
    double value = 0.0;
    LineParam line;
    double err_bound = 0.0;  // discretization slack; 0 for the exact solver
};

// Mean-square flatness of weighted points inside B(x, r), normalized by r:
//   value^2 = min over lines L of (1/W) sum_i w_i dist(y_i, L)^2 / r^2.
// The minimizing codimension-one subspace passes through the weighted
// centroid with normal along the smallest principal direction, so the value
// is exact (no grid). Works in ambient dimension 2 and 3.
BetaResult beta2_points(const std::vector<Vec>& points, const std::vector<double>& weights,
                        int dim, const Vec& x, double r);
BetaResult beta2_ball(const MuSample& sample, int dim, const Vec& x, double r);

// Sup-distance flatness over an angle grid (planar only):
//   value = min over grid lines of max_i dist(y_i, L) / r,
// with the per-angle offset solved exactly (midpoint of the signed range).
BetaResult beta_inf_points(const std::vector<Vec>& points, const Vec& x, double r,
                           int angle_grid = kDefaultAngleGrid);
BetaResult beta_inf_ball(const MuSample& sample, const Vec& x, double r,
                         int angle_grid = kDefaultAngleGrid);

// Hole flatness (planar only): how far the emptiest grid line through the
// ball stays from E,
//   value = min over grid lines of max_z dist(z, E) / r,
// z sampled at spacing line_step * r along the chord, offsets on the same
// grid. Values are capped at 1; a reported 1 means every line meets a hole
// of at least one radius (in particular when E misses B(x, 2r) entirely).
BetaResult beta_hole_ball(const DistanceOracle& oracle, const Vec& x, double r,
                          int angle_grid = kDefaultAngleGrid,
                          double line_step = kDefaultLineStep);

// Mean-absolute flatness of a cube, in the mass-sensitive normalization
//   value = min over grid lines of sum_i w_i dist(y_i, L) / ell(Q)^(s+1),
// with the per-angle offset solved exactly (weighted median). Planar only.
BetaResult beta1_points(const std::vector<Vec>& points, const std::vector<double>& weights,
                        const Vec& x, double r, double s_exponent,
                        int angle_grid = kDefaultAngleGrid);
BetaResult beta1_cube(const CubeLattice& lat, const MuSample& sample, const Word& q,
                      int angle_grid = kDefaultAngleGrid);

enum class ScanKind { beta2, inf_plus_hole, all };

struct ScanRow {
    Word word;
    double r = 0.0;
    double beta2 = std::numeric_limits<double>::quiet_NaN();
    double beta_inf = std::numeric_limits<double>::quiet_NaN();
    double beta_hole = std::numeric_limits<double>::quiet_NaN();
    double beta1 = std::numeric_limits<double>::quiet_NaN();
    LineParam line;          // minimizing line of the leading coefficient
    double err_bound = 0.0;
};

struct NonflatnessScan {
    std::vector<ScanRow> rows;                 // generation then code order
    std::vector<double> per_gen_min;           // leading coefficient per generation
    double delta0 = 0.0;                       // min over all scanned cubes
    Word argmin;
    int angle_grid = 0;
    double line_step = 0.0;
};

// Evaluates the requested coefficients on B(center(Q), ell(Q)) for every
// cube of generations g_min..g_max. The leading coefficient (beta2, or
// beta_inf + beta_hole) drives delta0 and the per-generation minima.
// Requires sample.depth >= g_max + 2.
NonflatnessScan scan_nonflatness(const CubeLattice& lat, const MuSample& sample,
                                 const DistanceOracle& oracle, ScanKind kind,
                                 int g_min, int g_max,
                                 int angle_grid = kDefaultAngleGrid,
                                 double line_step = kDefaultLineStep);

struct FlatnessBudgetRow {
    int n_gens = 0;       // window 0..n_gens
    double lhs = 0.0;     // sum of beta_inf(Q)^2 ell(Q)^s
    double rhs_beta = 0.0;// sum of beta1(Q)^2 ell(Q)^s
    double rhs_scale = 0.0;
    double ratio = 0.0;   // lhs / (rhs_beta + rhs_scale)
};

// Compares the square-summed sup-flatness of all cubes within n generations
// below R against the square-summed mean-flatness plus one scale term,
// cumulatively for n = 0..n_max. The ratio staying bounded as the window
// deepens is the point. Planar only.
std::vector<FlatnessBudgetRow> flatness_budget_series(const CubeLattice& lat,
                                                      const MuSample& sample,
                                                      const Word& r_cube, int n_max,
                                                      int angle_grid = kDefaultAngleGrid);

} // namespace hml
