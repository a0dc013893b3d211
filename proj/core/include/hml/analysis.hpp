#pragma once

#include <cstdint>
#include <vector>

#include "hml/wos.hpp"

namespace hml {

struct DensityRecord {
    Word word;
    std::uint64_t hits = 0;
    double omega = 0.0;
    Interval omega_ci;
    double mu = 0.0;
    double ratio = 0.0;     // omega / mu
    Interval ratio_ci;      // omega_ci scaled by 1 / mu, so it contains ratio
    double theta_s = 0.0;   // omega / ell(Q)^s
};

struct DensityTable {
    std::vector<DensityRecord> records;   // hits > 0 only, ordered by cube index
    std::uint64_t zero_hit_cubes = 0;     // cubes omitted from records
};

// One record per cube of every generation that received mass. Zero-hit cubes
// are counted, not listed: their ratios are unstable and the conservative
// handling happens where it matters (dimension_bound adds their upper
// confidence mass).
DensityTable density_table(const CubeLattice& lat, const OmegaEstimate& omega);

enum class JumpDirection { up, down };

struct StoppingReport {
    Word q;
    bool found = false;
    Word p;
    JumpDirection direction = JumpDirection::up;
    double jump = 0.0;      // ratio(P) / ratio(Q) for up, inverse for down
    int m_used = 0;         // generations below Q; on miss, the depth scanned
    bool significant = false;  // jump survives adverse confidence endpoints
};

// Scans Q and its descendants down to m0 generations (shallowest first,
// branch order within a generation) for the first cube whose density ratio
// jumps by `factor` up or down relative to Q. Zero-hit descendants are
// skipped. With factor <= 1 the scan stops at Q itself.
StoppingReport find_stopping_cube(const CubeLattice& lat, const OmegaEstimate& omega,
                                  const Word& q, int m0, double factor = 16.0);

struct DecaySeries {
    std::vector<double> s_values;     // S_k, k = 0..k_max
    std::vector<Interval> s_ci;
    std::vector<double> s_sigma;      // delta-method standard deviations
    double gamma_hat = 0.0;
    Interval gamma_ci;
    int m0 = 0;
    int k_max = 0;
};

// S_k = sum over generation k*m0 descendants Q of R0 of sqrt(omega(Q) mu(Q)),
// with gamma fitted from log S_k ~ k log gamma. Uncertainty is propagated
// from the per-cube omega intervals by the delta method; cubes never hit
// contribute their upper confidence mass to the variance.
DecaySeries decay_series(const CubeLattice& lat, const OmegaEstimate& omega,
                         const Word& r0, int m0, int k_max);

struct DimensionBound {
    double t = 0.0;            // certified exponent candidate (t' + s) / 2
    double t_prime = 0.0;
    double delta_k = 0.0;      // ell(generation) / ell(R0)
    int k = 0;
    double content_bound = 0.0;   // normalized t'-content of the heavy cubes
    double omega_excess = 0.0;    // omega mass outside them, relative to R0
    std::uint64_t heavy_cubes = 0;
    double t_prime_min = 0.0;     // smallest admissible t'
};

// Smallest t' satisfying the smallness condition
// delta_k^((t'-s)/2) gamma^k <= gamma^(k/2), which is independent of k.
// Requires gamma in (0, 1); throws ConditionFailed otherwise.
double admissible_t_prime_min(const IfsModel& model, int m0, double gamma_hat);

// Splits generation k*m0 below R0 into heavy cubes, carrying at least the
// (ell(Q)/ell(R0))^t' share of omega(R0), and the rest. Reports the heavy
// cubes' normalized t'-content and the light cubes' relative omega mass
// (upper confidence mass for cubes never hit). Both small certifies an
// empirical dimension bound of t. Throws ConditionFailed when t' falls
// outside the admissible range, which the message names.
DimensionBound dimension_bound(const CubeLattice& lat, const OmegaEstimate& omega,
                               const Word& r0, int m0, double gamma_hat, int k,
                               double t_prime);

struct LocalDimension {
    double dim_hat = 0.0;
    Interval ci;                  // bootstrap percentile interval
    std::vector<double> slopes;   // per deepest cube with hits
    std::vector<double> weights;  // omega of those cubes
    std::uint64_t n_cubes = 0;
};

// Per-deepest-cube regression slope of log omega(ancestor) against
// log ell(ancestor), summarized by the omega-weighted quantile, with a
// weighted bootstrap interval (resampling cubes proportionally to omega).
// Needs at least three generations; throws InsufficientData below that.
LocalDimension local_dimension(const CubeLattice& lat, const OmegaEstimate& omega,
                               double quantile = 0.5, int n_bootstrap = 200,
                               std::uint64_t bootstrap_seed = 1);

} // namespace hml
