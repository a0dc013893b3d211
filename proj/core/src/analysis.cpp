#include "hml/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hml/errors.hpp"
#include "hml/rng.hpp"

namespace hml {

namespace {

void check_generation(const CubeLattice& lat, int g, const char* what) {
    if (g < 0 || g > lat.max_depth()) {
        std::ostringstream msg;
        msg << what << " needs generation " << g << ", lattice holds 0.." << lat.max_depth();
        throw DepthExceeded(msg.str());
    }
}

} // namespace

DensityTable density_table(const CubeLattice& lat, const OmegaEstimate& omega) {
    DensityTable out;
    const double s = lat.model().s;
    for (int g = 0; g <= lat.max_depth(); ++g) {
        const double mu = lat.mu(g);
        const double ell_s = std::pow(lat.ell(g), s);
        for (std::uint64_t code = 0; code < lat.gen_size(g); ++code) {
            const Word w{g, code};
            const std::uint64_t h = omega.hits(w);
            if (h == 0) {
                ++out.zero_hit_cubes;
                continue;
            }
            DensityRecord rec;
            rec.word = w;
            rec.hits = h;
            rec.omega = omega.omega(w);
            rec.omega_ci = omega.ci(w);
            rec.mu = mu;
            rec.ratio = rec.omega / mu;
            rec.ratio_ci = {rec.omega_ci.lo / mu, rec.omega_ci.hi / mu};
            rec.theta_s = rec.omega / ell_s;
            out.records.push_back(rec);
        }
    }
    return out;
}

StoppingReport find_stopping_cube(const CubeLattice& lat, const OmegaEstimate& omega,
                                  const Word& q, int m0, double factor) {
    if (m0 < 0) throw ConfigError("stopping scan depth must be nonnegative");
    if (!(factor > 0.0)) throw ConfigError("stopping factor must be positive");
    check_generation(lat, q.depth, "stopping scan");
    check_generation(lat, q.depth + m0, "stopping scan");
    if (omega.hits(q) == 0) throw ZeroMass("stopping scan: Q carries no estimated mass");

    StoppingReport rep;
    rep.q = q;
    rep.m_used = m0;
    const double mu_q = lat.mu(q.depth);
    const double ratio_q = omega.omega(q) / mu_q;
    const Interval ci_q = omega.ci(q);

    for (int m = 0; m <= m0; ++m) {
        const CodeRange range = descendant_range(lat, q, m);
        const double mu_p = lat.mu(range.generation);
        for (std::uint64_t code = range.begin; code < range.end; ++code) {
            const Word p{range.generation, code};
            if (omega.hits(p) == 0) continue;
            const double ratio_p = omega.omega(p) / mu_p;
            const Interval ci_p = omega.ci(p);
            if (ratio_p >= factor * ratio_q) {
                rep.found = true;
                rep.p = p;
                rep.direction = JumpDirection::up;
                rep.jump = ratio_p / ratio_q;
                rep.m_used = m;
                rep.significant = ci_p.lo / mu_p >= factor * (ci_q.hi / mu_q);
                return rep;
            }
            if (ratio_p * factor <= ratio_q) {
                rep.found = true;
                rep.p = p;
                rep.direction = JumpDirection::down;
                rep.jump = ratio_q / ratio_p;
                rep.m_used = m;
                rep.significant = (ci_p.hi / mu_p) * factor <= ci_q.lo / mu_q;
                return rep;
            }
        }
    }
    return rep;
}

DecaySeries decay_series(const CubeLattice& lat, const OmegaEstimate& omega,
                         const Word& r0, int m0, int k_max) {
    if (m0 < 1) throw ConfigError("decay series needs m0 >= 1");
    if (k_max < 1) throw ConfigError("decay series needs k_max >= 1");
    check_generation(lat, r0.depth, "decay series");
    check_generation(lat, r0.depth + k_max * m0, "decay series");

    DecaySeries out;
    out.m0 = m0;
    out.k_max = k_max;
    for (int k = 0; k <= k_max; ++k) {
        const CodeRange range = descendant_range(lat, r0, k * m0);
        const double mu_p = lat.mu(range.generation);
        double s_val = 0.0;
        double var = 0.0;
        for (std::uint64_t code = range.begin; code < range.end; ++code) {
            const Word p{range.generation, code};
            const Interval ci = omega.ci(p);
            const double sd = (ci.hi - ci.lo) / (2.0 * kZ95);
            if (omega.hits(p) > 0) {
                const double om = omega.omega(p);
                s_val += std::sqrt(om * mu_p);
                var += mu_p * sd * sd / (4.0 * om);
            } else {
                // Bounds the second moment of the term the estimate missed.
                var += ci.hi * mu_p;
            }
        }
        if (!(s_val > 0.0)) throw ZeroMass("decay series: no mass at generation k*m0 below R0");
        out.s_values.push_back(s_val);
        const double sigma = std::sqrt(var);
        out.s_sigma.push_back(sigma);
        out.s_ci.push_back({std::max(0.0, s_val - kZ95 * sigma), s_val + kZ95 * sigma});
    }

    std::vector<double> xs(out.s_values.size()), ys(out.s_values.size()),
        sig(out.s_values.size());
    for (std::size_t k = 0; k < out.s_values.size(); ++k) {
        xs[k] = static_cast<double>(k);
        ys[k] = std::log(out.s_values[k]);
        sig[k] = out.s_sigma[k] / out.s_values[k];
    }
    const LineFit fit = fit_line(xs, ys, sig);
    out.gamma_hat = std::exp(fit.slope);
    out.gamma_ci = {std::exp(fit.slope - kZ95 * fit.slope_se),
                    std::exp(fit.slope + kZ95 * fit.slope_se)};
    return out;
}

double admissible_t_prime_min(const IfsModel& model, int m0, double gamma_hat) {
    if (m0 < 1) throw ConfigError("admissible exponent needs m0 >= 1");
    if (!(gamma_hat > 0.0 && gamma_hat < 1.0)) {
        std::ostringstream msg;
        msg << "no admissible t_prime: decay factor " << gamma_hat << " is not inside (0, 1)";
        throw ConditionFailed(msg.str());
    }
    // Both logs are negative, so the correction is positive and t_min < s.
    return model.s - std::log(gamma_hat) / (m0 * std::log(model.lambda));
}

DimensionBound dimension_bound(const CubeLattice& lat, const OmegaEstimate& omega,
                               const Word& r0, int m0, double gamma_hat, int k,
                               double t_prime) {
    if (k < 1) throw ConfigError("dimension bound needs k >= 1");
    if (m0 < 1) throw ConfigError("dimension bound needs m0 >= 1");
    check_generation(lat, r0.depth, "dimension bound");
    check_generation(lat, r0.depth + k * m0, "dimension bound");

    const IfsModel& model = lat.model();
    const double t_min = admissible_t_prime_min(model, m0, gamma_hat);
    if (!(t_prime > 0.0 && t_prime < model.s && t_prime >= t_min)) {
        std::ostringstream msg;
        msg << "t_prime " << t_prime << " outside the admissible range ["
            << std::max(t_min, 0.0) << ", " << model.s << ") set by decay factor "
            << gamma_hat << " at m0 " << m0;
        throw ConditionFailed(msg.str());
    }
    if (omega.hits(r0) == 0) throw ZeroMass("dimension bound: R0 carries no estimated mass");

    DimensionBound out;
    out.t_prime = t_prime;
    out.t_prime_min = t_min;
    out.t = 0.5 * (t_prime + model.s);
    out.k = k;
    out.delta_k = std::pow(model.lambda, k * m0);

    const double omega_r0 = omega.omega(r0);
    const double threshold = std::pow(out.delta_k, t_prime) * omega_r0;
    const CodeRange range = descendant_range(lat, r0, k * m0);
    double excess = 0.0;
    for (std::uint64_t code = range.begin; code < range.end; ++code) {
        const Word p{range.generation, code};
        if (omega.hits(p) == 0) {
            excess += omega.ci(p).hi;   // conservative mass for unseen cubes
            continue;
        }
        const double om = omega.omega(p);
        if (om >= threshold)
            ++out.heavy_cubes;
        else
            excess += om;
    }
    out.content_bound =
        static_cast<double>(out.heavy_cubes) * std::pow(out.delta_k, t_prime);
    out.omega_excess = excess / omega_r0;
    return out;
}

LocalDimension local_dimension(const CubeLattice& lat, const OmegaEstimate& omega,
                               double quantile, int n_bootstrap,
                               std::uint64_t bootstrap_seed) {
    if (!(quantile > 0.0 && quantile < 1.0))
        throw ConfigError("local dimension quantile must lie in (0, 1)");
    const int deepest = lat.max_depth();
    if (deepest < 2)
        throw InsufficientData("local dimension needs at least three generations");

    LocalDimension out;
    std::vector<double> xs(deepest + 1), ys(deepest + 1);
    for (int g = 0; g <= deepest; ++g) xs[g] = std::log(lat.ell(g));
    for (std::uint64_t code = 0; code < lat.gen_size(deepest); ++code) {
        const Word w{deepest, code};
        if (omega.hits(w) == 0) continue;
        Word a = w;
        for (int g = deepest; g >= 0; --g) {
            ys[g] = std::log(omega.omega(a));
            if (g > 0) a = lat.parent(a);
        }
        out.slopes.push_back(fit_line(xs, ys).slope);
        out.weights.push_back(omega.omega(w));
    }
    if (out.slopes.empty())
        throw InsufficientData("local dimension: no deepest cube carries mass");
    out.n_cubes = out.slopes.size();

    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(out.slopes.size());
    for (std::size_t i = 0; i < out.slopes.size(); ++i)
        pairs.emplace_back(out.slopes[i], out.weights[i]);
    out.dim_hat = weighted_quantile(pairs, quantile);

    if (n_bootstrap <= 0) {
        out.ci = {out.dim_hat, out.dim_hat};
        return out;
    }

    // Cubes are drawn with probability proportional to their mass, so each
    // draw enters its replicate with unit weight.
    std::vector<double> cum(out.weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < out.weights.size(); ++i) {
        total += out.weights[i];
        cum[i] = total;
    }
    StreamRng rng(bootstrap_seed, 0x626f6f74ULL);
    std::vector<std::pair<double, double>> draw(out.slopes.size());
    std::vector<std::pair<double, double>> reps;
    reps.reserve(n_bootstrap);
    for (int b = 0; b < n_bootstrap; ++b) {
        for (std::size_t i = 0; i < out.slopes.size(); ++i) {
            const double u = rng.next_double() * total;
            const std::size_t j = std::min<std::size_t>(
                std::lower_bound(cum.begin(), cum.end(), u) - cum.begin(),
                out.slopes.size() - 1);
            draw[i] = {out.slopes[j], 1.0};
        }
        reps.emplace_back(weighted_quantile(draw, quantile), 1.0);
    }
    out.ci = {weighted_quantile(reps, 0.025), weighted_quantile(reps, 0.975)};
    return out;
}

} // namespace hml
