#pragma once

#include <cstdint>
#include <random>

#include "hml/geometry.hpp"

namespace hml {

// Stateless 64-bit mixer used to derive independent stream seeds from a
// master seed. Distinct (seed, stream) pairs map to well-spread engine seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Per-stream generator. Uses the standard 64-bit Mersenne twister, whose
// sequence is fully pinned by the standard, plus hand-rolled variate maps so
// outputs are bit-identical across standard libraries. Never use
// std::uniform_real_distribution here: its mapping is implementation-defined.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : eng_(mix_seed(seed, stream)) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // Uniform direction on the unit circle (z = 0).
    Vec next_dir2() {
        const double a = 2.0 * kPi * next_double();
        return {std::cos(a), std::sin(a), 0.0};
    }

    // Uniform direction on the unit sphere (area-preserving map).
    Vec next_dir3() {
        const double z = 1.0 - 2.0 * next_double();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = 2.0 * kPi * next_double();
        return {r * std::cos(a), r * std::sin(a), z};
    }

    Vec next_dir(int dim) { return dim == 2 ? next_dir2() : next_dir3(); }

    // Angle offset with density proportional to 1 / (1 - 2 rho cos t + rho^2)
    // on (-pi, pi], the circle Poisson kernel with parameter rho in [0, 1).
    // Sampled by the tangent half-angle transform.
    double next_poisson_angle(double rho) {
        const double u = next_double();
        const double t = std::tan(kPi * (u - 0.5));
        return 2.0 * std::atan((1.0 - rho) / (1.0 + rho) * t);
    }

private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;
    std::mt19937_64 eng_;
};

} // namespace hml
