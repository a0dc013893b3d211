#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hml/errors.hpp"
#include "hml/geometry.hpp"

namespace hml {

enum class Family { corner_cantor_2d, corner_cantor_3d, custom };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Input description of an equicontractive, axis-aligned iterated function
// system. For the corner families `maps` is derived from `lambda`; for
// `custom` the caller supplies the maps (all ratios must coincide).
struct IfsSpec {
    Family family = Family::corner_cantor_2d;
    int ambient_dim = 2;
    double lambda = 0.25;
    std::vector<SimilarityMap> maps;           // custom only
    std::uint64_t point_cap = 1ULL << 24;      // enumeration budget
};

// Validated model. All derived quantities are exact functions of the maps:
// the attractor's bounding box has per-axis range [min_i o_i, max_i o_i] / (1 - lambda),
// `diam` is its diagonal (attained for the corner families), `sep` is the
// minimum gap between first-generation bounding boxes (a certified lower
// bound on the gap between first-generation pieces), and `c0_certified`
// bounds mu(B(x, r)) between r^s / c0 and c0 * r^s for all x in E, r < diam.
struct IfsModel {
    Family family = Family::corner_cantor_2d;
    int ambient_dim = 2;
    double lambda = 0.0;
    std::vector<SimilarityMap> maps;
    double s = 0.0;
    Box bbox;
    Vec base_point;      // fixed point of maps[0]
    double diam = 0.0;
    double sep = 0.0;
    double c0_certified = 0.0;
    std::uint64_t point_cap = 0;

    int branching() const { return static_cast<int>(maps.size()); }
};

inline constexpr double kSepMinFraction = 0.05;
inline constexpr int kMaxMaps = 32;

// Validates ratios, dimension and separation; derives the certified
// constants. Throws BadRatio / SeparationViolation / ConfigError.
IfsModel build_ifs(const IfsSpec& spec);

// Cylinder identifier: the branch choices of the first `depth` generations,
// packed big-endian (first generation in the most significant digit).
struct Word {
    int depth = 0;
    std::uint64_t code = 0;

    friend bool operator==(const Word&, const Word&) = default;
};

std::string word_to_string(const Word& w, int branching);
// Inverse of word_to_string; throws ConfigError on malformed ids.
Word word_from_string(const std::string& id, int branching);

// Equal-weight quadrature for mu at one generation: the depth-k images of
// the base point, in lexicographic branch order, each carrying mass N^-k.
// Points of the cylinder with word w form the contiguous index range
// [w.code * N^(k - w.depth), (w.code + 1) * N^(k - w.depth)).
struct MuSample {
    int depth = 0;
    double weight = 0.0;
    std::vector<Vec> points;
};

// Throws CapExceeded when N^depth exceeds the model's point budget.
MuSample cylinder_points(const IfsModel& model, int depth);

// Affine form of the composed map for a word: f_w(v) = scale * v + shift.
struct WordFrame {
    double scale = 1.0;
    Vec shift;
};
WordFrame word_frame(const IfsModel& model, const Word& w);

// Representative boundary point of a cylinder (image of the base point).
Vec word_point(const IfsModel& model, const Word& w);

// Bounding box of a cylinder.
Box word_box(const IfsModel& model, const Word& w);

// Certified distance queries against the attractor, answered by bounded
// descent through the cylinder hierarchy. Each query returns a value d with
// d in [dist, dist + tol] where dist is the true distance to the queried
// set, so d - tol is a safe lower bound. Passing `cutoff` allows the search
// to stop early once the distance provably exceeds it; the result is then
// clamped to cutoff. Queries are pure and safe to run concurrently.
class DistanceOracle {
public:
    explicit DistanceOracle(const IfsModel& model, double tol_fraction = 1e-9);

    double tol() const { return tol_; }

    // Distance to E.
    double to_attractor(const Vec& x, double cutoff = kNoCutoff) const;
    // Distance to the part of E inside the cylinder w.
    double to_cylinder(const Vec& x, const Word& w, double cutoff = kNoCutoff) const;
    // Distance to E minus the cylinder w. Requires w.depth >= 1.
    double to_complement(const Vec& x, const Word& w, double cutoff = kNoCutoff) const;

    // Word of the depth-`depth` cylinder nearest to x (deterministic
    // tie-break by search order).
    Word nearest_cylinder(const Vec& x, int depth) const;

    static constexpr double kNoCutoff = 1e300;

private:
    enum class Mode { inside, outside };
    struct Query;
    double search(const Vec& x, Mode mode, const Word& w, double cutoff,
                  int assign_depth, std::uint64_t* assign_code) const;

    const IfsModel& m_;
    double tol_ = 0.0;
};

} // namespace hml
