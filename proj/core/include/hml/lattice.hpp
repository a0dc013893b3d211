#pragma once

#include <cstdint>
#include <vector>

#include "hml/fractal.hpp"

namespace hml {

// Hierarchy of nested cubes over the attractor: one cube per cylinder, with
// exact masses mu(Q) = N^-generation and sides ell(Q) = lambda^generation * diam(E).
// Properties delivered by construction and audited in tests:
//   completeness: every generation partitions E;
//   nesting: distinct cubes of one generation are disjoint, each child sits
//     inside its parent;
//   scaling: E intersect B(center, c_inner * ell(Q)) lies in Q, and Q lies in
//     B(center, ell(Q));
//   small boundary: the mass within t * ell(Q) of the complement decays like
//     a positive power of t (measured by audit_thin_boundary).
class CubeLattice {
public:
    CubeLattice() = default;

    const IfsModel& model() const { return model_; }
    int max_depth() const { return max_depth_; }
    int branching() const { return model_.branching(); }

    std::uint64_t gen_size(int g) const { return gen_offset_[g + 1] - gen_offset_[g]; }
    std::uint64_t gen_offset(int g) const { return gen_offset_[g]; }
    std::uint64_t n_cubes() const { return gen_offset_.back(); }

    std::uint64_t index_of(const Word& w) const { return gen_offset_[w.depth] + w.code; }
    Word word_at(std::uint64_t index) const;

    double ell(int g) const { return ell_[g]; }
    double mu(int g) const { return mu_[g]; }
    double ell0() const { return model_.lambda; }

    const Vec& center(const Word& w) const { return centers_[index_of(w)]; }
    Word parent(const Word& w) const {
        return {w.depth - 1, w.code / static_cast<std::uint64_t>(branching())};
    }

    // Radius fraction r such that an E-point within r * ell(Q) of the center
    // is guaranteed to belong to Q.
    double c_inner() const;

    std::string id(const Word& w) const { return word_to_string(w, branching()); }

private:
    friend CubeLattice build_lattice(const IfsModel&, int);

    IfsModel model_;
    int max_depth_ = 0;
    std::vector<std::uint64_t> gen_offset_;  // size max_depth + 2
    std::vector<double> ell_;
    std::vector<double> mu_;
    std::vector<Vec> centers_;               // indexed by cube index
};

// Requires lambda < 1/3 (so that scales of consecutive generations are
// cleanly separated); throws BadRatio otherwise, CapExceeded when the cube
// count would exceed the model's point budget.
CubeLattice build_lattice(const IfsModel& model, int max_depth);

// All descendants of Q at relative generations j..k inclusive (j = 0 yields
// Q itself), ordered by generation then branch code.
std::vector<Word> descendants(const CubeLattice& lat, const Word& q, int j, int k);

// Contiguous code range of the depth-(q.depth + rel) descendants of q.
struct CodeRange {
    int generation = 0;
    std::uint64_t begin = 0;
    std::uint64_t end = 0;
};
CodeRange descendant_range(const CubeLattice& lat, const Word& q, int rel);

// Cubes P of Q's generation with dist(center(Q), P) <= factor * ell(Q),
// including Q. Distances are to the cylinder sets, resolved through the
// oracle only where bounding boxes and representative points disagree.
std::vector<Word> dilate(const CubeLattice& lat, const DistanceOracle& oracle,
                         const Word& q, double factor);

struct ThinBoundaryRow {
    double t = 0.0;
    double collar_mass = 0.0;   // mu of {x in Q : dist(x, E \ Q) <= t * ell(Q)}
    double ratio = 0.0;         // collar_mass / mu(Q)
};

struct ThinBoundaryAudit {
    std::vector<ThinBoundaryRow> rows;
    double eta_hat = 0.0;       // fitted exponent of ratio ~ c1 * t^eta
    double c1_hat = 0.0;
    int fit_points = 0;         // rows with 0 < ratio < 1 used by the fit
};

// Measures collar masses on the given t grid using the sample as quadrature.
// Requires sample.depth >= generation(Q) + 2 (InsufficientDepth otherwise).
ThinBoundaryAudit audit_thin_boundary(const CubeLattice& lat, const MuSample& sample,
                                      const DistanceOracle& oracle, const Word& q,
                                      const std::vector<double>& t_grid);

} // namespace hml
