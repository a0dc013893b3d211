#include "hml/fractal.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hml {

std::string family_name(Family f) {
    switch (f) {
        case Family::corner_cantor_2d: return "corner_cantor_2d";
        case Family::corner_cantor_3d: return "corner_cantor_3d";
        case Family::custom: return "custom";
    }
    throw ConfigError("unknown family");
}

Family family_from_name(const std::string& name) {
    if (name == "corner_cantor_2d") return Family::corner_cantor_2d;
    if (name == "corner_cantor_3d") return Family::corner_cantor_3d;
    if (name == "custom") return Family::custom;
    throw ConfigError("unknown family: " + name);
}

namespace {

std::vector<SimilarityMap> corner_maps(int dim, double lambda) {
    std::vector<SimilarityMap> maps;
    const double off = 1.0 - lambda;
    const int n = dim == 2 ? 4 : 8;
    for (int i = 0; i < n; ++i) {
        Vec o{off * static_cast<double>(i & 1), off * static_cast<double>((i >> 1) & 1),
              dim == 3 ? off * static_cast<double>((i >> 2) & 1) : 0.0};
        maps.push_back({lambda, o});
    }
    return maps;
}

double box_gap(const Box& a, const Box& b) {
    const double gx = std::max({a.lo.x - b.hi.x, b.lo.x - a.hi.x, 0.0});
    const double gy = std::max({a.lo.y - b.hi.y, b.lo.y - a.hi.y, 0.0});
    const double gz = std::max({a.lo.z - b.hi.z, b.lo.z - a.hi.z, 0.0});
    return std::sqrt(gx * gx + gy * gy + gz * gz);
}

} // namespace

IfsModel build_ifs(const IfsSpec& spec) {
    IfsModel m;
    m.family = spec.family;
    m.point_cap = spec.point_cap;

    switch (spec.family) {
        case Family::corner_cantor_2d:
        case Family::corner_cantor_3d: {
            m.ambient_dim = spec.family == Family::corner_cantor_2d ? 2 : 3;
            if (!(spec.lambda > 0.0 && spec.lambda < 0.5))
                throw BadRatio("corner family requires ratio in (0, 1/2), got " +
                               std::to_string(spec.lambda));
            m.lambda = spec.lambda;
            m.maps = corner_maps(m.ambient_dim, m.lambda);
            break;
        }
        case Family::custom: {
            if (spec.ambient_dim != 2 && spec.ambient_dim != 3)
                throw ConfigError("ambient_dim must be 2 or 3");
            m.ambient_dim = spec.ambient_dim;
            if (spec.maps.size() < 2)
                throw ConfigError("custom model needs at least two maps");
            if (spec.maps.size() > static_cast<std::size_t>(kMaxMaps))
                throw ConfigError("custom model supports at most 32 maps");
            m.maps = spec.maps;
            const double r0 = m.maps.front().ratio;
            for (auto& f : m.maps) {
                if (!(f.ratio > 0.0 && f.ratio < 1.0))
                    throw BadRatio("map ratio must lie in (0, 1)");
                if (std::abs(f.ratio - r0) > 1e-12 * r0)
                    throw BadRatio("all maps must share one contraction ratio");
                if (m.ambient_dim == 2) f.offset.z = 0.0;
            }
            m.lambda = r0;
            break;
        }
    }

    const int n = m.branching();
    const double inv = 1.0 / (1.0 - m.lambda);
    Vec lo{m.maps[0].offset.x, m.maps[0].offset.y, m.maps[0].offset.z};
    Vec hi = lo;
    for (const auto& f : m.maps) {
        lo.x = std::min(lo.x, f.offset.x);
        lo.y = std::min(lo.y, f.offset.y);
        lo.z = std::min(lo.z, f.offset.z);
        hi.x = std::max(hi.x, f.offset.x);
        hi.y = std::max(hi.y, f.offset.y);
        hi.z = std::max(hi.z, f.offset.z);
    }
    // The attractor's per-axis range solves t = min/max over maps of
    // (lambda t + offset); for equicontractive axis-aligned maps that is the
    // offset range scaled by 1 / (1 - lambda).
    m.bbox = Box{lo * inv, hi * inv};
    m.diam = m.bbox.diag();
    if (m.diam <= 0.0) throw ConfigError("degenerate model: all maps share one fixed point");
    m.base_point = m.maps[0].offset * inv;
    m.s = std::log(static_cast<double>(n)) / std::log(1.0 / m.lambda);

    double sep = DistanceOracle::kNoCutoff;
    for (int i = 0; i < n; ++i) {
        const Box bi{m.maps[i](m.bbox.lo), m.maps[i](m.bbox.hi)};
        for (int j = i + 1; j < n; ++j) {
            const Box bj{m.maps[j](m.bbox.lo), m.maps[j](m.bbox.hi)};
            sep = std::min(sep, box_gap(bi, bj));
        }
    }
    m.sep = sep;
    if (!(m.sep >= kSepMinFraction * m.diam))
        throw SeparationViolation("first-generation gap " + std::to_string(m.sep) +
                                  " below required " +
                                  std::to_string(kSepMinFraction * m.diam));

    // mu(B(x, r)) >= r^s / (N diam^s): the deepest cylinder containing x with
    // diameter <= r sits inside the ball. mu(B(x, r)) <= (2 r / sep)^s: all
    // cylinders of one generation meeting the ball share an ancestor whose
    // generation is bounded through the gap structure.
    m.c0_certified = std::max(static_cast<double>(n) * std::pow(m.diam, m.s),
                              std::pow(2.0 / m.sep, m.s));
    return m;
}

std::string word_to_string(const Word& w, int branching) {
    static const char* digits = "0123456789abcdefghijklmnopqrstuvwxyz";
    std::string out = "r";
    if (w.depth == 0) return out;
    std::uint64_t shift = 1;
    for (int i = 0; i < w.depth - 1; ++i) shift *= static_cast<std::uint64_t>(branching);
    std::uint64_t rest = w.code;
    for (int i = 0; i < w.depth; ++i) {
        out.push_back(digits[rest / shift]);
        rest %= shift;
        if (shift > 1) shift /= static_cast<std::uint64_t>(branching);
    }
    return out;
}

Word word_from_string(const std::string& id, int branching) {
    if (id.empty() || id[0] != 'r')
        throw ConfigError("cube id must start with 'r': " + id);
    if (id.size() > 32) throw ConfigError("cube id too deep: " + id);
    Word w;
    for (std::size_t i = 1; i < id.size(); ++i) {
        const char c = id[i];
        int digit = -1;
        if (c >= '0' && c <= '9') digit = c - '0';
        else if (c >= 'a' && c <= 'z') digit = 10 + (c - 'a');
        if (digit < 0 || digit >= branching)
            throw ConfigError("cube id has a branch outside the family: " + id);
        w.code = w.code * static_cast<std::uint64_t>(branching) +
                 static_cast<std::uint64_t>(digit);
        ++w.depth;
    }
    return w;
}

namespace {

void check_depth_budget(const IfsModel& m, int depth, std::uint64_t cap) {
    if (depth < 0) throw ConfigError("depth must be non-negative");
    std::uint64_t count = 1;
    for (int i = 0; i < depth; ++i) {
        if (count > cap / static_cast<std::uint64_t>(m.branching()))
            throw CapExceeded("N^depth exceeds point budget at depth " + std::to_string(depth));
        count *= static_cast<std::uint64_t>(m.branching());
    }
    if (count > cap) throw CapExceeded("N^depth exceeds point budget");
}

void emit_points(const IfsModel& m, double scale, const Vec& shift, int left,
                 std::vector<Vec>& out) {
    if (left == 0) {
        out.push_back(m.base_point * scale + shift);
        return;
    }
    for (const auto& f : m.maps)
        emit_points(m, scale * f.ratio, shift + f.offset * scale, left - 1, out);
}

} // namespace

MuSample cylinder_points(const IfsModel& model, int depth) {
    check_depth_budget(model, depth, model.point_cap);
    MuSample s;
    s.depth = depth;
    std::uint64_t count = 1;
    for (int i = 0; i < depth; ++i) count *= static_cast<std::uint64_t>(model.branching());
    s.weight = 1.0 / static_cast<double>(count);
    s.points.reserve(count);
    emit_points(model, 1.0, Vec{}, depth, s.points);
    return s;
}

WordFrame word_frame(const IfsModel& model, const Word& w) {
    check_depth_budget(model, w.depth, ~0ULL >> 2);
    WordFrame fr;
    if (w.depth == 0) return fr;
    std::uint64_t shift = 1;
    for (int i = 0; i < w.depth - 1; ++i) shift *= static_cast<std::uint64_t>(model.branching());
    std::uint64_t rest = w.code;
    for (int i = 0; i < w.depth; ++i) {
        const auto b = rest / shift;
        rest %= shift;
        if (shift > 1) shift /= static_cast<std::uint64_t>(model.branching());
        const auto& f = model.maps[b];
        fr.shift = fr.shift + f.offset * fr.scale;
        fr.scale *= f.ratio;
    }
    return fr;
}

Vec word_point(const IfsModel& model, const Word& w) {
    const auto fr = word_frame(model, w);
    return model.base_point * fr.scale + fr.shift;
}

Box word_box(const IfsModel& model, const Word& w) {
    const auto fr = word_frame(model, w);
    return {model.bbox.lo * fr.scale + fr.shift, model.bbox.hi * fr.scale + fr.shift};
}

DistanceOracle::DistanceOracle(const IfsModel& model, double tol_fraction)
    : m_(model), tol_(tol_fraction * model.diam) {
    if (!(tol_ > 0.0)) throw ConfigError("distance tolerance must be positive");
}

namespace {

// Relation of a node to the query word.
enum Rel : std::uint8_t { kAncestor, kWithin, kDisjoint };

} // namespace

struct DistanceOracle::Query {
    const IfsModel& m;
    Vec x;
    Mode mode;
    Word w;
    double limit;        // min(best, cutoff): pruning threshold
    double best;         // current upper bound on the admissible distance
    double tol;
    int assign_depth;    // -1 when assignment is not requested
    std::uint64_t assign = 0;
    std::uint64_t best_prefix = 0;

    bool full(Rel rel) const {
        return mode == Mode::inside ? rel == kWithin : rel == kDisjoint;
    }

    void improve(double value, int depth, std::uint64_t prefix) {
        if (value >= best) return;
        best = value;
        limit = std::min(limit, best);
        if (assign_depth >= 0) {
            std::uint64_t p = prefix;
            for (int i = depth; i < assign_depth; ++i)
                p *= static_cast<std::uint64_t>(m.branching());
            assign = p;
        }
    }

    // prefix: branch code truncated to min(depth, assign_depth) digits.
    void visit(double scale, const Vec& shift, int depth, Rel rel, std::uint64_t prefix) {
        const Vec blo = m.bbox.lo * scale + shift;
        const Vec bhi = m.bbox.hi * scale + shift;
        const double diag = scale * m.diam;

        if (full(rel)) {
            const double drep = dist(x, m.base_point * scale + shift);
            improve(drep, depth, prefix);
        }
        if (diag <= tol) {
            // Any admissible point in this box is within diag of its surface.
            const double dbox = dist_to_box(x, Box{blo, bhi});
            improve(dbox + diag, depth, prefix);
            return;
        }

        const int n = m.branching();
        std::array<std::pair<double, std::uint8_t>, kMaxMaps> order;
        int cnt = 0;
        for (int b = 0; b < n; ++b) {
            Rel crel = rel;
            if (rel == kAncestor) {
                // Branch digit of w at this generation.
                std::uint64_t sh = 1;
                for (int i = 0; i < w.depth - depth - 1; ++i)
                    sh *= static_cast<std::uint64_t>(n);
                const auto digit = (w.code / sh) % static_cast<std::uint64_t>(n);
                if (static_cast<std::uint64_t>(b) == digit)
                    crel = (depth + 1 == w.depth) ? kWithin : kAncestor;
                else
                    crel = kDisjoint;
            }
            if (mode == Mode::inside && crel == kDisjoint) continue;
            if (mode == Mode::outside && crel == kWithin) continue;
            const auto& f = m.maps[b];
            const double cscale = scale * f.ratio;
            const Vec cshift = shift + f.offset * scale;
            const double lb = dist_to_box(x, Box{m.bbox.lo * cscale + cshift,
                                                 m.bbox.hi * cscale + cshift});
            if (lb >= limit) continue;
            order[cnt++] = {lb, static_cast<std::uint8_t>((crel << 5) | b)};
        }
        std::sort(order.begin(), order.begin() + cnt);
        for (int i = 0; i < cnt; ++i) {
            if (order[i].first >= limit) break;
            const int b = order[i].second & 31;
            const Rel crel = static_cast<Rel>(order[i].second >> 5);
            const auto& f = m.maps[b];
            std::uint64_t cprefix = prefix;
            if (assign_depth >= 0 && depth < assign_depth)
                cprefix = prefix * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(b);
            visit(scale * f.ratio, shift + f.offset * scale, depth + 1, crel, cprefix);
        }
    }
};

double DistanceOracle::search(const Vec& x, Mode mode, const Word& w, double cutoff,
                              int assign_depth, std::uint64_t* assign_code) const {
    Query q{m_, x, mode, w, cutoff, kNoCutoff, tol_, assign_depth};
    const Rel root_rel = w.depth == 0 ? kWithin : kAncestor;
    if (mode == Mode::outside && w.depth == 0)
        throw ConfigError("complement of the root cylinder is empty");
    q.visit(1.0, Vec{}, 0, root_rel, 0);
    if (assign_code) *assign_code = q.assign;
    return std::min(q.best, cutoff);
}

double DistanceOracle::to_attractor(const Vec& x, double cutoff) const {
    return search(x, Mode::inside, Word{}, cutoff, -1, nullptr);
}

double DistanceOracle::to_cylinder(const Vec& x, const Word& w, double cutoff) const {
    return search(x, Mode::inside, w, cutoff, -1, nullptr);
}

double DistanceOracle::to_complement(const Vec& x, const Word& w, double cutoff) const {
    return search(x, Mode::outside, w, cutoff, -1, nullptr);
}

Word DistanceOracle::nearest_cylinder(const Vec& x, int depth) const {
    check_depth_budget(m_, depth, ~0ULL >> 2);
    // Force descent strictly below the target generation so the returned
    // prefix comes from a resolved leaf.
    double scale_at_depth = 1.0;
    for (int i = 0; i < depth; ++i) scale_at_depth *= m_.lambda;
    Query q{m_, x, Mode::inside, Word{}, kNoCutoff, kNoCutoff,
            std::min(tol_, 0.25 * scale_at_depth * m_.diam), depth};
    q.visit(1.0, Vec{}, 0, kWithin, 0);
    return Word{depth, q.assign};
}

} // namespace hml
