#pragma once

#include <cstdint>
#include <string>

#include "hml/beta.hpp"
#include "hml/fractal.hpp"
#include "hml/wos.hpp"

namespace hml {

std::string scan_kind_name(ScanKind k);
ScanKind scan_kind_from_name(const std::string& name);
std::string pole_mode_name(PoleMode m);
PoleMode pole_mode_from_name(const std::string& name);

struct BetaParams {
    int angle_grid = kDefaultAngleGrid;
    double line_step = kDefaultLineStep;
    int depth_min = 0;
    int depth_max = -1;               // -1 derives the lattice depth
    ScanKind kind = ScanKind::all;
};

struct AnalysisParams {
    std::string r0 = "r";
    int m0 = 2;
    int k_max = 3;
    double t_prime = 0.0;             // 0 derives the middle of the admissible range
    double factor = 16.0;
    int stop_scan_depth = 2;          // scan every cube of generations 0..this
    int stop_m0 = 6;                  // per-cube scan depth, clipped to the lattice
    double quantile = 0.5;
    int n_bootstrap = 200;
};

// Self-check block: estimates the exit law of the unit disk from its center,
// where every equal arc must carry equal mass, and records the chi-square
// verdict alongside the run.
struct DiskSanityParams {
    bool enabled = false;
    std::uint64_t walkers = 100000;
    int arcs = 16;
    double eps = 1e-3;
};

struct ExperimentConfig {
    IfsSpec model;
    int lattice_depth = 4;
    int sample_depth = -1;            // -1 derives lattice_depth + 2
    BetaParams beta;
    WalkConfig walk;                  // seed / n_workers mirror the top level
    AnalysisParams analysis;
    DiskSanityParams disk_sanity;
    std::uint64_t seed = 1;
    int workers = 1;
};

// Parses the JSON experiment description. Unknown keys and inconsistent
// depths are ConfigErrors; a missing file is MissingInput. All derived
// defaults are filled in, so round-tripping through canonical_json is stable.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization of the effective config: every field explicit,
// keys sorted. The digest of this string is stamped into every output file,
// which is how cross-stage consistency is enforced.
std::string canonical_json(const ExperimentConfig& cfg);
std::string config_digest(const ExperimentConfig& cfg);

// FNV-1a 64-bit over bytes, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

} // namespace hml
