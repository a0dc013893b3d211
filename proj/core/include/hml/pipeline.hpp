#pragma once

#include <string>

#include "hml/artifacts.hpp"

namespace hml {

// Pipeline stages behind the command-line verbs. Each stage rebuilds what it
// can from the config, reads earlier artifacts under the config digest, and
// writes its own artifacts into out_dir. All outputs are deterministic
// functions of (config, seed, workers), except the wall_time_s diagnostics.

void cmd_generate(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_betas(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_harmonic(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_analyze(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_report(const ExperimentConfig& cfg, const std::string& out_dir);

} // namespace hml
