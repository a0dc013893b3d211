#pragma once

#include <string>
#include <vector>

#include "hml/analysis.hpp"
#include "hml/beta.hpp"
#include "hml/config.hpp"

namespace hml {

// Every artifact carries the config digest: CSV files as a leading
// `# config_digest=<hex>` comment, JSON files as a "config_digest" member.
// Readers take the digest they expect and throw DigestMismatch when the file
// was produced under a different configuration, MissingInput when absent.

void ensure_dir(const std::string& dir);

// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);
double parse_double(const std::string& text);

void write_model_json(const std::string& dir, const IfsModel& model,
                      const std::string& digest);
void write_cubes_csv(const std::string& dir, const CubeLattice& lat,
                     const std::string& digest);
void write_betas_csv(const std::string& dir, const NonflatnessScan& scan,
                     const CubeLattice& lat, const std::string& digest);
void write_omega_csv(const std::string& dir, const OmegaEstimate& omega,
                     const std::string& digest);
void write_run_meta(const std::string& dir, const WalkConfig& walk,
                    const WalkDiagnostics& diag, const std::string& digest);
void write_disk_sanity(const std::string& dir, const DiskCheck& check,
                       const std::string& digest);
void write_decay_csv(const std::string& dir, const DecaySeries& decay,
                     const std::string& digest);
void write_stopping_csv(const std::string& dir, const std::vector<StoppingReport>& reports,
                        const CubeLattice& lat, const std::string& digest);

struct ReportSummary {
    double gamma_hat = 0.0;
    Interval gamma_ci;
    double t_bound = 0.0;
    double content_bound = 0.0;
    double omega_excess = 0.0;
    double dim_hat = 0.0;
    Interval dim_ci;
};

void write_report_json(const std::string& dir, const ReportSummary& summary,
                       const std::string& digest);

// Generic digest-checked CSV access for the reporting stage.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path, const std::string& expect_digest);

struct RunMeta {
    WalkConfig walk;
    WalkDiagnostics diag;
};

RunMeta read_run_meta(const std::string& dir, const std::string& expect_digest);
OmegaEstimate read_omega(const std::string& dir, const CubeLattice& lat,
                         const std::string& expect_digest);
ReportSummary read_report_json(const std::string& dir, const std::string& expect_digest);
bool has_disk_sanity(const std::string& dir);
DiskCheck read_disk_sanity(const std::string& dir, const std::string& expect_digest);

} // namespace hml
