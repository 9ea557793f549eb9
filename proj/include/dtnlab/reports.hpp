#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dtnlab/spectral.hpp"

namespace dtnlab {

inline constexpr const char* kLibraryVersion = "dtnlab 0.1.0";

extern const std::vector<std::string> kExperimentNames;

struct ExperimentConfig {
    std::string experiment;
    int n = 256;
    double L = 2.0 * kPi;
    double Y = -1.0;  // -1 means 2L
    int y_levels = 256;
    double N0 = 2.0;
    std::uint64_t seed = 42;
    int trials = 100;
    int band_limit = 32;
    double p = 2.0;
    bool c0_auto = true;
    double c0_value = 1.0;
    std::string out_dir = "out";
    bool plots = false;
    bool paper_literal = false;

    double resolved_Y() const { return Y > 0.0 ? Y : 2.0 * L; }
};

struct ValidationResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;  // every violation, not just the first
    bool ok() const { return errors.empty(); }
};

// Parses and validates a config JSON document (text). Unknown keys are rejected.
ValidationResult validate_config(const std::string& json_text);

struct CheckRecord {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string cmp;  // "le" or "ge": pass iff value <= tol / value >= tol
    bool pass = false;
};
CheckRecord check_le(std::string name, double value, double tol);
CheckRecord check_ge(std::string name, double value, double tol);

struct CsvTable {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
std::string csv_cell(double v);  // fixed "%.17g" formatting, locale-free

struct RunReport {
    ExperimentConfig config;
    std::vector<CheckRecord> records;
    std::vector<CsvTable> tables;
    double wall_seconds = 0.0;
    bool all_pass() const;
};

RunReport run_experiment(const ExperimentConfig& cfg);

// summary JSON + one CSV per table (+ SVG line plots when cfg.plots); returns file list
std::vector<std::string> write_report(const RunReport& report);

// individual experiments (exposed for the acceptance suite)
RunReport run_dtn_verify(const ExperimentConfig& cfg);
RunReport run_commutator_sweep(const ExperimentConfig& cfg);
RunReport run_identity_check(const ExperimentConfig& cfg);
RunReport run_square_report(const ExperimentConfig& cfg);
RunReport run_carleson_report(const ExperimentConfig& cfg);
RunReport run_kenig_stein_check(const ExperimentConfig& cfg);
RunReport run_kernel_check(const ExperimentConfig& cfg);

}  // namespace dtnlab
