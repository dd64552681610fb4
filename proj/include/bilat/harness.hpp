#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bilat/sim.hpp"

namespace bilat {

/// Simulation config plus the settings that only affect reporting.
struct ExperimentConfig {
    SimConfig sim;
    double t_skip = 1.0;  // s, start of the metrics window
};

/// Parses the flat `key = value` config format. Omitted keys keep their
/// defaults. Relative model paths resolve against `base_dir`.
///
/// Throws ParseError on syntax errors or unknown keys and ValidationError on
/// values that violate a constraint (e.g. a non-integer alpha).
ExperimentConfig parse_config(std::string_view text,
                              const std::filesystem::path& base_dir = std::filesystem::path{});

/// Reads a config file. Throws IoError when unreadable.
ExperimentConfig load_config(const std::filesystem::path& path);

struct NormStats {
    double mean = 0.0;
    double max = 0.0;
};

/// Error statistics over t in [t_skip, T].
struct RunMetrics {
    std::size_t records = 0;
    std::size_t window_records = 0;
    NormStats omega_e;
    NormStats r_e;
    NormStats w_e;
    NormStats x_e;
    /// ||log(R_l R_f^-alpha)||, the geodesic posture error regardless of which
    /// variant drove the controller.
    NormStats geodesic;
    double contact_fraction = 0.0;
    /// Largest |v_z| of the follower over records flagged as in contact.
    double max_contact_z_velocity = 0.0;
};

RunMetrics compute_metrics(const SimLog& log, int alpha, double t_skip);

/// Fixed column order of log.csv.
std::vector<std::string> csv_columns();

/// One header line plus one row per record, 17 significant digits.
void write_csv(const SimLog& log, std::ostream& out);

/// Parses a log.csv back into column-major numbers keyed by header order.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(std::string_view name) const;
};
CsvTable read_csv(std::istream& in);

/// Recomputes the summary metrics from a parsed log.csv alone.
RunMetrics metrics_from_csv(const CsvTable& table, int alpha, double t_skip);

struct RunManifest {
    std::filesystem::path outdir;
    ErrorVariant variant = ErrorVariant::MatrixError;
    RunMetrics metrics;
    std::vector<std::filesystem::path> files;
};

/// Runs the simulation and writes log.csv, summary.json and the plot files.
/// Throws IoError if the directory cannot be written.
RunManifest run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& outdir);

struct ComparisonReport {
    RunManifest matrix;
    RunManifest vector;
    /// mean ||omega_e|| matrix/vector, each run measured with its own error; empty
    /// when the vector run's mean is ~0.
    std::optional<double> ratio;
    /// Same ratio on the geodesic error, which is variant-independent.
    std::optional<double> geodesic_ratio;
};

/// Runs both variants from the same config and initial state under
/// outdir/matrix and outdir/vector, then writes outdir/comparison.json.
ComparisonReport compare_variants(const ExperimentConfig& cfg, const std::filesystem::path& outdir);

/// Writes pose, trajectory and error-norm data files, each with a gnuplot
/// script that reads only that file. Follower series are scaled by alpha and
/// beta. Throws ValidationError on an empty log and IoError on write failure.
std::vector<std::filesystem::path> emit_plots(const SimLog& log, const ScalingConfig& scaling,
                                              const std::filesystem::path& outdir);

}  // namespace bilat
