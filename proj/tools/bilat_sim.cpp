// bilat-sim: run, compare and self-check the scaled bilateral teleoperation
// simulation.
//
// Exit codes: 0 success, 1 other failure, 2 simulation diverged, 3 config error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bilat/errors.hpp"
#include "bilat/harness.hpp"
#include "bilat/log.hpp"
#include "bilat/selfcheck.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitConfig = 3;

bilat::ExperimentConfig load(const std::string& path) {
    return path.empty() ? bilat::parse_config("") : bilat::load_config(path);
}

void print_metrics(const char* label, const bilat::RunMetrics& m) {
    std::printf("%-8s records=%zu window=%zu mean|omega_e|=%.6g mean|r_e|=%.6g mean|w_e|=%.6g "
                "geodesic=%.6g contact=%.3f\n",
                label, m.records, m.window_records, m.omega_e.mean, m.r_e.mean, m.w_e.mean,
                m.geodesic.mean, m.contact_fraction);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scaled 4-channel bilateral teleoperation simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string outdir;
    std::string variant;
    int substeps = 0;

    auto* run_cmd = app.add_subcommand("run", "Run one experiment and write logs and plots");
    run_cmd->add_option("--config", config_path, "Config file (empty for defaults)");
    run_cmd->add_option("--out", outdir, "Output directory")->required();
    run_cmd->add_option("--variant", variant, "Posture error: matrix or vector")
        ->check(CLI::IsMember({"matrix", "vector"}));
    run_cmd->add_option("--substeps", substeps, "Physics substeps per control period")
        ->check(CLI::PositiveNumber);

    auto* compare_cmd = app.add_subcommand("compare", "Run both posture-error variants");
    compare_cmd->add_option("--config", config_path, "Config file (empty for defaults)");
    compare_cmd->add_option("--out", outdir, "Output directory")->required();

    auto* check_cmd = app.add_subcommand("check", "Run the built-in invariant checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            bilat::ExperimentConfig cfg = load(config_path);
            if (!variant.empty()) {
                cfg.sim.controller.variant = bilat::parse_variant(variant);
            }
            if (substeps > 0) {
                cfg.sim.substeps = substeps;
            }
            const bilat::RunManifest manifest = bilat::run_experiment(cfg, outdir);
            print_metrics(std::string(bilat::to_string(manifest.variant)).c_str(), manifest.metrics);
            return 0;
        }
        if (compare_cmd->parsed()) {
            const bilat::ExperimentConfig cfg = load(config_path);
            const bilat::ComparisonReport report = bilat::compare_variants(cfg, outdir);
            print_metrics("matrix", report.matrix.metrics);
            print_metrics("vector", report.vector.metrics);
            auto show = [](const char* label, const std::optional<double>& r) {
                if (r) {
                    std::printf("%s ratio (matrix/vector) = %.6g\n", label, *r);
                } else {
                    std::printf("%s ratio (matrix/vector) = N/A\n", label);
                }
            };
            show("rotation error", report.ratio);
            show("geodesic rotation error", report.geodesic_ratio);
            return 0;
        }
        if (check_cmd->parsed()) {
            bool ok = true;
            for (const auto& r : bilat::run_self_check()) {
                std::printf("[%s] %-48s worst=%.3e tol=%.1e\n", r.passed ? "PASS" : "FAIL",
                            r.name.c_str(), r.worst, r.tolerance);
                ok = ok && r.passed;
            }
            return ok ? 0 : kExitFailure;
        }
    } catch (const bilat::Diverged& e) {
        std::cerr << "diverged: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const bilat::ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const bilat::ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return 0;
}
