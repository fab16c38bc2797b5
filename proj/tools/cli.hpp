#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gbafs/pipeline.hpp"

namespace gbafs::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kDataError = 2, kNumericalError = 3 };

inline constexpr const char* kOutputDirEnv = "GBAFS_OUTPUT_DIR";
inline constexpr const char* kThreadsEnv = "GBAFS_THREADS";

struct RunConfig {
    std::string input;
    std::string label = "label";
    std::uint64_t seed = 0;

    // Selection.
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    std::size_t folds = 5;
    std::size_t k_max = 0;
    double knee_sensitivity = 1.0;
    std::size_t knee_smoothing = 0;
    bool reference_indices = true;
    std::size_t pam_restarts = 1;

    // Splitting and evaluation.
    double train_fraction = 0.75;
    std::size_t neighbors = 5;
    std::size_t repetitions = 10;

    // Baselines.
    std::string method;
    std::size_t k = 0;
    std::size_t relieff_neighbors = 10;
    std::size_t relieff_samples = 0;

    // Feature subsets for evaluate.
    std::string features;
    std::string selection;

    std::filesystem::path output_dir = "gbafs-output";
    std::size_t threads = 0;
    bool plots = true;
    bool export_feature_space = false;

    PipelineConfig pipeline() const;
};

/// Parses `args` (args[0] is the program name) and runs the subcommand.
/// Returns an ExitCode; messages go to `out` and `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_select(const RunConfig& cfg, std::ostream& out);
int cmd_embed_only(const RunConfig& cfg, std::ostream& out);
int cmd_baseline(const RunConfig& cfg, std::ostream& out);
int cmd_evaluate(const RunConfig& cfg, std::ostream& out);
int cmd_compare(const RunConfig& cfg, std::ostream& out);

}  // namespace gbafs::cli
