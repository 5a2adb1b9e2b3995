#pragma once

#include <string>
#include <vector>

#include "cvt/config.hpp"

namespace cvt {

enum class Subcommand { train, analyze, rank, compare_rf, render, all };

Subcommand subcommand_from_name(const std::string& name);

/// Artifact locations inside the run's output directory.
struct ArtifactPaths {
    std::string config_echo;
    std::string model;
    std::string train_summary;
    std::string traces;
    std::string cdfs;
    std::string correlations;
    std::string path_ranking;
    std::string edge_importance;
    std::string rank_summary;
    std::string feature_importance;
    std::string forest_summary;
    std::string dot;
    std::string svg;
};

ArtifactPaths artifact_paths(const std::string& output_dir);

struct RunOutcome {
    std::vector<std::string> artifacts_written;
    std::vector<std::string> warnings;
};

/// Executes one subcommand (or the whole chain for `all`). Staged runs read
/// their inputs from the previous stages' artifacts; a missing dependency is
/// a DataError naming the file. On any failure every artifact written by
/// this invocation is removed before the exception propagates.
RunOutcome run(Subcommand sub, const RunConfig& cfg);

} // namespace cvt
