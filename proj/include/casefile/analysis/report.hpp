// casefile - offline artifact analysis workbench
// Recursive (--deep) expansion of a session and the JSON report document.

#pragma once

#include <casefile/analysis/builtin.hpp>
#include <casefile/extract/strings.hpp>

#include <map>
#include <string>
#include <vector>

namespace casefile {

inline constexpr std::string_view tool_version = "0.1.0";

struct AnalyzeOptions {
    bool deep = false;
    std::vector<std::string> passwords; ///< tried in order on encrypted entries
    std::size_t min_string_length = default_min_string_length;
    std::size_t block_size = 256;
};

struct AnalysisRun {
    AnalysisSession session;
    NodeId root = 0;
    std::map<NodeId, TransformLog> deobfuscation; ///< JS nodes that were run through the passes
    std::vector<std::string> warnings;
    bool limit_reached = false;
};

AnalysisRun analyze_buffer(DataBuffer buffer, const AnalyzeOptions& options);
/// Throws Error(io) when the path cannot be read.
AnalysisRun analyze_path(const std::string& path, const AnalyzeOptions& options);

/// Expands `node` and everything derived from it, bounded by the session's
/// max_depth and max_derived_nodes.
void expand_deep(AnalysisRun& run, NodeId node, const AnalyzeOptions& options);

/// Deterministic report: identical inputs and options give identical bytes.
std::string report_json(const AnalysisRun& run, const AnalyzeOptions& options);

/// Session tree only: {nodes: [{id, name, tag, method, parent, action, hints}]}.
std::string session_json(const AnalysisSession& session);

} // namespace casefile
