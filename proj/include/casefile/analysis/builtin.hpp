// casefile - offline artifact analysis workbench
// Built-in identifiers and the derivation actions that grow the provenance tree.

#pragma once

#include <casefile/deobf/deobfuscate.hpp>
#include <casefile/engine/session.hpp>
#include <casefile/media/image.hpp>
#include <casefile/pcap/pcap.hpp>
#include <casefile/text/js_lexer.hpp>

#include <optional>
#include <string>
#include <vector>

namespace casefile {

namespace tags {
inline constexpr std::string_view pe = "PE";
inline constexpr std::string_view zip = "ZIP";
inline constexpr std::string_view pcap = "PCAP";
inline constexpr std::string_view bmp = "BMP";
inline constexpr std::string_view ico = "ICO";
inline constexpr std::string_view js = "JS";
inline constexpr std::string_view json = "JSON";
inline constexpr std::string_view ini = "INI";
inline constexpr std::string_view csv = "CSV";
} // namespace tags

/// Model of JS, JSON and INI nodes.
struct ScriptModel {
    CanonicalText text;
    std::vector<Token> tokens; ///< JS lexer output (also used for JSON/INI highlighting)
};

struct TableModel {
    char delimiter = ',';
    std::vector<std::vector<std::string>> rows;
};

using IconSet = std::vector<IconImage>;

/// Quote-aware split of delimited text into rows.
TableModel parse_table(std::string_view text, char delimiter);

/// Registration order: PE, ZIP, PCAP, BMP, ICO, JSON, INI, CSV, JS.
IdentifierRegistry builtin_registry();

/// Text of a buffer as UTF-8, falling back to ASCII decoding for binary content.
std::string buffer_text(ByteView data);

// ---- actions; each records a replayable derivation ----

/// Child node over the overlay range. Throws not_found when there is none.
const ArtifactNode& pe_overlay_node(AnalysisSession& session, NodeId pe_node);

/// Decoded response body of one HTTP transaction of a PCAP node.
const ArtifactNode& export_body(AnalysisSession& session, NodeId pcap_node, const StreamKey& key,
                                std::size_t transaction_index);

const ArtifactNode& zip_entry_node(AnalysisSession& session, NodeId zip_node, std::size_t entry_index,
                                   const std::optional<std::string>& password = std::nullopt);

/// Deobfuscated copy of a JS node (UTF-8). The log is returned through `log` when given.
const ArtifactNode& deobfuscated_node(AnalysisSession& session, NodeId js_node, TransformLog* log = nullptr);

DeobfuscationResult deobfuscate_text(ByteView data, std::size_t max_iterations = default_max_iterations);

/// A buffer handed to an API call, located through the call's bound parameters.
struct ApiBuffer {
    std::string api;
    std::uint64_t address = 0; ///< virtual address
    ByteRange range;           ///< file range inside the PE buffer
};

/// WriteFile / RegSetValueEx* buffers with immediate pointer and size arguments.
std::vector<ApiBuffer> api_buffers(ByteView data);

const ArtifactNode& api_buffer_node(AnalysisSession& session, NodeId pe_node, const ApiBuffer& buffer);

} // namespace casefile
