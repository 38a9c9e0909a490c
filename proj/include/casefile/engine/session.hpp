// casefile - offline artifact analysis workbench
// Analysis session: owns the registry and the provenance tree of artifacts.

#pragma once

#include <casefile/engine/content.hpp>
#include <casefile/engine/identification.hpp>

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace casefile {

struct ExternalSource {
    std::string path;
};

struct DerivedSource {
    NodeId parent = 0;
    std::optional<ByteRange> range; ///< set when the child is a plain slice
    std::string action;
};

using SourceRef = std::variant<ExternalSource, DerivedSource>;

/// Immutable content plus where it came from.
struct DataBuffer {
    std::shared_ptr<const Bytes> content;
    std::string name;
    SourceRef source;

    ByteView bytes() const noexcept {
        return content ? ByteView(*content) : ByteView();
    }
    std::size_t size() const noexcept { return content ? content->size() : 0; }

    static DataBuffer external(Bytes data, std::string name, std::string path = {});
    static DataBuffer from_file(const std::string& path);
};

/// A recorded action: replaying it on the parent's bytes must yield the
/// child's bytes exactly.
struct Derivation {
    std::string label;
    std::optional<ByteRange> range;
    std::function<Bytes(ByteView parent)> replay;

    static Derivation slice(ByteRange range, std::string label);
};

struct FolderEntry {
    std::string name;
    std::uint64_t size = 0;
    bool directory = false;
};

struct FolderModel {
    std::string path;
    std::vector<FolderEntry> entries;
};

struct ArtifactNode {
    NodeId id = 0;
    std::optional<NodeId> parent;
    DataBuffer buffer;
    ContentClass content;
    TypeIdentification identification;
    std::any model;
    ViewerPlan viewers;
    std::vector<SecurityHint> hints;
    std::vector<NodeId> children;
    std::string action_label;
    std::optional<std::string> parse_error;

    template <typename T>
    const T* model_as() const { return model_cast<T>(model); }
    const std::string& tag() const noexcept { return identification.tag; }
};

struct SessionSettings {
    std::size_t min_string_length = 5;
    std::size_t entropy_block_size = 256;
    std::vector<std::string> hash_algorithms{"crc32", "md5", "sha1", "sha256"};
    std::size_t max_depth = 8;
    std::size_t max_derived_nodes = 512;
};

struct OverviewEntry {
    NodeId id = 0;
    std::optional<NodeId> parent;
    std::size_t depth = 0;
    std::string name;
    std::string tag;
    IdentMethod method = IdentMethod::fallback;
    std::string action;
    std::array<std::size_t, 3> hint_counts{}; ///< indexed by Severity
};

struct OverviewReport {
    std::vector<OverviewEntry> entries; ///< depth-first, roots in opening order

    std::string to_text() const;
};

class AnalysisSession {
public:
    explicit AnalysisSession(IdentifierRegistry registry = {}, SessionSettings settings = {});

    void register_identifier(IdentifierDescriptor descriptor);
    const IdentifierRegistry& registry() const noexcept { return registry_; }
    const SessionSettings& settings() const noexcept { return settings_; }
    SessionSettings& settings() noexcept { return settings_; }

    TypeIdentification identify(ByteView data, std::string_view name_hint) const {
        return registry_.identify(data, name_hint);
    }

    /// Runs classification, identification, parsing and viewer selection.
    /// Parse failures degrade to BINARY with a suspicious hint.
    const ArtifactNode& open_artifact(DataBuffer buffer,
                                      std::optional<std::string> override_tag = std::nullopt);
    const ArtifactNode& open_file(const std::string& path);
    const ArtifactNode& open_folder(const std::string& path);

    /// Creates a child by replaying `action` on the parent's content.
    const ArtifactNode& derive(NodeId parent, std::string name, Derivation action,
                               std::optional<std::string> override_tag = std::nullopt);

    /// Child over a byte range, labelled "manual selection [start..end)".
    const ArtifactNode& reanalyze_range(NodeId parent, ByteRange range,
                                        std::optional<std::string> override_tag = std::nullopt);

    const ArtifactNode& node(NodeId id) const;
    bool contains(NodeId id) const noexcept { return nodes_.count(id) != 0; }
    const std::vector<NodeId>& roots() const noexcept { return roots_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t depth_of(NodeId id) const;

    /// Re-executes the recorded action of a derived node on its parent.
    Bytes replay(NodeId id) const;

    void add_hint(NodeId id, SecurityHint hint);

    OverviewReport overview() const;

    /// Depth-first visit order used by overview and reports.
    std::vector<NodeId> depth_first() const;

private:
    ArtifactNode& insert(ArtifactNode node);

    IdentifierRegistry registry_;
    SessionSettings settings_;
    std::map<NodeId, ArtifactNode> nodes_;
    std::map<NodeId, Derivation> derivations_;
    std::vector<NodeId> roots_;
    NodeId next_id_ = 1;
};

} // namespace casefile
