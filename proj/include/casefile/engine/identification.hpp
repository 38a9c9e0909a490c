// casefile - offline artifact analysis workbench
// Identifier registry: probes, viewer plans and the identification order

#pragma once

#include <casefile/core/bytes.hpp>

#include <any>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace casefile {

/// Ordered by confidence. `user` is an analyst override and outranks any probe.
enum class IdentMethod { fallback, heuristic, extension, magic, user };

const char* to_string(IdentMethod method) noexcept;

struct TypeIdentification {
    std::string tag;
    IdentMethod method = IdentMethod::fallback;

    friend bool operator==(const TypeIdentification&, const TypeIdentification&) = default;
};

namespace tags {
inline constexpr std::string_view text = "TEXT";
inline constexpr std::string_view binary = "BINARY";
inline constexpr std::string_view folder = "FOLDER";
} // namespace tags

bool is_generic_tag(std::string_view tag) noexcept;

enum class ViewerKind { buffer, text, lexical, container, image, disasm, table };

const char* to_string(ViewerKind kind) noexcept;

struct HighlightZone {
    ByteRange range;
    std::string label;
    std::string style; ///< abstract style token, e.g. "zone.header"
};

struct ViewerConfig {
    std::vector<HighlightZone> zones;
    std::string note;
};

struct ViewerDescriptor {
    ViewerKind kind = ViewerKind::buffer;
    bool primary = false;
    ViewerConfig config;
};

using ViewerPlan = std::vector<ViewerDescriptor>;

/// Plan with one descriptor per kind; `primary` indexes into `kinds`.
ViewerPlan make_plan(std::initializer_list<ViewerKind> kinds, std::size_t primary = 0);
const ViewerDescriptor& primary_viewer(const ViewerPlan& plan);
std::string plan_summary(const ViewerPlan& plan); ///< "buffer,disasm"

enum class Severity { info, suspicious, high_risk };

const char* to_string(Severity severity) noexcept;

using NodeId = std::uint64_t;

struct SecurityHint {
    Severity severity = Severity::info;
    std::string text;
    NodeId origin = 0;

    friend bool operator==(const SecurityHint&, const SecurityHint&) = default;
};

/// Parsed models are stored type-erased as shared_ptr<const T> so nodes stay
/// cheap to copy and the models immutable.
template <typename T>
std::any make_model(T value) {
    return std::make_shared<const T>(std::move(value));
}

template <typename T>
const T* model_cast(const std::any& model) {
    auto p = std::any_cast<std::shared_ptr<const T>>(&model);
    return p ? p->get() : nullptr;
}

struct ParseOutcome {
    std::any model;
    std::vector<SecurityHint> hints;
};

struct IdentifierDescriptor {
    std::string tag;
    std::string description;
    /// Must be pure: same bytes and name, same answer.
    std::function<std::optional<TypeIdentification>(ByteView, std::string_view)> probe;
    /// Throws casefile::Error on malformed input.
    std::function<ParseOutcome(ByteView)> parse;
    std::function<ViewerPlan(const std::any& model, ByteView data)> viewer_plan;
};

class IdentifierRegistry {
public:
    void add(IdentifierDescriptor descriptor);
    const IdentifierDescriptor* find(std::string_view tag) const noexcept;
    bool known_tag(std::string_view tag) const noexcept;

    /// Best probe answer by method (magic > extension > heuristic); ties go to
    /// the earliest registration. Falls back to TEXT/BINARY. Never throws.
    TypeIdentification identify(ByteView data, std::string_view name_hint) const;

    const std::vector<IdentifierDescriptor>& descriptors() const noexcept { return descriptors_; }

private:
    std::vector<IdentifierDescriptor> descriptors_;
};

/// Lowercased extension without the dot, or empty.
std::string extension_of(std::string_view name);

} // namespace casefile
