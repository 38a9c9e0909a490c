// casefile - offline artifact analysis workbench
// Headless viewer models: pure functions from parsed data to renderable lines.

#pragma once

#include <casefile/core/bytes.hpp>
#include <casefile/disasm/x86.hpp>
#include <casefile/engine/identification.hpp>
#include <casefile/media/image.hpp>
#include <casefile/text/js_lexer.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace casefile {

struct ZipArchive;
struct FolderModel;

// ---- buffer view ----

enum class InferenceKind { ascii_string, utf16_string, float32, float64, int32, int64 };

const char* to_string(InferenceKind kind) noexcept;

struct Inference {
    ByteRange range;
    InferenceKind kind = InferenceKind::int32;
    std::string value;
};

struct BufferViewModel {
    std::size_t bytes_per_line = 16;
    std::vector<HighlightZone> zones;
    std::vector<Inference> inferences;
};

inline constexpr std::size_t min_inferred_string = 4;

/// Candidate little-endian interpretations at `offset`. NaN floats are skipped.
std::vector<Inference> infer_at(ByteView data, std::uint64_t offset);

std::size_t line_count(ByteView data, std::size_t bytes_per_line);

/// Lines [first, first + count). Format: "%08x  hex  |glyphs|" plus zone markers.
std::vector<std::string> render_buffer_view(ByteView data, const BufferViewModel& model, std::size_t first_line,
                                            std::size_t count);
std::vector<std::string> render_buffer_view(ByteView data, const BufferViewModel& model);

/// Inverse of the hex column, used to check the rendering.
Bytes parse_hex_lines(const std::vector<std::string>& lines);

// ---- lexical view ----

struct StyledSpan {
    std::size_t begin = 0; ///< byte offsets in the line text
    std::size_t end = 0;
    std::string style;
};

struct StyledLine {
    std::string text;
    std::vector<StyledSpan> spans;
};

/// Token index range [first, last) collapsed to one marker.
struct FoldRegion {
    std::size_t first = 0;
    std::size_t last = 0;
};

struct LexicalViewModel {
    std::vector<Token> tokens;
    std::set<TokenKind> hidden{TokenKind::comment};
    std::vector<FoldRegion> folds;
};

inline constexpr std::string_view fold_marker = "⟨…⟩";

LexicalViewModel make_lexical_view(std::u32string_view source);

/// Bodies of `function ... { }` as fold regions (outermost only).
std::vector<FoldRegion> function_body_folds(const std::vector<Token>& tokens);

std::vector<StyledLine> render_lexical_view(const LexicalViewModel& model);
std::string join_lines(const std::vector<StyledLine>& lines);

// ---- container view ----

struct ContainerEntry {
    std::string name;
    std::uint64_t size = 0;
    std::string attributes;
    std::optional<NodeId> child;
};

struct ContainerViewModel {
    std::vector<ContainerEntry> entries;
};

ContainerViewModel container_view(const ZipArchive& archive);
ContainerViewModel container_view(const FolderModel& folder);
std::vector<std::string> render_container_view(const ContainerViewModel& model);

// ---- image ----

Bytes render_ppm(const ImageModel& image);

// ---- disassembly ----

std::string render_annotation(const ApiAnnotation& annotation);
std::vector<std::string> render_disassembly(const DisassemblyModel& model);

// ---- tables ----

/// Left-aligned columns separated by two spaces.
std::vector<std::string> render_table(const std::vector<std::string>& header,
                                      const std::vector<std::vector<std::string>>& rows);

// ---- selection sync ----

struct SelectionState {
    std::uint64_t buffer_length = 0;
    ByteRange active;
    std::uint64_t cursor = 0;
    std::vector<std::string> subscribers;
};

struct SelectionUpdate {
    SelectionState state;
    std::vector<std::string> notified;
};

/// Throws out_of_bounds when the range leaves the buffer; the input state is untouched.
SelectionUpdate sync_selection(const SelectionState& state, ByteRange range, const std::string& origin);

} // namespace casefile
