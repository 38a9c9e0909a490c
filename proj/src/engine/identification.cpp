// casefile - offline artifact analysis workbench

#include <casefile/engine/identification.hpp>

#include <casefile/engine/content.hpp>

#include <algorithm>
#include <cctype>

namespace casefile {

const char* to_string(IdentMethod method) noexcept {
    switch (method) {
    case IdentMethod::fallback: return "fallback";
    case IdentMethod::heuristic: return "heuristic";
    case IdentMethod::extension: return "extension";
    case IdentMethod::magic: return "magic";
    case IdentMethod::user: return "user";
    }
    return "?";
}

bool is_generic_tag(std::string_view tag) noexcept {
    return tag == tags::text || tag == tags::binary || tag == tags::folder;
}

const char* to_string(ViewerKind kind) noexcept {
    switch (kind) {
    case ViewerKind::buffer: return "buffer";
    case ViewerKind::text: return "text";
    case ViewerKind::lexical: return "lexical";
    case ViewerKind::container: return "container";
    case ViewerKind::image: return "image";
    case ViewerKind::disasm: return "disasm";
    case ViewerKind::table: return "table";
    }
    return "?";
}

const char* to_string(Severity severity) noexcept {
    switch (severity) {
    case Severity::info: return "info";
    case Severity::suspicious: return "suspicious";
    case Severity::high_risk: return "high-risk";
    }
    return "?";
}

ViewerPlan make_plan(std::initializer_list<ViewerKind> kinds, std::size_t primary) {
    ViewerPlan plan;
    std::size_t i = 0;
    for (auto k : kinds) plan.push_back(ViewerDescriptor{k, i++ == primary, {}});
    return plan;
}

const ViewerDescriptor& primary_viewer(const ViewerPlan& plan) {
    auto it = std::find_if(plan.begin(), plan.end(), [](const auto& d) { return d.primary; });
    if (it == plan.end()) throw Error(Errc::not_found, "viewer plan has no primary viewer");
    return *it;
}

std::string plan_summary(const ViewerPlan& plan) {
    std::string out;
    for (const auto& d : plan) {
        if (!out.empty()) out += ',';
        out += to_string(d.kind);
    }
    return out;
}

void IdentifierRegistry::add(IdentifierDescriptor descriptor) {
    if (descriptor.tag.empty()) throw Error(Errc::invalid_argument, "identifier tag is empty");
    if (is_generic_tag(descriptor.tag) || find(descriptor.tag) != nullptr) {
        throw Error(Errc::duplicate, "identifier already registered: " + descriptor.tag);
    }
    if (!descriptor.probe) throw Error(Errc::invalid_argument, descriptor.tag + " has no probe");
    descriptors_.push_back(std::move(descriptor));
}

const IdentifierDescriptor* IdentifierRegistry::find(std::string_view tag) const noexcept {
    for (const auto& d : descriptors_) {
        if (d.tag == tag) return &d;
    }
    return nullptr;
}

bool IdentifierRegistry::known_tag(std::string_view tag) const noexcept {
    return is_generic_tag(tag) || find(tag) != nullptr;
}

TypeIdentification IdentifierRegistry::identify(ByteView data, std::string_view name_hint) const {
    std::optional<TypeIdentification> best;
    for (const auto& d : descriptors_) {
        std::optional<TypeIdentification> answer;
        try {
            answer = d.probe(data, name_hint);
        } catch (...) {
            continue; // a misbehaving probe must not break totality
        }
        if (!answer) continue;
        answer->tag = d.tag;
        if (answer->method == IdentMethod::fallback || answer->method == IdentMethod::user) {
            answer->method = IdentMethod::heuristic;
        }
        if (!best || answer->method > best->method) best = std::move(answer);
    }
    if (best) return *best;
    auto cls = classify_content(data);
    return {std::string(cls.is_text() ? tags::text : tags::binary), IdentMethod::fallback};
}

std::string extension_of(std::string_view name) {
    auto slash = name.find_last_of("/\\");
    if (slash != std::string_view::npos) name.remove_prefix(slash + 1);
    auto dot = name.rfind('.');
    if (dot == std::string_view::npos || dot + 1 == name.size()) return {};
    std::string ext(name.substr(dot + 1));
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

} // namespace casefile
