// casefile - offline artifact analysis workbench

#include <casefile/engine/session.hpp>

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace casefile {

namespace fs = std::filesystem;

DataBuffer DataBuffer::external(Bytes data, std::string name, std::string path) {
    DataBuffer b;
    b.content = std::make_shared<const Bytes>(std::move(data));
    b.source = ExternalSource{path.empty() ? name : std::move(path)};
    b.name = std::move(name);
    return b;
}

DataBuffer DataBuffer::from_file(const std::string& path) {
    return external(read_file(path), fs::path(path).filename().string(), path);
}

Derivation Derivation::slice(ByteRange range, std::string label) {
    Derivation d;
    d.label = std::move(label);
    d.range = range;
    d.replay = [range](ByteView parent) {
        auto part = casefile::slice(parent, range);
        return Bytes(part.begin(), part.end());
    };
    return d;
}

namespace {

ParseOutcome generic_parse(ByteView data, std::string_view tag, const ContentClass& cls) {
    ParseOutcome out;
    if (tag == tags::text) {
        auto text_cls = cls.is_text() ? cls : ContentClass{ContentKind::text, TextEncoding::ascii, false};
        out.model = make_model(decode_text(data, text_cls));
    }
    return out;
}

ViewerPlan generic_plan(std::string_view tag) {
    if (tag == tags::text) return make_plan({ViewerKind::text, ViewerKind::buffer});
    if (tag == tags::folder) return make_plan({ViewerKind::container});
    return make_plan({ViewerKind::buffer});
}

void check_plan(ViewerPlan& plan, std::string_view tag) {
    auto primaries = std::count_if(plan.begin(), plan.end(), [](const auto& d) { return d.primary; });
    if (plan.empty() || primaries != 1) {
        throw Error(Errc::bad_format, std::string(tag) + " produced a viewer plan without exactly one primary viewer");
    }
}

} // namespace

AnalysisSession::AnalysisSession(IdentifierRegistry registry, SessionSettings settings)
    : registry_(std::move(registry)), settings_(std::move(settings)) {}

void AnalysisSession::register_identifier(IdentifierDescriptor descriptor) {
    registry_.add(std::move(descriptor));
}

ArtifactNode& AnalysisSession::insert(ArtifactNode node) {
    node.id = next_id_++;
    for (auto& h : node.hints) h.origin = node.id;
    auto id = node.id;
    auto [it, ok] = nodes_.emplace(id, std::move(node));
    (void)ok;
    auto& inserted = it->second;
    if (inserted.parent) {
        nodes_.at(*inserted.parent).children.push_back(id);
    } else {
        roots_.push_back(id);
    }
    return inserted;
}

const ArtifactNode& AnalysisSession::open_artifact(DataBuffer buffer, std::optional<std::string> override_tag) {
    if (auto* derived = std::get_if<DerivedSource>(&buffer.source)) {
        if (!contains(derived->parent)) {
            throw Error(Errc::not_found, "unknown parent node " + std::to_string(derived->parent));
        }
        if (derived->range && !derived->range->within(node(derived->parent).buffer.size())) {
            throw Error(Errc::out_of_bounds, "derived range " + to_string(*derived->range) +
                                                 " exceeds parent buffer");
        }
    }
    if (override_tag && !registry_.known_tag(*override_tag)) {
        throw Error(Errc::not_found, "unknown identifier tag: " + *override_tag);
    }

    ArtifactNode n;
    ByteView data = buffer.bytes();
    n.content = classify_content(data);
    n.identification = override_tag ? TypeIdentification{*override_tag, IdentMethod::user}
                                     : registry_.identify(data, buffer.name);
    if (auto* derived = std::get_if<DerivedSource>(&buffer.source)) {
        n.parent = derived->parent;
        n.action_label = derived->action;
    }

    const auto& tag = n.identification.tag;
    try {
        if (is_generic_tag(tag)) {
            n.model = generic_parse(data, tag, n.content).model;
            n.viewers = generic_plan(tag);
        } else {
            const auto* d = registry_.find(tag);
            ParseOutcome outcome;
            if (d->parse) outcome = d->parse(data);
            n.model = std::move(outcome.model);
            n.hints = std::move(outcome.hints);
            n.viewers = d->viewer_plan ? d->viewer_plan(n.model, data) : generic_plan(tags::binary);
        }
        check_plan(n.viewers, tag);
    } catch (const Error& e) {
        n.parse_error = e.what();
        n.hints.clear();
        n.hints.push_back({Severity::suspicious, tag + " parser rejected the data: " + e.what(), 0});
        n.identification = {std::string(tags::binary), IdentMethod::fallback};
        n.model.reset();
        n.viewers = generic_plan(tags::binary);
    }
    n.buffer = std::move(buffer);
    return insert(std::move(n));
}

const ArtifactNode& AnalysisSession::open_file(const std::string& path) {
    if (fs::is_directory(path)) return open_folder(path);
    return open_artifact(DataBuffer::from_file(path));
}

const ArtifactNode& AnalysisSession::open_folder(const std::string& path) {
    std::error_code ec;
    FolderModel model;
    model.path = path;
    for (const auto& entry : fs::directory_iterator(path, ec)) {
        FolderEntry e;
        e.name = entry.path().filename().string();
        e.directory = entry.is_directory();
        if (!e.directory) e.size = entry.file_size(ec);
        model.entries.push_back(std::move(e));
    }
    if (ec) throw Error(Errc::io, "cannot list " + path + ": " + ec.message());
    std::sort(model.entries.begin(), model.entries.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });

    ArtifactNode n;
    n.buffer = DataBuffer::external({}, fs::path(path).filename().string(), path);
    n.identification = {std::string(tags::folder), IdentMethod::fallback};
    n.model = make_model(std::move(model));
    n.viewers = generic_plan(tags::folder);
    return insert(std::move(n));
}

const ArtifactNode& AnalysisSession::derive(NodeId parent, std::string name, Derivation action,
                                            std::optional<std::string> override_tag) {
    const auto& p = node(parent);
    if (!action.replay) throw Error(Errc::invalid_argument, "derivation has no replay action");
    if (action.range && !action.range->within(p.buffer.size())) {
        throw Error(Errc::out_of_bounds, "selection " + to_string(*action.range) + " exceeds " +
                                             std::to_string(p.buffer.size()) + "-byte buffer");
    }
    Bytes content = action.replay(p.buffer.bytes());
    DataBuffer b;
    b.content = std::make_shared<const Bytes>(std::move(content));
    b.name = std::move(name);
    b.source = DerivedSource{parent, action.range, action.label};
    const auto& child = open_artifact(std::move(b), std::move(override_tag));
    derivations_.emplace(child.id, std::move(action));
    return child;
}

const ArtifactNode& AnalysisSession::reanalyze_range(NodeId parent, ByteRange range,
                                                     std::optional<std::string> override_tag) {
    const auto& p = node(parent);
    auto label = "manual selection " + to_string(range);
    return derive(parent, p.buffer.name + to_string(range), Derivation::slice(range, label),
                  std::move(override_tag));
}

const ArtifactNode& AnalysisSession::node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error(Errc::not_found, "unknown node " + std::to_string(id));
    return it->second;
}

std::size_t AnalysisSession::depth_of(NodeId id) const {
    std::size_t depth = 0;
    for (auto p = node(id).parent; p; p = node(*p).parent) ++depth;
    return depth;
}

Bytes AnalysisSession::replay(NodeId id) const {
    const auto& n = node(id);
    if (!n.parent) throw Error(Errc::invalid_argument, "root nodes have no recorded action");
    auto it = derivations_.find(id);
    if (it == derivations_.end()) throw Error(Errc::not_found, "no recorded action for node " + std::to_string(id));
    return it->second.replay(node(*n.parent).buffer.bytes());
}

void AnalysisSession::add_hint(NodeId id, SecurityHint hint) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error(Errc::not_found, "unknown node " + std::to_string(id));
    if (hint.text.empty()) throw Error(Errc::invalid_argument, "hint text is empty");
    hint.origin = id;
    it->second.hints.push_back(std::move(hint));
}

std::vector<NodeId> AnalysisSession::depth_first() const {
    std::vector<NodeId> order;
    std::vector<NodeId> stack(roots_.rbegin(), roots_.rend());
    while (!stack.empty()) {
        auto id = stack.back();
        stack.pop_back();
        order.push_back(id);
        const auto& kids = nodes_.at(id).children;
        stack.insert(stack.end(), kids.rbegin(), kids.rend());
    }
    return order;
}

OverviewReport AnalysisSession::overview() const {
    OverviewReport report;
    for (auto id : depth_first()) {
        const auto& n = nodes_.at(id);
        OverviewEntry e;
        e.id = id;
        e.parent = n.parent;
        e.depth = depth_of(id);
        e.name = n.buffer.name;
        e.tag = n.identification.tag;
        e.method = n.identification.method;
        e.action = n.action_label;
        for (const auto& h : n.hints) ++e.hint_counts[static_cast<std::size_t>(h.severity)];
        report.entries.push_back(std::move(e));
    }
    return report;
}

std::string OverviewReport::to_text() const {
    std::ostringstream out;
    for (const auto& e : entries) {
        out << std::string(e.depth * 2, ' ') << '#' << e.id << ' ' << e.tag << ' ' << e.name;
        if (!e.action.empty()) out << "  <" << e.action << '>';
        out << "  hints: " << e.hint_counts[0] << " info, " << e.hint_counts[1] << " suspicious, "
            << e.hint_counts[2] << " high-risk\n";
    }
    return out.str();
}

} // namespace casefile
