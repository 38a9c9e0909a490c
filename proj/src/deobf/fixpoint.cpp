// casefile - offline artifact analysis workbench

#include <casefile/deobf/deobfuscate.hpp>

#include <casefile/core/error.hpp>

#include <algorithm>

namespace casefile {

namespace {

using PassFn = PassResult (*)(const std::vector<Token>&);

struct NamedPass {
    const char* name;
    PassFn fn;
};

constexpr NamedPass pass_table[] = {
    {"remove_comments", &remove_comments},
    {"unescape_literals", &unescape_literals},
    {"apply_reverse", &apply_reverse},
    {"fold_concatenations", &fold_concatenations},
    {"propagate_constants", &propagate_constants},
};

} // namespace

bool TransformLog::fired(std::string_view pass) const {
    return std::any_of(steps.begin(), steps.end(), [&](const auto& s) { return s.pass == pass; });
}

const std::vector<std::string>& deobfuscation_passes() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& p : pass_table) v.emplace_back(p.name);
        return v;
    }();
    return names;
}

PassResult run_pass(std::string_view name, const std::vector<Token>& tokens) {
    for (const auto& p : pass_table) {
        if (name == p.name) return p.fn(tokens);
    }
    throw Error(Errc::not_found, "unknown deobfuscation pass: " + std::string(name));
}

DeobfuscationResult deobfuscate_fixpoint(std::vector<Token> tokens, std::size_t max_iterations) {
    if (max_iterations < 1) throw Error(Errc::invalid_argument, "maxIterations must be at least 1");
    DeobfuscationResult result;
    auto& log = result.log;
    while (true) {
        if (log.iterations == max_iterations) {
            log.truncated = true;
            break;
        }
        const std::size_t iteration = ++log.iterations;
        std::size_t total = 0;
        for (const auto& p : pass_table) {
            auto r = p.fn(tokens);
            for (const auto& f : r.flags) {
                auto text = std::string(p.name) + ": " + f.message;
                if (std::find(log.flags.begin(), log.flags.end(), text) == log.flags.end()) log.flags.push_back(text);
            }
            if (r.changes == 0) continue;
            total += r.changes;
            log.steps.push_back({p.name, r.changes, iteration});
            // Re-lex so token kinds and ranges stay consistent with the text.
            tokens = tokenize_js(join_tokens(r.tokens));
        }
        if (total == 0) break;
    }
    result.tokens = std::move(tokens);
    return result;
}

} // namespace casefile
