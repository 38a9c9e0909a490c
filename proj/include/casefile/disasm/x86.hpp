// casefile - offline artifact analysis workbench
// Linear-sweep x86 / x86-64 decoder for a small opcode subset, with
// import-table call annotation and stack argument binding.

#pragma once

#include <casefile/core/bytes.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace casefile {

struct PeFile;

enum class InsnClass { other, data, push, pop, call, jump, cond_jump, ret };

struct MemoryOperand {
    std::optional<int> base;  ///< register number 0-15
    std::optional<int> index;
    int scale = 1;
    std::int64_t disp = 0;
    bool has_disp = false;
    bool rip_relative = false;
    bool eiz = false; ///< SIB byte without index, rendered as eiz/riz

    bool absolute() const noexcept { return !base && !index && !rip_relative; }
};

struct ParameterBinding {
    std::string name;
    std::uint64_t source_offset = 0;       ///< offset of the binding push
    std::optional<std::uint64_t> value;    ///< immediate pushed, if any
    std::string source_text;               ///< rendered push operand
};

struct ApiAnnotation {
    std::string library;
    std::string api;
    bool known_signature = false;
    bool partial = false; ///< fewer pushes than the signature arity
    std::vector<ParameterBinding> bindings; ///< in parameter order
};

struct Instruction {
    std::uint64_t offset = 0;  ///< buffer offset
    std::uint64_t address = 0; ///< virtual address of the first byte
    Bytes bytes;
    std::string mnemonic;
    std::vector<std::string> operands;
    InsnClass cls = InsnClass::other;
    std::optional<std::int64_t> immediate;
    std::optional<MemoryOperand> memory;
    std::optional<std::uint64_t> branch_target;
    bool writes_stack_pointer = false;
    std::optional<ApiAnnotation> annotation;

    std::size_t length() const noexcept { return bytes.size(); }
    std::string text() const; ///< "mov eax,DWORD PTR [ebp-0x8]"
    /// Absolute address referenced by an indirect memory operand, if static.
    std::optional<std::uint64_t> memory_target() const;
};

/// Decodes [start, start+length) sequentially. Undecodable bytes become a
/// one-byte "db" instruction. `origin` is the virtual address of `start`.
std::vector<Instruction> linear_sweep(ByteView buffer, std::uint64_t start, std::uint64_t length, unsigned bitness,
                                      std::uint64_t origin = 0);

struct ApiSignature {
    std::string name;
    std::vector<std::string> parameters;
};

class SignatureTable {
public:
    void add(ApiSignature signature);
    const ApiSignature* find(std::string_view api) const;
    std::size_t size() const noexcept { return table_.size(); }

    /// Common Windows APIs (file, registry, crypto, process, network).
    static SignatureTable builtin();

private:
    std::map<std::string, ApiSignature, std::less<>> table_;
};

/// Annotates `call [IAT slot]` with the imported API and, for 32-bit code,
/// binds preceding pushes right-to-left to the signature's parameters.
std::vector<Instruction> annotate_api_calls(std::vector<Instruction> instructions, const PeFile& pe,
                                            const SignatureTable& signatures);

/// Sweep of every executable section, annotated.
struct DisassemblyModel {
    struct Region {
        std::string section;
        std::uint64_t offset = 0;
        std::uint64_t address = 0;
        std::vector<Instruction> instructions;
    };
    unsigned bitness = 32;
    std::vector<Region> regions;
};

DisassemblyModel disassemble_pe(ByteView data, const PeFile& pe,
                                const SignatureTable& signatures = SignatureTable::builtin());

} // namespace casefile
