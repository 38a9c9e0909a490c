// casefile - offline artifact analysis workbench

#include <casefile/disasm/x86.hpp>

#include <cstdio>

namespace casefile {

namespace {

constexpr const char* regs64[] = {"rax", "rcx", "rdx", "rbx", "rsp", "rbp", "rsi", "rdi",
                                  "r8",  "r9",  "r10", "r11", "r12", "r13", "r14", "r15"};
constexpr const char* regs32[] = {"eax", "ecx", "edx", "ebx", "esp", "ebp", "esi", "edi",
                                  "r8d", "r9d", "r10d", "r11d", "r12d", "r13d", "r14d", "r15d"};
constexpr const char* jcc_names[] = {"jo", "jno", "jb", "jae", "je", "jne", "jbe", "ja",
                                     "js", "jns", "jp", "jnp", "jl", "jge", "jle", "jg"};
constexpr const char* group1_names[] = {"add", "or", "adc", "sbb", "and", "sub", "xor", "cmp"};

std::string hex(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string signed_hex(std::int64_t v) {
    if (v < 0) return "-" + hex(static_cast<std::uint64_t>(-v));
    return "+" + hex(static_cast<std::uint64_t>(v));
}

const char* reg_name(int r, unsigned size) { return size == 64 ? regs64[r] : regs32[r]; }

struct ModRM {
    int mod = 0;
    int reg = 0;
    int rm_reg = -1; ///< register operand when mod == 3
    MemoryOperand mem;
};

class Decoder {
public:
    Decoder(ByteView buf, std::size_t pos, std::size_t end, unsigned bits, std::uint64_t addr)
        : buf_(buf), start_(pos), pos_(pos), end_(end), bits_(bits), addr_(addr) {}

    std::optional<Instruction> run() {
        if (bits_ == 64 && byte_available() && (buf_[pos_] & 0xF0) == 0x40) rex_ = buf_[pos_++];
        if (!byte_available()) return std::nullopt;
        const std::uint8_t op = buf_[pos_++];
        const bool w = rex_ & 0x8;
        const unsigned osize = bits_ == 64 && w ? 64 : 32;
        const unsigned stack_size = bits_ == 64 ? 64 : 32;
        const int rex_b = (rex_ & 1) << 3;

        if (op >= 0x50 && op <= 0x57) {
            insn_.cls = InsnClass::push;
            return finish("push", {reg_name((op - 0x50) | rex_b, stack_size)});
        }
        if (op >= 0x58 && op <= 0x5F) {
            insn_.cls = InsnClass::pop;
            const int r = (op - 0x58) | rex_b;
            insn_.writes_stack_pointer = true;
            return finish("pop", {reg_name(r, stack_size)});
        }
        if (op == 0x68 || op == 0x6A) {
            std::int64_t v;
            if (op == 0x68) {
                if (!imm32(v)) return std::nullopt;
            } else if (!imm8(v)) {
                return std::nullopt;
            }
            insn_.cls = InsnClass::push;
            insn_.immediate = v;
            return finish("push", {imm_text(v, stack_size)});
        }
        if (op >= 0xB8 && op <= 0xBF) {
            const int r = (op - 0xB8) | rex_b;
            if (w) {
                if (!avail(8)) return std::nullopt;
                const std::uint64_t v = load_le64(buf_, pos_);
                pos_ += 8;
                insn_.immediate = static_cast<std::int64_t>(v);
                return finish("movabs", {reg_name(r, 64), hex(v)});
            }
            std::int64_t v;
            if (!imm32(v)) return std::nullopt;
            insn_.immediate = static_cast<std::uint32_t>(v);
            insn_.writes_stack_pointer = r == 4;
            return finish("mov", {reg_name(r, 32), hex(static_cast<std::uint32_t>(v))});
        }
        switch (op) {
        case 0x01: case 0x03: case 0x09: case 0x0B: case 0x21: case 0x23: case 0x29: case 0x2B:
        case 0x31: case 0x33: case 0x39: case 0x3B: case 0x85: case 0x89: case 0x8B: {
            ModRM m;
            if (!modrm(m)) return std::nullopt;
            const char* name = op == 0x85 ? "test" : (op == 0x89 || op == 0x8B) ? "mov" : group1_names[op >> 3];
            const bool to_reg = (op & 2) && op != 0x85 && op != 0x89;
            const auto rm = rm_text(m, osize, true);
            const auto reg = std::string(reg_name(m.reg, osize));
            const bool writes = std::string_view(name) != "cmp" && std::string_view(name) != "test";
            if (writes) insn_.writes_stack_pointer = to_reg ? m.reg == 4 : m.rm_reg == 4;
            return to_reg ? finish(name, {reg, rm}) : finish(name, {rm, reg});
        }
        case 0x81: case 0x83: {
            ModRM m;
            if (!modrm(m)) return std::nullopt;
            std::int64_t v;
            if (!(op == 0x81 ? imm32(v) : imm8(v))) return std::nullopt;
            const int sub = m.reg & 7;
            insn_.immediate = v;
            if (sub != 7) insn_.writes_stack_pointer = m.rm_reg == 4;
            return finish(group1_names[sub], {rm_text(m, osize, true), imm_text(v, osize)});
        }
        case 0x8D: {
            ModRM m;
            if (!modrm(m) || m.mod == 3) return std::nullopt;
            insn_.writes_stack_pointer = m.reg == 4;
            return finish("lea", {reg_name(m.reg, osize), rm_text(m, osize, false)});
        }
        case 0x90:
            if (rex_ & 1) return std::nullopt; // xchg r8, rax
            return finish("nop", {});
        case 0xC3:
            insn_.cls = InsnClass::ret;
            return finish("ret", {});
        case 0xC2: {
            if (!avail(2)) return std::nullopt;
            const auto v = load_le16(buf_, pos_);
            pos_ += 2;
            insn_.cls = InsnClass::ret;
            insn_.immediate = v;
            return finish("ret", {hex(v)});
        }
        case 0xCC:
            return finish("int3", {});
        case 0xE8: case 0xE9: case 0xEB: {
            std::int64_t rel;
            if (!(op == 0xEB ? imm8(rel) : imm32(rel))) return std::nullopt;
            insn_.cls = op == 0xE8 ? InsnClass::call : InsnClass::jump;
            return finish_branch(op == 0xE8 ? "call" : "jmp", rel);
        }
        case 0xFF: {
            ModRM m;
            if (!modrm(m)) return std::nullopt;
            const int sub = m.reg & 7;
            if (sub != 2 && sub != 4 && sub != 6) return std::nullopt;
            insn_.cls = sub == 2 ? InsnClass::call : sub == 4 ? InsnClass::jump : InsnClass::push;
            return finish(sub == 2 ? "call" : sub == 4 ? "jmp" : "push", {rm_text(m, stack_size, true)});
        }
        case 0x0F: {
            if (!byte_available()) return std::nullopt;
            const std::uint8_t op2 = buf_[pos_++];
            if (op2 >= 0x80 && op2 <= 0x8F) {
                std::int64_t rel;
                if (!imm32(rel)) return std::nullopt;
                insn_.cls = InsnClass::cond_jump;
                return finish_branch(jcc_names[op2 - 0x80], rel);
            }
            return std::nullopt;
        }
        default:
            if (op >= 0x70 && op <= 0x7F) {
                std::int64_t rel;
                if (!imm8(rel)) return std::nullopt;
                insn_.cls = InsnClass::cond_jump;
                return finish_branch(jcc_names[op - 0x70], rel);
            }
            return std::nullopt;
        }
    }

private:
    bool byte_available() const { return pos_ < end_; }
    bool avail(std::size_t n) const { return pos_ + n <= end_; }

    bool imm8(std::int64_t& v) {
        if (!avail(1)) return false;
        v = static_cast<std::int8_t>(buf_[pos_++]);
        return true;
    }
    bool imm32(std::int64_t& v) {
        if (!avail(4)) return false;
        v = static_cast<std::int32_t>(load_le32(buf_, pos_));
        pos_ += 4;
        return true;
    }

    std::string imm_text(std::int64_t v, unsigned size) const {
        return size == 64 ? hex(static_cast<std::uint64_t>(v)) : hex(static_cast<std::uint32_t>(v));
    }

    bool modrm(ModRM& m) {
        if (!byte_available()) return false;
        const std::uint8_t b = buf_[pos_++];
        m.mod = b >> 6;
        m.reg = ((b >> 3) & 7) | ((rex_ & 4) << 1);
        const int rm = b & 7;
        if (m.mod == 3) {
            m.rm_reg = rm | ((rex_ & 1) << 3);
            return true;
        }
        auto& mem = m.mem;
        bool disp32_only = false;
        if (rm == 4) {
            if (!byte_available()) return false;
            const std::uint8_t sib = buf_[pos_++];
            const int scale_bits = sib >> 6;
            const int idx = ((sib >> 3) & 7) | ((rex_ & 2) << 2);
            const int base = sib & 7;
            mem.scale = 1 << scale_bits;
            if (idx != 4) mem.index = idx;
            if (base == 5 && m.mod == 0) {
                disp32_only = true;
            } else {
                mem.base = base | ((rex_ & 1) << 3);
            }
            if (!mem.index && mem.base && (scale_bits != 0 || base != 4)) mem.eiz = true;
        } else if (rm == 5 && m.mod == 0) {
            disp32_only = true;
            mem.rip_relative = bits_ == 64;
        } else {
            mem.base = rm | ((rex_ & 1) << 3);
        }
        std::int64_t d = 0;
        if (m.mod == 1) {
            if (!imm8(d)) return false;
            mem.has_disp = true;
        } else if (m.mod == 2 || disp32_only) {
            if (!imm32(d)) return false;
            mem.has_disp = true;
        }
        mem.disp = d;
        insn_.memory = mem;
        return true;
    }

    std::string rm_text(const ModRM& m, unsigned size, bool with_ptr) const {
        if (m.mod == 3) return reg_name(m.rm_reg, size);
        const auto& mem = m.mem;
        const unsigned asize = bits_ == 64 ? 64 : 32;
        std::string out = with_ptr ? (size == 64 ? "QWORD PTR " : "DWORD PTR ") : "";
        if (mem.absolute() && !mem.eiz) {
            return out + "ds:" + hex(static_cast<std::uint32_t>(mem.disp));
        }
        out += '[';
        if (mem.rip_relative) {
            out += "rip" + signed_hex(mem.disp);
            return out + ']';
        }
        bool first = true;
        if (mem.base) {
            out += reg_name(*mem.base, asize);
            first = false;
        }
        if (mem.index || mem.eiz) {
            if (!first) out += '+';
            out += mem.index ? reg_name(*mem.index, asize) : (asize == 64 ? "riz" : "eiz");
            out += '*' + std::to_string(mem.scale);
            first = false;
        }
        if (mem.has_disp) out += first ? hex(static_cast<std::uint32_t>(mem.disp)) : signed_hex(mem.disp);
        return out + ']';
    }

    std::optional<Instruction> finish(const char* mnemonic, std::vector<std::string> operands) {
        insn_.mnemonic = mnemonic;
        insn_.operands = std::move(operands);
        insn_.offset = start_;
        insn_.address = addr_;
        insn_.bytes.assign(buf_.begin() + static_cast<std::ptrdiff_t>(start_), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
        return std::move(insn_);
    }

    std::optional<Instruction> finish_branch(const char* mnemonic, std::int64_t rel) {
        std::uint64_t target = addr_ + (pos_ - start_) + static_cast<std::uint64_t>(rel);
        if (bits_ == 32) target &= 0xFFFFFFFFu;
        insn_.branch_target = target;
        return finish(mnemonic, {hex(target)});
    }

    ByteView buf_;
    std::size_t start_, pos_, end_;
    unsigned bits_;
    std::uint64_t addr_;
    std::uint8_t rex_ = 0;
    Instruction insn_;
};

} // namespace

std::string Instruction::text() const {
    std::string out = mnemonic;
    for (std::size_t i = 0; i < operands.size(); ++i) {
        out += i == 0 ? " " : ",";
        out += operands[i];
    }
    return out;
}

std::optional<std::uint64_t> Instruction::memory_target() const {
    if (!memory) return std::nullopt;
    if (memory->rip_relative) return address + bytes.size() + static_cast<std::uint64_t>(memory->disp);
    if (memory->absolute() && !memory->eiz) return static_cast<std::uint32_t>(memory->disp);
    return std::nullopt;
}

std::vector<Instruction> linear_sweep(ByteView buffer, std::uint64_t start, std::uint64_t length, unsigned bitness,
                                      std::uint64_t origin) {
    if (bitness != 32 && bitness != 64) throw Error(Errc::invalid_argument, "bitness must be 32 or 64");
    if (!in_bounds(buffer, start, length)) throw Error(Errc::out_of_bounds, "disassembly region out of bounds");
    std::vector<Instruction> out;
    const std::size_t end = static_cast<std::size_t>(start + length);
    std::size_t pos = static_cast<std::size_t>(start);
    while (pos < end) {
        const std::uint64_t addr = origin + (pos - start);
        auto insn = Decoder(buffer, pos, end, bitness, addr).run();
        if (!insn) {
            Instruction db;
            db.offset = pos;
            db.address = addr;
            db.bytes = {buffer[pos]};
            db.mnemonic = "db";
            char buf[8];
            std::snprintf(buf, sizeof buf, "0x%02x", buffer[pos]);
            db.operands = {buf};
            db.cls = InsnClass::data;
            insn = std::move(db);
        }
        pos += insn->bytes.size();
        out.push_back(std::move(*insn));
    }
    return out;
}

} // namespace casefile
