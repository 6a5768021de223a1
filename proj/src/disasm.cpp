#include "ropscan/disasm.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace ropscan {

namespace {

constexpr RegSet kEsp = reg_bit(Reg::Esp);
constexpr RegSet kEbp = reg_bit(Reg::Ebp);

const char* kRegNames[8] = {"eax", "ecx", "edx", "ebx", "esp", "ebp", "esi", "edi"};
const char* kReg8Names[8] = {"al", "cl", "dl", "bl", "ah", "ch", "dh", "bh"};
const char* kCcNames[16] = {"jo", "jno", "jb", "jae", "je", "jne", "jbe", "ja",
                            "js", "jns", "jp", "jnp", "jl", "jge", "jle", "jg"};

struct ModRm {
    bool ok = false;
    uint8_t size = 0;      // bytes consumed, including the modrm byte itself
    uint8_t reg_field = 0; // bits 5:3
    bool is_reg = false;   // mod == 3
    Reg rm_reg = Reg::Eax;
    MemOperand mem;
};

ModRm parse_modrm(std::span<const uint8_t> b) {
    ModRm out;
    if (b.empty()) return out;
    const uint8_t modrm = b[0];
    const uint8_t mod = modrm >> 6;
    out.reg_field = (modrm >> 3) & 7;
    const uint8_t rm = modrm & 7;
    out.size = 1;

    if (mod == 3) {
        out.is_reg = true;
        out.rm_reg = static_cast<Reg>(rm);
        out.ok = true;
        return out;
    }

    uint8_t disp_size = (mod == 1) ? 1 : (mod == 2) ? 4 : 0;
    if (rm == 4) {
        if (b.size() < 2) return out;
        const uint8_t sib = b[1];
        out.size = 2;
        const uint8_t scale_bits = sib >> 6;
        const uint8_t index = (sib >> 3) & 7;
        const uint8_t base = sib & 7;
        if (index != 4) { // index=100b means "no index" (esp cannot index)
            out.mem.index = static_cast<Reg>(index);
            out.mem.scale = static_cast<uint8_t>(1u << scale_bits);
        }
        if (base == 5 && mod == 0) {
            disp_size = 4; // [index*scale + disp32], no base
        } else {
            out.mem.base = static_cast<Reg>(base);
        }
    } else if (rm == 5 && mod == 0) {
        disp_size = 4; // [disp32]
    } else {
        out.mem.base = static_cast<Reg>(rm);
    }

    if (b.size() < static_cast<size_t>(out.size) + disp_size) return out;
    if (disp_size == 1) {
        out.mem.disp = static_cast<int8_t>(b[out.size]);
    } else if (disp_size == 4) {
        uint32_t v;
        std::memcpy(&v, b.data() + out.size, 4);
        out.mem.disp = static_cast<int32_t>(v);
    }
    out.size = static_cast<uint8_t>(out.size + disp_size);
    out.ok = true;
    return out;
}

RegSet mem_regs(const MemOperand& m) {
    RegSet s = 0;
    if (m.base) s |= reg_bit(*m.base);
    if (m.index) s |= reg_bit(*m.index);
    return s;
}

// A memory operand counts as stack-relative when it is a plain
// esp/ebp+disp reference; anything with an index register wanders.
bool mem_is_stack(const MemOperand& m) {
    return m.base && !m.index && (*m.base == Reg::Esp || *m.base == Reg::Ebp);
}

Operand reg_op(Reg r) {
    Operand op;
    op.kind = Operand::Kind::Reg32;
    op.reg = r;
    return op;
}

Operand reg8_op(uint8_t idx) {
    Operand op;
    op.kind = Operand::Kind::Reg8;
    op.reg8 = idx;
    op.reg = static_cast<Reg>(idx & 3); // al/ah -> eax, cl/ch -> ecx, ...
    return op;
}

Operand imm_op(int32_t v) {
    Operand op;
    op.kind = Operand::Kind::Imm;
    op.imm = v;
    return op;
}

Operand mem_op(const MemOperand& m) {
    Operand op;
    op.kind = Operand::Kind::Mem;
    op.mem = m;
    return op;
}

Operand rel_op(int32_t v) {
    Operand op;
    op.kind = Operand::Kind::Rel;
    op.imm = v;
    return op;
}

Operand rm_operand(const ModRm& rm, bool byte_form) {
    if (rm.is_reg) return byte_form ? reg8_op(static_cast<uint8_t>(rm.rm_reg)) : reg_op(rm.rm_reg);
    return mem_op(rm.mem);
}

int32_t read_i32(std::span<const uint8_t> b, size_t off) {
    uint32_t v;
    std::memcpy(&v, b.data() + off, 4);
    return static_cast<int32_t>(v);
}

Instruction invalid() { return Instruction{}; }

Instruction finish(Instruction insn, std::span<const uint8_t> bytes, size_t length) {
    insn.length = static_cast<uint8_t>(length);
    std::memcpy(insn.raw.data(), bytes.data(), length);
    return insn;
}

Instruction simple(Mnemonic m, InsnClass cls, std::span<const uint8_t> bytes, size_t length) {
    Instruction insn;
    insn.mnemonic = m;
    insn.cls = cls;
    return finish(insn, bytes, length);
}

// Two-operand forms where the direction bit picked rm-vs-reg order.
enum class TwoOpKind { RmReg, RegRm };

struct ArithSpec {
    Mnemonic mnemonic;
    bool reads_dst;  // RMW (add/sub/...) vs pure store (mov)
    bool writes_dst; // cmp/test write nothing
};

Instruction two_op(const ArithSpec& spec, TwoOpKind kind, bool byte_form,
                   std::span<const uint8_t> bytes) {
    ModRm rm = parse_modrm(bytes.subspan(1));
    if (!rm.ok) return invalid();

    Instruction insn;
    insn.mnemonic = spec.mnemonic;
    insn.cls = InsnClass::Normal;
    insn.byte_op = byte_form;

    Operand rm_side = rm_operand(rm, byte_form);
    Operand reg_side = byte_form ? reg8_op(rm.reg_field) : reg_op(static_cast<Reg>(rm.reg_field));
    Operand& dst = (kind == TwoOpKind::RmReg) ? rm_side : reg_side;
    Operand& src = (kind == TwoOpKind::RmReg) ? reg_side : rm_side;

    // Register effects
    if (src.kind == Operand::Kind::Mem) {
        insn.reads |= mem_regs(src.mem);
        if (!mem_is_stack(src.mem)) insn.touches_memory = true;
    } else {
        insn.reads |= reg_bit(src.reg);
    }
    if (dst.kind == Operand::Kind::Mem) {
        insn.reads |= mem_regs(dst.mem);
        if (!mem_is_stack(dst.mem)) insn.touches_memory = true;
    } else {
        if (spec.reads_dst) insn.reads |= reg_bit(dst.reg);
        if (spec.writes_dst) insn.writes |= reg_bit(dst.reg);
        if (byte_form && spec.writes_dst) insn.reads |= reg_bit(dst.reg); // partial write
    }

    insn.n_operands = 2;
    insn.operands[0] = dst;
    insn.operands[1] = src;
    return finish(insn, bytes, 1 + static_cast<size_t>(rm.size));
}

} // namespace

const char* reg_name(Reg r) { return kRegNames[static_cast<uint8_t>(r)]; }

Instruction decode(std::span<const uint8_t> bytes) {
    if (bytes.empty()) return invalid();
    const uint8_t b0 = bytes[0];

    // inc/dec/push/pop r32
    if (b0 >= 0x40 && b0 <= 0x5F) {
        const Reg r = static_cast<Reg>(b0 & 7);
        Instruction insn;
        insn.cls = InsnClass::Normal;
        insn.n_operands = 1;
        insn.operands[0] = reg_op(r);
        if (b0 <= 0x47) {
            insn.mnemonic = Mnemonic::Inc;
            insn.reads = reg_bit(r);
            insn.writes = reg_bit(r);
        } else if (b0 <= 0x4F) {
            insn.mnemonic = Mnemonic::Dec;
            insn.reads = reg_bit(r);
            insn.writes = reg_bit(r);
        } else if (b0 <= 0x57) {
            insn.mnemonic = Mnemonic::Push;
            insn.reads = static_cast<RegSet>(reg_bit(r) | kEsp);
            insn.writes = kEsp;
        } else {
            insn.mnemonic = Mnemonic::Pop;
            insn.reads = kEsp;
            insn.writes = static_cast<RegSet>(reg_bit(r) | kEsp);
        }
        return finish(insn, bytes, 1);
    }

    // mov r32, imm32
    if (b0 >= 0xB8 && b0 <= 0xBF) {
        if (bytes.size() < 5) return invalid();
        const Reg r = static_cast<Reg>(b0 & 7);
        Instruction insn;
        insn.mnemonic = Mnemonic::Mov;
        insn.cls = InsnClass::Normal;
        insn.writes = reg_bit(r);
        insn.n_operands = 2;
        insn.operands[0] = reg_op(r);
        insn.operands[1] = imm_op(read_i32(bytes, 1));
        return finish(insn, bytes, 5);
    }

    // xchg eax, r32 (0x90 is nop)
    if (b0 >= 0x91 && b0 <= 0x97) {
        const Reg r = static_cast<Reg>(b0 & 7);
        Instruction insn;
        insn.mnemonic = Mnemonic::Xchg;
        insn.cls = InsnClass::Normal;
        insn.reads = static_cast<RegSet>(reg_bit(Reg::Eax) | reg_bit(r));
        insn.writes = insn.reads;
        insn.n_operands = 2;
        insn.operands[0] = reg_op(Reg::Eax);
        insn.operands[1] = reg_op(r);
        return finish(insn, bytes, 1);
    }

    switch (b0) {
        case 0x90:
            return simple(Mnemonic::Nop, InsnClass::Normal, bytes, 1);
        case 0xC3: {
            Instruction insn;
            insn.mnemonic = Mnemonic::Ret;
            insn.cls = InsnClass::Return;
            insn.reads = kEsp;
            insn.writes = kEsp;
            return finish(insn, bytes, 1);
        }
        case 0xC2: {
            if (bytes.size() < 3) return invalid();
            Instruction insn;
            insn.mnemonic = Mnemonic::Ret;
            insn.cls = InsnClass::Return;
            insn.reads = kEsp;
            insn.writes = kEsp;
            insn.n_operands = 1;
            insn.operands[0] = imm_op(static_cast<int32_t>(bytes[1] | (bytes[2] << 8)));
            return finish(insn, bytes, 3);
        }
        case 0xC9: {
            Instruction insn;
            insn.mnemonic = Mnemonic::Leave;
            insn.cls = InsnClass::Normal;
            insn.reads = kEbp;
            insn.writes = static_cast<RegSet>(kEsp | kEbp);
            return finish(insn, bytes, 1);
        }
        case 0x8D: { // lea r32, m
            ModRm rm = parse_modrm(bytes.subspan(1));
            if (!rm.ok || rm.is_reg) return invalid(); // lea needs a memory operand
            Instruction insn;
            insn.mnemonic = Mnemonic::Lea;
            insn.cls = InsnClass::Normal;
            insn.reads = mem_regs(rm.mem);
            insn.writes = reg_bit(static_cast<Reg>(rm.reg_field));
            insn.n_operands = 2;
            insn.operands[0] = reg_op(static_cast<Reg>(rm.reg_field));
            insn.operands[1] = mem_op(rm.mem);
            // address computation only, no access: touches_memory stays false
            return finish(insn, bytes, 1 + static_cast<size_t>(rm.size));
        }
        case 0xFF: {
            ModRm rm = parse_modrm(bytes.subspan(1));
            if (!rm.ok) return invalid();
            Instruction insn;
            const size_t len = 1 + static_cast<size_t>(rm.size);
            switch (rm.reg_field) {
                case 2: // call rm32
                case 3: // call far m16:32
                    if (rm.reg_field == 3 && rm.is_reg) return invalid();
                    insn.mnemonic = Mnemonic::Call;
                    insn.cls = InsnClass::IndirectCall;
                    insn.reads = kEsp;
                    insn.writes = kEsp;
                    break;
                case 4: // jmp rm32
                case 5: // jmp far m16:32
                    if (rm.reg_field == 5 && rm.is_reg) return invalid();
                    insn.mnemonic = Mnemonic::Jmp;
                    insn.cls = InsnClass::IndirectJmp;
                    break;
                case 6: // push rm32
                    insn.mnemonic = Mnemonic::Push;
                    insn.cls = InsnClass::Normal;
                    insn.reads = kEsp;
                    insn.writes = kEsp;
                    break;
                default:
                    return invalid();
            }
            if (rm.is_reg) {
                insn.reads |= reg_bit(rm.rm_reg);
            } else {
                insn.reads |= mem_regs(rm.mem);
                if (!mem_is_stack(rm.mem)) insn.touches_memory = true;
            }
            insn.n_operands = 1;
            insn.operands[0] = rm_operand(rm, false);
            return finish(insn, bytes, len);
        }
        case 0xE8:
        case 0xE9: {
            if (bytes.size() < 5) return invalid();
            Instruction insn;
            insn.mnemonic = (b0 == 0xE8) ? Mnemonic::Call : Mnemonic::Jmp;
            insn.cls = InsnClass::DirectBranch;
            if (b0 == 0xE8) {
                insn.reads = kEsp;
                insn.writes = kEsp;
            }
            insn.n_operands = 1;
            insn.operands[0] = rel_op(read_i32(bytes, 1));
            return finish(insn, bytes, 5);
        }
        case 0xEB: {
            if (bytes.size() < 2) return invalid();
            Instruction insn;
            insn.mnemonic = Mnemonic::Jmp;
            insn.cls = InsnClass::DirectBranch;
            insn.n_operands = 1;
            insn.operands[0] = rel_op(static_cast<int8_t>(bytes[1]));
            return finish(insn, bytes, 2);
        }
        case 0x0F: {
            if (bytes.size() < 2) return invalid();
            const uint8_t b1 = bytes[1];
            if (b1 >= 0x80 && b1 <= 0x8F) {
                if (bytes.size() < 6) return invalid();
                Instruction insn;
                insn.mnemonic = Mnemonic::Jcc;
                insn.cls = InsnClass::DirectBranch;
                insn.n_operands = 1;
                insn.operands[0] = rel_op(read_i32(bytes, 2));
                return finish(insn, bytes, 6);
            }
            return invalid();
        }
        case 0xCD: { // int imm8
            if (bytes.size() < 2) return invalid();
            Instruction insn;
            insn.mnemonic = Mnemonic::Int;
            insn.cls = InsnClass::Privileged;
            insn.n_operands = 1;
            insn.operands[0] = imm_op(bytes[1]);
            return finish(insn, bytes, 2);
        }
        case 0xF4:
            return simple(Mnemonic::Hlt, InsnClass::Privileged, bytes, 1);
        case 0xFA:
            return simple(Mnemonic::Cli, InsnClass::Privileged, bytes, 1);
        case 0xFB:
            return simple(Mnemonic::Sti, InsnClass::Privileged, bytes, 1);
        case 0xCF:
            return simple(Mnemonic::Iret, InsnClass::Privileged, bytes, 1);
        case 0xE4:
        case 0xE5: {
            if (bytes.size() < 2) return invalid();
            return simple(Mnemonic::In, InsnClass::Privileged, bytes, 2);
        }
        case 0xE6:
        case 0xE7: {
            if (bytes.size() < 2) return invalid();
            return simple(Mnemonic::Out, InsnClass::Privileged, bytes, 2);
        }
        case 0xEC:
        case 0xED:
            return simple(Mnemonic::In, InsnClass::Privileged, bytes, 1);
        case 0xEE:
        case 0xEF:
            return simple(Mnemonic::Out, InsnClass::Privileged, bytes, 1);
        // imm32-to-eax arithmetic
        case 0x05:
        case 0x0D:
        case 0x25:
        case 0x2D:
        case 0x35:
        case 0x3D: {
            if (bytes.size() < 5) return invalid();
            Instruction insn;
            insn.cls = InsnClass::Normal;
            switch (b0) {
                case 0x05: insn.mnemonic = Mnemonic::Add; break;
                case 0x0D: insn.mnemonic = Mnemonic::Or; break;
                case 0x25: insn.mnemonic = Mnemonic::And; break;
                case 0x2D: insn.mnemonic = Mnemonic::Sub; break;
                case 0x35: insn.mnemonic = Mnemonic::Xor; break;
                default: insn.mnemonic = Mnemonic::Cmp; break;
            }
            insn.reads = reg_bit(Reg::Eax);
            if (b0 != 0x3D) insn.writes = reg_bit(Reg::Eax);
            insn.n_operands = 2;
            insn.operands[0] = reg_op(Reg::Eax);
            insn.operands[1] = imm_op(read_i32(bytes, 1));
            return finish(insn, bytes, 5);
        }
        default:
            break;
    }

    // ModRM mov/arith/logic families
    switch (b0) {
        case 0x01: return two_op({Mnemonic::Add, true, true}, TwoOpKind::RmReg, false, bytes);
        case 0x03: return two_op({Mnemonic::Add, true, true}, TwoOpKind::RegRm, false, bytes);
        case 0x09: return two_op({Mnemonic::Or, true, true}, TwoOpKind::RmReg, false, bytes);
        case 0x0B: return two_op({Mnemonic::Or, true, true}, TwoOpKind::RegRm, false, bytes);
        case 0x21: return two_op({Mnemonic::And, true, true}, TwoOpKind::RmReg, false, bytes);
        case 0x23: return two_op({Mnemonic::And, true, true}, TwoOpKind::RegRm, false, bytes);
        case 0x29: return two_op({Mnemonic::Sub, true, true}, TwoOpKind::RmReg, false, bytes);
        case 0x2B: return two_op({Mnemonic::Sub, true, true}, TwoOpKind::RegRm, false, bytes);
        case 0x31: return two_op({Mnemonic::Xor, true, true}, TwoOpKind::RmReg, false, bytes);
        case 0x33: return two_op({Mnemonic::Xor, true, true}, TwoOpKind::RegRm, false, bytes);
        case 0x39: return two_op({Mnemonic::Cmp, true, false}, TwoOpKind::RmReg, false, bytes);
        case 0x3B: return two_op({Mnemonic::Cmp, true, false}, TwoOpKind::RegRm, false, bytes);
        case 0x85: return two_op({Mnemonic::Test, true, false}, TwoOpKind::RmReg, false, bytes);
        case 0x87: {
            Instruction insn = two_op({Mnemonic::Xchg, true, true}, TwoOpKind::RmReg, false, bytes);
            // both sides of an exchange are read and written
            if (insn.cls == InsnClass::Normal) {
                const Operand& src = insn.operands[1];
                insn.writes |= reg_bit(src.reg);
                if (insn.operands[0].kind == Operand::Kind::Mem)
                    insn.reads |= reg_bit(src.reg);
            }
            return insn;
        }
        case 0x88: return two_op({Mnemonic::Mov, false, true}, TwoOpKind::RmReg, true, bytes);
        case 0x89: return two_op({Mnemonic::Mov, false, true}, TwoOpKind::RmReg, false, bytes);
        case 0x8A: return two_op({Mnemonic::Mov, false, true}, TwoOpKind::RegRm, true, bytes);
        case 0x8B: return two_op({Mnemonic::Mov, false, true}, TwoOpKind::RegRm, false, bytes);
        default:
            return invalid();
    }
}

std::optional<GadgetLikeSequence> extract_gadget(const MemoryImage& image, Addr addr,
                                                 size_t max_instructions) {
    const Segment* seg = image.find_segment(addr);
    if (!seg) return std::nullopt;

    GadgetLikeSequence out;
    out.start_addr = addr;
    Addr pos = addr;
    while (out.instructions.size() < max_instructions) {
        if (!seg->contains(pos)) return std::nullopt; // ran off the segment end
        const size_t offset = pos - seg->base;
        const size_t avail = std::min<size_t>(seg->bytes.size() - offset, 15);
        const Instruction insn = decode({seg->bytes.data() + offset, avail});
        if (insn.cls == InsnClass::Invalid || insn.cls == InsnClass::Privileged ||
            insn.cls == InsnClass::DirectBranch)
            return std::nullopt;

        out.bytes.insert(out.bytes.end(), insn.raw.begin(), insn.raw.begin() + insn.length);
        out.byte_len += insn.length;
        out.instructions.push_back(insn);
        if (insn.is_terminator()) {
            if (insn.cls == InsnClass::Return) out.stack_delta = stack_delta(out);
            return out;
        }
        pos = static_cast<Addr>(pos + insn.length);
    }
    return std::nullopt; // instruction cap exceeded
}

std::optional<int32_t> stack_delta(const GadgetLikeSequence& seq) {
    if (seq.instructions.empty() || seq.terminator().cls != InsnClass::Return)
        throw std::invalid_argument("stack_delta: sequence does not end in ret");

    int64_t delta = 0;
    for (const Instruction& insn : seq.instructions) {
        switch (insn.mnemonic) {
            case Mnemonic::Push:
                delta -= 4;
                break;
            case Mnemonic::Pop:
                if (insn.operands[0].kind == Operand::Kind::Reg32 &&
                    insn.operands[0].reg == Reg::Esp)
                    return std::nullopt; // esp comes from memory
                delta += 4;
                break;
            case Mnemonic::Ret:
                delta += 4;
                if (insn.n_operands == 1) delta += insn.operands[0].imm;
                break;
            case Mnemonic::Inc:
                if (insn.operands[0].reg == Reg::Esp) delta += 1;
                break;
            case Mnemonic::Dec:
                if (insn.operands[0].reg == Reg::Esp) delta -= 1;
                break;
            case Mnemonic::Leave:
                return std::nullopt; // esp re-based from ebp
            case Mnemonic::Lea:
                if (insn.operands[0].reg == Reg::Esp) {
                    const MemOperand& m = insn.operands[1].mem;
                    if (m.base && *m.base == Reg::Esp && !m.index)
                        delta += m.disp;
                    else
                        return std::nullopt;
                }
                break;
            default:
                // any other write to esp has a value-dependent effect
                if (reg_in(insn.writes, Reg::Esp)) return std::nullopt;
                break;
        }
    }
    if (delta < INT32_MIN || delta > INT32_MAX) return std::nullopt;
    return static_cast<int32_t>(delta);
}

RegSet live_in_registers(const GadgetLikeSequence& seq) {
    RegSet written = 0;
    RegSet live = 0;
    for (const Instruction& insn : seq.instructions) {
        live |= static_cast<RegSet>(insn.reads & ~written);
        written |= insn.writes;
    }
    return static_cast<RegSet>(live & ~(kEsp | kEbp));
}

RegSet written_registers(const GadgetLikeSequence& seq) {
    RegSet written = 0;
    for (const Instruction& insn : seq.instructions) written |= insn.writes;
    return static_cast<RegSet>(written & ~(kEsp | kEbp));
}

bool touches_memory(const GadgetLikeSequence& seq) {
    for (const Instruction& insn : seq.instructions)
        if (insn.touches_memory) return true;
    return false;
}

namespace {

void format_hex(std::string& out, int64_t v) {
    char buf[24];
    if (v < 0)
        std::snprintf(buf, sizeof buf, "-0x%llx", static_cast<unsigned long long>(-v));
    else
        std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
    out += buf;
}

void format_operand(std::string& out, const Operand& op) {
    switch (op.kind) {
        case Operand::Kind::Reg32:
            out += kRegNames[static_cast<uint8_t>(op.reg)];
            break;
        case Operand::Kind::Reg8:
            out += kReg8Names[op.reg8 & 7];
            break;
        case Operand::Kind::Imm:
            format_hex(out, op.imm);
            break;
        case Operand::Kind::Rel:
            if (op.imm >= 0) out += '+';
            format_hex(out, op.imm);
            break;
        case Operand::Kind::Mem: {
            out += '[';
            bool have_term = false;
            if (op.mem.base) {
                out += kRegNames[static_cast<uint8_t>(*op.mem.base)];
                have_term = true;
            }
            if (op.mem.index) {
                if (have_term) out += '+';
                out += kRegNames[static_cast<uint8_t>(*op.mem.index)];
                if (op.mem.scale > 1) {
                    out += '*';
                    out += static_cast<char>('0' + op.mem.scale);
                }
                have_term = true;
            }
            if (op.mem.disp != 0 || !have_term) {
                if (have_term && op.mem.disp >= 0) out += '+';
                format_hex(out, op.mem.disp);
            }
            out += ']';
            break;
        }
        case Operand::Kind::None:
            break;
    }
}

const char* mnemonic_name(const Instruction& insn) {
    switch (insn.mnemonic) {
        case Mnemonic::Push: return "push";
        case Mnemonic::Pop: return "pop";
        case Mnemonic::Inc: return "inc";
        case Mnemonic::Dec: return "dec";
        case Mnemonic::Mov: return "mov";
        case Mnemonic::Add: return "add";
        case Mnemonic::Sub: return "sub";
        case Mnemonic::Xor: return "xor";
        case Mnemonic::Or: return "or";
        case Mnemonic::And: return "and";
        case Mnemonic::Cmp: return "cmp";
        case Mnemonic::Test: return "test";
        case Mnemonic::Xchg: return "xchg";
        case Mnemonic::Lea: return "lea";
        case Mnemonic::Nop: return "nop";
        case Mnemonic::Leave: return "leave";
        case Mnemonic::Ret: return "ret";
        case Mnemonic::Call: return "call";
        case Mnemonic::Jmp: return "jmp";
        case Mnemonic::Jcc: return kCcNames[insn.raw[1] & 0xF];
        case Mnemonic::Int: return "int";
        case Mnemonic::Hlt: return "hlt";
        case Mnemonic::In: return "in";
        case Mnemonic::Out: return "out";
        case Mnemonic::Cli: return "cli";
        case Mnemonic::Sti: return "sti";
        case Mnemonic::Iret: return "iret";
        case Mnemonic::Invalid: return "(bad)";
    }
    return "(bad)";
}

} // namespace

std::string to_string(const Instruction& insn) {
    std::string out = mnemonic_name(insn);
    for (uint8_t i = 0; i < insn.n_operands; ++i) {
        out += (i == 0) ? " " : ", ";
        format_operand(out, insn.operands[i]);
    }
    return out;
}

std::string to_string(const GadgetLikeSequence& seq) {
    std::string out;
    for (size_t i = 0; i < seq.instructions.size(); ++i) {
        if (i) out += "; ";
        out += to_string(seq.instructions[i]);
    }
    return out;
}

} // namespace ropscan
