#include "ropscan/emulator.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace ropscan {

const char* to_string(ValidationFailure f) {
    switch (f) {
        case ValidationFailure::UnmappedRead: return "UnmappedRead";
        case ValidationFailure::UnmappedWrite: return "UnmappedWrite";
        case ValidationFailure::InvalidInstruction: return "InvalidInstruction";
        case ValidationFailure::UninitializedRegisterUse: return "UninitializedRegisterUse";
        case ValidationFailure::StackUnderflow: return "StackUnderflow";
        case ValidationFailure::OutOfOrderControlFlow: return "OutOfOrderControlFlow";
        case ValidationFailure::StepLimit: return "StepLimit";
    }
    return "?";
}

StackLayout layout_stack(const std::vector<GadgetLikeSequence>& chain) {
    StackLayout layout;
    if (chain.empty()) return layout;

    std::vector<uint64_t> positions(chain.size());
    uint64_t pos = 0;
    for (size_t i = 0; i < chain.size(); ++i) {
        positions[i] = pos;
        const GadgetLikeSequence& g = chain[i];
        if (g.instructions.empty() || g.terminator().cls != InsnClass::Return)
            throw std::invalid_argument("layout_stack: gadget does not end in ret");
        const std::optional<int32_t> delta = stack_delta(g);
        if (!delta)
            throw std::invalid_argument("layout_stack: indeterminate stack delta");
        if (i + 1 < chain.size()) {
            if (*delta < 4)
                throw std::invalid_argument(
                    "layout_stack: stack delta too small to place the next address");
            pos += static_cast<uint64_t>(*delta);
        }
    }

    layout.bytes.assign(pos + 4, 0x42); // filler pattern; reads as 0x42424242
    layout.addr_offsets = positions;
    for (size_t i = 0; i < chain.size(); ++i) {
        const Addr a = chain[i].start_addr;
        layout.bytes[positions[i] + 0] = static_cast<uint8_t>(a);
        layout.bytes[positions[i] + 1] = static_cast<uint8_t>(a >> 8);
        layout.bytes[positions[i] + 2] = static_cast<uint8_t>(a >> 16);
        layout.bytes[positions[i] + 3] = static_cast<uint8_t>(a >> 24);
    }
    return layout;
}

namespace {

constexpr size_t kHeadroom = 512; // room for pushes below the chain layout
constexpr size_t kTailroom = 64;

uint32_t choose_stack_base(const MemoryImage& image, size_t stack_len) {
    constexpr uint32_t candidates[] = {0xbff00000u, 0x7ff00000u, 0x30f00000u, 0xdff00000u,
                                       0x10f00000u};
    for (uint32_t base : candidates) {
        const uint64_t end = static_cast<uint64_t>(base) + stack_len;
        if (end > (1ULL << 32)) continue;
        bool clash = false;
        for (const Segment& s : image.segments()) {
            if (s.base < end && base < static_cast<uint64_t>(s.base) + s.bytes.size()) {
                clash = true;
                break;
            }
        }
        // keep the filler value unmapped too
        if (kStackFiller >= base && kStackFiller < end) clash = true;
        if (!clash) return base;
    }
    throw std::runtime_error("no address window available for the synthetic stack");
}

class Emulator {
public:
    Emulator(const MemoryImage& image, MachineState& st) : image_(image), st_(st) {}

    std::optional<ValidationFailure> failure;

    bool in_stack(uint64_t addr, size_t size) const {
        return addr >= st_.stack_base &&
               addr + size <= static_cast<uint64_t>(st_.stack_base) + st_.stack.size();
    }

    bool read_mem(uint32_t addr, size_t size, uint32_t& out, bool stack_op) {
        if (in_stack(addr, size)) {
            uint32_t v = 0;
            std::memcpy(&v, st_.stack.data() + (addr - st_.stack_base), size);
            out = v;
            return true;
        }
        if (stack_op) {
            failure = ValidationFailure::StackUnderflow;
            return false;
        }
        const Segment* seg = image_.find_segment(addr);
        if (seg && addr - seg->base + size <= seg->bytes.size()) {
            uint32_t v = 0;
            std::memcpy(&v, seg->bytes.data() + (addr - seg->base), size);
            out = v;
            return true;
        }
        failure = ValidationFailure::UnmappedRead;
        return false;
    }

    bool write_mem(uint32_t addr, size_t size, uint32_t val, bool stack_op) {
        if (in_stack(addr, size)) {
            std::memcpy(st_.stack.data() + (addr - st_.stack_base), &val, size);
            return true;
        }
        // code pages are not writable; anything else is unmapped
        failure = stack_op ? ValidationFailure::StackUnderflow : ValidationFailure::UnmappedWrite;
        return false;
    }

    bool push32(uint32_t val) {
        const uint32_t new_esp = st_.reg(Reg::Esp) - 4;
        if (!write_mem(new_esp, 4, val, true)) return false;
        st_.set_reg(Reg::Esp, new_esp);
        return true;
    }

    bool pop32(uint32_t& out) {
        const uint32_t esp = st_.reg(Reg::Esp);
        if (!read_mem(esp, 4, out, true)) return false;
        st_.set_reg(Reg::Esp, esp + 4);
        return true;
    }

    uint32_t effective_address(const MemOperand& m) const {
        uint32_t addr = static_cast<uint32_t>(m.disp);
        if (m.base) addr += st_.reg(*m.base);
        if (m.index) addr += st_.reg(*m.index) * m.scale;
        return addr;
    }

    bool read_operand(const Operand& op, uint32_t& out) {
        switch (op.kind) {
            case Operand::Kind::Reg32:
                out = st_.reg(op.reg);
                return true;
            case Operand::Kind::Reg8: {
                const uint32_t v = st_.reg(op.reg);
                out = (op.reg8 < 4) ? (v & 0xFF) : ((v >> 8) & 0xFF);
                return true;
            }
            case Operand::Kind::Imm:
                out = static_cast<uint32_t>(op.imm);
                return true;
            case Operand::Kind::Mem:
                return read_mem(effective_address(op.mem), 4, out, false);
            default:
                failure = ValidationFailure::InvalidInstruction;
                return false;
        }
    }

    bool read_operand_sized(const Operand& op, bool byte_op, uint32_t& out) {
        if (op.kind == Operand::Kind::Mem && byte_op)
            return read_mem(effective_address(op.mem), 1, out, false);
        return read_operand(op, out);
    }

    bool write_operand(const Operand& op, bool byte_op, uint32_t val) {
        switch (op.kind) {
            case Operand::Kind::Reg32:
                st_.set_reg(op.reg, val);
                return true;
            case Operand::Kind::Reg8: {
                uint32_t v = st_.reg(op.reg);
                if (op.reg8 < 4)
                    v = (v & 0xFFFFFF00u) | (val & 0xFF);
                else
                    v = (v & 0xFFFF00FFu) | ((val & 0xFF) << 8);
                st_.set_reg(op.reg, v);
                return true;
            }
            case Operand::Kind::Mem:
                return write_mem(effective_address(op.mem), byte_op ? 1 : 4, val, false);
            default:
                failure = ValidationFailure::InvalidInstruction;
                return false;
        }
    }

    void flags_logic(uint32_t r) {
        st_.zf = r == 0;
        st_.sf = (r >> 31) != 0;
        st_.cf = false;
        st_.of = false;
    }

    void flags_add(uint32_t a, uint32_t b, uint32_t r) {
        st_.zf = r == 0;
        st_.sf = (r >> 31) != 0;
        st_.cf = r < a;
        st_.of = (((a ^ r) & (b ^ r)) >> 31) != 0;
    }

    void flags_sub(uint32_t a, uint32_t b, uint32_t r) {
        st_.zf = r == 0;
        st_.sf = (r >> 31) != 0;
        st_.cf = a < b;
        st_.of = (((a ^ b) & (a ^ r)) >> 31) != 0;
    }

    // Decodes at eip and executes one instruction. Returns the executed
    // instruction; nullopt on failure (this->failure is set) or when the
    // instruction is a ret (control handling is the caller's job: `ret_target`
    // is filled and esp already adjusted).
    std::optional<Instruction> step(bool& was_ret, uint32_t& ret_target) {
        was_ret = false;
        const Segment* seg = image_.find_segment(st_.eip);
        if (!seg) {
            failure = ValidationFailure::UnmappedRead;
            return std::nullopt;
        }
        const size_t off = st_.eip - seg->base;
        const size_t avail = std::min<size_t>(seg->bytes.size() - off, 15);
        const Instruction insn = decode({seg->bytes.data() + off, avail});

        if (insn.cls == InsnClass::Invalid || insn.cls == InsnClass::Privileged) {
            failure = ValidationFailure::InvalidInstruction;
            return std::nullopt;
        }

        // init-before-use: every register the instruction reads must have
        // been written by the chain (esp/ebp are pre-initialized)
        if ((insn.reads & ~st_.written) != 0) {
            failure = ValidationFailure::UninitializedRegisterUse;
            return std::nullopt;
        }

        switch (insn.mnemonic) {
            case Mnemonic::Nop:
                break;
            case Mnemonic::Push: {
                uint32_t v;
                if (!read_operand(insn.operands[0], v)) return std::nullopt;
                if (!push32(v)) return std::nullopt;
                break;
            }
            case Mnemonic::Pop: {
                uint32_t v;
                if (!pop32(v)) return std::nullopt;
                st_.set_reg(insn.operands[0].reg, v);
                break;
            }
            case Mnemonic::Inc:
            case Mnemonic::Dec: {
                const Reg r = insn.operands[0].reg;
                const uint32_t a = st_.reg(r);
                const uint32_t res = (insn.mnemonic == Mnemonic::Inc) ? a + 1 : a - 1;
                const bool saved_cf = st_.cf;
                if (insn.mnemonic == Mnemonic::Inc)
                    flags_add(a, 1, res);
                else
                    flags_sub(a, 1, res);
                st_.cf = saved_cf; // inc/dec leave CF untouched
                st_.set_reg(r, res);
                break;
            }
            case Mnemonic::Mov: {
                uint32_t v;
                if (!read_operand_sized(insn.operands[1], insn.byte_op, v)) return std::nullopt;
                if (!write_operand(insn.operands[0], insn.byte_op, v)) return std::nullopt;
                break;
            }
            case Mnemonic::Lea:
                st_.set_reg(insn.operands[0].reg, effective_address(insn.operands[1].mem));
                break;
            case Mnemonic::Xchg: {
                uint32_t a, b;
                if (!read_operand(insn.operands[0], a)) return std::nullopt;
                if (!read_operand(insn.operands[1], b)) return std::nullopt;
                if (!write_operand(insn.operands[0], false, b)) return std::nullopt;
                if (!write_operand(insn.operands[1], false, a)) return std::nullopt;
                break;
            }
            case Mnemonic::Add:
            case Mnemonic::Sub:
            case Mnemonic::And:
            case Mnemonic::Or:
            case Mnemonic::Xor:
            case Mnemonic::Cmp:
            case Mnemonic::Test: {
                uint32_t a, b;
                if (!read_operand(insn.operands[0], a)) return std::nullopt;
                if (!read_operand(insn.operands[1], b)) return std::nullopt;
                uint32_t res = 0;
                switch (insn.mnemonic) {
                    case Mnemonic::Add: res = a + b; flags_add(a, b, res); break;
                    case Mnemonic::Sub:
                    case Mnemonic::Cmp: res = a - b; flags_sub(a, b, res); break;
                    case Mnemonic::And:
                    case Mnemonic::Test: res = a & b; flags_logic(res); break;
                    case Mnemonic::Or: res = a | b; flags_logic(res); break;
                    case Mnemonic::Xor: res = a ^ b; flags_logic(res); break;
                    default: break;
                }
                if (insn.mnemonic != Mnemonic::Cmp && insn.mnemonic != Mnemonic::Test) {
                    if (!write_operand(insn.operands[0], false, res)) return std::nullopt;
                }
                break;
            }
            case Mnemonic::Leave: {
                st_.set_reg(Reg::Esp, st_.reg(Reg::Ebp));
                uint32_t v;
                if (!pop32(v)) return std::nullopt;
                st_.set_reg(Reg::Ebp, v);
                break;
            }
            case Mnemonic::Ret: {
                uint32_t target;
                if (!pop32(target)) return std::nullopt;
                if (insn.n_operands == 1)
                    st_.set_reg(Reg::Esp,
                                st_.reg(Reg::Esp) + static_cast<uint32_t>(insn.operands[0].imm));
                was_ret = true;
                ret_target = target;
                break;
            }
            case Mnemonic::Call:
                // assumed successful and skipped: plain fall-through
                break;
            case Mnemonic::Jmp: {
                if (insn.cls == InsnClass::IndirectJmp) {
                    uint32_t target;
                    if (!read_operand(insn.operands[0], target)) return std::nullopt;
                    was_ret = true; // terminator transfer, same boundary rule as ret
                    ret_target = target;
                    break;
                }
                failure = ValidationFailure::InvalidInstruction;
                return std::nullopt;
            }
            default:
                failure = ValidationFailure::InvalidInstruction;
                return std::nullopt;
        }

        st_.eip += insn.length;
        return insn;
    }

private:
    const MemoryImage& image_;
    MachineState& st_;
};

MachineState make_initial_state(const MemoryImage& image, const StackLayout& layout) {
    MachineState st;
    st.stack.assign(kHeadroom + layout.bytes.size() + kTailroom, 0x42);
    std::memcpy(st.stack.data() + kHeadroom, layout.bytes.data(), layout.bytes.size());
    st.stack_base = choose_stack_base(image, st.stack.size());
    st.regs[static_cast<size_t>(Reg::Esp)] = st.stack_base + kHeadroom + 4;
    st.regs[static_cast<size_t>(Reg::Ebp)] =
        static_cast<uint32_t>(st.stack_base + st.stack.size() - 8);
    st.written = static_cast<uint8_t>(reg_bit(Reg::Esp) | reg_bit(Reg::Ebp));
    return st;
}

} // namespace

ValidationReport validate_chain(const MemoryImage& image,
                                const std::vector<GadgetLikeSequence>& chain) {
    ValidationReport report;
    if (chain.empty()) {
        report.ok = true;
        return report;
    }

    const StackLayout layout = layout_stack(chain);
    MachineState st = make_initial_state(image, layout);
    st.eip = chain[0].start_addr;

    Emulator emu(image, st);
    size_t current = 0;
    for (uint32_t steps = 0; steps < kEmulatorStepLimit; ++steps) {
        bool was_ret = false;
        uint32_t target = 0;
        const auto insn = emu.step(was_ret, target);
        if (!insn) {
            report.failure = emu.failure;
            report.gadgets_executed = current;
            return report;
        }
        if (!was_ret) continue;

        // terminator executed: gadget `current` is complete
        ++current;
        if (current == chain.size()) {
            report.ok = true;
            report.gadgets_executed = current;
            return report;
        }
        if (target != chain[current].start_addr) {
            report.failure = ValidationFailure::OutOfOrderControlFlow;
            report.gadgets_executed = current;
            return report;
        }
        st.eip = target;
    }
    report.failure = ValidationFailure::StepLimit;
    report.gadgets_executed = current;
    return report;
}

std::optional<int32_t> observed_stack_delta(const MemoryImage& image,
                                            const GadgetLikeSequence& gadget) {
    const std::vector<GadgetLikeSequence> chain{gadget};
    StackLayout layout;
    try {
        layout = layout_stack(chain);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
    MachineState st = make_initial_state(image, layout);
    st.eip = gadget.start_addr;
    const uint32_t esp_entry = st.reg(Reg::Esp);

    Emulator emu(image, st);
    for (uint32_t steps = 0; steps < kEmulatorStepLimit; ++steps) {
        bool was_ret = false;
        uint32_t target = 0;
        if (!emu.step(was_ret, target)) return std::nullopt;
        if (was_ret)
            return static_cast<int32_t>(st.reg(Reg::Esp) - esp_entry);
    }
    return std::nullopt;
}

} // namespace ropscan
