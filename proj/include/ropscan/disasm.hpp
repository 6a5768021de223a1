#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ropscan/memory_image.hpp"

namespace ropscan {

enum class Reg : uint8_t { Eax = 0, Ecx, Edx, Ebx, Esp, Ebp, Esi, Edi };

// Bit per general-purpose register, indexed by Reg.
using RegSet = uint8_t;

constexpr RegSet reg_bit(Reg r) { return static_cast<RegSet>(1u << static_cast<uint8_t>(r)); }
constexpr bool reg_in(RegSet set, Reg r) { return (set & reg_bit(r)) != 0; }

const char* reg_name(Reg r);

enum class InsnClass : uint8_t {
    Normal,
    Return,
    IndirectJmp,
    IndirectCall,
    DirectBranch,
    Privileged,
    Invalid,
};

enum class Mnemonic : uint8_t {
    Invalid,
    Push, Pop, Inc, Dec, Mov, Add, Sub, Xor, Or, And, Cmp, Test, Xchg, Lea,
    Nop, Leave, Ret, Call, Jmp, Jcc,
    Int, Hlt, In, Out, Cli, Sti, Iret,
};

struct MemOperand {
    std::optional<Reg> base;
    std::optional<Reg> index;
    uint8_t scale = 1;
    int32_t disp = 0;
};

struct Operand {
    enum class Kind : uint8_t { None, Reg32, Reg8, Imm, Mem, Rel };
    Kind kind = Kind::None;
    Reg reg = Reg::Eax;    // Reg32: the register; Reg8: the containing GPR
    uint8_t reg8 = 0;      // raw r8 index (al,cl,dl,bl,ah,ch,dh,bh) for display
    int32_t imm = 0;       // Imm value, Rel displacement, or Jcc condition code
    MemOperand mem;
};

// Decoded instruction. With cls == Invalid no other field is meaningful.
struct Instruction {
    uint8_t length = 0;
    Mnemonic mnemonic = Mnemonic::Invalid;
    InsnClass cls = InsnClass::Invalid;
    uint8_t n_operands = 0;
    std::array<Operand, 2> operands{};
    RegSet reads = 0;
    RegSet writes = 0;
    bool touches_memory = false; // explicit non-stack memory access (lea never counts)
    bool byte_op = false;        // 8-bit form (88/8A)
    std::array<uint8_t, 15> raw{};

    std::span<const uint8_t> raw_bytes() const { return {raw.data(), length}; }
    bool is_terminator() const {
        return cls == InsnClass::Return || cls == InsnClass::IndirectJmp ||
               cls == InsnClass::IndirectCall;
    }
};

// Decode one instruction from the front of `bytes`. Never throws: unknown
// opcodes, unsupported prefixes and truncated encodings all come back as
// cls == Invalid.
Instruction decode(std::span<const uint8_t> bytes);

struct GadgetLikeSequence {
    Addr start_addr = 0;
    std::vector<Instruction> instructions;
    uint32_t byte_len = 0;
    std::vector<uint8_t> bytes; // concatenated raw bytes
    // Net esp displacement including the final ret's pop; only present for
    // Return-terminated sequences with a statically known effect.
    std::optional<int32_t> stack_delta;

    const Instruction& terminator() const { return instructions.back(); }
};

inline constexpr size_t kMaxGadgetInstructions = 64;

// Walk forward from addr until an indirect branch. None if addr is not in
// the image, decoding hits Invalid/Privileged/DirectBranch or the segment
// end, or the sequence exceeds the instruction cap.
std::optional<GadgetLikeSequence> extract_gadget(const MemoryImage& image, Addr addr,
                                                 size_t max_instructions = kMaxGadgetInstructions);

// Net esp change over a Return-terminated sequence, including the ret's
// 4-byte pop (plus its imm16 if present). nullopt = indeterminate (an
// instruction's esp effect is not statically known). Throws
// std::invalid_argument if the sequence does not end in Return.
std::optional<int32_t> stack_delta(const GadgetLikeSequence& seq);

// Registers a sequence reads before writing them (its live-in set) and the
// registers it writes. esp/ebp excluded: the stack registers are always
// pre-initialized in this pipeline.
RegSet live_in_registers(const GadgetLikeSequence& seq);
RegSet written_registers(const GadgetLikeSequence& seq);

bool touches_memory(const GadgetLikeSequence& seq);

std::string to_string(const Instruction& insn);
std::string to_string(const GadgetLikeSequence& seq); // "pop esi; pop edi; ret"

} // namespace ropscan
