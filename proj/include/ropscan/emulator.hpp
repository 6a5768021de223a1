#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ropscan/disasm.hpp"
#include "ropscan/memory_image.hpp"

namespace ropscan {

// Filler placed between chained addresses; chosen to fall outside every
// fixture image so an accidental dereference faults loudly.
inline constexpr uint32_t kStackFiller = 0x42424242;
inline constexpr uint32_t kEmulatorStepLimit = 4096;

enum class ValidationFailure : uint8_t {
    UnmappedRead,
    UnmappedWrite,
    InvalidInstruction,
    UninitializedRegisterUse,
    StackUnderflow,
    OutOfOrderControlFlow,
    StepLimit,
};

const char* to_string(ValidationFailure f);

struct ValidationReport {
    bool ok = false;
    size_t gadgets_executed = 0;
    std::optional<ValidationFailure> failure;
};

// The synthetic stack for one chain: gadget i's address sits exactly where
// gadget i-1's ret will pop it, with filler words in between.
struct StackLayout {
    std::vector<uint8_t> bytes;         // filler-initialized, addresses written in
    std::vector<uint64_t> addr_offsets; // byte offset of each gadget address
};

// Throws std::invalid_argument when a gadget has an indeterminate stack
// delta, does not end in ret, or (for a non-final gadget) its delta is not
// a positive multiple the next address can be placed at.
StackLayout layout_stack(const std::vector<GadgetLikeSequence>& chain);

struct MachineState {
    std::array<uint32_t, 8> regs{}; // indexed by Reg; includes esp/ebp
    uint32_t eip = 0;
    // minimal flags, self-consistent but never branched on
    bool zf = false, sf = false, cf = false, of = false;
    std::vector<uint8_t> stack;
    uint32_t stack_base = 0;
    uint8_t written = 0; // Reg bitmask; esp/ebp pre-set, monotone

    uint32_t reg(Reg r) const { return regs[static_cast<size_t>(r)]; }
    void set_reg(Reg r, uint32_t v) {
        regs[static_cast<size_t>(r)] = v;
        written |= reg_bit(r);
    }
};

// Lays the chain out on a synthetic stack and executes it instruction by
// instruction against the image. Each ret must pop exactly the next
// gadget's address. Empty chains validate trivially.
ValidationReport validate_chain(const MemoryImage& image,
                                const std::vector<GadgetLikeSequence>& chain);

// Runs one gadget in isolation and reports the esp displacement its
// execution actually produced (terminating ret's pop included). nullopt if
// it cannot be laid out or faults. The differential counterpart of the
// static stack_delta.
std::optional<int32_t> observed_stack_delta(const MemoryImage& image,
                                            const GadgetLikeSequence& gadget);

} // namespace ropscan
