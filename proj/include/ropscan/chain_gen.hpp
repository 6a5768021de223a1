#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ropscan/disasm.hpp"
#include "ropscan/memory_image.hpp"
#include "ropscan/rng.hpp"

namespace ropscan {

// Byte-length histogram with fixed-width buckets. Bucket b covers
// [b*width, (b+1)*width).
struct LengthHistogram {
    uint32_t bucket_width = 16;
    std::map<uint32_t, size_t> counts;

    void add(size_t byte_len) { ++counts[static_cast<uint32_t>(byte_len / bucket_width)]; }
    size_t total() const;
};

// Ret-ending, memory-free gadgets with determinate stack deltas, extracted
// from every byte offset of the image and deduplicated by byte content.
struct GadgetCatalog {
    std::vector<GadgetLikeSequence> gadgets;
    // indices into `gadgets`, split at the median byte length
    std::vector<size_t> short_pool;
    std::vector<size_t> long_pool;
    // gadgets whose live-in register set is empty (safe chain openers)
    std::vector<size_t> no_read_pool;

    bool empty() const { return gadgets.empty(); }
};

GadgetCatalog build_catalog(const MemoryImage& image);

struct GeneratedChain {
    std::vector<GadgetLikeSequence> gadgets;
    std::vector<uint8_t> concat_bytes;
    uint32_t byte_len = 0;
    bool validated = false;
};

struct GenerateOptions {
    // chance of drawing from the long-gadget pool when both pools qualify
    double long_fraction = 0.3;
    // candidates tried before giving up, as a multiple of `count`
    size_t budget_factor = 10;
    size_t min_gadgets = 2;
    size_t max_gadgets = 32;
    // per-bucket tolerance when matching a target length histogram
    double histogram_tolerance = 0.10;
};

// Exactly `count` emulator-validated chains obeying the register
// discipline, with byte lengths matching `target_hist` scaled to `count`
// within the per-bucket tolerance. Output is in canonical order (sorted by
// byte content) so the result is independent of generation order. Throws
// GenerationError (with the achieved count) when the candidate budget runs
// out first.
std::vector<GeneratedChain> generate_chains(const MemoryImage& image, const GadgetCatalog& catalog,
                                            size_t count, const LengthHistogram& target_hist,
                                            uint64_t rng_seed, const GenerateOptions& opts = {});

// Same cardinality and a matching 16-byte-bucket length histogram as the
// benign set. benign_lengths must be nonempty.
std::vector<GeneratedChain> balance_to(const std::vector<size_t>& benign_lengths,
                                       const MemoryImage& image, const GadgetCatalog& catalog,
                                       uint64_t rng_seed, const GenerateOptions& opts = {});

// Independent register-discipline check used by tests and re-validation:
// every live-in register of every gadget must have been written by an
// earlier gadget, with no intervening read-without-write of it.
bool check_register_discipline(const std::vector<GadgetLikeSequence>& gadgets);

} // namespace ropscan
