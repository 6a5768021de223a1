#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ropscan/disasm.hpp"
#include "ropscan/memory_image.hpp"

namespace ropscan {

// >= 2 gadget-like sequences whose addresses appear in the input at
// 4-byte-multiple spacings, each within ten slots of the previous one.
struct PotentialGadgetChain {
    std::string source_id;
    uint64_t start_offset = 0;             // byte offset of the first address
    std::vector<Addr> addresses;           // length >= 2
    std::vector<uint64_t> offsets;         // input offset of each address
    std::vector<GadgetLikeSequence> gadgets;
    std::vector<uint8_t> concat_bytes;     // gadget raw bytes, concatenated
};

// Little-endian u32 at `offset`. Throws std::out_of_range past the end.
Addr candidate_address(std::span<const uint8_t> data, size_t offset);

// Memoizes extract_gadget results per address. Sharded; safe for
// concurrent insert/lookup from any number of scan workers.
class GadgetCache {
public:
    explicit GadgetCache(const MemoryImage& image) : image_(&image) {}

    // Shared pointer so hits stay valid while other threads insert.
    std::shared_ptr<const GadgetLikeSequence> lookup(Addr addr);

    size_t size() const;

private:
    static constexpr size_t kShards = 64;
    struct Shard {
        std::mutex mutex;
        std::unordered_map<Addr, std::shared_ptr<const GadgetLikeSequence>> map;
    };
    const MemoryImage* image_;
    mutable std::array<Shard, kShards> shards_;
};

struct ScanOptions {
    size_t min_gadgets = 2;
    GadgetCache* cache = nullptr; // optional; output must not depend on it
};

// One input blob: at every byte offset, interpret four bytes as an address;
// chain hits through the next ten 4-byte slots, first hit wins; emit chains
// with >= min_gadgets gadgets. Offsets consumed by an emitted chain cannot
// start another chain (they may still be probed as continuations). Results
// sorted by start_offset.
std::vector<PotentialGadgetChain> scan_input(const MemoryImage& image,
                                             std::span<const uint8_t> data,
                                             const std::string& source_id,
                                             const ScanOptions& opts = {});

struct CorpusInput {
    std::string source_id;
    std::vector<uint8_t> data;
};

struct CorpusScanResult {
    std::vector<PotentialGadgetChain> chains;
    std::vector<std::string> errors; // per-input failures, scan continues
    uint64_t bytes_scanned = 0;
};

// Pull-based input stream; return nullopt when exhausted. Must be safe to
// call from the coordinating thread only (workers never touch it).
using InputStream = std::function<std::optional<CorpusInput>()>;

// Scans a whole corpus with `workers` threads sharing one gadget cache.
// Output is set-equal to sequential scan_input over all inputs, ordered by
// (input arrival index, start_offset).
CorpusScanResult scan_corpus(const MemoryImage& image, InputStream next_input,
                             size_t workers, const ScanOptions& opts = {});

// chains.tsv: source_id <TAB> start_offset <TAB> comma-joined hex addresses
// <TAB> hex-encoded concat_bytes
void write_chains_tsv(const std::vector<PotentialGadgetChain>& chains,
                      const std::filesystem::path& path);
std::string chain_tsv_line(const PotentialGadgetChain& chain);

struct ChainRecord {
    std::string source_id;
    uint64_t start_offset = 0;
    std::vector<Addr> addresses;
    std::vector<uint8_t> concat_bytes;
};

std::vector<ChainRecord> read_chains_tsv(const std::filesystem::path& path);

} // namespace ropscan
