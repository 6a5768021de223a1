#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ropscan {

using Addr = uint32_t;

// One executable mapping: [base, base + bytes.size()).
struct Segment {
    Addr base = 0;
    std::vector<uint8_t> bytes;

    Addr end() const { return static_cast<Addr>(base + bytes.size()); }
    bool contains(Addr addr) const { return addr >= base && addr - base < bytes.size(); }
};

// Snapshot of the executable pages of the protected program. Immutable
// after construction; safe to share across any number of scan workers.
class MemoryImage {
public:
    MemoryImage() = default;
    // Validates the segment invariants: nonempty, no 2^32 wraparound,
    // sorted ascending by base, pairwise non-overlapping.
    MemoryImage(std::vector<Segment> segments, std::string program_name,
                std::string snapshot_id);

    const std::vector<Segment>& segments() const { return segments_; }
    const std::string& program_name() const { return program_name_; }
    const std::string& snapshot_id() const { return snapshot_id_; }

    bool contains(Addr addr) const;

    // Up to max_n bytes starting at addr, truncated at the end of the
    // containing segment. Throws AddressError if addr is not contained.
    std::span<const uint8_t> read_bytes(Addr addr, size_t max_n) const;

    // nullptr when addr is not inside any segment.
    const Segment* find_segment(Addr addr) const;

    // Cheap pre-filter for the scanner's hot loop: true only if addr lies
    // inside the overall [lowest base, highest end) hull.
    bool in_hull(Addr addr) const { return addr - hull_base_ < hull_len_; }

    size_t total_bytes() const;

private:
    std::vector<Segment> segments_;
    std::string program_name_;
    std::string snapshot_id_;
    Addr hull_base_ = 0;
    uint64_t hull_len_ = 0;
};

// RMIM container: little-endian; magic "RMIM", version u16 = 1,
// segment_count u32, segment_count x (base u32, length u32) headers sorted
// ascending by base, then the payloads concatenated in header order.
MemoryImage load_image(const std::filesystem::path& path);
void write_image(const MemoryImage& image, const std::filesystem::path& path);

// Assemble an image in memory; program_name/snapshot_id are derived the
// same way load_image derives them (content hash).
MemoryImage make_image(std::vector<Segment> segments, std::string program_name);

// FNV-1a 64 over the serialized image contents, rendered as 16 hex chars.
// This is what ties a trained model to the image it was trained against.
std::string content_snapshot_id(const std::vector<Segment>& segments);

} // namespace ropscan
