#include "ropscan/memory_image.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "ropscan/errors.hpp"

namespace ropscan {

namespace {

constexpr uint8_t kMagic[4] = {0x52, 0x4D, 0x49, 0x4D}; // "RMIM"
constexpr uint16_t kVersion = 1;

uint16_t read_u16(const uint8_t* p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }

uint32_t read_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

void validate_segments(const std::vector<Segment>& segments) {
    for (size_t i = 0; i < segments.size(); ++i) {
        const Segment& s = segments[i];
        if (s.bytes.empty())
            throw ImageFormatError(ImageFormatError::Kind::MalformedHeader,
                                   "segment " + std::to_string(i) + " has zero length");
        const uint64_t end = static_cast<uint64_t>(s.base) + s.bytes.size();
        if (end > (1ULL << 32))
            throw ImageFormatError(ImageFormatError::Kind::MalformedHeader,
                                   "segment " + std::to_string(i) + " wraps past 2^32");
        if (i > 0) {
            const Segment& prev = segments[i - 1];
            if (s.base < prev.base)
                throw ImageFormatError(ImageFormatError::Kind::MalformedHeader,
                                       "segment headers not sorted by base");
            if (static_cast<uint64_t>(prev.base) + prev.bytes.size() > s.base)
                throw ImageFormatError(ImageFormatError::Kind::OverlappingSegments,
                                       "segments " + std::to_string(i - 1) + " and " +
                                           std::to_string(i) + " overlap");
        }
    }
}

std::vector<uint8_t> serialize(const MemoryImage& image) {
    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u16(out, kVersion);
    put_u32(out, static_cast<uint32_t>(image.segments().size()));
    for (const Segment& s : image.segments()) {
        put_u32(out, s.base);
        put_u32(out, static_cast<uint32_t>(s.bytes.size()));
    }
    for (const Segment& s : image.segments())
        out.insert(out.end(), s.bytes.begin(), s.bytes.end());
    return out;
}

} // namespace

MemoryImage::MemoryImage(std::vector<Segment> segments, std::string program_name,
                         std::string snapshot_id)
    : segments_(std::move(segments)),
      program_name_(std::move(program_name)),
      snapshot_id_(std::move(snapshot_id)) {
    validate_segments(segments_);
    if (!segments_.empty()) {
        hull_base_ = segments_.front().base;
        hull_len_ = static_cast<uint64_t>(segments_.back().base) +
                    segments_.back().bytes.size() - hull_base_;
    }
}

bool MemoryImage::contains(Addr addr) const { return find_segment(addr) != nullptr; }

const Segment* MemoryImage::find_segment(Addr addr) const {
    if (!in_hull(addr)) return nullptr;
    // first segment with base > addr, then step back
    auto it = std::upper_bound(segments_.begin(), segments_.end(), addr,
                               [](Addr a, const Segment& s) { return a < s.base; });
    if (it == segments_.begin()) return nullptr;
    --it;
    return it->contains(addr) ? &*it : nullptr;
}

std::span<const uint8_t> MemoryImage::read_bytes(Addr addr, size_t max_n) const {
    const Segment* seg = find_segment(addr);
    if (!seg) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "0x%08x", addr);
        throw AddressError(std::string("address not contained in image: ") + buf);
    }
    const size_t offset = addr - seg->base;
    const size_t n = std::min(max_n, seg->bytes.size() - offset);
    return {seg->bytes.data() + offset, n};
}

size_t MemoryImage::total_bytes() const {
    size_t n = 0;
    for (const Segment& s : segments_) n += s.bytes.size();
    return n;
}

std::string content_snapshot_id(const std::vector<Segment>& segments) {
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const uint8_t* p, size_t n) {
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    for (const Segment& s : segments) {
        uint8_t hdr[8];
        std::memcpy(hdr, &s.base, 4);
        const uint32_t len = static_cast<uint32_t>(s.bytes.size());
        std::memcpy(hdr + 4, &len, 4);
        mix(hdr, 8);
        mix(s.bytes.data(), s.bytes.size());
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

MemoryImage make_image(std::vector<Segment> segments, std::string program_name) {
    std::string snap = content_snapshot_id(segments);
    return MemoryImage(std::move(segments), std::move(program_name), std::move(snap));
}

MemoryImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ImageFormatError(ImageFormatError::Kind::MalformedHeader,
                               "cannot open image file: " + path.string());
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());

    if (data.size() < 10)
        throw ImageFormatError(ImageFormatError::Kind::MalformedHeader, "file too short for header");
    if (std::memcmp(data.data(), kMagic, 4) != 0)
        throw ImageFormatError(ImageFormatError::Kind::BadMagic, "bad magic (not an RMIM file)");
    if (read_u16(data.data() + 4) != kVersion)
        throw ImageFormatError(ImageFormatError::Kind::BadVersion,
                               "unsupported RMIM version " + std::to_string(read_u16(data.data() + 4)));

    const uint32_t count = read_u32(data.data() + 6);
    const size_t header_end = 10 + static_cast<size_t>(count) * 8;
    if (data.size() < header_end)
        throw ImageFormatError(ImageFormatError::Kind::MalformedHeader,
                               "file too short for " + std::to_string(count) + " segment headers");

    std::vector<Segment> segments;
    segments.reserve(count);
    size_t payload_off = header_end;
    for (uint32_t i = 0; i < count; ++i) {
        const uint8_t* hdr = data.data() + 10 + static_cast<size_t>(i) * 8;
        Segment seg;
        seg.base = read_u32(hdr);
        const uint32_t len = read_u32(hdr + 4);
        if (len == 0)
            throw ImageFormatError(ImageFormatError::Kind::MalformedHeader,
                                   "segment " + std::to_string(i) + " has zero length");
        if (payload_off + len > data.size())
            throw ImageFormatError(ImageFormatError::Kind::TruncatedPayload,
                                   "payload truncated at segment " + std::to_string(i));
        seg.bytes.assign(data.begin() + static_cast<std::ptrdiff_t>(payload_off),
                         data.begin() + static_cast<std::ptrdiff_t>(payload_off + len));
        payload_off += len;
        segments.push_back(std::move(seg));
    }
    if (payload_off != data.size())
        throw ImageFormatError(ImageFormatError::Kind::TruncatedPayload,
                               "trailing bytes after last segment payload");

    std::string snap = content_snapshot_id(segments);
    return MemoryImage(std::move(segments), path.stem().string(), std::move(snap));
}

void write_image(const MemoryImage& image, const std::filesystem::path& path) {
    const std::vector<uint8_t> data = serialize(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

} // namespace ropscan
