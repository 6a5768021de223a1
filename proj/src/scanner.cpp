#include "ropscan/scanner.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <fstream>
#include <stdexcept>
#include <string_view>
#include <thread>

#include "ropscan/errors.hpp"

namespace ropscan {

namespace {

constexpr size_t kProbeSlots = 10;  // next ten addresses
constexpr size_t kSlotStride = 4;

} // namespace

Addr candidate_address(std::span<const uint8_t> data, size_t offset) {
    if (offset + 4 > data.size())
        throw std::out_of_range("candidate_address: offset past end of data");
    const uint8_t* p = data.data() + offset;
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

std::shared_ptr<const GadgetLikeSequence> GadgetCache::lookup(Addr addr) {
    Shard& shard = shards_[addr % kShards];
    {
        std::lock_guard<std::mutex> lock(shard.mutex);
        auto it = shard.map.find(addr);
        if (it != shard.map.end()) return it->second;
    }
    // Decode outside the lock; a racing duplicate insert is harmless
    // because extraction is deterministic.
    std::shared_ptr<const GadgetLikeSequence> result;
    if (auto seq = extract_gadget(*image_, addr))
        result = std::make_shared<const GadgetLikeSequence>(std::move(*seq));
    std::lock_guard<std::mutex> lock(shard.mutex);
    return shard.map.try_emplace(addr, std::move(result)).first->second;
}

size_t GadgetCache::size() const {
    size_t n = 0;
    for (const Shard& s : shards_) {
        std::lock_guard<std::mutex> lock(s.mutex);
        n += s.map.size();
    }
    return n;
}

std::vector<PotentialGadgetChain> scan_input(const MemoryImage& image,
                                             std::span<const uint8_t> data,
                                             const std::string& source_id,
                                             const ScanOptions& opts) {
    std::vector<PotentialGadgetChain> chains;
    if (data.size() < 4) return chains;

    auto gadget_at = [&](size_t offset) -> std::shared_ptr<const GadgetLikeSequence> {
        const Addr addr = candidate_address(data, offset);
        if (!image.in_hull(addr)) return nullptr;
        if (opts.cache) return opts.cache->lookup(addr);
        if (auto seq = extract_gadget(image, addr))
            return std::make_shared<const GadgetLikeSequence>(std::move(*seq));
        return nullptr;
    };

    // offsets that belong to an already-emitted chain: not valid chain
    // starts, but still probed as continuations of other starts
    std::vector<uint8_t> consumed(data.size(), 0);

    const size_t last_start = data.size() - 4;
    for (size_t start = 0; start <= last_start; ++start) {
        if (consumed[start]) continue;
        auto first = gadget_at(start);
        if (!first) continue;

        std::vector<uint64_t> offsets{start};
        std::vector<std::shared_ptr<const GadgetLikeSequence>> gadgets{std::move(first)};
        size_t pos = start;
        for (;;) {
            bool extended = false;
            for (size_t k = 1; k <= kProbeSlots; ++k) {
                const size_t probe = pos + k * kSlotStride;
                if (probe + 4 > data.size()) break;
                if (auto g = gadget_at(probe)) {
                    offsets.push_back(probe);
                    gadgets.push_back(std::move(g));
                    pos = probe;
                    extended = true;
                    break; // ascending probe order, first hit wins
                }
            }
            if (!extended) break;
        }

        if (gadgets.size() < opts.min_gadgets) continue;

        PotentialGadgetChain chain;
        chain.source_id = source_id;
        chain.start_offset = start;
        chain.offsets = offsets;
        for (size_t i = 0; i < gadgets.size(); ++i) {
            chain.addresses.push_back(gadgets[i]->start_addr);
            chain.gadgets.push_back(*gadgets[i]);
            chain.concat_bytes.insert(chain.concat_bytes.end(), gadgets[i]->bytes.begin(),
                                      gadgets[i]->bytes.end());
        }
        for (uint64_t off : offsets) consumed[off] = 1;
        chains.push_back(std::move(chain));
    }
    return chains;
}

CorpusScanResult scan_corpus(const MemoryImage& image, InputStream next_input, size_t workers,
                             const ScanOptions& opts) {
    if (workers < 1) throw std::invalid_argument("scan_corpus: workers must be >= 1");

    CorpusScanResult result;
    GadgetCache local_cache(image);
    ScanOptions worker_opts = opts;
    if (!worker_opts.cache) worker_opts.cache = &local_cache;

    struct Job {
        size_t index;
        CorpusInput input;
    };
    struct Done {
        size_t index;
        std::vector<PotentialGadgetChain> chains;
        uint64_t bytes = 0;
        std::string error;
    };

    std::mutex mutex;
    std::condition_variable cv;
    std::deque<Job> queue;
    bool exhausted = false;
    std::vector<Done> done;

    auto worker_fn = [&]() {
        for (;;) {
            Job job;
            {
                std::unique_lock<std::mutex> lock(mutex);
                cv.wait(lock, [&] { return exhausted || !queue.empty(); });
                if (queue.empty()) return;
                job = std::move(queue.front());
                queue.pop_front();
            }
            Done d;
            d.index = job.index;
            d.bytes = job.input.data.size();
            try {
                d.chains = scan_input(image, job.input.data, job.input.source_id, worker_opts);
            } catch (const std::exception& e) {
                d.error = job.input.source_id + ": " + e.what();
            }
            std::lock_guard<std::mutex> lock(mutex);
            done.push_back(std::move(d));
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (size_t i = 0; i < workers; ++i) threads.emplace_back(worker_fn);

    size_t index = 0;
    for (;;) {
        std::optional<CorpusInput> input;
        try {
            input = next_input();
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(mutex);
            result.errors.push_back(std::string("input stream: ") + e.what());
            continue;
        }
        if (!input) break;
        {
            std::lock_guard<std::mutex> lock(mutex);
            queue.push_back(Job{index++, std::move(*input)});
        }
        cv.notify_one();
    }
    {
        std::lock_guard<std::mutex> lock(mutex);
        exhausted = true;
    }
    cv.notify_all();
    for (auto& t : threads) t.join();

    std::sort(done.begin(), done.end(), [](const Done& a, const Done& b) { return a.index < b.index; });
    for (Done& d : done) {
        result.bytes_scanned += d.bytes;
        if (!d.error.empty()) result.errors.push_back(std::move(d.error));
        for (auto& c : d.chains) result.chains.push_back(std::move(c));
    }
    return result;
}

namespace {

void append_hex(std::string& out, const uint8_t* data, size_t n) {
    static const char digits[] = "0123456789abcdef";
    for (size_t i = 0; i < n; ++i) {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0xF]);
    }
}

} // namespace

std::string chain_tsv_line(const PotentialGadgetChain& chain) {
    std::string line = chain.source_id;
    line += '\t';
    line += std::to_string(chain.start_offset);
    line += '\t';
    for (size_t i = 0; i < chain.addresses.size(); ++i) {
        if (i) line += ',';
        char buf[16];
        std::snprintf(buf, sizeof buf, "%08x", chain.addresses[i]);
        line += buf;
    }
    line += '\t';
    append_hex(line, chain.concat_bytes.data(), chain.concat_bytes.size());
    return line;
}

void write_chains_tsv(const std::vector<PotentialGadgetChain>& chains,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    for (const auto& chain : chains) out << chain_tsv_line(chain) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::vector<ChainRecord> read_chains_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());

    std::vector<ChainRecord> records;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;

        ChainRecord rec;
        size_t field = 0;
        size_t begin = 0;
        std::array<std::string_view, 4> fields;
        const std::string_view view(line);
        for (size_t i = 0; i <= view.size(); ++i) {
            if (i == view.size() || view[i] == '\t') {
                if (field < 4) fields[field] = view.substr(begin, i - begin);
                ++field;
                begin = i + 1;
            }
        }
        if (field != 4) throw ParseError(lineno, "expected 4 tab-separated fields");

        rec.source_id = std::string(fields[0]);
        auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(),
                                         rec.start_offset);
        if (ec != std::errc() || ptr != fields[1].data() + fields[1].size())
            throw ParseError(lineno, "bad start_offset");

        const std::string_view addrs = fields[2];
        size_t pos = 0;
        while (pos < addrs.size()) {
            size_t end = addrs.find(',', pos);
            if (end == std::string_view::npos) end = addrs.size();
            uint32_t addr = 0;
            auto sub = addrs.substr(pos, end - pos);
            auto [p2, e2] = std::from_chars(sub.data(), sub.data() + sub.size(), addr, 16);
            if (e2 != std::errc() || p2 != sub.data() + sub.size())
                throw ParseError(lineno, "bad address list");
            rec.addresses.push_back(addr);
            pos = end + 1;
        }
        if (rec.addresses.size() < 2) throw ParseError(lineno, "chain has fewer than 2 addresses");

        const std::string_view hex = fields[3];
        if (hex.size() % 2 != 0) throw ParseError(lineno, "odd hex byte string");
        rec.concat_bytes.reserve(hex.size() / 2);
        for (size_t i = 0; i < hex.size(); i += 2) {
            const int hi = hex_nibble(hex[i]);
            const int lo = hex_nibble(hex[i + 1]);
            if (hi < 0 || lo < 0) throw ParseError(lineno, "bad hex byte string");
            rec.concat_bytes.push_back(static_cast<uint8_t>((hi << 4) | lo));
        }
        if (rec.concat_bytes.empty()) throw ParseError(lineno, "empty chain bytes");
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace ropscan
