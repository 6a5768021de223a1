#include "ropscan/chain_gen.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "ropscan/emulator.hpp"
#include "ropscan/errors.hpp"

namespace ropscan {

size_t LengthHistogram::total() const {
    size_t n = 0;
    for (const auto& [bucket, c] : counts) n += c;
    return n;
}

GadgetCatalog build_catalog(const MemoryImage& image) {
    GadgetCatalog catalog;
    std::unordered_set<std::string> seen;

    for (const Segment& seg : image.segments()) {
        for (size_t off = 0; off < seg.bytes.size(); ++off) {
            auto gadget = extract_gadget(image, static_cast<Addr>(seg.base + off));
            if (!gadget) continue;
            if (gadget->terminator().cls != InsnClass::Return) continue;
            if (!gadget->stack_delta) continue;
            if (touches_memory(*gadget)) continue;
            std::string key(gadget->bytes.begin(), gadget->bytes.end());
            if (!seen.insert(std::move(key)).second) continue;
            catalog.gadgets.push_back(std::move(*gadget));
        }
    }

    std::sort(catalog.gadgets.begin(), catalog.gadgets.end(),
              [](const GadgetLikeSequence& a, const GadgetLikeSequence& b) {
                  return a.bytes < b.bytes;
              });

    if (catalog.gadgets.empty()) return catalog;

    std::vector<uint32_t> lens;
    lens.reserve(catalog.gadgets.size());
    for (const auto& g : catalog.gadgets) lens.push_back(g.byte_len);
    std::sort(lens.begin(), lens.end());
    const uint32_t median = lens[lens.size() / 2];

    for (size_t i = 0; i < catalog.gadgets.size(); ++i) {
        const auto& g = catalog.gadgets[i];
        (g.byte_len <= median ? catalog.short_pool : catalog.long_pool).push_back(i);
        if (live_in_registers(g) == 0) catalog.no_read_pool.push_back(i);
    }
    return catalog;
}

namespace {

// Discipline bookkeeping over the six non-stack registers. A register is
// pickable as a gadget input only if it has been written and not read
// since that write.
struct DisciplineState {
    RegSet written = 0;
    RegSet readable = 0;

    bool compatible(RegSet live_in) const {
        return (live_in & ~written) == 0 && (live_in & ~readable) == 0;
    }
    void apply(RegSet live_in, RegSet writes) {
        readable = static_cast<RegSet>(readable & ~live_in);
        written |= writes;
        readable |= writes;
    }
};

struct CachedGadgetInfo {
    RegSet live_in;
    RegSet writes;
};

} // namespace

bool check_register_discipline(const std::vector<GadgetLikeSequence>& gadgets) {
    RegSet written = 0;
    RegSet readable = 0;
    for (const auto& g : gadgets) {
        const RegSet live = live_in_registers(g);
        if ((live & ~written) != 0) return false;  // read before any write
        if ((live & ~readable) != 0) return false; // two reads without a write between
        readable = static_cast<RegSet>(readable & ~live);
        const RegSet w = written_registers(g);
        written |= w;
        readable |= w;
    }
    return true;
}

std::vector<GeneratedChain> generate_chains(const MemoryImage& image, const GadgetCatalog& catalog,
                                            size_t count, const LengthHistogram& target_hist,
                                            uint64_t rng_seed, const GenerateOptions& opts) {
    std::vector<GeneratedChain> out;
    if (count == 0) return out;
    if (catalog.empty()) throw GenerationError("gadget catalog is empty", 0);
    if (catalog.no_read_pool.empty())
        throw GenerationError("catalog has no gadget with an empty live-in set", 0);
    if (target_hist.total() == 0)
        throw GenerationError("target length histogram is empty", 0);

    // Per-bucket quotas summing exactly to `count` (largest remainder).
    const double scale = static_cast<double>(count) / static_cast<double>(target_hist.total());
    std::map<uint32_t, size_t> quota;
    std::vector<std::pair<double, uint32_t>> remainders;
    size_t assigned = 0;
    for (const auto& [bucket, c] : target_hist.counts) {
        const double exact = static_cast<double>(c) * scale;
        const size_t base = static_cast<size_t>(exact);
        quota[bucket] = base;
        assigned += base;
        remainders.push_back({exact - static_cast<double>(base), bucket});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (size_t i = 0; assigned < count; ++i, ++assigned)
        ++quota[remainders[i % remainders.size()].second];

    const uint32_t width = target_hist.bucket_width;
    auto max_open_bucket_end = [&]() -> uint32_t {
        uint32_t best = 0;
        bool any = false;
        for (const auto& [bucket, q] : quota)
            if (q > 0) {
                best = (bucket + 1) * width;
                any = true;
            }
        return any ? best : 0;
    };

    std::vector<CachedGadgetInfo> info(catalog.gadgets.size());
    for (size_t i = 0; i < catalog.gadgets.size(); ++i)
        info[i] = {live_in_registers(catalog.gadgets[i]), written_registers(catalog.gadgets[i])};

    Rng rng(rng_seed);
    const size_t budget = opts.budget_factor * count;
    size_t rejected = 0;
    size_t open_quota = count;

    auto pick_from = [&](const std::vector<size_t>& pool,
                         const DisciplineState& ds) -> std::optional<size_t> {
        if (pool.empty()) return std::nullopt;
        for (int tries = 0; tries < 16; ++tries) {
            const size_t idx = pool[rng.below(pool.size())];
            if (ds.compatible(info[idx].live_in)) return idx;
        }
        return std::nullopt;
    };

    while (open_quota > 0) {
        if (rejected > budget)
            throw GenerationError("candidate budget exhausted before meeting the length histogram",
                                  out.size());

        const size_t k = opts.min_gadgets + rng.below(opts.max_gadgets - opts.min_gadgets + 1);
        const uint32_t length_cap = max_open_bucket_end();

        GeneratedChain chain;
        DisciplineState ds;
        bool accepted = false;
        for (size_t j = 0; j < k; ++j) {
            const bool want_long = rng.bernoulli(opts.long_fraction) && !catalog.long_pool.empty();
            std::optional<size_t> idx =
                pick_from(want_long ? catalog.long_pool : catalog.short_pool, ds);
            if (!idx) idx = pick_from(want_long ? catalog.short_pool : catalog.long_pool, ds);
            if (!idx) {
                // fall back to a gadget with no register inputs
                const auto& pool = catalog.no_read_pool;
                idx = pool[rng.below(pool.size())];
            }
            const GadgetLikeSequence& g = catalog.gadgets[*idx];
            ds.apply(info[*idx].live_in, info[*idx].writes);
            chain.gadgets.push_back(g);
            chain.byte_len += g.byte_len;
            chain.concat_bytes.insert(chain.concat_bytes.end(), g.bytes.begin(), g.bytes.end());

            if (chain.byte_len >= length_cap) break; // no open bucket can absorb more

            // length-bucket fitting: once the chain is long enough and its
            // current length falls in a bucket that still needs chains,
            // stop growing it
            if (chain.gadgets.size() >= opts.min_gadgets) {
                auto it = quota.find(chain.byte_len / width);
                if (it != quota.end() && it->second > 0) {
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted && chain.gadgets.size() >= opts.min_gadgets) {
            auto it = quota.find(chain.byte_len / width);
            accepted = it != quota.end() && it->second > 0;
        }
        if (!accepted) {
            ++rejected;
            continue;
        }

        const ValidationReport report = validate_chain(image, chain.gadgets);
        if (!report.ok) {
            ++rejected;
            continue;
        }
        chain.validated = true;
        --quota[chain.byte_len / width];
        --open_quota;
        out.push_back(std::move(chain));
    }

    std::sort(out.begin(), out.end(), [](const GeneratedChain& a, const GeneratedChain& b) {
        return a.concat_bytes < b.concat_bytes;
    });
    return out;
}

std::vector<GeneratedChain> balance_to(const std::vector<size_t>& benign_lengths,
                                       const MemoryImage& image, const GadgetCatalog& catalog,
                                       uint64_t rng_seed, const GenerateOptions& opts) {
    if (benign_lengths.empty())
        throw GenerationError("benign dataset is empty; nothing to balance against", 0);
    LengthHistogram hist;
    for (size_t len : benign_lengths) hist.add(len);
    return generate_chains(image, catalog, benign_lengths.size(), hist, rng_seed, opts);
}

} // namespace ropscan
