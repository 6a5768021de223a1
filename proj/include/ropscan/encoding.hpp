#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ropscan/tensor.hpp"

namespace ropscan {

inline constexpr uint8_t kPadByte = 0x90; // one-byte nop
inline constexpr size_t kAlphabet = 256;

enum class Label : uint8_t { Benign = 0, Real = 1 };

// One chain, padded to the dataset's n_max with 0x90. The one-hot matrix
// is materialized on demand; row i of it is all zeros except a 1 at
// index bytes[i].
struct EncodedSample {
    std::vector<uint8_t> bytes; // length n_max after padding
    size_t true_len = 0;        // original byte count
    Label label = Label::Benign;

    Tensor2D matrix() const;
    std::vector<uint8_t> unpadded() const {
        return {bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(true_len)};
    }
};

struct Dataset {
    std::vector<EncodedSample> samples;
    size_t n_max = 0;
    size_t benign_count = 0;
    size_t real_count = 0;

    size_t count(Label l) const { return l == Label::Benign ? benign_count : real_count; }
};

// length(bytes) x 256 one-hot rows. Throws std::invalid_argument on empty
// input.
Tensor2D bytes_to_onehot(std::span<const uint8_t> bytes);

// Pad (or for longer-than-n_max inputs at detection time, truncate) to
// exactly n rows.
std::vector<uint8_t> pad_bytes(std::span<const uint8_t> bytes, size_t n);

// n_max is the longest sequence over both inputs; labels come from which
// list a chain arrived in.
Dataset build_dataset(const std::vector<std::vector<uint8_t>>& benign,
                      const std::vector<std::vector<uint8_t>>& real);

// Same, reading chains.tsv files (see scanner.hpp for the format). Throws
// ParseError with the offending line number on malformed records and
// std::runtime_error when the union is empty.
Dataset build_dataset_from_files(const std::filesystem::path& benign_path,
                                 const std::filesystem::path& real_path);

} // namespace ropscan
