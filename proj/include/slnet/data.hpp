#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <vector>

#include "slnet/tensor.hpp"

namespace slnet {

// One CSV row: a label plus a 28x28 grayscale image as 784 byte values.
struct RawRecord {
    int label = 0;
    std::array<uint8_t, 784> pixels{};
};

// Normalized image batch: values in [0,1], labels in 0..23.
struct Dataset {
    Tensor<float> images;     // [N,28,28,1]
    std::vector<int> labels;  // length N

    int64_t size() const { return static_cast<int64_t>(labels.size()); }

    // Gathers the given rows into a fresh dataset (row order = index order).
    Dataset subset(std::span<const int64_t> indices) const;
};

// Parses `label,pixel1,...,pixel784` rows after a mandatory header line.
// Rows with the wrong column count, non-integer cells or out-of-byte-range
// pixels raise FormatError carrying the 1-based line number.
std::vector<RawRecord> load_csv(const std::filesystem::path& path);

struct Prepared {
    Dataset dataset;
    int64_t dropped = 0;  // records removed by the 0..23 label filter
};

// Label filter (keep 0..23), /255 normalization, reshape to [N,28,28,1].
// Input order is preserved; the dropped count is returned, not just logged.
Prepared prepare(const std::vector<RawRecord>& records);

// Grayscale image as decoded from a binary PGM (P5) file.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;  // row-major, width*height bytes
};

// Binary PGM (P5, maxval 255) decoding. Distinct errors for a bad magic
// number, unsupported maxval and truncated payload.
GrayImage decode_pgm(std::span<const uint8_t> bytes);
GrayImage read_pgm(const std::filesystem::path& path);

// Reads the next PGM frame from a concatenated stream; std::nullopt at a
// clean end of stream, FormatError if a frame is cut off or malformed.
std::optional<GrayImage> read_pgm_stream(std::istream& in);

std::vector<uint8_t> encode_pgm(const GrayImage& img);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

} // namespace slnet
