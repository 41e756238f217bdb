#pragma once

#include <filesystem>

#include "slnet/model.hpp"

namespace slnet {

// Bit-exact model file, little-endian regardless of host:
//
//   offset  size  field
//   0       4     magic "SLNM"
//   4       4     u32 format version (currently 1)
//   8       4     u32 descriptor byte length D
//   12      D     UTF-8 JSON architecture descriptor
//   12+D    8     u64 weight payload byte length W
//   20+D    W     float32 weights, row-major, layer declaration order
//   20+D+W  8     u64 FNV-1a checksum over bytes [8, 20+D+W)
//
// Loading validates magic, version and checksum (in that order) before any
// weight is accepted; a loaded model starts in inference mode.
inline constexpr uint32_t kModelFormatVersion = 1;

void save_model(const SequentialModel<float>& model, const std::filesystem::path& path);
SequentialModel<float> load_model(const std::filesystem::path& path);

} // namespace slnet
