#pragma once

#include <filesystem>
#include <span>
#include <string_view>

namespace slnet {

// Writes via a sibling temp file and renames into place, so failed writes
// never leave a partial output behind.
void atomic_write_file(const std::filesystem::path& path, std::span<const unsigned char> bytes);
void atomic_write_file(const std::filesystem::path& path, std::string_view text);

} // namespace slnet
