#include "slnet/fs.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "slnet/errors.hpp"

namespace slnet {

namespace fs = std::filesystem;

void atomic_write_file(const fs::path& path, std::span<const unsigned char> bytes) {
    fs::path dir = path.parent_path();
    if (dir.empty()) dir = ".";
    std::error_code ec;
    if (!fs::exists(dir, ec)) throw IoError("directory does not exist: " + dir.string());

    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(std::random_device{}());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            std::remove(tmp.string().c_str());
            throw IoError("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.string().c_str());
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

void atomic_write_file(const fs::path& path, std::string_view text) {
    atomic_write_file(path, std::span<const unsigned char>(
                                reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

} // namespace slnet
