#include "slnet/data.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "slnet/fs.hpp"

namespace slnet {

namespace fs = std::filesystem;

Dataset Dataset::subset(std::span<const int64_t> indices) const {
    const int64_t n = size();
    const int64_t per_sample = n > 0 ? images.size() / n : 0;
    Shape out_shape({static_cast<int64_t>(indices.size()), images.shape()[1], images.shape()[2],
                     images.shape()[3]});
    Dataset out{Tensor<float>(out_shape), {}};
    out.labels.reserve(indices.size());
    float* dst = out.images.data();
    for (size_t i = 0; i < indices.size(); ++i) {
        const int64_t row = indices[i];
        if (row < 0 || row >= n) throw ValueError("subset index " + std::to_string(row) + " out of range");
        std::memcpy(dst + static_cast<int64_t>(i) * per_sample, images.data() + row * per_sample,
                    static_cast<size_t>(per_sample) * sizeof(float));
        out.labels.push_back(labels[static_cast<size_t>(row)]);
    }
    return out;
}

namespace {

// Parses one `label,p1,...,p784` line. Returns false with a reason on any
// structural problem; `line_no` is only used for the error text.
bool parse_row(std::string_view line, int64_t line_no, RawRecord& rec, std::string& err) {
    const char* p = line.data();
    const char* end = p + line.size();
    int field = 0;
    while (true) {
        int value = 0;
        auto [next, ec] = std::from_chars(p, end, value);
        if (ec != std::errc{} || (next != end && *next != ',')) {
            err = "row " + std::to_string(line_no) + ": field " + std::to_string(field + 1) +
                  " is not an integer";
            return false;
        }
        if (field == 0) {
            rec.label = value;
        } else if (field <= 784) {
            if (value < 0 || value > 255) {
                err = "row " + std::to_string(line_no) + ": pixel " + std::to_string(field) +
                      " value " + std::to_string(value) + " outside 0..255";
                return false;
            }
            rec.pixels[static_cast<size_t>(field - 1)] = static_cast<uint8_t>(value);
        }
        ++field;
        if (next == end) break;
        p = next + 1;
        if (p == end) {  // trailing comma
            err = "row " + std::to_string(line_no) + ": trailing comma";
            return false;
        }
    }
    if (field != 785) {
        err = "row " + std::to_string(line_no) + ": expected 785 columns (label + 784 pixels), got " +
              std::to_string(field);
        return false;
    }
    return true;
}

} // namespace

std::vector<RawRecord> load_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open CSV file: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::vector<RawRecord> records;
    size_t pos = 0;
    int64_t line_no = 0;
    bool saw_header = false;
    while (pos < content.size()) {
        size_t eol = content.find('\n', pos);
        size_t next = eol == std::string::npos ? content.size() : eol + 1;
        size_t len = (eol == std::string::npos ? content.size() : eol) - pos;
        if (len > 0 && content[pos + len - 1] == '\r') --len;  // CRLF
        std::string_view line(content.data() + pos, len);
        ++line_no;
        pos = next;

        if (!saw_header) {
            if (line.empty()) throw FormatError("row 1: missing header line");
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;

        RawRecord rec;
        std::string err;
        if (!parse_row(line, line_no, rec, err)) throw FormatError(err);
        records.push_back(rec);
    }
    if (!saw_header) throw FormatError("empty CSV file: " + path.string());
    return records;
}

Prepared prepare(const std::vector<RawRecord>& records) {
    std::vector<const RawRecord*> kept;
    kept.reserve(records.size());
    for (const RawRecord& r : records) {
        if (r.label >= 0 && r.label <= 23) kept.push_back(&r);
    }
    const int64_t n = static_cast<int64_t>(kept.size());
    Prepared out;
    out.dropped = static_cast<int64_t>(records.size()) - n;
    out.dataset.images = Tensor<float>(Shape{n, 28, 28, 1});
    out.dataset.labels.reserve(static_cast<size_t>(n));
    float* dst = out.dataset.images.data();
    for (int64_t i = 0; i < n; ++i) {
        const RawRecord& r = *kept[static_cast<size_t>(i)];
        out.dataset.labels.push_back(r.label);
        float* img = dst + i * 784;
        for (int j = 0; j < 784; ++j) img[j] = static_cast<float>(r.pixels[static_cast<size_t>(j)]) / 255.0f;
    }
    return out;
}

namespace {

// Incremental PGM header tokenizer; works for both whole buffers and streams.
class PgmReader {
public:
    virtual ~PgmReader() = default;
    virtual int get() = 0;  // next byte or -1 at end
    virtual int64_t read(uint8_t* dst, int64_t count) = 0;

    GrayImage decode() {
        const int m0 = get(), m1 = get();
        if (m0 < 0) throw FormatError("PGM: empty input");
        if (m0 != 'P' || m1 != '5') {
            std::string magic;
            magic += m0 < 0 ? '?' : static_cast<char>(m0);
            if (m1 >= 0) magic += static_cast<char>(m1);
            throw FormatError("PGM: unsupported magic '" + magic + "' (only binary P5 grayscale)");
        }
        const int64_t w = read_int();
        const int64_t h = read_int();
        const int64_t maxval = read_int();
        if (w < 1 || h < 1) {
            throw FormatError("PGM: degenerate dimensions " + std::to_string(w) + "x" + std::to_string(h));
        }
        if (maxval != 255) throw FormatError("PGM: unsupported maxval " + std::to_string(maxval));
        // exactly one whitespace byte separates the header from the payload
        GrayImage img;
        img.width = static_cast<int>(w);
        img.height = static_cast<int>(h);
        img.pixels.resize(static_cast<size_t>(w * h));
        const int64_t got = read(img.pixels.data(), w * h);
        if (got != w * h) {
            throw FormatError("PGM: truncated payload, expected " + std::to_string(w * h) +
                              " bytes, got " + std::to_string(got));
        }
        return img;
    }

private:
    int64_t read_int() {
        int c = get();
        // skip whitespace and '#' comments
        while (true) {
            if (c < 0) throw FormatError("PGM: truncated header");
            if (c == '#') {
                while (c >= 0 && c != '\n') c = get();
                continue;
            }
            if (std::isspace(c)) {
                c = get();
                continue;
            }
            break;
        }
        if (!std::isdigit(c)) throw FormatError("PGM: malformed header");
        int64_t value = 0;
        while (c >= 0 && std::isdigit(c)) {
            value = value * 10 + (c - '0');
            if (value > (int64_t(1) << 31)) throw FormatError("PGM: header value too large");
            c = get();
        }
        if (c < 0) throw FormatError("PGM: truncated header");
        if (!std::isspace(c)) throw FormatError("PGM: malformed header");
        return value;
    }
};

class BufferPgmReader final : public PgmReader {
public:
    explicit BufferPgmReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}
    int get() override { return pos_ < bytes_.size() ? bytes_[pos_++] : -1; }
    int64_t read(uint8_t* dst, int64_t count) override {
        const int64_t avail = static_cast<int64_t>(bytes_.size() - pos_);
        const int64_t take = std::min(count, avail);
        std::memcpy(dst, bytes_.data() + pos_, static_cast<size_t>(take));
        pos_ += static_cast<size_t>(take);
        return take;
    }
    bool exhausted() const { return pos_ == bytes_.size(); }

private:
    std::span<const uint8_t> bytes_;
    size_t pos_ = 0;
};

class StreamPgmReader final : public PgmReader {
public:
    explicit StreamPgmReader(std::istream& in) : in_(in) {}
    int get() override {
        const int c = in_.get();
        return c == std::char_traits<char>::eof() ? -1 : c;
    }
    int64_t read(uint8_t* dst, int64_t count) override {
        in_.read(reinterpret_cast<char*>(dst), count);
        return in_.gcount();
    }

private:
    std::istream& in_;
};

} // namespace

GrayImage decode_pgm(std::span<const uint8_t> bytes) {
    BufferPgmReader reader(bytes);
    GrayImage img = reader.decode();
    if (!reader.exhausted()) {
        throw FormatError("PGM: trailing bytes after payload (concatenated frames belong on a stream)");
    }
    return img;
}

GrayImage read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open PGM file: " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_pgm(bytes);
}

std::optional<GrayImage> read_pgm_stream(std::istream& in) {
    // peek: a clean end-of-stream between frames means "no more frames"
    const int c = in.peek();
    if (c == std::char_traits<char>::eof()) return std::nullopt;
    StreamPgmReader reader(in);
    return reader.decode();
}

std::vector<uint8_t> encode_pgm(const GrayImage& img) {
    if (img.width < 1 || img.height < 1 ||
        img.pixels.size() != static_cast<size_t>(img.width) * static_cast<size_t>(img.height)) {
        throw ValueError("encode_pgm: inconsistent image dimensions");
    }
    std::ostringstream header;
    header << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    const std::string h = header.str();
    std::vector<uint8_t> out(h.begin(), h.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

void write_pgm(const GrayImage& img, const fs::path& path) {
    const std::vector<uint8_t> bytes = encode_pgm(img);
    atomic_write_file(path, std::span<const unsigned char>(bytes.data(), bytes.size()));
}

} // namespace slnet
