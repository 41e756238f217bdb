#include "slnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace slnet {

namespace fs = std::filesystem;

char letter_for_class(int class_index) {
    if (class_index < 0 || class_index > 23) {
        throw ValueError("class index " + std::to_string(class_index) + " outside 0..23");
    }
    return static_cast<char>('A' + class_index);
}

namespace {

// 1D resample of `rows` independent rows: box averaging when shrinking,
// bilinear when growing, straight copy when the length is unchanged.
std::vector<double> resample_axis(const std::vector<double>& src, int64_t rows, int64_t src_len,
                                  int64_t dst_len) {
    std::vector<double> dst(static_cast<size_t>(rows * dst_len));
    if (src_len == dst_len) {
        std::copy(src.begin(), src.end(), dst.begin());
        return dst;
    }
    if (src_len > dst_len) {
        const double ratio = static_cast<double>(src_len) / static_cast<double>(dst_len);
        for (int64_t r = 0; r < rows; ++r) {
            const double* in = src.data() + r * src_len;
            double* out = dst.data() + r * dst_len;
            for (int64_t i = 0; i < dst_len; ++i) {
                const double lo = i * ratio;
                const double hi = (i + 1) * ratio;
                double acc = 0;
                for (int64_t k = static_cast<int64_t>(lo); k < src_len && k < hi; ++k) {
                    const double cover = std::min(hi, static_cast<double>(k + 1)) -
                                         std::max(lo, static_cast<double>(k));
                    if (cover > 0) acc += in[k] * cover;
                }
                out[i] = acc / ratio;
            }
        }
    } else {
        const double ratio = static_cast<double>(src_len) / static_cast<double>(dst_len);
        for (int64_t r = 0; r < rows; ++r) {
            const double* in = src.data() + r * src_len;
            double* out = dst.data() + r * dst_len;
            for (int64_t i = 0; i < dst_len; ++i) {
                double pos = (i + 0.5) * ratio - 0.5;
                pos = std::clamp(pos, 0.0, static_cast<double>(src_len - 1));
                const int64_t k0 = static_cast<int64_t>(pos);
                const int64_t k1 = std::min(k0 + 1, src_len - 1);
                const double t = pos - static_cast<double>(k0);
                out[i] = in[k0] * (1.0 - t) + in[k1] * t;
            }
        }
    }
    return dst;
}

std::vector<double> transpose(const std::vector<double>& m, int64_t rows, int64_t cols) {
    std::vector<double> out(m.size());
    for (int64_t r = 0; r < rows; ++r)
        for (int64_t c = 0; c < cols; ++c) out[c * rows + r] = m[r * cols + c];
    return out;
}

} // namespace

Tensor<float> preprocess(const GrayImage& img) {
    if (img.width < 1 || img.height < 1) {
        throw ValueError("preprocess: degenerate image " + std::to_string(img.width) + "x" +
                         std::to_string(img.height));
    }
    if (img.pixels.size() != static_cast<size_t>(img.width) * static_cast<size_t>(img.height)) {
        throw ValueError("preprocess: pixel count does not match dimensions");
    }
    constexpr int64_t kSide = 28;
    Tensor<float> out(Shape{1, kSide, kSide, 1});

    if (img.width == kSide && img.height == kSide) {
        for (size_t i = 0; i < img.pixels.size(); ++i) {
            out.data()[i] = static_cast<float>(img.pixels[i]) / 255.0f;
        }
        return out;
    }

    std::vector<double> work(img.pixels.begin(), img.pixels.end());
    // horizontal pass, then vertical via transpose
    work = resample_axis(work, img.height, img.width, kSide);
    work = transpose(work, img.height, kSide);
    work = resample_axis(work, kSide, img.height, kSide);
    work = transpose(work, kSide, kSide);

    for (int64_t i = 0; i < kSide * kSide; ++i) {
        out.data()[i] = static_cast<float>(work[static_cast<size_t>(i)] / 255.0);
    }
    return out;
}

Prediction predict(const SequentialModel<float>& model, const GrayImage& img) {
    const Tensor<float> probs = model.forward(preprocess(img));
    const int64_t k = probs.shape()[1];
    int best = 0;
    for (int64_t c = 1; c < k; ++c) {
        if (probs[c] > probs[best]) best = static_cast<int>(c);  // ties keep the lowest index
    }
    Prediction p;
    p.class_index = best;
    p.letter = letter_for_class(best);
    p.confidence = probs[best];
    return p;
}

SpeakHook::SpeakHook(SpeakOptions options) : options_(std::move(options)) {
    if (options_.mode == SpeakMode::external_command && options_.command_template.empty()) {
        throw ValueError("speak hook: external command mode needs a command template");
    }
}

bool SpeakHook::on_prediction(const Prediction& pred, Clock::time_point now) {
    if (!(static_cast<double>(pred.confidence) > kConfidenceThreshold)) return false;

    if (options_.debounce_seconds > 0) {
        const auto it = last_spoken_.find(pred.letter);
        if (it != last_spoken_.end()) {
            const std::chrono::duration<double> since = now - it->second;
            if (since.count() < options_.debounce_seconds) return false;
        }
    }
    last_spoken_[pred.letter] = now;

    switch (options_.mode) {
        case SpeakMode::stdout_event: {
            std::ostream& os = options_.event_stream ? *options_.event_stream : std::cout;
            char buf[64];
            std::snprintf(buf, sizeof buf, "SPEAK %c %.5f", pred.letter,
                          static_cast<double>(pred.confidence));
            os << buf << '\n';
            break;
        }
        case SpeakMode::external_command: {
            std::string cmd = options_.command_template;
            const std::string placeholder = "{letter}";
            for (size_t at = cmd.find(placeholder); at != std::string::npos;
                 at = cmd.find(placeholder, at)) {
                cmd.replace(at, placeholder.size(), std::string(1, pred.letter));
                at += 1;
            }
            const int rc = std::system(cmd.c_str());
            if (rc != 0) {
                std::cerr << "speak command failed (exit " << rc << "): " << cmd << '\n';
            }
            break;
        }
        case SpeakMode::silent:
            break;
    }
    return true;
}

DirectoryFrameSource::DirectoryFrameSource(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
            files_.push_back(entry.path());
        }
    }
    std::sort(files_.begin(), files_.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
}

std::optional<FrameResult> DirectoryFrameSource::next() {
    if (pos_ >= files_.size()) return std::nullopt;
    const fs::path& file = files_[pos_++];
    FrameResult fr;
    fr.id = file.filename().string();
    try {
        fr.payload = read_pgm(file);
    } catch (const Error& e) {
        fr.payload = std::string(e.what());
    }
    return fr;
}

StreamFrameSource::StreamFrameSource(std::istream& in) : in_(in) {}

std::optional<FrameResult> StreamFrameSource::next() {
    if (dead_) return std::nullopt;
    FrameResult fr;
    fr.id = std::to_string(index_ + 1);
    try {
        std::optional<GrayImage> img = read_pgm_stream(in_);
        if (!img) return std::nullopt;
        ++index_;
        fr.payload = std::move(*img);
    } catch (const Error& e) {
        // framing is lost after a malformed frame; report it and stop
        ++index_;
        dead_ = true;
        fr.payload = std::string(e.what());
    }
    return fr;
}

MemoryFrameSource::MemoryFrameSource(std::vector<std::pair<std::string, std::vector<uint8_t>>> frames)
    : frames_(std::move(frames)) {}

std::optional<FrameResult> MemoryFrameSource::next() {
    if (pos_ >= frames_.size()) return std::nullopt;
    const auto& [id, bytes] = frames_[pos_++];
    FrameResult fr;
    fr.id = id;
    try {
        fr.payload = decode_pgm(bytes);
    } catch (const Error& e) {
        fr.payload = std::string(e.what());
    }
    return fr;
}

StreamStats classify_stream(const SequentialModel<float>& model, FrameSource& source,
                            SpeakHook& hook, std::ostream& out, std::ostream& err,
                            const std::atomic<bool>* stop) {
    StreamStats stats;
    while (!stop || !stop->load(std::memory_order_relaxed)) {
        std::optional<FrameResult> fr = source.next();
        if (!fr) break;
        ++stats.frames;
        if (!fr->ok()) {
            err << fr->id << "\tERROR\t" << std::get<std::string>(fr->payload) << '\n';
            ++stats.errors;
            continue;
        }
        const Prediction pred = predict(model, std::get<GrayImage>(fr->payload));
        if (hook.on_prediction(pred)) ++stats.speaks;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.5f", static_cast<double>(pred.confidence));
        out << fr->id << '\t' << pred.letter << '\t' << buf << '\n';
        ++stats.decoded;
    }
    return stats;
}

} // namespace slnet
