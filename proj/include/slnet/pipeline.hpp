#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>

#include "slnet/data.hpp"
#include "slnet/model.hpp"

namespace slnet {

struct Prediction {
    int class_index = 0;     // 0..23
    char letter = 'A';       // letter_for_class(class_index)
    float confidence = 0.0f; // max softmax probability
};

// Class index -> letter: 0..23 map onto 'A'..'X'. Index 9 ('J') is mapped
// even though the source data never contains it (J needs motion).
char letter_for_class(int class_index);

// Grayscale frame -> [1,28,28,1] tensor in [0,1]. Downscaling uses area
// (box) averaging per axis, upscaling bilinear; a 28x28 input is passed
// through untouched apart from the /255 normalization.
Tensor<float> preprocess(const GrayImage& img);

// preprocess + forward + argmax (ties broken toward the lowest index).
Prediction predict(const SequentialModel<float>& model, const GrayImage& img);

enum class SpeakMode { stdout_event, external_command, silent };

struct SpeakOptions {
    SpeakMode mode = SpeakMode::stdout_event;
    std::string command_template;     // external mode; "{letter}" is substituted
    double debounce_seconds = 1.0;    // 0 disables debouncing
    std::ostream* event_stream = nullptr;  // where SPEAK lines go (stdout mode)
};

// Confidence gate plus per-letter debounce. The gate is strict: an event
// fires only when confidence > 0.8 exactly.
class SpeakHook {
public:
    using Clock = std::chrono::steady_clock;

    explicit SpeakHook(SpeakOptions options);

    // Returns true when a speak event was emitted for this prediction.
    bool on_prediction(const Prediction& pred, Clock::time_point now = Clock::now());

    static constexpr double kConfidenceThreshold = 0.8;

private:
    SpeakOptions options_;
    std::map<char, Clock::time_point> last_spoken_;
};

// One frame from a source: either a decoded image or a decode error.
struct FrameResult {
    std::string id;
    std::variant<GrayImage, std::string> payload;  // image or error text
    bool ok() const { return payload.index() == 0; }
};

class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual std::optional<FrameResult> next() = 0;
};

// *.pgm files from a directory in lexicographic order; frame id = filename.
class DirectoryFrameSource final : public FrameSource {
public:
    explicit DirectoryFrameSource(const std::filesystem::path& dir);
    std::optional<FrameResult> next() override;

private:
    std::vector<std::filesystem::path> files_;
    size_t pos_ = 0;
};

// Concatenated PGM frames from a stream (e.g. standard input); frame ids are
// 1-based indices. A malformed frame ends the stream after being reported,
// since framing cannot be recovered.
class StreamFrameSource final : public FrameSource {
public:
    explicit StreamFrameSource(std::istream& in);
    std::optional<FrameResult> next() override;

private:
    std::istream& in_;
    int64_t index_ = 0;
    bool dead_ = false;
};

// In-memory frames (tests, benchmarks).
class MemoryFrameSource final : public FrameSource {
public:
    explicit MemoryFrameSource(std::vector<std::pair<std::string, std::vector<uint8_t>>> frames);
    std::optional<FrameResult> next() override;

private:
    std::vector<std::pair<std::string, std::vector<uint8_t>>> frames_;
    size_t pos_ = 0;
};

struct StreamStats {
    int64_t frames = 0;   // frames pulled from the source
    int64_t decoded = 0;  // frames that produced an output line
    int64_t errors = 0;   // undecodable frames
    int64_t speaks = 0;   // speak events emitted
};

// Per decodable frame: preprocess -> predict -> speak gate -> one output
// line `id<TAB>letter<TAB>confidence` (5 decimals). Decode failures write a
// line to `err` and the stream continues. Stops early when *stop is set.
StreamStats classify_stream(const SequentialModel<float>& model, FrameSource& source,
                            SpeakHook& hook, std::ostream& out, std::ostream& err,
                            const std::atomic<bool>* stop = nullptr);

} // namespace slnet
