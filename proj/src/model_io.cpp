#include "slnet/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "slnet/fs.hpp"

namespace slnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'S', 'L', 'N', 'M'};

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32(const uint8_t* p) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
    return v;
}

uint64_t get_u64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
    return v;
}

uint64_t fnv1a64(const uint8_t* data, size_t len) {
    uint64_t h = 14695981039346656037ULL;
    for (size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 1099511628211ULL;
    }
    return h;
}

json layer_descriptor(const Layer<float>& layer) {
    json j;
    j["kind"] = layer.kind();
    if (const auto* conv = dynamic_cast<const Conv2D<float>*>(&layer)) {
        j["in_channels"] = conv->in_channels();
        j["filters"] = conv->filters();
        j["kernel"] = conv->kernel_size();
        j["activation"] = activation_name(conv->activation());
    } else if (const auto* dense = dynamic_cast<const Dense<float>*>(&layer)) {
        j["in_features"] = dense->in_features();
        j["units"] = dense->units();
        j["activation"] = activation_name(dense->activation());
    } else if (const auto* drop = dynamic_cast<const Dropout<float>*>(&layer)) {
        j["rate"] = drop->rate();
    }
    return j;
}

std::unique_ptr<Layer<float>> layer_from_descriptor(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "conv2d") {
        return std::make_unique<Conv2D<float>>(
            j.at("in_channels").get<int>(), j.at("filters").get<int>(), j.at("kernel").get<int>(),
            activation_from_name(j.at("activation").get<std::string>()));
    }
    if (kind == "maxpool2d") return std::make_unique<MaxPool2D<float>>();
    if (kind == "flatten") return std::make_unique<Flatten<float>>();
    if (kind == "dense") {
        return std::make_unique<Dense<float>>(
            j.at("in_features").get<int>(), j.at("units").get<int>(),
            activation_from_name(j.at("activation").get<std::string>()));
    }
    if (kind == "dropout") return std::make_unique<Dropout<float>>(j.at("rate").get<double>());
    throw FormatError("model file: unknown layer kind '" + kind + "'");
}

} // namespace

void save_model(const SequentialModel<float>& model, const fs::path& path) {
    if (model.layer_count() == 0) throw ValueError("save_model: model has no layers");

    json desc;
    desc["input_shape"] = model.input_shape().dims();
    desc["layers"] = json::array();
    for (int i = 0; i < model.layer_count(); ++i) {
        desc["layers"].push_back(layer_descriptor(model.layer(i)));
    }
    const std::string desc_text = desc.dump();

    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kModelFormatVersion);
    const size_t payload_begin = out.size();
    put_u32(out, static_cast<uint32_t>(desc_text.size()));
    out.insert(out.end(), desc_text.begin(), desc_text.end());

    uint64_t weight_bytes = 0;
    for (const Tensor<float>* p : model.params()) weight_bytes += static_cast<uint64_t>(p->size()) * 4;
    put_u64(out, weight_bytes);
    for (const Tensor<float>* p : model.params()) {
        for (float v : p->values()) put_u32(out, std::bit_cast<uint32_t>(v));
    }

    put_u64(out, fnv1a64(out.data() + payload_begin, out.size() - payload_begin));
    atomic_write_file(path, std::span<const unsigned char>(out.data(), out.size()));
}

SequentialModel<float> load_model(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 12) throw FormatError("model file truncated: " + path.string());
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("not a slnet model file: " + path.string());
    }
    const uint32_t version = get_u32(bytes.data() + 4);
    if (version != kModelFormatVersion) {
        throw VersionError("model file version " + std::to_string(version) +
                           ", this build reads version " + std::to_string(kModelFormatVersion));
    }
    const uint32_t desc_len = get_u32(bytes.data() + 8);
    size_t off = 12;
    if (bytes.size() < off + desc_len + 8) throw FormatError("model file truncated: descriptor");
    const std::string desc_text(reinterpret_cast<const char*>(bytes.data() + off), desc_len);
    off += desc_len;
    const uint64_t weight_bytes = get_u64(bytes.data() + off);
    off += 8;
    if (bytes.size() < off + weight_bytes + 8) throw FormatError("model file truncated: weights");
    const size_t weights_at = off;
    off += weight_bytes;

    const uint64_t stored = get_u64(bytes.data() + off);
    const uint64_t computed = fnv1a64(bytes.data() + 8, off - 8);
    if (stored != computed) throw ChecksumError("model file checksum mismatch: " + path.string());
    if (off + 8 != bytes.size()) throw FormatError("model file has trailing bytes");

    json desc;
    try {
        desc = json::parse(desc_text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("model descriptor is not valid JSON: ") + e.what());
    }

    SequentialModel<float> model(Shape(desc.at("input_shape").get<std::vector<int64_t>>()));
    for (const json& lj : desc.at("layers")) model.add(layer_from_descriptor(lj));

    uint64_t expected = 0;
    for (const Tensor<float>* p : model.params()) expected += static_cast<uint64_t>(p->size()) * 4;
    if (expected != weight_bytes) {
        throw FormatError("model file weight payload is " + std::to_string(weight_bytes) +
                          " bytes, architecture needs " + std::to_string(expected));
    }

    const uint8_t* w = bytes.data() + weights_at;
    for (Tensor<float>* p : model.params()) {
        for (float& v : p->values()) {
            v = std::bit_cast<float>(get_u32(w));
            w += 4;
        }
    }
    model.set_training(false);
    return model;
}

} // namespace slnet
