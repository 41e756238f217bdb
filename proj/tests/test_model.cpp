#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "slnet/model.hpp"
#include "slnet/model_io.hpp"
#include "slnet/train.hpp"
#include "testutil.hpp"

using namespace slnet;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    return fs::temp_directory_path() / ("slnet_test_" + tag + "_" + std::to_string(rng()) + ".slnm");
}

std::vector<uint8_t> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::vector<uint8_t>& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("canonical per-layer trainable parameter counts") {
    auto m = build_model<float>();
    const std::vector<int64_t> want{320, 0, 18496, 0, 73856, 0, 295168, 0, 6168};
    CHECK(m.per_layer_parameter_counts() == want);
    CHECK(m.trainable_parameter_count() == 394008);
}

TEST_CASE("count_parameters with and without optimizer state") {
    auto m = build_model<float>();
    CHECK(count_parameters(m, false) == 394008);
    Adam<float> opt(m.params());
    CHECK(count_parameters(m, true, &opt) == 3 * 394008);  // = 1,182,024
    CHECK_THROWS_AS(count_parameters(m, true), ValueError);
}

TEST_CASE("empty model counts zero parameters") {
    SequentialModel<float> m(Shape{28, 28, 1});
    CHECK(m.trainable_parameter_count() == 0);
}

TEST_CASE("layer output shapes follow the valid-convolution chain") {
    auto m = build_model<float>();
    Shape s{28, 28, 1};
    const std::vector<Shape> want{
        Shape{26, 26, 32}, Shape{13, 13, 32}, Shape{11, 11, 64}, Shape{5, 5, 64},
        Shape{3, 3, 128},  Shape{1152},       Shape{256},        Shape{256},
        Shape{24},
    };
    for (int i = 0; i < m.layer_count(); ++i) {
        s = m.layer(i).output_shape(s);
        CHECK(s == want[static_cast<size_t>(i)]);
    }
}

TEST_CASE("forward on a zero image yields a probability distribution") {
    auto m = build_model<float>(ModelConfig{}, 11);
    Tensor<float> zero(Shape{1, 28, 28, 1});
    Tensor<float> p = m.forward(zero);
    CHECK(p.shape() == Shape{1, 24});
    double sum = 0;
    for (float v : p.values()) {
        CHECK(v >= 0.0f);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("forward rows sum to one on random batches") {
    auto m = build_model<float>(ModelConfig{}, 12);
    std::mt19937_64 rng(100);
    Tensor<float> x = testutil::random_tensor<float>(Shape{3, 28, 28, 1}, rng, 0.0f, 1.0f);
    Tensor<float> p = m.forward(x);
    for (int64_t r = 0; r < 3; ++r) {
        double sum = 0;
        for (int64_t c = 0; c < 24; ++c) sum += p.at(r, c);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("inference is deterministic (dropout inert)") {
    auto m = build_model<float>(ModelConfig{}, 13);
    std::mt19937_64 rng(101);
    Tensor<float> x = testutil::random_tensor<float>(Shape{2, 28, 28, 1}, rng, 0.0f, 1.0f);
    CHECK(m.forward(x) == m.forward(x));
}

TEST_CASE("backward without forward fails") {
    auto m = build_model<float>(ModelConfig{}, 14);
    CHECK_THROWS_AS(m.backward(Tensor<float>(Shape{1, 24})), Error);
}

TEST_CASE("forward rejects wrong input shape") {
    auto m = build_model<float>(ModelConfig{}, 15);
    CHECK_THROWS_AS(m.forward(Tensor<float>(Shape{1, 27, 28, 1})), ShapeError);
}

TEST_CASE("whole-model gradients match finite differences on sampled parameters") {
    auto m = build_model<double>(ModelConfig{}, 21);
    m.set_training(true);
    std::mt19937_64 rng(200);
    Tensor<double> x = testutil::random_tensor<double>(Shape{4, 28, 28, 1}, rng, 0.0, 1.0);
    const std::vector<int> labels{0, 5, 11, 23};

    auto forward_loss = [&] {
        Rng mask_stream(99);  // identical dropout mask on every evaluation
        m.train_forward(x, mask_stream);
        return static_cast<double>(
            sparse_ce_from_logits(m.cached_logits(), std::span<const int>(labels)).first);
    };

    Rng mask_stream(99);
    m.train_forward(x, mask_stream);
    auto [loss, lgrad] = sparse_ce_from_logits(m.cached_logits(), std::span<const int>(labels));
    CHECK(std::isfinite(loss));
    m.backward(lgrad);

    auto params = m.params();
    auto grads = m.grads();
    std::uniform_int_distribution<size_t> pick_tensor(0, params.size() - 1);
    double worst = 0;
    for (int it = 0; it < 50; ++it) {
        const size_t t = pick_tensor(rng);
        std::uniform_int_distribution<int64_t> pick_index(0, params[t]->size() - 1);
        const int64_t i = pick_index(rng);
        const double analytic = (*grads[t])[i];
        const double numeric = testutil::numeric_grad(forward_loss, params[t]->data()[i]);
        worst = std::max(worst, testutil::rel_err(analytic, numeric));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("save/load round trip is bit-exact and prediction-identical") {
    auto m = build_model<float>(ModelConfig{}, 31);
    const fs::path path = temp_file("roundtrip");
    save_model(m, path);
    auto loaded = load_model(path);
    CHECK_FALSE(loaded.is_training());

    auto a = m.params();
    auto b = loaded.params();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(*a[i] == *b[i]);

    std::mt19937_64 rng(300);
    for (int it = 0; it < 100; ++it) {
        Tensor<float> x = testutil::random_tensor<float>(Shape{1, 28, 28, 1}, rng, 0.0f, 1.0f);
        CHECK(m.forward(x) == loaded.forward(x));
    }
    fs::remove(path);
}

TEST_CASE("corrupted payload byte fails the checksum, no partial model") {
    auto m = build_model<float>(ModelConfig{}, 32);
    const fs::path path = temp_file("corrupt");
    save_model(m, path);
    std::vector<uint8_t> bytes = slurp(path);
    bytes[bytes.size() / 2] ^= 0x40;  // flip one bit mid-payload
    spit(path, bytes);
    CHECK_THROWS_AS(load_model(path), ChecksumError);
    fs::remove(path);
}

TEST_CASE("unknown format version names both versions") {
    auto m = build_model<float>(ModelConfig{}, 33);
    const fs::path path = temp_file("version");
    save_model(m, path);
    std::vector<uint8_t> bytes = slurp(path);
    bytes[4] = 9;  // version field
    spit(path, bytes);
    try {
        load_model(path);
        FAIL("expected VersionError");
    } catch (const VersionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find('9') != std::string::npos);
        CHECK(msg.find('1') != std::string::npos);
    }
    fs::remove(path);
}

TEST_CASE("truncated payload is reported distinctly") {
    auto m = build_model<float>(ModelConfig{}, 34);
    const fs::path path = temp_file("truncated");
    save_model(m, path);
    std::vector<uint8_t> bytes = slurp(path);
    bytes.resize(bytes.size() / 2);
    spit(path, bytes);
    try {
        load_model(path);
        FAIL("expected FormatError");
    } catch (const ChecksumError&) {
        FAIL("truncation must not be reported as a checksum failure");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("truncated") != std::string::npos);
    }
    fs::remove(path);
}

TEST_CASE("missing model file raises IoError") {
    CHECK_THROWS_AS(load_model("/nonexistent/model.slnm"), IoError);
}

TEST_CASE("non-model file is rejected by magic") {
    const fs::path path = temp_file("magic");
    spit(path, {'P', 'K', 0x03, 0x04, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK_THROWS_AS(load_model(path), FormatError);
    fs::remove(path);
}

TEST_CASE("save/load preserves argmax and confidence") {
    auto m = build_model<float>(ModelConfig{}, 35);
    const fs::path path = temp_file("argmax");
    save_model(m, path);
    auto loaded = load_model(path);
    std::mt19937_64 rng(400);
    for (int it = 0; it < 20; ++it) {
        Tensor<float> x = testutil::random_tensor<float>(Shape{1, 28, 28, 1}, rng, 0.0f, 1.0f);
        Tensor<float> pa = m.forward(x);
        Tensor<float> pb = loaded.forward(x);
        int arga = 0, argb = 0;
        for (int c = 1; c < 24; ++c) {
            if (pa[c] > pa[arga]) arga = c;
            if (pb[c] > pb[argb]) argb = c;
        }
        CHECK(arga == argb);
        CHECK(pa[arga] == pb[argb]);
    }
    fs::remove(path);
}

} // TEST_SUITE
