#include <doctest.h>

#include <random>

#include "slnet/tensor.hpp"

using namespace slnet;

TEST_SUITE("tensor") {

TEST_CASE("reshape 784 vector to image layout keeps values") {
    std::vector<float> vals(784);
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = static_cast<float>(i);
    Tensor<float> t(Shape{784}, vals);
    Tensor<float> r = t.reshape(Shape{1, 28, 28, 1});
    CHECK(r.shape() == Shape{1, 28, 28, 1});
    for (int64_t i = 0; i < 784; ++i) CHECK(r[i] == t[i]);
    CHECK(r.at(0, 0, 1, 0) == 1.0f);
    CHECK(r.at(0, 1, 0, 0) == 28.0f);
}

TEST_CASE("reshape to own shape is the identity") {
    Tensor<float> t(Shape{2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(t.reshape(Shape{2, 3}) == t);
}

TEST_CASE("reshape [2,3] to [3,2] preserves row-major order") {
    Tensor<float> t(Shape{2, 3}, {1, 2, 3, 4, 5, 6});
    Tensor<float> r = t.reshape(Shape{3, 2});
    CHECK(r.at(0, 0) == 1.0f);
    CHECK(r.at(0, 1) == 2.0f);
    CHECK(r.at(1, 0) == 3.0f);
    CHECK(r.at(1, 1) == 4.0f);
    CHECK(r.at(2, 0) == 5.0f);
    CHECK(r.at(2, 1) == 6.0f);
}

TEST_CASE("reshape element-count mismatch names both counts") {
    Tensor<float> t(Shape{2, 3});
    try {
        t.reshape(Shape{7});
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("6") != std::string::npos);
        CHECK(msg.find("7") != std::string::npos);
    }
}

TEST_CASE("map applies relu") {
    Tensor<float> t(Shape{3}, {-1, 0, 2});
    Tensor<float> r = t.map([](float v) { return std::max(v, 0.0f); });
    CHECK(r[0] == 0.0f);
    CHECK(r[1] == 0.0f);
    CHECK(r[2] == 2.0f);
    // input untouched
    CHECK(t[0] == -1.0f);
}

TEST_CASE("map with identity leaves tensor unchanged") {
    Tensor<float> t(Shape{2, 2}, {1, -2, 3, -4});
    CHECK(t.map([](float v) { return v; }) == t);
}

TEST_CASE("map2 add with zero tensor is the identity") {
    Tensor<float> t(Shape{4}, {1, 2, 3, 4});
    Tensor<float> z(Shape{4});
    CHECK(Tensor<float>::map2(t, z, [](float a, float b) { return a + b; }) == t);
}

TEST_CASE("map2 rejects shape mismatch") {
    Tensor<float> a(Shape{2, 2});
    Tensor<float> b(Shape{4});
    CHECK_THROWS_AS(Tensor<float>::map2(a, b, [](float x, float y) { return x + y; }), ShapeError);
}

TEST_CASE("shape rejects non-positive extents") {
    CHECK_THROWS_AS((Shape{0, 3}), ShapeError);
    CHECK_THROWS_AS((Shape{-1}), ShapeError);
}

TEST_CASE("tensor construction validates value count") {
    CHECK_THROWS_AS((Tensor<float>(Shape{3}, {1.0f, 2.0f})), ShapeError);
}

TEST_CASE("property: reshape round trip is the identity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<float> dist(-5, 5);
    for (int it = 0; it < 20; ++it) {
        std::vector<float> vals(24);
        for (float& v : vals) v = dist(rng);
        Tensor<float> t(Shape{2, 3, 4}, vals);
        CHECK(t.reshape(Shape{4, 6}).reshape(Shape{2, 3, 4}) == t);
        CHECK(t.reshape(Shape{24}).reshape(Shape{2, 3, 4}) == t);
    }
}

TEST_CASE("property: map composition equals composed map") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<float> dist(-5, 5);
    auto f = [](float v) { return v * 2.0f; };
    auto g = [](float v) { return v + 1.0f; };
    for (int it = 0; it < 20; ++it) {
        std::vector<float> vals(12);
        for (float& v : vals) v = dist(rng);
        Tensor<float> t(Shape{3, 4}, vals);
        CHECK(t.map(f).map(g) == t.map([&](float v) { return g(f(v)); }));
    }
}

} // TEST_SUITE
