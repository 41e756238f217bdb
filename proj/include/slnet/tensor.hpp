#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "slnet/errors.hpp"

namespace slnet {

// Ordered list of positive extents. Image batches use [batch, height, width,
// channels]; nothing in this library needs rank > 4.
class Shape {
public:
    Shape() = default;
    Shape(std::initializer_list<int64_t> dims) : dims_(dims) { validate(); }
    explicit Shape(std::vector<int64_t> dims) : dims_(std::move(dims)) { validate(); }

    int rank() const { return static_cast<int>(dims_.size()); }
    int64_t operator[](int i) const { return dims_[static_cast<size_t>(i)]; }
    const std::vector<int64_t>& dims() const { return dims_; }

    int64_t count() const {
        int64_t n = 1;
        for (int64_t d : dims_) n *= d;
        return n;
    }

    bool operator==(const Shape& other) const { return dims_ == other.dims_; }
    bool operator!=(const Shape& other) const { return dims_ != other.dims_; }

    std::string str() const {
        std::ostringstream os;
        os << '[';
        for (size_t i = 0; i < dims_.size(); ++i) {
            if (i) os << ',';
            os << dims_[i];
        }
        os << ']';
        return os.str();
    }

private:
    void validate() const {
        for (int64_t d : dims_) {
            if (d < 1) throw ShapeError("shape extent must be >= 1, got " + str());
        }
    }

    std::vector<int64_t> dims_;
};

// Dense n-dimensional array of real values, flat row-major storage.
// Public operations never mutate their inputs; they return fresh tensors.
// T is float in the trained artifact and double in the gradient-check harness.
template <typename T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(Shape shape)
        : shape_(std::move(shape)), values_(static_cast<size_t>(shape_.count()), T(0)) {}

    Tensor(Shape shape, std::vector<T> values)
        : shape_(std::move(shape)), values_(std::move(values)) {
        if (static_cast<int64_t>(values_.size()) != shape_.count()) {
            throw ShapeError("tensor values length " + std::to_string(values_.size()) +
                             " does not match shape " + shape_.str() + " with " +
                             std::to_string(shape_.count()) + " elements");
        }
    }

    static Tensor full(Shape shape, T value) {
        Tensor t(std::move(shape));
        std::fill(t.values_.begin(), t.values_.end(), value);
        return t;
    }

    const Shape& shape() const { return shape_; }
    int64_t size() const { return static_cast<int64_t>(values_.size()); }

    std::span<const T> values() const { return values_; }
    std::span<T> values() { return values_; }
    const T* data() const { return values_.data(); }
    T* data() { return values_.data(); }

    T operator[](int64_t i) const { return values_[static_cast<size_t>(i)]; }
    T& operator[](int64_t i) { return values_[static_cast<size_t>(i)]; }

    // Multi-index access; strides derived from the shape (row-major).
    template <typename... Ix>
    T at(Ix... ix) const {
        return values_[static_cast<size_t>(flat_index(ix...))];
    }
    template <typename... Ix>
    T& at(Ix... ix) {
        return values_[static_cast<size_t>(flat_index(ix...))];
    }

    // Same values, new shape. Element counts must agree.
    Tensor reshape(const Shape& target) const {
        if (target.count() != shape_.count()) {
            throw ShapeError("cannot reshape " + shape_.str() + " (" +
                             std::to_string(shape_.count()) + " elements) to " + target.str() +
                             " (" + std::to_string(target.count()) + " elements)");
        }
        return Tensor(target, values_);
    }

    template <typename F>
    Tensor map(F&& f) const {
        Tensor out(shape_);
        for (size_t i = 0; i < values_.size(); ++i) out.values_[i] = f(values_[i]);
        return out;
    }

    template <typename F>
    static Tensor map2(const Tensor& a, const Tensor& b, F&& f) {
        if (a.shape_ != b.shape_) {
            throw ShapeError("map2 shape mismatch: " + a.shape_.str() + " vs " + b.shape_.str());
        }
        Tensor out(a.shape_);
        for (size_t i = 0; i < a.values_.size(); ++i) out.values_[i] = f(a.values_[i], b.values_[i]);
        return out;
    }

    bool operator==(const Tensor& other) const {
        return shape_ == other.shape_ && values_ == other.values_;
    }

private:
    template <typename... Ix>
    int64_t flat_index(Ix... ix) const {
        const int64_t idx[] = {static_cast<int64_t>(ix)...};
        constexpr int n = sizeof...(Ix);
        int64_t flat = 0;
        for (int d = 0; d < n; ++d) flat = flat * shape_[d] + idx[d];
        return flat;
    }

    Shape shape_;
    std::vector<T> values_;
};

} // namespace slnet
