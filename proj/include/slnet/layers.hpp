#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "slnet/tensor.hpp"

namespace slnet {

using Rng = std::mt19937_64;

enum class Activation { none, relu, softmax };

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::none: return "none";
        case Activation::relu: return "relu";
        case Activation::softmax: return "softmax";
    }
    return "none";
}

inline Activation activation_from_name(const std::string& name) {
    if (name == "none") return Activation::none;
    if (name == "relu") return Activation::relu;
    if (name == "softmax") return Activation::softmax;
    throw FormatError("unknown activation '" + name + "'");
}

// Row-wise softmax over [N,K] logits, stabilized by max subtraction.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
    if (logits.shape().rank() != 2) {
        throw ShapeError("softmax expects [N,K] logits, got " + logits.shape().str());
    }
    for (T v : logits.values()) {
        if (!std::isfinite(static_cast<double>(v))) throw NumericError("softmax: non-finite logit");
    }
    const int64_t n = logits.shape()[0], k = logits.shape()[1];
    Tensor<T> out(logits.shape());
    for (int64_t r = 0; r < n; ++r) {
        const T* z = logits.data() + r * k;
        T* p = out.data() + r * k;
        T zmax = z[0];
        for (int64_t c = 1; c < k; ++c) zmax = std::max(zmax, z[c]);
        T sum = 0;
        for (int64_t c = 0; c < k; ++c) {
            p[c] = std::exp(z[c] - zmax);
            sum += p[c];
        }
        for (int64_t c = 0; c < k; ++c) p[c] /= sum;
    }
    return out;
}

// Row-wise log-softmax; the numerically safe path for cross-entropy.
template <typename T>
Tensor<T> log_softmax(const Tensor<T>& logits) {
    if (logits.shape().rank() != 2) {
        throw ShapeError("log_softmax expects [N,K] logits, got " + logits.shape().str());
    }
    const int64_t n = logits.shape()[0], k = logits.shape()[1];
    Tensor<T> out(logits.shape());
    for (int64_t r = 0; r < n; ++r) {
        const T* z = logits.data() + r * k;
        T* p = out.data() + r * k;
        T zmax = z[0];
        for (int64_t c = 1; c < k; ++c) zmax = std::max(zmax, z[c]);
        T sum = 0;
        for (int64_t c = 0; c < k; ++c) sum += std::exp(z[c] - zmax);
        const T lse = std::log(sum) + zmax;
        for (int64_t c = 0; c < k; ++c) p[c] = z[c] - lse;
    }
    return out;
}

// Abstract layer. Inference is const and cache-free so a trained model can be
// shared across threads; train_forward retains whatever backward needs.
template <typename T>
class Layer {
public:
    virtual ~Layer() = default;

    virtual const char* kind() const = 0;

    // Per-sample shape propagation ([H,W,C] or [F], no batch dimension).
    virtual Shape output_shape(const Shape& input) const = 0;

    virtual Tensor<T> infer(const Tensor<T>& x) const = 0;
    virtual Tensor<T> train_forward(const Tensor<T>& x, Rng& rng) = 0;

    // Consumes the cache from the matching train_forward, fills parameter
    // gradients, returns the gradient w.r.t. the layer input.
    virtual Tensor<T> backward(const Tensor<T>& upstream) = 0;

    virtual std::vector<Tensor<T>*> params() { return {}; }
    virtual std::vector<const Tensor<T>*> params() const { return {}; }
    virtual std::vector<Tensor<T>*> grads() { return {}; }

    virtual void init_params(Rng&) {}

    int64_t param_count() const {
        int64_t n = 0;
        for (const Tensor<T>* p : static_cast<const Layer*>(this)->params()) n += p->size();
        return n;
    }

protected:
    void require_cache(bool has, const char* who) const {
        if (!has) throw Error(std::string(who) + ": backward without a cached forward pass");
    }
};

// 2D convolution, "valid" padding, stride 1, cross-correlation convention
// (no kernel flip). Weights are [K,K,Cin,F], bias [F].
template <typename T>
class Conv2D final : public Layer<T> {
public:
    Conv2D(int in_channels, int filters, int kernel_size, Activation act)
        : in_channels_(in_channels), filters_(filters), ksize_(kernel_size), act_(act),
          weights_(Shape{kernel_size, kernel_size, in_channels, filters}),
          bias_(Shape{filters}),
          dweights_(weights_.shape()), dbias_(bias_.shape()) {
        if (act == Activation::softmax) throw ValueError("conv2d does not support softmax");
    }

    const char* kind() const override { return "conv2d"; }
    int in_channels() const { return in_channels_; }
    int filters() const { return filters_; }
    int kernel_size() const { return ksize_; }
    Activation activation() const { return act_; }
    Tensor<T>& weights() { return weights_; }
    Tensor<T>& bias() { return bias_; }

    Shape output_shape(const Shape& in) const override {
        if (in.rank() != 3) throw ShapeError("conv2d expects [H,W,C] input, got " + in.str());
        if (in[2] != in_channels_) {
            throw ShapeError("conv2d channel mismatch: input has " + std::to_string(in[2]) +
                             ", layer expects " + std::to_string(in_channels_));
        }
        if (in[0] < ksize_ || in[1] < ksize_) {
            throw ShapeError("conv2d input " + in.str() + " smaller than " +
                             std::to_string(ksize_) + "x" + std::to_string(ksize_) + " kernel");
        }
        return Shape{in[0] - ksize_ + 1, in[1] - ksize_ + 1, filters_};
    }

    Tensor<T> infer(const Tensor<T>& x) const override {
        Tensor<T> y = linear(x);
        if (act_ == Activation::relu) {
            for (T& v : y.values()) v = std::max(v, T(0));
        }
        return y;
    }

    Tensor<T> train_forward(const Tensor<T>& x, Rng&) override {
        cache_input_ = x;
        cache_preact_ = linear(x);
        has_cache_ = true;
        if (act_ == Activation::relu) {
            return cache_preact_.map([](T v) { return std::max(v, T(0)); });
        }
        return cache_preact_;
    }

    Tensor<T> backward(const Tensor<T>& upstream) override {
        this->require_cache(has_cache_, "conv2d");
        if (upstream.shape() != cache_preact_.shape()) {
            throw ShapeError("conv2d upstream gradient shape " + upstream.shape().str() +
                             " does not match forward output " + cache_preact_.shape().str());
        }
        const Tensor<T>& x = cache_input_;
        const int64_t n = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
        const int64_t cin = in_channels_, f = filters_, k = ksize_;
        const int64_t oh = h - k + 1, ow = w - k + 1;

        // ReLU gate: gradient is zero wherever the pre-activation was <= 0.
        Tensor<T> g = upstream;
        if (act_ == Activation::relu) {
            const T* pre = cache_preact_.data();
            T* gv = g.data();
            for (int64_t i = 0; i < g.size(); ++i) {
                if (pre[i] <= T(0)) gv[i] = T(0);
            }
        }

        // d(bias): sum over batch and spatial positions.
        {
            T* db = dbias_.data();
            std::fill(db, db + f, T(0));
            const T* gv = g.data();
            for (int64_t i = 0; i < n * oh * ow; ++i) {
                const T* row = gv + i * f;
                for (int64_t j = 0; j < f; ++j) db[j] += row[j];
            }
        }

        // d(weights): each (u,v,c) slot owns a contiguous run of F entries, so
        // the parallel loop writes disjoint memory and sums in a fixed order.
        {
            const T* xv = x.data();
            const T* gv = g.data();
            T* dw = dweights_.data();
#pragma omp parallel for collapse(2) schedule(static)
            for (int64_t u = 0; u < k; ++u) {
                for (int64_t v = 0; v < k; ++v) {
                    for (int64_t c = 0; c < cin; ++c) {
                        T* acc = dw + ((u * k + v) * cin + c) * f;
                        std::fill(acc, acc + f, T(0));
                        for (int64_t b = 0; b < n; ++b) {
                            for (int64_t i = 0; i < oh; ++i) {
                                const T* xrow = xv + ((b * h + i + u) * w + v) * cin + c;
                                const T* grow = gv + (b * oh + i) * ow * f;
                                for (int64_t j = 0; j < ow; ++j) {
                                    const T xval = xrow[j * cin];
                                    const T* gj = grow + j * f;
                                    for (int64_t q = 0; q < f; ++q) acc[q] += xval * gj[q];
                                }
                            }
                        }
                    }
                }
            }
        }

        // d(input): scatter the filter response back through the kernel.
        Tensor<T> dx(x.shape());
        {
            const T* gv = g.data();
            const T* wv = weights_.data();
            T* dxv = dx.data();
#pragma omp parallel for schedule(static)
            for (int64_t b = 0; b < n; ++b) {
                for (int64_t i = 0; i < oh; ++i) {
                    for (int64_t j = 0; j < ow; ++j) {
                        const T* gj = gv + ((b * oh + i) * ow + j) * f;
                        for (int64_t u = 0; u < k; ++u) {
                            for (int64_t v = 0; v < k; ++v) {
                                const T* wrow = wv + (u * k + v) * cin * f;
                                T* dxrow = dxv + ((b * h + i + u) * w + j + v) * cin;
                                for (int64_t c = 0; c < cin; ++c) {
                                    T s = 0;
                                    const T* wf = wrow + c * f;
                                    for (int64_t q = 0; q < f; ++q) s += gj[q] * wf[q];
                                    dxrow[c] += s;
                                }
                            }
                        }
                    }
                }
            }
        }

        has_cache_ = false;
        return dx;
    }

    std::vector<Tensor<T>*> params() override { return {&weights_, &bias_}; }
    std::vector<const Tensor<T>*> params() const override { return {&weights_, &bias_}; }
    std::vector<Tensor<T>*> grads() override { return {&dweights_, &dbias_}; }

    void init_params(Rng& rng) override {
        const double fan_in = double(ksize_) * ksize_ * in_channels_;
        const double fan_out = double(ksize_) * ksize_ * filters_;
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (T& v : weights_.values()) v = static_cast<T>(dist(rng));
        for (T& v : bias_.values()) v = T(0);
    }

private:
    // Valid cross-correlation plus per-filter bias (no activation).
    Tensor<T> linear(const Tensor<T>& x) const {
        if (x.shape().rank() != 4) {
            throw ShapeError("conv2d expects [N,H,W,C] input, got " + x.shape().str());
        }
        output_shape(Shape{x.shape()[1], x.shape()[2], x.shape()[3]});
        const int64_t n = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
        const int64_t cin = in_channels_, f = filters_, k = ksize_;
        const int64_t oh = h - k + 1, ow = w - k + 1;
        Tensor<T> y(Shape{n, oh, ow, f});
        const T* xv = x.data();
        const T* wv = weights_.data();
        const T* bv = bias_.data();
        T* yv = y.data();
#pragma omp parallel for collapse(2) schedule(static)
        for (int64_t b = 0; b < n; ++b) {
            for (int64_t i = 0; i < oh; ++i) {
                std::vector<T> acc(static_cast<size_t>(f));
                for (int64_t j = 0; j < ow; ++j) {
                    std::copy(bv, bv + f, acc.begin());
                    for (int64_t u = 0; u < k; ++u) {
                        for (int64_t v = 0; v < k; ++v) {
                            const T* xrow = xv + ((b * h + i + u) * w + j + v) * cin;
                            const T* wrow = wv + (u * k + v) * cin * f;
                            for (int64_t c = 0; c < cin; ++c) {
                                const T xval = xrow[c];
                                const T* wf = wrow + c * f;
                                for (int64_t q = 0; q < f; ++q) acc[q] += xval * wf[q];
                            }
                        }
                    }
                    std::copy(acc.begin(), acc.end(), yv + ((b * oh + i) * ow + j) * f);
                }
            }
        }
        return y;
    }

    int in_channels_, filters_, ksize_;
    Activation act_;
    Tensor<T> weights_, bias_;
    Tensor<T> dweights_, dbias_;
    Tensor<T> cache_input_, cache_preact_;
    bool has_cache_ = false;
};

// 2x2 max pooling, stride 2. A trailing odd row/column is dropped (floor
// semantics) and receives zero gradient. Ties route the gradient to the first
// maximum in row-major window order.
template <typename T>
class MaxPool2D final : public Layer<T> {
public:
    const char* kind() const override { return "maxpool2d"; }

    Shape output_shape(const Shape& in) const override {
        if (in.rank() != 3) throw ShapeError("maxpool2d expects [H,W,C] input, got " + in.str());
        if (in[0] < 2 || in[1] < 2) {
            throw ShapeError("maxpool2d needs spatial extent >= 2, got " + in.str());
        }
        return Shape{in[0] / 2, in[1] / 2, in[2]};
    }

    Tensor<T> infer(const Tensor<T>& x) const override {
        return pool(x, nullptr);
    }

    Tensor<T> train_forward(const Tensor<T>& x, Rng&) override {
        cache_in_shape_ = x.shape();
        Tensor<T> y = pool(x, &argmax_);
        has_cache_ = true;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& upstream) override {
        this->require_cache(has_cache_, "maxpool2d");
        if (upstream.size() != static_cast<int64_t>(argmax_.size())) {
            throw ShapeError("maxpool2d upstream gradient size does not match pooling record");
        }
        Tensor<T> dx(cache_in_shape_);
        const T* up = upstream.data();
        T* dxv = dx.data();
        for (size_t i = 0; i < argmax_.size(); ++i) dxv[argmax_[i]] += up[i];
        has_cache_ = false;
        return dx;
    }

private:
    Tensor<T> pool(const Tensor<T>& x, std::vector<int64_t>* record) const {
        if (x.shape().rank() != 4) {
            throw ShapeError("maxpool2d expects [N,H,W,C] input, got " + x.shape().str());
        }
        output_shape(Shape{x.shape()[1], x.shape()[2], x.shape()[3]});
        const int64_t n = x.shape()[0], h = x.shape()[1], w = x.shape()[2], c = x.shape()[3];
        const int64_t oh = h / 2, ow = w / 2;
        Tensor<T> y(Shape{n, oh, ow, c});
        if (record) record->resize(static_cast<size_t>(y.size()));
        const T* xv = x.data();
        T* yv = y.data();
#pragma omp parallel for schedule(static)
        for (int64_t b = 0; b < n; ++b) {
            for (int64_t i = 0; i < oh; ++i) {
                for (int64_t j = 0; j < ow; ++j) {
                    for (int64_t q = 0; q < c; ++q) {
                        int64_t best = ((b * h + 2 * i) * w + 2 * j) * c + q;
                        T bestv = xv[best];
                        for (int64_t u = 0; u < 2; ++u) {
                            for (int64_t v = 0; v < 2; ++v) {
                                const int64_t idx = ((b * h + 2 * i + u) * w + 2 * j + v) * c + q;
                                if (xv[idx] > bestv) {  // strict: first max wins
                                    bestv = xv[idx];
                                    best = idx;
                                }
                            }
                        }
                        const int64_t out = ((b * oh + i) * ow + j) * c + q;
                        yv[out] = bestv;
                        if (record) (*record)[static_cast<size_t>(out)] = best;
                    }
                }
            }
        }
        return y;
    }

    Shape cache_in_shape_;
    std::vector<int64_t> argmax_;
    bool has_cache_ = false;
};

// [N,H,W,C] -> [N,H*W*C]; pure reshape under row-major layout.
template <typename T>
class Flatten final : public Layer<T> {
public:
    const char* kind() const override { return "flatten"; }

    Shape output_shape(const Shape& in) const override {
        return Shape{in.count()};
    }

    Tensor<T> infer(const Tensor<T>& x) const override {
        return x.reshape(flat_shape(x.shape()));
    }

    Tensor<T> train_forward(const Tensor<T>& x, Rng&) override {
        cache_in_shape_ = x.shape();
        has_cache_ = true;
        return x.reshape(flat_shape(x.shape()));
    }

    Tensor<T> backward(const Tensor<T>& upstream) override {
        this->require_cache(has_cache_, "flatten");
        has_cache_ = false;
        return upstream.reshape(cache_in_shape_);
    }

private:
    static Shape flat_shape(const Shape& in) {
        if (in.rank() < 2) throw ShapeError("flatten expects batched input, got " + in.str());
        int64_t per_sample = 1;
        for (int d = 1; d < in.rank(); ++d) per_sample *= in[d];
        return Shape{in[0], per_sample};
    }

    Shape cache_in_shape_;
    bool has_cache_ = false;
};

// Fully connected layer. Weights [in,units], bias [units].
// With softmax activation the backward pass expects the upstream gradient to
// be taken w.r.t. the logits (fused softmax/cross-entropy path).
template <typename T>
class Dense final : public Layer<T> {
public:
    Dense(int in_features, int units, Activation act)
        : in_features_(in_features), units_(units), act_(act),
          weights_(Shape{in_features, units}), bias_(Shape{units}),
          dweights_(weights_.shape()), dbias_(bias_.shape()) {}

    const char* kind() const override { return "dense"; }
    int in_features() const { return in_features_; }
    int units() const { return units_; }
    Activation activation() const { return act_; }
    Tensor<T>& weights() { return weights_; }
    Tensor<T>& bias() { return bias_; }

    Shape output_shape(const Shape& in) const override {
        if (in.rank() != 1) throw ShapeError("dense expects flat [F] input, got " + in.str());
        if (in[0] != in_features_) {
            throw ShapeError("dense feature mismatch: input has " + std::to_string(in[0]) +
                             ", layer expects " + std::to_string(in_features_));
        }
        return Shape{units_};
    }

    // Pre-activation logits; exposed so the model can serve the fused loss.
    Tensor<T> linear(const Tensor<T>& x) const {
        if (x.shape().rank() != 2 || x.shape()[1] != in_features_) {
            throw ShapeError("dense expects [N," + std::to_string(in_features_) +
                             "] input, got " + x.shape().str());
        }
        const int64_t n = x.shape()[0], fin = in_features_, u = units_;
        Tensor<T> y(Shape{n, u});
        const T* xv = x.data();
        const T* wv = weights_.data();
        const T* bv = bias_.data();
        T* yv = y.data();
#pragma omp parallel for schedule(static)
        for (int64_t b = 0; b < n; ++b) {
            T* row = yv + b * u;
            std::copy(bv, bv + u, row);
            const T* xrow = xv + b * fin;
            for (int64_t i = 0; i < fin; ++i) {
                const T xval = xrow[i];
                const T* wrow = wv + i * u;
                for (int64_t j = 0; j < u; ++j) row[j] += xval * wrow[j];
            }
        }
        return y;
    }

    Tensor<T> infer(const Tensor<T>& x) const override {
        Tensor<T> y = linear(x);
        if (act_ == Activation::relu) {
            for (T& v : y.values()) v = std::max(v, T(0));
        } else if (act_ == Activation::softmax) {
            y = softmax(y);
        }
        return y;
    }

    Tensor<T> train_forward(const Tensor<T>& x, Rng&) override {
        cache_input_ = x;
        cache_preact_ = linear(x);
        has_cache_ = true;
        if (act_ == Activation::relu) {
            return cache_preact_.map([](T v) { return std::max(v, T(0)); });
        }
        if (act_ == Activation::softmax) return softmax(cache_preact_);
        return cache_preact_;
    }

    // Pre-activation from the most recent train_forward. The fused
    // cross-entropy path reads the output layer's logits through this.
    const Tensor<T>& cached_preactivation() const {
        this->require_cache(has_cache_, "dense");
        return cache_preact_;
    }

    Tensor<T> backward(const Tensor<T>& upstream) override {
        this->require_cache(has_cache_, "dense");
        if (upstream.shape() != cache_preact_.shape()) {
            throw ShapeError("dense upstream gradient shape " + upstream.shape().str() +
                             " does not match forward output " + cache_preact_.shape().str());
        }
        const Tensor<T>& x = cache_input_;
        const int64_t n = x.shape()[0], fin = in_features_, u = units_;

        // softmax passes through: upstream is already d(loss)/d(logits)
        Tensor<T> g = upstream;
        if (act_ == Activation::relu) {
            const T* pre = cache_preact_.data();
            T* gv = g.data();
            for (int64_t i = 0; i < g.size(); ++i) {
                if (pre[i] <= T(0)) gv[i] = T(0);
            }
        }

        {
            T* db = dbias_.data();
            std::fill(db, db + u, T(0));
            const T* gv = g.data();
            for (int64_t b = 0; b < n; ++b) {
                const T* row = gv + b * u;
                for (int64_t j = 0; j < u; ++j) db[j] += row[j];
            }
        }
        {
            const T* xv = x.data();
            const T* gv = g.data();
            T* dw = dweights_.data();
#pragma omp parallel for schedule(static)
            for (int64_t i = 0; i < fin; ++i) {
                T* acc = dw + i * u;
                std::fill(acc, acc + u, T(0));
                for (int64_t b = 0; b < n; ++b) {
                    const T xval = xv[b * fin + i];
                    const T* grow = gv + b * u;
                    for (int64_t j = 0; j < u; ++j) acc[j] += xval * grow[j];
                }
            }
        }
        Tensor<T> dx(x.shape());
        {
            const T* gv = g.data();
            const T* wv = weights_.data();
            T* dxv = dx.data();
#pragma omp parallel for schedule(static)
            for (int64_t b = 0; b < n; ++b) {
                const T* grow = gv + b * u;
                T* dxrow = dxv + b * fin;
                for (int64_t i = 0; i < fin; ++i) {
                    const T* wrow = wv + i * u;
                    T s = 0;
                    for (int64_t j = 0; j < u; ++j) s += grow[j] * wrow[j];
                    dxrow[i] = s;
                }
            }
        }
        has_cache_ = false;
        return dx;
    }

    std::vector<Tensor<T>*> params() override { return {&weights_, &bias_}; }
    std::vector<const Tensor<T>*> params() const override { return {&weights_, &bias_}; }
    std::vector<Tensor<T>*> grads() override { return {&dweights_, &dbias_}; }

    void init_params(Rng& rng) override {
        const double limit = std::sqrt(6.0 / (double(in_features_) + double(units_)));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (T& v : weights_.values()) v = static_cast<T>(dist(rng));
        for (T& v : bias_.values()) v = T(0);
    }

private:
    int in_features_, units_;
    Activation act_;
    Tensor<T> weights_, bias_;
    Tensor<T> dweights_, dbias_;
    Tensor<T> cache_input_, cache_preact_;
    bool has_cache_ = false;
};

// Inverted dropout: training scales survivors by 1/(1-rate) so inference is
// the exact identity.
template <typename T>
class Dropout final : public Layer<T> {
public:
    explicit Dropout(double rate) : rate_(rate) {
        if (rate < 0.0 || rate >= 1.0) {
            throw ValueError("dropout rate must be in [0,1), got " + std::to_string(rate));
        }
    }

    const char* kind() const override { return "dropout"; }
    double rate() const { return rate_; }

    Shape output_shape(const Shape& in) const override { return in; }

    Tensor<T> infer(const Tensor<T>& x) const override { return x; }

    Tensor<T> train_forward(const Tensor<T>& x, Rng& rng) override {
        has_cache_ = true;
        if (rate_ == 0.0) {
            mask_.assign(static_cast<size_t>(x.size()), 1);
            scale_ = T(1);
            return x;
        }
        scale_ = static_cast<T>(1.0 / (1.0 - rate_));
        mask_.resize(static_cast<size_t>(x.size()));
        std::bernoulli_distribution keep(1.0 - rate_);
        Tensor<T> y(x.shape());
        const T* xv = x.data();
        T* yv = y.data();
        for (int64_t i = 0; i < x.size(); ++i) {
            const uint8_t m = keep(rng) ? 1 : 0;
            mask_[static_cast<size_t>(i)] = m;
            yv[i] = m ? xv[i] * scale_ : T(0);
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& upstream) override {
        this->require_cache(has_cache_, "dropout");
        if (upstream.size() != static_cast<int64_t>(mask_.size())) {
            throw ShapeError("dropout upstream gradient size does not match mask");
        }
        Tensor<T> dx(upstream.shape());
        const T* up = upstream.data();
        T* dxv = dx.data();
        for (int64_t i = 0; i < dx.size(); ++i) {
            dxv[i] = mask_[static_cast<size_t>(i)] ? up[i] * scale_ : T(0);
        }
        has_cache_ = false;
        return dx;
    }

private:
    double rate_;
    T scale_ = T(1);
    std::vector<uint8_t> mask_;
    bool has_cache_ = false;
};

} // namespace slnet
