#pragma once

#include <array>
#include <memory>
#include <vector>

#include "slnet/layers.hpp"

namespace slnet {

// Ordered layer stack. A model in inference mode is immutable under forward()
// and safe to share across threads; training mode keeps per-layer caches and
// requires exclusive access.
template <typename T>
class SequentialModel {
public:
    SequentialModel() = default;
    explicit SequentialModel(Shape input_shape) : input_shape_(std::move(input_shape)) {
        current_ = input_shape_;
    }

    void add(std::unique_ptr<Layer<T>> layer) {
        current_ = layer->output_shape(current_);  // throws if shapes do not compose
        layers_.push_back(std::move(layer));
    }

    int layer_count() const { return static_cast<int>(layers_.size()); }
    Layer<T>& layer(int i) { return *layers_[static_cast<size_t>(i)]; }
    const Layer<T>& layer(int i) const { return *layers_[static_cast<size_t>(i)]; }
    const Shape& input_shape() const { return input_shape_; }
    const Shape& output_shape() const { return current_; }

    bool is_training() const { return training_; }
    void set_training(bool on) { training_ = on; }

    // Inference pass; returns class probabilities (softmax applied).
    Tensor<T> forward(const Tensor<T>& batch) const {
        check_batch(batch);
        Tensor<T> x = batch;
        for (const auto& l : layers_) x = l->infer(x);
        return x;
    }

    // Inference pass up to the final pre-softmax logits.
    Tensor<T> forward_logits(const Tensor<T>& batch) const {
        check_batch(batch);
        const Dense<T>* last = output_dense();
        Tensor<T> x = batch;
        for (size_t i = 0; i + 1 < layers_.size(); ++i) x = layers_[i]->infer(x);
        return last->linear(x);
    }

    // Training pass: caches every layer, returns probabilities. The output
    // layer's logits stay available through cached_logits() for the loss.
    Tensor<T> train_forward(const Tensor<T>& batch, Rng& rng) {
        if (!training_) throw Error("train_forward requires training mode");
        check_batch(batch);
        Tensor<T> x = batch;
        for (auto& l : layers_) x = l->train_forward(x, rng);
        can_backward_ = true;
        return x;
    }

    // Logits from the most recent train_forward (fused-loss input).
    const Tensor<T>& cached_logits() const {
        if (!can_backward_) throw Error("no cached logits: call train_forward first");
        return output_dense()->cached_preactivation();
    }

    // Backpropagate from d(loss)/d(logits) through the whole stack.
    void backward(const Tensor<T>& logit_grad) {
        if (!can_backward_) throw Error("backward without a cached forward pass");
        Tensor<T> g = logit_grad;
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
        can_backward_ = false;
    }

    std::vector<Tensor<T>*> params() {
        std::vector<Tensor<T>*> out;
        for (auto& l : layers_)
            for (Tensor<T>* p : l->params()) out.push_back(p);
        return out;
    }
    std::vector<const Tensor<T>*> params() const {
        std::vector<const Tensor<T>*> out;
        for (const auto& l : layers_)
            for (const Tensor<T>* p : l->params()) out.push_back(p);
        return out;
    }
    std::vector<Tensor<T>*> grads() {
        std::vector<Tensor<T>*> out;
        for (auto& l : layers_)
            for (Tensor<T>* g : l->grads()) out.push_back(g);
        return out;
    }

    int64_t trainable_parameter_count() const {
        int64_t n = 0;
        for (const auto& l : layers_) n += l->param_count();
        return n;
    }

    std::vector<int64_t> per_layer_parameter_counts() const {
        std::vector<int64_t> out;
        for (const auto& l : layers_) out.push_back(l->param_count());
        return out;
    }

    std::vector<Tensor<T>> snapshot_params() const {
        std::vector<Tensor<T>> out;
        for (const Tensor<T>* p : params()) out.push_back(*p);
        return out;
    }

    void restore_params(const std::vector<Tensor<T>>& snapshot) {
        auto ps = params();
        if (snapshot.size() != ps.size()) throw ValueError("snapshot/model parameter count mismatch");
        for (size_t i = 0; i < ps.size(); ++i) {
            if (ps[i]->shape() != snapshot[i].shape()) {
                throw ShapeError("snapshot tensor " + std::to_string(i) + " has shape " +
                                 snapshot[i].shape().str() + ", expected " + ps[i]->shape().str());
            }
            *ps[i] = snapshot[i];
        }
    }

private:
    void check_batch(const Tensor<T>& batch) const {
        const Shape& s = batch.shape();
        bool ok = s.rank() == input_shape_.rank() + 1;
        for (int d = 0; ok && d < input_shape_.rank(); ++d) ok = s[d + 1] == input_shape_[d];
        if (!ok) {
            throw ShapeError("model expects [N," + input_shape_.str().substr(1) + " input, got " +
                             s.str());
        }
    }

    const Dense<T>* output_dense() const {
        if (layers_.empty()) throw Error("model has no layers");
        const auto* last = dynamic_cast<const Dense<T>*>(layers_.back().get());
        if (!last || last->activation() != Activation::softmax) {
            throw Error("model requires a softmax dense output layer");
        }
        return last;
    }

    Shape input_shape_;
    Shape current_;
    std::vector<std::unique_ptr<Layer<T>>> layers_;
    bool training_ = false;
    bool can_backward_ = false;
};

// Hyperparameters of the canonical classifier. The topology is fixed
// (conv/pool/conv/pool/conv/flatten/dense/dropout/dense); only the widths,
// dropout rate and class count are tunable.
struct ModelConfig {
    std::array<int, 3> conv_filters{32, 64, 128};
    int kernel_size = 3;
    int dense_units = 256;
    double dropout_rate = 0.5;
    int num_classes = 24;
    Shape input_shape{28, 28, 1};
};

// Builds the classifier stack with Glorot-uniform kernels and zero biases.
template <typename T>
SequentialModel<T> build_model(const ModelConfig& cfg = {}, uint64_t seed = 0) {
    SequentialModel<T> m(cfg.input_shape);
    auto channels = [&m]() { return static_cast<int>(m.output_shape()[2]); };

    m.add(std::make_unique<Conv2D<T>>(channels(), cfg.conv_filters[0], cfg.kernel_size, Activation::relu));
    m.add(std::make_unique<MaxPool2D<T>>());
    m.add(std::make_unique<Conv2D<T>>(channels(), cfg.conv_filters[1], cfg.kernel_size, Activation::relu));
    m.add(std::make_unique<MaxPool2D<T>>());
    m.add(std::make_unique<Conv2D<T>>(channels(), cfg.conv_filters[2], cfg.kernel_size, Activation::relu));
    m.add(std::make_unique<Flatten<T>>());
    m.add(std::make_unique<Dense<T>>(static_cast<int>(m.output_shape()[0]), cfg.dense_units,
                                     Activation::relu));
    m.add(std::make_unique<Dropout<T>>(cfg.dropout_rate));
    m.add(std::make_unique<Dense<T>>(cfg.dense_units, cfg.num_classes, Activation::softmax));

    Rng rng(seed);
    for (int i = 0; i < m.layer_count(); ++i) m.layer(i).init_params(rng);
    return m;
}

} // namespace slnet
