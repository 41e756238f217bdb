#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "slnet/data.hpp"
#include "slnet/model.hpp"

namespace slnet {

// Mean sparse categorical cross-entropy from logits (fused log-softmax) and
// its gradient w.r.t. the logits: (softmax(z) - onehot) / N.
template <typename T>
std::pair<T, Tensor<T>> sparse_ce_from_logits(const Tensor<T>& logits, std::span<const int> labels) {
    if (logits.shape().rank() != 2) {
        throw ShapeError("sparse_ce expects [N,K] logits, got " + logits.shape().str());
    }
    const int64_t n = logits.shape()[0], k = logits.shape()[1];
    if (static_cast<int64_t>(labels.size()) != n) {
        throw ValueError("sparse_ce: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(n) + " rows");
    }
    for (int64_t i = 0; i < n; ++i) {
        if (labels[static_cast<size_t>(i)] < 0 || labels[static_cast<size_t>(i)] >= k) {
            throw ValueError("sparse_ce: label " + std::to_string(labels[static_cast<size_t>(i)]) +
                             " at index " + std::to_string(i) + " outside 0.." + std::to_string(k - 1));
        }
    }
    const Tensor<T> logp = log_softmax(logits);
    T loss = 0;
    for (int64_t i = 0; i < n; ++i) loss -= logp.data()[i * k + labels[static_cast<size_t>(i)]];
    loss /= static_cast<T>(n);

    Tensor<T> grad(logits.shape());
    const T inv_n = T(1) / static_cast<T>(n);
    for (int64_t i = 0; i < n; ++i) {
        const T* lp = logp.data() + i * k;
        T* g = grad.data() + i * k;
        for (int64_t c = 0; c < k; ++c) g[c] = std::exp(lp[c]) * inv_n;
        g[labels[static_cast<size_t>(i)]] -= inv_n;
    }
    return {loss, std::move(grad)};
}

// Same contract stated over probability rows: loss = -(1/N) sum log p[i,y_i],
// gradient w.r.t. logits = (p - onehot)/N.
template <typename T>
std::pair<T, Tensor<T>> sparse_ce_loss(const Tensor<T>& probabilities, std::span<const int> labels) {
    if (probabilities.shape().rank() != 2) {
        throw ShapeError("sparse_ce expects [N,K] probabilities, got " +
                         probabilities.shape().str());
    }
    const int64_t n = probabilities.shape()[0], k = probabilities.shape()[1];
    if (static_cast<int64_t>(labels.size()) != n) {
        throw ValueError("sparse_ce: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(n) + " rows");
    }
    T loss = 0;
    Tensor<T> grad(probabilities.shape());
    const T inv_n = T(1) / static_cast<T>(n);
    for (int64_t i = 0; i < n; ++i) {
        const int y = labels[static_cast<size_t>(i)];
        if (y < 0 || y >= k) {
            throw ValueError("sparse_ce: label " + std::to_string(y) + " at index " +
                             std::to_string(i) + " outside 0.." + std::to_string(k - 1));
        }
        const T* p = probabilities.data() + i * k;
        T* g = grad.data() + i * k;
        loss -= std::log(std::max(p[y], std::numeric_limits<T>::min()));
        for (int64_t c = 0; c < k; ++c) g[c] = p[c] * inv_n;
        g[y] -= inv_n;
    }
    return {loss * inv_n, std::move(grad)};
}

template <typename T>
struct AdamConfig {
    T alpha = T(0.001);
    T beta1 = T(0.9);
    T beta2 = T(0.999);
    T eps = T(1e-7);
};

// Adam with bias correction. Keeps one first- and one second-moment tensor
// per parameter tensor, shapes mirrored.
template <typename T>
class Adam {
public:
    explicit Adam(const std::vector<Tensor<T>*>& params, AdamConfig<T> cfg = {}) : cfg_(cfg) {
        for (const Tensor<T>* p : params) {
            m_.emplace_back(p->shape());
            v_.emplace_back(p->shape());
        }
    }

    void step(const std::vector<Tensor<T>*>& params, const std::vector<Tensor<T>*>& grads) {
        if (params.size() != m_.size() || grads.size() != m_.size()) {
            throw ValueError("adam: parameter/gradient list size mismatch");
        }
        ++t_;
        const T bc1 = T(1) - std::pow(cfg_.beta1, static_cast<T>(t_));
        const T bc2 = T(1) - std::pow(cfg_.beta2, static_cast<T>(t_));
        for (size_t i = 0; i < params.size(); ++i) {
            Tensor<T>& p = *params[i];
            const Tensor<T>& g = *grads[i];
            if (p.shape() != g.shape() || p.shape() != m_[i].shape()) {
                throw ShapeError("adam: tensor " + std::to_string(i) + " shape mismatch (param " +
                                 p.shape().str() + ", grad " + g.shape().str() + ")");
            }
            T* pv = p.data();
            const T* gv = g.data();
            T* mv = m_[i].data();
            T* vv = v_[i].data();
            const int64_t count = p.size();
#pragma omp parallel for schedule(static)
            for (int64_t j = 0; j < count; ++j) {
                mv[j] = cfg_.beta1 * mv[j] + (T(1) - cfg_.beta1) * gv[j];
                vv[j] = cfg_.beta2 * vv[j] + (T(1) - cfg_.beta2) * gv[j] * gv[j];
                const T mhat = mv[j] / bc1;
                const T vhat = vv[j] / bc2;
                pv[j] -= cfg_.alpha * mhat / (std::sqrt(vhat) + cfg_.eps);
            }
        }
    }

    int64_t step_count() const { return t_; }

    // Optimizer state entries (two moment tensors per parameter).
    int64_t state_count() const {
        int64_t n = 0;
        for (const auto& m : m_) n += m.size();
        return 2 * n;
    }

    const AdamConfig<T>& config() const { return cfg_; }

private:
    AdamConfig<T> cfg_;
    int64_t t_ = 0;
    std::vector<Tensor<T>> m_, v_;
};

// Trainable parameters, optionally including attached optimizer state.
template <typename T>
int64_t count_parameters(const SequentialModel<T>& model, bool include_optimizer_state,
                         const Adam<T>* optimizer = nullptr) {
    const int64_t trainable = model.trainable_parameter_count();
    if (!include_optimizer_state) return trainable;
    if (!optimizer) throw ValueError("count_parameters: no optimizer attached");
    return trainable + optimizer->state_count();
}

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_loss = 0, train_acc = 0;
    double val_loss = 0, val_acc = 0;
};

struct TrainConfig {
    int max_epochs = 30;
    int batch_size = 64;
    double val_fraction = 0.2;
    int patience = 5;
    uint64_t seed = 42;
    AdamConfig<float> adam{};
    // called after each epoch with the record and the live model
    std::function<void(const EpochRecord&, const SequentialModel<float>&)> on_epoch;
};

struct TrainingHistory {
    std::vector<EpochRecord> records;
    int best_epoch = 0;  // 1-based; 0 when no epoch ran
    bool stopped_early = false;
};

// Tracks the monitored quantity with strict-improvement semantics
// (min_delta = 0) and first-minimum tie-breaking.
class EarlyStopper {
public:
    explicit EarlyStopper(int patience) : patience_(patience) {
        if (patience < 1) throw ValueError("patience must be >= 1");
    }

    struct Decision {
        bool improved = false;
        bool stop = false;
    };

    Decision update(double val_loss) {
        ++epoch_;
        Decision d;
        if (val_loss < best_) {
            best_ = val_loss;
            best_epoch_ = epoch_;
            since_best_ = 0;
            d.improved = true;
        } else {
            ++since_best_;
        }
        d.stop = since_best_ >= patience_;
        return d;
    }

    int best_epoch() const { return best_epoch_; }
    double best_loss() const { return best_; }

private:
    int patience_;
    int epoch_ = 0;
    int best_epoch_ = 0;
    int since_best_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

// Seeded shuffle, then the last ceil(fraction*N) rows become validation.
// The two parts are disjoint and exhaustive.
std::pair<Dataset, Dataset> split_train_val(const Dataset& data, double fraction, uint64_t seed);

// Mean loss and accuracy of an inference pass over a dataset.
inline std::pair<double, double> eval_loss_acc(const SequentialModel<float>& model,
                                               const Dataset& data, int batch_size = 256) {
    double loss_sum = 0;
    int64_t correct = 0;
    const int64_t n = data.size();
    for (int64_t start = 0; start < n; start += batch_size) {
        const int64_t count = std::min<int64_t>(batch_size, n - start);
        std::vector<int64_t> idx(static_cast<size_t>(count));
        std::iota(idx.begin(), idx.end(), start);
        const Dataset batch = data.subset(idx);
        const Tensor<float> logits = model.forward_logits(batch.images);
        const Tensor<float> logp = log_softmax(logits);
        const int64_t k = logits.shape()[1];
        for (int64_t i = 0; i < count; ++i) {
            const int y = batch.labels[static_cast<size_t>(i)];
            const float* row = logp.data() + i * k;
            loss_sum -= row[y];
            int64_t arg = 0;
            for (int64_t c = 1; c < k; ++c) {
                if (row[c] > row[arg]) arg = c;
            }
            if (arg == y) ++correct;
        }
    }
    return {loss_sum / static_cast<double>(n), static_cast<double>(correct) / static_cast<double>(n)};
}

// The full training loop: seeded validation split, per-epoch seeded shuffle,
// mini-batches (final partial batch kept), Adam updates, early stopping on
// validation loss, best-weight restoration. Leaves the model in inference
// mode with the best epoch's weights.
TrainingHistory train(SequentialModel<float>& model, const Dataset& data, const TrainConfig& cfg);

} // namespace slnet
