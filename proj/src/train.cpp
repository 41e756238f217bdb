#include "slnet/train.hpp"

#include <random>

namespace slnet {

std::pair<Dataset, Dataset> split_train_val(const Dataset& data, double fraction, uint64_t seed) {
    const int64_t n = data.size();
    if (n == 0) throw ValueError("split_train_val: empty dataset");
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ValueError("split_train_val: fraction must be in (0,1), got " + std::to_string(fraction));
    }
    // ceil with a nudge so exact products (0.2 * 27455 = 5491) stay exact
    const int64_t n_val = static_cast<int64_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    if (n_val < 1 || n_val >= n) {
        throw ValueError("split_train_val: fraction " + std::to_string(fraction) + " on " +
                         std::to_string(n) + " rows yields an empty partition");
    }
    std::vector<int64_t> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::span<const int64_t> all(idx);
    return {data.subset(all.first(static_cast<size_t>(n - n_val))),
            data.subset(all.last(static_cast<size_t>(n_val)))};
}

namespace {

int64_t count_correct(const Tensor<float>& probs, std::span<const int> labels) {
    const int64_t n = probs.shape()[0], k = probs.shape()[1];
    int64_t correct = 0;
    for (int64_t i = 0; i < n; ++i) {
        const float* row = probs.data() + i * k;
        int64_t arg = 0;
        for (int64_t c = 1; c < k; ++c) {
            if (row[c] > row[arg]) arg = c;
        }
        if (arg == labels[static_cast<size_t>(i)]) ++correct;
    }
    return correct;
}

} // namespace

TrainingHistory train(SequentialModel<float>& model, const Dataset& data, const TrainConfig& cfg) {
    if (cfg.batch_size < 1) throw ValueError("train: batch_size must be >= 1");
    if (cfg.max_epochs < 0) throw ValueError("train: max_epochs must be >= 0");

    TrainingHistory history;
    if (cfg.max_epochs == 0) {
        model.set_training(false);
        return history;
    }

    auto [train_set, val_set] = split_train_val(data, cfg.val_fraction, cfg.seed);

    model.set_training(true);
    Adam<float> optimizer(model.params(), cfg.adam);
    EarlyStopper stopper(cfg.patience);
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);  // shuffle/dropout stream, distinct from the split
    std::vector<Tensor<float>> best_params;

    const int64_t n_train = train_set.size();
    std::vector<int64_t> order(static_cast<size_t>(n_train));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0;
        int64_t correct = 0;
        int batch_index = 0;
        for (int64_t start = 0; start < n_train; start += cfg.batch_size, ++batch_index) {
            const int64_t count = std::min<int64_t>(cfg.batch_size, n_train - start);
            const Dataset batch = train_set.subset(
                std::span<const int64_t>(order).subspan(static_cast<size_t>(start),
                                                        static_cast<size_t>(count)));
            Tensor<float> probs;
            float loss = 0;
            Tensor<float> logit_grad;
            try {
                probs = model.train_forward(batch.images, rng);
                std::tie(loss, logit_grad) =
                    sparse_ce_from_logits(model.cached_logits(), batch.labels);
            } catch (const NumericError& e) {
                throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_index) + " (" + e.what() + ")");
            }
            if (!std::isfinite(loss)) {
                throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_index));
            }
            model.backward(logit_grad);
            optimizer.step(model.params(), model.grads());
            loss_sum += static_cast<double>(loss) * static_cast<double>(count);
            correct += count_correct(probs, batch.labels);
        }

        model.set_training(false);
        const auto [val_loss, val_acc] = eval_loss_acc(model, val_set);
        model.set_training(true);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(n_train);
        rec.train_acc = static_cast<double>(correct) / static_cast<double>(n_train);
        rec.val_loss = val_loss;
        rec.val_acc = val_acc;
        history.records.push_back(rec);

        const auto decision = stopper.update(val_loss);
        if (decision.improved) best_params = model.snapshot_params();
        if (cfg.on_epoch) cfg.on_epoch(rec, model);
        if (decision.stop) {
            history.stopped_early = true;
            break;
        }
    }

    if (!best_params.empty()) model.restore_params(best_params);
    history.best_epoch = stopper.best_epoch();
    model.set_training(false);
    return history;
}

} // namespace slnet
