#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "slnet/train.hpp"

namespace slnet {

// K x K counts; rows index the true class, columns the predicted class.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int num_classes = 24)
        : k_(num_classes), counts_(static_cast<size_t>(num_classes) * num_classes, 0) {
        if (num_classes < 1) throw ValueError("confusion matrix needs >= 1 class");
    }

    int classes() const { return k_; }
    int64_t& at(int truth, int pred) { return counts_[index(truth, pred)]; }
    int64_t at(int truth, int pred) const { return counts_[index(truth, pred)]; }

    int64_t total() const {
        int64_t n = 0;
        for (int64_t c : counts_) n += c;
        return n;
    }

    int64_t trace() const {
        int64_t n = 0;
        for (int i = 0; i < k_; ++i) n += at(i, i);
        return n;
    }

    int64_t row_sum(int truth) const {
        int64_t n = 0;
        for (int p = 0; p < k_; ++p) n += at(truth, p);
        return n;
    }

    int64_t col_sum(int pred) const {
        int64_t n = 0;
        for (int t = 0; t < k_; ++t) n += at(t, pred);
        return n;
    }

private:
    size_t index(int truth, int pred) const {
        if (truth < 0 || truth >= k_ || pred < 0 || pred >= k_) {
            throw ValueError("confusion matrix index (" + std::to_string(truth) + "," +
                             std::to_string(pred) + ") outside 0.." + std::to_string(k_ - 1));
        }
        return static_cast<size_t>(truth) * k_ + pred;
    }

    int k_;
    std::vector<int64_t> counts_;
};

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels,
                          int num_classes = 24);

struct ClassScores {
    double precision = 0, recall = 0, f1 = 0;
    int64_t support = 0;
};

struct MacroScores {
    double precision = 0, recall = 0, f1 = 0;
    int classes_included = 0;  // classes with nonzero support
};

// Per class: precision TP/(TP+FP), recall TP/(TP+FN), F1 harmonic mean; a
// zero denominator scores 0 for that metric.
std::vector<ClassScores> per_class_scores(const ConfusionMatrix& cm);

// Unweighted mean over classes with nonzero support; unpopulated classes are
// excluded from the average.
MacroScores macro_scores(const ConfusionMatrix& cm);

struct EvalReport {
    double accuracy = 0;
    double mean_loss = 0;
    ConfusionMatrix confusion{24};
    std::vector<ClassScores> per_class;
    MacroScores macro;
};

// Deterministic whole-dataset evaluation: argmax predictions, mean sparse
// cross-entropy, confusion-derived scores. Requires inference mode.
EvalReport evaluate(const SequentialModel<float>& model, const Dataset& data, int batch_size = 256);

// --- training-history file (format documented in the README) ---------------
//
//   # slnet-history v1
//   epoch<TAB>train_loss<TAB>train_acc<TAB>val_loss<TAB>val_acc
//   1<TAB>...
void export_history(const TrainingHistory& history, const std::filesystem::path& path);
TrainingHistory load_history(const std::filesystem::path& path);

// Two-panel SVG (accuracy, loss) with train/validation series. Each polyline
// carries data-series and data-final attributes for machine checking.
std::string render_history_svg(const TrainingHistory& history);

} // namespace slnet
