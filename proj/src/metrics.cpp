#include "slnet/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "slnet/fs.hpp"

namespace slnet {

namespace fs = std::filesystem;

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels,
                          int num_classes) {
    if (predictions.size() != labels.size()) {
        throw ValueError("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                         std::to_string(labels.size()) + " labels");
    }
    ConfusionMatrix cm(num_classes);
    for (size_t i = 0; i < labels.size(); ++i) cm.at(labels[i], predictions[i]) += 1;
    return cm;
}

std::vector<ClassScores> per_class_scores(const ConfusionMatrix& cm) {
    std::vector<ClassScores> out(static_cast<size_t>(cm.classes()));
    for (int c = 0; c < cm.classes(); ++c) {
        ClassScores& s = out[static_cast<size_t>(c)];
        const int64_t tp = cm.at(c, c);
        const int64_t tp_fp = cm.col_sum(c);
        const int64_t tp_fn = cm.row_sum(c);
        s.support = tp_fn;
        s.precision = tp_fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp_fp) : 0.0;
        s.recall = tp_fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp_fn) : 0.0;
        s.f1 = (s.precision + s.recall) > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall)
                                            : 0.0;
    }
    return out;
}

MacroScores macro_scores(const ConfusionMatrix& cm) {
    const std::vector<ClassScores> scores = per_class_scores(cm);
    MacroScores m;
    for (const ClassScores& s : scores) {
        if (s.support == 0) continue;  // class absent from the test set
        m.precision += s.precision;
        m.recall += s.recall;
        m.f1 += s.f1;
        ++m.classes_included;
    }
    if (m.classes_included > 0) {
        m.precision /= m.classes_included;
        m.recall /= m.classes_included;
        m.f1 /= m.classes_included;
    }
    return m;
}

EvalReport evaluate(const SequentialModel<float>& model, const Dataset& data, int batch_size) {
    if (data.size() == 0) throw ValueError("evaluate: empty dataset");
    if (model.is_training()) throw ValueError("evaluate: model must be in inference mode");
    if (batch_size < 1) throw ValueError("evaluate: batch_size must be >= 1");

    const int64_t n = data.size();
    const int k = static_cast<int>(model.output_shape()[0]);
    std::vector<int> predictions(static_cast<size_t>(n));
    double loss_sum = 0;

    for (int64_t start = 0; start < n; start += batch_size) {
        const int64_t count = std::min<int64_t>(batch_size, n - start);
        std::vector<int64_t> idx(static_cast<size_t>(count));
        std::iota(idx.begin(), idx.end(), start);
        const Dataset batch = data.subset(idx);
        const Tensor<float> logp = log_softmax(model.forward_logits(batch.images));
        for (int64_t i = 0; i < count; ++i) {
            const float* row = logp.data() + i * k;
            const int y = batch.labels[static_cast<size_t>(i)];
            if (y < 0 || y >= k) {
                throw ValueError("evaluate: label " + std::to_string(y) + " outside 0.." +
                                 std::to_string(k - 1));
            }
            loss_sum -= row[y];
            int arg = 0;
            for (int c = 1; c < k; ++c) {
                if (row[c] > row[arg]) arg = c;
            }
            predictions[static_cast<size_t>(start + i)] = arg;
        }
    }

    EvalReport report;
    report.confusion = confusion(predictions, data.labels, k);
    report.accuracy =
        static_cast<double>(report.confusion.trace()) / static_cast<double>(report.confusion.total());
    report.mean_loss = loss_sum / static_cast<double>(n);
    report.per_class = per_class_scores(report.confusion);
    report.macro = macro_scores(report.confusion);
    return report;
}

namespace {
constexpr const char* kHistoryMagic = "# slnet-history v1";
constexpr const char* kHistoryHeader = "epoch\ttrain_loss\ttrain_acc\tval_loss\tval_acc";
} // namespace

void export_history(const TrainingHistory& history, const fs::path& path) {
    if (history.records.empty()) throw ValueError("export_history: empty history");
    std::ostringstream out;
    out << kHistoryMagic << '\n' << kHistoryHeader << '\n';
    char buf[160];
    for (const EpochRecord& r : history.records) {
        std::snprintf(buf, sizeof buf, "%d\t%.6f\t%.6f\t%.6f\t%.6f\n", r.epoch, r.train_loss,
                      r.train_acc, r.val_loss, r.val_acc);
        out << buf;
    }
    atomic_write_file(path, out.str());
}

TrainingHistory load_history(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open history file: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kHistoryMagic) {
        throw FormatError("history file: missing '" + std::string(kHistoryMagic) + "' first line");
    }
    if (!std::getline(in, line) || line != kHistoryHeader) {
        throw FormatError("history file: missing column header");
    }
    TrainingHistory history;
    int line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        EpochRecord r;
        std::istringstream row(line);
        if (!(row >> r.epoch >> r.train_loss >> r.train_acc >> r.val_loss >> r.val_acc)) {
            throw FormatError("history file line " + std::to_string(line_no) + ": malformed record");
        }
        history.records.push_back(r);
    }
    if (history.records.empty()) throw FormatError("history file has no records");
    // best epoch = first minimum of validation loss
    int best = 0;
    for (size_t i = 1; i < history.records.size(); ++i) {
        if (history.records[i].val_loss < history.records[static_cast<size_t>(best)].val_loss) {
            best = static_cast<int>(i);
        }
    }
    history.best_epoch = history.records[static_cast<size_t>(best)].epoch;
    return history;
}

namespace {

struct Series {
    const char* name;
    const char* color;
    std::vector<double> values;
    double final_value = 0;
};

std::string svg_panel(const std::string& title, double origin_x, double origin_y, double w, double h,
                      double y_min, double y_max, const std::vector<Series>& series, int epochs) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    const double plot_x = origin_x + 52, plot_y = origin_y + 28;
    const double plot_w = w - 68, plot_h = h - 64;
    auto sx = [&](int i) {
        return epochs > 1 ? plot_x + plot_w * i / (epochs - 1) : plot_x + plot_w / 2;
    };
    auto sy = [&](double v) {
        const double t = (v - y_min) / (y_max - y_min);
        return plot_y + plot_h * (1.0 - t);
    };

    out.precision(1);
    out << "<text x=\"" << origin_x + w / 2 << "\" y=\"" << origin_y + 16
        << "\" text-anchor=\"middle\" font-size=\"14\" font-weight=\"bold\">" << title << "</text>\n";
    out << "<rect x=\"" << plot_x << "\" y=\"" << plot_y << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"#999\"/>\n";
    out.precision(3);
    out << "<text x=\"" << plot_x - 6 << "\" y=\"" << sy(y_max) + 4
        << "\" text-anchor=\"end\" font-size=\"10\">" << y_max << "</text>\n";
    out << "<text x=\"" << plot_x - 6 << "\" y=\"" << sy(y_min) + 4
        << "\" text-anchor=\"end\" font-size=\"10\">" << y_min << "</text>\n";
    out.precision(0);
    out << "<text x=\"" << sx(0) << "\" y=\"" << plot_y + plot_h + 14
        << "\" text-anchor=\"middle\" font-size=\"10\">1</text>\n";
    out << "<text x=\"" << sx(epochs - 1) << "\" y=\"" << plot_y + plot_h + 14
        << "\" text-anchor=\"middle\" font-size=\"10\">" << epochs << "</text>\n";
    out << "<text x=\"" << origin_x + w / 2 << "\" y=\"" << plot_y + plot_h + 30
        << "\" text-anchor=\"middle\" font-size=\"11\">epoch</text>\n";

    double legend_y = plot_y + 12;
    for (const Series& s : series) {
        out.precision(6);
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
            << " data-series=\"" << s.name << "\" data-final=\"" << s.final_value << "\" points=\"";
        out.precision(2);
        for (int i = 0; i < epochs; ++i) {
            if (i) out << ' ';
            out << sx(i) << ',' << sy(s.values[static_cast<size_t>(i)]);
        }
        out << "\"/>\n";
        if (epochs == 1) {
            out << "<circle cx=\"" << sx(0) << "\" cy=\"" << sy(s.values[0]) << "\" r=\"2.5\" fill=\""
                << s.color << "\"/>\n";
        }
        out << "<line x1=\"" << plot_x + plot_w - 96 << "\" y1=\"" << legend_y - 4 << "\" x2=\""
            << plot_x + plot_w - 78 << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << plot_x + plot_w - 72 << "\" y=\"" << legend_y
            << "\" font-size=\"10\">" << s.name << "</text>\n";
        legend_y += 14;
    }
    return out.str();
}

} // namespace

std::string render_history_svg(const TrainingHistory& history) {
    if (history.records.empty()) throw ValueError("render_history_svg: empty history");
    const int epochs = static_cast<int>(history.records.size());

    Series train_acc{"train_acc", "#1f77b4", {}, 0};
    Series val_acc{"val_acc", "#ff7f0e", {}, 0};
    Series train_loss{"train_loss", "#1f77b4", {}, 0};
    Series val_loss{"val_loss", "#ff7f0e", {}, 0};
    for (const EpochRecord& r : history.records) {
        train_acc.values.push_back(r.train_acc);
        val_acc.values.push_back(r.val_acc);
        train_loss.values.push_back(r.train_loss);
        val_loss.values.push_back(r.val_loss);
    }
    const EpochRecord& last = history.records.back();
    train_acc.final_value = last.train_acc;
    val_acc.final_value = last.val_acc;
    train_loss.final_value = last.train_loss;
    val_loss.final_value = last.val_loss;

    double loss_max = 0;
    for (const EpochRecord& r : history.records) {
        loss_max = std::max({loss_max, r.train_loss, r.val_loss});
    }
    if (loss_max <= 0) loss_max = 1;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"920\" height=\"400\" "
           "viewBox=\"0 0 920 400\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"920\" height=\"400\" fill=\"white\"/>\n";
    out << svg_panel("Accuracy over epochs", 0, 20, 460, 340, 0.0, 1.0, {train_acc, val_acc}, epochs);
    out << svg_panel("Loss over epochs", 460, 20, 460, 340, 0.0, loss_max * 1.05,
                     {train_loss, val_loss}, epochs);
    out << "</svg>\n";
    return out.str();
}

} // namespace slnet
