#include "mlaudit/metrics.hpp"

#include "mlaudit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mlaudit {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw InputError(message);
}

} // namespace

ConfusionMatrix::ConfusionMatrix(int k) : k_(k) {
    require(k >= 2, "confusion matrix needs at least 2 classes");
    cells_.assign(static_cast<std::size_t>(k) * k, 0);
}

ConfusionMatrix ConfusionMatrix::from_labels(std::span<const int> actual,
                                             std::span<const int> predicted, int k) {
    require(actual.size() == predicted.size(), "actual and predicted lengths differ");
    require(!actual.empty(), "no labels given");
    ConfusionMatrix cm(k);
    for (std::size_t i = 0; i < actual.size(); ++i) cm.add(actual[i], predicted[i]);
    return cm;
}

std::int64_t ConfusionMatrix::cell(int actual, int predicted) const {
    require(actual >= 0 && actual < k_ && predicted >= 0 && predicted < k_,
            "class label out of range");
    return cells_[static_cast<std::size_t>(actual) * k_ + predicted];
}

void ConfusionMatrix::add(int actual, int predicted, std::int64_t count) {
    require(actual >= 0 && actual < k_ && predicted >= 0 && predicted < k_,
            "class label out of range");
    require(count >= 0, "negative count");
    cells_[static_cast<std::size_t>(actual) * k_ + predicted] += count;
}

std::int64_t ConfusionMatrix::total() const {
    return std::accumulate(cells_.begin(), cells_.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::row_sum(int actual) const {
    std::int64_t s = 0;
    for (int p = 0; p < k_; ++p) s += cell(actual, p);
    return s;
}

std::int64_t ConfusionMatrix::col_sum(int predicted) const {
    std::int64_t s = 0;
    for (int a = 0; a < k_; ++a) s += cell(a, predicted);
    return s;
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t s = 0;
    for (int i = 0; i < k_; ++i) s += cell(i, i);
    return s;
}

ConfusionMatrix::BinaryView ConfusionMatrix::binary_view(int positive_class) const {
    require(positive_class >= 0 && positive_class < k_, "positive class out of range");
    BinaryView v;
    for (int a = 0; a < k_; ++a) {
        for (int p = 0; p < k_; ++p) {
            const std::int64_t c = cell(a, p);
            if (a == positive_class && p == positive_class) v.tp += c;
            else if (a == positive_class) v.fn += c;
            else if (p == positive_class) v.fp += c;
            else v.tn += c;
        }
    }
    return v;
}

ClassificationReport classification_report(const ConfusionMatrix& cm, int positive_class) {
    const std::int64_t total = cm.total();
    require(total >= 1, "empty confusion matrix");

    ClassificationReport r;
    auto undefined = [&r](Metric& slot, const char* name) {
        slot = std::nullopt;
        r.degenerate.emplace_back(name);
    };
    auto ratio = [&](Metric& slot, const char* name, std::int64_t num, std::int64_t den) {
        if (den > 0) slot = static_cast<double>(num) / static_cast<double>(den);
        else undefined(slot, name);
    };

    r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
    r.error_rate = 1.0 - *r.accuracy;

    const auto v = cm.binary_view(positive_class);
    ratio(r.sensitivity, "sensitivity", v.tp, v.positives());
    ratio(r.specificity, "specificity", v.tn, v.negatives());
    ratio(r.precision, "precision", v.tp, v.tp + v.fp);
    ratio(r.f1, "f1", 2 * v.tp, 2 * v.tp + v.fp + v.fn);

    if (r.sensitivity && r.specificity)
        r.balanced_accuracy = (*r.sensitivity + *r.specificity) / 2.0;
    else
        undefined(r.balanced_accuracy, "balanced_accuracy");

    // Chance agreement from the marginals. The degeneracy test is exact
    // integer arithmetic so p_e == 1 is never a rounding artifact.
    unsigned __int128 marginal_products = 0;
    double p_e = 0.0;
    for (int i = 0; i < cm.k(); ++i) {
        const std::int64_t row = cm.row_sum(i);
        const std::int64_t col = cm.col_sum(i);
        marginal_products +=
            static_cast<unsigned __int128>(row) * static_cast<unsigned __int128>(col);
        p_e += (static_cast<double>(row) / static_cast<double>(total)) *
               (static_cast<double>(col) / static_cast<double>(total));
    }
    const unsigned __int128 total_sq =
        static_cast<unsigned __int128>(total) * static_cast<unsigned __int128>(total);
    if (marginal_products == total_sq)
        undefined(r.cohens_kappa, "cohens_kappa");
    else
        r.cohens_kappa = (*r.accuracy - p_e) / (1.0 - p_e);

    return r;
}

namespace {

ConfusionMatrix binary_matrix(std::int64_t tp, std::int64_t fp, std::int64_t tn,
                              std::int64_t fn) {
    ConfusionMatrix cm(2);
    cm.add(1, 1, tp);
    cm.add(0, 1, fp);
    cm.add(0, 0, tn);
    cm.add(1, 0, fn);
    return cm;
}

struct MetricField {
    const char* name;
    Metric ClassificationReport::* member;
};

constexpr MetricField kReportFields[] = {
    {"accuracy", &ClassificationReport::accuracy},
    {"error_rate", &ClassificationReport::error_rate},
    {"sensitivity", &ClassificationReport::sensitivity},
    {"specificity", &ClassificationReport::specificity},
    {"precision", &ClassificationReport::precision},
    {"f1", &ClassificationReport::f1},
    {"balanced_accuracy", &ClassificationReport::balanced_accuracy},
    {"cohens_kappa", &ClassificationReport::cohens_kappa},
};

PerLabelReport assemble_per_label(std::vector<ClassificationReport> reports) {
    PerLabelReport out;
    out.per_label = std::move(reports);
    for (const auto& field : kReportFields) {
        double sum = 0;
        int defined = 0;
        for (const auto& rep : out.per_label) {
            if (const Metric& m = rep.*(field.member); m) {
                sum += *m;
                ++defined;
            }
        }
        const int skipped = static_cast<int>(out.per_label.size()) - defined;
        if (skipped > 0) out.skipped[field.name] = skipped;
        if (defined > 0) {
            out.macro.*(field.member) = sum / defined;
        } else {
            out.macro.*(field.member) = std::nullopt;
            out.macro.degenerate.emplace_back(field.name);
        }
    }
    return out;
}

} // namespace

PerLabelReport per_label_report(std::span<const int> actual,
                                std::span<const int> predicted, int k) {
    require(k >= 2, "per-label report needs at least 2 classes");
    require(actual.size() == predicted.size(), "actual and predicted lengths differ");
    require(!actual.empty(), "no labels given");
    for (std::size_t i = 0; i < actual.size(); ++i)
        require(actual[i] >= 0 && actual[i] < k && predicted[i] >= 0 && predicted[i] < k,
                "class label out of range");

    std::vector<ClassificationReport> reports;
    reports.reserve(static_cast<std::size_t>(k));
    for (int label = 0; label < k; ++label) {
        std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < actual.size(); ++i) {
            const bool act = actual[i] == label;
            const bool pred = predicted[i] == label;
            if (act && pred) ++tp;
            else if (!act && pred) ++fp;
            else if (act) ++fn;
            else ++tn;
        }
        reports.push_back(classification_report(binary_matrix(tp, fp, tn, fn), 1));
    }
    return assemble_per_label(std::move(reports));
}

PerLabelReport per_label_report(const std::vector<std::vector<int>>& actual,
                                const std::vector<std::vector<int>>& predicted, int k) {
    require(k >= 2, "per-label report needs at least 2 labels");
    require(actual.size() == predicted.size(), "actual and predicted lengths differ");
    require(!actual.empty(), "no rows given");

    auto presence = [&](const std::vector<std::vector<int>>& rows) {
        std::vector<std::vector<bool>> flags(rows.size(), std::vector<bool>(k, false));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (int label : rows[i]) {
                require(label >= 0 && label < k, "label out of range");
                flags[i][static_cast<std::size_t>(label)] = true;
            }
        }
        return flags;
    };
    const auto act = presence(actual);
    const auto pred = presence(predicted);

    std::vector<ClassificationReport> reports;
    reports.reserve(static_cast<std::size_t>(k));
    for (int label = 0; label < k; ++label) {
        std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < act.size(); ++i) {
            const bool a = act[i][static_cast<std::size_t>(label)];
            const bool p = pred[i][static_cast<std::size_t>(label)];
            if (a && p) ++tp;
            else if (!a && p) ++fp;
            else if (a) ++fn;
            else ++tn;
        }
        reports.push_back(classification_report(binary_matrix(tp, fp, tn, fn), 1));
    }
    return assemble_per_label(std::move(reports));
}

RocCurve roc_curve(std::span<const int> actual, std::span<const double> scores,
                   CurveMode mode) {
    require(actual.size() == scores.size(), "actual and scores lengths differ");
    require(!actual.empty(), "no scores given");
    std::int64_t positives = 0, negatives = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        require(actual[i] == 0 || actual[i] == 1, "curve labels must be 0 or 1");
        require(std::isfinite(scores[i]), "non-finite score");
        (actual[i] == 1 ? positives : negatives)++;
    }
    if (positives == 0 || negatives == 0)
        throw DegenerateError("curve needs at least one positive and one negative");

    std::vector<std::size_t> order(actual.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.mode = mode;
    if (mode == CurveMode::roc) {
        // Sweep starts above every score: nothing predicted positive.
        curve.points.push_back({0.0, 0.0});
        curve.thresholds.push_back(std::numeric_limits<double>::infinity());
    }

    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == threshold; ++i)
            (actual[order[i]] == 1 ? tp : fp)++;
        CurvePoint point;
        if (mode == CurveMode::roc) {
            point.x = static_cast<double>(fp) / static_cast<double>(negatives);
            point.y = static_cast<double>(tp) / static_cast<double>(positives);
        } else {
            point.x = static_cast<double>(tp) / static_cast<double>(positives);
            point.y = static_cast<double>(tp) / static_cast<double>(tp + fp);
        }
        curve.points.push_back(point);
        curve.thresholds.push_back(threshold);
    }
    return curve;
}

double auc(const RocCurve& curve) {
    if (curve.mode != CurveMode::roc)
        throw InputError("area is defined for the roc mode only");
    require(curve.points.size() >= 2, "curve has too few points");
    double area = 0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.x - a.x) * (a.y + b.y) / 2.0;
    }
    return area;
}

double top_k_accuracy(std::span<const int> actual,
                      const std::vector<std::vector<double>>& score_matrix, int k_top) {
    require(actual.size() == score_matrix.size(), "actual and score matrix lengths differ");
    require(!actual.empty(), "no rows given");
    const std::size_t width = score_matrix.front().size();
    require(width >= 2, "score matrix needs at least 2 classes");
    require(k_top >= 1 && static_cast<std::size_t>(k_top) <= width,
            "k must be between 1 and the class count");

    std::int64_t hits = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const auto& row = score_matrix[i];
        require(row.size() == width, "ragged score matrix");
        const int target = actual[i];
        require(target >= 0 && static_cast<std::size_t>(target) < width,
                "class label out of range");
        for (double s : row) require(std::isfinite(s), "non-finite score");

        // Rank = number of classes strictly ahead; ties break to the lower index.
        const double target_score = row[static_cast<std::size_t>(target)];
        int rank = 0;
        for (std::size_t j = 0; j < width; ++j) {
            if (row[j] > target_score ||
                (row[j] == target_score && j < static_cast<std::size_t>(target)))
                ++rank;
        }
        if (rank < k_top) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(actual.size());
}

Metric iou(const std::set<std::int64_t>& mask_a, const std::set<std::int64_t>& mask_b) {
    if (mask_a.empty() && mask_b.empty()) return std::nullopt;
    std::int64_t intersection = 0;
    for (std::int64_t v : mask_a) intersection += mask_b.count(v);
    const std::int64_t unite =
        static_cast<std::int64_t>(mask_a.size() + mask_b.size()) - intersection;
    return static_cast<double>(intersection) / static_cast<double>(unite);
}

RegressionReport regression_report(std::span<const double> actual,
                                   std::span<const double> predicted) {
    require(actual.size() == predicted.size(), "actual and predicted lengths differ");
    require(!actual.empty(), "no values given");
    const double n = static_cast<double>(actual.size());

    RegressionReport r;
    double err_sum = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        require(std::isfinite(actual[i]) && std::isfinite(predicted[i]),
                "non-finite value");
        const double e = actual[i] - predicted[i];
        r.mae += std::abs(e) / n;
        r.mse += e * e / n;
        r.max_error = std::max(r.max_error, std::abs(e));
        err_sum += e;
    }
    r.rmse = std::sqrt(r.mse);

    const double actual_mean =
        std::accumulate(actual.begin(), actual.end(), 0.0) / n;
    const double err_mean = err_sum / n;
    double actual_var = 0, err_var = 0, ss_res = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double da = actual[i] - actual_mean;
        const double e = actual[i] - predicted[i];
        actual_var += da * da / n;
        err_var += (e - err_mean) * (e - err_mean) / n;
        ss_res += e * e;
    }
    if (actual_var > 0) {
        r.explained_variance = 1.0 - err_var / actual_var;
        r.r2 = 1.0 - ss_res / (actual_var * n);
    }
    return r;
}

std::string to_string(LossKind kind) {
    switch (kind) {
        case LossKind::squared: return "squared";
        case LossKind::cross_entropy: return "cross_entropy";
        case LossKind::binary_cross_entropy: return "binary_cross_entropy";
        case LossKind::absolute: return "absolute";
    }
    throw InputError("unknown loss kind");
}

LossKind loss_kind_from_string(const std::string& name) {
    if (name == "squared") return LossKind::squared;
    if (name == "cross_entropy") return LossKind::cross_entropy;
    if (name == "binary_cross_entropy") return LossKind::binary_cross_entropy;
    if (name == "absolute") return LossKind::absolute;
    throw InputError("unknown loss kind: " + name);
}

bool is_probability_row(std::span<const double> row, double tol) {
    if (row.empty()) return false;
    double sum = 0;
    for (double v : row) {
        if (!std::isfinite(v) || v < -tol) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

double loss(LossKind kind, double prediction, double target) {
    require(std::isfinite(prediction) && std::isfinite(target), "non-finite value");
    switch (kind) {
        case LossKind::squared:
            return (prediction - target) * (prediction - target);
        case LossKind::absolute:
            return std::abs(prediction - target);
        case LossKind::binary_cross_entropy: {
            require(target == 0.0 || target == 1.0, "binary target must be 0 or 1");
            require(prediction >= 0.0 && prediction <= 1.0,
                    "prediction must be a probability");
            const double p = target == 1.0 ? prediction : 1.0 - prediction;
            return -std::log(std::max(p, kCrossEntropyFloor));
        }
        case LossKind::cross_entropy:
            throw InputError("cross_entropy needs a probability vector");
    }
    throw InputError("unknown loss kind");
}

double cross_entropy_loss(std::span<const double> probabilities, int target_class) {
    require(is_probability_row(probabilities),
            "scores are not a probability distribution");
    require(target_class >= 0 &&
                static_cast<std::size_t>(target_class) < probabilities.size(),
            "class label out of range");
    const double p = std::clamp(probabilities[static_cast<std::size_t>(target_class)],
                                kCrossEntropyFloor, 1.0);
    return -std::log(p);
}

double cross_entropy_loss(std::span<const double> probabilities,
                          std::span<const double> one_hot_target) {
    require(probabilities.size() == one_hot_target.size(),
            "probability and target lengths differ");
    int target = -1;
    for (std::size_t i = 0; i < one_hot_target.size(); ++i) {
        const double v = one_hot_target[i];
        require(v == 0.0 || v == 1.0, "target vector must be one-hot");
        if (v == 1.0) {
            require(target < 0, "target vector must be one-hot");
            target = static_cast<int>(i);
        }
    }
    require(target >= 0, "target vector must be one-hot");
    return cross_entropy_loss(probabilities, target);
}

} // namespace mlaudit
