#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace mlaudit {

/// A metric value; std::nullopt is the explicit Undefined sentinel for zero
/// denominators. Serialized as JSON null, never NaN or a stand-in number.
using Metric = std::optional<double>;

/// k x k counts, cells[actual][predicted].
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int k);

    static ConfusionMatrix from_labels(std::span<const int> actual,
                                       std::span<const int> predicted, int k);

    int k() const { return k_; }
    std::int64_t cell(int actual, int predicted) const;
    void add(int actual, int predicted, std::int64_t count = 1);

    std::int64_t total() const;
    std::int64_t row_sum(int actual) const;    // per-class actual counts
    std::int64_t col_sum(int predicted) const; // per-class predicted counts
    std::int64_t trace() const;

    /// One-vs-rest binary totals for the given positive class.
    struct BinaryView {
        std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
        std::int64_t positives() const { return tp + fn; } // P
        std::int64_t negatives() const { return tn + fp; } // N
    };
    BinaryView binary_view(int positive_class) const;

private:
    int k_;
    std::vector<std::int64_t> cells_;
};

struct ClassificationReport {
    Metric accuracy;
    Metric error_rate;
    Metric sensitivity; // recall / true positive rate
    Metric specificity; // true negative rate
    Metric precision;   // positive predictive value
    Metric f1;
    Metric balanced_accuracy;
    Metric cohens_kappa;
    std::vector<std::string> degenerate; // metrics hit by a zero denominator
};

/// Accuracy/error rate/kappa use the full matrix; the binary statistics come
/// from the one-vs-rest view of positive_class. Degenerate denominators yield
/// Undefined plus a flag, never a stand-in value.
ClassificationReport classification_report(const ConfusionMatrix& cm, int positive_class = 1);

struct PerLabelReport {
    std::vector<ClassificationReport> per_label; // label i scored one-vs-rest
    ClassificationReport macro;                  // mean over defined values
    std::map<std::string, int> skipped;          // metric -> labels skipped
};

PerLabelReport per_label_report(std::span<const int> actual,
                                std::span<const int> predicted, int k);
/// Multilabel form: each row carries a set of active labels.
PerLabelReport per_label_report(const std::vector<std::vector<int>>& actual,
                                const std::vector<std::vector<int>>& predicted, int k);

enum class CurveMode { roc, precision_recall };

struct CurvePoint {
    double x = 0; // ROC: false positive rate; PR: recall
    double y = 0; // ROC: true positive rate;  PR: precision
};

struct RocCurve {
    CurveMode mode = CurveMode::roc;
    std::vector<CurvePoint> points;
    std::vector<double> thresholds; // matching score cutoffs
};

/// Threshold sweep from +infinity down over distinct score values; tied
/// scores form one group and one curve point.
RocCurve roc_curve(std::span<const int> actual, std::span<const double> scores,
                   CurveMode mode = CurveMode::roc);

/// Trapezoidal area; with the tie-group construction this equals the
/// Mann-Whitney statistic P(score+ > score-) + 1/2 P(tie).
double auc(const RocCurve& curve);

/// Fraction of rows whose actual class is among the k_top highest scores;
/// ties rank the lower class index first.
double top_k_accuracy(std::span<const int> actual,
                      const std::vector<std::vector<double>>& score_matrix, int k_top);

/// Jaccard index |A n B| / |A u B|; Undefined when both masks are empty.
Metric iou(const std::set<std::int64_t>& mask_a, const std::set<std::int64_t>& mask_b);

struct RegressionReport {
    double mae = 0;
    double mse = 0;
    double rmse = 0;
    double max_error = 0;
    Metric explained_variance; // Undefined when Var(actual) = 0
    Metric r2;
};

RegressionReport regression_report(std::span<const double> actual,
                                   std::span<const double> predicted);

enum class LossKind { squared, cross_entropy, binary_cross_entropy, absolute };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

/// Row-level probability check shared with the diagnostics matrix validator:
/// all entries >= -tol and |sum - 1| <= tol.
bool is_probability_row(std::span<const double> row, double tol = 1e-6);

/// Probability floor for cross-entropy clamping.
inline constexpr double kCrossEntropyFloor = 1e-12;

/// squared, absolute, or binary_cross_entropy on scalars. For BCE the
/// prediction is a probability and the target must be 0 or 1.
double loss(LossKind kind, double prediction, double target);
/// cross_entropy on a probability vector and a target class index.
double cross_entropy_loss(std::span<const double> probabilities, int target_class);
/// cross_entropy with a one-hot target vector.
double cross_entropy_loss(std::span<const double> probabilities,
                          std::span<const double> one_hot_target);

} // namespace mlaudit
