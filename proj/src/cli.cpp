#include "mlaudit/cli.hpp"

#include "mlaudit/catalog.hpp"
#include "mlaudit/dataset.hpp"
#include "mlaudit/diagnostics.hpp"
#include "mlaudit/error.hpp"
#include "mlaudit/fingerprint.hpp"
#include "mlaudit/integrity.hpp"
#include "mlaudit/metrics.hpp"
#include "mlaudit/report.hpp"
#include "mlaudit/split.hpp"
#include "mlaudit/workflow.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace mlaudit {

namespace {

// Shortest exact decimal, matching the fingerprint module's real rendering.
std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string metric_text(const Metric& m) { return m ? fmt(*m) : "undefined"; }

nlohmann::ordered_json metric_json(const Metric& m) {
    return m ? nlohmann::ordered_json(*m) : nlohmann::ordered_json(nullptr);
}

std::string slurp(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(std::string("cannot open ") + what + " file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::int64_t parse_int_cell(const std::string& cell, const char* what, std::size_t row) {
    std::int64_t value = 0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw InputError(std::string(what) + " row " + std::to_string(row) +
                         ": '" + cell + "' is not an integer");
    }
    return value;
}

double parse_real_cell(const std::string& cell, const char* what, std::size_t row) {
    double value = 0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(value)) {
        throw InputError(std::string(what) + " row " + std::to_string(row) +
                         ": '" + cell + "' is not a finite real");
    }
    return value;
}

std::vector<std::vector<std::string>> read_table(const std::string& path, const char* what) {
    const auto records = parse_csv_table(slurp(path, what));
    if (records.size() < 2) {
        throw InputError(std::string(what) + " file needs a header row and data rows: " + path);
    }
    return records;
}

std::vector<int> read_int_column(const std::string& path, const char* what) {
    const auto records = read_table(path, what);
    std::vector<int> values;
    values.reserve(records.size() - 1);
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != 1) {
            throw InputError(std::string(what) + " row " + std::to_string(i) +
                             " must have exactly one column");
        }
        values.push_back(static_cast<int>(parse_int_cell(records[i][0], what, i)));
    }
    return values;
}

std::vector<double> read_real_column(const std::string& path, const char* what) {
    const auto records = read_table(path, what);
    std::vector<double> values;
    values.reserve(records.size() - 1);
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != 1) {
            throw InputError(std::string(what) + " row " + std::to_string(i) +
                             " must have exactly one column");
        }
        values.push_back(parse_real_cell(records[i][0], what, i));
    }
    return values;
}

std::vector<std::vector<double>> read_real_matrix(const std::string& path, const char* what) {
    const auto records = read_table(path, what);
    const std::size_t width = records[0].size();
    std::vector<std::vector<double>> matrix;
    matrix.reserve(records.size() - 1);
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != width) {
            throw InputError(std::string(what) + " row " + std::to_string(i) +
                             " has " + std::to_string(records[i].size()) + " columns, header has " +
                             std::to_string(width));
        }
        std::vector<double> row;
        row.reserve(width);
        for (const std::string& cell : records[i]) {
            row.push_back(parse_real_cell(cell, what, i));
        }
        matrix.push_back(std::move(row));
    }
    return matrix;
}

std::vector<int> class_targets(const Dataset& dataset) {
    std::vector<int> labels;
    labels.reserve(dataset.rows.size());
    for (const DataPoint& row : dataset.rows) {
        labels.push_back(static_cast<int>(std::get<std::int64_t>(row.target)));
    }
    return labels;
}

std::vector<double> real_targets(const Dataset& dataset) {
    std::vector<double> values;
    values.reserve(dataset.rows.size());
    for (const DataPoint& row : dataset.rows) {
        values.push_back(std::get<double>(row.target));
    }
    return values;
}

// ---------------------------------------------------------------------------

struct Ctx {
    std::ostream* out = nullptr;
    int exit_code = 0;

    // global flags
    std::string format = "text";
    std::string out_path;
    std::string date;

    // option storage shared across leaf commands
    std::string data_path, schema_path, pred_path, scores_path, matrix_path;
    std::string split_path, clusters_path;
    std::string catalog_path, assessment_path, impact_path;
    std::string model_path, sweep_path, measured_path, requirements_path;
    std::string case_path, in_path;
    std::string metric_name, scope, case_id, event_name, decision_name, severity_name, outcome;
    int positive_class = 1;
    int top_k = 0;
    int target_cl = 0;
    std::optional<int> rounding;
    double threshold = 0.99;
    double margin = 0.05;
    double imbalance_threshold = 0.1;
    double train_value = 0;
    double test_value = 0;
    double gap_threshold = 0.1;
    double tol = 1e-6;
    bool lower_is_better = false;
};

void finalize(Ctx& ctx, AuditReport report) {
    if (!ctx.date.empty()) {
        Date::parse(ctx.date); // metadata date must still be a real date
        report.date = ctx.date;
    }
    const ReportFormat format =
        ctx.format == "json" ? ReportFormat::json : ReportFormat::text;
    const std::string rendered = render_report(report, format);
    if (!ctx.out_path.empty()) {
        std::ofstream file(ctx.out_path, std::ios::binary);
        if (!file) {
            throw InputError("cannot write report file: " + ctx.out_path);
        }
        file << rendered;
    } else {
        *ctx.out << rendered;
    }
    ctx.exit_code = exit_code_for(report);
}

Dataset load_data(const Ctx& ctx) {
    const SchemaSpec spec = load_schema_spec_file(ctx.schema_path);
    return load_dataset_file(ctx.data_path, spec);
}

SplitAssignment load_split(const Ctx& ctx, const Dataset& dataset) {
    return assign_splits(dataset, load_split_file(ctx.split_path));
}

nlohmann::ordered_json collision_rows_json(const SplitCollision& collision, SplitMode mode) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::object();
    for (const auto& [label, ids] : collision.rows) {
        const std::string key =
            mode == SplitMode::holdout ? split_label_name(label) : "fold" + std::to_string(label);
        rows[key] = ids;
    }
    return rows;
}

void leakage_section(AuditReport& report, const Dataset& dataset, const SplitAssignment& split,
                     const LeakageReport& leakage, std::optional<int> rounding,
                     const char* section_name, const char* scope_word) {
    nlohmann::ordered_json details;
    details["pairs_checked"] = leakage.pairs_checked;
    nlohmann::ordered_json collisions = nlohmann::ordered_json::array();
    for (const SplitCollision& collision : leakage.collisions) {
        nlohmann::ordered_json entry;
        entry["fingerprint"] = collision.fingerprint;
        entry["rows"] = collision_rows_json(collision, split.mode);
        collisions.push_back(std::move(entry));
    }
    details["collisions"] = std::move(collisions);

    // Full census, within-group duplicates included; those are not leakage
    // but belong in the report.
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (const DuplicateGroup& group : duplicate_census(dataset, rounding)) {
        nlohmann::ordered_json entry;
        entry["fingerprint"] = group.digest_hex;
        entry["rows"] = group.row_ids;
        groups.push_back(std::move(entry));
    }
    details["duplicate_groups"] = std::move(groups);

    nlohmann::ordered_json sizes = nlohmann::ordered_json::object();
    const auto counts = split.label_counts();
    for (std::size_t label = 0; label < counts.size(); ++label) {
        const std::string key = split.mode == SplitMode::holdout
                                    ? split_label_name(static_cast<int>(label))
                                    : "fold" + std::to_string(label);
        if (split.mode == SplitMode::kfold || counts[label] > 0) {
            sizes[key] = counts[label];
        }
    }
    details["group_sizes"] = std::move(sizes);

    if (leakage.leak_present) {
        report.add_section(section_name, Verdict::FAIL,
                           std::to_string(leakage.collisions.size()) +
                               " duplicate row group(s) span multiple " + scope_word +
                               " (pairs checked: " + std::to_string(leakage.pairs_checked) + ")",
                           std::move(details));
    } else {
        report.add_section(section_name, Verdict::PASS,
                           std::string("no duplicate rows shared between ") + scope_word +
                               " (pairs checked: " + std::to_string(leakage.pairs_checked) + ")",
                           std::move(details));
    }
}

// ---- leaf command handlers ------------------------------------------------

void run_metrics_classify(Ctx& ctx) {
    const Dataset dataset = load_data(ctx);
    if (!is_classification(dataset.schema.task)) {
        throw TaskError("metrics classify needs a classification task (see metrics regress)");
    }
    const std::vector<int> actual = class_targets(dataset);
    const std::vector<int> predicted = read_int_column(ctx.pred_path, "predictions");
    if (predicted.size() != actual.size()) {
        throw InputError("predictions count " + std::to_string(predicted.size()) +
                         " does not match dataset rows " + std::to_string(actual.size()));
    }
    const int k = dataset.schema.k;
    const ConfusionMatrix cm = ConfusionMatrix::from_labels(actual, predicted, k);
    const ClassificationReport rep = classification_report(cm, ctx.positive_class);

    AuditReport report;
    report.identifiers["data"] = ctx.data_path;
    report.identifiers["predictions"] = ctx.pred_path;

    nlohmann::ordered_json details;
    details["n"] = cm.total();
    details["k"] = k;
    details["positive_class"] = ctx.positive_class;
    nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
    for (int a = 0; a < k; ++a) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int p = 0; p < k; ++p) {
            row.push_back(cm.cell(a, p));
        }
        matrix.push_back(std::move(row));
    }
    details["confusion_matrix"] = std::move(matrix);
    details["accuracy"] = metric_json(rep.accuracy);
    details["error_rate"] = metric_json(rep.error_rate);
    details["sensitivity"] = metric_json(rep.sensitivity);
    details["specificity"] = metric_json(rep.specificity);
    details["precision"] = metric_json(rep.precision);
    details["f1"] = metric_json(rep.f1);
    details["balanced_accuracy"] = metric_json(rep.balanced_accuracy);
    details["cohens_kappa"] = metric_json(rep.cohens_kappa);
    details["degenerate"] = rep.degenerate;

    if (k > 2) {
        const PerLabelReport per_label = per_label_report(actual, predicted, k);
        nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
        for (int label = 0; label < k; ++label) {
            const ClassificationReport& r = per_label.per_label[static_cast<std::size_t>(label)];
            nlohmann::ordered_json entry;
            entry["label"] = label;
            entry["sensitivity"] = metric_json(r.sensitivity);
            entry["specificity"] = metric_json(r.specificity);
            entry["precision"] = metric_json(r.precision);
            entry["f1"] = metric_json(r.f1);
            per_class.push_back(std::move(entry));
        }
        details["per_class"] = std::move(per_class);
        nlohmann::ordered_json macro;
        macro["sensitivity"] = metric_json(per_label.macro.sensitivity);
        macro["specificity"] = metric_json(per_label.macro.specificity);
        macro["precision"] = metric_json(per_label.macro.precision);
        macro["f1"] = metric_json(per_label.macro.f1);
        details["macro"] = std::move(macro);
    }

    const std::string summary = "accuracy " + metric_text(rep.accuracy) +
                                "; recall (sensitivity) " + metric_text(rep.sensitivity) +
                                "; balanced accuracy " + metric_text(rep.balanced_accuracy) +
                                "; cohens kappa " + metric_text(rep.cohens_kappa);
    report.add_section("classification-metrics",
                       rep.degenerate.empty() ? Verdict::PASS : Verdict::UNDEFINED, summary,
                       std::move(details));

    if (!ctx.scores_path.empty()) {
        if (k != 2) {
            throw InputError("score curves need a binary task (k=2)");
        }
        const std::vector<double> scores = read_real_column(ctx.scores_path, "scores");
        if (scores.size() != actual.size()) {
            throw InputError("scores count does not match dataset rows");
        }
        const RocCurve curve = roc_curve(actual, scores, CurveMode::roc);
        const double area = auc(curve);
        nlohmann::ordered_json roc;
        roc["auc"] = area;
        nlohmann::ordered_json points = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
            nlohmann::ordered_json point;
            // The sweep opens above all scores; that threshold renders as null.
            point["threshold"] = std::isfinite(curve.thresholds[i])
                                     ? nlohmann::ordered_json(curve.thresholds[i])
                                     : nlohmann::ordered_json(nullptr);
            point["fpr"] = curve.points[i].x;
            point["tpr"] = curve.points[i].y;
            points.push_back(std::move(point));
        }
        roc["points"] = std::move(points);
        report.add_section("roc", Verdict::PASS,
                           "auc " + fmt(area) + " over " +
                               std::to_string(curve.points.size()) + " curve points",
                           std::move(roc));
        report.identifiers["scores"] = ctx.scores_path;
    }

    if (!ctx.matrix_path.empty() || ctx.top_k > 0) {
        if (ctx.matrix_path.empty() || ctx.top_k <= 0) {
            throw InputError("top-k accuracy needs both --score-matrix and --top-k");
        }
        const auto matrix_scores = read_real_matrix(ctx.matrix_path, "score matrix");
        if (matrix_scores.size() != actual.size()) {
            throw InputError("score matrix row count does not match dataset rows");
        }
        const double value = top_k_accuracy(actual, matrix_scores, ctx.top_k);
        nlohmann::ordered_json details_topk;
        details_topk["k"] = ctx.top_k;
        details_topk["value"] = value;
        report.add_section("top-k", Verdict::PASS,
                           "top-" + std::to_string(ctx.top_k) + " accuracy " + fmt(value),
                           std::move(details_topk));
        report.identifiers["score_matrix"] = ctx.matrix_path;
    }

    finalize(ctx, std::move(report));
}

void run_metrics_regress(Ctx& ctx) {
    const Dataset dataset = load_data(ctx);
    if (dataset.schema.task != TaskKind::regression) {
        throw TaskError("metrics regress needs a regression task (see metrics classify)");
    }
    const std::vector<double> actual = real_targets(dataset);
    const std::vector<double> predicted = read_real_column(ctx.pred_path, "predictions");
    if (predicted.size() != actual.size()) {
        throw InputError("predictions count " + std::to_string(predicted.size()) +
                         " does not match dataset rows " + std::to_string(actual.size()));
    }
    const RegressionReport rep = regression_report(actual, predicted);

    AuditReport report;
    report.identifiers["data"] = ctx.data_path;
    report.identifiers["predictions"] = ctx.pred_path;
    nlohmann::ordered_json details;
    details["n"] = static_cast<std::int64_t>(actual.size());
    details["mae"] = rep.mae;
    details["mse"] = rep.mse;
    details["rmse"] = rep.rmse;
    details["max_error"] = rep.max_error;
    details["explained_variance"] = metric_json(rep.explained_variance);
    details["r2"] = metric_json(rep.r2);
    const bool degenerate = !rep.r2.has_value();
    report.add_section("regression-metrics",
                       degenerate ? Verdict::UNDEFINED : Verdict::PASS,
                       "mae " + fmt(rep.mae) + "; rmse " + fmt(rep.rmse) + "; r2 " +
                           metric_text(rep.r2),
                       std::move(details));
    finalize(ctx, std::move(report));
}

void run_check_splits(Ctx& ctx) {
    const Dataset dataset = load_data(ctx);
    const SplitAssignment split = load_split(ctx, dataset);
    const LeakageReport leakage = check_split_disjoint(dataset, split, ctx.rounding);

    AuditReport report;
    report.identifiers["data"] = ctx.data_path;
    report.identifiers["split"] = ctx.split_path;
    leakage_section(report, dataset, split, leakage, ctx.rounding, "split-disjoint", "splits");
    finalize(ctx, std::move(report));
}

void run_check_folds(Ctx& ctx) {
    const Dataset dataset = load_data(ctx);
    const SplitAssignment split = load_split(ctx, dataset);
    const LeakageReport leakage = check_fold_disjoint(dataset, split, ctx.rounding);

    AuditReport report;
    report.identifiers["data"] = ctx.data_path;
    report.identifiers["split"] = ctx.split_path;
    leakage_section(report, dataset, split, leakage, ctx.rounding, "fold-disjoint", "folds");
    finalize(ctx, std::move(report));
}

void run_check_clusters(Ctx& ctx) {
    const Dataset dataset = load_data(ctx);
    const SplitAssignment split = load_split(ctx, dataset);
    const auto clusters = load_cluster_labels_file(ctx.clusters_path);
    const auto violations = check_cluster_fold_assignment(clusters, split);

    AuditReport report;
    report.identifiers["data"] = ctx.data_path;
    report.identifiers["split"] = ctx.split_path;
    report.identifiers["clusters"] = ctx.clusters_path;
    nlohmann::ordered_json details;
    nlohmann::ordered_json violators = nlohmann::ordered_json::array();
    for (const ClusterViolation& violation : violations) {
        nlohmann::ordered_json entry;
        entry["cluster"] = violation.cluster;
        entry["folds"] = violation.folds;
        violators.push_back(std::move(entry));
    }
    details["violations"] = std::move(violators);
    if (violations.empty()) {
        report.add_section("cluster-folds", Verdict::PASS,
                           "every cluster stays inside a single fold", std::move(details));
    } else {
        report.add_section("cluster-folds", Verdict::FAIL,
                           std::to_string(violations.size()) + " cluster(s) span multiple folds",
                           std::move(details));
    }
    finalize(ctx, std::move(report));
}

void run_check_label_leak(Ctx& ctx) {
    const Dataset dataset = load_data(ctx);
    const SplitAssignment split = load_split(ctx, dataset);
    const LabelLeakProbe probe =
        check_label_leakage(dataset, split, ctx.threshold, ctx.margin);

    AuditReport report;
    report.identifiers["data"] = ctx.data_path;
    report.identifiers["split"] = ctx.split_path;
    nlohmann::ordered_json details;
    details["threshold"] = probe.threshold;
    details["margin"] = probe.margin;
    details["scored_rows"] = probe.scored_rows;
    details["scored_on"] = split_label_name(probe.scored_label);
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    std::vector<std::string> flagged;
    for (const FeatureProbe& fp : probe.features) {
        nlohmann::ordered_json entry;
        entry["feature"] = fp.feature;
        entry["probe_accuracy"] = fp.probe_accuracy;
        entry["majority_baseline"] = fp.majority_baseline;
        entry["flagged"] = fp.flagged;
        features.push_back(std::move(entry));
        if (fp.flagged) {
            flagged.push_back(fp.feature);
        }
    }
    details["features"] = std::move(features);
    if (flagged.empty()) {
        report.add_section("label-leak", Verdict::PASS,
                           "no feature predicts the target on its own (" +
                               std::to_string(probe.features.size()) + " probed)",
                           std::move(details));
    } else {
        std::string names;
        for (const std::string& name : flagged) {
            names += (names.empty() ? "" : ", ") + name;
        }
        report.add_section("label-leak", Verdict::FAIL,
                           "feature(s) predict the target suspiciously well: " + names,
                           std::move(details));
    }
    finalize(ctx, std::move(report));
}

void run_check_metric_fit(Ctx& ctx) {
    const Dataset dataset = load_data(ctx);
    const ClassDistribution dist = class_distribution(dataset);
    const MetricAdvisory advisory = check_metric_appropriateness(
        dataset.schema.task, dist, ctx.metric_name, ctx.imbalance_threshold);

    AuditReport report;
    report.identifiers["data"] = ctx.data_path;
    nlohmann::ordered_json details;
    details["metric"] = advisory.metric;
    details["minority_proportion"] = advisory.minority_proportion;
    details["baseline_accuracy"] = advisory.baseline_accuracy;
    details["imbalance_threshold"] = ctx.imbalance_threshold;
    details["class_counts"] = dist.counts;
    if (advisory.status == AdvisoryStatus::WARN) {
        details["recommendation"] = advisory.recommendation;
        report.add_section("metric-fit", Verdict::WARN, advisory.recommendation,
                           std::move(details));
    } else {
        report.add_section("metric-fit", Verdict::PASS,
                           "metric '" + advisory.metric + "' suits the class balance " +
                               "(minority proportion " + fmt(advisory.minority_proportion) + ")",
                           std::move(details));
    }
    finalize(ctx, std::move(report));
}

void run_diagnose_overfit(Ctx& ctx) {
    const OverfitVerdict verdict = overfit_gap(ctx.train_value, ctx.test_value,
                                               !ctx.lower_is_better, ctx.gap_threshold);
    AuditReport report;
    nlohmann::ordered_json details;
    details["train"] = ctx.train_value;
    details["test"] = ctx.test_value;
    details["higher_is_better"] = !ctx.lower_is_better;
    details["gap"] = verdict.gap;
    details["threshold"] = verdict.threshold;
    if (verdict.overfit_suspected) {
        report.add_section("overfit-gap", Verdict::WARN,
                           "overfitting suspected: train/test gap " + fmt(verdict.gap) +
                               " exceeds threshold " + fmt(verdict.threshold),
                           std::move(details));
    } else {
        report.add_section("overfit-gap", Verdict::PASS,
                           "train/test gap " + fmt(verdict.gap) + " within threshold " +
                               fmt(verdict.threshold),
                           std::move(details));
    }
    finalize(ctx, std::move(report));
}

void run_diagnose_sweep(Ctx& ctx) {
    const CapacitySweep sweep = load_capacity_sweep_file(ctx.sweep_path);
    const SweepAnalysis analysis = capacity_sweep_analysis(sweep);

    AuditReport report;
    report.identifiers["sweep"] = ctx.sweep_path;
    nlohmann::ordered_json details;
    details["sweet_spot_capacity"] = analysis.sweet_spot_capacity;
    details["non_unimodal"] = analysis.non_unimodal;
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        nlohmann::ordered_json point;
        point["capacity"] = sweep.points[i].capacity;
        point["train_risk"] = sweep.points[i].train_risk;
        point["test_risk"] = sweep.points[i].test_risk;
        point["regime"] = to_string(analysis.regimes[i]);
        points.push_back(std::move(point));
    }
    details["points"] = std::move(points);
    if (analysis.non_unimodal) {
        report.add_section("capacity-sweep", Verdict::WARN,
                           "test risk is not U-shaped; sweet spot at capacity " +
                               fmt(analysis.sweet_spot_capacity) +
                               " but regime labels are unreliable",
                           std::move(details));
    } else {
        report.add_section("capacity-sweep", Verdict::PASS,
                           "sweet spot at capacity " + fmt(analysis.sweet_spot_capacity),
                           std::move(details));
    }
    finalize(ctx, std::move(report));
}

void run_diagnose_loss(Ctx& ctx) {
    const ModelDescriptor descriptor = load_model_descriptor_file(ctx.model_path);
    const ConsistencyVerdict verdict = check_loss_task_consistency(descriptor);

    AuditReport report;
    report.identifiers["model"] = ctx.model_path;
    nlohmann::ordered_json details;
    details["task"] = to_string(descriptor.task);
    details["loss"] = to_string(descriptor.declared_loss);
    details["output"] = to_string(descriptor.output_spec);
    details["expected"] = verdict.expected;
    if (verdict.pass) {
        report.add_section("loss-consistency", Verdict::PASS,
                           "declared loss and output fit the task", std::move(details));
    } else {
        details["reason"] = verdict.reason;
        report.add_section("loss-consistency", Verdict::FAIL, verdict.reason,
                           std::move(details));
    }
    finalize(ctx, std::move(report));
}

void run_diagnose_prob_outputs(Ctx& ctx) {
    const auto matrix = read_real_matrix(ctx.matrix_path, "probability matrix");
    const ProbabilityValidation validation = validate_probability_outputs(matrix, ctx.tol);

    AuditReport report;
    report.identifiers["matrix"] = ctx.matrix_path;
    nlohmann::ordered_json details;
    details["rows_checked"] = validation.rows_checked;
    details["total_violations"] = validation.total_violations;
    details["violating_rows"] = validation.violating_rows;
    details["tol"] = validation.tol;
    if (validation.pass) {
        report.add_section("probability-outputs", Verdict::PASS,
                           "all " + std::to_string(validation.rows_checked) +
                               " rows are probability distributions",
                           std::move(details));
    } else {
        report.add_section("probability-outputs", Verdict::FAIL,
                           std::to_string(validation.total_violations) + " of " +
                               std::to_string(validation.rows_checked) +
                               " rows are not probability distributions",
                           std::move(details));
    }
    finalize(ctx, std::move(report));
}

void run_diagnose_min_perf(Ctx& ctx) {
    const auto measured = load_measured_values_file(ctx.measured_path);
    const auto requirements = load_performance_requirements_file(ctx.requirements_path);
    const MinPerformanceVerdict verdict = check_min_performance(measured, requirements);

    AuditReport report;
    report.identifiers["measured"] = ctx.measured_path;
    report.identifiers["requirements"] = ctx.requirements_path;
    nlohmann::ordered_json details;
    nlohmann::ordered_json outcomes = nlohmann::ordered_json::array();
    int met = 0;
    for (const RequirementOutcome& outcome : verdict.outcomes) {
        nlohmann::ordered_json entry;
        entry["metric"] = outcome.requirement.metric;
        entry["op"] = outcome.requirement.op == PerformanceRequirement::Op::ge ? ">=" : "<=";
        entry["bound"] = outcome.requirement.bound;
        entry["measured"] = outcome.measured;
        entry["pass"] = outcome.pass;
        outcomes.push_back(std::move(entry));
        met += outcome.pass ? 1 : 0;
    }
    details["requirements"] = std::move(outcomes);
    const std::string summary = std::to_string(met) + " of " +
                                std::to_string(verdict.outcomes.size()) +
                                " minimum performance requirements met";
    report.add_section("min-performance", verdict.pass ? Verdict::PASS : Verdict::FAIL, summary,
                       std::move(details));
    finalize(ctx, std::move(report));
}

void run_catalog_evaluate(Ctx& ctx) {
    const Catalog catalog = load_catalog_file(ctx.catalog_path);
    const Assessment assessment = load_assessment_file(ctx.assessment_path);
    const ConformityResult result = evaluate_assessment(catalog, assessment, ctx.target_cl);

    AuditReport report;
    report.identifiers["catalog"] = ctx.catalog_path;
    report.identifiers["assessment"] = ctx.assessment_path;
    report.conformity = result;

    int positive = 0, non_substantial = 0, substantial = 0;
    for (const Finding& finding : result.findings) {
        switch (finding.cls) {
            case FindingClass::positive: ++positive; break;
            case FindingClass::non_substantial: ++non_substantial; break;
            case FindingClass::substantial: ++substantial; break;
        }
    }
    nlohmann::ordered_json details;
    details["target_cl"] = result.target_cl;
    details["decision"] = to_string(result.decision);
    details["applicable"] =
        static_cast<std::int64_t>(result.findings.size() + result.unevaluated.size());
    details["positive"] = positive;
    details["non_substantial"] = non_substantial;
    details["substantial"] = substantial;
    details["unevaluated"] = static_cast<std::int64_t>(result.unevaluated.size());

    Verdict verdict = Verdict::FAIL;
    std::string summary;
    switch (result.decision) {
        case Decision::granted:
            verdict = Verdict::PASS;
            summary = "certification granted: all " + std::to_string(positive) +
                      " applicable requirements fulfilled";
            break;
        case Decision::granted_with_conditions:
            verdict = Verdict::WARN;
            summary = "granted with conditions: " + std::to_string(non_substantial) +
                      " non-substantial finding(s)";
            break;
        case Decision::denied:
            verdict = Verdict::FAIL;
            summary = "certification denied: " + std::to_string(substantial) +
                      " substantial finding(s)";
            break;
        case Decision::incomplete:
            verdict = Verdict::FAIL;
            summary = "assessment incomplete: " + std::to_string(result.unevaluated.size()) +
                      " applicable requirement(s) not evaluated";
            break;
    }
    report.add_section("catalog-evaluate", verdict, summary, std::move(details));
    finalize(ctx, std::move(report));
}

void run_catalog_cl(Ctx& ctx) {
    const ImpactAssessment impact = load_impact_file(ctx.impact_path);
    const int cl = determine_cl(impact);

    AuditReport report;
    report.identifiers["impact"] = ctx.impact_path;
    nlohmann::ordered_json details;
    nlohmann::ordered_json dims = nlohmann::ordered_json::object();
    std::string drivers;
    for (const auto& [name, level] : impact.dimensions) {
        dims[name] = level;
        if (level == cl) {
            drivers += (drivers.empty() ? "" : ", ") + name;
        }
    }
    details["dimensions"] = std::move(dims);
    details["cl"] = cl;
    report.add_section("criticality-level", Verdict::PASS,
                       "criticality level " + std::to_string(cl) + " (driven by " + drivers + ")",
                       std::move(details));
    finalize(ctx, std::move(report));
}

void save_case(const CertificationCase& c, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw InputError("cannot write case file: " + path);
    }
    file << c.to_json() << "\n";
}

std::string derived_case_id(const std::string& scope, int target_cl, const std::string& date) {
    std::string id;
    for (char c : scope) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            id += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        } else if (!id.empty() && id.back() != '-') {
            id += '-';
        }
        if (id.size() >= 24) {
            break;
        }
    }
    while (!id.empty() && id.back() == '-') {
        id.pop_back();
    }
    if (id.empty()) {
        id = "CASE";
    }
    return id + "-CL" + std::to_string(target_cl) + "-" + date;
}

nlohmann::ordered_json case_details(const CertificationCase& c) {
    nlohmann::ordered_json details;
    details["case_id"] = c.case_id();
    details["scope"] = c.scope();
    details["target_cl"] = c.target_cl();
    details["state"] = to_string(c.state());
    details["follow_up_audit_due"] = c.follow_up_audit_due();
    if (c.certificate()) {
        nlohmann::ordered_json certificate;
        certificate["issue_date"] = c.certificate()->issue_date.to_string();
        certificate["expiry_date"] = c.certificate()->expiry_date.to_string();
        nlohmann::ordered_json audits = nlohmann::ordered_json::array();
        for (const Date& audit : c.certificate()->monitoring_audit_dates) {
            audits.push_back(audit.to_string());
        }
        certificate["monitoring_audit_dates"] = std::move(audits);
        details["certificate"] = std::move(certificate);
    }
    return details;
}

void run_case_init(Ctx& ctx) {
    if (ctx.date.empty()) {
        throw InputError("case init needs --date");
    }
    const Date created = Date::parse(ctx.date);
    const std::string id = ctx.case_id.empty()
                               ? derived_case_id(ctx.scope, ctx.target_cl, ctx.date)
                               : ctx.case_id;
    const CertificationCase c(id, ctx.scope, ctx.target_cl, created);
    save_case(c, ctx.case_path);

    AuditReport report;
    report.identifiers["case_file"] = ctx.case_path;
    report.add_section("case-init", Verdict::PASS,
                       "case " + c.case_id() + " opened in " + to_string(c.state()) +
                           " (target CL " + std::to_string(c.target_cl()) + ")",
                       case_details(c));
    finalize(ctx, std::move(report));
}

void run_case_advance(Ctx& ctx) {
    if (ctx.date.empty()) {
        throw InputError("case advance needs --date");
    }
    CertificationCase c = CertificationCase::load_file(ctx.case_path);
    CaseEvent event;
    event.kind = event_kind_from_string(ctx.event_name);
    event.date = Date::parse(ctx.date);
    if (!ctx.decision_name.empty()) {
        event.decision = decision_from_string(ctx.decision_name);
    }
    if (!ctx.severity_name.empty()) {
        event.severity = change_severity_from_string(ctx.severity_name);
    }
    if (!ctx.outcome.empty()) {
        event.outcome = ctx.outcome;
    }
    c.advance(event);
    save_case(c, ctx.case_path);

    AuditReport report;
    report.identifiers["case_file"] = ctx.case_path;
    report.add_section("case-advance", Verdict::PASS,
                       "event " + ctx.event_name + " applied; state now " + to_string(c.state()),
                       case_details(c));
    finalize(ctx, std::move(report));
}

void run_case_status(Ctx& ctx) {
    const CertificationCase c = CertificationCase::load_file(ctx.case_path);

    AuditReport report;
    report.identifiers["case_file"] = ctx.case_path;
    nlohmann::ordered_json details = case_details(c);
    Verdict verdict = Verdict::PASS;
    std::string summary = "case " + c.case_id() + " in state " + to_string(c.state());
    if (!ctx.date.empty()) {
        const CertificateStatus status = c.certificate_status(Date::parse(ctx.date));
        details["certificate_status"] = to_string(status);
        details["query_date"] = ctx.date;
        summary += "; certificate " + to_string(status) + " at " + ctx.date;
        if (status == CertificateStatus::monitoring_overdue ||
            status == CertificateStatus::expired || status == CertificateStatus::invalidated) {
            verdict = Verdict::WARN;
        }
    }
    report.add_section("case-status", verdict, summary, std::move(details));
    finalize(ctx, std::move(report));
}

void run_report_render(Ctx& ctx) {
    AuditReport parsed = parse_report(slurp(ctx.in_path, "report"));
    finalize(ctx, std::move(parsed));
}

} // namespace

const std::vector<CommandInfo>& command_table() {
    static const std::vector<CommandInfo> table = {
        {"metrics classify", {"classification_report", "roc_auc", "top_k_accuracy"}},
        {"metrics regress", {"regression_report"}},
        {"check splits", {"check_split_disjoint"}},
        {"check folds", {"check_fold_disjoint"}},
        {"check clusters", {"check_cluster_fold_assignment"}},
        {"check label-leak", {"check_label_leakage"}},
        {"check metric-fit", {"check_metric_appropriateness"}},
        {"diagnose overfit", {"overfit_gap"}},
        {"diagnose sweep", {"capacity_sweep_analysis"}},
        {"diagnose loss", {"check_loss_task_consistency"}},
        {"diagnose prob-outputs", {"validate_probability_outputs"}},
        {"diagnose min-perf", {"check_min_performance"}},
        {"catalog evaluate", {"evaluate_assessment"}},
        {"catalog cl", {"determine_cl"}},
        {"case init", {"new_case"}},
        {"case advance", {"advance"}},
        {"case status", {"certificate_status"}},
        {"report render", {"render_report"}},
    };
    return table;
}

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Ctx ctx;
    ctx.out = &out;

    CLI::App app{"desk-scale audit toolkit for machine-learning applications"};
    app.name("mlaudit");
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--format", ctx.format, "report format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    app.add_option("--out", ctx.out_path, "write the report to this file instead of stdout");
    app.add_option("--date", ctx.date, "ISO-8601 date: report metadata, event or query date");

    auto* metrics = app.add_subcommand("metrics", "evaluation metrics over prediction files");
    metrics->require_subcommand(1);
    metrics->fallthrough();
    auto* classify = metrics->add_subcommand("classify", "classification metrics");
    classify->fallthrough();
    classify->add_option("--data", ctx.data_path, "dataset CSV")->required();
    classify->add_option("--schema", ctx.schema_path, "schema JSON")->required();
    classify->add_option("--pred", ctx.pred_path, "predicted labels CSV (one column)")
        ->required();
    classify->add_option("--positive-class", ctx.positive_class,
                         "positive class for the binary statistics")
        ->capture_default_str();
    classify->add_option("--scores", ctx.scores_path,
                         "positive-class scores CSV; adds the roc section (binary only)");
    classify->add_option("--score-matrix", ctx.matrix_path,
                         "per-class score matrix CSV; adds the top-k section");
    classify->add_option("--top-k", ctx.top_k, "k for top-k accuracy");
    classify->callback([&ctx] { run_metrics_classify(ctx); });

    auto* regress = metrics->add_subcommand("regress", "regression metrics");
    regress->fallthrough();
    regress->add_option("--data", ctx.data_path, "dataset CSV")->required();
    regress->add_option("--schema", ctx.schema_path, "schema JSON")->required();
    regress->add_option("--pred", ctx.pred_path, "predicted values CSV (one column)")
        ->required();
    regress->callback([&ctx] { run_metrics_regress(ctx); });

    auto* check = app.add_subcommand("check", "data and split integrity checks");
    check->require_subcommand(1);
    check->fallthrough();
    auto* splits = check->add_subcommand("splits", "cross-split duplicate leakage (holdout)");
    splits->fallthrough();
    splits->add_option("--data", ctx.data_path, "dataset CSV")->required();
    splits->add_option("--schema", ctx.schema_path, "schema JSON")->required();
    splits->add_option("--split", ctx.split_path, "split membership JSON")->required();
    splits->add_option("--rounding", ctx.rounding,
                       "decimal places for near-duplicate detection on reals");
    splits->callback([&ctx] { run_check_splits(ctx); });

    auto* folds = check->add_subcommand("folds", "cross-fold duplicate leakage (k-fold)");
    folds->fallthrough();
    folds->add_option("--data", ctx.data_path, "dataset CSV")->required();
    folds->add_option("--schema", ctx.schema_path, "schema JSON")->required();
    folds->add_option("--split", ctx.split_path, "fold membership JSON")->required();
    folds->add_option("--rounding", ctx.rounding,
                      "decimal places for near-duplicate detection on reals");
    folds->callback([&ctx] { run_check_folds(ctx); });

    auto* clusters = check->add_subcommand("clusters", "cluster-to-fold assignment discipline");
    clusters->fallthrough();
    clusters->add_option("--data", ctx.data_path, "dataset CSV")->required();
    clusters->add_option("--schema", ctx.schema_path, "schema JSON")->required();
    clusters->add_option("--split", ctx.split_path, "fold membership JSON")->required();
    clusters->add_option("--clusters", ctx.clusters_path, "cluster labels JSON")->required();
    clusters->callback([&ctx] { run_check_clusters(ctx); });

    auto* label_leak = check->add_subcommand("label-leak", "per-feature label leakage probe");
    label_leak->fallthrough();
    label_leak->add_option("--data", ctx.data_path, "dataset CSV")->required();
    label_leak->add_option("--schema", ctx.schema_path, "schema JSON")->required();
    label_leak->add_option("--split", ctx.split_path, "split membership JSON")->required();
    label_leak->add_option("--threshold", ctx.threshold, "absolute probe accuracy to flag")
        ->capture_default_str();
    label_leak->add_option("--margin", ctx.margin, "required lead over the majority baseline")
        ->capture_default_str();
    label_leak->callback([&ctx] { run_check_label_leak(ctx); });

    auto* metric_fit = check->add_subcommand("metric-fit", "metric appropriateness advisory");
    metric_fit->fallthrough();
    metric_fit->add_option("--data", ctx.data_path, "dataset CSV")->required();
    metric_fit->add_option("--schema", ctx.schema_path, "schema JSON")->required();
    metric_fit->add_option("--metric", ctx.metric_name, "the metric the auditee chose")
        ->required();
    metric_fit
        ->add_option("--imbalance-threshold", ctx.imbalance_threshold,
                     "minority proportion below which accuracy warns")
        ->capture_default_str();
    metric_fit->callback([&ctx] { run_check_metric_fit(ctx); });

    auto* diagnose = app.add_subcommand("diagnose", "model-level diagnostics");
    diagnose->require_subcommand(1);
    diagnose->fallthrough();
    auto* overfit = diagnose->add_subcommand("overfit", "train/test performance gap");
    overfit->fallthrough();
    overfit->add_option("--train", ctx.train_value, "training set value")->required();
    overfit->add_option("--test", ctx.test_value, "test set value")->required();
    overfit->add_flag("--lower-is-better", ctx.lower_is_better,
                      "treat the values as risks/losses instead of scores");
    overfit->add_option("--threshold", ctx.gap_threshold, "gap above which to warn")
        ->capture_default_str();
    overfit->callback([&ctx] { run_diagnose_overfit(ctx); });

    auto* sweep = diagnose->add_subcommand("sweep", "capacity sweep regime analysis");
    sweep->fallthrough();
    sweep->add_option("--sweep", ctx.sweep_path, "capacity sweep JSON")->required();
    sweep->callback([&ctx] { run_diagnose_sweep(ctx); });

    auto* loss = diagnose->add_subcommand("loss", "loss/task consistency");
    loss->fallthrough();
    loss->add_option("--model", ctx.model_path, "model descriptor JSON")->required();
    loss->callback([&ctx] { run_diagnose_loss(ctx); });

    auto* prob = diagnose->add_subcommand("prob-outputs", "probability output validation");
    prob->fallthrough();
    prob->add_option("--matrix", ctx.matrix_path, "score matrix CSV")->required();
    prob->add_option("--tol", ctx.tol, "tolerance for sums and negativity")
        ->capture_default_str();
    prob->callback([&ctx] { run_diagnose_prob_outputs(ctx); });

    auto* min_perf = diagnose->add_subcommand("min-perf", "minimum performance requirements");
    min_perf->fallthrough();
    min_perf->add_option("--measured", ctx.measured_path, "measured metric values JSON")
        ->required();
    min_perf->add_option("--requirements", ctx.requirements_path, "requirements JSON")
        ->required();
    min_perf->callback([&ctx] { run_diagnose_min_perf(ctx); });

    auto* catalog = app.add_subcommand("catalog", "requirements catalog engine");
    catalog->require_subcommand(1);
    catalog->fallthrough();
    auto* evaluate = catalog->add_subcommand("evaluate", "conformity decision for an assessment");
    evaluate->fallthrough();
    evaluate->add_option("--catalog", ctx.catalog_path, "catalog JSON")->required();
    evaluate->add_option("--assessment", ctx.assessment_path, "assessment JSON")->required();
    evaluate->add_option("--target-cl", ctx.target_cl, "criticality level to audit against")
        ->required();
    evaluate->callback([&ctx] { run_catalog_evaluate(ctx); });

    auto* cl_cmd = catalog->add_subcommand("cl", "criticality level from an impact assessment");
    cl_cmd->fallthrough();
    cl_cmd->add_option("--impact", ctx.impact_path, "impact assessment JSON")->required();
    cl_cmd->callback([&ctx] { run_catalog_cl(ctx); });

    auto* case_cmd = app.add_subcommand("case", "certification case lifecycle");
    case_cmd->require_subcommand(1);
    case_cmd->fallthrough();
    auto* init = case_cmd->add_subcommand("init", "open a new certification case");
    init->fallthrough();
    init->add_option("--scope", ctx.scope, "what is being certified")->required();
    init->add_option("--target-cl", ctx.target_cl, "target criticality level")->required();
    init->add_option("--case-file", ctx.case_path, "where to store the case event log")
        ->required();
    init->add_option("--case-id", ctx.case_id,
                     "explicit case id (default: derived from scope, CL and date)");
    init->callback([&ctx] { run_case_init(ctx); });

    auto* advance_cmd = case_cmd->add_subcommand("advance", "apply one lifecycle event");
    advance_cmd->fallthrough();
    advance_cmd->add_option("--case-file", ctx.case_path, "case event log JSON")->required();
    advance_cmd->add_option("--event", ctx.event_name, "event kind")->required();
    advance_cmd->add_option("--decision", ctx.decision_name,
                            "conformity decision (deliver_report)");
    advance_cmd->add_option("--severity", ctx.severity_name,
                            "major or minor (model_changed)");
    advance_cmd->add_option("--outcome", ctx.outcome, "free text (record_monitoring_audit)");
    advance_cmd->callback([&ctx] { run_case_advance(ctx); });

    auto* status = case_cmd->add_subcommand("status", "state and certificate status");
    status->fallthrough();
    status->add_option("--case-file", ctx.case_path, "case event log JSON")->required();
    status->callback([&ctx] { run_case_status(ctx); });

    auto* report_cmd = app.add_subcommand("report", "report utilities");
    report_cmd->require_subcommand(1);
    report_cmd->fallthrough();
    auto* render = report_cmd->add_subcommand("render", "re-render a stored JSON report");
    render->fallthrough();
    render->add_option("--in", ctx.in_path, "report JSON file")->required();
    render->callback([&ctx] { run_report_render(ctx); });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("mlaudit");
    for (const std::string& arg : args) {
        argv.push_back(arg.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return ctx.exit_code;
}

} // namespace mlaudit
