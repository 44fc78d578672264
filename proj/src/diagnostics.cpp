#include "mlaudit/diagnostics.hpp"

#include "mlaudit/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace mlaudit {

namespace {

std::string slurp(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(std::string("cannot open ") + what + " file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json parse_json(const std::string& text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string(what) + " is not valid JSON: " + e.what());
    }
}

} // namespace

std::string to_string(OutputSpec spec) {
    switch (spec) {
        case OutputSpec::probability_vector: return "probability_vector";
        case OutputSpec::scalar_probability: return "scalar_probability";
        case OutputSpec::real_value: return "real_value";
        case OutputSpec::real_vector: return "real_vector";
    }
    throw InputError("unknown output spec");
}

OutputSpec output_spec_from_string(const std::string& name) {
    if (name == "probability_vector") return OutputSpec::probability_vector;
    if (name == "scalar_probability") return OutputSpec::scalar_probability;
    if (name == "real_value") return OutputSpec::real_value;
    if (name == "real_vector") return OutputSpec::real_vector;
    throw SchemaError("unknown output spec: " + name);
}

ModelDescriptor parse_model_descriptor(const std::string& json_text) {
    const nlohmann::json doc = parse_json(json_text, "model descriptor");
    if (!doc.is_object()) {
        throw SchemaError("model descriptor must be a JSON object");
    }
    for (const char* field : {"family", "loss", "output", "task"}) {
        if (!doc.contains(field)) {
            throw SchemaError(std::string("model descriptor misses '") + field + "'");
        }
    }
    ModelDescriptor d;
    try {
        d.family_name = doc.at("family").get<std::string>();
        d.declared_loss = loss_kind_from_string(doc.at("loss").get<std::string>());
        d.output_spec = output_spec_from_string(doc.at("output").get<std::string>());
        d.task = task_kind_from_string(doc.at("task").get<std::string>());
        if (doc.contains("capacity")) {
            d.capacity_proxy = doc.at("capacity").get<double>();
        }
        if (doc.contains("k")) {
            d.k = doc.at("k").get<int>();
        }
        if (doc.contains("hyperparameters")) {
            for (const auto& [key, value] : doc.at("hyperparameters").items()) {
                d.hyperparameters[key] =
                    value.is_string() ? value.get<std::string>() : value.dump();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("model descriptor field has the wrong type: ") + e.what());
    } catch (const InputError& e) {
        throw SchemaError(e.what());
    }
    if (d.capacity_proxy && !(*d.capacity_proxy > 0)) {
        throw SchemaError("capacity must be positive");
    }
    if (d.task == TaskKind::binary_classification && d.k != 2) {
        throw SchemaError("binary classification has k=2");
    }
    if (is_classification(d.task) && d.k < 2) {
        throw SchemaError("classification needs k >= 2");
    }
    return d;
}

ModelDescriptor load_model_descriptor_file(const std::string& path) {
    return parse_model_descriptor(slurp(path, "model descriptor"));
}

OverfitVerdict overfit_gap(double train_value, double test_value, bool higher_is_better,
                           double rel_threshold) {
    if (!std::isfinite(train_value) || !std::isfinite(test_value)) {
        throw InputError("non-finite performance value");
    }
    if (!std::isfinite(rel_threshold) || rel_threshold < 0) {
        throw ConfigError("overfit threshold must be non-negative");
    }
    OverfitVerdict v;
    v.threshold = rel_threshold;
    v.gap = higher_is_better ? train_value - test_value : test_value - train_value;
    v.overfit_suspected = v.gap > rel_threshold;
    return v;
}

namespace {

void validate_sweep(const CapacitySweep& sweep) {
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        const auto& p = sweep.points[i];
        if (!(p.capacity > 0) || !std::isfinite(p.capacity)) {
            throw InputError("sweep capacities must be positive reals");
        }
        if (!std::isfinite(p.train_risk) || !std::isfinite(p.test_risk)) {
            throw InputError("sweep risks must be finite");
        }
        if (i > 0 && !(sweep.points[i - 1].capacity < p.capacity)) {
            throw InputError("sweep capacities must be strictly increasing");
        }
    }
}

} // namespace

CapacitySweep parse_capacity_sweep(const std::string& json_text) {
    const nlohmann::json doc = parse_json(json_text, "capacity sweep");
    if (!doc.is_object() || !doc.contains("points") || !doc.at("points").is_array()) {
        throw SchemaError("capacity sweep must be an object with a 'points' array");
    }
    CapacitySweep sweep;
    for (const auto& entry : doc.at("points")) {
        SweepPoint p;
        try {
            p.capacity = entry.at("capacity").get<double>();
            p.train_risk = entry.at("train_risk").get<double>();
            p.test_risk = entry.at("test_risk").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("sweep point is malformed: ") + e.what());
        }
        sweep.points.push_back(p);
    }
    try {
        validate_sweep(sweep);
    } catch (const InputError& e) {
        throw SchemaError(e.what());
    }
    return sweep;
}

CapacitySweep load_capacity_sweep_file(const std::string& path) {
    return parse_capacity_sweep(slurp(path, "capacity sweep"));
}

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::underfitting: return "underfitting";
        case Regime::sweet_spot: return "sweet_spot";
        case Regime::overfitting: return "overfitting";
    }
    throw InputError("unknown regime");
}

SweepAnalysis capacity_sweep_analysis(const CapacitySweep& sweep) {
    if (sweep.points.size() < 3) {
        throw InputError("regime analysis needs at least 3 sweep points");
    }
    validate_sweep(sweep);

    std::size_t best = 0;
    for (std::size_t i = 1; i < sweep.points.size(); ++i) {
        if (sweep.points[i].test_risk < sweep.points[best].test_risk) {
            best = i; // strict: ties keep the smaller capacity
        }
    }

    SweepAnalysis analysis;
    analysis.sweet_spot_capacity = sweep.points[best].capacity;
    analysis.regimes.reserve(sweep.points.size());
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        analysis.regimes.push_back(i < best   ? Regime::underfitting
                                   : i == best ? Regime::sweet_spot
                                               : Regime::overfitting);
    }
    // The classical picture is a U: non-increasing into the minimum,
    // non-decreasing out of it. Anything else gets the non-unimodal flag.
    for (std::size_t i = 1; i < sweep.points.size(); ++i) {
        const double prev = sweep.points[i - 1].test_risk;
        const double cur = sweep.points[i].test_risk;
        if ((i <= best && cur > prev) || (i > best && cur < prev)) {
            analysis.non_unimodal = true;
        }
    }
    return analysis;
}

ConsistencyVerdict check_loss_task_consistency(const ModelDescriptor& d) {
    ConsistencyVerdict v;
    const std::string loss = to_string(d.declared_loss);
    const std::string output = to_string(d.output_spec);
    switch (d.task) {
        case TaskKind::multiclass_classification: {
            v.expected = "cross_entropy loss with a probability_vector output";
            if (d.declared_loss != LossKind::cross_entropy) {
                v.reason = "cross_entropy required for multiclass classification, not " + loss;
            } else if (d.output_spec != OutputSpec::probability_vector) {
                v.reason = "multiclass outputs must be a probability_vector, not " + output;
            }
            break;
        }
        case TaskKind::binary_classification: {
            v.expected =
                "binary_cross_entropy (or cross_entropy with k=2) with a probability output";
            const bool loss_ok = d.declared_loss == LossKind::binary_cross_entropy ||
                                 (d.declared_loss == LossKind::cross_entropy && d.k == 2);
            const bool output_ok = d.output_spec == OutputSpec::scalar_probability ||
                                   d.output_spec == OutputSpec::probability_vector;
            if (!loss_ok) {
                v.reason = "binary_cross_entropy required for binary classification, not " + loss;
            } else if (!output_ok) {
                v.reason = "binary outputs must be probabilities, not " + output;
            }
            break;
        }
        case TaskKind::multilabel_classification: {
            v.expected = "binary_cross_entropy per label with a real_vector of probabilities";
            if (d.declared_loss != LossKind::binary_cross_entropy) {
                v.reason =
                    "binary_cross_entropy per label required for multilabel tasks, not " + loss;
            } else if (d.output_spec != OutputSpec::real_vector) {
                v.reason = "multilabel outputs must be a real_vector of per-label "
                           "probabilities, not " + output;
            }
            break;
        }
        case TaskKind::regression: {
            v.expected = "squared or absolute loss with a real-valued output";
            const bool loss_ok = d.declared_loss == LossKind::squared ||
                                 d.declared_loss == LossKind::absolute;
            const bool output_ok = d.output_spec == OutputSpec::real_value ||
                                   d.output_spec == OutputSpec::real_vector;
            if (!loss_ok) {
                v.reason = "squared or absolute loss required for regression, not " + loss;
            } else if (!output_ok) {
                v.reason = "regression outputs must be real-valued, not " + output;
            }
            break;
        }
    }
    v.pass = v.reason.empty();
    return v;
}

ProbabilityValidation validate_probability_outputs(
    const std::vector<std::vector<double>>& matrix, double tol) {
    ProbabilityValidation v;
    v.tol = tol;
    v.rows_checked = static_cast<std::int64_t>(matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        if (!is_probability_row(matrix[i], tol)) {
            ++v.total_violations;
            if (v.violating_rows.size() < 100) {
                v.violating_rows.push_back(static_cast<std::int64_t>(i));
            }
        }
    }
    v.pass = v.total_violations == 0;
    return v;
}

std::vector<PerformanceRequirement> parse_performance_requirements(
    const std::string& json_text) {
    const nlohmann::json doc = parse_json(json_text, "requirements file");
    if (!doc.is_array()) {
        throw SchemaError("performance requirements must be a JSON array");
    }
    std::vector<PerformanceRequirement> requirements;
    for (const auto& entry : doc) {
        PerformanceRequirement r;
        try {
            r.metric = entry.at("metric").get<std::string>();
            const std::string op = entry.at("op").get<std::string>();
            if (op == ">=") {
                r.op = PerformanceRequirement::Op::ge;
            } else if (op == "<=") {
                r.op = PerformanceRequirement::Op::le;
            } else {
                throw SchemaError("requirement op must be '>=' or '<='");
            }
            r.bound = entry.at("bound").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("requirement entry is malformed: ") + e.what());
        }
        if (!std::isfinite(r.bound)) {
            throw SchemaError("requirement bound must be finite");
        }
        requirements.push_back(std::move(r));
    }
    return requirements;
}

std::vector<PerformanceRequirement> load_performance_requirements_file(const std::string& path) {
    return parse_performance_requirements(slurp(path, "requirements"));
}

std::map<std::string, double> parse_measured_values(const std::string& json_text) {
    const nlohmann::json doc = parse_json(json_text, "measured values");
    if (!doc.is_object()) {
        throw SchemaError("measured values must be a JSON object");
    }
    std::map<std::string, double> measured;
    for (const auto& [key, value] : doc.items()) {
        if (value.is_null()) {
            continue; // an undefined metric is simply absent
        }
        if (!value.is_number()) {
            throw SchemaError("measured value for '" + key + "' must be a number or null");
        }
        measured[key] = value.get<double>();
    }
    return measured;
}

std::map<std::string, double> load_measured_values_file(const std::string& path) {
    return parse_measured_values(slurp(path, "measured values"));
}

MinPerformanceVerdict check_min_performance(
    const std::map<std::string, double>& measured,
    const std::vector<PerformanceRequirement>& requirements) {
    MinPerformanceVerdict verdict;
    verdict.pass = true;
    for (const auto& requirement : requirements) {
        const auto it = measured.find(requirement.metric);
        if (it == measured.end()) {
            throw InputError("measured values miss metric '" + requirement.metric + "'");
        }
        RequirementOutcome outcome;
        outcome.requirement = requirement;
        outcome.measured = it->second;
        outcome.pass = requirement.op == PerformanceRequirement::Op::ge
                           ? it->second >= requirement.bound
                           : it->second <= requirement.bound;
        verdict.pass = verdict.pass && outcome.pass;
        verdict.outcomes.push_back(std::move(outcome));
    }
    return verdict;
}

MajorityBaseline baseline_majority_performance(const ClassDistribution& dist) {
    MajorityBaseline baseline;
    baseline.majority_class = dist.majority_class();
    baseline.accuracy = dist.majority_proportion();
    baseline.minority_recall = 0.0;
    baseline.balanced_accuracy = 1.0 / static_cast<double>(dist.counts.size());
    return baseline;
}

} // namespace mlaudit
