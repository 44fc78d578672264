#pragma once

#include "mlaudit/dataset.hpp"
#include "mlaudit/metrics.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mlaudit {

enum class OutputSpec { probability_vector, scalar_probability, real_value, real_vector };

std::string to_string(OutputSpec spec);
OutputSpec output_spec_from_string(const std::string& name);

/// Declared shape of the audited model. Parameter values themselves are out
/// of scope; hyperparameters ride along as opaque text.
struct ModelDescriptor {
    std::string family_name;
    std::optional<double> capacity_proxy; // positive when present
    LossKind declared_loss = LossKind::squared;
    OutputSpec output_spec = OutputSpec::real_value;
    TaskKind task = TaskKind::regression;
    int k = 2; // class count where applicable
    std::map<std::string, std::string> hyperparameters;
};

ModelDescriptor parse_model_descriptor(const std::string& json_text);
ModelDescriptor load_model_descriptor_file(const std::string& path);

struct OverfitVerdict {
    bool overfit_suspected = false;
    double gap = 0;       // train-minus-test in the better direction
    double threshold = 0;
};

/// gap = train - test when higher is better, test - train otherwise;
/// suspicion is raised strictly above the threshold.
OverfitVerdict overfit_gap(double train_value, double test_value, bool higher_is_better,
                           double rel_threshold = 0.1);

struct SweepPoint {
    double capacity = 0;
    double train_risk = 0;
    double test_risk = 0;
};

/// Capacities strictly increasing; at least 3 points for regime analysis.
struct CapacitySweep {
    std::vector<SweepPoint> points;
};

CapacitySweep parse_capacity_sweep(const std::string& json_text);
CapacitySweep load_capacity_sweep_file(const std::string& path);

enum class Regime { underfitting, sweet_spot, overfitting };

std::string to_string(Regime regime);

struct SweepAnalysis {
    double sweet_spot_capacity = 0;
    std::vector<Regime> regimes; // one per sweep point
    // True when test risk is not U-shaped around the minimum; the classical
    // regime labels are then unreliable and reported as such.
    bool non_unimodal = false;
};

/// Sweet spot = capacity with minimum test risk, ties to the smaller capacity.
SweepAnalysis capacity_sweep_analysis(const CapacitySweep& sweep);

struct ConsistencyVerdict {
    bool pass = false;
    std::string expected; // the loss/output the task calls for
    std::string reason;   // empty on pass
};

/// Task/loss/output compatibility table; total over the full grid.
ConsistencyVerdict check_loss_task_consistency(const ModelDescriptor& descriptor);

struct ProbabilityValidation {
    bool pass = false;
    std::int64_t rows_checked = 0;
    std::int64_t total_violations = 0;
    std::vector<std::int64_t> violating_rows; // first 100
    double tol = 0;
};

/// Every row must be a probability distribution within tol.
ProbabilityValidation validate_probability_outputs(
    const std::vector<std::vector<double>>& matrix, double tol = 1e-6);

struct PerformanceRequirement {
    std::string metric;
    enum class Op { ge, le } op = Op::ge;
    double bound = 0;
};

/// Requirements file: [{"metric": name, "op": ">="|"<=", "bound": number}].
std::vector<PerformanceRequirement> parse_performance_requirements(const std::string& json_text);
std::vector<PerformanceRequirement> load_performance_requirements_file(const std::string& path);

/// Measured values file: {metric name: number}.
std::map<std::string, double> parse_measured_values(const std::string& json_text);
std::map<std::string, double> load_measured_values_file(const std::string& path);

struct RequirementOutcome {
    PerformanceRequirement requirement;
    double measured = 0;
    bool pass = false;
};

struct MinPerformanceVerdict {
    std::vector<RequirementOutcome> outcomes;
    bool pass = false; // conjunction over outcomes
};

/// Comparators are inclusive; a missing measured metric is an input error.
MinPerformanceVerdict check_min_performance(
    const std::map<std::string, double>& measured,
    const std::vector<PerformanceRequirement>& requirements);

struct MajorityBaseline {
    std::int64_t majority_class = 0;
    double accuracy = 0;          // majority proportion
    double minority_recall = 0;   // always 0 for the constant predictor
    double balanced_accuracy = 0; // 1/k
};

/// What the always-majority constant predictor scores on this distribution.
MajorityBaseline baseline_majority_performance(const ClassDistribution& dist);

} // namespace mlaudit
