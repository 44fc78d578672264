#pragma once

#include "mlaudit/catalog.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mlaudit {

enum class Verdict { PASS, WARN, FAIL, UNDEFINED };

std::string to_string(Verdict verdict);
Verdict verdict_from_string(const std::string& name);

struct ReportSection {
    std::string name;
    Verdict verdict = Verdict::PASS;
    std::string summary;            // one line for the text renderer
    nlohmann::ordered_json details; // free-form, owned by the producing check
};

/// One audit run: positive and negative findings side by side. The summary
/// counts and the overall verdict are derived from the sections at render
/// time, never stored independently.
struct AuditReport {
    std::string tool_version;
    std::string date; // supplied by the caller; empty = omitted (no wall clock)
    std::map<std::string, std::string> identifiers; // dataset/model/... names
    std::vector<ReportSection> sections;
    std::optional<ConformityResult> conformity;

    void add_section(std::string name, Verdict verdict, std::string summary,
                     nlohmann::ordered_json details = nlohmann::ordered_json::object());
};

/// FAIL if any section failed, else WARN if any warned, else PASS.
/// UNDEFINED sections carry no finding and do not affect the outcome.
Verdict overall_verdict(const AuditReport& report);

/// 0 for PASS, 1 for WARN or FAIL findings.
int exit_code_for(const AuditReport& report);

std::map<Verdict, int> verdict_counts(const AuditReport& report);

enum class ReportFormat { json, text };

/// json: stable key order, schema_version 1, Undefined as null, never NaN.
/// text: one line per section plus the summary footer.
std::string render_report(const AuditReport& report, ReportFormat format);

/// Inverse of the json renderer; render(parse(x)) == x for rendered x.
AuditReport parse_report(const std::string& json_text);

nlohmann::ordered_json conformity_to_json(const ConformityResult& result);
ConformityResult conformity_from_json(const nlohmann::json& doc);

inline constexpr int kReportSchemaVersion = 1;

} // namespace mlaudit
