#include "mlaudit/report.hpp"

#include "mlaudit/error.hpp"

#include <sstream>

#ifndef MLAUDIT_VERSION
#define MLAUDIT_VERSION "0.0.0"
#endif

namespace mlaudit {

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::PASS: return "PASS";
        case Verdict::WARN: return "WARN";
        case Verdict::FAIL: return "FAIL";
        case Verdict::UNDEFINED: return "UNDEFINED";
    }
    throw InputError("unknown verdict");
}

Verdict verdict_from_string(const std::string& name) {
    if (name == "PASS") return Verdict::PASS;
    if (name == "WARN") return Verdict::WARN;
    if (name == "FAIL") return Verdict::FAIL;
    if (name == "UNDEFINED") return Verdict::UNDEFINED;
    throw SchemaError("unknown verdict: " + name);
}

void AuditReport::add_section(std::string name, Verdict verdict, std::string summary,
                              nlohmann::ordered_json details) {
    sections.push_back({std::move(name), verdict, std::move(summary), std::move(details)});
}

Verdict overall_verdict(const AuditReport& report) {
    Verdict overall = Verdict::PASS;
    for (const ReportSection& section : report.sections) {
        if (section.verdict == Verdict::FAIL) {
            return Verdict::FAIL;
        }
        if (section.verdict == Verdict::WARN) {
            overall = Verdict::WARN;
        }
    }
    return overall;
}

int exit_code_for(const AuditReport& report) {
    return overall_verdict(report) == Verdict::PASS ? 0 : 1;
}

std::map<Verdict, int> verdict_counts(const AuditReport& report) {
    std::map<Verdict, int> counts{{Verdict::PASS, 0},
                                  {Verdict::WARN, 0},
                                  {Verdict::FAIL, 0},
                                  {Verdict::UNDEFINED, 0}};
    for (const ReportSection& section : report.sections) {
        ++counts[section.verdict];
    }
    return counts;
}

nlohmann::ordered_json conformity_to_json(const ConformityResult& result) {
    nlohmann::ordered_json doc;
    doc["target_cl"] = result.target_cl;
    doc["decision"] = to_string(result.decision);
    nlohmann::ordered_json findings = nlohmann::ordered_json::array();
    for (const Finding& finding : result.findings) {
        nlohmann::ordered_json entry;
        entry["id"] = finding.requirement_id;
        entry["class"] = to_string(finding.cls);
        entry["note"] = finding.note;
        findings.push_back(std::move(entry));
    }
    doc["findings"] = std::move(findings);
    doc["unevaluated"] = result.unevaluated;
    return doc;
}

ConformityResult conformity_from_json(const nlohmann::json& doc) {
    ConformityResult result;
    try {
        result.target_cl = doc.at("target_cl").get<int>();
        result.decision = decision_from_string(doc.at("decision").get<std::string>());
        for (const auto& entry : doc.at("findings")) {
            Finding finding;
            finding.requirement_id = entry.at("id").get<std::string>();
            const std::string cls = entry.at("class").get<std::string>();
            if (cls == "positive") {
                finding.cls = FindingClass::positive;
            } else if (cls == "non_substantial") {
                finding.cls = FindingClass::non_substantial;
            } else if (cls == "substantial") {
                finding.cls = FindingClass::substantial;
            } else {
                throw SchemaError("unknown finding class: " + cls);
            }
            finding.note = entry.at("note").get<std::string>();
            result.findings.push_back(std::move(finding));
        }
        for (const auto& id : doc.at("unevaluated")) {
            result.unevaluated.push_back(id.get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("conformity block is malformed: ") + e.what());
    }
    return result;
}

namespace {

std::string render_json(const AuditReport& report) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["tool_version"] =
        report.tool_version.empty() ? MLAUDIT_VERSION : report.tool_version;
    if (!report.date.empty()) {
        doc["date"] = report.date;
    }
    nlohmann::ordered_json identifiers = nlohmann::ordered_json::object();
    for (const auto& [key, value] : report.identifiers) {
        identifiers[key] = value;
    }
    doc["identifiers"] = std::move(identifiers);

    nlohmann::ordered_json sections = nlohmann::ordered_json::array();
    for (const ReportSection& section : report.sections) {
        nlohmann::ordered_json entry;
        entry["name"] = section.name;
        entry["verdict"] = to_string(section.verdict);
        entry["summary"] = section.summary;
        entry["details"] = section.details;
        sections.push_back(std::move(entry));
    }
    doc["sections"] = std::move(sections);

    if (report.conformity) {
        doc["conformity"] = conformity_to_json(*report.conformity);
    }

    const auto counts = verdict_counts(report);
    nlohmann::ordered_json summary;
    summary["PASS"] = counts.at(Verdict::PASS);
    summary["WARN"] = counts.at(Verdict::WARN);
    summary["FAIL"] = counts.at(Verdict::FAIL);
    summary["UNDEFINED"] = counts.at(Verdict::UNDEFINED);
    doc["summary"] = std::move(summary);
    doc["overall"] = to_string(overall_verdict(report));
    return doc.dump(2) + "\n";
}

std::string render_text(const AuditReport& report) {
    std::ostringstream out;
    out << "mlaudit audit report (tool "
        << (report.tool_version.empty() ? MLAUDIT_VERSION : report.tool_version) << ")\n";
    if (!report.date.empty()) {
        out << "date: " << report.date << "\n";
    }
    for (const auto& [key, value] : report.identifiers) {
        out << key << ": " << value << "\n";
    }
    out << std::string(72, '-') << "\n";
    for (const ReportSection& section : report.sections) {
        out << "[" << to_string(section.verdict) << "] " << section.name;
        if (!section.summary.empty()) {
            out << ": " << section.summary;
        }
        out << "\n";
    }
    if (report.conformity) {
        const ConformityResult& c = *report.conformity;
        out << "conformity: " << to_string(c.decision) << " (target CL " << c.target_cl << ")\n";
        for (const Finding& finding : c.findings) {
            out << "  [" << to_string(finding.cls) << "] " << finding.requirement_id << ": "
                << finding.note << "\n";
        }
        for (const std::string& id : c.unevaluated) {
            out << "  [not_evaluated] " << id << "\n";
        }
    }
    out << std::string(72, '-') << "\n";
    const auto counts = verdict_counts(report);
    out << "sections: " << report.sections.size() << " | PASS " << counts.at(Verdict::PASS)
        << " | WARN " << counts.at(Verdict::WARN) << " | FAIL " << counts.at(Verdict::FAIL)
        << " | UNDEFINED " << counts.at(Verdict::UNDEFINED) << "\n";
    out << "overall: " << to_string(overall_verdict(report)) << "\n";
    return out.str();
}

} // namespace

std::string render_report(const AuditReport& report, ReportFormat format) {
    return format == ReportFormat::json ? render_json(report) : render_text(report);
}

AuditReport parse_report(const std::string& json_text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw SchemaError("report must be a JSON object");
    }
    AuditReport report;
    try {
        if (doc.at("schema_version").get<int>() != kReportSchemaVersion) {
            throw SchemaError("unsupported report schema version");
        }
        report.tool_version = doc.at("tool_version").get<std::string>();
        if (doc.contains("date")) {
            report.date = doc.at("date").get<std::string>();
        }
        if (doc.contains("identifiers")) {
            for (const auto& [key, value] : doc.at("identifiers").items()) {
                report.identifiers[key] = value.get<std::string>();
            }
        }
        for (const auto& entry : doc.at("sections")) {
            ReportSection section;
            section.name = entry.at("name").get<std::string>();
            section.verdict = verdict_from_string(entry.at("verdict").get<std::string>());
            section.summary = entry.at("summary").get<std::string>();
            section.details = entry.at("details");
            report.sections.push_back(std::move(section));
        }
        if (doc.contains("conformity")) {
            report.conformity = conformity_from_json(doc.at("conformity"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("report is malformed: ") + e.what());
    }
    return report;
}

} // namespace mlaudit
