#include "mlaudit/catalog.hpp"

#include "mlaudit/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
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

const Requirement* Catalog::find(const std::string& id) const {
    for (const Chapter& chapter : chapters) {
        for (const Requirement& requirement : chapter.requirements) {
            if (requirement.id == id) {
                return &requirement;
            }
        }
    }
    return nullptr;
}

std::size_t Catalog::requirement_count() const {
    std::size_t count = 0;
    for (const Chapter& chapter : chapters) {
        count += chapter.requirements.size();
    }
    return count;
}

Catalog parse_catalog(const std::string& json_text) {
    const nlohmann::json doc = parse_json(json_text, "catalog");
    if (!doc.is_object() || !doc.contains("chapters") || !doc.at("chapters").is_array()) {
        throw SchemaError("catalog must be an object with a 'chapters' array");
    }
    Catalog catalog;
    try {
        catalog.name = doc.value("name", std::string{});
        catalog.version = doc.value("version", std::string{});
        std::set<std::string> seen_ids;
        for (const auto& chapter_doc : doc.at("chapters")) {
            Chapter chapter;
            chapter.title = chapter_doc.at("title").get<std::string>();
            for (const auto& req_doc : chapter_doc.value("requirements", nlohmann::json::array())) {
                Requirement r;
                r.id = req_doc.at("id").get<std::string>();
                r.cl = req_doc.at("cl").get<int>();
                r.critical = req_doc.at("critical").get<bool>();
                r.topic = req_doc.at("topic").get<std::string>();
                r.description = req_doc.at("description").get<std::string>();
                for (const auto& proof : req_doc.value("proofs", nlohmann::json::array())) {
                    r.proofs.push_back(proof.get<std::string>());
                }
                if (r.id.empty()) {
                    throw SchemaError("requirement id must be non-empty");
                }
                if (r.cl < 1 || r.cl > 4) {
                    throw SchemaError("requirement '" + r.id + "' has criticality level " +
                                      std::to_string(r.cl) + ", allowed range is 1..4");
                }
                if (!seen_ids.insert(r.id).second) {
                    throw SchemaError("duplicate requirement id '" + r.id + "'");
                }
                chapter.requirements.push_back(std::move(r));
            }
            catalog.chapters.push_back(std::move(chapter));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("catalog entry is malformed: ") + e.what());
    }
    return catalog;
}

Catalog load_catalog_file(const std::string& path) {
    return parse_catalog(slurp(path, "catalog"));
}

ImpactAssessment parse_impact(const std::string& json_text) {
    const nlohmann::json doc = parse_json(json_text, "impact assessment");
    if (!doc.is_object() || !doc.contains("dimensions") || !doc.at("dimensions").is_object()) {
        throw SchemaError("impact assessment must be an object with a 'dimensions' mapping");
    }
    ImpactAssessment impact;
    for (const auto& [name, value] : doc.at("dimensions").items()) {
        if (!value.is_number_integer()) {
            throw SchemaError("impact level for '" + name + "' must be an integer");
        }
        const int level = value.get<int>();
        if (level < 1 || level > 4) {
            throw SchemaError("impact level for '" + name + "' must be in 1..4");
        }
        impact.dimensions[name] = level;
    }
    return impact;
}

ImpactAssessment load_impact_file(const std::string& path) {
    return parse_impact(slurp(path, "impact assessment"));
}

int determine_cl(const ImpactAssessment& impact) {
    if (impact.dimensions.empty()) {
        throw InputError("impact assessment has no dimensions");
    }
    int cl = 1;
    for (const auto& [name, level] : impact.dimensions) {
        if (level < 1 || level > 4) {
            throw InputError("impact level for '" + name + "' must be in 1..4");
        }
        cl = std::max(cl, level);
    }
    return cl;
}

std::string to_string(AssessmentStatus status) {
    switch (status) {
        case AssessmentStatus::fulfilled: return "fulfilled";
        case AssessmentStatus::partially_fulfilled: return "partially_fulfilled";
        case AssessmentStatus::not_fulfilled: return "not_fulfilled";
        case AssessmentStatus::not_evaluated: return "not_evaluated";
    }
    throw InputError("unknown assessment status");
}

AssessmentStatus assessment_status_from_string(const std::string& name) {
    if (name == "fulfilled") return AssessmentStatus::fulfilled;
    if (name == "partially_fulfilled") return AssessmentStatus::partially_fulfilled;
    if (name == "not_fulfilled") return AssessmentStatus::not_fulfilled;
    if (name == "not_evaluated") return AssessmentStatus::not_evaluated;
    throw SchemaError("unknown assessment status: " + name);
}

Assessment parse_assessment(const std::string& json_text) {
    const nlohmann::json doc = parse_json(json_text, "assessment");
    if (!doc.is_object() || !doc.contains("entries") || !doc.at("entries").is_object()) {
        throw SchemaError("assessment must be an object with an 'entries' mapping");
    }
    Assessment assessment;
    for (const auto& [id, entry_doc] : doc.at("entries").items()) {
        AssessmentEntry entry;
        try {
            entry.status = assessment_status_from_string(entry_doc.at("status").get<std::string>());
            entry.evidence = entry_doc.value("evidence", std::string{});
            if (entry_doc.contains("evidence_ref")) {
                entry.evidence_ref = entry_doc.at("evidence_ref").get<std::string>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError("assessment entry '" + id + "' is malformed: " + e.what());
        }
        assessment.entries.emplace(id, std::move(entry));
    }
    return assessment;
}

Assessment load_assessment_file(const std::string& path) {
    return parse_assessment(slurp(path, "assessment"));
}

std::string to_string(FindingClass cls) {
    switch (cls) {
        case FindingClass::positive: return "positive";
        case FindingClass::non_substantial: return "non_substantial";
        case FindingClass::substantial: return "substantial";
    }
    throw InputError("unknown finding class");
}

std::string to_string(Decision decision) {
    switch (decision) {
        case Decision::granted: return "granted";
        case Decision::granted_with_conditions: return "granted_with_conditions";
        case Decision::denied: return "denied";
        case Decision::incomplete: return "incomplete";
    }
    throw InputError("unknown decision");
}

Decision decision_from_string(const std::string& name) {
    if (name == "granted") return Decision::granted;
    if (name == "granted_with_conditions") return Decision::granted_with_conditions;
    if (name == "denied") return Decision::denied;
    if (name == "incomplete") return Decision::incomplete;
    throw SchemaError("unknown conformity decision: " + name);
}

std::vector<const Requirement*> applicable_requirements(const Catalog& catalog, int target_cl) {
    if (target_cl < 1 || target_cl > 4) {
        throw InputError("target criticality level must be in 1..4");
    }
    std::vector<const Requirement*> applicable;
    for (const Chapter& chapter : catalog.chapters) {
        for (const Requirement& requirement : chapter.requirements) {
            if (requirement.cl <= target_cl) {
                applicable.push_back(&requirement);
            }
        }
    }
    return applicable;
}

namespace {

FindingClass classify(const Requirement& requirement, AssessmentStatus status) {
    if (status == AssessmentStatus::fulfilled) {
        return FindingClass::positive;
    }
    // Critical items admit no partial credit; partial fulfillment of a
    // non-critical item is the one non-substantial case.
    if (!requirement.critical && status == AssessmentStatus::partially_fulfilled) {
        return FindingClass::non_substantial;
    }
    return FindingClass::substantial;
}

std::string finding_note(const Requirement& requirement, AssessmentStatus status,
                         const AssessmentEntry& entry) {
    std::string note = requirement.topic + ": " + to_string(status);
    if (requirement.critical && status != AssessmentStatus::fulfilled) {
        note += " (critical item, no partial credit)";
    }
    if (!entry.evidence.empty()) {
        note += "; evidence: " + entry.evidence;
    }
    return note;
}

} // namespace

ConformityResult evaluate_assessment(const Catalog& catalog, const Assessment& assessment,
                                     int target_cl) {
    for (const auto& [id, entry] : assessment.entries) {
        if (catalog.find(id) == nullptr) {
            throw InputError("assessment references unknown requirement '" + id + "'");
        }
    }

    ConformityResult result;
    result.target_cl = target_cl;

    const auto applicable = applicable_requirements(catalog, target_cl);

    // Completeness gate first: an unevaluated catalog cannot be judged.
    for (const Requirement* requirement : applicable) {
        const auto it = assessment.entries.find(requirement->id);
        if (it == assessment.entries.end() ||
            it->second.status == AssessmentStatus::not_evaluated) {
            result.unevaluated.push_back(requirement->id);
        }
    }
    if (!result.unevaluated.empty()) {
        result.decision = Decision::incomplete;
        return result;
    }

    bool any_substantial = false;
    bool any_non_substantial = false;
    for (const Requirement* requirement : applicable) {
        const AssessmentEntry& entry = assessment.entries.at(requirement->id);
        const FindingClass cls = classify(*requirement, entry.status);
        any_substantial = any_substantial || cls == FindingClass::substantial;
        any_non_substantial = any_non_substantial || cls == FindingClass::non_substantial;
        result.findings.push_back(
            {requirement->id, cls, finding_note(*requirement, entry.status, entry)});
    }

    if (any_substantial) {
        result.decision = Decision::denied;
    } else if (any_non_substantial) {
        result.decision = Decision::granted_with_conditions;
    } else {
        result.decision = Decision::granted;
    }
    return result;
}

} // namespace mlaudit
