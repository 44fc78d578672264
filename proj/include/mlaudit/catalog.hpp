#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mlaudit {

struct Requirement {
    std::string id; // unique across the whole catalog
    int cl = 1;     // criticality level 1..4 at which this item activates
    bool critical = false;
    std::string topic;
    std::string description;
    std::vector<std::string> proofs; // expected proof documents, free text
};

struct Chapter {
    std::string title;
    std::vector<Requirement> requirements;
};

struct Catalog {
    std::string name;
    std::string version;
    std::vector<Chapter> chapters;

    const Requirement* find(const std::string& id) const;
    std::size_t requirement_count() const;
};

/// Catalog JSON: {"name", "version", "chapters": [{"title",
/// "requirements": [{"id","cl","critical","topic","description","proofs"}]}]}.
Catalog parse_catalog(const std::string& json_text);
Catalog load_catalog_file(const std::string& path);

/// Dimension name -> impact level 1..4.
struct ImpactAssessment {
    std::map<std::string, int> dimensions;
};

/// Impact JSON: {"dimensions": {name: level}}.
ImpactAssessment parse_impact(const std::string& json_text);
ImpactAssessment load_impact_file(const std::string& path);

/// The overall criticality level is the maximum across dimensions.
int determine_cl(const ImpactAssessment& impact);

enum class AssessmentStatus { fulfilled, partially_fulfilled, not_fulfilled, not_evaluated };

std::string to_string(AssessmentStatus status);
AssessmentStatus assessment_status_from_string(const std::string& name);

struct AssessmentEntry {
    AssessmentStatus status = AssessmentStatus::not_evaluated;
    std::string evidence;
    // Free-form pointer to an automated check result; recorded, not validated.
    std::optional<std::string> evidence_ref;
};

struct Assessment {
    std::map<std::string, AssessmentEntry> entries; // requirement id -> entry
};

/// Assessment JSON: {"entries": {id: {"status", "evidence", "evidence_ref"?}}}.
Assessment parse_assessment(const std::string& json_text);
Assessment load_assessment_file(const std::string& path);

enum class FindingClass { positive, non_substantial, substantial };
enum class Decision { granted, granted_with_conditions, denied, incomplete };

std::string to_string(FindingClass cls);
std::string to_string(Decision decision);
Decision decision_from_string(const std::string& name);

struct Finding {
    std::string requirement_id;
    FindingClass cls = FindingClass::positive;
    std::string note;
};

struct ConformityResult {
    int target_cl = 1;
    Decision decision = Decision::incomplete;
    std::vector<Finding> findings;          // empty while incomplete
    std::vector<std::string> unevaluated;   // applicable ids left unassessed
};

/// Requirements with cl <= target_cl, catalog order preserved.
std::vector<const Requirement*> applicable_requirements(const Catalog& catalog, int target_cl);

/// Classifies every applicable requirement and derives the decision.
/// Unassessed applicable items short-circuit to the incomplete decision;
/// critical items admit no partial credit.
ConformityResult evaluate_assessment(const Catalog& catalog, const Assessment& assessment,
                                     int target_cl);

} // namespace mlaudit
