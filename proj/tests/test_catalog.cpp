#include "mlaudit/catalog.hpp"
#include "mlaudit/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace mlaudit;

namespace {

Catalog sample_catalog() {
    return load_catalog_file(std::string(MLAUDIT_DATA_DIR) + "/sample_catalog.json");
}

// Assessment covering every applicable requirement with one uniform status.
Assessment uniform_assessment(const Catalog& catalog, int target_cl,
                              AssessmentStatus status) {
    Assessment assessment;
    for (const Requirement* requirement : applicable_requirements(catalog, target_cl)) {
        assessment.entries[requirement->id] = {status, "checked", std::nullopt};
    }
    return assessment;
}

} // namespace

TEST_CASE("sample catalog structure") {
    const Catalog catalog = sample_catalog();
    CHECK_FALSE(catalog.name.empty());
    CHECK(catalog.version == "1.0");
    CHECK(catalog.requirement_count() == 21);
    REQUIRE(catalog.chapters.size() == 3);

    int model_selection = 0;
    int critical = 0;
    std::set<std::string> ids;
    for (const Chapter& chapter : catalog.chapters) {
        for (const Requirement& requirement : chapter.requirements) {
            CHECK(ids.insert(requirement.id).second);
            CHECK(requirement.cl >= 1);
            CHECK(requirement.cl <= 4);
            CHECK_FALSE(requirement.topic.empty());
            CHECK_FALSE(requirement.description.empty());
            if (requirement.id.rfind("MS-", 0) == 0) ++model_selection;
            if (requirement.critical) ++critical;
        }
    }
    CHECK(model_selection == 7);
    CHECK(critical == 3);

    const Requirement* ms3 = catalog.find("MS-3");
    REQUIRE(ms3 != nullptr);
    CHECK(ms3->critical);
    CHECK(ms3->cl == 1);
    CHECK(catalog.find("NOPE") == nullptr);
}

TEST_CASE("applicable requirements honor the criticality gate") {
    const Catalog catalog = sample_catalog();

    const auto at1 = applicable_requirements(catalog, 1);
    const auto at2 = applicable_requirements(catalog, 2);
    const auto at4 = applicable_requirements(catalog, 4);
    CHECK(at1.size() == 16);
    CHECK(at4.size() == 21);
    CHECK(at1.size() < at2.size());
    CHECK(at2.size() <= at4.size());

    for (const Requirement* r : at1) CHECK(r->cl == 1);
    // catalog order is preserved: at1 is a subsequence of at4
    std::size_t cursor = 0;
    for (const Requirement* r : at4) {
        if (cursor < at1.size() && at1[cursor] == r) ++cursor;
    }
    CHECK(cursor == at1.size());

    // the field-test item only activates at CL2
    const auto in1 = std::find_if(at1.begin(), at1.end(),
                                  [](const Requirement* r) { return r->id == "MS-5"; });
    CHECK(in1 == at1.end());
    const auto in2 = std::find_if(at2.begin(), at2.end(),
                                  [](const Requirement* r) { return r->id == "MS-5"; });
    CHECK(in2 != at2.end());

    CHECK_THROWS_AS(applicable_requirements(catalog, 0), InputError);
    CHECK_THROWS_AS(applicable_requirements(catalog, 5), InputError);
}

TEST_CASE("conformity decision: granted") {
    const Catalog catalog = sample_catalog();
    const Assessment assessment =
        uniform_assessment(catalog, 2, AssessmentStatus::fulfilled);
    const ConformityResult result = evaluate_assessment(catalog, assessment, 2);
    CHECK(result.decision == Decision::granted);
    CHECK(result.target_cl == 2);
    CHECK(result.unevaluated.empty());
    CHECK(result.findings.size() == applicable_requirements(catalog, 2).size());
    for (const Finding& finding : result.findings) {
        CHECK(finding.cls == FindingClass::positive);
        CHECK(finding.note.find("fulfilled") != std::string::npos);
    }
}

TEST_CASE("conformity decision: partial credit") {
    const Catalog catalog = sample_catalog();

    // partially fulfilled non-critical item -> conditions, not denial
    Assessment soft = uniform_assessment(catalog, 2, AssessmentStatus::fulfilled);
    soft.entries["MS-6"].status = AssessmentStatus::partially_fulfilled;
    const ConformityResult conditions = evaluate_assessment(catalog, soft, 2);
    CHECK(conditions.decision == Decision::granted_with_conditions);
    const auto finding = std::find_if(
        conditions.findings.begin(), conditions.findings.end(),
        [](const Finding& f) { return f.requirement_id == "MS-6"; });
    REQUIRE(finding != conditions.findings.end());
    CHECK(finding->cls == FindingClass::non_substantial);

    // the same status on a critical item is substantial -> denied
    Assessment hard = uniform_assessment(catalog, 2, AssessmentStatus::fulfilled);
    hard.entries["MS-4"].status = AssessmentStatus::partially_fulfilled;
    const ConformityResult denied = evaluate_assessment(catalog, hard, 2);
    CHECK(denied.decision == Decision::denied);
    const auto hit = std::find_if(denied.findings.begin(), denied.findings.end(),
                                  [](const Finding& f) { return f.requirement_id == "MS-4"; });
    REQUIRE(hit != denied.findings.end());
    CHECK(hit->cls == FindingClass::substantial);
    CHECK(hit->note.find("no partial credit") != std::string::npos);

    // not_fulfilled denies regardless of criticality
    Assessment broken = uniform_assessment(catalog, 2, AssessmentStatus::fulfilled);
    broken.entries["FR-DOC-1"].status = AssessmentStatus::not_fulfilled;
    CHECK(evaluate_assessment(catalog, broken, 2).decision == Decision::denied);

    // denial wins over conditions when both are present
    Assessment mixed = uniform_assessment(catalog, 2, AssessmentStatus::fulfilled);
    mixed.entries["MS-6"].status = AssessmentStatus::partially_fulfilled;
    mixed.entries["MS-4"].status = AssessmentStatus::not_fulfilled;
    CHECK(evaluate_assessment(catalog, mixed, 2).decision == Decision::denied);
}

TEST_CASE("conformity decision: incomplete") {
    const Catalog catalog = sample_catalog();

    Assessment missing = uniform_assessment(catalog, 2, AssessmentStatus::fulfilled);
    missing.entries.erase("MS-5");
    const ConformityResult absent = evaluate_assessment(catalog, missing, 2);
    CHECK(absent.decision == Decision::incomplete);
    CHECK(absent.unevaluated == std::vector<std::string>{"MS-5"});
    CHECK(absent.findings.empty()); // no findings while the picture is incomplete

    // an explicit not_evaluated status is just as incomplete
    Assessment marked = uniform_assessment(catalog, 2, AssessmentStatus::fulfilled);
    marked.entries["MS-5"].status = AssessmentStatus::not_evaluated;
    const ConformityResult flagged = evaluate_assessment(catalog, marked, 2);
    CHECK(flagged.decision == Decision::incomplete);
    CHECK(flagged.unevaluated == std::vector<std::string>{"MS-5"});

    // items above the target level do not gate completeness
    Assessment narrow = uniform_assessment(catalog, 1, AssessmentStatus::fulfilled);
    CHECK(evaluate_assessment(catalog, narrow, 1).decision == Decision::granted);

    // a failing status elsewhere still yields incomplete, not denied
    Assessment both = uniform_assessment(catalog, 2, AssessmentStatus::fulfilled);
    both.entries["MS-4"].status = AssessmentStatus::not_fulfilled;
    both.entries.erase("SSD-1");
    const ConformityResult gated = evaluate_assessment(catalog, both, 2);
    CHECK(gated.decision == Decision::incomplete);
    CHECK(gated.findings.empty());
}

TEST_CASE("conformity input validation") {
    const Catalog catalog = sample_catalog();
    Assessment assessment = uniform_assessment(catalog, 1, AssessmentStatus::fulfilled);
    assessment.entries["GHOST-1"] = {AssessmentStatus::fulfilled, "", std::nullopt};
    CHECK_THROWS_AS(evaluate_assessment(catalog, assessment, 1), InputError);

    CHECK_THROWS_AS(
        evaluate_assessment(catalog, uniform_assessment(catalog, 1, AssessmentStatus::fulfilled), 7),
        InputError);
}

TEST_CASE("decisions are monotone in assessment quality") {
    // Downgrading any single entry can only keep or worsen the decision.
    const Catalog catalog = sample_catalog();
    const auto rank = [](Decision d) {
        switch (d) {
            case Decision::granted: return 0;
            case Decision::granted_with_conditions: return 1;
            case Decision::denied: return 2;
            case Decision::incomplete: return 3;
        }
        return 4;
    };
    const AssessmentStatus ladder[] = {
        AssessmentStatus::fulfilled, AssessmentStatus::partially_fulfilled,
        AssessmentStatus::not_fulfilled};

    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> pick_status(0, 2);
    std::uniform_int_distribution<int> pick_cl(1, 4);
    for (int trial = 0; trial < 300; ++trial) {
        const int cl = pick_cl(rng);
        const auto applicable = applicable_requirements(catalog, cl);
        Assessment assessment;
        for (const Requirement* r : applicable) {
            assessment.entries[r->id] = {ladder[pick_status(rng)], "", std::nullopt};
        }
        const Decision before = evaluate_assessment(catalog, assessment, cl).decision;

        const std::size_t victim =
            std::uniform_int_distribution<std::size_t>(0, applicable.size() - 1)(rng);
        AssessmentEntry& entry = assessment.entries[applicable[victim]->id];
        const int current = entry.status == AssessmentStatus::fulfilled ? 0
                            : entry.status == AssessmentStatus::partially_fulfilled ? 1
                                                                                    : 2;
        entry.status = ladder[std::min(current + 1, 2)];
        const Decision after = evaluate_assessment(catalog, assessment, cl).decision;
        CHECK(rank(after) >= rank(before));
    }
}

TEST_CASE("catalog parsing validation") {
    CHECK_THROWS_AS(parse_catalog("no"), SchemaError);
    CHECK_THROWS_AS(parse_catalog(R"({"chapters": {}})"), SchemaError);
    CHECK_THROWS_AS(parse_catalog(
                        R"({"chapters": [{"title": "c", "requirements": [
                            {"id": "A", "cl": 5, "critical": false,
                             "topic": "t", "description": "d"}]}]})"),
                    SchemaError);
    CHECK_THROWS_AS(parse_catalog(
                        R"({"chapters": [{"title": "c", "requirements": [
                            {"id": "A", "cl": 1, "critical": false, "topic": "t",
                             "description": "d"},
                            {"id": "A", "cl": 2, "critical": true, "topic": "t2",
                             "description": "d2"}]}]})"),
                    SchemaError);
    CHECK_THROWS_AS(parse_catalog(
                        R"({"chapters": [{"title": "c", "requirements": [
                            {"id": "", "cl": 1, "critical": false, "topic": "t",
                             "description": "d"}]}]})"),
                    SchemaError);
    CHECK_THROWS_AS(load_catalog_file("/nonexistent/catalog.json"), InputError);
}

TEST_CASE("assessment parsing") {
    const Assessment assessment = parse_assessment(
        R"({"entries": {
            "MS-3": {"status": "fulfilled", "evidence": "report.pdf",
                     "evidence_ref": "run-42"},
            "MS-4": {"status": "not_evaluated"}
        }})");
    REQUIRE(assessment.entries.size() == 2);
    CHECK(assessment.entries.at("MS-3").status == AssessmentStatus::fulfilled);
    CHECK(assessment.entries.at("MS-3").evidence == "report.pdf");
    CHECK(assessment.entries.at("MS-3").evidence_ref == "run-42");
    CHECK(assessment.entries.at("MS-4").evidence.empty());
    CHECK_FALSE(assessment.entries.at("MS-4").evidence_ref.has_value());

    CHECK_THROWS_AS(parse_assessment(R"({"entries": {"A": {"status": "done"}}})"),
                    SchemaError);
    CHECK_THROWS_AS(parse_assessment(R"({"entries": {"A": {}}})"), SchemaError);
    CHECK_THROWS_AS(parse_assessment(R"({"items": {}})"), SchemaError);
}

TEST_CASE("impact assessment and criticality level") {
    const ImpactAssessment impact = parse_impact(
        R"({"dimensions": {"bodily_harm": 2, "financial": 3, "privacy": 1}})");
    CHECK(impact.dimensions.size() == 3);
    CHECK(determine_cl(impact) == 3);

    ImpactAssessment uniform;
    uniform.dimensions = {{"a", 2}, {"b", 2}};
    CHECK(determine_cl(uniform) == 2);

    ImpactAssessment single;
    single.dimensions = {{"safety", 4}};
    CHECK(determine_cl(single) == 4);

    // raising any one dimension never lowers the level
    ImpactAssessment base;
    base.dimensions = {{"a", 1}, {"b", 2}, {"c", 3}};
    const int before = determine_cl(base);
    for (auto& [name, level] : base.dimensions) {
        ImpactAssessment raised = base;
        raised.dimensions[name] = 4;
        CHECK(determine_cl(raised) >= before);
    }

    CHECK_THROWS_AS(determine_cl(ImpactAssessment{}), InputError);
    ImpactAssessment bad;
    bad.dimensions = {{"a", 9}};
    CHECK_THROWS_AS(determine_cl(bad), InputError);

    CHECK_THROWS_AS(parse_impact(R"({"dimensions": {"a": 0}})"), SchemaError);
    CHECK_THROWS_AS(parse_impact(R"({"dimensions": {"a": 2.5}})"), SchemaError);
    CHECK_THROWS_AS(parse_impact(R"({"levels": {}})"), SchemaError);
}

TEST_CASE("status and decision names round trip") {
    for (AssessmentStatus status :
         {AssessmentStatus::fulfilled, AssessmentStatus::partially_fulfilled,
          AssessmentStatus::not_fulfilled, AssessmentStatus::not_evaluated}) {
        CHECK(assessment_status_from_string(to_string(status)) == status);
    }
    CHECK_THROWS_AS(assessment_status_from_string("perfect"), SchemaError);

    for (Decision decision : {Decision::granted, Decision::granted_with_conditions,
                              Decision::denied, Decision::incomplete}) {
        CHECK(decision_from_string(to_string(decision)) == decision);
    }
    CHECK_THROWS_AS(decision_from_string("approved"), SchemaError);
}

TEST_CASE("status grid on a critical and a non-critical item") {
    // 2 x 4 grid: criticality x status, exhaustively
    Catalog catalog;
    Chapter chapter;
    chapter.title = "c";
    chapter.requirements.push_back({"N", 1, false, "normal", "d", {}});
    chapter.requirements.push_back({"C", 1, true, "crit", "d", {}});
    catalog.chapters.push_back(chapter);

    const auto decide = [&](AssessmentStatus normal, AssessmentStatus crit) {
        Assessment a;
        a.entries["N"] = {normal, "", std::nullopt};
        a.entries["C"] = {crit, "", std::nullopt};
        return evaluate_assessment(catalog, a, 1).decision;
    };
    const auto F = AssessmentStatus::fulfilled;
    const auto P = AssessmentStatus::partially_fulfilled;
    const auto X = AssessmentStatus::not_fulfilled;
    const auto U = AssessmentStatus::not_evaluated;

    CHECK(decide(F, F) == Decision::granted);
    CHECK(decide(P, F) == Decision::granted_with_conditions);
    CHECK(decide(X, F) == Decision::denied);
    CHECK(decide(U, F) == Decision::incomplete);
    CHECK(decide(F, P) == Decision::denied); // critical: partial is substantial
    CHECK(decide(F, X) == Decision::denied);
    CHECK(decide(F, U) == Decision::incomplete);
    CHECK(decide(P, P) == Decision::denied);
    CHECK(decide(X, X) == Decision::denied);
    CHECK(decide(U, U) == Decision::incomplete);
}
