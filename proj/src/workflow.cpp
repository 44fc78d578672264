#include "mlaudit/workflow.hpp"

#include "mlaudit/error.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mlaudit {

std::string to_string(CaseState state) {
    switch (state) {
        case CaseState::gap_analysis: return "GapAnalysis";
        case CaseState::kickoff: return "Kickoff";
        case CaseState::documentation_review: return "DocumentationReview";
        case CaseState::audit_interviews: return "AuditInterviews";
        case CaseState::technical_inspection: return "TechnicalInspection";
        case CaseState::reporting: return "Reporting";
        case CaseState::certified: return "Certified";
        case CaseState::denied: return "Denied";
        case CaseState::invalidated: return "Invalidated";
        case CaseState::closed: return "Closed";
    }
    throw InputError("unknown case state");
}

CaseState case_state_from_string(const std::string& name) {
    if (name == "GapAnalysis") return CaseState::gap_analysis;
    if (name == "Kickoff") return CaseState::kickoff;
    if (name == "DocumentationReview") return CaseState::documentation_review;
    if (name == "AuditInterviews") return CaseState::audit_interviews;
    if (name == "TechnicalInspection") return CaseState::technical_inspection;
    if (name == "Reporting") return CaseState::reporting;
    if (name == "Certified") return CaseState::certified;
    if (name == "Denied") return CaseState::denied;
    if (name == "Invalidated") return CaseState::invalidated;
    if (name == "Closed") return CaseState::closed;
    throw SchemaError("unknown case state: " + name);
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::complete_gap_analysis: return "complete_gap_analysis";
        case EventKind::hold_kickoff: return "hold_kickoff";
        case EventKind::complete_doc_review: return "complete_doc_review";
        case EventKind::complete_interviews: return "complete_interviews";
        case EventKind::complete_inspection: return "complete_inspection";
        case EventKind::deliver_report: return "deliver_report";
        case EventKind::issue_certificate: return "issue_certificate";
        case EventKind::record_monitoring_audit: return "record_monitoring_audit";
        case EventKind::model_changed: return "model_changed";
        case EventKind::start_recertification: return "start_recertification";
        case EventKind::close: return "close";
    }
    throw InputError("unknown event kind");
}

EventKind event_kind_from_string(const std::string& name) {
    for (EventKind kind : all_event_kinds()) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw SchemaError("unknown event kind: " + name);
}

const std::vector<EventKind>& all_event_kinds() {
    static const std::vector<EventKind> kinds = {
        EventKind::complete_gap_analysis,
        EventKind::hold_kickoff,
        EventKind::complete_doc_review,
        EventKind::complete_interviews,
        EventKind::complete_inspection,
        EventKind::deliver_report,
        EventKind::issue_certificate,
        EventKind::record_monitoring_audit,
        EventKind::model_changed,
        EventKind::start_recertification,
        EventKind::close,
    };
    return kinds;
}

std::string to_string(ChangeSeverity severity) {
    return severity == ChangeSeverity::major ? "major" : "minor";
}

ChangeSeverity change_severity_from_string(const std::string& name) {
    if (name == "major") return ChangeSeverity::major;
    if (name == "minor") return ChangeSeverity::minor;
    throw SchemaError("unknown change severity: " + name);
}

std::string to_string(CertificateStatus status) {
    switch (status) {
        case CertificateStatus::valid: return "valid";
        case CertificateStatus::monitoring_overdue: return "monitoring_overdue";
        case CertificateStatus::expired: return "expired";
        case CertificateStatus::invalidated: return "invalidated";
        case CertificateStatus::none: return "none";
    }
    throw InputError("unknown certificate status");
}

namespace {

std::atomic<std::uint64_t> case_counter{0};

std::string next_case_id() {
    const std::uint64_t n = ++case_counter;
    char buf[16];
    std::snprintf(buf, sizeof buf, "CASE-%04llu", static_cast<unsigned long long>(n));
    return buf;
}

} // namespace

CertificationCase CertificationCase::create(const std::string& scope, int target_cl,
                                            Date created) {
    return CertificationCase(next_case_id(), scope, target_cl, created);
}

CertificationCase::CertificationCase(std::string case_id, std::string scope, int target_cl,
                                     Date created)
    : case_id_(std::move(case_id)), scope_(std::move(scope)), target_cl_(target_cl) {
    if (target_cl_ < 1 || target_cl_ > 4) {
        throw InputError("target criticality level must be in 1..4");
    }
    if (case_id_.empty()) {
        throw InputError("case id must be non-empty");
    }
    history_.push_back({"created", created, std::nullopt, std::nullopt, std::nullopt});
}

CertificationCase new_case(const std::string& scope, int target_cl, Date created) {
    return CertificationCase::create(scope, target_cl, created);
}

void CertificationCase::advance(const CaseEvent& event) {
    if (!history_.empty() && event.date < history_.back().date) {
        throw DateError("event date " + event.date.to_string() +
                        " precedes the case history (" + history_.back().date.to_string() + ")");
    }
    auto illegal = [&]() -> TransitionError {
        return TransitionError("event " + to_string(event.kind) + " is illegal in state " +
                               to_string(state_));
    };

    CaseState next = state_;
    switch (event.kind) {
        case EventKind::complete_gap_analysis:
            if (state_ != CaseState::gap_analysis) throw illegal();
            next = CaseState::kickoff;
            break;
        case EventKind::hold_kickoff:
            if (state_ != CaseState::kickoff) throw illegal();
            next = CaseState::documentation_review;
            break;
        case EventKind::complete_doc_review:
            if (state_ != CaseState::documentation_review) throw illegal();
            next = CaseState::audit_interviews;
            break;
        case EventKind::complete_interviews:
            if (state_ != CaseState::audit_interviews) throw illegal();
            next = CaseState::technical_inspection;
            break;
        case EventKind::complete_inspection:
            if (state_ != CaseState::technical_inspection) throw illegal();
            next = CaseState::reporting;
            break;
        case EventKind::deliver_report: {
            if (state_ != CaseState::reporting || delivered_decision_) throw illegal();
            if (!event.decision) {
                throw InputError("deliver_report needs a conformity decision");
            }
            if (*event.decision == Decision::granted ||
                *event.decision == Decision::granted_with_conditions) {
                delivered_decision_ = *event.decision; // certificate now issuable
            } else {
                next = CaseState::denied;
            }
            break;
        }
        case EventKind::issue_certificate: {
            if (state_ != CaseState::reporting || !delivered_decision_) throw illegal();
            Certificate certificate;
            certificate.issue_date = event.date;
            certificate.expiry_date = event.date.add_years(3);
            certificate_ = std::move(certificate);
            next = CaseState::certified;
            break;
        }
        case EventKind::record_monitoring_audit:
            if (state_ != CaseState::certified) throw illegal();
            certificate_->monitoring_audit_dates.push_back(event.date);
            follow_up_audit_due_ = false;
            break;
        case EventKind::model_changed: {
            if (state_ != CaseState::certified) throw illegal();
            if (!event.severity) {
                throw InputError("model_changed needs a severity");
            }
            if (*event.severity == ChangeSeverity::major) {
                next = CaseState::invalidated;
            } else {
                follow_up_audit_due_ = true;
            }
            break;
        }
        case EventKind::start_recertification: {
            // Reduced path: re-enter at the interviews, skipping gap analysis
            // and kickoff. Legal once the certificate is void (invalidated or
            // expired at the event date).
            const bool expired = state_ == CaseState::certified && certificate_ &&
                                 event.date >= certificate_->expiry_date;
            if (state_ != CaseState::invalidated && !expired) throw illegal();
            next = CaseState::audit_interviews;
            break;
        }
        case EventKind::close:
            if (state_ == CaseState::closed) throw illegal();
            next = CaseState::closed;
            break;
    }

    LoggedEvent logged;
    logged.kind = to_string(event.kind);
    logged.date = event.date;
    if (event.kind == EventKind::deliver_report) logged.decision = event.decision;
    if (event.kind == EventKind::record_monitoring_audit) logged.outcome = event.outcome;
    if (event.kind == EventKind::model_changed) logged.severity = event.severity;
    history_.push_back(std::move(logged));

    if (next != state_) {
        state_ = next;
        if (state_ != CaseState::reporting) {
            delivered_decision_.reset();
        }
        // Certificate exists exactly in the certified and invalidated states.
        if (state_ != CaseState::certified && state_ != CaseState::invalidated) {
            certificate_.reset();
            follow_up_audit_due_ = false;
        }
    }
}

CertificateStatus CertificationCase::certificate_status(const Date& query_date) const {
    if (!certificate_) {
        return CertificateStatus::none;
    }
    if (state_ == CaseState::invalidated) {
        return CertificateStatus::invalidated;
    }
    if (query_date >= certificate_->expiry_date) {
        return CertificateStatus::expired;
    }
    for (int year = 1; year <= 2; ++year) {
        const Date anniversary = certificate_->issue_date.add_years(year);
        const Date grace_end = anniversary.add_days(kMonitoringGraceDays);
        if (query_date <= grace_end) {
            continue; // window still open
        }
        bool audited = false;
        for (const Date& audit : certificate_->monitoring_audit_dates) {
            if (audit >= anniversary && audit <= grace_end) {
                audited = true;
                break;
            }
        }
        if (!audited) {
            return CertificateStatus::monitoring_overdue;
        }
    }
    return CertificateStatus::valid;
}

std::string CertificationCase::to_json() const {
    nlohmann::ordered_json doc;
    doc["case_id"] = case_id_;
    doc["scope"] = scope_;
    doc["target_cl"] = target_cl_;
    nlohmann::ordered_json events = nlohmann::ordered_json::array();
    for (const LoggedEvent& event : history_) {
        nlohmann::ordered_json entry;
        entry["kind"] = event.kind;
        entry["date"] = event.date.to_string();
        if (event.decision) entry["decision"] = to_string(*event.decision);
        if (event.outcome) entry["outcome"] = *event.outcome;
        if (event.severity) entry["severity"] = to_string(*event.severity);
        events.push_back(std::move(entry));
    }
    doc["events"] = std::move(events);
    return doc.dump(2);
}

CertificationCase CertificationCase::from_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("case file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("case_id") || !doc.contains("scope") ||
        !doc.contains("target_cl") || !doc.contains("events") || !doc.at("events").is_array() ||
        doc.at("events").empty()) {
        throw SchemaError(
            "case file must carry case_id, scope, target_cl and a non-empty event list");
    }
    try {
        const auto& events = doc.at("events");
        if (events.at(0).at("kind").get<std::string>() != "created") {
            throw SchemaError("the first case event must be 'created'");
        }
        CertificationCase result(doc.at("case_id").get<std::string>(),
                                 doc.at("scope").get<std::string>(),
                                 doc.at("target_cl").get<int>(),
                                 Date::parse(events.at(0).at("date").get<std::string>()));
        for (std::size_t i = 1; i < events.size(); ++i) {
            const auto& entry = events.at(i);
            CaseEvent event;
            event.kind = event_kind_from_string(entry.at("kind").get<std::string>());
            event.date = Date::parse(entry.at("date").get<std::string>());
            if (entry.contains("decision")) {
                event.decision = decision_from_string(entry.at("decision").get<std::string>());
            }
            if (entry.contains("outcome")) {
                event.outcome = entry.at("outcome").get<std::string>();
            }
            if (entry.contains("severity")) {
                event.severity =
                    change_severity_from_string(entry.at("severity").get<std::string>());
            }
            result.advance(event);
        }
        return result;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("case event is malformed: ") + e.what());
    }
}

CertificationCase CertificationCase::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open case file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

} // namespace mlaudit
