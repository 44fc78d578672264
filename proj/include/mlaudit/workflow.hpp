#pragma once

#include "mlaudit/catalog.hpp"
#include "mlaudit/date.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mlaudit {

enum class CaseState {
    gap_analysis,
    kickoff,
    documentation_review,
    audit_interviews,
    technical_inspection,
    reporting,
    certified,
    denied,
    invalidated,
    closed,
};

std::string to_string(CaseState state);
CaseState case_state_from_string(const std::string& name);

enum class EventKind {
    complete_gap_analysis,
    hold_kickoff,
    complete_doc_review,
    complete_interviews,
    complete_inspection,
    deliver_report,
    issue_certificate,
    record_monitoring_audit,
    model_changed,
    start_recertification,
    close,
};

std::string to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& name);

/// All event kinds, for exhaustive transition-table checks.
const std::vector<EventKind>& all_event_kinds();

enum class ChangeSeverity { major, minor };

std::string to_string(ChangeSeverity severity);
ChangeSeverity change_severity_from_string(const std::string& name);

struct CaseEvent {
    EventKind kind = EventKind::close;
    Date date;
    // Payloads, populated per kind:
    std::optional<Decision> decision;        // deliver_report
    std::optional<std::string> outcome;      // record_monitoring_audit
    std::optional<ChangeSeverity> severity;  // model_changed
};

struct Certificate {
    Date issue_date;
    Date expiry_date; // issue + 3 calendar years
    std::vector<Date> monitoring_audit_dates;
};

enum class CertificateStatus { valid, monitoring_overdue, expired, invalidated, none };

std::string to_string(CertificateStatus status);

/// Days past each issue anniversary before a missing monitoring audit makes
/// the certificate overdue.
inline constexpr std::int64_t kMonitoringGraceDays = 30;

/// Event-sourced certification case: the event log is the source of truth,
/// state is derived by replay and never stored.
class CertificationCase {
public:
    /// Auto-generates a fresh case id from a process-local counter.
    static CertificationCase create(const std::string& scope, int target_cl, Date created);
    CertificationCase(std::string case_id, std::string scope, int target_cl, Date created);

    /// Applies one event; throws TransitionError when the event is illegal in
    /// the current state and DateError when its date precedes the history.
    void advance(const CaseEvent& event);

    CaseState state() const { return state_; }
    const std::string& case_id() const { return case_id_; }
    const std::string& scope() const { return scope_; }
    int target_cl() const { return target_cl_; }
    const std::optional<Certificate>& certificate() const { return certificate_; }
    /// Set by a minor model change, cleared by the next monitoring audit.
    bool follow_up_audit_due() const { return follow_up_audit_due_; }

    struct LoggedEvent {
        std::string kind; // event kind, or "created" for the opening entry
        Date date;
        std::optional<Decision> decision;
        std::optional<std::string> outcome;
        std::optional<ChangeSeverity> severity;
    };
    const std::vector<LoggedEvent>& history() const { return history_; }

    CertificateStatus certificate_status(const Date& query_date) const;

    /// {"case_id", "scope", "target_cl", "events": [{kind, date, payload?}]}
    std::string to_json() const;
    /// Replays a persisted event log through advance.
    static CertificationCase from_json(const std::string& json_text);
    static CertificationCase load_file(const std::string& path);

private:
    std::string case_id_;
    std::string scope_;
    int target_cl_ = 1;
    CaseState state_ = CaseState::gap_analysis;
    std::vector<LoggedEvent> history_;
    std::optional<Certificate> certificate_;
    std::optional<Decision> delivered_decision_; // while in reporting
    bool follow_up_audit_due_ = false;
};

/// Opens a case in gap analysis with a generated id.
CertificationCase new_case(const std::string& scope, int target_cl, Date created);

} // namespace mlaudit
