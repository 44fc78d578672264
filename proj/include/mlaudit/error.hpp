#pragma once

#include <stdexcept>
#include <string>

namespace mlaudit {

/// Base class for all toolkit errors. The CLI maps these onto exit code 3
/// (usage errors are handled separately by the argument parser).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data: bad CSV cell, NaN target, shape mismatch, unknown id.
class InputError : public Error {
public:
    using Error::Error;
};

/// Document does not match its declared schema (CSV header, catalog JSON, ...).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value, e.g. split ratios that do not sum to one.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A split assignment violates its contract (uncovered row, empty split).
class SplitError : public Error {
public:
    using Error::Error;
};

/// Operation applied to the wrong task kind (e.g. class counts on regression).
class TaskError : public Error {
public:
    using Error::Error;
};

/// Holdout operation applied to a k-fold split or vice versa.
class ModeError : public Error {
public:
    using Error::Error;
};

/// Input admits no meaningful answer, e.g. single-class labels for a ROC curve.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Illegal event for the current certification-case state.
class TransitionError : public Error {
public:
    using Error::Error;
};

/// Malformed date or event date earlier than the case history.
class DateError : public Error {
public:
    using Error::Error;
};

} // namespace mlaudit
