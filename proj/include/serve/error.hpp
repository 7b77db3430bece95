#pragma once

#include <stdexcept>
#include <string>

namespace serve {

// Root of every error thrown by the library. The CLI maps InputError to
// exit code 2 and ConfigError to 3; anything else is treated as internal.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// ---- ingest ----
struct EmptyFile : InputError {
    EmptyFile() : InputError("empty input: no header row") {}
};

struct MissingColumn : InputError {
    explicit MissingColumn(const std::string& col)
        : InputError("missing column '" + col + "'"), column(col) {}
    std::string column;
};

struct TypeError : InputError {
    TypeError(std::size_t r, const std::string& col, const std::string& why)
        : InputError("row " + std::to_string(r) + ", column '" + col + "': " + why),
          row(r), column(col) {}
    std::size_t row;
    std::string column;
};

struct InconsistentOutcome : InputError {
    InconsistentOutcome(std::size_t r, const std::string& why)
        : InputError("row " + std::to_string(r) + ": " + why), row(r) {}
    std::size_t row;
};

// ---- model errors ----
struct ModelError : Error {
    using Error::Error;
};

struct DegenerateCounts : ModelError { using ModelError::ModelError; };
struct DomainError : ModelError { using ModelError::ModelError; };
struct BracketError : ModelError { using ModelError::ModelError; };
struct DivisionByZero : ModelError { using ModelError::ModelError; };
struct SingularDenominator : ModelError { using ModelError::ModelError; };
struct NoInteriorSolution : ModelError { using ModelError::ModelError; };
struct ConditionBFailed : ModelError { using ModelError::ModelError; };
struct NoRoot : ModelError { using ModelError::ModelError; };
struct TooFewPoints : ModelError { using ModelError::ModelError; };
struct DegenerateProbability : ModelError { using ModelError::ModelError; };
struct TooManyFailures : ModelError { using ModelError::ModelError; };

struct InvalidBestOf : ConfigError { using ConfigError::ConfigError; };

// Raised by fit_player; `stage` names the step that failed.
struct FitError : ModelError {
    FitError(std::string s, const std::string& what)
        : ModelError(s + ": " + what), stage(std::move(s)) {}
    std::string stage;
};

}  // namespace serve
