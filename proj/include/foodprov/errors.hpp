#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace foodprov {

// Machine-readable error codes shared across the library. Validation
// findings (LEVEL_TOO_LOW etc.) are report entries, not errors; everything
// here aborts the operation that raised it.
enum class ErrorCode {
    ParseError,
    NonCanonicalValue,
    GridTooSmall,
    WrongShape,
    EmptyBatch,
    NonContiguous,
    IndexOutOfRange,
    UnknownField,
    CorruptLog,
    DuplicateSubmission,
    InvalidState,
    PolicyNotMonotone,
    NoAdoptions,
    ZeroTotalWeight,
    NoAcceptedRecords,
    DivisionByZero,
    ZeroVariance,
    EmptyTask,
    LockHeld,
    IoError,
    UsageError,
};

const char* error_code_name(ErrorCode code);

struct Error {
    ErrorCode code;
    std::string message;
    // Byte offset or line number where applicable (CORRUPT_LOG, PARSE_ERROR).
    std::int64_t position = -1;

    std::string to_string() const;
};

// Minimal value-or-error carrier. Check ok() before dereferencing.
template <typename T>
class [[nodiscard]] Outcome {
public:
    Outcome(T value) : state_(std::move(value)) {}
    Outcome(Error error) : state_(std::move(error)) {}

    bool ok() const { return std::holds_alternative<T>(state_); }
    explicit operator bool() const { return ok(); }

    T& value() { return std::get<T>(state_); }
    const T& value() const { return std::get<T>(state_); }
    T& operator*() { return value(); }
    const T& operator*() const { return value(); }
    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }

    const Error& error() const { return std::get<Error>(state_); }

private:
    std::variant<T, Error> state_;
};

// Outcome for operations with no payload.
class [[nodiscard]] Status {
public:
    Status() = default;
    Status(Error error) : error_(std::move(error)) {}

    bool ok() const { return !error_.has_value(); }
    explicit operator bool() const { return ok(); }
    const Error& error() const { return *error_; }

    static Status success() { return Status{}; }

private:
    std::optional<Error> error_;
};

inline Error make_error(ErrorCode code, std::string message, std::int64_t position = -1) {
    return Error{code, std::move(message), position};
}

}  // namespace foodprov
