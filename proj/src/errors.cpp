#include "foodprov/errors.hpp"

namespace foodprov {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "PARSE_ERROR";
        case ErrorCode::NonCanonicalValue: return "NON_CANONICAL_VALUE";
        case ErrorCode::GridTooSmall: return "GRID_TOO_SMALL";
        case ErrorCode::WrongShape: return "WRONG_SHAPE";
        case ErrorCode::EmptyBatch: return "EMPTY_BATCH";
        case ErrorCode::NonContiguous: return "NON_CONTIGUOUS";
        case ErrorCode::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
        case ErrorCode::UnknownField: return "UNKNOWN_FIELD";
        case ErrorCode::CorruptLog: return "CORRUPT_LOG";
        case ErrorCode::DuplicateSubmission: return "DUPLICATE_SUBMISSION";
        case ErrorCode::InvalidState: return "INVALID_STATE";
        case ErrorCode::PolicyNotMonotone: return "POLICY_NOT_MONOTONE";
        case ErrorCode::NoAdoptions: return "NO_ADOPTIONS";
        case ErrorCode::ZeroTotalWeight: return "ZERO_TOTAL_WEIGHT";
        case ErrorCode::NoAcceptedRecords: return "NO_ACCEPTED_RECORDS";
        case ErrorCode::DivisionByZero: return "DIVISION_BY_ZERO";
        case ErrorCode::ZeroVariance: return "ZERO_VARIANCE";
        case ErrorCode::EmptyTask: return "EMPTY_TASK";
        case ErrorCode::LockHeld: return "LOCK_HELD";
        case ErrorCode::IoError: return "IO_ERROR";
        case ErrorCode::UsageError: return "USAGE_ERROR";
    }
    return "UNKNOWN";
}

std::string Error::to_string() const {
    std::string out = error_code_name(code);
    if (!message.empty()) {
        out += ": ";
        out += message;
    }
    if (position >= 0) {
        out += " (at ";
        out += std::to_string(position);
        out += ")";
    }
    return out;
}

}  // namespace foodprov
