#ifndef PROTOCLASS_ERRORS_HPP
#define PROTOCLASS_ERRORS_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace protoclass {

enum class ErrorCode {
    ZeroVector,
    DimMismatch,
    EmptyInput,
    NonFinite,
    InsufficientData,
    Io,
    Format,
    Catalog,
    UnknownClass,
    BadTemplate,
    MissingClass,
    KTooLarge,
    LengthMismatch,
    CatalogMismatch,
    Spec,
    CenterSamplingFailed,
    Config,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the engine. The code is stable
/// and is what callers (and the CLI exit path) should branch on.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

enum class FormatReason {
    BadMagic,
    BadVersion,
    Truncated,
    TrailingBytes,
    DimMismatch,
    CountMismatch,
    NonFinite,
    Empty,
    BadManifest,
    BadCaption,
};

std::string_view to_string(FormatReason reason);

class FormatError : public Error {
public:
    FormatError(FormatReason reason, const std::string& message)
        : Error(ErrorCode::Format, std::string(to_string(reason)) + ": " + message), reason_(reason) {}

    FormatReason reason() const noexcept { return reason_; }

private:
    FormatReason reason_;
};

/// Raised by batch operations; wraps the failure of a single item.
class BatchItemError : public Error {
public:
    BatchItemError(std::size_t index, ErrorCode code, const std::string& message)
        : Error(code, "item " + std::to_string(index) + ": " + message), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

} // namespace protoclass

#endif
