#include "protoclass/errors.hpp"

namespace protoclass {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Format: return "FormatError";
    case ErrorCode::Catalog: return "CatalogError";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::BadTemplate: return "BadTemplate";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::CatalogMismatch: return "CatalogMismatch";
    case ErrorCode::Spec: return "SpecError";
    case ErrorCode::CenterSamplingFailed: return "CenterSamplingFailed";
    case ErrorCode::Config: return "ConfigError";
    }
    return "Unknown";
}

std::string_view to_string(FormatReason reason) {
    switch (reason) {
    case FormatReason::BadMagic: return "badMagic";
    case FormatReason::BadVersion: return "badVersion";
    case FormatReason::Truncated: return "truncated";
    case FormatReason::TrailingBytes: return "trailingBytes";
    case FormatReason::DimMismatch: return "dimMismatch";
    case FormatReason::CountMismatch: return "countMismatch";
    case FormatReason::NonFinite: return "nonFinite";
    case FormatReason::Empty: return "empty";
    case FormatReason::BadManifest: return "badManifest";
    case FormatReason::BadCaption: return "badCaption";
    }
    return "unknown";
}

} // namespace protoclass
