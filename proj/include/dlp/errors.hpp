#pragma once

#include <stdexcept>
#include <string>

namespace dlp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input/contract violations on in-memory operations.
struct EmptyInput : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};
struct InsufficientData : Error {
    using Error::Error;
};
struct SingularSystem : Error {
    using Error::Error;
};
struct InvalidBand : Error {
    using Error::Error;
};
struct InvalidThresholds : Error {
    using Error::Error;
};
struct InvalidConfig : Error {
    using Error::Error;
};

// Store-level failures.
struct StoreError : Error {
    using Error::Error;
};
struct IOFailure : StoreError {
    using StoreError::StoreError;
};
struct NotFound : StoreError {
    using StoreError::StoreError;
};
struct CorruptFile : StoreError {
    using StoreError::StoreError;
};
struct SchemaVersionMismatch : StoreError {
    using StoreError::StoreError;
};
struct StoreLocked : StoreError {
    using StoreError::StoreError;
};

} // namespace dlp
