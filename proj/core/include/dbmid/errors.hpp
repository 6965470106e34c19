#pragma once

#include <stdexcept>
#include <string>

namespace dbmid {

// User-facing errors (bad inputs, bad config, unreadable files) map to
// CLI exit code 1; internal errors (numeric blowups) map to exit code 2.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArgumentError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct FormatError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DatasetError : Error {
    using Error::Error;
};

struct CheckpointError : Error {
    using Error::Error;
};

struct RegistrationError : Error {
    using Error::Error;
};

// Internal failure: something went numerically wrong mid-computation.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace dbmid
