#pragma once

#include <stdexcept>
#include <string>

namespace lapsekit {

/// Runtime failure inside the library (bad data, failed fit, broken file).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: unknown config key, malformed schema, bad flag value.
/// The CLI maps this to exit status 2, everything else to 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace lapsekit
