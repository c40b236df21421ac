#pragma once

#include <stdexcept>
#include <string>

namespace kupred {

// Base for all recoverable tool errors. Subcommands catch this at the
// release boundary so one bad release cannot take down a whole run.
class Error : public std::runtime_error {
public:
    explicit Error(std::string what) : std::runtime_error(std::move(what)) {}
};

class IoError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace kupred
