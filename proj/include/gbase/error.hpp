#pragma once

#include <stdexcept>
#include <string>

namespace gbase {

/// Base of every error thrown by the library. `kind()` is a short
/// machine-readable tag used by the CLI for its one-line error prefix.
class error : public std::runtime_error {
public:
    error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class invalid_coefficients : public error {
public:
    explicit invalid_coefficients(const std::string& what) : error("invalid-coefficients", what) {}
};

/// Raised when an operation needs a level above the stored G-sequence.
class capacity_error : public error {
public:
    capacity_error(const std::string& what, int required_level)
        : error("capacity", what + " (requires max_level >= " + std::to_string(required_level) + ")"),
          required_level_(required_level) {}

    int required_level() const noexcept { return required_level_; }

private:
    int required_level_;
};

class domain_error : public error {
public:
    explicit domain_error(const std::string& what) : error("domain", what) {}
};

class index_error : public error {
public:
    explicit index_error(const std::string& what) : error("index", what) {}
};

class numeric_error : public error {
public:
    explicit numeric_error(const std::string& what) : error("numeric", what) {}
};

class parse_error : public error {
public:
    explicit parse_error(const std::string& what) : error("parse", what) {}
};

}  // namespace gbase
