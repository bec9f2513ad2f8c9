#pragma once

#include <stdexcept>
#include <string>

namespace weylab {

enum class error_kind { domain, config, infeasible, budget, io };

inline const char* to_string(error_kind kind)
{
    switch (kind) {
    case error_kind::domain: return "domain";
    case error_kind::config: return "config";
    case error_kind::infeasible: return "infeasible";
    case error_kind::budget: return "budget";
    case error_kind::io: return "io";
    }
    return "unknown";
}

/// Base exception for every failure raised by the library. The kind maps
/// one-to-one onto the CLI exit codes.
class error : public std::runtime_error {
public:
    error(error_kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind)
    {
    }

    error_kind kind() const noexcept { return kind_; }

private:
    error_kind kind_;
};

class domain_error : public error {
public:
    explicit domain_error(const std::string& what) : error(error_kind::domain, what) {}
};

class config_error : public error {
public:
    explicit config_error(const std::string& what) : error(error_kind::config, what) {}
};

class infeasible_error : public error {
public:
    explicit infeasible_error(const std::string& what) : error(error_kind::infeasible, what) {}
};

class budget_error : public error {
public:
    explicit budget_error(const std::string& what) : error(error_kind::budget, what) {}
};

class io_error : public error {
public:
    explicit io_error(const std::string& what) : error(error_kind::io, what) {}
};

} // namespace weylab
