#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mmwbeam {

/// Caller handed in a value outside an operation's stated domain.
class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the range of an inverse map.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// No beamwidth leaves time for data in the slot.
class infeasible_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class config_error : public std::runtime_error {
public:
    config_error(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class io_error : public std::runtime_error {
public:
    io_error(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

namespace detail {

inline void require(bool condition, const char* message) {
    if (!condition) throw precondition_error(message);
}

} // namespace detail

} // namespace mmwbeam
