#pragma once

#include <stdexcept>
#include <string>

namespace rtcycle {

// Input outside a documented validity window.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A physically impossible state was requested (pinch violation,
// expansion to a higher pressure, cooling below the coolant floor, ...).
// Carries the station or component name so sweep diagnostics can group them.
class infeasible_error : public std::runtime_error {
public:
    infeasible_error(std::string where, const std::string& msg)
        : std::runtime_error(where + ": " + msg), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

// An iterative solve failed to converge or produced non-finite values.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file content; carries a 1-based line number when known.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& msg, long line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

// Incompatible versions or shapes in persisted artifacts.
class format_error : public std::runtime_error {
public:
    explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rtcycle
