#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperlab {

// Failure inside a module's domain. name() is the stable identifier the CLI
// prints and scripts match on (e.g. "division-by-zero", "unlimited").
class DomainError : public std::runtime_error {
public:
    DomainError(std::string name, const std::string& detail)
        : std::runtime_error(name + ": " + detail), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// Malformed input text. pos is a byte offset into the text.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& detail, std::size_t pos)
        : std::runtime_error("syntax error at " + std::to_string(pos) + ": " + detail), pos_(pos) {}

    std::size_t pos() const noexcept { return pos_; }

private:
    std::size_t pos_;
};

}  // namespace hyperlab
