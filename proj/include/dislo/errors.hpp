#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace dislo {

/// A single text record failed to decode.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string field, std::size_t offset, const std::string& what)
        : std::runtime_error(field + ": " + what + " (byte " + std::to_string(offset) + ")"),
          field_(std::move(field)),
          offset_(offset) {}

    const std::string& field() const noexcept { return field_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string field_;
    std::size_t offset_;
};

/// A file is structurally wrong (bad record, unsorted, bad header). Carries location.
class FormatError : public std::runtime_error {
public:
    FormatError(std::string file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// A required input file or directory is missing or unreadable.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal consistency check failed (e.g. timestamps regressed inside the detector).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Bad argument to an analytics routine (too short, zero variance, rank deficient).
class AnalysisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace dislo
