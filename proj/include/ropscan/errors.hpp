#pragma once

#include <stdexcept>
#include <string>

namespace ropscan {

// Image file (RMIM) problems, one kind per distinct failure the loader
// can report.
class ImageFormatError : public std::runtime_error {
public:
    enum class Kind {
        BadMagic,
        BadVersion,
        MalformedHeader,
        OverlappingSegments,
        TruncatedPayload,
    };

    ImageFormatError(Kind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class AddressError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed line in a TSV artifact; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(size_t line, const std::string& msg)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}

    size_t line() const { return line_; }

private:
    size_t line_;
};

class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TrainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GenerationError : public std::runtime_error {
public:
    GenerationError(const std::string& msg, size_t achieved)
        : std::runtime_error(msg), achieved_(achieved) {}

    size_t achieved() const { return achieved_; }

private:
    size_t achieved_;
};

} // namespace ropscan
