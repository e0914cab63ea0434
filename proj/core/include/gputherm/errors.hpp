#ifndef GPUTHERM_ERRORS_HPP
#define GPUTHERM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gputherm {

// Base for all toolchain errors; carries a stable machine-readable code.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line = 0)
        : Error("ParseError", line ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class InvalidSpec : public Error {
public:
    explicit InvalidSpec(const std::string& msg) : Error("InvalidSpec", msg) {}
};

class OverlapError : public Error {
public:
    explicit OverlapError(const std::string& msg) : Error("OverlapError", msg) {}
};

class MismatchedExtent : public Error {
public:
    explicit MismatchedExtent(const std::string& msg) : Error("MismatchedExtent", msg) {}
};

class IncompleteTriple : public Error {
public:
    explicit IncompleteTriple(const std::string& component)
        : Error("IncompleteTriple", "incomplete min/avg/max triple for component " + component) {}
};

class OrderViolation : public Error {
public:
    explicit OrderViolation(const std::string& msg) : Error("OrderViolation", msg) {}
};

class RowLengthMismatch : public Error {
public:
    explicit RowLengthMismatch(const std::string& msg) : Error("RowLengthMismatch", msg) {}
};

class UnknownUnit : public Error {
public:
    explicit UnknownUnit(const std::string& name) : Error("UnknownUnit", "unknown unit: " + name) {}
};

class UnknownComponent : public Error {
public:
    explicit UnknownComponent(const std::string& name)
        : Error("UnknownComponent", "unmapped component: " + name) {}
};

class InvalidGrid : public Error {
public:
    explicit InvalidGrid(const std::string& msg) : Error("InvalidGrid", msg) {}
};

class SolveFailure : public Error {
public:
    explicit SolveFailure(const std::string& msg) : Error("SolveFailure", msg) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error("DimensionMismatch", msg) {}
};

class BadLayerIndex : public Error {
public:
    explicit BadLayerIndex(const std::string& msg) : Error("BadLayerIndex", msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("IoError", msg) {}
};

class MappingNotFound : public Error {
public:
    explicit MappingNotFound(const std::string& path)
        : Error("MappingNotFound", "mapping file not found: " + path) {}
};

} // namespace gputherm

#endif
