#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace amcs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// asp-engine

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t col, const std::string& what)
        : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + what), line_(line), col_(col) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t line_;
    std::size_t col_;
};

class UnsafeRule : public Error {
public:
    UnsafeRule(std::size_t rule_index, std::string variable)
        : Error("unsafe variable " + variable + " in rule " + std::to_string(rule_index)),
          rule_index_(rule_index), variable_(std::move(variable)) {}
    std::size_t rule_index() const noexcept { return rule_index_; }
    const std::string& variable() const noexcept { return variable_; }

private:
    std::size_t rule_index_;
    std::string variable_;
};

class NonGround : public Error {
public:
    using Error::Error;
};

class GroundingBudgetExceeded : public Error {
public:
    using Error::Error;
};

class NonIntegerWeight : public Error {
public:
    using Error::Error;
};

class OracleBudgetExceeded : public Error {
public:
    using Error::Error;
};

// packing-layer

class MixedEoc : public Error {
public:
    using Error::Error;
};

class MixedVariants : public Error {
public:
    using Error::Error;
};

class MultipleSchemas : public Error {
public:
    using Error::Error;
};

class TagConflict : public Error {
public:
    using Error::Error;
};

// amcs-runtime

class ContextBusy : public Error {
public:
    using Error::Error;
};

class UnknownStakeholder : public Error {
public:
    using Error::Error;
};

// scenario

class ValidationError : public Error {
public:
    ValidationError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace amcs
