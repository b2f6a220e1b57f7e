// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mlcspace {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(int line, int column, std::string expected)
        : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": expected " + expected)
        , line_(line), column_(column), expected_(std::move(expected)) { }

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }
    [[nodiscard]] std::string const& expected() const noexcept { return expected_; }

private:
    int line_;
    int column_;
    std::string expected_;
};

class DuplicateProduction : public Error {
public:
    explicit DuplicateProduction(std::string name)
        : Error("duplicate production <" + name + ">"), name_(std::move(name)) { }
    [[nodiscard]] std::string const& name() const noexcept { return name_; }

private:
    std::string name_;
};

class ContextError : public Error {
public:
    using Error::Error;
};

class EmptyTier : public Error {
public:
    using Error::Error;
};

class UnknownShape : public Error {
public:
    using Error::Error;
};

class UnknownAlgorithm : public Error {
public:
    explicit UnknownAlgorithm(std::string const& id) : Error("unknown algorithm '" + id + "'") { }
};

class SchemaError : public Error {
public:
    SchemaError(std::string path, std::string reason)
        : Error("schema error at " + path + ": " + reason), path_(std::move(path)), reason_(std::move(reason)) { }
    [[nodiscard]] std::string const& path() const noexcept { return path_; }
    [[nodiscard]] std::string const& reason() const noexcept { return reason_; }

private:
    std::string path_;
    std::string reason_;
};

class InvalidConfiguration : public Error {
public:
    using Error::Error;
};

} // namespace mlcspace
