#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dialogos {

// Root of every error the platform throws. Callers that only need to report
// a failure can catch this; the subclasses exist so that the CLI can map
// configuration problems and runtime problems to different exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& what)
        : Error("parse error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class BuildError : public Error {
public:
    using Error::Error;
};

class QueryError : public Error {
public:
    using Error::Error;
};

class LoadError : public Error {
public:
    LoadError(const std::string& path, const std::string& reason)
        : Error("cannot load " + path + ": " + reason), path_(path), reason_(reason) {}

    const std::string& path() const noexcept { return path_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string path_;
    std::string reason_;
};

class LifecycleError : public Error {
public:
    using Error::Error;
};

class AssemblyError : public Error {
public:
    using Error::Error;
};

class StepError : public Error {
public:
    StepError(std::string module, const std::string& reason)
        : Error("module '" + module + "' failed: " + reason), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

class GenerationError : public Error {
public:
    using Error::Error;
};

class SimulationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : Error(join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& problems) {
        std::string out = "invalid configuration";
        for (const auto& p : problems) out += "\n  - " + p;
        return out;
    }

    std::vector<std::string> problems_;
};

}  // namespace dialogos
