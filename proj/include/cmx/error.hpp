#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmx {

// Exit codes the CLI maps each error kind onto.
enum class ErrorKind { usage = 1, data = 2, io = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

// Malformed input or schema violation. Messages name a 1-based line or a uid.
struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}

    static DataError at_line(std::size_t line, const std::string& what) {
        return DataError("line " + std::to_string(line) + ": " + what);
    }
    static DataError at_uid(const std::string& uid, const std::string& what) {
        return DataError("uid '" + uid + "': " + what);
    }
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace cmx
