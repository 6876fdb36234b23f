#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace spider {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A message violated the wire grammar or one of its invariants.
class CodecError : public Error {
public:
    using Error::Error;
};

/// Malformed input; carries the byte offset where parsing stopped.
class ParseError : public CodecError {
public:
    ParseError(const std::string& what, std::size_t offset)
        : CodecError(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// The caller used an operation outside its contract.
class UsageError : public Error {
public:
    using Error::Error;
};

/// URL scheme this engine does not speak (routed elsewhere by the CLI).
class UnsupportedSchemeError : public UsageError {
public:
    using UsageError::UsageError;
};

enum class NetFault {
    UnknownHost,
    ConnectRefused,
    ConnectFailed,
    Timeout,
    PrematureClose,
    Truncated,
    Io,
};

/// Connection-level failure; `fault()` distinguishes the cause.
class NetworkError : public Error {
public:
    NetworkError(NetFault fault, const std::string& what) : Error(what), fault_(fault) {}

    NetFault fault() const noexcept { return fault_; }

private:
    NetFault fault_;
};

/// Peer closed after Content-Length promised more; keeps what did arrive.
class TruncationError : public NetworkError {
public:
    TruncationError(const std::string& what, std::string partial)
        : NetworkError(NetFault::Truncated, what), partial_(std::move(partial)) {}

    const std::string& partial() const noexcept { return partial_; }

private:
    std::string partial_;
};

/// The peer broke protocol (e.g. 304 with no validator ever sent).
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// A configured page or byte budget ran out; the job must halt.
class BudgetExhaustedError : public Error {
public:
    using Error::Error;
};

/// The target is excluded by the host's robots.txt for this agent.
class RobotsDeniedError : public Error {
public:
    using Error::Error;
};

/// FTP server replied with a failure code.
class FtpError : public ProtocolError {
public:
    FtpError(int reply_code, const std::string& what)
        : ProtocolError(what), reply_code_(reply_code) {}

    int reply_code() const noexcept { return reply_code_; }

private:
    int reply_code_;
};

/// Login rejected (530).
class FtpAuthError : public FtpError {
public:
    using FtpError::FtpError;
};

/// RETR target does not exist on the server (550).
class FtpFileMissingError : public FtpError {
public:
    using FtpError::FtpError;
};

} // namespace spider
