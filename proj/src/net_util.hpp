#pragma once

// Internal POSIX socket helpers shared by transport, the FTP client, and
// the testbed. Not part of the public API.

#include "spider/errors.hpp"

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace spider::net {

using Deadline = std::chrono::steady_clock::time_point;

inline Deadline deadline_after(std::chrono::milliseconds timeout) {
    return std::chrono::steady_clock::now() + timeout;
}

/// Owning socket descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
    Socket& operator=(Socket&& other) noexcept;
    ~Socket();

    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    void close();

private:
    int fd_ = -1;
};

/// IPv4 text address for a name; dotted-quad input passes through.
/// Throws NetworkError(UnknownHost) when resolution fails.
std::string resolve_ipv4(const std::string& host);

/// TCP connect with a deadline. Throws NetworkError with fault
/// UnknownHost, ConnectRefused, ConnectFailed, or Timeout.
Socket connect_tcp(const std::string& host, std::uint16_t port, Deadline deadline);

/// Writes everything or throws NetworkError (Timeout or Io).
void write_all(Socket& sock, std::string_view data, Deadline deadline);

/// One read of up to `max` bytes appended to out; returns false on orderly
/// peer close. Throws NetworkError (Timeout or Io).
bool read_some(Socket& sock, std::string& out, std::size_t max, Deadline deadline);

} // namespace spider::net
