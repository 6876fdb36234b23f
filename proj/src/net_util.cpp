#include "net_util.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace spider::net {
namespace {

int remaining_ms(Deadline deadline) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return 0;
    if (left.count() > 60'000) return 60'000;
    return static_cast<int>(left.count());
}

[[noreturn]] void throw_errno(NetFault fault, const std::string& what) {
    throw NetworkError(fault, what + ": " + std::strerror(errno));
}

void wait_io(int fd, short events, Deadline deadline, const std::string& what) {
    while (true) {
        int ms = remaining_ms(deadline);
        if (ms == 0) throw NetworkError(NetFault::Timeout, what + " timed out");
        pollfd pfd{fd, events, 0};
        int rc = ::poll(&pfd, 1, ms);
        if (rc > 0) return;
        if (rc == 0) throw NetworkError(NetFault::Timeout, what + " timed out");
        if (errno != EINTR) throw_errno(NetFault::Io, "poll during " + what);
    }
}

} // namespace

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

Socket::~Socket() {
    close();
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::string resolve_ipv4(const std::string& host) {
    in_addr literal{};
    if (::inet_pton(AF_INET, host.c_str(), &literal) == 1) return host;

    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* results = nullptr;
    int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &results);
    if (rc != 0 || !results)
        throw NetworkError(NetFault::UnknownHost,
                           "cannot resolve \"" + host + "\": " + ::gai_strerror(rc));
    char text[INET_ADDRSTRLEN] = {};
    auto* addr = reinterpret_cast<sockaddr_in*>(results->ai_addr);
    ::inet_ntop(AF_INET, &addr->sin_addr, text, sizeof text);
    ::freeaddrinfo(results);
    return text;
}

Socket connect_tcp(const std::string& host, std::uint16_t port, Deadline deadline) {
    std::string address = resolve_ipv4(host);

    Socket sock(::socket(AF_INET, SOCK_STREAM | SOCK_NONBLOCK, 0));
    if (!sock.valid()) throw_errno(NetFault::ConnectFailed, "socket");

    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(port);
    ::inet_pton(AF_INET, address.c_str(), &sa.sin_addr);

    int rc = ::connect(sock.fd(), reinterpret_cast<sockaddr*>(&sa), sizeof sa);
    if (rc != 0 && errno != EINPROGRESS) {
        if (errno == ECONNREFUSED)
            throw_errno(NetFault::ConnectRefused, "connect to " + address);
        throw_errno(NetFault::ConnectFailed, "connect to " + address);
    }
    if (rc != 0) {
        wait_io(sock.fd(), POLLOUT, deadline, "connect to " + address);
        int err = 0;
        socklen_t len = sizeof err;
        ::getsockopt(sock.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
        if (err != 0) {
            errno = err;
            if (err == ECONNREFUSED)
                throw_errno(NetFault::ConnectRefused, "connect to " + address);
            throw_errno(NetFault::ConnectFailed, "connect to " + address);
        }
    }
    return sock;
}

void write_all(Socket& sock, std::string_view data, Deadline deadline) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        ssize_t n = ::send(sock.fd(), data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n > 0) {
            sent += static_cast<std::size_t>(n);
            continue;
        }
        if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
            wait_io(sock.fd(), POLLOUT, deadline, "send");
            continue;
        }
        if (n < 0 && errno == EINTR) continue;
        throw_errno(NetFault::Io, "send");
    }
}

bool read_some(Socket& sock, std::string& out, std::size_t max, Deadline deadline) {
    char buffer[16384];
    if (max > sizeof buffer) max = sizeof buffer;
    while (true) {
        ssize_t n = ::recv(sock.fd(), buffer, max, 0);
        if (n > 0) {
            out.append(buffer, static_cast<std::size_t>(n));
            return true;
        }
        if (n == 0) return false;
        if (errno == EAGAIN || errno == EWOULDBLOCK) {
            wait_io(sock.fd(), POLLIN, deadline, "receive");
            continue;
        }
        if (errno == EINTR) continue;
        throw_errno(NetFault::Io, "receive");
    }
}

} // namespace spider::net
