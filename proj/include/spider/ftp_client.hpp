#pragma once

#include "spider/errors.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>

namespace spider::ftp {

enum class TransferMode { Ascii, Image };

/// Accepts "ascii"/"a" and "image"/"binary"/"i" (case-insensitive).
/// Anything else (including the historic EBCDIC and Local modes) is a
/// UsageError.
TransferMode parse_transfer_mode(std::string_view name);

struct FtpConfig {
    std::string host;
    std::uint16_t port = 21;
    std::string user = "anonymous";
    std::string password = "anonymous@";
    std::chrono::milliseconds timeout{30000};
    std::function<void(const std::string&)> warn;
};

/// One control-connection reply: the 3-digit code and the full text
/// (multi-line replies joined with '\n').
struct FtpReply {
    int code = 0;
    std::string text;
};

struct DownloadResult {
    std::uint64_t bytes_written = 0;
    TransferMode mode = TransferMode::Image;
};

/// Minimal FTP retrieval client: USER/PASS login, TYPE selection, passive
/// (PASV) data connections, RETR to a local file. One instance is one
/// control connection; not thread safe.
class FtpClient {
public:
    explicit FtpClient(FtpConfig config);
    ~FtpClient();

    FtpClient(const FtpClient&) = delete;
    FtpClient& operator=(const FtpClient&) = delete;

    /// Connects and logs in. A 530 during login is an FtpAuthError; any
    /// other unexpected reply is an FtpError carrying the reply code.
    void connect_and_login();

    /// TYPE A or TYPE I. Image is the default a fresh connection assumes.
    void set_mode(TransferMode mode);

    /// RETR remote_path into local_path. The local file is only created
    /// once the server accepts the transfer, so a missing remote file
    /// (550, FtpFileMissingError) leaves no artifact; a transfer that dies
    /// mid-stream removes the partial file before the error propagates.
    /// In Ascii mode CRLF pairs arriving on the wire become LF locally
    /// (a CR not followed by LF is kept).
    DownloadResult download(const std::string& remote_path,
                            const std::filesystem::path& local_path);

    /// Polite goodbye; safe to skip (the destructor just closes).
    void quit();

    bool connected() const;
    TransferMode mode() const { return mode_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    TransferMode mode_ = TransferMode::Image;
};

/// Convenience wrapper: connect, login, set mode, download one file, quit.
DownloadResult ftp_download(const FtpConfig& config, TransferMode mode,
                            const std::string& remote_path,
                            const std::filesystem::path& local_path);

} // namespace spider::ftp
