#include "spider/ftp_client.hpp"

#include "spider/strings.hpp"
#include "net_util.hpp"

#include <fstream>
#include <vector>

namespace spider::ftp {

TransferMode parse_transfer_mode(std::string_view name) {
    std::string lowered = strutil::to_lower(strutil::trim(name));
    if (lowered == "ascii" || lowered == "a") return TransferMode::Ascii;
    if (lowered == "image" || lowered == "binary" || lowered == "i") return TransferMode::Image;
    if (lowered == "ebcdic" || lowered == "e" || lowered == "local" || lowered == "l")
        throw UsageError("transfer mode \"" + std::string(name) + "\" is not supported");
    throw UsageError("unknown transfer mode \"" + std::string(name) + "\"");
}

struct FtpClient::Impl {
    FtpConfig config;
    net::Socket control;
    std::string inbuf;
    bool logged_in = false;

    net::Deadline deadline() const { return net::deadline_after(config.timeout); }

    // One CRLF-terminated line off the control connection.
    std::string read_line() {
        net::Deadline until = deadline();
        while (true) {
            std::size_t nl = inbuf.find('\n');
            if (nl != std::string::npos) {
                std::string line = inbuf.substr(0, nl);
                inbuf.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            if (!net::read_some(control, inbuf, 4096, until))
                throw NetworkError(NetFault::PrematureClose,
                                   "FTP control connection closed mid-reply");
        }
    }

    static bool reply_first_line(const std::string& line, int& code, bool& final_line) {
        if (line.size() < 3 || !strutil::all_digits(line.substr(0, 3))) return false;
        code = (line[0] - '0') * 100 + (line[1] - '0') * 10 + (line[2] - '0');
        final_line = line.size() == 3 || line[3] == ' ';
        return true;
    }

    FtpReply read_reply() {
        std::string line = read_line();
        int code = 0;
        bool final_line = false;
        if (!reply_first_line(line, code, final_line))
            throw ProtocolError("malformed FTP reply line \"" + line + "\"");
        FtpReply reply{code, line};
        while (!final_line) {
            line = read_line();
            reply.text += '\n';
            reply.text += line;
            int continued = 0;
            if (reply_first_line(line, continued, final_line) && continued == code && final_line)
                break;
            final_line = false;
        }
        return reply;
    }

    void send_command(const std::string& command) {
        net::write_all(control, command + "\r\n", deadline());
    }

    FtpReply command(const std::string& command_line) {
        send_command(command_line);
        return read_reply();
    }
};

FtpClient::FtpClient(FtpConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
}

FtpClient::~FtpClient() = default;

bool FtpClient::connected() const {
    return impl_->control.valid();
}

void FtpClient::connect_and_login() {
    const FtpConfig& cfg = impl_->config;
    if (cfg.host.empty()) throw UsageError("FTP host must not be empty");
    impl_->control = net::connect_tcp(cfg.host, cfg.port, impl_->deadline());

    FtpReply greeting = impl_->read_reply();
    if (greeting.code != 220)
        throw FtpError(greeting.code, "unexpected FTP greeting: " + greeting.text);

    FtpReply reply = impl_->command("USER " + cfg.user);
    if (reply.code == 331 || reply.code == 332) {
        reply = impl_->command("PASS " + cfg.password);
    }
    if (reply.code == 530)
        throw FtpAuthError(reply.code, "FTP login rejected: " + reply.text);
    if (reply.code != 230)
        throw FtpError(reply.code, "unexpected reply to FTP login: " + reply.text);
    impl_->logged_in = true;
}

void FtpClient::set_mode(TransferMode mode) {
    if (!connected()) throw UsageError("set_mode requires a connected FTP session");
    FtpReply reply = impl_->command(mode == TransferMode::Ascii ? "TYPE A" : "TYPE I");
    if (reply.code != 200)
        throw FtpError(reply.code, "FTP TYPE command rejected: " + reply.text);
    mode_ = mode;
}

namespace {

// "227 Entering Passive Mode (h1,h2,h3,h4,p1,p2)." in any phrasing: the
// six comma-separated numbers are what matters.
void parse_pasv(const std::string& text, std::string& host, std::uint16_t& port) {
    std::vector<unsigned long> numbers;
    std::size_t i = 3;   // skip the reply code itself
    while (i < text.size() && numbers.size() < 6) {
        if (text[i] >= '0' && text[i] <= '9') {
            std::size_t start = i;
            while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
            numbers.push_back(std::stoul(text.substr(start, i - start)));
            if (numbers.size() < 6 && (i >= text.size() || text[i] != ','))
                numbers.clear();   // not the comma-tuple yet; start over
        } else {
            ++i;
        }
    }
    if (numbers.size() != 6)
        throw ProtocolError("cannot find a host,port tuple in PASV reply: " + text);
    for (unsigned long n : numbers)
        if (n > 255) throw ProtocolError("PASV tuple element out of range: " + text);
    host = std::to_string(numbers[0]) + '.' + std::to_string(numbers[1]) + '.' +
           std::to_string(numbers[2]) + '.' + std::to_string(numbers[3]);
    port = static_cast<std::uint16_t>(numbers[4] * 256 + numbers[5]);
}

} // namespace

DownloadResult FtpClient::download(const std::string& remote_path,
                                   const std::filesystem::path& local_path) {
    if (!impl_->logged_in) throw UsageError("download requires a logged-in FTP session");
    if (remote_path.empty()) throw UsageError("remote path must not be empty");

    FtpReply pasv = impl_->command("PASV");
    if (pasv.code != 227)
        throw FtpError(pasv.code, "FTP PASV rejected: " + pasv.text);
    std::string data_host;
    std::uint16_t data_port = 0;
    parse_pasv(pasv.text, data_host, data_port);

    net::Socket data = net::connect_tcp(data_host, data_port, impl_->deadline());

    FtpReply retr = impl_->command("RETR " + remote_path);
    if (retr.code == 550)
        throw FtpFileMissingError(retr.code, "FTP server has no file \"" + remote_path +
                                                 "\": " + retr.text);
    if (retr.code == 530)
        throw FtpAuthError(retr.code, "FTP RETR rejected for lack of permission: " + retr.text);
    if (retr.code != 150 && retr.code != 125)
        throw FtpError(retr.code, "FTP RETR rejected: " + retr.text);

    // The server accepted the transfer; only now does the local file exist.
    std::ofstream out(local_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open local file " + local_path.string());

    DownloadResult result;
    result.mode = mode_;
    bool pending_cr = false;
    try {
        std::string chunk;
        net::Deadline until = impl_->deadline();
        while (net::read_some(data, chunk, 16384, until)) {
            if (mode_ == TransferMode::Ascii) {
                std::string translated;
                translated.reserve(chunk.size() + 1);
                for (char c : chunk) {
                    if (pending_cr) {
                        pending_cr = false;
                        if (c == '\n') {
                            translated += '\n';
                            continue;
                        }
                        translated += '\r';
                    }
                    if (c == '\r')
                        pending_cr = true;
                    else
                        translated += c;
                }
                out.write(translated.data(), static_cast<std::streamsize>(translated.size()));
                result.bytes_written += translated.size();
            } else {
                out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
                result.bytes_written += chunk.size();
            }
            chunk.clear();
        }
        if (pending_cr) {
            out.put('\r');
            ++result.bytes_written;
        }
        out.flush();
        if (!out) throw Error("short write to " + local_path.string());
    } catch (...) {
        out.close();
        std::error_code ignored;
        std::filesystem::remove(local_path, ignored);
        throw;
    }
    data.close();

    FtpReply done = impl_->read_reply();
    if (done.code != 226 && done.code != 250)
        throw FtpError(done.code, "FTP transfer did not complete: " + done.text);
    return result;
}

void FtpClient::quit() {
    if (!connected()) return;
    try {
        impl_->send_command("QUIT");
        impl_->read_reply();   // 221, but any goodbye will do
    } catch (const std::exception&) {
        // Closing anyway.
    }
    impl_->control.close();
    impl_->logged_in = false;
}

DownloadResult ftp_download(const FtpConfig& config, TransferMode mode,
                            const std::string& remote_path,
                            const std::filesystem::path& local_path) {
    FtpClient client(config);
    client.connect_and_login();
    client.set_mode(mode);
    DownloadResult result = client.download(remote_path, local_path);
    client.quit();
    return result;
}

} // namespace spider::ftp
