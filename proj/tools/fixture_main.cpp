// Stand-alone fixture server: serves a JSON script on loopback until
// stdin closes. Prints the bound port on the first stdout line so test
// harnesses can connect.

#include "spider/errors.hpp"
#include "spider/testbed.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int serve_ftp(const std::string& root, std::uint16_t port) {
    spider::testbed::FtpFixtureConfig config;
    config.port = port;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        config.files[entry.path().lexically_relative(root).generic_string()] = buf.str();
    }
    spider::testbed::FtpFixture server(std::move(config));
    server.start();
    std::cout << server.port() << "\n" << std::flush;

    std::string line;
    while (std::getline(std::cin, line)) {
    }
    server.stop();
    for (const auto& command : server.log())
        std::cout << command.verb << '\t' << command.argument << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scripted loopback HTTP fixture"};
    std::string script_file;
    std::string ftp_root;
    std::uint16_t port = 0;
    bool concurrent = false;
    app.add_option("--script", script_file, "JSON fixture script");
    app.add_option("--ftp-root", ftp_root, "Serve this directory over FTP instead of HTTP");
    app.add_option("--port", port, "Port to bind (default: OS-assigned)");
    app.add_flag("--concurrent", concurrent, "Handle connections in parallel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (ftp_root.empty() == script_file.empty()) {
            std::cerr << "usage error: pass exactly one of --script or --ftp-root\n";
            return 2;
        }
        if (!ftp_root.empty()) return serve_ftp(ftp_root, port);
        spider::testbed::FixtureScript script = spider::testbed::load_script(script_file);
        spider::testbed::ServerOptions options;
        options.port = port;
        options.concurrent = concurrent;
        spider::testbed::FixtureServer server(std::move(script), options);
        server.start();
        std::cout << server.port() << "\n" << std::flush;

        std::string line;
        while (std::getline(std::cin, line)) {
            // Any input keeps the server alive; EOF stops it.
        }
        server.stop();

        for (const auto& entry : server.log())
            std::cout << entry.at_ms << '\t' << entry.method << '\t' << entry.target << '\t'
                      << entry.response_status << "\n";
        return 0;
    } catch (const spider::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
