// Writes the deterministic fixture corpus and optionally serves it.
//
//   xrt-fixtures write <dir> [--base-url URL]
//   xrt-fixtures serve <dir> [--port N]

#include "xrt/error.hpp"
#include "xrt/fixtures.hpp"
#include "xrt/regserve.hpp"

#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <unistd.h>

namespace {
volatile std::sig_atomic_t g_stop = 0;
extern "C" void on_signal(int) { g_stop = 1; }
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fixture corpus for xrt"};
    app.require_subcommand(1);
    std::string dir;
    std::string base_url = "http://127.0.0.1:8080";
    int port = 8080;

    auto* write = app.add_subcommand("write", "Write registry.json and artifacts/");
    write->add_option("dir", dir)->required();
    write->add_option("--base-url", base_url)->capture_default_str();

    auto* serve = app.add_subcommand("serve", "Write the corpus for this port and serve it until interrupted");
    serve->add_option("dir", dir)->required();
    serve->add_option("--port", port, "0 picks a free port")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*write) {
            auto reg = xrt::fixtures::write_corpus(dir, base_url);
            std::cout << "wrote " << reg.size() << " artifacts to " << dir << "\n";
            return 0;
        }
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        xrt::RegistryServer server(dir, port);
        xrt::fixtures::write_corpus(dir, server.base_url());
        std::cout << server.base_url() << "/registry.json\n" << std::flush;
        while (!g_stop) ::pause();
        server.shutdown();
        return 0;
    } catch (const xrt::Error& e) {
        std::cerr << "xrt-fixtures: " << e.what() << "\n";
        return 1;
    }
}
