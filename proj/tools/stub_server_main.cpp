// Standalone attention-server stub speaking the documented JSON protocol.
// Useful for wiring checks before pointing the engine at a real model server.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "uiground/stub_server.hpp"

namespace {
uiground::StubServer* g_server = nullptr;
}

int main(int argc, char** argv) {
    CLI::App app{"attention server stub (JSON protocol)"};
    int port = 8480;
    int patch_px = 28;
    app.add_option("--port", port, "listen port (0 = ephemeral)");
    app.add_option("--patch-px", patch_px, "patch size reported to clients");
    CLI11_PARSE(app, argc, argv);

    try {
        uiground::StubServer server(patch_px);
        g_server = &server;
        std::signal(SIGINT, [](int) { g_server->request_stop(); });
        std::signal(SIGTERM, [](int) { g_server->request_stop(); });
        int bound = server.start(port);
        std::cout << "listening on http://127.0.0.1:" << bound << " (POST /ground)\n";
        std::cout << "instruction switches: mode:bad-schema, mode:bad-grid, mode:error, "
                     "sleep:<ms>, tool:yes, tool:no\n";
        server.wait();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
