#include "uiground/stub_server.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "uiground/util/base64.hpp"
#include "uiground/util/png.hpp"

namespace uiground {

namespace {

// Deterministic placeholder attention: a single hot patch at the grid center.
nlohmann::json center_hot_attention(int rows, int cols) {
    nlohmann::json matrix = nlohmann::json::array();
    for (int i = 0; i < rows; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < cols; ++j)
            row.push_back(i == rows / 2 && j == cols / 2 ? 1.0 : 0.01);
        matrix.push_back(std::move(row));
    }
    return matrix;
}

}  // namespace

struct StubServer::Impl {
    int patch_px;
    httplib::Server server;
    std::thread worker;
    int bound_port = 0;
};

StubServer::StubServer(int patch_px) : impl_(std::make_unique<Impl>()) {
    impl_->patch_px = patch_px;
    impl_->server.Post("/ground", [this](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const std::exception&) {
            res.status = 400;
            res.set_content("{\"error\":\"body is not JSON\"}", "application/json");
            return;
        }
        std::string instruction = body.value("instruction", "");

        if (auto pos = instruction.find("sleep:"); pos != std::string::npos) {
            int ms = std::stoi(instruction.substr(pos + 6));
            std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        }
        if (instruction.find("mode:error") != std::string::npos) {
            res.status = 500;
            res.set_content("{\"error\":\"forced failure\"}", "application/json");
            return;
        }
        if (instruction.find("mode:bad-schema") != std::string::npos) {
            res.set_content("{\"patch_px\":28}", "application/json");
            return;
        }

        int rows = 16, cols = 16;
        try {
            PngDims dims = png_sniff_dims(base64_decode(body.value("image_b64", "")));
            rows = std::max(1, static_cast<int>(std::ceil(static_cast<double>(dims.height) /
                                                          impl_->patch_px)));
            cols = std::max(1, static_cast<int>(std::ceil(static_cast<double>(dims.width) /
                                                          impl_->patch_px)));
        } catch (const std::exception&) {
            res.status = 400;
            res.set_content("{\"error\":\"image_b64 is not a readable PNG\"}", "application/json");
            return;
        }
        if (instruction.find("mode:bad-grid") != std::string::npos) {
            rows = 10;
            cols = 10;
        }

        nlohmann::json tool = nullptr;
        if (instruction.find("tool:yes") != std::string::npos) tool = "yes";
        if (instruction.find("tool:no") != std::string::npos) tool = "no";

        nlohmann::json reply{
            {"attention", center_hot_attention(rows, cols)},
            {"patch_px", impl_->patch_px},
            {"tool_call", tool},
            {"raw_text", tool.is_null() ? "<tool_call>no</tool_call>"
                                        : "<tool_call>" + tool.get<std::string>() + "</tool_call>"},
        };
        res.set_content(reply.dump(), "application/json");
    });
}

StubServer::~StubServer() { stop(); }

int StubServer::start(int port) {
    if (port == 0)
        impl_->bound_port = impl_->server.bind_to_any_port("127.0.0.1");
    else if (impl_->server.bind_to_port("127.0.0.1", port))
        impl_->bound_port = port;
    else
        throw IoError("StubServer: cannot bind port " + std::to_string(port));

    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return impl_->bound_port;
}

void StubServer::stop() {
    if (impl_->worker.joinable()) {
        impl_->server.stop();
        impl_->worker.join();
    }
}

void StubServer::request_stop() { impl_->server.stop(); }

void StubServer::wait() {
    if (impl_->worker.joinable()) impl_->worker.join();
}

int StubServer::port() const { return impl_->bound_port; }

}  // namespace uiground
