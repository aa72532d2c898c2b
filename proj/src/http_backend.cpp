#include "uiground/http_backend.hpp"

#include <cmath>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "uiground/stage.hpp"
#include "uiground/util/base64.hpp"
#include "uiground/util/png.hpp"

namespace uiground {

void HttpOptions::validate() const {
    if (endpoint.empty()) throw ValidationError("HttpOptions: endpoint must be set");
    if (connect_timeout_ms < 1 || read_timeout_ms < 1)
        throw ValidationError("HttpOptions: timeouts must be positive");
    if (max_inflight < 1) throw ValidationError("HttpOptions: max_inflight must be >= 1");
}

namespace {

// "http://host:port/path" -> {"http://host:port", "/path"}
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw ValidationError("HttpOptions: endpoint must include a scheme: " + endpoint);
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string path = endpoint.substr(path_start);
    if (path == "/") path = "";
    return {endpoint.substr(0, path_start), path};
}

bool is_timeout(httplib::Error e) {
    return e == httplib::Error::ConnectionTimeout || e == httplib::Error::Read ||
           e == httplib::Error::Write;
}

AttentionMap attention_from_reply(const nlohmann::json& reply, double region_w, double region_h) {
    if (!reply.is_object() || !reply.contains("attention") || !reply.contains("patch_px"))
        throw BackendError(BackendError::Kind::schema,
                           "reply must carry \"attention\" and \"patch_px\"");
    const auto& attn = reply.at("attention");
    if (!attn.is_array() || attn.empty() || !attn.front().is_array())
        throw BackendError(BackendError::Kind::schema, "\"attention\" must be a matrix");
    if (!reply.at("patch_px").is_number_integer())
        throw BackendError(BackendError::Kind::schema, "\"patch_px\" must be an integer");
    int patch_px = reply.at("patch_px").get<int>();
    if (patch_px < 1) throw BackendError(BackendError::Kind::schema, "\"patch_px\" must be >= 1");

    int rows = static_cast<int>(attn.size());
    int cols = static_cast<int>(attn.front().size());
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(rows) * cols);
    for (const auto& row : attn) {
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw BackendError(BackendError::Kind::schema, "\"attention\" rows must be equal length");
        for (const auto& v : row) {
            if (!v.is_number())
                throw BackendError(BackendError::Kind::schema, "\"attention\" entries must be numbers");
            weights.push_back(v.get<double>());
        }
    }

    int expected_rows = static_cast<int>(std::ceil(region_h / patch_px));
    int expected_cols = static_cast<int>(std::ceil(region_w / patch_px));
    if (rows != expected_rows || cols != expected_cols) {
        std::ostringstream msg;
        msg << "attention grid " << rows << "x" << cols << " does not match a " << region_w << "x"
            << region_h << " region at patch " << patch_px << " (expected " << expected_rows << "x"
            << expected_cols << ")";
        throw BackendError(BackendError::Kind::grid_mismatch, msg.str());
    }

    try {
        return AttentionMap(PatchGrid(rows, cols, patch_px, region_w, region_h),
                            std::move(weights));
    } catch (const ValidationError& e) {
        throw BackendError(BackendError::Kind::schema, e.what());
    }
}

}  // namespace

ModelResponse http_respond(const HttpOptions& options, const std::string& image_png,
                           const std::string& instruction, int stage, double region_w,
                           double region_h) {
    options.validate();
    if (!(region_w > 0.0 && region_h > 0.0))
        throw ValidationError("http_respond: region dimensions must be positive");

    auto [base, path_prefix] = split_endpoint(options.endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(0, options.connect_timeout_ms * 1000);
    client.set_read_timeout(options.read_timeout_ms / 1000, (options.read_timeout_ms % 1000) * 1000);

    nlohmann::json request{
        {"image_b64", base64_encode(image_png)},
        {"instruction", instruction},
        {"stage", stage},
    };
    auto res = client.Post(path_prefix + "/ground", request.dump(), "application/json");
    if (!res) {
        auto kind = is_timeout(res.error()) ? BackendError::Kind::timeout
                                            : BackendError::Kind::connect;
        throw BackendError(kind, std::string("request failed: ") + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300)
        throw BackendError(BackendError::Kind::status,
                           "server returned status " + std::to_string(res->status));

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const std::exception& e) {
        throw BackendError(BackendError::Kind::schema, std::string("reply is not JSON: ") + e.what());
    }

    AttentionMap attention = attention_from_reply(reply, region_w, region_h);

    std::string raw_text;
    if (reply.contains("raw_text")) {
        if (!reply.at("raw_text").is_string())
            throw BackendError(BackendError::Kind::schema, "\"raw_text\" must be a string");
        raw_text = reply.at("raw_text").get<std::string>();
    }

    ToolCall tool = ToolCall::absent;
    if (reply.contains("tool_call") && !reply.at("tool_call").is_null()) {
        if (!reply.at("tool_call").is_string())
            throw BackendError(BackendError::Kind::schema, "\"tool_call\" must be \"yes\", \"no\" or null");
        std::string t = reply.at("tool_call").get<std::string>();
        if (t == "yes")
            tool = ToolCall::yes;
        else if (t == "no")
            tool = ToolCall::no;
        else
            throw BackendError(BackendError::Kind::schema, "unknown tool_call value: " + t);
    } else {
        tool = parse_tool_call(raw_text);  // null on the wire: fall back to the text span
    }

    return {std::move(attention), tool, std::move(raw_text)};
}

RegionImageProvider file_region_provider() {
    return [](const ImageRef& image, const PixelBox& region) -> std::string {
        std::ifstream in(image.ref, std::ios::binary);
        if (!in) throw IoError("cannot open image: " + image.ref);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string bytes = buf.str();

        bool full = region.x1 <= 0.0 && region.y1 <= 0.0 && region.x2 >= image.width &&
                    region.y2 >= image.height;
        if (full) return bytes;

        Image decoded = png_decode(bytes);
        auto x = static_cast<std::uint32_t>(std::max(0.0, std::floor(region.x1)));
        auto y = static_cast<std::uint32_t>(std::max(0.0, std::floor(region.y1)));
        auto x2 = static_cast<std::uint32_t>(
            std::min<double>(decoded.width, std::ceil(region.x2)));
        auto y2 = static_cast<std::uint32_t>(
            std::min<double>(decoded.height, std::ceil(region.y2)));
        if (x2 <= x || y2 <= y) throw ValidationError("region does not intersect the image");
        return png_encode(crop_image(decoded, x, y, x2 - x, y2 - y));
    };
}

struct HttpBackend::Impl {
    HttpOptions options;
    RegionImageProvider provider;
    std::mutex mu;
    std::condition_variable cv;
    int inflight = 0;
};

HttpBackend::HttpBackend(HttpOptions options, RegionImageProvider provider)
    : impl_(std::make_unique<Impl>()) {
    options.validate();
    impl_->options = std::move(options);
    impl_->provider = std::move(provider);
}

HttpBackend::~HttpBackend() = default;

ModelResponse HttpBackend::respond(const RegionQuery& q) {
    {
        std::unique_lock lock(impl_->mu);
        impl_->cv.wait(lock, [&] { return impl_->inflight < impl_->options.max_inflight; });
        ++impl_->inflight;
    }
    struct Release {
        Impl* impl;
        ~Release() {
            {
                std::lock_guard lock(impl->mu);
                --impl->inflight;
            }
            impl->cv.notify_one();
        }
    } release{impl_.get()};

    std::string bytes = impl_->provider(q.image, q.region);
    return http_respond(impl_->options, bytes, q.instruction, q.stage, q.region.width(),
                        q.region.height());
}

}  // namespace uiground
