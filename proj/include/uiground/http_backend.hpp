#pragma once

// Network client for a model attention server speaking the documented JSON
// protocol: POST {endpoint}/ground with {"image_b64", "instruction", "stage"},
// reply {"attention": [[...]], "patch_px": int, "tool_call": "yes"|"no"|null,
// "raw_text": str}.

#include <functional>
#include <memory>
#include <string>

#include "uiground/backend.hpp"

namespace uiground {

struct HttpOptions {
    std::string endpoint;  // e.g. "http://127.0.0.1:8480"
    int connect_timeout_ms = 2000;
    int read_timeout_ms = 10000;
    int max_inflight = 4;  // bound on concurrent requests through one backend

    void validate() const;
};

// One wire round trip. `image_png` is the already-cropped region image;
// region_w/region_h are its pixel dimensions, used to validate the returned
// attention grid. Throws BackendError with a distinct kind for timeouts,
// non-success statuses, schema violations, and grid mismatches.
ModelResponse http_respond(const HttpOptions& options, const std::string& image_png,
                           const std::string& instruction, int stage, double region_w,
                           double region_h);

// Produces the encoded image bytes for a region of the referenced image.
using RegionImageProvider = std::function<std::string(const ImageRef&, const PixelBox&)>;

// Reads the file at ImageRef::ref; full-image regions are passed through
// verbatim, sub-regions are cropped via the bundled PNG codec.
RegionImageProvider file_region_provider();

class HttpBackend final : public Backend {
  public:
    explicit HttpBackend(HttpOptions options, RegionImageProvider provider = file_region_provider());
    ~HttpBackend() override;

    ModelResponse respond(const RegionQuery& q) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace uiground
