#pragma once

// Pluggable model-backend contract. A backend answers a region query with an
// attention map over the queried region plus a tool-call decision.

#include <string>

#include "uiground/attention.hpp"
#include "uiground/geometry.hpp"

namespace uiground {

enum class ToolCall { yes, no, absent };

inline const char* to_string(ToolCall t) {
    switch (t) {
        case ToolCall::yes: return "yes";
        case ToolCall::no: return "no";
        case ToolCall::absent: return "absent";
    }
    return "absent";
}

// Reference to an image plus its pixel dimensions. The engine never decodes
// pixels itself; `ref` is opaque to everything but the HTTP backend.
struct ImageRef {
    std::string ref;
    double width = 0.0;
    double height = 0.0;
};

struct RegionQuery {
    ImageRef image;
    PixelBox region;  // full-image coordinates
    int stage = 1;    // 1-based
    std::string instruction;
};

struct ModelResponse {
    AttentionMap attention;  // over the queried region's grid, region-local frame
    ToolCall tool_call = ToolCall::absent;
    std::string raw_text;
};

// Contract: the returned attention grid covers the queried region's pixel
// dimensions, and identical queries against an identically-seeded backend
// produce identical responses. Implementations must tolerate concurrent
// respond() calls.
class Backend {
  public:
    virtual ~Backend() = default;
    virtual ModelResponse respond(const RegionQuery& query) = 0;
};

}  // namespace uiground
