#pragma once

// Bundled attention server stub speaking the documented JSON protocol. Meant
// for wiring tests and as a template for bridging a real model server. The
// instruction string switches failure modes so clients can exercise their
// error paths:
//   "mode:bad-schema"  reply without an attention field
//   "mode:bad-grid"    10x10 attention grid regardless of the image
//   "mode:error"       HTTP 500
//   "sleep:<ms>"       delay before answering (timeout testing)
//   "tool:yes"/"tool:no" force the tool_call field; otherwise null

#include <cstdint>
#include <memory>

namespace uiground {

class StubServer {
  public:
    explicit StubServer(int patch_px = 28);
    ~StubServer();

    // Binds to 127.0.0.1 on the given port (0 picks an ephemeral port) and
    // serves on a background thread until stop() or destruction.
    int start(int port = 0);
    void stop();
    void request_stop();  // async-signal-safe half of stop()
    void wait();          // blocks until the serving thread exits
    int port() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace uiground
