#pragma once

// Synthetic model backend for offline testing and simulation. It knows the
// ground-truth box and answers with a Gaussian attention blob whose center is
// the gt center displaced by seeded noise.
//
// Load-bearing simulator assumption: the displacement scales with the
// queried region's diagonal, so re-querying a smaller crop yields finer
// localization. This is an assumption of the simulator, not a measured
// property of any real model.

#include <cstdint>
#include <vector>

#include "uiground/backend.hpp"

namespace uiground {

enum class ToolPolicy {
    oracle,      // yes iff the response's own argmax point misses gt_bbox
    always_yes,
    always_no,
    bernoulli,   // yes with probability bernoulli_p
};

const char* to_string(ToolPolicy p);

struct SyntheticModelSpec {
    PixelBox gt_bbox{0, 0, 0, 0};
    // Std dev of the blob-center displacement as a fraction of the query
    // region diagonal, indexed by stage (1-based; the last entry repeats).
    std::vector<double> noise_frac{0.0};
    double blob_sigma_px = 56.0;
    ToolPolicy tool_policy = ToolPolicy::oracle;
    double bernoulli_p = 0.5;
    std::uint64_t seed = 0;
    int patch_px = 28;

    void validate() const;
    double noise_for_stage(int stage) const;
};

// Randomness derives from (seed, region, stage) hashing: identical queries
// give identical responses, and concurrent callers cannot reorder draws.
ModelResponse synthetic_respond(const SyntheticModelSpec& spec, const ImageRef& image,
                                const PixelBox& region, int stage);

class SyntheticBackend final : public Backend {
  public:
    explicit SyntheticBackend(SyntheticModelSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
    }

    ModelResponse respond(const RegionQuery& q) override {
        return synthetic_respond(spec_, q.image, q.region, q.stage);
    }

    const SyntheticModelSpec& spec() const { return spec_; }

  private:
    SyntheticModelSpec spec_;
};

}  // namespace uiground
