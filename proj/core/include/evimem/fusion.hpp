#pragma once

#include "evimem/evidence.hpp"
#include "evimem/toy_generator.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace evimem {

// Per-token convex weights over the bundle views, Q x B row-major.
struct FusionWeights {
    std::vector<FrameIndex> bundle_frames;
    std::vector<double> weights;

    [[nodiscard]] std::size_t bundle_size() const noexcept { return bundle_frames.size(); }
    [[nodiscard]] std::size_t q_count() const noexcept {
        return bundle_frames.empty() ? 0 : weights.size() / bundle_frames.size();
    }
    [[nodiscard]] double at(std::size_t q, std::size_t v) const { return weights.at(q * bundle_frames.size() + v); }
};

struct SamplerConfig {
    std::size_t steps = 16;
    double epsilon = 1e-6;  // a token whose evidence sums below this falls back to uniform weights
};

// Normalizes each token's evidence over the bundle. Tokens with no evidence
// in any bundle view get uniform weights.
[[nodiscard]] FusionWeights compute_fusion_weights(std::span<const EvidenceVector> bundle_scores,
                                                   double epsilon = SamplerConfig{}.epsilon);

// Evidence-weighted sum of per-view velocities.
[[nodiscard]] std::vector<double> fused_velocity(std::span<const double> z, double t,
                                                 std::span<const ViewFrame> bundle, const FusionWeights& weights);

// Explicit Euler integration of the fused field from t = 0 to 1 on the grid
// t_k = k / N. Weights stay fixed across steps.
[[nodiscard]] Latent euler_sample(Latent z, std::span<const ViewFrame> bundle, const FusionWeights& weights,
                                  const SamplerConfig& config);

// One warmup step under the frozen prior followed by evidence scoring.
[[nodiscard]] std::vector<EvidenceVector> warmup_probe(const ToyGenerator& generator,
                                                       std::span<const ViewFrame> views,
                                                       std::uint64_t frozen_prior_seed, int probe_step,
                                                       EvidenceMode mode);

}  // namespace evimem
