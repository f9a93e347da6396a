#pragma once

#include "evimem/evidence.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace evimem {

using Latent = std::vector<double>;
using Vec3 = std::array<double, 3>;

enum class ShapeKind { sphere, box, composite };

[[nodiscard]] std::string_view to_string(ShapeKind kind) noexcept;
[[nodiscard]] ShapeKind parse_shape_kind(std::string_view text);

// Procedural voxel object on a G^3 grid; token q = (x * G + y) * G + z.
struct Scene {
    std::size_t grid_size = 0;
    ShapeKind shape = ShapeKind::sphere;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> occupancy;  // 0 or 1 per token

    [[nodiscard]] std::size_t q_count() const noexcept { return occupancy.size(); }
    [[nodiscard]] std::size_t occupied_count() const noexcept;
    [[nodiscard]] Latent ground_truth() const;
};

// sphere: voxel centers within 0.35 G of the grid center.
// box: axis-aligned cube of side 0.5 G at a seeded position inside the grid.
// composite: the centered sphere plus a box pushed into a seeded corner.
[[nodiscard]] Scene synthesize_scene(ShapeKind kind, std::size_t grid_size, std::uint64_t seed);

// Builds a scene from an explicit occupancy vector (must be a cube of tokens).
[[nodiscard]] Scene scene_from_occupancy(std::vector<std::uint8_t> occupancy);

// A posed synthetic observation. `direction` points from the object toward
// the orthographic camera; larger projection onto it means nearer.
struct ViewFrame {
    FrameIndex global_index = 0;
    Vec3 direction{0.0, 0.0, 1.0};
    std::size_t patch_grid = 0;                   // p; P = p * p
    std::vector<std::uint8_t> visibility;         // per token
    std::vector<std::uint16_t> projected_patch;   // per token, in [0, p*p)
    Latent target_latent;                         // per token, in [0, 1]
    std::uint64_t noise_seed = 0;

    [[nodiscard]] std::size_t patch_count() const noexcept { return patch_grid * patch_grid; }
};

// Orthographic z-buffer render. Visible tokens take the ground truth; every
// other token gets a seeded pseudo-random value whose mean is
// `hallucination_level`.
[[nodiscard]] ViewFrame render_view(const Scene& scene, const Vec3& direction, std::size_t patch_grid,
                                    FrameIndex global_index, std::uint64_t noise_seed,
                                    double hallucination_level);

struct GeneratorParams {
    double kappa_vis = 6.0;
    double kappa_near = 2.0;
    double logit_noise_sigma = 0.25;
};

struct GeneratorProbe {
    AttentionBlock attention;
    int probe_step = 0;
};

// Synthesized single-head cross-attention for one warmup step. Logit noise is
// keyed by (prior_seed, probe_step, token, frame, patch), so a frame probed in
// two different chunks under the same frozen prior sees the same noise.
[[nodiscard]] GeneratorProbe probe_attention(std::span<const ViewFrame> views, std::uint64_t prior_seed,
                                             int probe_step, const GeneratorParams& params);

// Rectified-flow velocity toward the view's target: (target - z) / (1 - t).
[[nodiscard]] std::vector<double> view_velocity(std::span<const double> z, double t, const ViewFrame& view);

// The frozen toy generator: attention probing plus per-view velocities.
class ToyGenerator {
public:
    ToyGenerator() = default;
    explicit ToyGenerator(GeneratorParams params) : params_(params) {}

    [[nodiscard]] const GeneratorParams& params() const noexcept { return params_; }

    [[nodiscard]] GeneratorProbe probe(std::span<const ViewFrame> views, std::uint64_t prior_seed,
                                       int probe_step) const {
        return probe_attention(views, prior_seed, probe_step, params_);
    }

private:
    GeneratorParams params_;
};

}  // namespace evimem
