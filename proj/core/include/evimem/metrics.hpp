#pragma once

#include "evimem/toy_generator.hpp"

#include <span>

namespace evimem {

struct VoxelMetrics {
    double iou = 0.0;  // |pred & gt| / |pred | gt| with pred = latent >= 0.5; 1 when both are empty
    double mse = 0.0;
};

inline constexpr double kOccupancyThreshold = 0.5;

[[nodiscard]] VoxelMetrics compute_metrics(std::span<const double> latent, const Scene& scene);

}  // namespace evimem
