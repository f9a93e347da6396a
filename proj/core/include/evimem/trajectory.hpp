#pragma once

#include "evimem/config.hpp"
#include "evimem/toy_generator.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace evimem {

struct CameraPose {
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
    Vec3 direction{1.0, 0.0, 0.0};  // unit, object -> camera
};

// Pose of frame `index` on an orbit sweeping 0..360 degrees of azimuth over
// `frame_count` frames at fixed elevation, with seeded Gaussian jitter on
// both angles.
[[nodiscard]] CameraPose orbit_pose(std::size_t index, std::size_t frame_count, const OrbitConfig& orbit,
                                    std::uint64_t seed);

[[nodiscard]] std::vector<CameraPose> synthesize_trajectory(std::size_t frame_count, const OrbitConfig& orbit,
                                                            std::uint64_t seed);

}  // namespace evimem
