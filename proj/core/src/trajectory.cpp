#include "evimem/trajectory.hpp"

#include "evimem/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace evimem {

namespace {
constexpr std::uint64_t kAzimuthStream = 0xA2;
constexpr std::uint64_t kElevationStream = 0xE1;
}  // namespace

CameraPose orbit_pose(std::size_t index, std::size_t frame_count, const OrbitConfig& orbit, std::uint64_t seed) {
    if (frame_count == 0) throw std::invalid_argument("orbit_pose: frame_count must be >= 1");
    CameraPose pose;
    pose.azimuth_deg = 360.0 * static_cast<double>(index) / static_cast<double>(frame_count);
    pose.elevation_deg = orbit.elevation_deg;
    if (orbit.jitter_sigma_deg > 0.0) {
        pose.azimuth_deg += orbit.jitter_sigma_deg * standard_normal(hash_key(seed, kAzimuthStream, index));
        pose.elevation_deg += orbit.jitter_sigma_deg * standard_normal(hash_key(seed, kElevationStream, index));
    }
    const double az = pose.azimuth_deg * std::numbers::pi / 180.0;
    const double el = pose.elevation_deg * std::numbers::pi / 180.0;
    Vec3 d{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
    const double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    pose.direction = {d[0] / n, d[1] / n, d[2] / n};
    return pose;
}

std::vector<CameraPose> synthesize_trajectory(std::size_t frame_count, const OrbitConfig& orbit, std::uint64_t seed) {
    std::vector<CameraPose> out;
    out.reserve(frame_count);
    for (std::size_t i = 0; i < frame_count; ++i) out.push_back(orbit_pose(i, frame_count, orbit, seed));
    return out;
}

}  // namespace evimem
