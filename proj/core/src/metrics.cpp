#include "evimem/metrics.hpp"

#include <stdexcept>

namespace evimem {

VoxelMetrics compute_metrics(std::span<const double> latent, const Scene& scene) {
    if (latent.size() != scene.q_count()) throw std::invalid_argument("compute_metrics: latent size mismatch");
    std::size_t both = 0;
    std::size_t either = 0;
    double sq = 0.0;
    for (std::size_t q = 0; q < latent.size(); ++q) {
        const bool pred = latent[q] >= kOccupancyThreshold;
        const bool gt = scene.occupancy[q] != 0;
        both += pred && gt;
        either += pred || gt;
        const double d = latent[q] - static_cast<double>(scene.occupancy[q]);
        sq += d * d;
    }
    VoxelMetrics m;
    m.iou = either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
    m.mse = latent.empty() ? 0.0 : sq / static_cast<double>(latent.size());
    return m;
}

}  // namespace evimem
