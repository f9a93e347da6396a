#include "evimem/experiment.hpp"

#include "evimem/errors.hpp"
#include "evimem/random.hpp"
#include "evimem/trajectory.hpp"

#include <chrono>

namespace evimem {

namespace {
constexpr std::uint64_t kTrajectoryStream = 0x7247;
}  // namespace

StreamSeeds replicate_seeds(const StreamSeeds& base, std::size_t seed_index) {
    if (seed_index == 0) return base;
    return {hash_key(base.frozen_prior, seed_index), hash_key(base.latent, seed_index),
            hash_key(base.scene, seed_index), hash_key(base.noise, seed_index)};
}

Scene build_scene(const ExperimentConfig& config, const StreamSeeds& seeds) {
    return synthesize_scene(config.shape, config.grid_size, seeds.scene);
}

FrameSource orbit_frames(const ExperimentConfig& config, const Scene& scene, const StreamSeeds& seeds) {
    const std::size_t frame_count = config.stream.stream_length;
    const OrbitConfig orbit = config.orbit;
    const std::size_t patch_grid = config.patch_grid;
    const double hallucination = config.hallucination_level;
    const std::uint64_t trajectory_seed = hash_key(seeds.noise, kTrajectoryStream);
    const std::uint64_t noise = seeds.noise;
    return [&scene, frame_count, orbit, patch_grid, hallucination, trajectory_seed, noise](FrameIndex i) {
        const CameraPose pose = orbit_pose(static_cast<std::size_t>(i), frame_count, orbit, trajectory_seed);
        return render_view(scene, pose.direction, patch_grid, i, noise, hallucination);
    };
}

std::vector<ChunkResult> run_experiment(const ExperimentConfig& config, std::size_t seed_index) {
    config.validate();
    StreamConfig stream = config.stream;
    stream.seeds = replicate_seeds(config.stream.seeds, seed_index);
    const Scene scene = build_scene(config, stream.seeds);
    return run_stream(stream, ToyGenerator(config.generator), scene, orbit_frames(config, scene, stream.seeds));
}

MetricsRow to_metrics_row(const ChunkResult& result) {
    MetricsRow row;
    row.chunk_index = result.chunk_index;
    row.iou = result.metrics.at("iou");
    row.mse = result.metrics.at("mse");
    row.bundle_size = result.bundle.size();
    row.memory_scalars = result.memory_scalar_count;
    row.wall_ms = std::chrono::duration<double, std::milli>(result.wall_time).count();
    return row;
}

ResultTable run_table(const ExperimentConfig& config, std::size_t seeds) {
    if (seeds == 0) throw config_error("seeds", "must be >= 1");
    ResultTable table;
    table.with_seed = seeds > 1;
    const std::string name(to_string(config.stream.strategy));
    for (std::size_t s = 0; s < seeds; ++s) {
        for (const auto& r : run_experiment(config, s)) table.rows.push_back({name, s, to_metrics_row(r)});
    }
    return table;
}

ResultTable compare_table(const ExperimentConfig& config, std::size_t seeds) {
    if (seeds == 0) throw config_error("seeds", "must be >= 1");
    ResultTable table;
    table.with_strategy = true;
    table.with_seed = true;
    for (Strategy strategy : all_strategies()) {
        ExperimentConfig c = config;
        c.stream.strategy = strategy;
        const std::string name(to_string(strategy));
        for (std::size_t s = 0; s < seeds; ++s) {
            for (const auto& r : run_experiment(c, s)) table.rows.push_back({name, s, to_metrics_row(r)});
        }
    }
    return table;
}

}  // namespace evimem
