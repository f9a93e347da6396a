#pragma once

#include "evimem/config.hpp"
#include "evimem/results.hpp"
#include "evimem/streaming.hpp"
#include "evimem/toy_generator.hpp"

#include <cstddef>
#include <vector>

namespace evimem {

// Seeds for replicate `seed_index`; index 0 reproduces the configured seeds.
[[nodiscard]] StreamSeeds replicate_seeds(const StreamSeeds& base, std::size_t seed_index);

[[nodiscard]] Scene build_scene(const ExperimentConfig& config, const StreamSeeds& seeds);

// Renders frame i of the orbit on demand; the scene must outlive the source.
[[nodiscard]] FrameSource orbit_frames(const ExperimentConfig& config, const Scene& scene, const StreamSeeds& seeds);

// One full stream for the configured strategy and replicate.
[[nodiscard]] std::vector<ChunkResult> run_experiment(const ExperimentConfig& config, std::size_t seed_index = 0);

[[nodiscard]] MetricsRow to_metrics_row(const ChunkResult& result);

// `run`: the configured strategy over `seeds` replicates.
[[nodiscard]] ResultTable run_table(const ExperimentConfig& config, std::size_t seeds);

// `compare`: every strategy on shared replicates, with a strategy column.
[[nodiscard]] ResultTable compare_table(const ExperimentConfig& config, std::size_t seeds);

}  // namespace evimem
