#pragma once

#include "evimem/config.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace evimem {

struct MetricsRow {
    std::size_t chunk_index = 0;
    double iou = 0.0;
    double mse = 0.0;
    std::size_t bundle_size = 0;
    std::size_t memory_scalars = 0;
    double wall_ms = 0.0;
};

struct ResultRow {
    std::string strategy;
    std::size_t seed = 0;
    MetricsRow metrics;
};

// `strategy` and `seed` columns are emitted only when the flags are set, so
// a single-seed run keeps the plain per-chunk schema:
//   chunk_index,iou,mse,bundle_size,memory_scalars,wall_ms
struct ResultTable {
    bool with_strategy = false;
    bool with_seed = false;
    std::vector<ResultRow> rows;
};

// With timing off, wall_ms is written as 0 so output is a pure function of
// the configuration.
[[nodiscard]] std::string render_csv(const ResultTable& table, bool timing);
[[nodiscard]] std::string render_json(const ResultTable& table, const ExperimentConfig& config, bool timing);

// Writes to `path` ("-" for stdout). Throws std::runtime_error when the file
// cannot be written.
void write_results(const ResultTable& table, const ExperimentConfig& config, const std::string& path,
                   OutputFormat format, bool timing);

}  // namespace evimem
