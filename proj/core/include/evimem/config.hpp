#pragma once

#include "evimem/streaming.hpp"
#include "evimem/toy_generator.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace evimem {

enum class OutputFormat { csv, json };

[[nodiscard]] std::string_view to_string(OutputFormat f) noexcept;
[[nodiscard]] OutputFormat parse_output_format(std::string_view text);

struct OrbitConfig {
    double elevation_deg = 20.0;
    double jitter_sigma_deg = 2.0;
};

struct ExperimentConfig {
    StreamConfig stream;
    ShapeKind shape = ShapeKind::composite;
    std::size_t grid_size = 8;
    std::size_t patch_grid = 4;
    OrbitConfig orbit;
    double hallucination_level = 0.3;
    GeneratorParams generator;
    std::string output_path = "-";  // "-" writes to stdout
    OutputFormat format = OutputFormat::csv;

    [[nodiscard]] std::size_t q_count() const noexcept { return grid_size * grid_size * grid_size; }

    // Range checks across all fields; throws config_error naming the key.
    void validate() const;
};

// Flat `key=value` configuration. Entries are separated by whitespace or
// newlines; `#` starts a comment that runs to end of line. Unknown keys,
// malformed values and range violations throw config_error naming the key.
// Keys (defaults in parentheses):
//   chunk_size (8) stride (4) depth (5) bundle_size (8) probe_step (0)
//   evidence_mode (evidence) strategy (evidential) stream_length (100)
//   frozen_prior_seed (7) latent_seed (11) scene_seed (13) noise_seed (17)
//   token_begin (0) token_end (Q) sampler_steps (16) epsilon (1e-6)
//   shape (composite) grid_size (8) patch_grid (4) elevation_deg (20)
//   jitter_deg (2) hallucination_level (0.3) logit_noise_sigma (0.25)
//   kappa_vis (6) kappa_near (2) output (-) format (csv)
[[nodiscard]] ExperimentConfig parse_config(std::string_view text);

// Applies `key=value` overrides on top of an existing configuration and
// re-validates.
void apply_overrides(ExperimentConfig& config, const std::vector<std::string>& assignments);

[[nodiscard]] ExperimentConfig load_config_file(const std::string& path);

// Every key with its current value, in canonical order.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config);

}  // namespace evimem
