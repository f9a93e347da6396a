#pragma once

#include "evimem/evidence.hpp"
#include "evimem/fusion.hpp"
#include "evimem/memory.hpp"
#include "evimem/toy_generator.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evimem {

enum class Strategy {
    evidential,           // evidential memory + ownership vote
    single_last_view,     // last frame of the chunk only
    last_chunk,           // every frame of the current chunk
    random_k,             // K frames drawn uniformly from everything seen so far
    full_history_oracle,  // every frame seen so far; state grows with T
};

[[nodiscard]] std::string_view to_string(Strategy s) noexcept;
[[nodiscard]] Strategy parse_strategy(std::string_view text);
[[nodiscard]] std::span<const Strategy> all_strategies() noexcept;

struct StreamSeeds {
    std::uint64_t frozen_prior = 7;
    std::uint64_t latent = 11;
    std::uint64_t scene = 13;
    std::uint64_t noise = 17;
};

struct StreamConfig {
    std::size_t chunk_size = 8;
    std::size_t stride = 4;
    std::size_t depth = 5;
    std::size_t bundle_size = 8;
    int probe_step = 0;
    EvidenceMode evidence_mode = EvidenceMode::evidence;
    Strategy strategy = Strategy::evidential;
    std::size_t stream_length = 100;
    StreamSeeds seeds;
    TokenRange token_range;
    SamplerConfig sampler;

    // Throws config_error naming the first violated field.
    void validate() const;
};

struct ChunkSpan {
    std::size_t begin = 0;
    std::size_t size = 0;
};

// Windows start at every multiple of S below T and hold up to C frames, so
// trailing windows may be partial.
[[nodiscard]] std::vector<ChunkSpan> chunk_stream(std::size_t frame_count, std::size_t chunk_size, std::size_t stride);

struct ChunkResult {
    std::size_t chunk_index = 0;
    std::vector<FrameIndex> bundle;
    std::map<FrameIndex, std::size_t> ownership;  // evidential strategy only
    Latent latent;
    std::map<std::string, double> metrics;
    std::size_t memory_scalar_count = 0;
    std::size_t retained_frames = 0;
    std::chrono::nanoseconds wall_time{0};
};

using FrameSource = std::function<ViewFrame(FrameIndex)>;

// Per-stream state for one strategy. Chunks must be fed in stream order.
class StreamRunner {
public:
    StreamRunner(StreamConfig config, ToyGenerator generator);

    // Processes one chunk of consecutive frames and returns its sample.
    // Metrics are left empty; run_stream fills them.
    ChunkResult process_chunk(std::span<const ViewFrame> chunk, std::size_t chunk_index);

    [[nodiscard]] const StreamConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::optional<EvidentialMemory>& memory() const noexcept { return memory_; }
    // Views held across chunks: the frames referenced by the memory for the
    // evidential strategy, the whole history for random_k / full history.
    [[nodiscard]] std::size_t retained_frames() const noexcept { return retained_.size(); }

private:
    std::vector<ViewFrame> pick_bundle(std::span<const ViewFrame> chunk, std::size_t chunk_index,
                                       ChunkResult& result);
    void remember(std::span<const ViewFrame> chunk);

    StreamConfig config_;
    ToyGenerator generator_;
    std::optional<EvidentialMemory> memory_;
    std::map<FrameIndex, ViewFrame> retained_;
    std::size_t q_count_ = 0;
};

// Runs the configured strategy over frames 0..T-1 and scores every chunk
// against the scene (metrics "iou" and "mse").
[[nodiscard]] std::vector<ChunkResult> run_stream(const StreamConfig& config, const ToyGenerator& generator,
                                                  const Scene& scene, const FrameSource& frames);

// run_stream for the non-evidential strategies.
[[nodiscard]] std::vector<ChunkResult> run_baseline(const StreamConfig& config, const ToyGenerator& generator,
                                                    const Scene& scene, const FrameSource& frames);

}  // namespace evimem
