#include "evimem/streaming.hpp"

#include "evimem/errors.hpp"
#include "evimem/metrics.hpp"
#include "evimem/random.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>
#include <string>

namespace evimem {

namespace {

constexpr std::array kStrategies{Strategy::evidential, Strategy::single_last_view, Strategy::last_chunk,
                                 Strategy::random_k, Strategy::full_history_oracle};

constexpr std::uint64_t kRandomKStream = 0x52414E444BULL;

}  // namespace

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::evidential: return "evidential";
        case Strategy::single_last_view: return "single_last_view";
        case Strategy::last_chunk: return "last_chunk";
        case Strategy::random_k: return "random_k";
        case Strategy::full_history_oracle: return "full_history_oracle";
    }
    return "evidential";
}

Strategy parse_strategy(std::string_view text) {
    for (Strategy s : kStrategies) {
        if (to_string(s) == text) return s;
    }
    throw config_error("strategy", "unknown strategy '" + std::string(text) + "'");
}

std::span<const Strategy> all_strategies() noexcept { return kStrategies; }

void StreamConfig::validate() const {
    if (stream_length < 1) throw config_error("stream_length", "must be >= 1");
    if (chunk_size < 1) throw config_error("chunk_size", "must be >= 1");
    if (stride < 1) throw config_error("stride", "must be >= 1");
    if (stride > chunk_size) {
        throw config_error("stride", "must not exceed chunk_size (" + std::to_string(stride) + " > " +
                                         std::to_string(chunk_size) + ")");
    }
    if (chunk_size > stream_length) {
        throw config_error("chunk_size", "must not exceed stream_length (" + std::to_string(chunk_size) + " > " +
                                             std::to_string(stream_length) + ")");
    }
    if (depth < 1) throw config_error("depth", "must be >= 1");
    if (bundle_size < 1) throw config_error("bundle_size", "must be >= 1");
    if (probe_step < 0) throw config_error("probe_step", "must be >= 0");
    if (sampler.steps < 1) throw config_error("sampler_steps", "must be >= 1");
    if (!(sampler.epsilon > 0.0)) throw config_error("epsilon", "must be > 0");
    if (token_range.begin >= token_range.end) throw config_error("token_begin", "must be below token_end");
}

std::vector<ChunkSpan> chunk_stream(std::size_t frame_count, std::size_t chunk_size, std::size_t stride) {
    if (frame_count == 0) throw std::invalid_argument("chunk_stream: empty stream");
    if (chunk_size == 0) throw config_error("chunk_size", "must be >= 1");
    if (stride == 0) throw config_error("stride", "must be >= 1");
    if (stride > chunk_size) throw config_error("stride", "must not exceed chunk_size");
    std::vector<ChunkSpan> out;
    for (std::size_t start = 0; start < frame_count; start += stride) {
        out.push_back({start, std::min(chunk_size, frame_count - start)});
    }
    return out;
}

StreamRunner::StreamRunner(StreamConfig config, ToyGenerator generator)
    : config_(config), generator_(generator) {
    config_.validate();
}

void StreamRunner::remember(std::span<const ViewFrame> chunk) {
    for (const auto& v : chunk) retained_.try_emplace(v.global_index, v);
}

std::vector<ViewFrame> StreamRunner::pick_bundle(std::span<const ViewFrame> chunk, std::size_t chunk_index,
                                                 ChunkResult& result) {
    const std::size_t k = config_.bundle_size;
    std::vector<ViewFrame> bundle;

    switch (config_.strategy) {
        case Strategy::evidential: {
            if (!memory_) memory_.emplace(q_count_, config_.depth);
            const auto scores = warmup_probe(generator_, chunk, config_.seeds.frozen_prior, config_.probe_step,
                                             config_.evidence_mode);
            const auto entered = memory_->update(scores, config_.token_range);

            // keep views for frames that made it into memory, drop the rest
            for (const auto& v : chunk) {
                if (std::find(entered.begin(), entered.end(), v.global_index) != entered.end()) {
                    retained_.try_emplace(v.global_index, v);
                }
            }
            const ConditioningBundle selected = memory_->select_bundle(k);
            std::erase_if(retained_, [&](const auto& kv) { return !selected.ownership.contains(kv.first); });
            result.ownership = selected.ownership;

            if (selected.frames.empty()) {
                const std::size_t take = std::min(k, chunk.size());
                bundle.assign(chunk.end() - static_cast<std::ptrdiff_t>(take), chunk.end());
            } else {
                for (FrameIndex f : selected.frames) bundle.push_back(retained_.at(f));
            }
            break;
        }
        case Strategy::single_last_view:
            bundle.push_back(chunk.back());
            break;
        case Strategy::last_chunk:
            bundle.assign(chunk.begin(), chunk.end());
            break;
        case Strategy::random_k: {
            remember(chunk);
            std::vector<FrameIndex> pool;
            pool.reserve(retained_.size());
            for (const auto& kv : retained_) pool.push_back(kv.first);
            const std::size_t take = std::min(k, pool.size());
            // partial Fisher-Yates keyed by (noise seed, chunk, draw)
            for (std::size_t i = 0; i < take; ++i) {
                const auto key = hash_key(config_.seeds.noise, kRandomKStream, chunk_index, i);
                const std::size_t j = i + uniform_below(key, pool.size() - i);
                std::swap(pool[i], pool[j]);
            }
            pool.resize(take);
            std::sort(pool.begin(), pool.end());
            for (FrameIndex f : pool) bundle.push_back(retained_.at(f));
            break;
        }
        case Strategy::full_history_oracle:
            remember(chunk);
            for (const auto& kv : retained_) bundle.push_back(kv.second);
            break;
    }
    return bundle;
}

ChunkResult StreamRunner::process_chunk(std::span<const ViewFrame> chunk, std::size_t chunk_index) {
    if (chunk.empty()) throw std::invalid_argument("process_chunk: empty chunk");
    const auto started = std::chrono::steady_clock::now();
    if (q_count_ == 0) q_count_ = chunk.front().target_latent.size();

    ChunkResult result;
    result.chunk_index = chunk_index;

    const std::vector<ViewFrame> bundle = pick_bundle(chunk, chunk_index, result);
    for (const auto& v : bundle) result.bundle.push_back(v.global_index);

    // second warmup over the bundle, same frozen prior, gives per-view fusion weights
    const auto bundle_scores = warmup_probe(generator_, bundle, config_.seeds.frozen_prior, config_.probe_step,
                                            config_.evidence_mode);
    const FusionWeights weights = compute_fusion_weights(bundle_scores, config_.sampler.epsilon);

    Latent z(q_count_);
    for (std::size_t q = 0; q < q_count_; ++q) z[q] = standard_normal(hash_key(config_.seeds.latent, chunk_index, q));
    result.latent = euler_sample(std::move(z), bundle, weights, config_.sampler);

    switch (config_.strategy) {
        case Strategy::evidential:
            result.memory_scalar_count = memory_->footprint().scalar_count;
            break;
        case Strategy::random_k:
        case Strategy::full_history_oracle:
            result.memory_scalar_count = retained_.size() * q_count_;
            break;
        case Strategy::single_last_view:
        case Strategy::last_chunk:
            result.memory_scalar_count = 0;
            break;
    }
    result.retained_frames = retained_.size();
    result.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - started);
    return result;
}

std::vector<ChunkResult> run_stream(const StreamConfig& config, const ToyGenerator& generator, const Scene& scene,
                                    const FrameSource& frames) {
    StreamRunner runner(config, generator);
    const auto spans = chunk_stream(config.stream_length, config.chunk_size, config.stride);

    std::vector<ChunkResult> results;
    results.reserve(spans.size());
    std::vector<ViewFrame> window;
    for (std::size_t c = 0; c < spans.size(); ++c) {
        const ChunkSpan span = spans[c];
        // reuse already-rendered overlap from the previous window
        std::vector<ViewFrame> next;
        next.reserve(span.size);
        for (std::size_t i = 0; i < span.size; ++i) {
            const auto idx = static_cast<FrameIndex>(span.begin + i);
            auto it = std::find_if(window.begin(), window.end(), [&](const ViewFrame& v) { return v.global_index == idx; });
            next.push_back(it != window.end() ? std::move(*it) : frames(idx));
        }
        window = std::move(next);

        ChunkResult r = runner.process_chunk(window, c);
        const VoxelMetrics m = compute_metrics(r.latent, scene);
        r.metrics["iou"] = m.iou;
        r.metrics["mse"] = m.mse;
        results.push_back(std::move(r));
    }
    return results;
}

std::vector<ChunkResult> run_baseline(const StreamConfig& config, const ToyGenerator& generator, const Scene& scene,
                                      const FrameSource& frames) {
    if (config.strategy == Strategy::evidential) {
        throw config_error("strategy", "run_baseline needs a baseline strategy, got evidential");
    }
    return run_stream(config, generator, scene, frames);
}

}  // namespace evimem
