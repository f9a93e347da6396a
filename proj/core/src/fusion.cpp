#include "evimem/fusion.hpp"

#include "evimem/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace evimem {

FusionWeights compute_fusion_weights(std::span<const EvidenceVector> bundle_scores, double epsilon) {
    if (bundle_scores.empty()) throw std::invalid_argument("fusion weights: empty bundle");
    const std::size_t b = bundle_scores.size();
    const std::size_t q_count = bundle_scores.front().scores.size();
    FusionWeights out;
    out.bundle_frames.reserve(b);
    for (const auto& e : bundle_scores) {
        if (e.scores.size() != q_count) throw std::invalid_argument("fusion weights: token count mismatch");
        out.bundle_frames.push_back(e.frame);
    }
    out.weights.assign(q_count * b, 0.0);
    for (std::size_t q = 0; q < q_count; ++q) {
        double total = 0.0;
        for (const auto& e : bundle_scores) total += e.scores[q];
        double* w = out.weights.data() + q * b;
        if (total <= epsilon) {
            for (std::size_t v = 0; v < b; ++v) w[v] = 1.0 / static_cast<double>(b);
        } else {
            for (std::size_t v = 0; v < b; ++v) w[v] = bundle_scores[v].scores[q] / total;
        }
    }
    return out;
}

namespace {

void check_order(std::span<const ViewFrame> bundle, const FusionWeights& weights) {
    if (bundle.size() != weights.bundle_size()) throw std::invalid_argument("fused velocity: bundle size mismatch");
    for (std::size_t v = 0; v < bundle.size(); ++v) {
        if (bundle[v].global_index != weights.bundle_frames[v]) {
            throw std::invalid_argument("fused velocity: bundle order differs from weights at slot " +
                                        std::to_string(v));
        }
    }
}

void accumulate_fused(std::span<const double> z, double t, std::span<const ViewFrame> bundle,
                      const FusionWeights& weights, std::span<double> out) {
    const std::size_t b = bundle.size();
    const double inv = 1.0 / (1.0 - t);
    for (std::size_t q = 0; q < z.size(); ++q) {
        const double* w = weights.weights.data() + q * b;
        double acc = 0.0;
        for (std::size_t v = 0; v < b; ++v) acc += w[v] * (bundle[v].target_latent[q] - z[q]) * inv;
        out[q] = acc;
    }
}

}  // namespace

std::vector<double> fused_velocity(std::span<const double> z, double t, std::span<const ViewFrame> bundle,
                                   const FusionWeights& weights) {
    check_order(bundle, weights);
    if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("fused velocity: t must lie in [0, 1)");
    if (weights.q_count() != z.size()) throw std::invalid_argument("fused velocity: latent size mismatch");
    for (const auto& v : bundle) {
        if (v.target_latent.size() != z.size()) throw std::invalid_argument("fused velocity: view size mismatch");
    }
    std::vector<double> out(z.size());
    accumulate_fused(z, t, bundle, weights, out);
    return out;
}

Latent euler_sample(Latent z, std::span<const ViewFrame> bundle, const FusionWeights& weights,
                    const SamplerConfig& config) {
    if (config.steps == 0) throw config_error("sampler_steps", "must be >= 1");
    if (!(config.epsilon > 0.0)) throw config_error("epsilon", "must be > 0");
    const double dt = 1.0 / static_cast<double>(config.steps);
    std::vector<double> velocity(z.size());
    for (std::size_t k = 0; k < config.steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        velocity = fused_velocity(z, t, bundle, weights);
        for (std::size_t q = 0; q < z.size(); ++q) {
            z[q] += dt * velocity[q];
            if (!std::isfinite(z[q])) {
                throw numeric_error("euler_sample: non-finite latent at step " + std::to_string(k) + ", token " +
                                    std::to_string(q));
            }
        }
    }
    return z;
}

std::vector<EvidenceVector> warmup_probe(const ToyGenerator& generator, std::span<const ViewFrame> views,
                                         std::uint64_t frozen_prior_seed, int probe_step, EvidenceMode mode) {
    const GeneratorProbe probe = generator.probe(views, frozen_prior_seed, probe_step);
    return evidence_scores(probe.attention, mode);
}

}  // namespace evimem
