#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace evimem {

using FrameIndex = std::int32_t;

inline constexpr FrameIndex kNoFrame = -1;

struct ViewSlice {
    FrameIndex frame = kNoFrame;   // global index in the stream
    std::size_t patch_count = 0;   // P for this view
};

// One chunk's cross-attention: Q query rows over the concatenated key
// tokens of every view in the chunk. Rows are softmax outputs over all
// columns jointly, so each row sums to one. Views partition the columns
// in declaration order.
class AttentionBlock {
public:
    AttentionBlock() = default;
    AttentionBlock(std::size_t q_count, std::vector<ViewSlice> views);
    AttentionBlock(std::size_t q_count, std::vector<ViewSlice> views, std::vector<double> values);

    [[nodiscard]] std::size_t q_count() const noexcept { return q_count_; }
    [[nodiscard]] std::size_t view_count() const noexcept { return views_.size(); }
    [[nodiscard]] std::size_t column_count() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<ViewSlice>& views() const noexcept { return views_; }
    [[nodiscard]] std::size_t column_offset(std::size_t view_slot) const { return offsets_.at(view_slot); }

    [[nodiscard]] std::span<double> row(std::size_t q);
    [[nodiscard]] std::span<const double> row(std::size_t q) const;
    [[nodiscard]] std::span<const double> slice(std::size_t q, std::size_t view_slot) const;

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    // Throws std::invalid_argument on a negative entry or a row whose sum
    // is off by more than `tolerance`.
    void validate(double tolerance = 1e-9) const;

private:
    std::size_t q_count_ = 0;
    std::size_t columns_ = 0;
    std::vector<ViewSlice> views_;
    std::vector<std::size_t> offsets_;
    std::vector<double> values_;
};

struct EvidenceVector {
    FrameIndex frame = kNoFrame;
    std::vector<double> scores;  // one per query token, in [0, 1]
};

enum class EvidenceMode {
    evidence,               // mass-centered magnitude times peakedness
    evidence_unnormalized,  // raw view mass times peakedness
    entropy_only,           // peakedness alone
};

[[nodiscard]] std::string_view to_string(EvidenceMode mode) noexcept;
[[nodiscard]] EvidenceMode parse_evidence_mode(std::string_view text);

// Normalized entropy of each row's view slice after renormalizing it to a
// distribution, in [0, 1]. Rows whose slice carries no mass report 1.
// Requires P >= 2 for the view.
[[nodiscard]] std::vector<double> row_entropy(const AttentionBlock& block, std::size_t view_slot);

// Attention mass each row places on the view's columns.
[[nodiscard]] std::vector<double> view_mass(const AttentionBlock& block, std::size_t view_slot);

// Score of one (token, view) pair from its view mass, the mean mass over the
// chunk's views, and its normalized entropy; clamped to [0, 1].
[[nodiscard]] double evidence_score(double mass, double mean_mass, double entropy, EvidenceMode mode) noexcept;

// Per-view, per-token evidence scores, clamped to [0, 1].
[[nodiscard]] std::vector<EvidenceVector> evidence_scores(const AttentionBlock& block, EvidenceMode mode);

}  // namespace evimem
