#pragma once

#include "evimem/evidence.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace evimem {

struct MemorySlot {
    float score = 0.0F;
    FrameIndex frame = kNoFrame;
};

// Ordering used everywhere a slot list is ranked: higher score first, and
// on equal score the newer (larger) frame index first. Empty slots carry
// frame -1 and therefore sort after any real frame of equal score.
[[nodiscard]] constexpr bool ranks_before(const MemorySlot& a, const MemorySlot& b) noexcept {
    if (a.score != b.score) return a.score > b.score;
    return a.frame > b.frame;
}

struct TokenRange {
    std::size_t begin = 0;
    std::size_t end = static_cast<std::size_t>(-1);  // clipped to Q
};

struct Footprint {
    std::size_t scalar_count = 0;
    std::size_t byte_count = 0;
};

struct ConditioningBundle {
    std::vector<FrameIndex> frames;             // ordered by ownership, ties newest first
    std::map<FrameIndex, std::size_t> ownership;  // counts for every frame held in memory
};

// Fixed-size per-token cache of the D highest evidence scores seen so far
// (scores) and the global frame indices that produced them (frames). Both
// are Q x D, row-major. Each row stays sorted by ranks_before and holds a
// frame at most once.
class EvidentialMemory {
public:
    EvidentialMemory(std::size_t q_count, std::size_t depth);

    [[nodiscard]] std::size_t q_count() const noexcept { return q_count_; }
    [[nodiscard]] std::size_t depth() const noexcept { return depth_; }

    [[nodiscard]] std::span<const float> scores() const noexcept { return scores_; }
    [[nodiscard]] std::span<const FrameIndex> frames() const noexcept { return frames_; }
    [[nodiscard]] float score(std::size_t q, std::size_t j) const { return scores_.at(q * depth_ + j); }
    [[nodiscard]] FrameIndex frame(std::size_t q, std::size_t j) const { return frames_.at(q * depth_ + j); }
    [[nodiscard]] std::vector<MemorySlot> row(std::size_t q) const;

    // Row-wise top-D merge of the candidates into the cache. A frame already
    // present in a row keeps the larger of its old and new score. Returns the
    // candidate frames that entered at least one row; the rest can be dropped.
    std::vector<FrameIndex> update(std::span<const EvidenceVector> candidates, TokenRange rows = {});

    [[nodiscard]] std::map<FrameIndex, std::size_t> ownership_counts() const;
    [[nodiscard]] ConditioningBundle select_bundle(std::size_t k) const;
    [[nodiscard]] Footprint footprint() const noexcept;

    [[nodiscard]] bool empty() const noexcept;

    // Debug/fixture snapshot. Text form:
    //   evimem-memory 1
    //   <Q> <D>
    //   Q lines of D scores (max_digits10), then Q lines of D frame indices
    // Binary form: "EVMM", u32 version, u32 Q, u32 D, Q*D float32, Q*D int32,
    // all little-endian.
    void write_text(std::ostream& os) const;
    void write_binary(std::ostream& os) const;
    [[nodiscard]] static EvidentialMemory read_text(std::istream& is);
    [[nodiscard]] static EvidentialMemory read_binary(std::istream& is);

    friend bool operator==(const EvidentialMemory&, const EvidentialMemory&) = default;

    static constexpr std::size_t kScoreBytes = sizeof(float);
    static constexpr std::size_t kFrameBytes = sizeof(FrameIndex);

private:
    std::size_t q_count_;
    std::size_t depth_;
    std::vector<float> scores_;
    std::vector<FrameIndex> frames_;
};

}  // namespace evimem
