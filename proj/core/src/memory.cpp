#include "evimem/memory.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

namespace evimem {

EvidentialMemory::EvidentialMemory(std::size_t q_count, std::size_t depth)
    : q_count_(q_count), depth_(depth) {
    if (q_count == 0) throw std::invalid_argument("evidential memory: q_count must be >= 1");
    if (depth == 0) throw std::invalid_argument("evidential memory: depth must be >= 1");
    scores_.assign(q_count * depth, 0.0F);
    frames_.assign(q_count * depth, kNoFrame);
}

std::vector<MemorySlot> EvidentialMemory::row(std::size_t q) const {
    if (q >= q_count_) throw std::out_of_range("evidential memory: row out of range");
    std::vector<MemorySlot> out(depth_);
    for (std::size_t j = 0; j < depth_; ++j) out[j] = {scores_[q * depth_ + j], frames_[q * depth_ + j]};
    return out;
}

std::vector<FrameIndex> EvidentialMemory::update(std::span<const EvidenceVector> candidates, TokenRange rows) {
    std::set<FrameIndex> seen;
    for (const auto& c : candidates) {
        if (c.scores.size() != q_count_) {
            throw std::invalid_argument("evidential memory: candidate has " + std::to_string(c.scores.size()) +
                                        " scores, memory has " + std::to_string(q_count_) + " tokens");
        }
        if (c.frame < 0) throw std::invalid_argument("evidential memory: candidate without a frame index");
        if (!seen.insert(c.frame).second) {
            throw std::invalid_argument("evidential memory: duplicate candidate frame " + std::to_string(c.frame));
        }
    }

    std::vector<char> entered(candidates.size(), 0);
    std::vector<MemorySlot> pool;
    pool.reserve(depth_ + candidates.size());
    const std::size_t end = std::min(rows.end, q_count_);

    for (std::size_t q = rows.begin; q < end; ++q) {
        float* row_scores = scores_.data() + q * depth_;
        FrameIndex* row_frames = frames_.data() + q * depth_;

        pool.clear();
        for (std::size_t j = 0; j < depth_ && row_frames[j] != kNoFrame; ++j) {
            pool.push_back({row_scores[j], row_frames[j]});
        }
        for (const auto& c : candidates) {
            const MemorySlot slot{static_cast<float>(c.scores[q]), c.frame};
            auto it = std::find_if(pool.begin(), pool.end(), [&](const MemorySlot& s) { return s.frame == c.frame; });
            if (it == pool.end()) {
                pool.push_back(slot);
            } else if (slot.score > it->score) {
                it->score = slot.score;
            }
        }

        const std::size_t keep = std::min(depth_, pool.size());
        std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep), pool.end(), ranks_before);
        for (std::size_t j = 0; j < depth_; ++j) {
            const MemorySlot s = j < keep ? pool[j] : MemorySlot{};
            row_scores[j] = s.score;
            row_frames[j] = s.frame;
        }
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (entered[i]) continue;
            for (std::size_t j = 0; j < keep; ++j) {
                if (row_frames[j] == candidates[i].frame) {
                    entered[i] = 1;
                    break;
                }
            }
        }
    }

    std::vector<FrameIndex> out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (entered[i]) out.push_back(candidates[i].frame);
    }
    return out;
}

std::map<FrameIndex, std::size_t> EvidentialMemory::ownership_counts() const {
    std::map<FrameIndex, std::size_t> counts;
    for (FrameIndex f : frames_) {
        if (f != kNoFrame) ++counts[f];
    }
    return counts;
}

ConditioningBundle EvidentialMemory::select_bundle(std::size_t k) const {
    if (k == 0) throw std::invalid_argument("select_bundle: k must be >= 1");
    ConditioningBundle bundle;
    bundle.ownership = ownership_counts();

    std::vector<std::pair<std::size_t, FrameIndex>> ranked;
    ranked.reserve(bundle.ownership.size());
    for (const auto& [frame, count] : bundle.ownership) ranked.emplace_back(count, frame);
    const std::size_t take = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end(),
                      [](const auto& a, const auto& b) { return a > b; });
    for (std::size_t i = 0; i < take; ++i) bundle.frames.push_back(ranked[i].second);
    return bundle;
}

Footprint EvidentialMemory::footprint() const noexcept {
    const std::size_t cells = q_count_ * depth_;
    return {2 * cells, cells * (kScoreBytes + kFrameBytes)};
}

bool EvidentialMemory::empty() const noexcept {
    return std::all_of(frames_.begin(), frames_.end(), [](FrameIndex f) { return f == kNoFrame; });
}

// -- snapshots ---------------------------------------------------------------

namespace {

constexpr std::array<char, 4> kMagic{'E', 'V', 'M', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
    os.write(b.data(), b.size());
}

std::uint32_t get_u32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) {
        throw std::runtime_error("memory snapshot: truncated binary stream");
    }
    return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
           (std::uint32_t{b[3]} << 24);
}

void check_row_invariants(const EvidentialMemory& m) {
    for (std::size_t q = 0; q < m.q_count(); ++q) {
        const auto r = m.row(q);
        std::set<FrameIndex> frames;
        bool tail = false;
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (r[j].frame == kNoFrame) {
                tail = true;
                if (r[j].score != 0.0F) throw std::runtime_error("memory snapshot: empty slot with nonzero score");
                continue;
            }
            if (tail) throw std::runtime_error("memory snapshot: frame after an empty slot");
            if (!frames.insert(r[j].frame).second) throw std::runtime_error("memory snapshot: duplicate frame in row");
            if (j > 0 && ranks_before(r[j], r[j - 1])) throw std::runtime_error("memory snapshot: row not sorted");
        }
    }
}

}  // namespace

void EvidentialMemory::write_text(std::ostream& os) const {
    const auto old_precision = os.precision(std::numeric_limits<float>::max_digits10);
    os << "evimem-memory " << kVersion << '\n' << q_count_ << ' ' << depth_ << '\n';
    for (std::size_t q = 0; q < q_count_; ++q) {
        for (std::size_t j = 0; j < depth_; ++j) os << (j ? " " : "") << scores_[q * depth_ + j];
        os << '\n';
    }
    for (std::size_t q = 0; q < q_count_; ++q) {
        for (std::size_t j = 0; j < depth_; ++j) os << (j ? " " : "") << frames_[q * depth_ + j];
        os << '\n';
    }
    os.precision(old_precision);
}

EvidentialMemory EvidentialMemory::read_text(std::istream& is) {
    std::string tag;
    std::uint32_t version = 0;
    std::size_t q = 0;
    std::size_t d = 0;
    if (!(is >> tag >> version >> q >> d) || tag != "evimem-memory" || version != kVersion) {
        throw std::runtime_error("memory snapshot: bad text header");
    }
    EvidentialMemory m(q, d);
    for (auto& s : m.scores_) {
        if (!(is >> s)) throw std::runtime_error("memory snapshot: truncated scores");
    }
    for (auto& f : m.frames_) {
        if (!(is >> f)) throw std::runtime_error("memory snapshot: truncated frames");
    }
    check_row_invariants(m);
    return m;
}

void EvidentialMemory::write_binary(std::ostream& os) const {
    os.write(kMagic.data(), kMagic.size());
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(q_count_));
    put_u32(os, static_cast<std::uint32_t>(depth_));
    for (float s : scores_) put_u32(os, std::bit_cast<std::uint32_t>(s));
    for (FrameIndex f : frames_) put_u32(os, std::bit_cast<std::uint32_t>(f));
}

EvidentialMemory EvidentialMemory::read_binary(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
        throw std::runtime_error("memory snapshot: bad binary magic");
    }
    if (get_u32(is) != kVersion) throw std::runtime_error("memory snapshot: unsupported version");
    const std::size_t q = get_u32(is);
    const std::size_t d = get_u32(is);
    EvidentialMemory m(q, d);
    for (auto& s : m.scores_) s = std::bit_cast<float>(get_u32(is));
    for (auto& f : m.frames_) f = std::bit_cast<FrameIndex>(get_u32(is));
    check_row_invariants(m);
    return m;
}

}  // namespace evimem
