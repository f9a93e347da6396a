#include "evimem/evidence.hpp"

#include "evimem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace evimem {

AttentionBlock::AttentionBlock(std::size_t q_count, std::vector<ViewSlice> views)
    : q_count_(q_count), views_(std::move(views)) {
    if (q_count_ == 0) throw std::invalid_argument("attention block: q_count must be positive");
    if (views_.empty()) throw std::invalid_argument("attention block: at least one view required");
    offsets_.reserve(views_.size());
    for (const auto& v : views_) {
        if (v.patch_count == 0) throw std::invalid_argument("attention block: view with zero patches");
        offsets_.push_back(columns_);
        columns_ += v.patch_count;
    }
    values_.assign(q_count_ * columns_, 0.0);
}

AttentionBlock::AttentionBlock(std::size_t q_count, std::vector<ViewSlice> views, std::vector<double> values)
    : AttentionBlock(q_count, std::move(views)) {
    if (values.size() != values_.size()) {
        throw std::invalid_argument("attention block: expected " + std::to_string(values_.size()) +
                                    " entries, got " + std::to_string(values.size()));
    }
    values_ = std::move(values);
}

std::span<double> AttentionBlock::row(std::size_t q) {
    return std::span<double>(values_).subspan(q * columns_, columns_);
}

std::span<const double> AttentionBlock::row(std::size_t q) const {
    return std::span<const double>(values_).subspan(q * columns_, columns_);
}

std::span<const double> AttentionBlock::slice(std::size_t q, std::size_t view_slot) const {
    return row(q).subspan(offsets_.at(view_slot), views_[view_slot].patch_count);
}

void AttentionBlock::validate(double tolerance) const {
    for (std::size_t q = 0; q < q_count_; ++q) {
        double sum = 0.0;
        for (double a : row(q)) {
            if (!(a >= 0.0)) throw std::invalid_argument("attention block: negative or NaN entry in row " + std::to_string(q));
            sum += a;
        }
        if (std::abs(sum - 1.0) > tolerance) {
            throw std::invalid_argument("attention block: row " + std::to_string(q) + " sums to " + std::to_string(sum));
        }
    }
}

std::string_view to_string(EvidenceMode mode) noexcept {
    switch (mode) {
        case EvidenceMode::evidence: return "evidence";
        case EvidenceMode::evidence_unnormalized: return "evidence_unnormalized";
        case EvidenceMode::entropy_only: return "entropy_only";
    }
    return "evidence";
}

EvidenceMode parse_evidence_mode(std::string_view text) {
    if (text == "evidence") return EvidenceMode::evidence;
    if (text == "evidence_unnormalized") return EvidenceMode::evidence_unnormalized;
    if (text == "entropy_only") return EvidenceMode::entropy_only;
    throw config_error("evidence_mode", "unknown mode '" + std::string(text) + "'");
}

namespace {

double slice_entropy(std::span<const double> slice) {
    const double total = std::accumulate(slice.begin(), slice.end(), 0.0);
    if (!(total > 0.0)) return 1.0;
    // exact 1 for a uniform slice, so uniform tokens score exactly zero
    if (std::all_of(slice.begin(), slice.end(), [&](double a) { return a == slice.front(); })) return 1.0;
    double h = 0.0;
    for (double a : slice) {
        const double p = a / total;
        if (p > 0.0) h -= p * std::log(p);
    }
    h /= std::log(static_cast<double>(slice.size()));
    return std::clamp(h, 0.0, 1.0);
}

}  // namespace

std::vector<double> row_entropy(const AttentionBlock& block, std::size_t view_slot) {
    if (view_slot >= block.view_count()) throw std::out_of_range("row_entropy: view slot out of range");
    if (block.views()[view_slot].patch_count < 2) {
        throw std::invalid_argument("row_entropy: view needs at least 2 patches for a normalized entropy");
    }
    std::vector<double> out(block.q_count());
    for (std::size_t q = 0; q < block.q_count(); ++q) out[q] = slice_entropy(block.slice(q, view_slot));
    return out;
}

std::vector<double> view_mass(const AttentionBlock& block, std::size_t view_slot) {
    if (view_slot >= block.view_count()) throw std::out_of_range("view_mass: view slot out of range");
    std::vector<double> out(block.q_count());
    for (std::size_t q = 0; q < block.q_count(); ++q) {
        const auto s = block.slice(q, view_slot);
        out[q] = std::clamp(std::accumulate(s.begin(), s.end(), 0.0), 0.0, 1.0);
    }
    return out;
}

double evidence_score(double mass, double mean_mass, double entropy, EvidenceMode mode) noexcept {
    const double peakedness = 1.0 - entropy;
    double score = 0.0;
    switch (mode) {
        case EvidenceMode::evidence:
            score = (1.0 + (mass - mean_mass)) * peakedness;
            break;
        case EvidenceMode::evidence_unnormalized:
            score = mass * peakedness;
            break;
        case EvidenceMode::entropy_only:
            score = peakedness;
            break;
    }
    return std::clamp(score, 0.0, 1.0);
}

std::vector<EvidenceVector> evidence_scores(const AttentionBlock& block, EvidenceMode mode) {
    const std::size_t views = block.view_count();
    const std::size_t q_count = block.q_count();
    if (views == 0) throw std::invalid_argument("evidence_scores: empty block");

    std::vector<std::vector<double>> mass(views);
    std::vector<std::vector<double>> entropy(views);
    for (std::size_t v = 0; v < views; ++v) {
        mass[v] = view_mass(block, v);
        entropy[v] = row_entropy(block, v);
    }

    std::vector<double> mean_mass(q_count, 0.0);
    for (std::size_t q = 0; q < q_count; ++q) {
        for (std::size_t v = 0; v < views; ++v) mean_mass[q] += mass[v][q];
        mean_mass[q] /= static_cast<double>(views);
    }

    std::vector<EvidenceVector> out(views);
    for (std::size_t v = 0; v < views; ++v) {
        out[v].frame = block.views()[v].frame;
        out[v].scores.resize(q_count);
        for (std::size_t q = 0; q < q_count; ++q) {
            out[v].scores[q] = evidence_score(mass[v][q], mean_mass[q], entropy[v][q], mode);
        }
    }
    return out;
}

}  // namespace evimem
