#include "evimem/fusion.hpp"

#include "evimem/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace evimem;

namespace {

ViewFrame target_view(FrameIndex index, std::vector<double> target) {
    ViewFrame v;
    v.global_index = index;
    v.target_latent = std::move(target);
    return v;
}

FusionWeights fixed_weights(std::vector<FrameIndex> frames, std::vector<double> per_token, std::size_t q_count) {
    FusionWeights w;
    w.bundle_frames = std::move(frames);
    for (std::size_t q = 0; q < q_count; ++q) w.weights.insert(w.weights.end(), per_token.begin(), per_token.end());
    return w;
}

}  // namespace

TEST_CASE("compute_fusion_weights") {
    const std::vector<EvidenceVector> scores{{4, {0.1, 0.0}}, {5, {0.1, 0.0}}, {6, {0.2, 0.0}}};
    const auto w = compute_fusion_weights(scores);
    CHECK(w.bundle_frames == std::vector<FrameIndex>{4, 5, 6});
    CHECK(w.at(0, 0) == doctest::Approx(0.25));
    CHECK(w.at(0, 1) == doctest::Approx(0.25));
    CHECK(w.at(0, 2) == doctest::Approx(0.5));
    for (std::size_t v = 0; v < 3; ++v) CHECK(w.at(1, v) == doctest::Approx(1.0 / 3.0));

    const std::vector<EvidenceVector> single{{9, {0.4, 0.0, 1.0}}};
    for (std::size_t q = 0; q < 3; ++q) CHECK(compute_fusion_weights(single).at(q, 0) == 1.0);

    CHECK_THROWS_AS((void)compute_fusion_weights({}), std::invalid_argument);
    const std::vector<EvidenceVector> ragged{{1, {0.1}}, {2, {0.1, 0.2}}};
    CHECK_THROWS_AS((void)compute_fusion_weights(ragged), std::invalid_argument);
}

TEST_CASE("property: fusion weights are convex and monotone in evidence") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> b_dist(1, 8);
    for (int trial = 0; trial < 200; ++trial) {
        const auto b = static_cast<std::size_t>(b_dist(rng));
        std::vector<EvidenceVector> scores(b);
        for (std::size_t v = 0; v < b; ++v) {
            scores[v].frame = static_cast<FrameIndex>(v);
            scores[v].scores.resize(6);
            for (auto& s : scores[v].scores) s = u(rng) < 0.2 ? 0.0 : u(rng);
        }
        const auto w = compute_fusion_weights(scores);
        for (std::size_t q = 0; q < 6; ++q) {
            double total = 0.0;
            for (std::size_t v = 0; v < b; ++v) {
                CHECK(w.at(q, v) >= 0.0);
                total += w.at(q, v);
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }

        const std::size_t raised = static_cast<std::size_t>(b_dist(rng) - 1) % b;
        auto bumped = scores;
        for (auto& s : bumped[raised].scores) s = std::min(1.0, s + u(rng));
        const auto w2 = compute_fusion_weights(bumped);
        for (std::size_t q = 0; q < 6; ++q) CHECK(w2.at(q, raised) >= w.at(q, raised) - 1e-15);
    }
}

TEST_CASE("fused_velocity") {
    const std::vector<double> z{0.0, 0.0};
    const std::vector bundle{target_view(1, {0.0, 0.5}), target_view(2, {1.0, 0.5})};
    const auto w = fixed_weights({1, 2}, {0.25, 0.75}, 2);
    const auto v = fused_velocity(z, 0.0, bundle, w);
    CHECK(v[0] == doctest::Approx(0.75));
    CHECK(v[1] == doctest::Approx(0.5));

    const auto one_hot = fixed_weights({1, 2}, {0.0, 1.0}, 2);
    CHECK(fused_velocity(z, 0.4, bundle, one_hot) == view_velocity(z, 0.4, bundle[1]));

    const std::vector same{target_view(1, {0.3, 0.9}), target_view(2, {0.3, 0.9})};
    const auto fused_same = fused_velocity(z, 0.2, same, w);
    const auto single = view_velocity(z, 0.2, same[0]);
    for (std::size_t q = 0; q < 2; ++q) CHECK(fused_same[q] == doctest::Approx(single[q]));

    const auto swapped = fixed_weights({2, 1}, {0.25, 0.75}, 2);
    CHECK_THROWS_AS((void)fused_velocity(z, 0.0, bundle, swapped), std::invalid_argument);
}

TEST_CASE("euler_sample reaches the weighted target") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 1.0);
    Latent z(64);
    for (auto& x : z) x = n(rng);

    std::vector<double> target(64);
    for (std::size_t q = 0; q < 64; ++q) target[q] = static_cast<double>(q % 5) / 4.0;
    const std::vector one{target_view(3, target)};
    const auto out = euler_sample(z, one, fixed_weights({3}, {1.0}, 64), {16, 1e-6});
    for (std::size_t q = 0; q < 64; ++q) CHECK(std::abs(out[q] - target[q]) <= 1e-5);

    const std::vector two{target_view(0, std::vector<double>(64, 0.0)), target_view(1, std::vector<double>(64, 1.0))};
    const auto w = fixed_weights({0, 1}, {0.25, 0.75}, 64);
    for (double x : euler_sample(z, two, w, {16, 1e-6})) CHECK(std::abs(x - 0.75) <= 1e-5);

    // one step lands exactly: z + (0.75 - z)
    for (double x : euler_sample(z, two, w, {1, 1e-6})) CHECK(x == doctest::Approx(0.75).epsilon(1e-14));

    CHECK_THROWS_AS((void)euler_sample(z, two, w, {0, 1e-6}), config_error);
    Latent bad = z;
    bad[5] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((void)euler_sample(bad, two, w, {4, 1e-6}), numeric_error);
}

TEST_CASE("property: identical views make the output independent of weights") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> target(16);
    for (auto& x : target) x = u(rng);
    const std::vector bundle{target_view(0, target), target_view(1, target), target_view(2, target)};
    const Latent z(16, 0.0);
    const auto a = euler_sample(z, bundle, fixed_weights({0, 1, 2}, {0.1, 0.2, 0.7}, 16), {16, 1e-6});
    const auto b = euler_sample(z, bundle, fixed_weights({0, 1, 2}, {1.0, 0.0, 0.0}, 16), {16, 1e-6});
    for (std::size_t q = 0; q < 16; ++q) CHECK(a[q] == doctest::Approx(b[q]).epsilon(1e-12));
}

TEST_CASE("warmup_probe") {
    const Scene s = synthesize_scene(ShapeKind::composite, 8, 3);
    const ToyGenerator gen;
    std::vector<ViewFrame> views;
    for (int i = 0; i < 4; ++i) {
        const double a = 0.7 * i;
        views.push_back(render_view(s, {std::cos(a), std::sin(a), 0.0}, 4, i, 8, 0.3));
    }
    const auto first = warmup_probe(gen, views, 55, 0, EvidenceMode::evidence);
    const auto second = warmup_probe(gen, views, 55, 0, EvidenceMode::evidence);
    REQUIRE(first.size() == 4);
    for (std::size_t v = 0; v < 4; ++v) CHECK(first[v].scores == second[v].scores);

    // one view: the mass term cancels and the score is 1 - H
    const auto single = warmup_probe(gen, std::span(views).first(1), 55, 0, EvidenceMode::evidence);
    const auto block = gen.probe(std::span(views).first(1), 55, 0).attention;
    for (std::size_t q = 0; q < s.q_count(); ++q) {
        CHECK(single[0].scores[q] == doctest::Approx(1.0 - oracle::slice_entropy(block.slice(q, 0))).epsilon(1e-12));
    }

    ViewFrame twin = views[0];
    twin.global_index = 10;
    const ToyGenerator quiet({6.0, 2.0, 0.0});
    const auto twins = warmup_probe(quiet, std::vector<ViewFrame>{views[0], twin}, 55, 0, EvidenceMode::evidence);
    CHECK(twins[0].scores == twins[1].scores);
}
