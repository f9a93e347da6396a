#include "evimem/streaming.hpp"

#include "evimem/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace evimem;

namespace {

StreamConfig small_config(Strategy strategy, std::size_t length = 24) {
    StreamConfig c;
    c.strategy = strategy;
    c.stream_length = length;
    return c;
}

FrameSource orbit(const Scene& scene, std::size_t frame_count) {
    return [&scene, frame_count](FrameIndex i) {
        const double a = 2.0 * 3.141592653589793 * static_cast<double>(i) / static_cast<double>(frame_count);
        const double e = 0.35;
        return render_view(scene, {std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e)}, 4, i, 19, 0.3);
    };
}

// Synthetic frame that every token sees (all visible) or none sees.
ViewFrame manual_frame(FrameIndex index, std::size_t q_count, bool sees_all) {
    ViewFrame v;
    v.global_index = index;
    v.patch_grid = 4;
    v.visibility.assign(q_count, sees_all ? 1 : 0);
    v.projected_patch.resize(q_count);
    for (std::size_t q = 0; q < q_count; ++q) v.projected_patch[q] = static_cast<std::uint16_t>(q % 16);
    v.target_latent.assign(q_count, sees_all ? 1.0 : 0.3);
    return v;
}

}  // namespace

TEST_CASE("chunk_stream windowing") {
    const auto chunks = chunk_stream(10, 4, 2);
    std::vector<std::size_t> starts;
    std::vector<std::size_t> sizes;
    for (const auto& c : chunks) {
        starts.push_back(c.begin);
        sizes.push_back(c.size);
    }
    CHECK(starts == std::vector<std::size_t>{0, 2, 4, 6, 8});
    CHECK(sizes == std::vector<std::size_t>{4, 4, 4, 4, 2});

    const auto single = chunk_stream(4, 4, 4);
    REQUIRE(single.size() == 1);
    CHECK(single[0].size == 4);

    CHECK_THROWS_AS((void)chunk_stream(10, 4, 5), config_error);
    CHECK_THROWS_AS((void)chunk_stream(0, 4, 2), std::invalid_argument);
}

TEST_CASE("property: chunks cover every frame") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> t_dist(1, 60);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t t = t_dist(rng);
        const std::size_t c = std::uniform_int_distribution<std::size_t>(1, t)(rng);
        const std::size_t s = std::uniform_int_distribution<std::size_t>(1, c)(rng);
        std::vector<int> seen(t, 0);
        for (const auto& chunk : chunk_stream(t, c, s)) {
            CHECK(chunk.size >= 1);
            CHECK(chunk.size <= c);
            for (std::size_t i = 0; i < chunk.size; ++i) ++seen[chunk.begin + i];
        }
        CHECK(std::count(seen.begin(), seen.end(), 0) == 0);
    }
}

TEST_CASE("stream config validation names the key") {
    StreamConfig c;
    c.stride = 9;
    c.chunk_size = 8;
    try {
        c.validate();
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(e.key() == "stride");
    }
    c = StreamConfig{};
    c.bundle_size = 0;
    CHECK_THROWS_AS(c.validate(), config_error);
    c = StreamConfig{};
    c.stream_length = 4;
    CHECK_THROWS_AS(c.validate(), config_error);  // chunk_size 8 > T
}

TEST_CASE("evidential chunk 0 bundles the whole chunk when K >= C") {
    const Scene scene = synthesize_scene(ShapeKind::composite, 8, 1);
    StreamConfig cfg = small_config(Strategy::evidential);
    cfg.depth = cfg.chunk_size;  // every row can hold every chunk frame
    StreamRunner runner(cfg, ToyGenerator{});
    std::vector<ViewFrame> chunk;
    for (FrameIndex i = 0; i < 8; ++i) chunk.push_back(orbit(scene, 24)(i));
    const ChunkResult r = runner.process_chunk(chunk, 0);
    CHECK(std::set<FrameIndex>(r.bundle.begin(), r.bundle.end()) == std::set<FrameIndex>{0, 1, 2, 3, 4, 5, 6, 7});
    CHECK(r.memory_scalar_count == 2 * 512 * 8);
}

TEST_CASE("a frame nobody sees never enters memory") {
    const std::size_t q_count = 64;
    StreamConfig cfg = small_config(Strategy::evidential, 2);
    cfg.chunk_size = 2;
    cfg.stride = 2;
    cfg.depth = 1;
    cfg.bundle_size = 2;
    const ToyGenerator gen({6.0, 2.0, 0.0});
    StreamRunner runner(cfg, gen);
    const std::vector chunk{manual_frame(0, q_count, true), manual_frame(1, q_count, false)};

    const ChunkResult r = runner.process_chunk(chunk, 0);
    CHECK(r.bundle == std::vector<FrameIndex>{0});
    CHECK(r.ownership == std::map<FrameIndex, std::size_t>{{0, q_count}});

    // brute-force memory over the same candidates
    const auto scores = evidence_scores(gen.probe(chunk, cfg.seeds.frozen_prior, 0).attention, EvidenceMode::evidence);
    for (std::size_t q = 0; q < q_count; ++q) {
        std::vector<std::pair<FrameIndex, float>> offered;
        for (const auto& s : scores) offered.emplace_back(s.frame, static_cast<float>(s.scores[q]));
        const auto expected = oracle::top_d(offered, 1);
        CHECK(runner.memory()->frame(q, 0) == expected[0].frame);
        CHECK(runner.memory()->score(q, 0) == expected[0].score);
    }
    CHECK(runner.retained_frames() == 1);
}

TEST_CASE("repeating a chunk leaves memory unchanged") {
    const Scene scene = synthesize_scene(ShapeKind::sphere, 8, 2);
    StreamRunner runner(small_config(Strategy::evidential), ToyGenerator{});
    std::vector<ViewFrame> chunk;
    for (FrameIndex i = 0; i < 8; ++i) chunk.push_back(orbit(scene, 24)(i));
    (void)runner.process_chunk(chunk, 0);
    const EvidentialMemory after_first = *runner.memory();
    (void)runner.process_chunk(chunk, 1);
    CHECK(*runner.memory() == after_first);
}

TEST_CASE("evidential stream: non-degrading memory with constant footprint") {
    const Scene scene = synthesize_scene(ShapeKind::composite, 8, 6);
    const StreamConfig cfg = small_config(Strategy::evidential, 40);
    StreamRunner runner(cfg, ToyGenerator{});
    const FrameSource frames = orbit(scene, 40);
    std::vector<float> previous;
    for (const auto& span : chunk_stream(40, cfg.chunk_size, cfg.stride)) {
        std::vector<ViewFrame> chunk;
        for (std::size_t i = 0; i < span.size; ++i) chunk.push_back(frames(static_cast<FrameIndex>(span.begin + i)));
        const ChunkResult r = runner.process_chunk(chunk, 0);
        const auto scores = runner.memory()->scores();
        if (!previous.empty()) {
            for (std::size_t i = 0; i < scores.size(); ++i) REQUIRE(scores[i] >= previous[i]);
        }
        previous.assign(scores.begin(), scores.end());
        CHECK(r.memory_scalar_count == 2 * 512 * 5);
        CHECK(r.bundle.size() <= cfg.bundle_size);
        CHECK(runner.retained_frames() == runner.memory()->ownership_counts().size());
    }
}

TEST_CASE("run_stream is deterministic and its footprint ignores T") {
    const Scene scene = synthesize_scene(ShapeKind::composite, 8, 3);
    const ToyGenerator gen;
    const auto a = run_stream(small_config(Strategy::evidential, 20), gen, scene, orbit(scene, 20));
    const auto b = run_stream(small_config(Strategy::evidential, 20), gen, scene, orbit(scene, 20));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].metrics == b[i].metrics);
        CHECK(a[i].bundle == b[i].bundle);
        CHECK(a[i].latent == b[i].latent);
    }
    const auto long_run = run_stream(small_config(Strategy::evidential, 100), gen, scene, orbit(scene, 100));
    for (const auto& r : a) CHECK(r.memory_scalar_count == 5120);
    for (const auto& r : long_run) CHECK(r.memory_scalar_count == 5120);
}

TEST_CASE("a view that covers every token takes over the bundle") {
    const std::size_t q_count = 512;
    const Scene scene = synthesize_scene(ShapeKind::sphere, 8, 0);
    StreamConfig cfg = small_config(Strategy::evidential, 24);
    cfg.depth = 1;
    cfg.bundle_size = 1;
    const FrameIndex covering = 9;
    const FrameSource frames = [&](FrameIndex i) { return manual_frame(i, q_count, i == covering); };
    const auto results = run_stream(cfg, ToyGenerator{}, scene, frames);
    // frame 9 arrives in chunk 1 (frames 4..11) and holds every slot from then on
    for (std::size_t c = 1; c < results.size(); ++c) {
        CHECK(results[c].bundle == std::vector<FrameIndex>{covering});
        CHECK(results[c].ownership == std::map<FrameIndex, std::size_t>{{covering, q_count}});
    }
}

TEST_CASE("baseline strategies") {
    const Scene scene = synthesize_scene(ShapeKind::composite, 8, 5);
    const ToyGenerator gen;
    const std::size_t t = 24;

    const auto last = run_baseline(small_config(Strategy::last_chunk, t), gen, scene, orbit(scene, t));
    const auto spans = chunk_stream(t, 8, 4);
    for (std::size_t c = 0; c < last.size(); ++c) {
        CHECK(last[c].bundle.size() == spans[c].size);
        CHECK(last[c].bundle.front() == static_cast<FrameIndex>(spans[c].begin));
        CHECK(last[c].memory_scalar_count == 0);
    }

    const auto single = run_baseline(small_config(Strategy::single_last_view, t), gen, scene, orbit(scene, t));
    for (std::size_t c = 0; c < single.size(); ++c) {
        CHECK(single[c].bundle == std::vector<FrameIndex>{static_cast<FrameIndex>(spans[c].begin + spans[c].size - 1)});
    }

    const auto full = run_baseline(small_config(Strategy::full_history_oracle, t), gen, scene, orbit(scene, t));
    for (std::size_t c = 0; c < full.size(); ++c) {
        const std::size_t seen = spans[c].begin + spans[c].size;
        CHECK(full[c].bundle.size() == seen);
        CHECK(full[c].memory_scalar_count == seen * 512);
    }

    const auto r1 = run_baseline(small_config(Strategy::random_k, t), gen, scene, orbit(scene, t));
    const auto r2 = run_baseline(small_config(Strategy::random_k, t), gen, scene, orbit(scene, t));
    for (std::size_t c = 0; c < r1.size(); ++c) {
        CHECK(r1[c].bundle == r2[c].bundle);
        CHECK(r1[c].bundle.size() <= 8);
        const std::size_t seen = spans[c].begin + spans[c].size;
        CHECK(r1[c].bundle.size() == std::min<std::size_t>(8, seen));
        CHECK(std::set<FrameIndex>(r1[c].bundle.begin(), r1[c].bundle.end()).size() == r1[c].bundle.size());
        for (FrameIndex f : r1[c].bundle) CHECK(static_cast<std::size_t>(f) < seen);
    }

    CHECK_THROWS_AS((void)run_baseline(small_config(Strategy::evidential, t), gen, scene, orbit(scene, t)), config_error);
}

TEST_CASE("strategy names round-trip") {
    for (Strategy s : all_strategies()) CHECK(parse_strategy(to_string(s)) == s);
    CHECK_THROWS_AS((void)parse_strategy("kv_cache"), config_error);
}
