#include "evimem/config.hpp"

#include "evimem/errors.hpp"
#include "evimem/format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace evimem {

std::string_view to_string(OutputFormat f) noexcept { return f == OutputFormat::json ? "json" : "csv"; }

OutputFormat parse_output_format(std::string_view text) {
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    throw config_error("format", "expected csv or json, got '" + std::string(text) + "'");
}

namespace {

constexpr std::size_t kAllTokens = std::numeric_limits<std::size_t>::max();

template <typename Int>
Int parse_integer(std::string_view key, std::string_view value) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw config_error(std::string(key), "malformed integer '" + std::string(value) + "'");
    }
    return out;
}

double parse_real(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out)) {
        throw config_error(std::string(key), "malformed number '" + std::string(value) + "'");
    }
    return out;
}

struct KeyHandler {
    std::string_view key;
    std::function<void(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Int, typename Field>
KeyHandler integer_key(std::string_view name, Field field) {
    return {name,
            [name, field](ExperimentConfig& c, std::string_view v) { field(c) = parse_integer<Int>(name, v); },
            [field](const ExperimentConfig& c) {
                return std::to_string(field(c));
            }};
}

template <typename Field>
KeyHandler real_key(std::string_view name, Field field) {
    return {name, [name, field](ExperimentConfig& c, std::string_view v) { field(c) = parse_real(name, v); },
            [field](const ExperimentConfig& c) { return format_real(field(c)); }};
}

const std::vector<KeyHandler>& handlers() {
    static const std::vector<KeyHandler> table{
        integer_key<std::size_t>("chunk_size", [](auto& c) -> auto& { return c.stream.chunk_size; }),
        integer_key<std::size_t>("stride", [](auto& c) -> auto& { return c.stream.stride; }),
        integer_key<std::size_t>("depth", [](auto& c) -> auto& { return c.stream.depth; }),
        integer_key<std::size_t>("bundle_size", [](auto& c) -> auto& { return c.stream.bundle_size; }),
        KeyHandler{"probe_step",
                   [](ExperimentConfig& c, std::string_view v) { c.stream.probe_step = parse_integer<int>("probe_step", v); },
                   [](const ExperimentConfig& c) { return std::to_string(c.stream.probe_step); }},
        KeyHandler{"evidence_mode",
                   [](ExperimentConfig& c, std::string_view v) { c.stream.evidence_mode = parse_evidence_mode(v); },
                   [](const ExperimentConfig& c) { return std::string(to_string(c.stream.evidence_mode)); }},
        KeyHandler{"strategy", [](ExperimentConfig& c, std::string_view v) { c.stream.strategy = parse_strategy(v); },
                   [](const ExperimentConfig& c) { return std::string(to_string(c.stream.strategy)); }},
        integer_key<std::size_t>("stream_length", [](auto& c) -> auto& { return c.stream.stream_length; }),
        integer_key<std::uint64_t>("frozen_prior_seed", [](auto& c) -> auto& { return c.stream.seeds.frozen_prior; }),
        integer_key<std::uint64_t>("latent_seed", [](auto& c) -> auto& { return c.stream.seeds.latent; }),
        integer_key<std::uint64_t>("scene_seed", [](auto& c) -> auto& { return c.stream.seeds.scene; }),
        integer_key<std::uint64_t>("noise_seed", [](auto& c) -> auto& { return c.stream.seeds.noise; }),
        integer_key<std::size_t>("token_begin", [](auto& c) -> auto& { return c.stream.token_range.begin; }),
        KeyHandler{"token_end",
                   [](ExperimentConfig& c, std::string_view v) {
                       c.stream.token_range.end = parse_integer<std::size_t>("token_end", v);
                   },
                   [](const ExperimentConfig& c) {
                       return std::to_string(std::min(c.stream.token_range.end, c.q_count()));
                   }},
        integer_key<std::size_t>("sampler_steps", [](auto& c) -> auto& { return c.stream.sampler.steps; }),
        real_key("epsilon", [](auto& c) -> auto& { return c.stream.sampler.epsilon; }),
        KeyHandler{"shape", [](ExperimentConfig& c, std::string_view v) { c.shape = parse_shape_kind(v); },
                   [](const ExperimentConfig& c) { return std::string(to_string(c.shape)); }},
        integer_key<std::size_t>("grid_size", [](auto& c) -> auto& { return c.grid_size; }),
        integer_key<std::size_t>("patch_grid", [](auto& c) -> auto& { return c.patch_grid; }),
        real_key("elevation_deg", [](auto& c) -> auto& { return c.orbit.elevation_deg; }),
        real_key("jitter_deg", [](auto& c) -> auto& { return c.orbit.jitter_sigma_deg; }),
        real_key("hallucination_level", [](auto& c) -> auto& { return c.hallucination_level; }),
        real_key("logit_noise_sigma", [](auto& c) -> auto& { return c.generator.logit_noise_sigma; }),
        real_key("kappa_vis", [](auto& c) -> auto& { return c.generator.kappa_vis; }),
        real_key("kappa_near", [](auto& c) -> auto& { return c.generator.kappa_near; }),
        KeyHandler{"output", [](ExperimentConfig& c, std::string_view v) { c.output_path = std::string(v); },
                   [](const ExperimentConfig& c) { return c.output_path; }},
        KeyHandler{"format", [](ExperimentConfig& c, std::string_view v) { c.format = parse_output_format(v); },
                   [](const ExperimentConfig& c) { return std::string(to_string(c.format)); }},
    };
    return table;
}


void apply_one(ExperimentConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw config_error(std::string(assignment), "expected key=value");
    }
    const std::string_view key = assignment.substr(0, eq);
    const std::string_view value = assignment.substr(eq + 1);
    for (const auto& h : handlers()) {
        if (h.key == key) {
            if (value.empty()) throw config_error(std::string(key), "missing value");
            h.set(config, value);
            return;
        }
    }
    throw config_error(std::string(key), "unknown key");
}

void require(bool ok, const char* key, const std::string& what) {
    if (!ok) throw config_error(key, what);
}

}  // namespace

void ExperimentConfig::validate() const {
    require(grid_size >= 4 && grid_size <= 64, "grid_size", "must lie in [4, 64]");
    require(patch_grid >= 2 && patch_grid <= 64, "patch_grid", "must lie in [2, 64]");
    require(hallucination_level >= 0.0 && hallucination_level <= 1.0, "hallucination_level", "must lie in [0, 1]");
    require(generator.logit_noise_sigma >= 0.0, "logit_noise_sigma", "must be >= 0");
    require(generator.kappa_vis >= 0.0, "kappa_vis", "must be >= 0");
    require(generator.kappa_near >= 0.0, "kappa_near", "must be >= 0");
    require(orbit.elevation_deg >= -90.0 && orbit.elevation_deg <= 90.0, "elevation_deg", "must lie in [-90, 90]");
    require(orbit.jitter_sigma_deg >= 0.0, "jitter_deg", "must be >= 0");
    require(!output_path.empty(), "output", "must not be empty");
    if (stream.token_range.end != kAllTokens) {
        require(stream.token_range.end <= q_count(), "token_end",
                "must not exceed the token count " + std::to_string(q_count()));
    }
    stream.validate();
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig config;
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::string> assignments;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream words(line);
        std::string word;
        while (words >> word) assignments.push_back(word);
    }
    apply_overrides(config, assignments);
    return config;
}

void apply_overrides(ExperimentConfig& config, const std::vector<std::string>& assignments) {
    for (const auto& a : assignments) apply_one(config, a);
    config.validate();
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config", "cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& h : handlers()) out.emplace_back(std::string(h.key), h.get(config));
    return out;
}

}  // namespace evimem
