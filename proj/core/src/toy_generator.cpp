#include "evimem/toy_generator.hpp"

#include "evimem/errors.hpp"
#include "evimem/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace evimem {

std::string_view to_string(ShapeKind kind) noexcept {
    switch (kind) {
        case ShapeKind::sphere: return "sphere";
        case ShapeKind::box: return "box";
        case ShapeKind::composite: return "composite";
    }
    return "sphere";
}

ShapeKind parse_shape_kind(std::string_view text) {
    if (text == "sphere") return ShapeKind::sphere;
    if (text == "box") return ShapeKind::box;
    if (text == "composite") return ShapeKind::composite;
    throw config_error("shape", "unknown shape '" + std::string(text) + "'");
}

std::size_t Scene::occupied_count() const noexcept {
    return static_cast<std::size_t>(std::count(occupancy.begin(), occupancy.end(), std::uint8_t{1}));
}

Latent Scene::ground_truth() const { return Latent(occupancy.begin(), occupancy.end()); }

namespace {

std::size_t token_index(std::size_t g, std::size_t x, std::size_t y, std::size_t z) { return (x * g + y) * g + z; }

double voxel_center(std::size_t i, std::size_t g) {
    return static_cast<double>(i) + 0.5 - static_cast<double>(g) / 2.0;
}

void fill_sphere(Scene& s) {
    const std::size_t g = s.grid_size;
    const double r = 0.35 * static_cast<double>(g);
    for (std::size_t x = 0; x < g; ++x)
        for (std::size_t y = 0; y < g; ++y)
            for (std::size_t z = 0; z < g; ++z) {
                const double cx = voxel_center(x, g), cy = voxel_center(y, g), cz = voxel_center(z, g);
                if (cx * cx + cy * cy + cz * cz <= r * r) s.occupancy[token_index(g, x, y, z)] = 1;
            }
}

void fill_box(Scene& s, const std::array<std::size_t, 3>& origin, std::size_t side) {
    const std::size_t g = s.grid_size;
    for (std::size_t x = origin[0]; x < origin[0] + side; ++x)
        for (std::size_t y = origin[1]; y < origin[1] + side; ++y)
            for (std::size_t z = origin[2]; z < origin[2] + side; ++z) s.occupancy[token_index(g, x, y, z)] = 1;
}

std::size_t cube_root_exact(std::size_t n) {
    auto g = static_cast<std::size_t>(std::llround(std::cbrt(static_cast<double>(n))));
    if (g * g * g != n) throw std::invalid_argument("scene: token count " + std::to_string(n) + " is not a cube");
    return g;
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 normalized(const Vec3& v) {
    const double n = std::sqrt(dot(v, v));
    return {v[0] / n, v[1] / n, v[2] / n};
}

}  // namespace

Scene synthesize_scene(ShapeKind kind, std::size_t grid_size, std::uint64_t seed) {
    if (grid_size < 4) throw config_error("grid_size", "must be >= 4, got " + std::to_string(grid_size));
    Scene s;
    s.grid_size = grid_size;
    s.shape = kind;
    s.seed = seed;
    s.occupancy.assign(grid_size * grid_size * grid_size, 0);

    const auto side = static_cast<std::size_t>(std::llround(0.5 * static_cast<double>(grid_size)));
    const std::size_t slack = grid_size - side;
    switch (kind) {
        case ShapeKind::sphere:
            fill_sphere(s);
            break;
        case ShapeKind::box: {
            std::array<std::size_t, 3> origin{};
            for (std::size_t a = 0; a < 3; ++a) origin[a] = uniform_below(hash_key(seed, 0xB0, a), slack + 1);
            fill_box(s, origin, side);
            break;
        }
        case ShapeKind::composite: {
            fill_sphere(s);
            std::array<std::size_t, 3> origin{};
            for (std::size_t a = 0; a < 3; ++a) origin[a] = uniform_below(hash_key(seed, 0xC0, a), 2) ? slack : 0;
            fill_box(s, origin, side);
            break;
        }
    }
    if (s.occupied_count() == 0) throw std::logic_error("scene: no occupied voxel");
    return s;
}

Scene scene_from_occupancy(std::vector<std::uint8_t> occupancy) {
    Scene s;
    s.grid_size = cube_root_exact(occupancy.size());
    s.occupancy = std::move(occupancy);
    for (auto& v : s.occupancy) v = v ? 1 : 0;
    if (s.occupied_count() == 0) throw std::invalid_argument("scene: no occupied voxel");
    return s;
}

ViewFrame render_view(const Scene& scene, const Vec3& direction, std::size_t patch_grid, FrameIndex global_index,
                      std::uint64_t noise_seed, double hallucination_level) {
    if (std::abs(std::sqrt(dot(direction, direction)) - 1.0) > 1e-6) {
        throw std::invalid_argument("render_view: direction must be a unit vector");
    }
    if (!(hallucination_level >= 0.0 && hallucination_level <= 1.0)) {
        throw config_error("hallucination_level", "must lie in [0, 1]");
    }
    if (patch_grid < 2 || patch_grid > 255) throw config_error("patch_grid", "must lie in [2, 255]");

    const std::size_t g = scene.grid_size;
    const std::size_t q_count = scene.q_count();

    const Vec3 up = std::abs(direction[2]) < 0.99 ? Vec3{0.0, 0.0, 1.0} : Vec3{0.0, 1.0, 0.0};
    const Vec3 u = normalized(cross(up, direction));
    const Vec3 w = cross(direction, u);

    ViewFrame view;
    view.global_index = global_index;
    view.direction = direction;
    view.patch_grid = patch_grid;
    view.noise_seed = noise_seed;
    view.visibility.assign(q_count, 0);
    view.projected_patch.assign(q_count, 0);
    view.target_latent.assign(q_count, 0.0);

    const double half = static_cast<double>(g) / 2.0;
    const double cell = static_cast<double>(g) / static_cast<double>(patch_grid);
    auto bucket = [&](double coord) {
        const auto i = static_cast<long long>(std::floor((coord + half) / cell));
        return static_cast<std::size_t>(std::clamp<long long>(i, 0, static_cast<long long>(patch_grid) - 1));
    };

    std::vector<double> nearest(patch_grid * patch_grid, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> owner(patch_grid * patch_grid, q_count);
    std::vector<double> depth(q_count);

    for (std::size_t x = 0; x < g; ++x)
        for (std::size_t y = 0; y < g; ++y)
            for (std::size_t z = 0; z < g; ++z) {
                const std::size_t q = token_index(g, x, y, z);
                const Vec3 c{voxel_center(x, g), voxel_center(y, g), voxel_center(z, g)};
                const std::size_t patch = bucket(dot(c, u)) * patch_grid + bucket(dot(c, w));
                view.projected_patch[q] = static_cast<std::uint16_t>(patch);
                depth[q] = dot(c, direction);
                if (scene.occupancy[q] && depth[q] > nearest[patch]) {
                    nearest[patch] = depth[q];
                    owner[patch] = q;
                }
            }
    for (std::size_t q : owner) {
        if (q < q_count) view.visibility[q] = 1;
    }

    const double h = hallucination_level;
    for (std::size_t q = 0; q < q_count; ++q) {
        if (view.visibility[q]) {
            view.target_latent[q] = static_cast<double>(scene.occupancy[q]);
            continue;
        }
        const double r = unit_uniform(hash_key(noise_seed, static_cast<std::uint64_t>(global_index), q));
        view.target_latent[q] = h <= 0.5 ? 2.0 * h * r : (2.0 * h - 1.0) + (2.0 - 2.0 * h) * r;
    }
    return view;
}

GeneratorProbe probe_attention(std::span<const ViewFrame> views, std::uint64_t prior_seed, int probe_step,
                               const GeneratorParams& params) {
    if (views.empty()) throw std::invalid_argument("probe_attention: at least one view required");
    const std::size_t p = views.front().patch_grid;
    const std::size_t q_count = views.front().visibility.size();
    std::vector<ViewSlice> slices;
    slices.reserve(views.size());
    for (const auto& v : views) {
        if (v.patch_grid != p) throw std::invalid_argument("probe_attention: views disagree on patch_grid");
        if (v.visibility.size() != q_count) throw std::invalid_argument("probe_attention: views disagree on token count");
        slices.push_back({v.global_index, p * p});
    }

    GeneratorProbe probe{AttentionBlock(q_count, std::move(slices)), probe_step};
    AttentionBlock& block = probe.attention;
    const std::size_t patches = p * p;
    const bool noisy = params.logit_noise_sigma > 0.0;

    for (std::size_t q = 0; q < q_count; ++q) {
        auto row = block.row(q);
        for (std::size_t v = 0; v < views.size(); ++v) {
            auto logits = row.subspan(block.column_offset(v), patches);
            const ViewFrame& view = views[v];
            if (view.visibility[q]) {
                const std::size_t patch = view.projected_patch[q];
                const std::size_t pu = patch / p;
                const std::size_t pw = patch % p;
                logits[patch] = params.kappa_vis;
                if (pu > 0) logits[patch - p] = params.kappa_near;
                if (pu + 1 < p) logits[patch + p] = params.kappa_near;
                if (pw > 0) logits[patch - 1] = params.kappa_near;
                if (pw + 1 < p) logits[patch + 1] = params.kappa_near;
            }
            if (noisy) {
                for (std::size_t i = 0; i < patches; i += 2) {
                    const auto key = hash_key(prior_seed, static_cast<std::uint64_t>(probe_step), q,
                                              static_cast<std::uint64_t>(view.global_index), i / 2);
                    const auto [a, b] = normal_pair(key);
                    logits[i] += params.logit_noise_sigma * a;
                    if (i + 1 < patches) logits[i + 1] += params.logit_noise_sigma * b;
                }
            }
        }
        const double peak = *std::max_element(row.begin(), row.end());
        double total = 0.0;
        for (double& a : row) {
            a = std::exp(a - peak);
            total += a;
        }
        for (double& a : row) a /= total;
    }
    return probe;
}

std::vector<double> view_velocity(std::span<const double> z, double t, const ViewFrame& view) {
    if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("view_velocity: t must lie in [0, 1)");
    if (z.size() != view.target_latent.size()) throw std::invalid_argument("view_velocity: latent size mismatch");
    std::vector<double> v(z.size());
    const double inv = 1.0 / (1.0 - t);
    for (std::size_t q = 0; q < z.size(); ++q) v[q] = (view.target_latent[q] - z[q]) * inv;
    return v;
}

}  // namespace evimem
