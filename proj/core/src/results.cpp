#include "evimem/results.hpp"

#include "evimem/format.hpp"

#include <json.hpp>

#include <fstream>
#include <iostream>
#include <stdexcept>

namespace evimem {

std::string render_csv(const ResultTable& table, bool timing) {
    std::string out;
    if (table.with_strategy) out += "strategy,";
    if (table.with_seed) out += "seed,";
    out += "chunk_index,iou,mse,bundle_size,memory_scalars,wall_ms\n";
    for (const auto& r : table.rows) {
        const MetricsRow& m = r.metrics;
        if (table.with_strategy) out += r.strategy + ",";
        if (table.with_seed) out += std::to_string(r.seed) + ",";
        out += std::to_string(m.chunk_index) + ',' + format_real(m.iou) + ',' + format_real(m.mse) + ',' +
               std::to_string(m.bundle_size) + ',' + std::to_string(m.memory_scalars) + ',' +
               (timing ? format_fixed(m.wall_ms, 3) : std::string("0")) + '\n';
    }
    return out;
}

std::string render_json(const ResultTable& table, const ExperimentConfig& config, bool timing) {
    nlohmann::ordered_json doc;
    auto& cfg = doc["config"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config_entries(config)) cfg[key] = value;

    auto& rows = doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : table.rows) {
        nlohmann::ordered_json row;
        if (table.with_strategy) row["strategy"] = r.strategy;
        if (table.with_seed) row["seed"] = r.seed;
        row["chunk_index"] = r.metrics.chunk_index;
        row["iou"] = r.metrics.iou;
        row["mse"] = r.metrics.mse;
        row["bundle_size"] = r.metrics.bundle_size;
        row["memory_scalars"] = r.metrics.memory_scalars;
        row["wall_ms"] = timing ? r.metrics.wall_ms : 0.0;
        rows.push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

void write_results(const ResultTable& table, const ExperimentConfig& config, const std::string& path,
                   OutputFormat format, bool timing) {
    const std::string body = format == OutputFormat::json ? render_json(table, config, timing) : render_csv(table, timing);
    if (path == "-") {
        std::cout << body << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << body;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace evimem
