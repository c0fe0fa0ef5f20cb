#pragma once

#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "genf/strategies.hpp"

namespace genf {

inline constexpr int kReportSchemaVersion = 1;

inline nlohmann::json report_to_json(const ForecastReport& r) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["strategy"] = r.strategy;
    j["L"] = r.L;
    j["N"] = r.N;
    j["seed"] = r.seed;
    j["metrics"] = {{"mse", r.metrics.mse},
                    {"mae", r.metrics.mae},
                    {"smape", r.metrics.smape},
                    {"n", r.metrics.n}};
    if (std::isnan(r.generation_mse))
        j["generation_mse"] = nullptr;
    else
        j["generation_mse"] = r.generation_mse;
    j["param_counts"] = r.param_counts;
    j["config_hash"] = r.config_hash;
    j["train_windows"] = r.train_windows;
    j["test_windows"] = r.test_windows;
    j["unit_isolation_ok"] = r.unit_isolation_ok;
    return j;
}

inline nlohmann::json sweep_to_json(const SweepResult& sweep, const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "sweep";
    j["N"] = cfg.N;
    j["seeds"] = cfg.seeds;
    j["config_hash"] = cfg.config_hash;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : sweep.rows) j["rows"].push_back(report_to_json(r));

    // per-(strategy, L) aggregates over seeds
    std::map<std::string, std::vector<const ForecastReport*>> groups;
    for (const auto& r : sweep.rows) {
        const std::string key = r.strategy == "GENF" ? "GENF-" + std::to_string(r.L) : r.strategy;
        groups[key].push_back(&r);
    }
    nlohmann::json agg = nlohmann::json::object();
    for (const auto& [key, rows] : groups) {
        auto stat = [&](auto pick) {
            double mean = 0.0;
            for (const auto* r : rows) mean += pick(*r);
            mean /= static_cast<double>(rows.size());
            double var = 0.0;
            for (const auto* r : rows) {
                const double d = pick(*r) - mean;
                var += d * d;
            }
            var /= static_cast<double>(rows.size());
            return std::make_pair(mean, std::sqrt(var));
        };
        auto [mse_m, mse_s] = stat([](const ForecastReport& r) { return r.metrics.mse; });
        auto [mae_m, mae_s] = stat([](const ForecastReport& r) { return r.metrics.mae; });
        auto [sm_m, sm_s] = stat([](const ForecastReport& r) { return r.metrics.smape; });
        agg[key] = {{"mse_mean", mse_m},   {"mse_std", mse_s},   {"mae_mean", mae_m},
                    {"mae_std", mae_s},    {"smape_mean", sm_m}, {"smape_std", sm_s},
                    {"runs", rows.size()}};
    }
    j["aggregate"] = agg;
    return j;
}

/// Aligned text table of the sweep aggregates.
inline std::string render_sweep_table(const nlohmann::json& sweep_json) {
    std::ostringstream out;
    out << std::left << std::setw(10) << "strategy" << std::right << std::setw(12) << "mse"
        << std::setw(12) << "mae" << std::setw(12) << "smape" << std::setw(7) << "runs" << '\n';
    for (const auto& [key, a] : sweep_json.at("aggregate").items()) {
        out << std::left << std::setw(10) << key << std::right << std::fixed
            << std::setprecision(5) << std::setw(12) << a.at("mse_mean").get<double>()
            << std::setw(12) << a.at("mae_mean").get<double>() << std::setw(12)
            << a.at("smape_mean").get<double>() << std::setw(7) << a.at("runs").get<std::size_t>()
            << '\n';
    }
    return out.str();
}

/// Deterministic serialization: sorted keys (nlohmann objects are ordered
/// maps) and shortest round-trip doubles.
inline void write_report_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_report_json: cannot open " + path);
    out << j.dump(2) << '\n';
}

} // namespace genf
