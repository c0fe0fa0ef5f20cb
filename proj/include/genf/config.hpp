#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "genf/rng.hpp"
#include "genf/strategies.hpp"

namespace genf {

struct ConfigKeyError : std::runtime_error {
    explicit ConfigKeyError(const std::string& key)
        : std::runtime_error("unknown config key '" + key + "'") {}
};

/// Flat sectioned key=value config file:
///   [section]
///   key = value        # comment
/// Keys are addressed as "section.key".
class Config {
public:
    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_string(ss.str());
    }

    static Config parse_string(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line, section;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw std::runtime_error("config line " + std::to_string(line_no) +
                                             ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            const std::string full = section.empty() ? key : section + "." + key;
            cfg.entries_[full] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        return parse_double_checked(it->first, it->second);
    }

    long get_int(const std::string& key, long fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::size_t pos = 0;
        const long v = std::stol(it->second, &pos);
        if (pos != it->second.size())
            throw std::runtime_error("config key '" + key + "': invalid integer '" + it->second +
                                     "'");
        return v;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw std::runtime_error("config key '" + key + "': invalid bool '" + it->second + "'");
    }

    template <typename T, typename Fn>
    std::vector<T> get_list(const std::string& key, const std::vector<T>& fallback,
                            Fn&& convert) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::vector<T> out;
        std::istringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(convert(item));
        }
        return out;
    }

    /// Every present key must be known; typos are bad_config_key errors.
    void check_known_keys(const std::set<std::string>& known) const {
        for (const auto& [key, _] : entries_)
            if (!known.count(key)) throw ConfigKeyError(key);
    }

    /// FNV-1a over the sorted canonical "key=value" lines.
    std::string hash() const {
        std::string canonical;
        for (const auto& [key, value] : entries_) canonical += key + "=" + value + "\n";
        std::ostringstream hex;
        hex << std::hex << fnv1a(canonical);
        return hex.str();
    }

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static double parse_double_checked(const std::string& key, const std::string& value) {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::runtime_error("config key '" + key + "': invalid number '" + value + "'");
        return v;
    }

    std::map<std::string, std::string> entries_;
};

/// Known config surface; documented in the README.
inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "data.source", "data.csv_path", "data.target_feature", "data.M", "data.N", "data.L_set",
        "data.split",
        "synth.kind", "synth.units", "synth.T", "synth.seed", "synth.phi", "synth.sigma",
        "synth.level", "synth.init_scale",
        "itc.gamma", "itc.k", "itc.fraction",
        "gan.noise_dim", "gan.lstm_hidden", "gan.lambda", "gan.eta", "gan.n_critic", "gan.lr",
        "gan.batch", "gan.epochs", "gan.batches_per_epoch", "gan.supervised_norm",
        "predictor.enc_layers", "predictor.dec_layers", "predictor.heads", "predictor.d_model",
        "predictor.d_ff", "predictor.dropout", "predictor.lr", "predictor.batch",
        "predictor.epochs", "predictor.patience", "predictor.batches_per_epoch",
        "predictor.val_cap",
        "run.seeds", "run.outdir", "run.metrics_on_scaled", "run.gen_noise_draws",
    };
    return keys;
}

inline ExperimentConfig load_experiment_config(const Config& cfg) {
    cfg.check_known_keys(known_config_keys());
    ExperimentConfig e;
    e.csv_path = cfg.get_string("data.csv_path", "");
    if (cfg.get_string("data.source", "synth") == "csv" && e.csv_path.empty())
        throw std::runtime_error("config: data.source=csv requires data.csv_path");
    if (cfg.get_string("data.source", "synth") == "synth") e.csv_path.clear();

    const std::string kind = cfg.get_string("synth.kind", "benchmark");
    if (kind == "benchmark") {
        e.synth = ProcessSpec::default_benchmark(
            static_cast<std::size_t>(cfg.get_int("synth.units", 200)),
            static_cast<std::size_t>(cfg.get_int("synth.T", 200)),
            static_cast<std::uint64_t>(cfg.get_int("synth.seed", 1)));
    } else if (kind == "ar1") {
        e.synth = ProcessSpec::ar1(cfg.get_double("synth.phi", 0.9),
                                   cfg.get_double("synth.sigma", 0.1),
                                   static_cast<std::size_t>(cfg.get_int("synth.units", 50)),
                                   static_cast<std::size_t>(cfg.get_int("synth.T", 100)),
                                   static_cast<std::uint64_t>(cfg.get_int("synth.seed", 1)),
                                   cfg.get_double("synth.level", 0.5));
        e.synth.init_scale = cfg.get_double("synth.init_scale", 0.3);
    } else {
        throw std::runtime_error("config: unknown synth.kind '" + kind + "'");
    }

    e.M = static_cast<std::size_t>(cfg.get_int("data.M", 20));
    e.N = static_cast<int>(cfg.get_int("data.N", 8));
    e.L_set = cfg.get_list<int>("data.L_set", {2, 4, 6},
                                [](const std::string& s) { return std::stoi(s); });
    e.target_feature = static_cast<int>(cfg.get_int("data.target_feature", 0));
    auto split = cfg.get_list<double>("data.split", {0.6, 0.2, 0.2},
                                      [](const std::string& s) { return std::stod(s); });
    if (split.size() != 3) throw std::runtime_error("config: data.split needs 3 fractions");
    e.split_fractions = {split[0], split[1], split[2]};

    e.gamma = static_cast<std::size_t>(cfg.get_int("itc.gamma", 4));
    e.mi_k = static_cast<int>(cfg.get_int("itc.k", 3));
    e.itc_fraction = cfg.get_double("itc.fraction", 0.5);

    e.gan.noise_dim = static_cast<std::size_t>(cfg.get_int("gan.noise_dim", 8));
    e.gan.lstm_hidden = static_cast<std::size_t>(cfg.get_int("gan.lstm_hidden", 5));
    e.gan.lambda = cfg.get_double("gan.lambda", 5.0);
    e.gan.eta = cfg.get_double("gan.eta", 1.0);
    e.gan.n_critic = static_cast<std::size_t>(cfg.get_int("gan.n_critic", 5));
    e.gan.lr = cfg.get_double("gan.lr", 0.001);
    e.gan.batch = static_cast<std::size_t>(cfg.get_int("gan.batch", 64));
    e.gan.batches_per_epoch = static_cast<std::size_t>(cfg.get_int("gan.batches_per_epoch", 0));
    const std::string norm = cfg.get_string("gan.supervised_norm", "l2");
    if (norm == "l2")
        e.gan.supervised_norm = GenConfig::SupNorm::l2;
    else if (norm == "l2_squared")
        e.gan.supervised_norm = GenConfig::SupNorm::l2_squared;
    else
        throw std::runtime_error("config: gan.supervised_norm must be l2 or l2_squared");
    e.gan_epochs = static_cast<std::size_t>(cfg.get_int("gan.epochs", 60));

    e.pred.enc_layers = static_cast<std::size_t>(cfg.get_int("predictor.enc_layers", 2));
    e.pred.dec_layers = static_cast<std::size_t>(cfg.get_int("predictor.dec_layers", 2));
    e.pred.heads = static_cast<std::size_t>(cfg.get_int("predictor.heads", 3));
    e.pred.d_model = static_cast<std::size_t>(cfg.get_int("predictor.d_model", 12));
    e.pred.d_ff = static_cast<std::size_t>(cfg.get_int("predictor.d_ff", 24));
    e.pred.dropout = cfg.get_double("predictor.dropout", 0.1);
    e.pred.lr = cfg.get_double("predictor.lr", 0.001);
    e.pred.batch = static_cast<std::size_t>(cfg.get_int("predictor.batch", 64));
    e.pred.epochs = static_cast<std::size_t>(cfg.get_int("predictor.epochs", 200));
    e.pred.patience = static_cast<std::size_t>(cfg.get_int("predictor.patience", 50));
    e.pred.batches_per_epoch =
        static_cast<std::size_t>(cfg.get_int("predictor.batches_per_epoch", 0));
    e.val_window_cap = static_cast<std::size_t>(cfg.get_int("predictor.val_cap", 1500));

    e.seeds = cfg.get_list<std::uint64_t>(
        "run.seeds", {1}, [](const std::string& s) { return std::stoull(s); });
    e.outdir = cfg.get_string("run.outdir", ".");
    e.metrics_on_scaled = cfg.get_bool("run.metrics_on_scaled", false);
    e.gen_noise_draws = static_cast<std::size_t>(cfg.get_int("run.gen_noise_draws", 1));
    e.config_hash = cfg.hash();

    e.gan.validate();
    e.pred.validate();
    return e;
}

} // namespace genf
