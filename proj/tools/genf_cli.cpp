// genf: reproducible long-range forecasting experiments (DF / IF / GenF),
// theory bounds, and synthetic benchmarks. See README.md for the config
// format and the report schema.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "genf/config.hpp"
#include "genf/report.hpp"
#include "genf/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct MissingArtifactError : std::runtime_error {
    explicit MissingArtifactError(const std::string& path)
        : std::runtime_error("missing checkpoint or file: " + path) {}
    std::string path;
};

void require_file(const std::string& path) {
    if (!fs::exists(path)) throw MissingArtifactError(path);
}

genf::ExperimentConfig load_config(const std::string& path) {
    require_file(path);
    return genf::load_experiment_config(genf::Config::parse_file(path));
}

std::vector<genf::RawSeries> load_units(const genf::ExperimentConfig& cfg) {
    if (!cfg.csv_path.empty()) {
        require_file(cfg.csv_path);
        return genf::load_csv(cfg.csv_path);
    }
    return genf::simulate(cfg.synth);
}

void emit(const json& j, const std::string& out_path) {
    if (!out_path.empty()) {
        genf::write_report_json(out_path, j);
    }
    std::cout << j.dump(2) << '\n';
}

genf::ForecastReport run_one(const genf::PreparedData& data, const genf::ExperimentConfig& cfg,
                             const std::string& strategy, int L, std::uint64_t seed) {
    if (strategy == "df") return genf::run_direct(data, cfg, seed);
    if (strategy == "if") return genf::run_iterative(data, cfg, seed);
    if (strategy == "genf") return genf::run_genf(data, cfg, L, seed);
    throw std::invalid_argument("unknown strategy '" + strategy + "'");
}

std::string report_basename(const genf::ForecastReport& r) {
    std::string name = "report_" + r.strategy;
    if (r.strategy == "GENF") name += "-" + std::to_string(r.L);
    name += "_seed" + std::to_string(r.seed);
    return name;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GenF: generative long-range time series forecasting toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, csv_override, strategy = "df", gen_ck, pred_csv;
    int l_flag = -1;
    long seed_flag = -1;

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "validate and summarize a CSV datasource");
    ingest->add_option("--config", config_path)->required();
    ingest->add_option("--csv", csv_override, "override data.csv_path");
    ingest->add_option("--out", out_path, "write the summary JSON here");

    // ---- split ----
    auto* split = app.add_subcommand("split", "write unit-level split manifests");
    split->add_option("--config", config_path)->required();
    split->add_option("--out", out_path, "output directory")->required();
    split->add_option("--seed", seed_flag, "seed (default: first of run.seeds)");

    // ---- train-gan ----
    auto* train_gan = app.add_subcommand("train-gan", "ITC split and CWGAN-TS training");
    train_gan->add_option("--config", config_path)->required();
    train_gan->add_option("--out", out_path, "output directory")->required();
    train_gan->add_option("--seed", seed_flag);

    // ---- generate ----
    auto* generate = app.add_subcommand("generate", "recursive synthetic windows for test data");
    generate->add_option("--config", config_path)->required();
    generate->add_option("--gen", gen_ck, "generator checkpoint")->required();
    generate->add_option("--L", l_flag, "synthetic window length")->required();
    generate->add_option("--out", out_path, "output CSV")->required();
    generate->add_option("--seed", seed_flag);

    // ---- train-predictor ----
    auto* train_pred = app.add_subcommand("train-predictor", "train the transformer predictor");
    train_pred->add_option("--config", config_path)->required();
    train_pred->add_option("--strategy", strategy, "df | if | genf");
    train_pred->add_option("--L", l_flag, "synthetic window (genf)");
    train_pred->add_option("--gan", gen_ck, "generator checkpoint (genf)");
    train_pred->add_option("--out", out_path, "output directory")->required();
    train_pred->add_option("--seed", seed_flag);

    // ---- forecast ----
    auto* forecast = app.add_subcommand("forecast", "end-to-end strategy run");
    forecast->add_option("--config", config_path)->required();
    forecast->add_option("--strategy", strategy, "df | if | genf")->required();
    forecast->add_option("--L", l_flag, "synthetic window (genf)");
    forecast->add_option("--out", out_path, "output directory");
    forecast->add_option("--seed", seed_flag);

    // ---- evaluate ----
    auto* evaluate = app.add_subcommand("evaluate", "metrics from a prediction CSV");
    evaluate->add_option("--pred", pred_csv, "prediction CSV")->required();
    evaluate->add_option("--out", out_path);

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "DF/IF/GenF-L comparison table");
    sweep->add_option("--config", config_path)->required();
    sweep->add_option("--out", out_path, "output directory");

    // ---- theory ----
    auto* theory = app.add_subcommand("theory", "bias-variance bounds and corollary verdicts");
    double l1 = 0.2, l2 = 0.1, sigma_i2 = 0.05, sigma_d2 = 0.1, alpha = 1.0;
    double beta0 = 0.5, beta1 = 1.0, beta2 = 1.0, rel_tol = 1e-3;
    long theory_n = 8, theory_l = -1;
    bool grid = false, as_json = false;
    theory->add_option("--n", theory_n, "prediction horizon");
    theory->add_option("--L", theory_l, "single synthetic window (default: grid)");
    theory->add_flag("--grid", grid, "tabulate U_GenF over L = 1..N-1");
    theory->add_option("--l1", l1);
    theory->add_option("--l2", l2);
    theory->add_option("--sigma-i2", sigma_i2);
    theory->add_option("--sigma-d2", sigma_d2);
    theory->add_option("--alpha", alpha);
    theory->add_option("--beta0", beta0);
    theory->add_option("--beta1", beta1);
    theory->add_option("--beta2", beta2);
    theory->add_option("--rel-tol", rel_tol, "tolerance for the holds-for-all-L equality");
    theory->add_flag("--json", as_json);
    theory->add_option("--out", out_path);

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "synthetic benchmark utilities");
    auto* bench_emit = bench->add_subcommand("emit", "write a simulated dataset as CSV");
    bench_emit->add_option("--config", config_path)->required();
    bench_emit->add_option("--out", out_path, "output CSV")->required();
    double bv_phi = 0.8, bv_sigma = 0.15;
    long bv_units = 1200, bv_t = 13, bv_m = 8, bv_n = 4, bv_l = 2, bv_r = 20, bv_seed = 6;
    auto* bench_bv = bench->add_subcommand("bv", "empirical bias-variance decomposition (AR(1))");
    bench_bv->add_option("--phi", bv_phi);
    bench_bv->add_option("--sigma", bv_sigma);
    bench_bv->add_option("--units", bv_units);
    bench_bv->add_option("--T", bv_t);
    bench_bv->add_option("--M", bv_m);
    bench_bv->add_option("--n", bv_n, "prediction horizon");
    bench_bv->add_option("--L", bv_l, "synthetic window for the GenF decomposition");
    bench_bv->add_option("--ensemble", bv_r);
    bench_bv->add_option("--seed", bv_seed);
    bench_bv->add_option("--out", out_path);
    bench->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            auto cfg = load_config(config_path);
            if (!csv_override.empty()) cfg.csv_path = csv_override;
            auto units = load_units(cfg);
            std::size_t missing = 0, t_min = SIZE_MAX, t_max = 0;
            for (const auto& u : units) {
                t_min = std::min(t_min, u.length());
                t_max = std::max(t_max, u.length());
                for (const auto& row : u.missing_mask)
                    for (bool m : row) missing += m ? 1 : 0;
                genf::impute_last(u); // validates imputability
            }
            json j;
            j["units"] = units.size();
            j["features"] = units.empty() ? 0 : units[0].features();
            j["feature_names"] = units.empty() ? std::vector<std::string>{} : units[0].feature_names;
            j["t_min"] = units.empty() ? 0 : t_min;
            j["t_max"] = t_max;
            j["missing_cells"] = missing;
            j["config_hash"] = cfg.config_hash;
            emit(j, out_path);
            return 0;
        }

        if (*split) {
            auto cfg = load_config(config_path);
            const std::uint64_t seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag)
                                                      : cfg.seeds.at(0);
            auto units = load_units(cfg);
            std::vector<std::string> ids;
            for (const auto& u : units) ids.push_back(u.unit_id);
            auto parts = genf::split_units(ids, cfg.split_fractions, seed);
            fs::create_directories(out_path);
            genf::write_split_manifest(out_path + "/train.txt", parts.train);
            genf::write_split_manifest(out_path + "/test.txt", parts.test);
            genf::write_split_manifest(out_path + "/validation.txt", parts.validation);
            json j{{"train", parts.train.size()},
                   {"test", parts.test.size()},
                   {"validation", parts.validation.size()},
                   {"seed", seed}};
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        if (*train_gan) {
            auto cfg = load_config(config_path);
            const std::uint64_t seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag)
                                                      : cfg.seeds.at(0);
            auto data = genf::prepare_data(load_units(cfg), cfg, seed);
            auto art = genf::prepare_genf_artifacts(data, cfg, seed);
            fs::create_directories(out_path);
            art.gan->gen_ps.save(out_path + "/gan_generator.ck");
            art.gan->crit_ps.save(out_path + "/gan_critic.ck");
            genf::write_partition_manifest(out_path + "/itc_partition.tsv", art.partition);
            genf::write_cwgan_log(out_path + "/gan_log.csv", art.gan_log);
            json j;
            j["seed"] = seed;
            j["g_units"] = art.g_units.size();
            j["p_units"] = art.p_units.size();
            j["epochs"] = art.gan_log.size();
            j["param_counts"] = {{"generator", art.gan->gen.param_count()},
                                 {"critic", art.gan->critic.param_count()}};
            if (!art.gan_log.empty()) {
                j["final_critic_loss"] = art.gan_log.back().critic_loss;
                j["final_gen_loss"] = art.gan_log.back().gen_loss;
                j["final_supervised_term"] = art.gan_log.back().supervised_term;
            }
            j["config_hash"] = cfg.config_hash;
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        if (*generate) {
            auto cfg = load_config(config_path);
            const std::uint64_t seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag)
                                                      : cfg.seeds.at(0);
            if (l_flag < 0 || l_flag >= cfg.N)
                throw std::invalid_argument("generate requires 0 <= L < N (got L=" +
                                            std::to_string(l_flag) + ", N=" +
                                            std::to_string(cfg.N) + ")");
            require_file(gen_ck);
            auto data = genf::prepare_data(load_units(cfg), cfg, seed);
            genf::CwganModel model(data.K, cfg.gan, seed);
            model.gen_ps.load(gen_ck);

            auto test_set =
                genf::build_direct_samples(data.test, cfg.M, cfg.N, cfg.N, cfg.target_feature);
            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot open " + out_path);
            out << "window_id,step";
            for (std::size_t k = 0; k < data.K; ++k) out << ",f" << k;
            out << '\n';
            out.precision(17);
            for (std::size_t i = 0; i < test_set.samples.size(); ++i) {
                auto gen = genf::generate_recursive(
                    model.gen, model.gen_ps, test_set.samples[i].window, l_flag,
                    genf::derive_seed(genf::derive_seed(seed, "gen_noise_test"), "window", i));
                for (int j = 0; j < l_flag; ++j) {
                    out << test_set.unit_ids[i] << ':' << test_set.window_start[i] << ',' << j + 1;
                    for (std::size_t k = 0; k < data.K; ++k)
                        out << ',' << gen.block(static_cast<std::size_t>(j), k);
                    out << '\n';
                }
            }
            std::cout << json{{"windows", test_set.samples.size()}, {"L", l_flag}}.dump(2) << '\n';
            return 0;
        }

        if (*train_pred) {
            auto cfg = load_config(config_path);
            const std::uint64_t seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag)
                                                      : cfg.seeds.at(0);
            auto data = genf::prepare_data(load_units(cfg), cfg, seed);
            fs::create_directories(out_path);

            genf::PredConfig pc = cfg.pred;
            std::vector<genf::PredictorLogRow> log;
            std::size_t params = 0;
            if (strategy == "df") {
                auto train = genf::build_direct_samples(data.train, cfg.M, cfg.N, cfg.N,
                                                        cfg.target_feature);
                auto val = genf::build_direct_samples(data.validation, cfg.M, cfg.N, cfg.N,
                                                      cfg.target_feature);
                pc.out_dim = 1;
                genf::PredictorModel model(data.K, pc, genf::derive_seed(seed, "pred_df"));
                log = genf::train_predictor(model, train.samples, val.samples,
                                            genf::derive_seed(seed, "pred_df_train"));
                model.ps.save(out_path + "/predictor.ck");
                params = model.net.param_count();
            } else if (strategy == "if") {
                auto train = genf::build_onestep_samples(data.train, cfg.M, cfg.N);
                auto val = genf::build_onestep_samples(data.validation, cfg.M, cfg.N);
                pc.out_dim = data.K;
                genf::PredictorModel model(data.K, pc, genf::derive_seed(seed, "pred_if"));
                log = genf::train_predictor(model, train.samples, val.samples,
                                            genf::derive_seed(seed, "pred_if_train"));
                model.ps.save(out_path + "/predictor.ck");
                params = model.net.param_count();
            } else if (strategy == "genf") {
                if (l_flag <= 0 || l_flag >= cfg.N)
                    throw std::invalid_argument("train-predictor genf requires 0 < L < N (got L=" +
                                                std::to_string(l_flag) + ", N=" +
                                                std::to_string(cfg.N) + ")");
                require_file(gen_ck);
                genf::GenfArtifacts art;
                auto scores = genf::score_units(data.train, cfg.mi_k,
                                                genf::derive_seed(seed, "itc_jitter"));
                art.partition =
                    genf::itc_partition(scores, std::min(cfg.gamma, data.train.size()),
                                        cfg.itc_fraction, genf::derive_seed(seed, "itc"));
                art.g_units = art.partition.subset_G;
                art.p_units = art.partition.subset_P;
                art.gan = std::make_shared<genf::CwganModel>(data.K, cfg.gan,
                                                             genf::derive_seed(seed, "gan_init"));
                art.gan->gen_ps.load(gen_ck);

                auto p_series = genf::select_units(data.train, art.p_units);
                auto p_set = genf::build_direct_samples(p_series, cfg.M, cfg.N, cfg.N,
                                                        cfg.target_feature);
                auto val_set = genf::build_direct_samples(data.validation, cfg.M, cfg.N, cfg.N,
                                                          cfg.target_feature);
                auto p_shift = genf::detail::shift_with_generation(
                    p_set, p_series, art, cfg, data.scaling, l_flag,
                    genf::derive_seed(seed, "gen_noise_train"));
                auto val_shift = genf::detail::shift_with_generation(
                    val_set, data.validation, art, cfg, data.scaling, l_flag,
                    genf::derive_seed(seed, "gen_noise_val"));
                pc.out_dim = 1;
                genf::PredictorModel model(data.K, pc, genf::derive_seed(seed, "pred_genf"));
                log = genf::train_predictor(model, p_shift.samples, val_shift.samples,
                                            genf::derive_seed(seed, "pred_genf_train"));
                model.ps.save(out_path + "/predictor.ck");
                params = model.net.param_count();
            } else {
                throw std::invalid_argument("unknown strategy '" + strategy + "'");
            }
            genf::write_predictor_log(out_path + "/predictor_log.csv", log);
            json j{{"strategy", strategy},
                   {"epochs_run", log.size()},
                   {"param_count", params},
                   {"seed", seed},
                   {"config_hash", cfg.config_hash}};
            if (!log.empty()) j["final_train_mse"] = log.back().train_mse;
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        if (*forecast) {
            auto cfg = load_config(config_path);
            const std::uint64_t seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag)
                                                      : cfg.seeds.at(0);
            auto data = genf::prepare_data(load_units(cfg), cfg, seed);
            const int L = l_flag < 0 ? 0 : l_flag;
            auto rep = run_one(data, cfg, strategy, L, seed);
            json j = genf::report_to_json(rep);
            if (!out_path.empty()) {
                fs::create_directories(out_path);
                const std::string base = out_path + "/" + report_basename(rep);
                genf::write_report_json(base + ".json", j);
                genf::write_prediction_csv(base + "_predictions.csv", rep.predictions);
            }
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        if (*evaluate) {
            require_file(pred_csv);
            std::ifstream in(pred_csv);
            std::string line;
            std::getline(in, line); // header
            std::vector<double> y, yh;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::istringstream ss(line);
                std::string cell;
                std::getline(ss, cell, ','); // window_id
                std::getline(ss, cell, ','); // horizon
                std::getline(ss, cell, ',');
                y.push_back(std::stod(cell));
                std::getline(ss, cell, ',');
                yh.push_back(std::stod(cell));
            }
            auto m = genf::compute_metrics(y, yh);
            json j{{"mse", m.mse}, {"mae", m.mae}, {"smape", m.smape}, {"n", m.n}};
            emit(j, out_path);
            return 0;
        }

        if (*sweep) {
            auto cfg = load_config(config_path);
            auto units = load_units(cfg);
            auto result = genf::sweep_l(units, cfg);
            json j = genf::sweep_to_json(result, cfg);
            const std::string table = genf::render_sweep_table(j);
            if (!out_path.empty()) {
                fs::create_directories(out_path);
                genf::write_report_json(out_path + "/sweep.json", j);
                std::ofstream tf(out_path + "/sweep_table.txt", std::ios::binary);
                tf << table;
            }
            std::cout << table;
            return 0;
        }

        if (*theory) {
            genf::TheoryParams p;
            p.l1 = l1;
            p.l2 = l2;
            p.sigma_i2 = sigma_i2;
            p.sigma_d2 = sigma_d2;
            p.alpha = alpha;
            p.beta0 = beta0;
            p.beta1 = beta1;
            p.beta2 = beta2;
            p.n = static_cast<std::size_t>(theory_n);
            p.l = theory_l >= 0 ? static_cast<std::size_t>(theory_l) : 1;
            auto verdict = genf::corollary_check(p, rel_tol);
            genf::TheoryParams pd = p;
            pd.l = std::min<std::size_t>(p.l, p.n - 1);
            auto b = genf::bounds(pd);

            json j;
            j["n"] = p.n;
            j["u_dir"] = b.u_dir;
            j["u_iter"] = b.u_iter;
            j["corollary"] = {{"holds_some_l", verdict.holds_some_l},
                              {"holds_all_l", verdict.holds_all_l},
                              {"threshold", verdict.threshold},
                              {"argmin_l", verdict.argmin_l},
                              {"u_genf_min", verdict.u_genf_min}};
            json rows = json::array();
            if (grid || theory_l < 0) {
                for (std::size_t l = 1; l < p.n; ++l)
                    rows.push_back({{"L", l}, {"u_genf", genf::u_genf_at(p, l)}});
            } else {
                rows.push_back({{"L", p.l}, {"u_genf", genf::u_genf_at(p, p.l)}});
            }
            j["grid"] = rows;

            if (as_json) {
                emit(j, out_path);
            } else {
                std::ostringstream text;
                text << "U_dir  = " << b.u_dir << "\nU_iter = " << b.u_iter << "\n";
                text << std::left << std::setw(6) << "L" << "U_GenF\n";
                for (const auto& row : rows)
                    text << std::left << std::setw(6) << row.at("L").get<std::size_t>()
                         << row.at("u_genf").get<double>() << '\n';
                text << "corollary: holds_some_L=" << (verdict.holds_some_l ? "yes" : "no")
                     << " holds_all_L=" << (verdict.holds_all_l ? "yes" : "no")
                     << " beta0_threshold=" << verdict.threshold
                     << " argmin_L=" << verdict.argmin_l << '\n';
                std::cout << text.str();
                if (!out_path.empty()) {
                    std::ofstream tf(out_path, std::ios::binary);
                    tf << text.str();
                }
            }
            return 0;
        }

        if (*bench_emit) {
            auto cfg = load_config(config_path);
            auto units = genf::simulate(cfg.synth);
            genf::write_csv(out_path, units);
            std::cout << json{{"units", units.size()}, {"T", cfg.synth.T}, {"out", out_path}}.dump(2)
                      << '\n';
            return 0;
        }

        if (*bench_bv) {
            auto spec = genf::ProcessSpec::ar1(bv_phi, bv_sigma, static_cast<std::size_t>(bv_units),
                                               static_cast<std::size_t>(bv_t),
                                               static_cast<std::uint64_t>(bv_seed), 0.0);
            spec.init_scale = bv_sigma / std::sqrt(std::max(1e-12, 1.0 - bv_phi * bv_phi));
            const auto M = static_cast<std::size_t>(bv_m);
            const auto N = static_cast<std::size_t>(bv_n);
            const auto L = static_cast<std::size_t>(bv_l);
            if (L >= N) throw std::invalid_argument("bench bv requires 0 <= L < N");

            genf::ForecasterFactory dir_full = [N](const std::vector<genf::RawSeries>& u,
                                                   std::uint64_t) {
                return genf::ols_ar1_forecaster(u, N);
            };
            auto full = genf::empirical_bv(spec, dir_full, M, N, static_cast<std::size_t>(bv_r),
                                           static_cast<std::uint64_t>(bv_seed), 2400);

            json j;
            j["direct_full_horizon"] = {{"bias_sq", full.bias_sq}, {"variance", full.variance},
                                        {"noise", full.noise},     {"mse", full.mse},
                                        {"ensemble", full.ensemble_size}};
            j["identity_gap_rel"] =
                std::abs(full.mse - (full.bias_sq + full.variance + full.noise)) / full.mse;

            if (L >= 1) {
                genf::ForecasterFactory dir_short = [N, L](const std::vector<genf::RawSeries>& u,
                                                           std::uint64_t) {
                    return genf::ols_ar1_forecaster(u, N - L);
                };
                genf::ForecasterFactory iter_l = [L](const std::vector<genf::RawSeries>& u,
                                                     std::uint64_t) {
                    return genf::ols_ar1_forecaster(u, L);
                };
                auto dir_est = genf::empirical_bv(spec, dir_short, M, N - L,
                                                  static_cast<std::size_t>(bv_r),
                                                  genf::derive_seed(bv_seed, "dir"), 2400);
                auto iter_est = genf::empirical_bv(spec, iter_l, M, L,
                                                   static_cast<std::size_t>(bv_r),
                                                   genf::derive_seed(bv_seed, "iter"), 2400);

                // gamma^2: OLS one-step tail vs the true tail under the
                // direct (N-L) predictor
                genf::ProcessSpec test_spec = spec;
                test_spec.seed = genf::derive_seed(bv_seed, "gamma_test");
                auto test_units = genf::simulate(test_spec);
                auto fit_units_spec = spec;
                fit_units_spec.seed = genf::derive_seed(bv_seed, "gamma_train");
                auto fit_units = genf::simulate(fit_units_spec);
                auto one_step = genf::ols_ar1_forecaster(fit_units, 1);
                auto direct_pred = genf::ols_ar1_forecaster(fit_units, N - L);

                std::vector<std::pair<genf::Mat, genf::Mat>> pairs;
                for (const auto& u : test_units) {
                    if (u.length() < M + L) continue;
                    for (std::size_t s = 0; s + M + L <= u.length(); s += M) {
                        genf::Mat w(M, 1);
                        for (std::size_t t = 0; t < M; ++t) w(t, 0) = u.values(s + t, 0);
                        genf::Mat synth_tail(M, 1), true_tail(M, 1);
                        // shift by L: rows L..M-1 of the window, then tails
                        for (std::size_t t = 0; t + L < M; ++t) {
                            synth_tail(t, 0) = w(t + L, 0);
                            true_tail(t, 0) = w(t + L, 0);
                        }
                        genf::Mat roll = w;
                        for (std::size_t j = 0; j < L; ++j) {
                            const double step = one_step(roll);
                            synth_tail(M - L + j, 0) = step;
                            genf::Mat next(M, 1);
                            for (std::size_t t = 0; t + 1 < M; ++t) next(t, 0) = roll(t + 1, 0);
                            next(M - 1, 0) = step;
                            roll = std::move(next);
                            true_tail(M - L + j, 0) = u.values(s + M + j, 0);
                        }
                        pairs.emplace_back(std::move(synth_tail), std::move(true_tail));
                    }
                }
                const double gamma_sq = genf::estimate_gamma_sq(direct_pred, pairs);
                auto decomp = genf::combine_genf_decomposition(gamma_sq, iter_est, dir_est);
                j["genf_decomposition"] = {{"L", L},
                                           {"gamma_sq", decomp.gamma_sq},
                                           {"iter_bias_plus_var", decomp.iter_bias_plus_var},
                                           {"dir_bias", decomp.dir_bias},
                                           {"dir_var", decomp.dir_var},
                                           {"s_main", decomp.s_main},
                                           {"s_appendix", decomp.s_appendix}};
            }
            emit(j, out_path);
            return 0;
        }
    } catch (const genf::ConfigKeyError& e) {
        std::cerr << "error: bad_config_key: " << e.what() << '\n';
        return 2;
    } catch (const MissingArtifactError& e) {
        std::cerr << "error: missing_checkpoint: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: invalid_argument: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: runtime: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
