#pragma once

#include <memory>
#include <optional>
#include <set>

#include "genf/cwgan.hpp"
#include "genf/data.hpp"
#include "genf/metrics.hpp"
#include "genf/mi.hpp"
#include "genf/parallel.hpp"
#include "genf/predictor.hpp"
#include "genf/synthbench.hpp"

namespace genf {

struct StrategySpec {
    enum class Kind { DF, IF, GENF };
    Kind kind = Kind::DF;
    int L = 0; // synthetic window length (GENF)
    int N = 1; // prediction horizon

    void validate() const {
        if (N < 1) throw std::invalid_argument("StrategySpec: N must be >= 1");
        if (kind == Kind::GENF && (L < 0 || L >= N))
            throw std::invalid_argument("StrategySpec: GENF requires 0 <= L < N (got L=" +
                                        std::to_string(L) + ", N=" + std::to_string(N) + ")");
    }

    static const char* name(Kind k) {
        switch (k) {
            case Kind::DF: return "DF";
            case Kind::IF: return "IF";
            default: return "GENF";
        }
    }
};

struct ExperimentConfig {
    // data
    std::string csv_path;        // empty: simulate `synth`
    ProcessSpec synth = ProcessSpec::default_benchmark();
    std::size_t M = 20;
    int N = 8;
    std::vector<int> L_set = {2, 4, 6};
    int target_feature = 0;
    std::array<double, 3> split_fractions = {0.6, 0.2, 0.2};
    // itc
    std::size_t gamma = 4;
    int mi_k = 3;
    double itc_fraction = 0.5;
    // models
    GenConfig gan;
    std::size_t gan_epochs = 60;
    PredConfig pred;
    // run
    std::vector<std::uint64_t> seeds = {1};
    std::string outdir = ".";
    bool metrics_on_scaled = false;
    std::size_t gen_noise_draws = 1;
    std::size_t val_window_cap = 1500; // early-stop eval cost control (0 = all)
    std::string config_hash = "0";
};

struct PredictionRow {
    std::string window_id;
    int horizon;
    double y_true;
    double y_pred;
};

struct ForecastReport {
    std::string strategy;
    int L = 0;
    int N = 1;
    std::uint64_t seed = 0;
    MetricSet metrics;           // unscaled units unless metrics_on_scaled
    double generation_mse = std::numeric_limits<double>::quiet_NaN(); // GENF only
    std::map<std::string, std::size_t> param_counts;
    std::string config_hash;
    std::size_t train_windows = 0, test_windows = 0;
    bool unit_isolation_ok = false;
    std::vector<PredictionRow> predictions;
};

// ---------------------------------------------------------------------------
// Data preparation: impute, unit split, scale on training units only.
// ---------------------------------------------------------------------------

struct PreparedData {
    std::vector<RawSeries> train, validation, test; // scaled
    ScalingParams scaling;
    UnitSplit split;
    std::size_t K = 0;
};

inline PreparedData prepare_data(const std::vector<RawSeries>& raw_units,
                                 const ExperimentConfig& cfg, std::uint64_t seed) {
    std::vector<RawSeries> imputed;
    imputed.reserve(raw_units.size());
    for (const auto& u : raw_units) imputed.push_back(impute_last(u));

    std::vector<std::string> ids;
    for (const auto& u : imputed) ids.push_back(u.unit_id);
    PreparedData out;
    out.split = split_units(ids, cfg.split_fractions, seed);

    auto train_raw = select_units(imputed, out.split.train);
    out.scaling = fit_scale(train_raw);
    auto scale_all = [&](const std::vector<std::string>& sel) {
        std::vector<RawSeries> scaled;
        for (const auto& u : select_units(imputed, sel)) scaled.push_back(apply_scale(u, out.scaling));
        return scaled;
    };
    out.train = scale_all(out.split.train);
    out.validation = scale_all(out.split.validation);
    out.test = scale_all(out.split.test);
    out.K = imputed.empty() ? 0 : imputed[0].features();
    return out;
}

// ---------------------------------------------------------------------------
// Sample builders. Windows are dense (stride 1) and always reserve the full
// horizon so every strategy sees identical window positions.
// ---------------------------------------------------------------------------

struct SampleSet {
    std::vector<PredSample> samples;
    std::vector<std::string> unit_ids;     // per sample
    std::vector<std::size_t> window_start; // start row within the unit
};

/// Scalar target at horizon N (target_feature), headroom n_max >= N.
inline SampleSet build_direct_samples(const std::vector<RawSeries>& units, std::size_t M, int N,
                                      int n_max, int target_feature) {
    SampleSet out;
    for (const auto& u : units) {
        if (u.length() < M + static_cast<std::size_t>(n_max)) continue;
        const std::size_t count = u.length() - M - static_cast<std::size_t>(n_max) + 1;
        for (std::size_t s = 0; s < count; ++s) {
            PredSample p;
            p.window = Mat(M, u.features());
            for (std::size_t t = 0; t < M; ++t)
                for (std::size_t k = 0; k < u.features(); ++k) p.window(t, k) = u.values(s + t, k);
            p.target = {u.values(s + M - 1 + static_cast<std::size_t>(N),
                                 static_cast<std::size_t>(target_feature))};
            out.samples.push_back(std::move(p));
            out.unit_ids.push_back(u.unit_id);
            out.window_start.push_back(s);
        }
    }
    return out;
}

/// Full next-observation vector targets (the IF one-step model and the GAN).
inline SampleSet build_onestep_samples(const std::vector<RawSeries>& units, std::size_t M,
                                       int n_max) {
    SampleSet out;
    for (const auto& u : units) {
        if (u.length() < M + static_cast<std::size_t>(n_max)) continue;
        const std::size_t count = u.length() - M - static_cast<std::size_t>(n_max) + 1;
        for (std::size_t s = 0; s < count; ++s) {
            PredSample p;
            p.window = Mat(M, u.features());
            for (std::size_t t = 0; t < M; ++t)
                for (std::size_t k = 0; k < u.features(); ++k) p.window(t, k) = u.values(s + t, k);
            p.target.resize(u.features());
            for (std::size_t k = 0; k < u.features(); ++k) p.target[k] = u.values(s + M, k);
            out.samples.push_back(std::move(p));
            out.unit_ids.push_back(u.unit_id);
            out.window_start.push_back(s);
        }
    }
    return out;
}

inline std::vector<CondSample> to_cond_samples(const SampleSet& set) {
    std::vector<CondSample> out;
    out.reserve(set.samples.size());
    for (const auto& s : set.samples) out.push_back({s.window, s.target});
    return out;
}

// ---------------------------------------------------------------------------
// Shared evaluation helpers.
// ---------------------------------------------------------------------------

namespace detail {

inline std::set<std::string> id_set(const std::vector<std::string>& ids) {
    return {ids.begin(), ids.end()};
}

/// Deterministic stride thinning of the early-stop validation windows.
inline std::vector<PredSample> thin_validation(const std::vector<PredSample>& samples,
                                               std::size_t cap) {
    if (cap == 0 || samples.size() <= cap) return samples;
    std::vector<PredSample> out;
    out.reserve(cap);
    const double stride = static_cast<double>(samples.size()) / static_cast<double>(cap);
    for (std::size_t i = 0; i < cap; ++i)
        out.push_back(samples[static_cast<std::size_t>(i * stride)]);
    return out;
}

inline SampleSet thin_sample_set(const SampleSet& set, std::size_t cap) {
    if (cap == 0 || set.samples.size() <= cap) return set;
    SampleSet out;
    const double stride = static_cast<double>(set.samples.size()) / static_cast<double>(cap);
    for (std::size_t i = 0; i < cap; ++i) {
        const auto j = static_cast<std::size_t>(i * stride);
        out.samples.push_back(set.samples[j]);
        out.unit_ids.push_back(set.unit_ids[j]);
        out.window_start.push_back(set.window_start[j]);
    }
    return out;
}

inline bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (const auto& x : a)
        if (b.count(x)) return false;
    return true;
}

inline double present_value(double scaled, const ExperimentConfig& cfg,
                            const ScalingParams& scaling) {
    return cfg.metrics_on_scaled
               ? scaled
               : inverse_scale_value(scaled, scaling, static_cast<std::size_t>(cfg.target_feature));
}

struct EvalAccumulator {
    std::vector<double> y_true, y_pred;
    std::vector<PredictionRow> rows;

    void add(const std::string& unit, std::size_t pos, int horizon, double truth, double pred) {
        y_true.push_back(truth);
        y_pred.push_back(pred);
        rows.push_back({unit + ":" + std::to_string(pos), horizon, truth, pred});
    }
};

} // namespace detail

inline void write_prediction_csv(const std::string& path,
                                 const std::vector<PredictionRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_prediction_csv: cannot open " + path);
    out << "window_id,horizon,y_true,y_pred\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.window_id << ',' << r.horizon << ',' << r.y_true << ',' << r.y_pred << '\n';
}

// ---------------------------------------------------------------------------
// Direct forecasting: one predictor trained at horizon N.
// ---------------------------------------------------------------------------

inline ForecastReport run_direct(const PreparedData& data, const ExperimentConfig& cfg,
                                 std::uint64_t seed) {
    StrategySpec{.kind = StrategySpec::Kind::DF, .L = 0, .N = cfg.N}.validate();
    auto train = build_direct_samples(data.train, cfg.M, cfg.N, cfg.N, cfg.target_feature);
    auto val = build_direct_samples(data.validation, cfg.M, cfg.N, cfg.N, cfg.target_feature);
    auto test = build_direct_samples(data.test, cfg.M, cfg.N, cfg.N, cfg.target_feature);
    if (train.samples.empty()) throw std::runtime_error("run_direct: no training windows");

    PredConfig pc = cfg.pred;
    pc.out_dim = 1;
    PredictorModel model(data.K, pc, derive_seed(seed, "pred_df"));
    train_predictor(model, train.samples, detail::thin_validation(val.samples, cfg.val_window_cap),
                    derive_seed(seed, "pred_df_train"));

    detail::EvalAccumulator acc;
    for (std::size_t i = 0; i < test.samples.size(); ++i) {
        const double pred = model.predict(test.samples[i].window)[0];
        acc.add(test.unit_ids[i], test.window_start[i], cfg.N,
                detail::present_value(test.samples[i].target[0], cfg, data.scaling),
                detail::present_value(pred, cfg, data.scaling));
    }

    ForecastReport rep;
    rep.strategy = "DF";
    rep.L = 0;
    rep.N = cfg.N;
    rep.seed = seed;
    rep.metrics = compute_metrics(acc.y_true, acc.y_pred);
    rep.param_counts["predictor"] = model.net.param_count();
    rep.param_counts["total"] = model.net.param_count();
    rep.config_hash = cfg.config_hash;
    rep.train_windows = train.samples.size();
    rep.test_windows = test.samples.size();
    rep.unit_isolation_ok =
        detail::disjoint(detail::id_set(train.unit_ids), detail::id_set(test.unit_ids)) &&
        detail::disjoint(detail::id_set(val.unit_ids), detail::id_set(test.unit_ids));
    rep.predictions = std::move(acc.rows);
    return rep;
}

// ---------------------------------------------------------------------------
// Iterative forecasting: a one-step vector model recursed N times.
// ---------------------------------------------------------------------------

/// Recursive application of a one-step model; exposed for the fixed-point
/// tests. Returns the final predicted observation vector.
inline std::vector<double> iterate_forecast(
    const std::function<std::vector<double>(const Mat&)>& one_step, const Mat& window, int steps) {
    Mat w = window;
    std::vector<double> last(window.cols(), 0.0);
    for (int j = 0; j < steps; ++j) {
        last = one_step(w);
        Mat next(w.rows(), w.cols());
        for (std::size_t t = 0; t + 1 < w.rows(); ++t)
            for (std::size_t k = 0; k < w.cols(); ++k) next(t, k) = w(t + 1, k);
        for (std::size_t k = 0; k < w.cols(); ++k) next(w.rows() - 1, k) = last[k];
        w = std::move(next);
    }
    return last;
}

inline ForecastReport run_iterative(const PreparedData& data, const ExperimentConfig& cfg,
                                    std::uint64_t seed) {
    StrategySpec{.kind = StrategySpec::Kind::IF, .L = cfg.N - 1, .N = cfg.N}.validate();
    auto train = build_onestep_samples(data.train, cfg.M, cfg.N);
    auto val = build_onestep_samples(data.validation, cfg.M, cfg.N);
    auto test = build_direct_samples(data.test, cfg.M, cfg.N, cfg.N, cfg.target_feature);
    if (train.samples.empty()) throw std::runtime_error("run_iterative: no training windows");

    PredConfig pc = cfg.pred;
    pc.out_dim = data.K;
    PredictorModel model(data.K, pc, derive_seed(seed, "pred_if"));
    train_predictor(model, train.samples, detail::thin_validation(val.samples, cfg.val_window_cap),
                    derive_seed(seed, "pred_if_train"));

    auto one_step = [&](const Mat& w) { return model.predict(w); };
    detail::EvalAccumulator acc;
    for (std::size_t i = 0; i < test.samples.size(); ++i) {
        const auto final_obs = iterate_forecast(one_step, test.samples[i].window, cfg.N);
        const double pred = final_obs[static_cast<std::size_t>(cfg.target_feature)];
        acc.add(test.unit_ids[i], test.window_start[i], cfg.N,
                detail::present_value(test.samples[i].target[0], cfg, data.scaling),
                detail::present_value(pred, cfg, data.scaling));
    }

    ForecastReport rep;
    rep.strategy = "IF";
    rep.L = cfg.N - 1;
    rep.N = cfg.N;
    rep.seed = seed;
    rep.metrics = compute_metrics(acc.y_true, acc.y_pred);
    rep.param_counts["predictor"] = model.net.param_count();
    rep.param_counts["total"] = model.net.param_count();
    rep.config_hash = cfg.config_hash;
    rep.train_windows = train.samples.size();
    rep.test_windows = test.samples.size();
    rep.unit_isolation_ok =
        detail::disjoint(detail::id_set(train.unit_ids), detail::id_set(test.unit_ids)) &&
        detail::disjoint(detail::id_set(val.unit_ids), detail::id_set(test.unit_ids));
    rep.predictions = std::move(acc.rows);
    return rep;
}

// ---------------------------------------------------------------------------
// Generative forecasting.
// ---------------------------------------------------------------------------

/// Per-seed artifacts that do not depend on L; a sweep reuses them across
/// its GenF rows (they are deterministic functions of (data, cfg, seed)).
struct GenfArtifacts {
    ItcPartition partition;
    std::shared_ptr<CwganModel> gan;
    std::vector<CwganLogRow> gan_log;
    std::vector<std::string> g_units, p_units;
};

inline GenfArtifacts prepare_genf_artifacts(const PreparedData& data, const ExperimentConfig& cfg,
                                            std::uint64_t seed) {
    GenfArtifacts art;
    auto scores = score_units(data.train, cfg.mi_k, derive_seed(seed, "itc_jitter"));
    art.partition = itc_partition(scores, std::min(cfg.gamma, data.train.size()),
                                  cfg.itc_fraction, derive_seed(seed, "itc"));
    art.g_units = art.partition.subset_G;
    art.p_units = art.partition.subset_P;

    auto g_series = select_units(data.train, art.g_units);
    auto g_set = build_onestep_samples(g_series, cfg.M, 1);
    if (g_set.samples.empty()) throw std::runtime_error("prepare_genf_artifacts: empty G windows");
    art.gan = std::make_shared<CwganModel>(data.K, cfg.gan, derive_seed(seed, "gan_init"));
    art.gan_log = train_cwgan(*art.gan, to_cond_samples(g_set), cfg.gan_epochs,
                              derive_seed(seed, "gan_train"));
    return art;
}

namespace detail {

/// Shift a sample set L steps forward with recursively generated rows.
/// Targets stay at the original absolute position M+N. Returns the shifted
/// samples and the mean squared error of the synthetic rows against the
/// truth (in report units).
struct ShiftedSet {
    std::vector<PredSample> samples;
    double generation_mse = 0.0;
};

inline ShiftedSet shift_with_generation(const SampleSet& set, const std::vector<RawSeries>& units,
                                        const GenfArtifacts& art, const ExperimentConfig& cfg,
                                        const ScalingParams& scaling, int L,
                                        std::uint64_t noise_stream) {
    ShiftedSet out;
    out.samples.resize(set.samples.size());
    double err = 0.0;
    std::size_t err_terms = 0;

    std::map<std::string, const RawSeries*> by_id;
    for (const auto& u : units) by_id[u.unit_id] = &u;

    for (std::size_t i = 0; i < set.samples.size(); ++i) {
        const auto& s = set.samples[i];
        auto gen = generate_recursive(art.gan->gen, art.gan->gen_ps, s.window, L,
                                      derive_seed(noise_stream, "window", i));
        PredSample shifted;
        shifted.window = std::move(gen.final_window);
        shifted.target = s.target;

        // synthetic rows vs ground truth (always available at desk scale:
        // windows reserve N steps of headroom and L < N)
        const RawSeries& u = *by_id.at(set.unit_ids[i]);
        const std::size_t start = set.window_start[i];
        for (int j = 0; j < L; ++j) {
            for (std::size_t k = 0; k < u.features(); ++k) {
                double truth = u.values(start + cfg.M + static_cast<std::size_t>(j), k);
                double synth = gen.block(static_cast<std::size_t>(j), k);
                if (!cfg.metrics_on_scaled) {
                    truth = inverse_scale_value(truth, scaling, k);
                    synth = inverse_scale_value(synth, scaling, k);
                }
                const double d = truth - synth;
                err += d * d;
                ++err_terms;
            }
        }
        out.samples[i] = std::move(shifted);
    }
    out.generation_mse = err_terms ? err / static_cast<double>(err_terms) : 0.0;
    return out;
}

} // namespace detail

/// GenF: ITC split of the training units, CWGAN on G, L recursive synthetic
/// steps for every P/validation/test window, then a direct predictor over
/// the shifted windows (effective horizon N-L; targets stay at M+N). L=0
/// delegates to run_direct and reproduces it byte for byte.
inline ForecastReport run_genf(const PreparedData& data, const ExperimentConfig& cfg, int L,
                               std::uint64_t seed, const GenfArtifacts* pre = nullptr) {
    if (L == 0) return run_direct(data, cfg, seed);
    StrategySpec{.kind = StrategySpec::Kind::GENF, .L = L, .N = cfg.N}.validate();

    GenfArtifacts local;
    const GenfArtifacts* art = pre;
    if (!art) {
        local = prepare_genf_artifacts(data, cfg, seed);
        art = &local;
    }

    auto p_series = select_units(data.train, art->p_units);
    auto p_set = build_direct_samples(p_series, cfg.M, cfg.N, cfg.N, cfg.target_feature);
    auto val_set = detail::thin_sample_set(
        build_direct_samples(data.validation, cfg.M, cfg.N, cfg.N, cfg.target_feature),
        cfg.val_window_cap);
    auto test_set = build_direct_samples(data.test, cfg.M, cfg.N, cfg.N, cfg.target_feature);
    if (p_set.samples.empty()) throw std::runtime_error("run_genf: no P training windows");

    auto p_shift = detail::shift_with_generation(p_set, p_series, *art, cfg, data.scaling, L,
                                                 derive_seed(seed, "gen_noise_train"));
    auto val_shift = detail::shift_with_generation(val_set, data.validation, *art, cfg,
                                                   data.scaling, L,
                                                   derive_seed(seed, "gen_noise_val"));
    auto test_shift = detail::shift_with_generation(test_set, data.test, *art, cfg, data.scaling,
                                                    L, derive_seed(seed, "gen_noise_test"));

    PredConfig pc = cfg.pred;
    pc.out_dim = 1;
    PredictorModel model(data.K, pc, derive_seed(seed, "pred_genf"));
    train_predictor(model, p_shift.samples, val_shift.samples,
                    derive_seed(seed, "pred_genf_train"));

    detail::EvalAccumulator acc;
    for (std::size_t i = 0; i < test_shift.samples.size(); ++i) {
        double pred = 0.0;
        if (cfg.gen_noise_draws <= 1) {
            pred = model.predict(test_shift.samples[i].window)[0];
        } else {
            // average predictions over several generation draws
            for (std::size_t d = 0; d < cfg.gen_noise_draws; ++d) {
                auto gen = generate_recursive(
                    art->gan->gen, art->gan->gen_ps, test_set.samples[i].window, L,
                    derive_seed(derive_seed(seed, "gen_noise_test_draw", d), "window", i));
                pred += model.predict(gen.final_window)[0];
            }
            pred /= static_cast<double>(cfg.gen_noise_draws);
        }
        acc.add(test_set.unit_ids[i], test_set.window_start[i], cfg.N,
                detail::present_value(test_set.samples[i].target[0], cfg, data.scaling),
                detail::present_value(pred, cfg, data.scaling));
    }

    ForecastReport rep;
    rep.strategy = "GENF";
    rep.L = L;
    rep.N = cfg.N;
    rep.seed = seed;
    rep.metrics = compute_metrics(acc.y_true, acc.y_pred);
    rep.generation_mse = test_shift.generation_mse;
    rep.param_counts["generator"] = art->gan->gen.param_count();
    rep.param_counts["critic"] = art->gan->critic.param_count();
    rep.param_counts["predictor"] = model.net.param_count();
    rep.param_counts["total"] = art->gan->gen.param_count() + art->gan->critic.param_count() +
                                model.net.param_count();
    rep.config_hash = cfg.config_hash;
    rep.train_windows = p_set.samples.size();
    rep.test_windows = test_set.samples.size();
    const auto test_ids = detail::id_set(test_set.unit_ids);
    rep.unit_isolation_ok =
        detail::disjoint(detail::id_set(p_set.unit_ids), test_ids) &&
        detail::disjoint({art->g_units.begin(), art->g_units.end()}, test_ids) &&
        detail::disjoint(detail::id_set(val_set.unit_ids), test_ids);
    rep.predictions = std::move(acc.rows);
    return rep;
}

// ---------------------------------------------------------------------------
// Sweep: DF and IF anchors plus one GenF row per L.
// ---------------------------------------------------------------------------

struct SweepResult {
    std::vector<ForecastReport> rows; // ordered: DF, IF, GENF per L; grouped by seed
};

inline SweepResult sweep_l(const std::vector<RawSeries>& raw_units, const ExperimentConfig& cfg) {
    SweepResult result;
    const std::size_t runs = cfg.seeds.size();
    std::vector<std::vector<ForecastReport>> per_seed(runs);
    parallel_for(runs, [&](std::size_t i) {
        const std::uint64_t seed = cfg.seeds[i];
        PreparedData data = prepare_data(raw_units, cfg, seed);
        std::vector<ForecastReport>& rows = per_seed[i];
        rows.push_back(run_direct(data, cfg, seed));
        rows.push_back(run_iterative(data, cfg, seed));
        std::optional<GenfArtifacts> art;
        for (int L : cfg.L_set) {
            if (L == 0) {
                rows.push_back(run_genf(data, cfg, 0, seed));
                continue;
            }
            if (!art) art = prepare_genf_artifacts(data, cfg, seed);
            rows.push_back(run_genf(data, cfg, L, seed, &*art));
        }
    });
    for (auto& rows : per_seed)
        for (auto& r : rows) result.rows.push_back(std::move(r));
    return result;
}

} // namespace genf
