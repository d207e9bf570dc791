#include "dlm/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace {

using namespace dlm;

void validate_sim(const SimConfig& cfg) {
    if (cfg.p_true < 1) throw std::invalid_argument("SimConfig: p_true must be at least 1");
    if (cfg.n <= cfg.p_true) throw std::invalid_argument("SimConfig: n must exceed p_true");
    if (std::abs(cfg.phi_x) >= 1.0 || std::abs(cfg.phi_e) >= 1.0) {
        throw std::invalid_argument("SimConfig: AR coefficients must lie in (-1, 1)");
    }
    if (cfg.sd_x <= 0.0 || cfg.sd_e <= 0.0) {
        throw std::invalid_argument("SimConfig: innovation sds must be positive");
    }
    if (cfg.reps < 1) throw std::invalid_argument("SimConfig: reps must be at least 1");
}

/// Stationary AR(1) path of the given length.
Eigen::VectorXd ar1_path(int length, double phi, double sd, RngStream& rng) {
    Eigen::VectorXd path(length);
    path(0) = rng.normal() * sd / std::sqrt(1.0 - phi * phi);
    for (int t = 1; t < length; ++t) {
        path(t) = phi * path(t - 1) + sd * rng.normal();
    }
    return path;
}

struct Task {
    Scenario scenario;
    ModelId model;
    int p;
    int rep;
    std::uint64_t data_seed;
    std::uint64_t chain_seed;
};

ReplicateResult run_one(const Task& task, const SimConfig& cfg,
                        const ChainConfig& chain_cfg, const StudyOptions& opts) {
    ReplicateResult r;
    r.scenario = task.scenario;
    r.model = task.model;
    r.p = task.p;
    r.rep = task.rep;
    try {
        RngStream data_rng(task.data_seed);
        const Eigen::VectorXd x = gen_covariate(cfg, data_rng);
        const Eigen::VectorXd beta_true = lag_curve(task.scenario, cfg.p_true, cfg.curve);
        Eigen::VectorXd y = gen_response(x, beta_true, cfg, data_rng);
        const Eigen::Index usable = cfg.n - task.p;
        if (usable < y.size()) y = y.tail(usable).eval();

        ModelSpec spec = opts.base_spec;
        spec.id = task.model;
        ChainConfig cc = chain_cfg;
        cc.seed = task.chain_seed;
        const FitResult fr = fit(spec, x, y, task.p, cc);

        // Evaluate against the true curve, zero-padded beyond the true lag.
        Eigen::VectorXd beta_eval = Eigen::VectorXd::Zero(task.p + 1);
        beta_eval.head(cfg.p_true + 1) = beta_true;
        r.rmse = rmse(fr.summary.beta_mean, beta_eval);
        r.bias2 = bias2(fr.summary.beta_mean, beta_eval);
        r.ed = fr.summary.ed;
        if (r.bias2 > r.rmse * r.rmse * (1.0 + 1e-9) + 1e-300) {
            throw std::logic_error("metric identity rmse^2 >= bias2 violated");
        }
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
    }
    return r;
}

std::vector<ReplicateResult> run_tasks(const std::vector<Task>& tasks,
                                       const SimConfig& cfg,
                                       const ChainConfig& chain_cfg,
                                       const StudyOptions& opts) {
    std::vector<ReplicateResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex callback_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            results[i] = run_one(tasks[i], cfg, chain_cfg, opts);
            if (opts.on_replicate) {
                std::scoped_lock lock(callback_mutex);
                opts.on_replicate(results[i]);
            }
        }
    };

    const int workers = std::clamp<int>(opts.workers, 1, std::max<int>(1, tasks.size()));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return results;
}

/// Averages one cell's replicates; tasks are laid out cell-major with the
/// replicate index innermost, so a cell is a contiguous block.
StudyRow aggregate_cell(const std::vector<ReplicateResult>& results,
                        std::size_t begin, int reps) {
    StudyRow row;
    row.scenario = results[begin].scenario;
    row.model = results[begin].model;
    row.p = results[begin].p;
    double sum_rmse = 0.0, sum_bias2 = 0.0, sum_ed = 0.0;
    for (int r = 0; r < reps; ++r) {
        const ReplicateResult& rep = results[begin + r];
        if (!rep.ok) {
            ++row.failures;
            continue;
        }
        sum_rmse += rep.rmse;
        sum_bias2 += rep.bias2;
        sum_ed += rep.ed;
        ++row.reps;
    }
    if (row.reps > 0) {
        row.rmse_x1000 = 1000.0 * sum_rmse / row.reps;
        row.bias2_x1000 = 1000.0 * sum_bias2 / row.reps;
        row.ed = sum_ed / row.reps;
    } else {
        row.rmse_x1000 = row.bias2_x1000 = row.ed =
            std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

} // namespace

namespace dlm {

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::DelayedPeak: return "DelayedPeak";
        case Scenario::DecayCurve: return "DecayCurve";
        case Scenario::FlatResponse: return "FlatResponse";
        case Scenario::Displacement: return "Displacement";
        case Scenario::SharpPeak: return "SharpPeak";
    }
    throw std::logic_error("scenario_name: unhandled scenario");
}

Scenario parse_scenario(std::string_view name) {
    for (Scenario s : all_scenarios()) {
        if (name == scenario_name(s)) return s;
    }
    throw std::invalid_argument("unknown scenario name: " + std::string(name));
}

std::vector<Scenario> all_scenarios() {
    return {Scenario::DelayedPeak, Scenario::DecayCurve, Scenario::FlatResponse,
            Scenario::Displacement, Scenario::SharpPeak};
}

std::vector<ModelId> all_models() {
    return {ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4, ModelId::M5};
}

Eigen::VectorXd lag_curve(Scenario s, int p) { return lag_curve(s, p, CurveParams{}); }

Eigen::VectorXd lag_curve(Scenario s, int p, const CurveParams& c) {
    if (p < 1) throw std::invalid_argument("lag_curve: p must be at least 1");
    Eigen::VectorXd beta(p + 1);
    for (int j = 0; j <= p; ++j) {
        const double lag = j;
        switch (s) {
            case Scenario::FlatResponse:
                beta(j) = 0.0;
                break;
            case Scenario::DecayCurve:
                beta(j) = c.decay_a * std::exp(-lag / c.decay_scale);
                break;
            case Scenario::DelayedPeak: {
                const double z = (lag - c.peak_center) / c.peak_width;
                beta(j) = c.peak_a * std::exp(-0.5 * z * z);
                break;
            }
            case Scenario::SharpPeak:
                beta(j) = c.sharp_a * std::exp(-lag / c.sharp_scale);
                break;
            case Scenario::Displacement: {
                const double z1 = (lag - c.disp_center1) / c.disp_width1;
                const double z2 = (lag - c.disp_center2) / c.disp_width2;
                beta(j) = c.disp_a * std::exp(-0.5 * z1 * z1) -
                          c.disp_d * std::exp(-0.5 * z2 * z2);
                break;
            }
        }
    }
    return beta;
}

Eigen::VectorXd gen_covariate(const SimConfig& cfg, RngStream& rng) {
    validate_sim(cfg);
    return ar1_path(cfg.n, cfg.phi_x, cfg.sd_x, rng);
}

Eigen::VectorXd gen_response(const Eigen::VectorXd& x, const Eigen::VectorXd& beta,
                             const SimConfig& cfg, RngStream& rng) {
    validate_sim(cfg);
    if (x.size() != cfg.n) throw std::invalid_argument("gen_response: x must have length n");
    if (beta.size() != cfg.p_true + 1) {
        throw std::invalid_argument("gen_response: beta must have length p_true + 1");
    }
    const Eigen::VectorXd eps = ar1_path(cfg.n, cfg.phi_e, cfg.sd_e, rng);
    Eigen::VectorXd y(cfg.n - cfg.p_true);
    for (int t = cfg.p_true; t < cfg.n; ++t) {
        double signal = 0.0;
        for (int j = 0; j <= cfg.p_true; ++j) signal += beta(j) * x(t - j);
        y(t - cfg.p_true) = signal + eps(t);
    }
    return y;
}

double rmse(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true) {
    if (beta_hat.size() != beta_true.size()) {
        throw std::invalid_argument("rmse: curve lengths differ");
    }
    return std::sqrt((beta_hat - beta_true).squaredNorm() / beta_hat.size());
}

double bias2(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true) {
    if (beta_hat.size() != beta_true.size()) {
        throw std::invalid_argument("bias2: curve lengths differ");
    }
    const double mean_error = (beta_hat - beta_true).mean();
    return mean_error * mean_error;
}

std::vector<StudyRow> run_study(const std::vector<ModelId>& models,
                                const std::vector<Scenario>& scenarios,
                                const SimConfig& cfg, const ChainConfig& chain_cfg,
                                const StudyOptions& opts) {
    validate_sim(cfg);
    if (models.empty()) throw std::invalid_argument("run_study: no models selected");
    if (scenarios.empty()) throw std::invalid_argument("run_study: no scenarios selected");

    std::vector<Task> tasks;
    tasks.reserve(scenarios.size() * models.size() * cfg.reps);
    for (Scenario s : scenarios) {
        for (ModelId m : models) {
            const auto s_tag = static_cast<std::uint64_t>(s);
            const auto m_tag = static_cast<std::uint64_t>(m);
            for (int rep = 0; rep < cfg.reps; ++rep) {
                const auto r_tag = static_cast<std::uint64_t>(rep);
                tasks.push_back(Task{
                    s, m, cfg.p_true, rep,
                    derive_seed(cfg.master_seed, {s_tag, m_tag, r_tag, 1}),
                    derive_seed(cfg.master_seed,
                                {s_tag, m_tag, r_tag, 2, static_cast<std::uint64_t>(cfg.p_true)})});
            }
        }
    }

    const std::vector<ReplicateResult> results = run_tasks(tasks, cfg, chain_cfg, opts);
    if (opts.detail) *opts.detail = results;

    std::vector<StudyRow> rows;
    rows.reserve(scenarios.size() * models.size());
    for (std::size_t cell = 0; cell < scenarios.size() * models.size(); ++cell) {
        rows.push_back(aggregate_cell(results, cell * cfg.reps, cfg.reps));
    }
    return rows;
}

std::vector<StudyRow> run_misspec_study(const std::vector<int>& p_values,
                                        const std::vector<ModelId>& models,
                                        const SimConfig& cfg,
                                        const ChainConfig& chain_cfg,
                                        const StudyOptions& opts) {
    validate_sim(cfg);
    if (models.empty()) throw std::invalid_argument("run_misspec_study: no models selected");
    if (p_values.empty()) throw std::invalid_argument("run_misspec_study: no p values given");
    for (int p : p_values) {
        if (p < cfg.p_true) {
            throw std::invalid_argument("run_misspec_study: assumed p must be at least p_true");
        }
        if (p >= cfg.n) {
            throw std::invalid_argument("run_misspec_study: assumed p must be below n");
        }
    }

    const Scenario s = Scenario::Displacement;
    const auto s_tag = static_cast<std::uint64_t>(s);
    std::vector<Task> tasks;
    tasks.reserve(models.size() * p_values.size() * cfg.reps);
    for (ModelId m : models) {
        const auto m_tag = static_cast<std::uint64_t>(m);
        for (int p : p_values) {
            for (int rep = 0; rep < cfg.reps; ++rep) {
                const auto r_tag = static_cast<std::uint64_t>(rep);
                // The data seed omits p: each replicate's series is refit at
                // every assumed lag.
                tasks.push_back(Task{
                    s, m, p, rep,
                    derive_seed(cfg.master_seed, {s_tag, m_tag, r_tag, 1}),
                    derive_seed(cfg.master_seed,
                                {s_tag, m_tag, r_tag, 2, static_cast<std::uint64_t>(p)})});
            }
        }
    }

    const std::vector<ReplicateResult> results = run_tasks(tasks, cfg, chain_cfg, opts);
    if (opts.detail) *opts.detail = results;

    std::vector<StudyRow> rows;
    rows.reserve(models.size() * p_values.size());
    for (std::size_t cell = 0; cell < models.size() * p_values.size(); ++cell) {
        rows.push_back(aggregate_cell(results, cell * cfg.reps, cfg.reps));
    }
    return rows;
}

} // namespace dlm
