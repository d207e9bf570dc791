#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dlm/models.hpp"
#include "dlm/rng.hpp"
#include "dlm/sampler.hpp"

namespace dlm {

enum class Scenario { DelayedPeak, DecayCurve, FlatResponse, Displacement, SharpPeak };

const char* scenario_name(Scenario s);
Scenario parse_scenario(std::string_view name);
std::vector<Scenario> all_scenarios();
std::vector<ModelId> all_models();

/// Shape parameters of the five true lag curves.  Amplitudes are set so the
/// signal-to-noise ratio against the default covariate and error scales puts
/// every model in its informative regime; shapes (decay lengths, centers,
/// widths) control where each curve bends.
struct CurveParams {
    double decay_a = 3.0, decay_scale = 8.0;
    double peak_a = 3.0, peak_center = 12.0, peak_width = 5.0;
    double sharp_a = 4.5, sharp_scale = 1.5;
    double disp_a = 3.0, disp_center1 = 4.0, disp_width1 = 3.0;
    double disp_d = 1.5, disp_center2 = 18.0, disp_width2 = 6.0;
};

/// Data-generation settings for the replicated studies.
struct SimConfig {
    int n = 500;        ///< series length
    int p_true = 50;    ///< true maximum lag
    double phi_x = 0.5; ///< covariate AR(1) coefficient
    double sd_x = 0.1;  ///< covariate innovation sd
    double phi_e = 0.2; ///< error AR(1) coefficient
    double sd_e = 0.1;  ///< error innovation sd
    int reps = 20;
    std::uint64_t master_seed = 0;
    CurveParams curve;
};

/// One averaged study cell.
struct StudyRow {
    Scenario scenario;
    ModelId model;
    int p = 0;               ///< assumed maximum lag
    double rmse_x1000 = 0.0; ///< mean RMSE over successes, scaled by 1000
    double bias2_x1000 = 0.0;
    double ed = 0.0;
    int reps = 0;     ///< successful replicates averaged
    int failures = 0; ///< replicates excluded after errors
};

/// One replicate's outcome (metrics on the natural scale).
struct ReplicateResult {
    Scenario scenario;
    ModelId model;
    int p = 0;
    int rep = 0;
    double rmse = 0.0;
    double bias2 = 0.0;
    double ed = 0.0;
    bool ok = false;
    std::string error;
};

/// Parallelism and reporting knobs shared by both studies.
struct StudyOptions {
    int workers = 1;
    ModelSpec base_spec; ///< id is overwritten per fitted model
    std::function<void(const ReplicateResult&)> on_replicate; ///< serialized callback
    std::vector<ReplicateResult>* detail = nullptr; ///< receives every replicate, task order
};

/// True curve beta_0..beta_p for a scenario.
Eigen::VectorXd lag_curve(Scenario s, int p);
Eigen::VectorXd lag_curve(Scenario s, int p, const CurveParams& params);

/// Stationary AR(1) covariate series of length cfg.n.
Eigen::VectorXd gen_covariate(const SimConfig& cfg, RngStream& rng);

/// Response window y_t = sum_j beta_j x_{t-j} + AR(1) noise, for the final
/// n - p_true time points.
Eigen::VectorXd gen_response(const Eigen::VectorXd& x, const Eigen::VectorXd& beta,
                             const SimConfig& cfg, RngStream& rng);

/// Root-mean-square error of a fitted curve.
double rmse(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true);

/// Squared mean error of a fitted curve.
double bias2(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true);

/// Replicated comparison across scenarios and models at p = cfg.p_true.
/// Deterministic given cfg.master_seed, independent of worker count.
std::vector<StudyRow> run_study(const std::vector<ModelId>& models,
                                const std::vector<Scenario>& scenarios,
                                const SimConfig& cfg, const ChainConfig& chain_cfg,
                                const StudyOptions& opts = {});

/// Maximum-lag robustness study: data always from the Displacement curve at
/// cfg.p_true; every model refit at each assumed p (true curve zero-padded
/// for evaluation).
std::vector<StudyRow> run_misspec_study(const std::vector<int>& p_values,
                                        const std::vector<ModelId>& models,
                                        const SimConfig& cfg,
                                        const ChainConfig& chain_cfg,
                                        const StudyOptions& opts = {});

} // namespace dlm
