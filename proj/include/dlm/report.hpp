#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dlm/models.hpp"
#include "dlm/sampler.hpp"
#include "dlm/simulate.hpp"

namespace dlm {

/// Fixed-format float rendering used by every writer, so identical values
/// always produce identical bytes.
std::string format_double(double v);

/// Lag curve with pointwise 95% bands: lag,beta_mean,lower95,upper95.
void write_lagcurve_csv(std::ostream& os, const PosteriorSummary& summary);

/// Study table: scenario,model,rmse_x1000,bias2_x1000,ed,reps,failures.
void write_table_csv(std::ostream& os, const std::vector<StudyRow>& rows);

/// Robustness table: model,p,ed,rmse_x1000,bias2_x1000,reps.
void write_misspec_csv(std::ostream& os, const std::vector<StudyRow>& rows);

/// Per-replicate audit trail: scenario,model,p,rep,rmse,bias2,ed,ok,error.
void write_detail_csv(std::ostream& os, const std::vector<ReplicateResult>& detail);

/// Retained draws, one row per kept iteration; smoothing columns are named
/// after what the model samples (tau_*, log_lambda/log_rho, or lambda).
void write_samples_csv(std::ostream& os, const SampleCollection& samples, PriorKind kind);

} // namespace dlm
