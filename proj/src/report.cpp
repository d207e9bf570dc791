#include "dlm/report.hpp"

#include <cstdio>
#include <stdexcept>

namespace dlm {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_lagcurve_csv(std::ostream& os, const PosteriorSummary& summary) {
    os << "lag,beta_mean,lower95,upper95\n";
    for (Eigen::Index j = 0; j < summary.beta_mean.size(); ++j) {
        os << j << ',' << format_double(summary.beta_mean(j)) << ','
           << format_double(summary.beta_lower(j)) << ','
           << format_double(summary.beta_upper(j)) << '\n';
    }
}

void write_table_csv(std::ostream& os, const std::vector<StudyRow>& rows) {
    os << "scenario,model,rmse_x1000,bias2_x1000,ed,reps,failures\n";
    for (const StudyRow& r : rows) {
        os << scenario_name(r.scenario) << ',' << model_name(r.model) << ','
           << format_double(r.rmse_x1000) << ',' << format_double(r.bias2_x1000)
           << ',' << format_double(r.ed) << ',' << r.reps << ',' << r.failures
           << '\n';
    }
}

void write_misspec_csv(std::ostream& os, const std::vector<StudyRow>& rows) {
    os << "model,p,ed,rmse_x1000,bias2_x1000,reps\n";
    for (const StudyRow& r : rows) {
        os << model_name(r.model) << ',' << r.p << ',' << format_double(r.ed)
           << ',' << format_double(r.rmse_x1000) << ','
           << format_double(r.bias2_x1000) << ',' << r.reps << '\n';
    }
}

void write_detail_csv(std::ostream& os, const std::vector<ReplicateResult>& detail) {
    os << "scenario,model,p,rep,rmse,bias2,ed,ok,error\n";
    for (const ReplicateResult& r : detail) {
        std::string error = r.error;
        for (char& c : error) {
            if (c == ',' || c == '\n') c = ';';
        }
        os << scenario_name(r.scenario) << ',' << model_name(r.model) << ','
           << r.p << ',' << r.rep << ',' << format_double(r.rmse) << ','
           << format_double(r.bias2) << ',' << format_double(r.ed) << ','
           << (r.ok ? 1 : 0) << ',' << error << '\n';
    }
}

void write_samples_csv(std::ostream& os, const SampleCollection& samples, PriorKind kind) {
    const Eigen::Index n_draws = samples.b.rows();
    const Eigen::Index K = samples.b.cols();
    const Eigen::Index n_smooth = samples.smoothing.cols();
    if (static_cast<Eigen::Index>(samples.iterations.size()) != n_draws) {
        throw std::invalid_argument("write_samples_csv: iteration index out of step");
    }

    os << "iteration";
    for (Eigen::Index k = 0; k < K; ++k) os << ",b_" << (k + 1);
    switch (kind) {
        case PriorKind::Adaptive:
            for (Eigen::Index k = 0; k < n_smooth; ++k) os << ",tau_" << (k + 1);
            break;
        case PriorKind::Combo:
            os << ",log_lambda,log_rho";
            break;
        case PriorKind::IncreasingRidge:
        case PriorKind::UniformRW1:
            os << ",lambda";
            break;
    }
    os << ",sigma2,zeta2\n";

    for (Eigen::Index s = 0; s < n_draws; ++s) {
        os << samples.iterations[static_cast<std::size_t>(s)];
        for (Eigen::Index k = 0; k < K; ++k) os << ',' << format_double(samples.b(s, k));
        for (Eigen::Index k = 0; k < n_smooth; ++k) {
            os << ',' << format_double(samples.smoothing(s, k));
        }
        os << ',' << format_double(samples.sigma2(s)) << ','
           << format_double(samples.zeta2(s)) << '\n';
    }
}

} // namespace dlm
