#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dlm/models.hpp"
#include "dlm/numerics.hpp"
#include "dlm/report.hpp"
#include "dlm/sampler.hpp"
#include "dlm/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad configuration (unknown keys, invalid values, missing seed): exit 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad input data (unreadable/malformed files, too-short series): exit 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything one run needs, after merging defaults, config file, and flags.
struct ToolOptions {
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    int workers = 1;
    std::optional<std::string> model;    // "M1".."M5" or "all"
    std::optional<std::string> scenario; // scenario name or "all"
    int p = 50;
    std::optional<int> reps;
    std::string input;
    bool dump_samples = false;
    std::vector<int> p_values = {50, 75, 100, 125};
    dlm::SimConfig sim;
    dlm::ChainConfig chain;
    dlm::ModelSpec model_options;
};

void require_known_keys(const json& j, const std::set<std::string>& allowed,
                        const std::string& where) {
    if (!j.is_object()) throw ConfigError("config: " + where + " must be a JSON object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("config: unknown key \"" + item.key() + "\" in " + where);
        }
    }
}

template <typename T>
void read_key(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

void apply_curve_section(const json& j, dlm::CurveParams& c) {
    require_known_keys(j,
                       {"decay_a", "decay_scale", "peak_a", "peak_center", "peak_width",
                        "sharp_a", "sharp_scale", "disp_a", "disp_center1", "disp_width1",
                        "disp_d", "disp_center2", "disp_width2"},
                       "sim.curve");
    read_key(j, "decay_a", c.decay_a);
    read_key(j, "decay_scale", c.decay_scale);
    read_key(j, "peak_a", c.peak_a);
    read_key(j, "peak_center", c.peak_center);
    read_key(j, "peak_width", c.peak_width);
    read_key(j, "sharp_a", c.sharp_a);
    read_key(j, "sharp_scale", c.sharp_scale);
    read_key(j, "disp_a", c.disp_a);
    read_key(j, "disp_center1", c.disp_center1);
    read_key(j, "disp_width1", c.disp_width1);
    read_key(j, "disp_d", c.disp_d);
    read_key(j, "disp_center2", c.disp_center2);
    read_key(j, "disp_width2", c.disp_width2);
}

void apply_sim_section(const json& j, dlm::SimConfig& sim) {
    require_known_keys(j, {"n", "p_true", "phi_x", "sd_x", "phi_e", "sd_e", "curve"}, "sim");
    read_key(j, "n", sim.n);
    read_key(j, "p_true", sim.p_true);
    read_key(j, "phi_x", sim.phi_x);
    read_key(j, "sd_x", sim.sd_x);
    read_key(j, "phi_e", sim.phi_e);
    read_key(j, "sd_e", sim.sd_e);
    if (j.contains("curve")) apply_curve_section(j.at("curve"), sim.curve);
}

void apply_chain_section(const json& j, dlm::ChainConfig& chain) {
    require_known_keys(
        j, {"n_iter", "burn_in", "thin", "proposal_sd", "rho", "adapt_proposals"}, "chain");
    read_key(j, "n_iter", chain.n_iter);
    read_key(j, "burn_in", chain.burn_in);
    read_key(j, "thin", chain.thin);
    read_key(j, "proposal_sd", chain.proposal_sd);
    read_key(j, "rho", chain.rho);
    read_key(j, "adapt_proposals", chain.adapt_proposals);
}

void apply_model_options_section(const json& j, dlm::ModelSpec& spec) {
    require_known_keys(j, {"degree", "penalty_assignment", "m5_ed_rule"}, "model_options");
    read_key(j, "degree", spec.degree);
    if (j.contains("penalty_assignment")) {
        const auto v = j.at("penalty_assignment").get<std::string>();
        if (v == "default") spec.assignment = dlm::PenaltyAssignment::Default;
        else if (v == "swapped") spec.assignment = dlm::PenaltyAssignment::Swapped;
        else throw ConfigError("config: penalty_assignment must be \"default\" or \"swapped\"");
    }
    if (j.contains("m5_ed_rule")) {
        const auto v = j.at("m5_ed_rule").get<std::string>();
        if (v == "basis") spec.m5_ed_rule = dlm::M5EdRule::BasisFunctions;
        else if (v == "interior") spec.m5_ed_rule = dlm::M5EdRule::InteriorKnots;
        else if (v == "all_knots") spec.m5_ed_rule = dlm::M5EdRule::AllKnots;
        else throw ConfigError("config: m5_ed_rule must be \"basis\", \"interior\", or \"all_knots\"");
    }
}

void apply_config_file(const std::string& path, const std::set<std::string>& allowed,
                       ToolOptions& o) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
    }
    try {
        require_known_keys(j, allowed, "the top level");
        if (j.contains("seed")) o.seed = j.at("seed").get<std::uint64_t>();
        read_key(j, "out", o.out);
        read_key(j, "workers", o.workers);
        if (j.contains("model")) o.model = j.at("model").get<std::string>();
        if (j.contains("scenario")) o.scenario = j.at("scenario").get<std::string>();
        read_key(j, "p", o.p);
        if (j.contains("reps")) o.reps = j.at("reps").get<int>();
        read_key(j, "input", o.input);
        read_key(j, "dump_samples", o.dump_samples);
        read_key(j, "p_values", o.p_values);
        if (j.contains("sim")) apply_sim_section(j.at("sim"), o.sim);
        if (j.contains("chain")) apply_chain_section(j.at("chain"), o.chain);
        if (j.contains("model_options")) apply_model_options_section(j.at("model_options"), o.model_options);
    } catch (const json::exception& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
}

json resolved_config(const std::string& subcommand, const ToolOptions& o) {
    json j;
    j["subcommand"] = subcommand;
    if (o.seed) j["seed"] = *o.seed;
    else j["seed"] = nullptr;
    j["out"] = o.out;
    j["workers"] = o.workers;
    j["model"] = o.model ? json(*o.model) : json(nullptr);
    j["scenario"] = o.scenario ? json(*o.scenario) : json(nullptr);
    j["p"] = o.p;
    j["reps"] = o.reps ? json(*o.reps) : json(nullptr);
    j["input"] = o.input;
    j["dump_samples"] = o.dump_samples;
    j["p_values"] = o.p_values;
    json curve;
    curve["decay_a"] = o.sim.curve.decay_a;
    curve["decay_scale"] = o.sim.curve.decay_scale;
    curve["peak_a"] = o.sim.curve.peak_a;
    curve["peak_center"] = o.sim.curve.peak_center;
    curve["peak_width"] = o.sim.curve.peak_width;
    curve["sharp_a"] = o.sim.curve.sharp_a;
    curve["sharp_scale"] = o.sim.curve.sharp_scale;
    curve["disp_a"] = o.sim.curve.disp_a;
    curve["disp_center1"] = o.sim.curve.disp_center1;
    curve["disp_width1"] = o.sim.curve.disp_width1;
    curve["disp_d"] = o.sim.curve.disp_d;
    curve["disp_center2"] = o.sim.curve.disp_center2;
    curve["disp_width2"] = o.sim.curve.disp_width2;
    json sim;
    sim["n"] = o.sim.n;
    sim["p_true"] = o.sim.p_true;
    sim["phi_x"] = o.sim.phi_x;
    sim["sd_x"] = o.sim.sd_x;
    sim["phi_e"] = o.sim.phi_e;
    sim["sd_e"] = o.sim.sd_e;
    sim["curve"] = curve;
    j["sim"] = sim;
    j["chain"] = {{"n_iter", o.chain.n_iter},
                  {"burn_in", o.chain.burn_in},
                  {"thin", o.chain.thin},
                  {"proposal_sd", o.chain.proposal_sd},
                  {"rho", o.chain.rho},
                  {"adapt_proposals", o.chain.adapt_proposals}};
    j["model_options"] = {
        {"degree", o.model_options.degree},
        {"penalty_assignment",
         o.model_options.assignment == dlm::PenaltyAssignment::Default ? "default" : "swapped"},
        {"m5_ed_rule", o.model_options.m5_ed_rule == dlm::M5EdRule::BasisFunctions ? "basis"
                       : o.model_options.m5_ed_rule == dlm::M5EdRule::InteriorKnots
                           ? "interior"
                           : "all_knots"}};
    return j;
}

fs::path prepare_out_dir(const ToolOptions& o) {
    fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw DataError("failed writing " + path.string());
}

void write_sidecar(const fs::path& dir, const std::string& subcommand, const ToolOptions& o) {
    write_text_file(dir / "run_config.json", resolved_config(subcommand, o).dump(2) + "\n");
}

std::vector<dlm::ModelId> resolve_models(const std::optional<std::string>& flag,
                                         const std::string& fallback) {
    const std::string value = flag.value_or(fallback);
    if (value == "all") return dlm::all_models();
    try {
        return {dlm::parse_model(value)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::vector<dlm::Scenario> resolve_scenarios(const std::optional<std::string>& flag,
                                             const std::string& fallback) {
    const std::string value = flag.value_or(fallback);
    if (value == "all") return dlm::all_scenarios();
    try {
        return {dlm::parse_scenario(value)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::uint64_t require_seed(const ToolOptions& o, const char* subcommand) {
    if (!o.seed) {
        throw ConfigError(std::string(subcommand) +
                          " requires an explicit --seed (or \"seed\" in the config)");
    }
    return *o.seed;
}

/// Parsed fit input: the full covariate series and the contiguous response
/// tail (responses may be missing on leading rows only).
struct InputSeries {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
};

InputSeries read_input_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,x,y") {
        throw DataError(path + ":1: expected header \"t,x,y\", got \"" + line + "\"");
    }

    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<bool> has_y;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string t_field, x_field, y_field;
        if (!std::getline(row, t_field, ',') || !std::getline(row, x_field, ',')) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected t,x,y fields");
        }
        std::getline(row, y_field, ',');
        try {
            std::size_t used = 0;
            const double x = std::stod(x_field, &used);
            if (used != x_field.size()) throw std::invalid_argument(x_field);
            xs.push_back(x);
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(line_no) + ": bad x value \"" + x_field + "\"");
        }
        if (y_field.empty()) {
            has_y.push_back(false);
        } else {
            try {
                std::size_t used = 0;
                const double y = std::stod(y_field, &used);
                if (used != y_field.size()) throw std::invalid_argument(y_field);
                ys.push_back(y);
                has_y.push_back(true);
            } catch (const std::exception&) {
                throw DataError(path + ":" + std::to_string(line_no) + ": bad y value \"" + y_field + "\"");
            }
        }
    }
    if (xs.empty()) throw DataError(path + ": no data rows");
    if (ys.empty()) throw DataError(path + ": no rows carry a response value");

    // Responses must form one contiguous tail.
    bool seen_y = false;
    for (std::size_t i = 0; i < has_y.size(); ++i) {
        if (has_y[i]) seen_y = true;
        else if (seen_y) {
            throw DataError(path + ":" + std::to_string(i + 2) +
                            ": missing y after earlier rows carried one (responses must be a contiguous tail)");
        }
    }

    InputSeries series;
    series.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), xs.size());
    series.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), ys.size());
    return series;
}

json acceptance_rates_json(const Eigen::VectorXd& rates) {
    json arr = json::array();
    for (Eigen::Index k = 0; k < rates.size(); ++k) arr.push_back(rates(k));
    return arr;
}

int cmd_fit(const ToolOptions& o) {
    if (o.input.empty()) throw ConfigError("fit requires --input (or \"input\" in the config)");
    InputSeries series = read_input_csv(o.input);
    const auto n = series.x.size();
    if (n <= o.p) {
        throw DataError("input series length n=" + std::to_string(n) +
                        " does not exceed the maximum lag p=" + std::to_string(o.p));
    }
    if (series.y.size() > n - o.p) series.y = series.y.tail(n - o.p).eval();

    dlm::ModelSpec spec = o.model_options;
    const auto models = resolve_models(o.model, "M3");
    if (models.size() != 1) throw ConfigError("fit takes a single --model, not \"all\"");
    spec.id = models.front();

    dlm::ChainConfig chain = o.chain;
    chain.seed = o.seed.value_or(0);

    dlm::SampleCollection samples;
    const bool bayesian = dlm::fit_route(spec.id) == dlm::FitRoute::Bayesian;
    if (o.dump_samples && !bayesian) {
        throw ConfigError("dump_samples applies to the sampled models only");
    }
    const dlm::FitResult result =
        dlm::fit(spec, series.x, series.y, o.p, chain, o.dump_samples ? &samples : nullptr);

    const fs::path dir = prepare_out_dir(o);
    std::ostringstream curve;
    dlm::write_lagcurve_csv(curve, result.summary);
    write_text_file(dir / "lagcurve.csv", curve.str());

    json summary;
    summary["model"] = dlm::model_name(result.model);
    summary["p"] = result.p;
    summary["K"] = result.K;
    summary["ed"] = result.summary.ed;
    summary["sigma2_mean"] = result.sigma2_mean;
    summary["acceptance_rates"] = acceptance_rates_json(result.summary.acceptance_rates);
    summary["seed"] = chain.seed;
    summary["wall_time_sec"] = result.elapsed_seconds;
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");

    if (o.dump_samples) {
        std::ostringstream dump;
        dlm::write_samples_csv(dump, samples, dlm::prior_kind(spec));
        write_text_file(dir / "samples.csv", dump.str());
    }
    write_sidecar(dir, "fit", o);

    std::cerr << "fit " << dlm::model_name(result.model) << " p=" << result.p
              << " K=" << result.K << " ed=" << dlm::format_double(result.summary.ed)
              << " sigma2=" << dlm::format_double(result.sigma2_mean) << " ("
              << dlm::format_double(result.elapsed_seconds) << "s)\n";
    return 0;
}

int cmd_simulate(const ToolOptions& o) {
    const auto scenarios = resolve_scenarios(o.scenario, "DecayCurve");
    if (scenarios.size() != 1) throw ConfigError("simulate takes a single --scenario, not \"all\"");
    const dlm::Scenario scenario = scenarios.front();

    dlm::RngStream rng(o.seed.value_or(0));
    const Eigen::VectorXd x = dlm::gen_covariate(o.sim, rng);
    const Eigen::VectorXd beta = dlm::lag_curve(scenario, o.sim.p_true, o.sim.curve);
    const Eigen::VectorXd y = dlm::gen_response(x, beta, o.sim, rng);

    const fs::path dir = prepare_out_dir(o);
    std::ostringstream csv;
    csv << "t,x,y\n";
    for (int t = 0; t < o.sim.n; ++t) {
        csv << (t + 1) << ',' << dlm::format_double(x(t)) << ',';
        if (t >= o.sim.p_true) csv << dlm::format_double(y(t - o.sim.p_true));
        csv << '\n';
    }
    write_text_file(dir / "data.csv", csv.str());
    write_sidecar(dir, "simulate", o);

    std::cerr << "simulate " << dlm::scenario_name(scenario) << " n=" << o.sim.n
              << " p_true=" << o.sim.p_true << " -> " << (dir / "data.csv").string() << "\n";
    return 0;
}

dlm::StudyOptions study_options(const ToolOptions& o, std::vector<dlm::ReplicateResult>& detail,
                                int total_tasks) {
    dlm::StudyOptions opts;
    opts.workers = o.workers;
    opts.base_spec = o.model_options;
    opts.detail = &detail;
    opts.on_replicate = [total_tasks, done = 0](const dlm::ReplicateResult& r) mutable {
        ++done;
        std::cerr << "[" << done << "/" << total_tasks << "] "
                  << dlm::scenario_name(r.scenario) << " " << dlm::model_name(r.model)
                  << " p=" << r.p << " rep=" << r.rep << " "
                  << (r.ok ? "ok rmse=" + dlm::format_double(r.rmse) +
                                 " ed=" + dlm::format_double(r.ed)
                           : "FAILED: " + r.error)
                  << "\n";
    };
    return opts;
}

json table_json(const std::vector<dlm::StudyRow>& rows, bool with_scenario) {
    json arr = json::array();
    for (const dlm::StudyRow& r : rows) {
        json row;
        if (with_scenario) row["scenario"] = dlm::scenario_name(r.scenario);
        row["model"] = dlm::model_name(r.model);
        row["p"] = r.p;
        row["rmse_x1000"] = r.rmse_x1000;
        row["bias2_x1000"] = r.bias2_x1000;
        row["ed"] = r.ed;
        row["reps"] = r.reps;
        row["failures"] = r.failures;
        arr.push_back(row);
    }
    return arr;
}

int cmd_study(const ToolOptions& o) {
    dlm::SimConfig sim = o.sim;
    sim.master_seed = require_seed(o, "study");
    sim.reps = o.reps.value_or(sim.reps);

    const auto models = resolve_models(o.model, "all");
    const auto scenarios = resolve_scenarios(o.scenario, "all");
    const int total = static_cast<int>(models.size() * scenarios.size()) * sim.reps;

    std::vector<dlm::ReplicateResult> detail;
    const dlm::StudyOptions opts = study_options(o, detail, total);
    const std::vector<dlm::StudyRow> rows =
        dlm::run_study(models, scenarios, sim, o.chain, opts);

    const fs::path dir = prepare_out_dir(o);
    std::ostringstream table;
    dlm::write_table_csv(table, rows);
    write_text_file(dir / "table1.csv", table.str());
    write_text_file(dir / "table1.json", table_json(rows, true).dump(2) + "\n");
    std::ostringstream detail_csv;
    dlm::write_detail_csv(detail_csv, detail);
    write_text_file(dir / "study_detail.csv", detail_csv.str());
    write_sidecar(dir, "study", o);

    std::cerr << "study: " << rows.size() << " rows -> " << (dir / "table1.csv").string() << "\n";
    return 0;
}

int cmd_misspec(const ToolOptions& o) {
    dlm::SimConfig sim = o.sim;
    sim.master_seed = require_seed(o, "misspec");
    sim.reps = o.reps.value_or(sim.reps);

    const auto models = resolve_models(o.model, "all");
    const int total = static_cast<int>(models.size() * o.p_values.size()) * sim.reps;

    std::vector<dlm::ReplicateResult> detail;
    const dlm::StudyOptions opts = study_options(o, detail, total);
    const std::vector<dlm::StudyRow> rows =
        dlm::run_misspec_study(o.p_values, models, sim, o.chain, opts);

    const fs::path dir = prepare_out_dir(o);
    std::ostringstream table;
    dlm::write_misspec_csv(table, rows);
    write_text_file(dir / "misspec.csv", table.str());
    write_text_file(dir / "misspec.json", table_json(rows, false).dump(2) + "\n");
    std::ostringstream detail_csv;
    dlm::write_detail_csv(detail_csv, detail);
    write_text_file(dir / "misspec_detail.csv", detail_csv.str());
    write_sidecar(dir, "misspec", o);

    std::cerr << "misspec: " << rows.size() << " rows -> " << (dir / "misspec.csv").string() << "\n";
    return 0;
}

/// CLI flag values, applied over the config file only where actually given.
struct FlagVals {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    int workers = 1;
    std::string model;
    std::string scenario;
    int p = 50;
    int reps = 0;
    std::string input;
    bool dump_samples = false;
    std::vector<int> p_values;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive Bayesian distributed lag models: fitting, simulation, and studies"};
    app.require_subcommand(1);

    FlagVals f;
    auto add_common = [&f](CLI::App* cmd) {
        cmd->add_option("--config", f.config, "JSON config file");
        cmd->add_option("--seed", f.seed, "master seed controlling all randomness");
        cmd->add_option("--out", f.out, "output directory");
    };

    CLI::App* fit = app.add_subcommand("fit", "Fit one model to a t,x,y time-series file");
    add_common(fit);
    fit->add_option("--input", f.input, "input CSV with header t,x,y");
    fit->add_option("--model", f.model, "model to fit (M1..M5)");
    fit->add_option("--p", f.p, "maximum lag");
    fit->add_flag("--dump-samples", f.dump_samples, "also write the retained draws");

    CLI::App* simulate = app.add_subcommand("simulate", "Generate one synthetic t,x,y series");
    add_common(simulate);
    simulate->add_option("--scenario", f.scenario, "true lag-curve scenario");

    CLI::App* study = app.add_subcommand("study", "Replicated model comparison across scenarios");
    add_common(study);
    study->add_option("--model", f.model, "model to include (M1..M5 or all)");
    study->add_option("--scenario", f.scenario, "scenario to include (name or all)");
    study->add_option("--reps", f.reps, "replicates per cell");
    study->add_option("--workers", f.workers, "parallel worker threads");

    CLI::App* misspec = app.add_subcommand("misspec", "Maximum-lag robustness study");
    add_common(misspec);
    misspec->add_option("--model", f.model, "model to include (M1..M5 or all)");
    misspec->add_option("--reps", f.reps, "replicates per cell");
    misspec->add_option("--workers", f.workers, "parallel worker threads");
    misspec->add_option("--p", f.p_values, "assumed maximum lags (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    auto allowed_for = [](const std::string& name) -> std::set<std::string> {
        if (name == "fit")
            return {"seed", "out", "model", "p", "input", "dump_samples", "chain", "model_options"};
        if (name == "simulate") return {"seed", "out", "scenario", "sim"};
        if (name == "study")
            return {"seed", "out", "workers", "model", "scenario", "reps", "sim", "chain",
                    "model_options"};
        return {"seed", "out", "workers", "model", "reps", "p_values", "sim", "chain",
                "model_options"};
    };

    CLI::App* active = app.get_subcommands().front();
    const std::string name = active->get_name();
    try {
        ToolOptions o;
        if (active->count("--config")) apply_config_file(f.config, allowed_for(name), o);
        if (active->count("--seed")) o.seed = f.seed;
        if (active->count("--out")) o.out = f.out;
        if (name != "fit" && name != "simulate" && active->count("--workers")) o.workers = f.workers;
        if (name != "simulate" && active->count("--model")) o.model = f.model;
        if ((name == "simulate" || name == "study") && active->count("--scenario")) o.scenario = f.scenario;
        if (name == "fit" && active->count("--p")) o.p = f.p;
        if (name == "misspec" && active->count("--p")) o.p_values = f.p_values;
        if ((name == "study" || name == "misspec") && active->count("--reps")) o.reps = f.reps;
        if (name == "fit") {
            if (active->count("--input")) o.input = f.input;
            if (active->count("--dump-samples")) o.dump_samples = f.dump_samples;
        }
        if (o.workers < 1) throw ConfigError("config: workers must be at least 1");

        if (name == "fit") return cmd_fit(o);
        if (name == "simulate") return cmd_simulate(o);
        if (name == "study") return cmd_study(o);
        return cmd_misspec(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const dlm::NotPositiveDefinite& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
