#pragma once

// Command-line front end. `run_cli` does all the work and returns the process
// exit status, so tests can drive it without spawning a process.
//
//   estimate  ML / EM / grid / SMM estimates from a sample file
//   report    Fisher information, Cramer-Rao bound, Brier decomposition
//   table1    SMM versus ML standard deviations, checked against a golden CSV
//   figure1   sigma_SMM / sigma_ML over an (AUC, q) grid
//   simulate  Monte Carlo spread of the ML estimator
//
// Exit status: 0 success, 1 golden mismatch, 2 I/O or parse error,
// 3 domain or degeneracy error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prevalence/densities.hpp"
#include "prevalence/efficiency.hpp"
#include "prevalence/errors.hpp"
#include "prevalence/experiments.hpp"
#include "prevalence/mle.hpp"
#include "prevalence/sample_io.hpp"
#include "prevalence/smm.hpp"

#ifndef PREVALENCE_DEFAULT_GOLDEN
#define PREVALENCE_DEFAULT_GOLDEN "data/table1_expected.csv"
#endif

namespace prevalence::cli {

enum class Command { Estimate, Report, Table1, Figure1, Simulate };
enum class OutputFormat { Json, Csv };

enum ExitCode : int { Success = 0, AcceptanceMismatch = 1, IoFailure = 2, DomainFailure = 3 };

struct RunConfig {
    Command command = Command::Table1;
    double mu0 = 0.0;
    std::optional<double> mu1;
    double sigma = 1.0;
    double q = 0.2;
    std::size_t n = 100;
    std::size_t replications = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string input_path;
    std::string output_path;
    std::string golden_path = PREVALENCE_DEFAULT_GOLDEN;
    std::optional<OutputFormat> format;
    QuadratureSettings quadrature;
    double grid_step = 1e-3;

    BinormalModel model() const {
        if (!mu1) throw DomainError("--mu1 is required for this command");
        return BinormalModel(mu0, *mu1, sigma);
    }
};

namespace detail {

using json = nlohmann::ordered_json;

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline json model_json(const BinormalModel& m) {
    return {{"family", "binormal"}, {"mu0", m.mu0()}, {"mu1", m.mu1()}, {"sigma", m.sigma()}};
}

inline json estimate_json(const PrevalenceEstimate& e) {
    return {{"q_hat", e.q_hat},
            {"case", std::string(to_string(e.estimate_case))},
            {"iterations", e.iterations},
            {"residual", e.residual}};
}

// Flattens nested objects into a header row and a value row.
inline void flatten(const json& j, const std::string& prefix, std::vector<std::string>& keys,
                    std::vector<std::string>& values) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) {
            flatten(*it, key, keys, values);
            continue;
        }
        keys.push_back(key);
        if (it->is_string())
            values.push_back(it->get<std::string>());
        else if (it->is_number_float())
            values.push_back(fixed6(it->get<double>()));
        else
            values.push_back(it->dump());
    }
}

inline std::string join(const std::vector<std::string>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
    return s;
}

inline std::string render(const json& doc, OutputFormat format) {
    if (format == OutputFormat::Json) return doc.dump(2) + "\n";
    std::vector<std::string> keys, values;
    flatten(doc, "", keys, values);
    return join(keys) + "\n" + join(values) + "\n";
}

class Writer {
public:
    Writer(const RunConfig& cfg, std::ostream& fallback) : fallback_(fallback) {
        if (!cfg.output_path.empty()) {
            file_.open(cfg.output_path, std::ios::binary | std::ios::trunc);
            if (!file_) throw IoError("cannot open output file: " + cfg.output_path);
        }
    }

    void write(const std::string& text) {
        std::ostream& os = file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_;
        os << text;
        os.flush();
        if (!os) throw IoError("failed to write output");
    }

private:
    std::ostream& fallback_;
    std::ofstream file_;
};

}  // namespace detail

inline int cmd_estimate(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
    using detail::json;
    if (cfg.input_path.empty()) throw IoError("--input is required for estimate");
    const BinormalModel model = cfg.model();
    const Sample sample = read_sample_file(cfg.input_path);

    const PrevalenceEstimate ml = mle_estimate(model, sample);
    const PrevalenceEstimate em = em_estimate(model, sample);
    const GridResult grid = grid_oracle(model, sample, cfg.grid_step);
    const SmmReport smm = smm_report(model, sample);

    json doc;
    doc["command"] = "estimate";
    doc["model"] = detail::model_json(model);
    doc["n"] = sample.size();
    doc["ml"] = detail::estimate_json(ml);
    doc["em"] = detail::estimate_json(em);
    doc["grid_oracle"] = {{"q_hat", grid.q}, {"grid_step", cfg.grid_step}, {"degenerate", grid.degenerate}};
    doc["smm"] = {{"q_hat", smm.q_hat}, {"q_hat_clipped", smm.q_hat_clipped}, {"exact_sd", smm.exact_sd}};
    if (ml.estimate_case == EstimateCase::Interior) {
        const EfficiencyReport r = efficiency_report(MixtureModel(model, ml.q_hat), sample.size(), cfg.quadrature);
        doc["cramer_rao_sd"] = r.sigma_ml();
        doc["cramer_rao_note"] = "plug-in at the ML estimate";
    } else {
        doc["cramer_rao_sd"] = nullptr;
        doc["cramer_rao_note"] = "omitted: ML estimate on the boundary, where the Fisher information is undefined";
    }
    detail::Writer(cfg, out).write(detail::render(doc, cfg.format.value_or(OutputFormat::Json)));
    return Success;
}

inline int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
    using detail::json;
    const BinormalModel model = cfg.model();
    if (!(cfg.q > 0.0 && cfg.q < 1.0))
        throw DomainError("report requires q strictly inside (0, 1): the Fisher information bound divides by q(1-q)");
    const EfficiencyReport r = efficiency_report(MixtureModel(model, cfg.q), cfg.n, cfg.quadrature);
    const double var_smm = smm_variance(model, cfg.q, cfg.n);

    json doc;
    doc["command"] = "report";
    doc["model"] = detail::model_json(model);
    doc["q"] = r.q;
    doc["n"] = r.n;
    doc["fisher_info"] = r.fisher_info;
    doc["cr_bound"] = r.cr_bound;
    doc["asym_var_ml"] = r.asym_var_ml;
    doc["sigma_ml"] = r.sigma_ml();
    doc["resolution"] = r.resolution;
    doc["brier"] = r.brier;
    doc["uncertainty"] = r.uncertainty;
    doc["auc"] = auc(model);
    doc["var_smm"] = var_smm;
    doc["sigma_smm"] = std::sqrt(var_smm);
    detail::Writer(cfg, out).write(detail::render(doc, cfg.format.value_or(OutputFormat::Json)));
    return Success;
}

inline int cmd_table1(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    using detail::json;
    const std::vector<Table1Row> rows = reproduce_table1(cfg.quadrature);
    const std::vector<Table1Row> golden = load_table1_golden(cfg.golden_path);
    const std::vector<CellMismatch> mismatches = compare_table1(rows, golden);

    std::string text;
    if (cfg.format.value_or(OutputFormat::Csv) == OutputFormat::Csv) {
        text = "mu1,auc,sigma_smm,sigma_ml\n";
        for (const Table1Row& r : rows)
            text += detail::join({detail::fixed6(r.mu1), detail::fixed6(r.auc), detail::fixed6(r.sigma_smm),
                                  detail::fixed6(r.sigma_ml)}) + "\n";
    } else {
        json doc;
        doc["command"] = "table1";
        json arr = json::array();
        for (const Table1Row& r : rows)
            arr.push_back({{"mu1", r.mu1}, {"auc", r.auc}, {"sigma_smm", r.sigma_smm}, {"sigma_ml", r.sigma_ml}});
        doc["rows"] = arr;
        doc["golden_match"] = mismatches.empty();
        text = doc.dump(2) + "\n";
    }
    detail::Writer(cfg, out).write(text);

    for (const CellMismatch& m : mismatches)
        err << "FAIL mu1=" << detail::fixed6(m.mu1) << " " << m.column << ": expected " << m.expected << ", got "
            << m.actual << " (tolerance " << m.tolerance << ")\n";
    if (!mismatches.empty()) return AcceptanceMismatch;
    err << "PASS table1: " << rows.size() << " rows match " << cfg.golden_path << "\n";
    return Success;
}

inline int cmd_figure1(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
    using detail::json;
    const auto points = ratio_surface(default_auc_grid(), default_q_grid(), cfg.n, cfg.quadrature);
    std::string text;
    if (cfg.format.value_or(OutputFormat::Csv) == OutputFormat::Csv) {
        text = "auc,q,ratio_sd_smm_over_ml\n";
        for (const RatioGridPoint& p : points)
            text += detail::join({detail::fixed6(p.auc), detail::fixed6(p.q), detail::fixed6(p.ratio)}) + "\n";
    } else {
        json arr = json::array();
        for (const RatioGridPoint& p : points)
            arr.push_back({{"auc", p.auc}, {"q", p.q}, {"ratio_sd_smm_over_ml", p.ratio}});
        text = json{{"command", "figure1"}, {"n", cfg.n}, {"points", arr}}.dump(2) + "\n";
    }
    detail::Writer(cfg, out).write(text);
    return Success;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
    using detail::json;
    const BinormalModel model = cfg.model();
    MonteCarloSettings mc;
    mc.n = cfg.n;
    mc.replications = cfg.replications;
    mc.seed = cfg.seed;
    mc.threads = cfg.threads;
    const MonteCarloSummary s = monte_carlo_ml(model, cfg.q, mc, cfg.quadrature);

    json doc;
    doc["command"] = "simulate";
    doc["model"] = detail::model_json(model);
    doc["seed"] = cfg.seed;
    doc["replications"] = s.replications;
    doc["n"] = s.n;
    doc["true_q"] = s.true_q;
    doc["mean_q_hat"] = s.mean_q_hat;
    doc["sd_q_hat"] = s.sd_q_hat;
    doc["predicted_sd"] = s.predicted_sd;
    doc["boundary_hits"] = s.boundary_hits;
    doc["degenerate_skips"] = s.degenerate_skips;
    detail::Writer(cfg, out).write(detail::render(doc, cfg.format.value_or(OutputFormat::Json)));
    return Success;
}

inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        switch (cfg.command) {
            case Command::Estimate: return cmd_estimate(cfg, out, err);
            case Command::Report: return cmd_report(cfg, out, err);
            case Command::Table1: return cmd_table1(cfg, out, err);
            case Command::Figure1: return cmd_figure1(cfg, out, err);
            case Command::Simulate: return cmd_simulate(cfg, out, err);
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return IoFailure;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return IoFailure;
    } catch (const DegeneracyError& e) {
        err << "degenerate input: " << e.what() << "\n";
        return DomainFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return DomainFailure;
    }
    return DomainFailure;
}

/// Parses `args` (without the program name) and runs the selected command.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Binary prevalence estimation under prior probability shift"};
    app.require_subcommand(1);

    RunConfig cfg;
    double mu1 = 0.0;
    std::string format;

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--mu0", cfg.mu0, "class-0 mean")->capture_default_str();
        sub->add_option("--mu1", mu1, "class-1 mean (> mu0)");
        sub->add_option("--sigma", cfg.sigma, "common standard deviation")->capture_default_str();
    };
    auto add_quadrature = [&](CLI::App* sub) {
        sub->add_option("--abs-tol", cfg.quadrature.abs_tol, "quadrature absolute tolerance")->capture_default_str();
        sub->add_option("--rel-tol", cfg.quadrature.rel_tol, "quadrature relative tolerance")->capture_default_str();
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--output", cfg.output_path, "output file (default: stdout)");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* estimate = app.add_subcommand("estimate", "estimate q from a sample file");
    add_model(estimate);
    estimate->add_option("--input", cfg.input_path, "sample file, one value per line")->required();
    estimate->add_option("--grid-step", cfg.grid_step, "grid oracle step")->capture_default_str();
    add_quadrature(estimate);
    add_output(estimate);

    CLI::App* report = app.add_subcommand("report", "efficiency report for a binormal mixture");
    add_model(report);
    report->add_option("--q", cfg.q, "test prevalence")->capture_default_str();
    report->add_option("--n", cfg.n, "sample size")->capture_default_str();
    add_quadrature(report);
    add_output(report);

    CLI::App* table1 = app.add_subcommand("table1", "SMM versus ML standard deviations (n=100, q=0.2)");
    table1->add_option("--golden", cfg.golden_path, "expected values CSV")->capture_default_str();
    add_quadrature(table1);
    add_output(table1);

    CLI::App* figure1 = app.add_subcommand("figure1", "sigma_SMM / sigma_ML over the (AUC, q) grid");
    figure1->add_option("--n", cfg.n, "sample size")->capture_default_str();
    add_quadrature(figure1);
    add_output(figure1);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo study of the ML estimator");
    add_model(simulate);
    simulate->add_option("--q", cfg.q, "true prevalence")->capture_default_str();
    simulate->add_option("--n", cfg.n, "sample size")->capture_default_str();
    simulate->add_option("--reps", cfg.replications, "replications")->capture_default_str();
    simulate->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    simulate->add_option("--threads", cfg.threads, "worker threads (0: all cores)")->capture_default_str();
    add_quadrature(simulate);
    add_output(simulate);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return IoFailure;
    }

    for (CLI::App* sub : app.get_subcommands()) {
        const CLI::Option* opt = sub->get_option_no_throw("--mu1");
        if (opt != nullptr && opt->count() > 0) cfg.mu1 = mu1;
    }
    if (!format.empty()) cfg.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;

    if (estimate->parsed())
        cfg.command = Command::Estimate;
    else if (report->parsed())
        cfg.command = Command::Report;
    else if (table1->parsed())
        cfg.command = Command::Table1;
    else if (figure1->parsed())
        cfg.command = Command::Figure1;
    else
        cfg.command = Command::Simulate;

    try {
        cfg.quadrature.validate();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return DomainFailure;
    }
    return dispatch(cfg, out, err);
}

}  // namespace prevalence::cli
