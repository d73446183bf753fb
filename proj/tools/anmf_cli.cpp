// Command-line front end: factorize | impute | experiment.
//
// Options merge as flags > --config JSON > defaults. Every setting is
// validated before any input is read or output written; outputs land only
// under --out. Exit codes: 0 success/converged, 1 usage or config error,
// 2 data error, 3 finished without convergence.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anmf/additive.hpp"
#include "anmf/classify.hpp"
#include "anmf/csv.hpp"
#include "anmf/dataset.hpp"
#include "anmf/imputation.hpp"
#include "anmf/nmf.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNotConverged = 3;

ordered_json load_config_file(const std::string& path,
                              const std::set<std::string>& allowed_keys) {
    std::ifstream in(path);
    if (!in) throw anmf::ConfigError("cannot open config file: " + path);
    ordered_json cfg;
    try {
        in >> cfg;
    } catch (const nlohmann::json::exception& e) {
        throw anmf::ConfigError("config file " + path + ": " + e.what());
    }
    if (!cfg.is_object()) {
        throw anmf::ConfigError("config file " + path + ": top level must be an object");
    }
    for (const auto& item : cfg.items()) {
        if (!allowed_keys.count(item.key())) {
            throw anmf::ConfigError("config file " + path + ": unknown key '" +
                                    item.key() + "'");
        }
    }
    return cfg;
}

// Flag > config > default, with config type errors surfaced as ConfigError.
class Settings {
public:
    Settings(const CLI::App* cmd, ordered_json cfg) : cmd_(cmd), cfg_(std::move(cfg)) {}

    template <typename T>
    T get(const std::string& flag, const std::string& key, const T& flag_value,
          const T& fallback) const {
        if (cmd_->count(flag) > 0) return flag_value;
        if (cfg_.contains(key)) {
            try {
                return cfg_.at(key).get<T>();
            } catch (const nlohmann::json::exception&) {
                throw anmf::ConfigError("config key '" + key + "' has the wrong type");
            }
        }
        return fallback;
    }

    // Accepts a scalar or an array in the config for list-valued settings.
    template <typename T>
    std::vector<T> get_list(const std::string& flag, const std::string& key,
                            const std::vector<T>& flag_value,
                            const std::vector<T>& fallback) const {
        if (cmd_->count(flag) > 0) return flag_value;
        if (cfg_.contains(key)) {
            const auto& node = cfg_.at(key);
            try {
                if (node.is_array()) return node.get<std::vector<T>>();
                return {node.get<T>()};
            } catch (const nlohmann::json::exception&) {
                throw anmf::ConfigError("config key '" + key + "' has the wrong type");
            }
        }
        return fallback;
    }

private:
    const CLI::App* cmd_;
    ordered_json cfg_;
};

struct SolverFlags {
    std::uint64_t max_iters = 50000;
    double rel_tol = 1e-5;
    double epsilon = 1e-12;
    double init_scale = 1.0;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--max-iters", f.max_iters, "Iteration cap (default 50000)");
    cmd->add_option("--rel-tol", f.rel_tol,
                    "Relative objective-change stopping threshold (default 1e-5)");
    cmd->add_option("--epsilon", f.epsilon, "Denominator guard (default 1e-12)");
    cmd->add_option("--init-scale", f.init_scale,
                    "Factor initialization scale (default 1.0)");
}

anmf::SolverConfig merge_solver(const Settings& s, const SolverFlags& f,
                                std::uint64_t seed) {
    anmf::SolverConfig cfg;
    cfg.max_iters = s.get<std::uint64_t>("--max-iters", "max_iters", f.max_iters,
                                         cfg.max_iters);
    cfg.rel_tol = s.get<double>("--rel-tol", "rel_tol", f.rel_tol, cfg.rel_tol);
    cfg.epsilon = s.get<double>("--epsilon", "epsilon", f.epsilon, cfg.epsilon);
    cfg.init_scale =
        s.get<double>("--init-scale", "init_scale", f.init_scale, cfg.init_scale);
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

std::uint64_t single_seed(const Settings& s, const std::vector<std::uint64_t>& flag_seeds) {
    const std::vector<std::uint64_t> seeds =
        s.get_list<std::uint64_t>("--seeds", "seeds", flag_seeds, {0});
    if (seeds.size() != 1) {
        throw anmf::ConfigError("this command takes exactly one seed, got " +
                                std::to_string(seeds.size()));
    }
    return seeds.front();
}

std::filesystem::path require_out(const Settings& s, const std::string& flag_out) {
    const std::string out = s.get<std::string>("--out", "out", flag_out, "");
    if (out.empty()) throw anmf::ConfigError("--out (or config key 'out') is required");
    return std::filesystem::path(out);
}

char merge_delimiter(const Settings& s, const std::string& flag_delim) {
    const std::string d = s.get<std::string>("--delimiter", "delimiter", flag_delim, ",");
    if (d.size() != 1) {
        throw anmf::ConfigError("delimiter must be a single character, got '" + d + "'");
    }
    return d[0];
}

void ensure_out_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw anmf::IoError("cannot create output directory " + dir.string() +
                                ": " + ec.message());
}

// ---------------------------------------------------------------- factorize

struct FactorizeArgs {
    std::string config;
    std::string input;
    bool header = false;
    bool transpose = false;
    std::string delimiter = ",";
    std::int64_t rank = 0;
    std::int64_t terms = 1;
    std::string scheme = "joint";
    std::vector<std::uint64_t> seeds;
    SolverFlags solver;
    std::string out;
};

int run_factorize(const CLI::App* cmd, const FactorizeArgs& a) {
    const std::set<std::string> keys = {"input",   "header",    "transpose", "delimiter",
                                        "rank",    "terms",     "scheme",    "seeds",
                                        "max_iters", "rel_tol", "epsilon",   "init_scale",
                                        "out"};
    const Settings s(cmd, a.config.empty() ? ordered_json::object()
                                           : load_config_file(a.config, keys));

    const std::string input = s.get<std::string>("--input", "input", a.input, "");
    if (input.empty()) throw anmf::ConfigError("--input is required");
    const bool header = s.get<bool>("--header", "header", a.header, false);
    const bool transpose = s.get<bool>("--transpose", "transpose", a.transpose, false);
    const char delim = merge_delimiter(s, a.delimiter);
    const auto rank = s.get<std::int64_t>("--rank", "rank", a.rank, 0);
    if (rank < 1) throw anmf::ConfigError("--rank must be >= 1");
    const auto terms = s.get<std::int64_t>("--terms", "terms", a.terms, 1);
    if (terms < 1) throw anmf::ConfigError("--terms must be >= 1");
    const anmf::SchemeKind scheme =
        anmf::parse_scheme(s.get<std::string>("--scheme", "scheme", a.scheme, "joint"));
    const std::uint64_t seed = single_seed(s, a.seeds);
    const anmf::SolverConfig solver = merge_solver(s, a.solver, seed);
    const std::filesystem::path out = require_out(s, a.out);

    anmf::Matrix raw = anmf::read_matrix_csv(input, delim, header);
    if (transpose) raw = raw.transpose().eval();
    const anmf::NonNegMatrix X(std::move(raw));

    bool converged = false;
    std::vector<anmf::Factorization> term_list;
    std::vector<anmf::ConvergenceTrace> traces; // one, or one per stage
    if (terms == 1) {
        anmf::FactorizeResult res = anmf::factorize(X, rank, solver);
        converged = res.trace.converged;
        term_list.push_back(std::move(res.factorization));
        traces.push_back(std::move(res.trace));
    } else if (scheme == anmf::SchemeKind::MultiStage) {
        anmf::MultiStageResult res = anmf::multi_stage_factorize(X, rank, terms, solver);
        converged = true;
        for (const auto& t : res.stage_traces) converged = converged && t.converged;
        term_list.assign(res.factorization.terms().begin(),
                         res.factorization.terms().end());
        traces = std::move(res.stage_traces);
    } else {
        anmf::JointFactorizeResult res = anmf::joint_factorize(X, rank, terms, solver);
        converged = res.trace.converged;
        term_list.assign(res.factorization.terms().begin(),
                         res.factorization.terms().end());
        traces.push_back(std::move(res.trace));
    }

    ensure_out_dir(out);
    if (term_list.size() == 1) {
        anmf::write_matrix_csv((out / "W.csv").string(), term_list[0].W().value());
        anmf::write_matrix_csv((out / "H.csv").string(), term_list[0].H().value());
    } else {
        for (std::size_t i = 0; i < term_list.size(); ++i) {
            const std::string n = std::to_string(i + 1);
            anmf::write_matrix_csv((out / ("W" + n + ".csv")).string(),
                                   term_list[i].W().value());
            anmf::write_matrix_csv((out / ("H" + n + ".csv")).string(),
                                   term_list[i].H().value());
        }
    }
    if (traces.size() == 1) {
        anmf::write_trace_csv((out / "trace.csv").string(), traces[0]);
    } else {
        for (std::size_t i = 0; i < traces.size(); ++i) {
            anmf::write_trace_csv(
                (out / ("trace" + std::to_string(i + 1) + ".csv")).string(), traces[i]);
        }
    }
    if (!converged) {
        std::cerr << "factorize: hit max_iters before the relative objective change "
                     "dropped below rel_tol\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

// ------------------------------------------------------------------- impute

struct ImputeArgs {
    std::string config;
    std::string input;
    std::string dictionary;
    bool header = false;
    std::string delimiter = ",";
    std::vector<std::uint64_t> seeds;
    SolverFlags solver;
    std::string out;
};

int run_impute(const CLI::App* cmd, const ImputeArgs& a) {
    const std::set<std::string> keys = {"input",   "dictionary", "header",
                                        "delimiter", "seeds",    "max_iters",
                                        "rel_tol", "epsilon",    "init_scale",
                                        "out"};
    const Settings s(cmd, a.config.empty() ? ordered_json::object()
                                           : load_config_file(a.config, keys));

    const std::string input = s.get<std::string>("--input", "input", a.input, "");
    if (input.empty()) throw anmf::ConfigError("--input is required");
    const std::string dict =
        s.get<std::string>("--dictionary", "dictionary", a.dictionary, "");
    if (dict.empty()) throw anmf::ConfigError("--dictionary is required");
    const bool header = s.get<bool>("--header", "header", a.header, false);
    const char delim = merge_delimiter(s, a.delimiter);
    const std::uint64_t seed = single_seed(s, a.seeds);
    const anmf::SolverConfig solver = merge_solver(s, a.solver, seed);
    const std::filesystem::path out = require_out(s, a.out);

    const anmf::NonNegMatrix W(anmf::read_matrix_csv(dict, ','));
    const std::vector<anmf::MaskedVector> points =
        anmf::read_masked_csv(input, delim, header);

    const anmf::ImputeBatchResult batch = anmf::impute_matrix(points, W, solver);

    ensure_out_dir(out);
    anmf::write_matrix_csv((out / "completed.csv").string(),
                           batch.completed.value().transpose());
    for (const auto& failure : batch.failures) {
        std::cerr << "impute: point " << failure.point << ": " << failure.message
                  << "\n";
    }
    return batch.failures.empty() ? kExitOk : kExitData;
}

// --------------------------------------------------------------- experiment

struct ExperimentArgs {
    std::string config;
    std::string input;
    std::int64_t label_column = 0;
    bool header = false;
    std::string delimiter = ",";
    std::int64_t rank = 0;
    std::int64_t terms = 1;
    std::string scheme = "joint";
    std::vector<std::string> conditions;
    std::vector<double> thresholds;
    std::vector<std::uint64_t> seeds;
    double train_fraction = 0.8;
    std::int64_t knn_k = 5;
    bool baselines_on_reconstructed = false;
    std::string dataset_name;
    SolverFlags solver;
    std::string out;
};

int run_experiment(const CLI::App* cmd, const ExperimentArgs& a) {
    const std::set<std::string> keys = {
        "input",     "label_column", "header",        "delimiter",
        "rank",      "terms",        "scheme",        "conditions",
        "threshold", "seeds",        "max_iters",     "rel_tol",
        "epsilon",   "init_scale",   "train_fraction", "knn_k",
        "baselines_on_reconstructed", "dataset_name", "out"};
    const Settings s(cmd, a.config.empty() ? ordered_json::object()
                                           : load_config_file(a.config, keys));

    const std::string input = s.get<std::string>("--input", "input", a.input, "");
    if (input.empty()) throw anmf::ConfigError("--input is required");
    const auto label_column =
        s.get<std::int64_t>("--label-column", "label_column", a.label_column, 0);
    const bool header = s.get<bool>("--header", "header", a.header, false);
    const char delim = merge_delimiter(s, a.delimiter);
    const auto rank = s.get<std::int64_t>("--rank", "rank", a.rank, 0);
    if (rank < 0) throw anmf::ConfigError("--rank must be >= 0 (0 selects 2*d)");
    const auto terms = s.get<std::int64_t>("--terms", "terms", a.terms, 1);
    if (terms < 1) throw anmf::ConfigError("--terms must be >= 1");
    const anmf::SchemeKind scheme =
        anmf::parse_scheme(s.get<std::string>("--scheme", "scheme", a.scheme, "joint"));
    const std::vector<std::string> condition_names = s.get_list<std::string>(
        "--conditions", "conditions", a.conditions,
        {"Baseline", "Zero", "Mean", "Random", "NMF"});
    std::vector<anmf::Condition> conditions;
    for (const auto& name : condition_names) {
        conditions.push_back(anmf::parse_condition(name));
    }
    const std::vector<double> thresholds =
        s.get_list<double>("--threshold", "threshold", a.thresholds, {0.3});
    for (double t : thresholds) {
        if (!(t >= 0.0) || !(t <= 1.0)) {
            throw anmf::ConfigError("threshold must lie in [0,1], got " +
                                    std::to_string(t));
        }
    }
    const std::vector<std::uint64_t> seeds = s.get_list<std::uint64_t>(
        "--seeds", "seeds", a.seeds, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    if (seeds.empty()) throw anmf::ConfigError("seed list is empty");
    const double train_fraction = s.get<double>("--train-fraction", "train_fraction",
                                                a.train_fraction, 0.8);
    const auto knn_k = s.get<std::int64_t>("--knn-k", "knn_k", a.knn_k, 5);
    if (knn_k < 1) throw anmf::ConfigError("--knn-k must be >= 1");
    const bool on_recon = s.get<bool>("--baselines-on-reconstructed",
                                      "baselines_on_reconstructed",
                                      a.baselines_on_reconstructed, false);
    std::string dataset_name =
        s.get<std::string>("--dataset-name", "dataset_name", a.dataset_name, "");
    if (dataset_name.empty()) {
        dataset_name = std::filesystem::path(input).stem().string();
    }
    const anmf::SolverConfig solver = merge_solver(s, a.solver, 0);
    const std::filesystem::path out = require_out(s, a.out);

    const anmf::Dataset ds = anmf::load_csv(input, label_column, delim, header);

    anmf::ExperimentOptions opt;
    opt.dataset_name = dataset_name;
    opt.rank = rank;
    opt.k_terms = terms;
    opt.scheme = scheme;
    opt.solver = solver;
    opt.seeds = seeds;
    opt.train_fraction = train_fraction;
    opt.knn_k = knn_k;
    opt.baselines_on_reconstructed = on_recon;

    // Full grid first; files are written only after every cell succeeded.
    std::vector<anmf::ExperimentReport> rows;
    for (const anmf::Condition condition : conditions) {
        opt.condition = condition;
        if (condition == anmf::Condition::Baseline) {
            opt.t = 0.0;
            rows.push_back(anmf::run_condition(ds, opt));
            continue;
        }
        for (const double t : thresholds) {
            opt.t = t;
            rows.push_back(anmf::run_condition(ds, opt));
        }
    }

    ensure_out_dir(out);
    ordered_json report;
    report["dataset"] = dataset_name;
    report["seeds"] = seeds;
    report["rank"] = rank;
    report["terms"] = terms;
    report["scheme"] = anmf::scheme_name(scheme);
    report["train_fraction"] = train_fraction;
    report["knn_k"] = knn_k;
    report["baselines_on_reconstructed"] = on_recon;
    report["rows"] = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json j;
        j["condition"] = row.condition;
        j["missing_fraction"] = row.missing_fraction;
        j["mean_accuracy"] = row.mean_accuracy;
        j["per_seed_accuracies"] = row.per_seed_accuracies;
        report["rows"].push_back(std::move(j));
    }
    {
        std::ofstream jout(out / "report.json", std::ios::binary);
        if (!jout) throw anmf::IoError("cannot write report.json");
        jout << report.dump(2) << '\n';
    }
    {
        std::ofstream cout_(out / "report.csv", std::ios::binary);
        if (!cout_) throw anmf::IoError("cannot write report.csv");
        cout_ << "dataset,condition,missing_fraction,mean_accuracy";
        for (std::uint64_t seed : seeds) cout_ << ",seed" << seed;
        cout_ << '\n';
        for (const auto& row : rows) {
            cout_ << row.dataset_name << ',' << row.condition << ','
                  << anmf::format_value(row.missing_fraction) << ','
                  << anmf::format_value(row.mean_accuracy);
            for (double acc : row.per_seed_accuracies) {
                cout_ << ',' << anmf::format_value(acc);
            }
            cout_ << '\n';
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Additive NMF: factorization, masked imputation, and "
                 "classification-under-corruption experiments"};
    app.require_subcommand(1);

    FactorizeArgs fa;
    CLI::App* fact = app.add_subcommand(
        "factorize", "Factorize a nonnegative matrix CSV into k additive terms");
    fact->add_option("--config", fa.config, "JSON config file (flags override it)");
    fact->add_option("--input", fa.input, "Input matrix CSV (rows x cols as stored)");
    fact->add_flag("--header", fa.header, "Input has a header row to skip");
    fact->add_flag("--transpose", fa.transpose,
                   "Transpose the input after reading (points-as-rows to d x N)");
    fact->add_option("--delimiter", fa.delimiter, "Field delimiter (default ,)");
    fact->add_option("--rank", fa.rank, "Per-term rank r");
    fact->add_option("--terms", fa.terms, "Number of additive terms k (default 1)");
    fact->add_option("--scheme", fa.scheme,
                     "multi-stage | joint, used when --terms > 1 (default joint)");
    fact->add_option("--seeds", fa.seeds, "Single RNG seed (default 0)")
        ->delimiter(',');
    add_solver_flags(fact, fa.solver);
    fact->add_option("--out", fa.out, "Output directory");

    ImputeArgs ia;
    CLI::App* imp = app.add_subcommand(
        "impute", "Complete masked points (empty CSV fields) against a dictionary");
    imp->add_option("--config", ia.config, "JSON config file (flags override it)");
    imp->add_option("--input", ia.input,
                    "Masked points CSV, one point per row, empty fields missing");
    imp->add_option("--dictionary", ia.dictionary, "Trained dictionary W CSV (d x r)");
    imp->add_flag("--header", ia.header, "Input has a header row to skip");
    imp->add_option("--delimiter", ia.delimiter, "Field delimiter (default ,)");
    imp->add_option("--seeds", ia.seeds, "Single RNG seed (default 0)")->delimiter(',');
    add_solver_flags(imp, ia.solver);
    imp->add_option("--out", ia.out, "Output directory");

    ExperimentArgs ea;
    CLI::App* exp = app.add_subcommand(
        "experiment", "Classification accuracy under corruption, per condition");
    exp->add_option("--config", ea.config, "JSON config file (flags override it)");
    exp->add_option("--input", ea.input, "Labeled dataset CSV");
    exp->add_option("--label-column", ea.label_column,
                    "Zero-based label column index (default 0)");
    exp->add_flag("--header", ea.header, "Input has a header row");
    exp->add_option("--delimiter", ea.delimiter, "Field delimiter (default ,)");
    exp->add_option("--rank", ea.rank, "Dictionary rank, 0 selects 2*d (default 0)");
    exp->add_option("--terms", ea.terms, "Additive terms k (default 1)");
    exp->add_option("--scheme", ea.scheme,
                    "multi-stage | joint, used when --terms > 1 (default joint)");
    exp->add_option("--conditions", ea.conditions,
                    "Comma list of Baseline,Zero,Mean,Random,NMF (default all)")
        ->delimiter(',');
    exp->add_option("--threshold", ea.thresholds,
                    "Comma list of missing thresholds t (default 0.3)")
        ->delimiter(',');
    exp->add_option("--seeds", ea.seeds, "Comma list of seeds (default 0..9)")
        ->delimiter(',');
    exp->add_option("--train-fraction", ea.train_fraction,
                    "Train split fraction (default 0.8)");
    exp->add_option("--knn-k", ea.knn_k, "k-NN neighbor count (default 5)");
    exp->add_flag("--baselines-on-reconstructed", ea.baselines_on_reconstructed,
                  "Classify substitution baselines against reconstructed train "
                  "features too");
    exp->add_option("--dataset-name", ea.dataset_name,
                    "Report name (default: input file stem)");
    add_solver_flags(exp, ea.solver);
    exp->add_option("--out", ea.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (fact->parsed()) return run_factorize(fact, fa);
        if (imp->parsed()) return run_impute(imp, ia);
        return run_experiment(exp, ea);
    } catch (const anmf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const anmf::IndexError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const anmf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
