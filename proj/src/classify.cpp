#include "anmf/classify.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>

#include "anmf/imputation.hpp"

namespace anmf {

namespace {

// Experiment-level stream labels. Large and distinct so they never collide
// with the small per-term/per-stage indices the solvers derive internally.
constexpr std::uint64_t kMaskStream = 0x6D61736BULL;   // corruption masks
constexpr std::uint64_t kFillStream = 0x66696C6CULL;   // random-substitute draws
constexpr std::uint64_t kImputeStream = 0x696D7075ULL; // per-point imputation fits

[[noreturn]] void rethrow_with_context(const std::string& context) {
    try {
        throw;
    } catch (const DimensionError& e) {
        throw DimensionError(context + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(context + e.what());
    } catch (const NumericError& e) {
        throw NumericError(context + e.what());
    } catch (const IndexError& e) {
        throw IndexError(context + e.what());
    } catch (const MaskError& e) {
        throw MaskError(context + e.what());
    } catch (const ParseError& e) {
        throw ParseError(context + e.what());
    } catch (const IoError& e) {
        throw IoError(context + e.what());
    } catch (const Error& e) {
        throw Error(context + e.what());
    }
}

double run_seed(const Dataset& ds, const ExperimentOptions& opt, std::uint64_t seed) {
    SplitResult parts = split(ds, {opt.train_fraction, seed});
    const NormalizationStats stats = fit_normalizer(parts.train.features);
    const Matrix train_norm = apply_normalizer(stats, parts.train.features).features;
    const Matrix test_norm = apply_normalizer(stats, parts.test.features).features;
    const Index d = ds.dim();
    const Index n_test = test_norm.rows();
    const Index r = opt.rank >= 1 ? opt.rank : 2 * d;

    SolverConfig solver = opt.solver;
    solver.seed = seed;

    // Train-side model, built only when some side classifies against it.
    const bool needs_model =
        opt.condition == Condition::NMF || opt.baselines_on_reconstructed;
    std::optional<Factorization> model;
    std::optional<AdditiveFactorization> additive_model;
    Matrix reconstructed_train;
    if (needs_model) {
        const NonNegMatrix X_tr(train_norm.transpose());
        if (opt.k_terms == 1) {
            model = factorize(X_tr, r, solver).factorization;
            reconstructed_train = model->reconstruct().transpose();
        } else if (opt.scheme == SchemeKind::MultiStage) {
            additive_model =
                multi_stage_factorize(X_tr, r, opt.k_terms, solver).factorization;
            reconstructed_train = additive_reconstruct(*additive_model).transpose();
        } else {
            additive_model = joint_factorize(X_tr, r, opt.k_terms, solver).factorization;
            reconstructed_train = additive_reconstruct(*additive_model).transpose();
        }
    }

    Matrix test_feats;
    if (opt.condition == Condition::Baseline) {
        test_feats = test_norm;
    } else {
        // Masks depend only on (seed, point order): every condition corrupts
        // the same entries. Fill draws run on their own stream so consuming
        // them cannot shift later masks.
        SeededRng mask_rng(derive_seed(seed, kMaskStream));
        std::vector<MaskedVector> corrupted;
        corrupted.reserve(static_cast<std::size_t>(n_test));
        for (Index i = 0; i < n_test; ++i) {
            AttributeMask mask = generate_mask(d, opt.t, mask_rng);
            Vector values(d);
            for (Index a = 0; a < d; ++a) {
                values(a) = mask.observed(a) ? test_norm(i, a) : 0.0;
            }
            corrupted.emplace_back(std::move(values), std::move(mask));
        }

        test_feats.resize(n_test, d);
        if (opt.condition == Condition::NMF) {
            SolverConfig impute_cfg = solver;
            impute_cfg.seed = derive_seed(seed, kImputeStream);
            if (opt.k_terms == 1) {
                ImputeBatchResult batch =
                    impute_matrix(corrupted, model->W(), impute_cfg, /*fail_fast=*/true);
                test_feats = batch.completed.value().transpose();
            } else {
                for (Index i = 0; i < n_test; ++i) {
                    SolverConfig point_cfg = impute_cfg;
                    point_cfg.seed = derive_seed(impute_cfg.seed,
                                                 static_cast<std::uint64_t>(i));
                    test_feats.row(i) =
                        impute_point_additive(corrupted[static_cast<std::size_t>(i)],
                                              *additive_model, point_cfg)
                            .completed.transpose();
                }
            }
        } else {
            const SubstitutionStrategy strategy =
                opt.condition == Condition::Zero   ? SubstitutionStrategy::Zero
                : opt.condition == Condition::Mean ? SubstitutionStrategy::Mean
                                                   : SubstitutionStrategy::Random;
            const Vector means = train_norm.colwise().mean();
            SeededRng fill_rng(derive_seed(seed, kFillStream));
            for (Index i = 0; i < n_test; ++i) {
                test_feats.row(i) =
                    substitute(corrupted[static_cast<std::size_t>(i)], strategy, means,
                               fill_rng)
                        .transpose();
            }
        }
    }

    const bool classify_on_reconstruction =
        opt.condition == Condition::NMF || opt.baselines_on_reconstructed;
    Dataset knn_train;
    knn_train.features = classify_on_reconstruction ? reconstructed_train : train_norm;
    knn_train.labels = parts.train.labels;
    const KnnModel knn = knn_fit(knn_train, opt.knn_k);

    std::vector<std::string> predictions;
    predictions.reserve(static_cast<std::size_t>(n_test));
    for (Index i = 0; i < n_test; ++i) {
        predictions.push_back(knn_predict(knn, test_feats.row(i).transpose()));
    }
    return accuracy(predictions, parts.test.labels);
}

} // namespace

KnnModel knn_fit(const Dataset& train, Index k) {
    if (train.points() < 1) {
        throw ConfigError("knn_fit: empty training set");
    }
    if (static_cast<std::size_t>(train.points()) != train.labels.size()) {
        throw DimensionError("knn_fit: " + std::to_string(train.points()) +
                             " feature rows but " + std::to_string(train.labels.size()) +
                             " labels");
    }
    if (k < 1 || k > train.points()) {
        throw ConfigError("knn_fit: k = " + std::to_string(k) +
                          " must lie in [1, " + std::to_string(train.points()) + "]");
    }
    return {train.features, train.labels, k};
}

std::string knn_predict(const KnnModel& model, const Vector& x) {
    if (x.size() != model.train_features.cols()) {
        throw DimensionError("knn_predict: query has " + std::to_string(x.size()) +
                             " attributes, model has " +
                             std::to_string(model.train_features.cols()));
    }
    const Index n = model.train_features.rows();
    // Squared distances order identically to Euclidean ones (sqrt is monotone),
    // including exact ties.
    std::vector<std::pair<double, Index>> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        order[static_cast<std::size_t>(i)] = {
            (model.train_features.row(i).transpose() - x).squaredNorm(), i};
    }
    const auto mid = order.begin() + static_cast<std::ptrdiff_t>(model.k);
    std::partial_sort(order.begin(), mid, order.end()); // pair <: distance, then index

    std::map<std::string, Index> votes;
    for (Index i = 0; i < model.k; ++i) {
        ++votes[model.train_labels[static_cast<std::size_t>(
            order[static_cast<std::size_t>(i)].second)]];
    }
    Index best = 0;
    for (const auto& [label, count] : votes) best = std::max(best, count);
    // Among top-voted labels, the one reached first in neighbor order wins.
    for (Index i = 0; i < model.k; ++i) {
        const std::string& label = model.train_labels[static_cast<std::size_t>(
            order[static_cast<std::size_t>(i)].second)];
        if (votes[label] == best) return label;
    }
    return model.train_labels[static_cast<std::size_t>(order[0].second)]; // unreachable
}

double accuracy(const std::vector<std::string>& predictions,
                const std::vector<std::string>& labels) {
    if (predictions.size() != labels.size()) {
        throw DimensionError("accuracy: " + std::to_string(predictions.size()) +
                             " predictions vs " + std::to_string(labels.size()) +
                             " labels");
    }
    if (predictions.empty()) {
        throw DimensionError("accuracy: empty input");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == labels[i]) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(predictions.size());
}

std::string condition_name(Condition c) {
    switch (c) {
        case Condition::Baseline: return "Baseline";
        case Condition::Zero: return "Zero";
        case Condition::Mean: return "Mean";
        case Condition::Random: return "Random";
        case Condition::NMF: return "NMF";
    }
    throw ConfigError("condition_name: invalid condition");
}

Condition parse_condition(const std::string& name) {
    if (name == "Baseline") return Condition::Baseline;
    if (name == "Zero") return Condition::Zero;
    if (name == "Mean") return Condition::Mean;
    if (name == "Random") return Condition::Random;
    if (name == "NMF") return Condition::NMF;
    throw ConfigError("unknown condition '" + name +
                      "' (expected Baseline|Zero|Mean|Random|NMF)");
}

std::string scheme_name(SchemeKind s) {
    return s == SchemeKind::MultiStage ? "multi-stage" : "joint";
}

SchemeKind parse_scheme(const std::string& name) {
    if (name == "multi-stage") return SchemeKind::MultiStage;
    if (name == "joint") return SchemeKind::Joint;
    throw ConfigError("unknown scheme '" + name + "' (expected multi-stage|joint)");
}

ExperimentReport run_condition(const Dataset& ds, const ExperimentOptions& opt) {
    opt.solver.validate();
    if (opt.seeds.empty()) {
        throw ConfigError("run_condition: seed list is empty");
    }
    if (!(opt.t >= 0.0) || !(opt.t <= 1.0)) {
        throw ConfigError("run_condition: threshold must lie in [0,1], got " +
                          std::to_string(opt.t));
    }
    if (opt.k_terms < 1) {
        throw ConfigError("run_condition: k_terms must be >= 1");
    }
    if (opt.rank < 0) {
        throw ConfigError("run_condition: rank must be >= 0 (0 selects 2*d)");
    }
    const std::set<std::string> classes(ds.labels.begin(), ds.labels.end());
    if (classes.size() < 2) {
        throw ConfigError("run_condition: dataset has " +
                          std::to_string(classes.size()) +
                          " distinct class(es), need at least 2");
    }

    ExperimentReport report;
    report.dataset_name = opt.dataset_name;
    report.condition = condition_name(opt.condition);
    report.missing_fraction = opt.condition == Condition::Baseline ? 0.0 : opt.t;
    report.seeds = opt.seeds;
    report.per_seed_accuracies.reserve(opt.seeds.size());
    for (std::uint64_t seed : opt.seeds) {
        try {
            report.per_seed_accuracies.push_back(run_seed(ds, opt, seed));
        } catch (const Error&) {
            rethrow_with_context("run_condition(" + report.condition + ", t=" +
                                 std::to_string(opt.t) + ", seed=" +
                                 std::to_string(seed) + "): ");
        }
    }
    report.mean_accuracy =
        std::accumulate(report.per_seed_accuracies.begin(),
                        report.per_seed_accuracies.end(), 0.0) /
        static_cast<double>(report.per_seed_accuracies.size());
    return report;
}

} // namespace anmf
