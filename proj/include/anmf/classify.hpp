#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anmf/additive.hpp"
#include "anmf/dataset.hpp"
#include "anmf/nmf.hpp"

namespace anmf {

/// Plain k-nearest-neighbor model over Euclidean distance. Ties are broken
/// deterministically: equal distances prefer the lower training index, vote
/// ties go to the label of the nearest member of the tied set.
struct KnnModel {
    Matrix train_features; ///< N x d, rows are points
    std::vector<std::string> train_labels;
    Index k = 1;
};

KnnModel knn_fit(const Dataset& train, Index k);

std::string knn_predict(const KnnModel& model, const Vector& x);

/// Percentage of positions where the two label sequences agree.
double accuracy(const std::vector<std::string>& predictions,
                const std::vector<std::string>& labels);

/// Test-side handling under corruption. Baseline skips corruption entirely;
/// Zero/Mean/Random substitute; NMF imputes through the trained dictionary.
enum class Condition { Baseline, Zero, Mean, Random, NMF };

std::string condition_name(Condition c);
Condition parse_condition(const std::string& name);

std::string scheme_name(SchemeKind s);
SchemeKind parse_scheme(const std::string& name);

struct ExperimentOptions {
    std::string dataset_name;
    Condition condition = Condition::Baseline;
    double t = 0.3;              ///< missing threshold; ignored by Baseline
    Index rank = 0;              ///< 0 means the overcomplete default 2*d
    Index k_terms = 1;
    SchemeKind scheme = SchemeKind::Joint; ///< used when k_terms > 1
    SolverConfig solver;         ///< seed field is overridden per experiment seed
    std::vector<std::uint64_t> seeds;
    double train_fraction = 0.8;
    Index knn_k = 5;
    /// When set, the substitution baselines also classify against the
    /// reconstructed training features instead of the raw normalized ones.
    bool baselines_on_reconstructed = false;
};

struct ExperimentReport {
    std::string dataset_name;
    std::string condition;
    double missing_fraction = 0.0;
    double mean_accuracy = 0.0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> per_seed_accuracies;
};

/// One (condition, t) cell averaged over seeds. Per seed: split, min-max
/// normalize on the train side, factorize the transposed train features,
/// corrupt the test points, build the condition's test features, classify
/// with k-NN and score. The NMF condition pairs its test features with the
/// reconstructed training features; the baselines pair with the raw
/// normalized ones unless baselines_on_reconstructed is set. Corruption masks
/// depend only on the experiment seed, so all conditions see identical masks.
ExperimentReport run_condition(const Dataset& ds, const ExperimentOptions& options);

} // namespace anmf
