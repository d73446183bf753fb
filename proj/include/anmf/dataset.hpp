#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anmf/imputation.hpp"
#include "anmf/matrix.hpp"
#include "anmf/rng.hpp"

namespace anmf {

/// Labeled numeric dataset, points as rows. Features are finite after
/// loading; labels are opaque strings.
struct Dataset {
    Matrix features;                          ///< N x d
    std::vector<std::string> labels;          ///< length N
    std::vector<std::string> attribute_names; ///< empty when the file had no header

    Index points() const { return features.rows(); }
    Index dim() const { return features.cols(); }
};

/// Per-attribute train min/max for the [0,1] mapping.
struct NormalizationStats {
    Vector min;
    Vector max;
};

/// Features mapped through a fitted normalizer. Entries are >= 0; test values
/// above the train range pass through > 1, values below it are clamped to 0
/// and counted.
struct NormalizedFeatures {
    Matrix features;
    Index clamped_below = 0;
};

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

struct SplitResult {
    Dataset train;
    Dataset test;
};

/// How corrupted attributes are filled by the non-imputing baselines.
enum class SubstitutionStrategy { Zero, Mean, Random };

/// Load a labeled CSV: the label column becomes `labels`, every other field
/// must parse as a finite number. Row order is preserved.
Dataset load_csv(const std::string& path, Index label_column, char delimiter = ',',
                 bool has_header = false);

/// Per-attribute min/max over the given (training) features only.
NormalizationStats fit_normalizer(const Matrix& train_features);
NormalizationStats fit_normalizer(const Dataset& train);

/// Map each attribute by (v - min) / (max - min). Constant attributes map to
/// 0. Values below the train min clamp to 0 (counted); values above the train
/// max are left > 1 so no information is destroyed on the high side.
NormalizedFeatures apply_normalizer(const NormalizationStats& stats,
                                    const Matrix& features);

/// Seeded Fisher-Yates shuffle, then a prefix split at round(N * fraction).
/// Same seed, same split; the two sides are disjoint and cover the dataset.
SplitResult split(const Dataset& ds, const SplitSpec& spec);

/// One observed/missing flag per attribute: attribute i is missing iff the
/// i-th uniform draw is < t, so the expected missing fraction is t. An
/// all-missing outcome is redrawn (cap 100 attempts) because downstream
/// imputation rejects empty observed sets.
AttributeMask generate_mask(Index d, double t, SeededRng& rng);

/// Fill the missing entries of x per the strategy: Zero writes 0, Mean writes
/// the per-attribute training mean, Random draws uniform on (0,1]. Observed
/// entries are copied bit for bit; draws are consumed only for missing
/// entries, in ascending attribute order.
Vector substitute(const MaskedVector& x, SubstitutionStrategy strategy,
                  const Vector& train_means, SeededRng& rng);

} // namespace anmf
