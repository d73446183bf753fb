#include "anmf/dataset.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "anmf/csv.hpp"

namespace anmf {

Dataset load_csv(const std::string& path, Index label_column, char delimiter,
                 bool has_header) {
    auto rows = read_csv_rows(path, delimiter);
    const std::size_t first_data = has_header ? 1 : 0;
    if (rows.size() <= first_data || rows[0].empty()) {
        throw ParseError(path + ": no data rows");
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) {
            throw ParseError(path + ": row " + std::to_string(i + 1) + " has " +
                             std::to_string(rows[i].size()) + " fields, row 1 has " +
                             std::to_string(rows[0].size()));
        }
    }
    const Index n_cols = static_cast<Index>(rows[0].size());
    if (label_column < 0 || label_column >= n_cols) {
        throw IndexError(path + ": label column " + std::to_string(label_column) +
                         " out of range for " + std::to_string(n_cols) + " columns");
    }
    if (n_cols < 2) {
        throw ParseError(path + ": need at least one feature column besides the label");
    }

    Dataset ds;
    const Index n_points = static_cast<Index>(rows.size() - first_data);
    const Index d = n_cols - 1;
    ds.features.resize(n_points, d);
    ds.labels.reserve(static_cast<std::size_t>(n_points));
    if (has_header) {
        for (Index j = 0; j < n_cols; ++j) {
            if (j == label_column) continue;
            ds.attribute_names.push_back(rows[0][static_cast<std::size_t>(j)]);
        }
    }
    for (Index i = 0; i < n_points; ++i) {
        const auto& fields = rows[static_cast<std::size_t>(i) + first_data];
        Index out_col = 0;
        for (Index j = 0; j < n_cols; ++j) {
            const std::string& field = fields[static_cast<std::size_t>(j)];
            if (j == label_column) {
                ds.labels.push_back(field);
                continue;
            }
            try {
                ds.features(i, out_col) = parse_value(
                    field, static_cast<std::size_t>(i) + first_data + 1,
                    static_cast<std::size_t>(j) + 1);
            } catch (const ParseError& e) {
                throw ParseError(path + ": " + e.what());
            }
            ++out_col;
        }
    }
    return ds;
}

NormalizationStats fit_normalizer(const Matrix& train_features) {
    if (train_features.rows() < 1 || train_features.cols() < 1) {
        throw DimensionError("fit_normalizer: features are empty");
    }
    NormalizationStats stats;
    stats.min = train_features.colwise().minCoeff();
    stats.max = train_features.colwise().maxCoeff();
    return stats;
}

NormalizationStats fit_normalizer(const Dataset& train) {
    return fit_normalizer(train.features);
}

NormalizedFeatures apply_normalizer(const NormalizationStats& stats,
                                    const Matrix& features) {
    if (features.cols() != stats.min.size()) {
        throw DimensionError("apply_normalizer: features have " +
                             std::to_string(features.cols()) +
                             " attributes but stats cover " +
                             std::to_string(stats.min.size()));
    }
    NormalizedFeatures out;
    out.features.resize(features.rows(), features.cols());
    for (Index j = 0; j < features.cols(); ++j) {
        const double lo = stats.min(j);
        const double range = stats.max(j) - stats.min(j);
        for (Index i = 0; i < features.rows(); ++i) {
            double v = range == 0.0 ? 0.0 : (features(i, j) - lo) / range;
            if (v < 0.0) {
                v = 0.0;
                ++out.clamped_below;
            }
            out.features(i, j) = v;
        }
    }
    return out;
}

SplitResult split(const Dataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0) || !(spec.train_fraction < 1.0)) {
        throw ConfigError("split: train_fraction must lie in (0,1), got " +
                          std::to_string(spec.train_fraction));
    }
    const Index n = ds.points();
    if (n < 2) {
        throw ConfigError("split: need at least 2 points, got " + std::to_string(n));
    }
    const Index n_train =
        static_cast<Index>(std::llround(static_cast<double>(n) * spec.train_fraction));
    if (n_train < 1 || n_train >= n) {
        throw ConfigError("split: fraction " + std::to_string(spec.train_fraction) +
                          " leaves an empty side for " + std::to_string(n) + " points");
    }

    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    SeededRng rng(spec.seed);
    for (Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Index>(rng.index(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }

    const auto take = [&](Index from, Index count) {
        Dataset part;
        part.features.resize(count, ds.dim());
        part.labels.reserve(static_cast<std::size_t>(count));
        part.attribute_names = ds.attribute_names;
        for (Index i = 0; i < count; ++i) {
            const Index src = perm[static_cast<std::size_t>(from + i)];
            part.features.row(i) = ds.features.row(src);
            part.labels.push_back(ds.labels[static_cast<std::size_t>(src)]);
        }
        return part;
    };
    return {take(0, n_train), take(n_train, n - n_train)};
}

AttributeMask generate_mask(Index d, double t, SeededRng& rng) {
    if (d < 1) throw DimensionError("generate_mask: d must be >= 1");
    if (!(t >= 0.0) || !(t <= 1.0)) {
        throw ConfigError("generate_mask: threshold must lie in [0,1], got " +
                          std::to_string(t));
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
        AttributeMask mask;
        mask.flags.resize(static_cast<std::size_t>(d));
        for (Index i = 0; i < d; ++i) {
            mask.flags[static_cast<std::size_t>(i)] = rng.unit_positive() >= t;
        }
        if (!mask.none_observed()) return mask;
    }
    throw MaskError("generate_mask: no observable attribute in 100 attempts (t = " +
                    std::to_string(t) + ")");
}

Vector substitute(const MaskedVector& x, SubstitutionStrategy strategy,
                  const Vector& train_means, SeededRng& rng) {
    if (train_means.size() != x.size()) {
        throw DimensionError("substitute: point has " + std::to_string(x.size()) +
                             " attributes but means cover " +
                             std::to_string(train_means.size()));
    }
    Vector out(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        if (x.mask().observed(i)) {
            out(i) = x.values()(i);
            continue;
        }
        switch (strategy) {
            case SubstitutionStrategy::Zero: out(i) = 0.0; break;
            case SubstitutionStrategy::Mean: out(i) = train_means(i); break;
            case SubstitutionStrategy::Random: out(i) = rng.unit_positive(); break;
        }
    }
    return out;
}

} // namespace anmf
