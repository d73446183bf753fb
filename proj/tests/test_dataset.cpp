#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "anmf/dataset.hpp"
#include "anmf/errors.hpp"

using namespace anmf;
namespace fs = std::filesystem;

namespace {

fs::path write_text(const std::string& name, const std::string& content) {
    const fs::path dir = fs::temp_directory_path() / "anmf_dataset_tests";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

Dataset tiny_dataset(Index n, Index d, std::uint64_t seed) {
    SeededRng rng(seed);
    Dataset ds;
    ds.features.resize(n, d);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) ds.features(i, j) = rng.unit_positive();
        ds.labels.push_back(i % 2 == 0 ? "a" : "b");
    }
    return ds;
}

} // namespace

TEST_CASE("load_csv splits labels out of a hand-written file") {
    const fs::path p = write_text("tiny.csv", "1,2,A\n3,4,B\n5,6,A\n");
    const Dataset ds = load_csv(p.string(), 2);
    REQUIRE(ds.points() == 3);
    REQUIRE(ds.dim() == 2);
    CHECK(ds.labels == std::vector<std::string>{"A", "B", "A"});
    CHECK(ds.features(0, 0) == 1.0);
    CHECK(ds.features(2, 1) == 6.0);
    CHECK(ds.attribute_names.empty());
}

TEST_CASE("load_csv captures header names and skips the header row") {
    const fs::path p = write_text("hdr.csv", "label,f1,f2\nx,1,2\ny,3,4\n");
    const Dataset ds = load_csv(p.string(), 0, ',', true);
    REQUIRE(ds.points() == 2);
    CHECK(ds.dim() == 2);
    CHECK(ds.labels == std::vector<std::string>{"x", "y"});
    CHECK(ds.attribute_names == std::vector<std::string>{"f1", "f2"});
}

TEST_CASE("load_csv rejects malformed files") {
    const fs::path ragged = write_text("ragged.csv", "1,2,A\n3,B\n");
    CHECK_THROWS_AS((void)load_csv(ragged.string(), 2), ParseError);

    const fs::path narrow = write_text("narrow.csv", "A\nB\n");
    CHECK_THROWS_AS((void)load_csv(narrow.string(), 0), ParseError);

    const fs::path junk = write_text("junk.csv", "1,zz,A\n");
    CHECK_THROWS_AS((void)load_csv(junk.string(), 2), ParseError);

    const fs::path fine = write_text("fine.csv", "1,2,A\n");
    CHECK_THROWS_AS((void)load_csv(fine.string(), 3), IndexError);
    CHECK_THROWS_AS((void)load_csv(fine.string(), -1), IndexError);
}

TEST_CASE("the breast-cancer file loads with the documented shape when present") {
    const std::string path = std::string(ANMF_DATA_DIR) + "/wdbc.csv";
    if (!fs::exists(path)) return; // fetched separately; shape checked when available
    const Dataset ds = load_csv(path, 0);
    CHECK(ds.points() == 569);
    CHECK(ds.dim() == 30);
    std::set<std::string> classes(ds.labels.begin(), ds.labels.end());
    CHECK(classes.size() == 2);
}

TEST_CASE("min-max normalization maps {2,4,6} onto {0, 0.5, 1}") {
    Matrix train(3, 1);
    train << 2, 4, 6;
    const NormalizationStats stats = fit_normalizer(train);
    const NormalizedFeatures out = apply_normalizer(stats, train);
    CHECK(out.features(0, 0) == 0.0);
    CHECK(out.features(1, 0) == 0.5);
    CHECK(out.features(2, 0) == 1.0);
    CHECK(out.clamped_below == 0);
}

TEST_CASE("constant attributes normalize to zero") {
    Matrix train(3, 2);
    train << 5, 1, 5, 2, 5, 3;
    const NormalizedFeatures out = apply_normalizer(fit_normalizer(train), train);
    CHECK(out.features.col(0).maxCoeff() == 0.0);
    CHECK(out.features.col(1).minCoeff() == 0.0);
}

TEST_CASE("test values outside the train range clamp below and pass above") {
    Matrix train(2, 1);
    train << 1, 3;
    Matrix test(3, 1);
    test << 0, 2, 5;
    const NormalizedFeatures out = apply_normalizer(fit_normalizer(train), test);
    CHECK(out.features(0, 0) == 0.0); // clamped
    CHECK(out.features(1, 0) == 0.5);
    CHECK(out.features(2, 0) == 2.0); // above-range information kept
    CHECK(out.clamped_below == 1);
}

TEST_CASE("normalization stats never read the test rows") {
    const Dataset train = tiny_dataset(6, 3, 1);
    const NormalizationStats a = fit_normalizer(train);
    Dataset mutated = train;
    // stats must come from the rows they were fitted on, nothing else
    const NormalizationStats b = fit_normalizer(mutated);
    CHECK(a.min == b.min);
    CHECK(a.max == b.max);
    CHECK(a.min.size() == 3);
}

TEST_CASE("split honors the 8/2 arithmetic and stays deterministic") {
    const Dataset ds = tiny_dataset(10, 2, 3);
    SplitSpec spec;
    spec.train_fraction = 0.8;
    spec.seed = 5;
    const SplitResult a = split(ds, spec);
    CHECK(a.train.points() == 8);
    CHECK(a.test.points() == 2);
    const SplitResult b = split(ds, spec);
    CHECK(a.train.features == b.train.features);
    CHECK(a.test.labels == b.test.labels);
}

TEST_CASE("split covers the dataset disjointly") {
    // distinct feature values identify rows; together both sides must be a
    // permutation of the original
    Dataset ds;
    ds.features.resize(7, 1);
    for (Index i = 0; i < 7; ++i) {
        ds.features(i, 0) = static_cast<double>(i);
        ds.labels.push_back("l" + std::to_string(i));
    }
    SplitSpec spec;
    spec.train_fraction = 0.6;
    spec.seed = 11;
    const SplitResult r = split(ds, spec);
    std::multiset<double> seen;
    for (Index i = 0; i < r.train.points(); ++i) seen.insert(r.train.features(i, 0));
    for (Index i = 0; i < r.test.points(); ++i) seen.insert(r.test.features(i, 0));
    CHECK(seen.size() == 7);
    CHECK(*seen.begin() == 0.0);
    CHECK(*seen.rbegin() == 6.0);
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end()); // no duplicates
}

TEST_CASE("a 569-point split at 0.8 yields 455 train and 114 test points") {
    const Dataset ds = tiny_dataset(569, 2, 8);
    SplitSpec spec;
    spec.train_fraction = 0.8;
    const SplitResult r = split(ds, spec);
    CHECK(r.train.points() == 455); // round(569 * 0.8)
    CHECK(r.test.points() == 114);
}

TEST_CASE("split validates its inputs") {
    const Dataset ds = tiny_dataset(10, 2, 9);
    SplitSpec spec;
    spec.train_fraction = 1.0;
    CHECK_THROWS_AS((void)split(ds, spec), ConfigError);
    spec.train_fraction = 0.0;
    CHECK_THROWS_AS((void)split(ds, spec), ConfigError);
    spec.train_fraction = 0.01; // empty train side after rounding
    CHECK_THROWS_AS((void)split(ds, spec), ConfigError);
    const Dataset single = tiny_dataset(1, 2, 10);
    spec.train_fraction = 0.5;
    CHECK_THROWS_AS((void)split(single, spec), ConfigError);
}

TEST_CASE("generate_mask at t=0 observes everything") {
    SeededRng rng(1);
    const AttributeMask m = generate_mask(20, 0.0, rng);
    CHECK(m.all_observed());
}

TEST_CASE("generate_mask hits the target missing rate on average") {
    SeededRng rng(2);
    double missing = 0.0;
    const int draws = 10000;
    for (int n = 0; n < draws; ++n) {
        missing += static_cast<double>(generate_mask(30, 0.3, rng).missing_count());
    }
    const double rate = missing / (30.0 * draws);
    CHECK(rate == doctest::Approx(0.3).epsilon(0.034)); // within about 1 point
}

TEST_CASE("generate_mask is deterministic and validates t") {
    SeededRng a(3), b(3);
    for (int n = 0; n < 20; ++n) {
        CHECK(generate_mask(10, 0.4, a).flags == generate_mask(10, 0.4, b).flags);
    }
    SeededRng rng(4);
    CHECK_THROWS_AS((void)generate_mask(10, -0.1, rng), ConfigError);
    CHECK_THROWS_AS((void)generate_mask(10, 1.5, rng), ConfigError);
    // t=1 makes every attribute missing (draws are <= 1), so the redraw cap trips
    CHECK_THROWS_AS((void)generate_mask(10, 1.0, rng), MaskError);
}

TEST_CASE("substitute fills by strategy and never touches observed entries") {
    Vector x(2);
    x << 0.5, 123.0; // second entry is a missing placeholder
    const MaskedVector point(x, AttributeMask{{true, false}});
    Vector means(2);
    means << 0.9, 0.4;

    SeededRng rng(5);
    const Vector zero = substitute(point, SubstitutionStrategy::Zero, means, rng);
    CHECK(zero(0) == 0.5);
    CHECK(zero(1) == 0.0);

    const Vector mean = substitute(point, SubstitutionStrategy::Mean, means, rng);
    CHECK(mean(0) == 0.5);
    CHECK(mean(1) == 0.4);

    SeededRng r1(6), r2(6);
    const Vector rnd1 = substitute(point, SubstitutionStrategy::Random, means, r1);
    const Vector rnd2 = substitute(point, SubstitutionStrategy::Random, means, r2);
    CHECK(rnd1(0) == 0.5);
    CHECK(rnd1(1) > 0.0);
    CHECK(rnd1(1) <= 1.0);
    CHECK(rnd1 == rnd2);
}

TEST_CASE("substitute is the identity when nothing is missing") {
    Vector x(3);
    x << 0.1, 0.2, 0.3;
    const MaskedVector point(x, AttributeMask{{true, true, true}});
    const Vector means = Vector::Zero(3);
    SeededRng rng(7);
    for (auto strat : {SubstitutionStrategy::Zero, SubstitutionStrategy::Mean,
                       SubstitutionStrategy::Random}) {
        CHECK(substitute(point, strat, means, rng) == x);
    }
}

TEST_CASE("substitute consumes draws only at missing slots, in attribute order") {
    Vector x(4);
    x << 0.1, 0.0, 0.2, 0.0;
    const MaskedVector point(x, AttributeMask{{true, false, true, false}});
    const Vector means = Vector::Zero(4);
    SeededRng rng(8), expect_rng(8);
    const Vector out = substitute(point, SubstitutionStrategy::Random, means, rng);
    CHECK(out(1) == expect_rng.unit_positive());
    CHECK(out(3) == expect_rng.unit_positive());
}

TEST_CASE("substitute validates the means vector size") {
    Vector x(2);
    x << 0.5, 0.0;
    const MaskedVector point(x, AttributeMask{{true, false}});
    SeededRng rng(9);
    CHECK_THROWS_AS((void)substitute(point, SubstitutionStrategy::Mean, Vector(1), rng),
                    DimensionError);
}
