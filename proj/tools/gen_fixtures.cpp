// Regenerates the committed CSV fixtures under data/. Deterministic: reruns
// produce byte-identical files.
//
//   gen_fixtures <output-dir>
//
// scurve.csv    3-D S-shaped manifold, shifted into the nonnegative orthant,
//               400 points, one point per row, no labels.
// separable.csv Two-class archetype mixture: x = B * h + noise with B drawn
//               once, class c scaling the mixture weights by (c + 1). Label
//               in column 0, 12 features, 240 points.

#include <filesystem>
#include <iostream>
#include <string>

#include "anmf/csv.hpp"
#include "anmf/matrix.hpp"
#include "anmf/rng.hpp"

namespace {

anmf::Matrix make_scurve(anmf::Index n, std::uint64_t seed) {
    anmf::SeededRng rng(seed);
    anmf::Matrix points(n, 3);
    const double pi = 3.14159265358979323846;
    for (anmf::Index i = 0; i < n; ++i) {
        const double t = -1.5 * pi + 3.0 * pi * rng.unit_positive();
        const double sign = t < 0.0 ? -1.0 : 1.0;
        points(i, 0) = std::sin(t) + 1.0;
        points(i, 1) = 2.0 * rng.unit_positive();
        points(i, 2) = sign * (std::cos(t) - 1.0) + 2.0;
    }
    return points;
}

anmf::Matrix make_separable(std::uint64_t seed) {
    const anmf::Index d = 12;
    const anmf::Index p = 3;
    const anmf::Index per_class = 120;
    anmf::SeededRng rng(seed);

    anmf::Matrix B(d, p);
    for (anmf::Index i = 0; i < d; ++i) {
        for (anmf::Index j = 0; j < p; ++j) {
            B(i, j) = 0.1 + 0.9 * rng.unit_positive();
        }
    }
    const anmf::Vector base = (anmf::Vector(p) << 1.0, 0.55, 0.45).finished();

    anmf::Matrix table(2 * per_class, 1 + d);
    anmf::Index row = 0;
    for (int label = 0; label <= 1; ++label) {
        const anmf::Vector mean = (label + 1.0) * base;
        for (anmf::Index s = 0; s < per_class; ++s) {
            anmf::Vector h(p);
            for (anmf::Index j = 0; j < p; ++j) {
                h(j) = mean(j) * (0.6 + 0.8 * rng.unit_positive());
            }
            anmf::Vector x = B * h;
            for (anmf::Index i = 0; i < d; ++i) {
                x(i) += 0.05 * rng.unit_positive();
            }
            table(row, 0) = label;
            table.row(row).tail(d) = x.transpose();
            ++row;
        }
    }
    return table;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: gen_fixtures <output-dir>\n";
        return 1;
    }
    const std::filesystem::path out(argv[1]);
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) {
        std::cerr << "cannot create " << out << ": " << ec.message() << "\n";
        return 1;
    }
    anmf::write_matrix_csv((out / "scurve.csv").string(), make_scurve(400, 7));
    anmf::write_matrix_csv((out / "separable.csv").string(), make_separable(4242));
    std::cout << "wrote " << (out / "scurve.csv").string() << " and "
              << (out / "separable.csv").string() << "\n";
    return 0;
}
