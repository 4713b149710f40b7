#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>

#include "helpers.hpp"
#include "que/errors.hpp"
#include "que/synthetic.hpp"

using namespace que;
using namespace que::test;

TEST_CASE("gen_synthetic: counts and cluster placement at eps = 0.2, k = 1") {
    Rng rng(91);
    CorruptionSpec spec;
    spec.eps = 0.2;
    spec.k = 1;
    spec.magnitude = 1.0;
    spec.sigma = 0.1;
    const GeneratedData g = gen_synthetic(16, 1000, spec, rng);
    CHECK(g.data.n() == 1000);
    CHECK(g.true_mean.norm() == 0.0);
    int outliers = 0;
    const double center = std::sqrt(1.0 / 0.2); // C*sqrt(k/eps) = sqrt(5)
    for (Eigen::Index i = 0; i < g.data.n(); ++i) {
        if (g.labels[static_cast<std::size_t>(i)]) {
            ++outliers;
            // Outliers cluster tightly around +-sqrt(5) e1.
            CHECK(std::abs(std::abs(g.data.samples()(i, 0)) - center) < 1.0);
        }
    }
    CHECK(outliers == 200);
    CHECK(g.data.n() - outliers == 800);
}

TEST_CASE("gen_synthetic: eps = 0 emits only inliers") {
    Rng rng(92);
    CorruptionSpec spec;
    spec.eps = 0.0;
    spec.k = 2;
    const GeneratedData g = gen_synthetic(4, 100, spec, rng);
    CHECK(g.data.n() == 100);
    for (int l : g.labels) CHECK(l == 0);
}

TEST_CASE("gen_synthetic: k = d spreads ceil(eps*n/d) outliers per direction") {
    Rng rng(93);
    CorruptionSpec spec;
    spec.eps = 0.2;
    spec.k = 4;
    const GeneratedData g = gen_synthetic(4, 1000, spec, rng);
    // ceil(0.05 * 1000) = 50 outliers on each of the 4 axes.
    std::array<int, 4> per_axis{0, 0, 0, 0};
    for (Eigen::Index i = 0; i < g.data.n(); ++i) {
        if (!g.labels[static_cast<std::size_t>(i)]) continue;
        Eigen::Index axis = 0;
        g.data.row(i).cwiseAbs().maxCoeff(&axis);
        ++per_axis[static_cast<std::size_t>(axis)];
    }
    for (int c : per_axis) CHECK(c == 50);
}

TEST_CASE("gen_synthetic: spec validation") {
    Rng rng(94);
    CorruptionSpec spec;
    spec.eps = 0.6;
    CHECK_THROWS_AS(gen_synthetic(4, 100, spec, rng), InvalidEpsilon);
    spec.eps = 0.2;
    spec.k = 9;
    CHECK_THROWS_AS(gen_synthetic(4, 100, spec, rng), ConfigError);
    spec.k = 2;
    spec.weights = {0.1, 0.2}; // sums to 0.3 != eps
    CHECK_THROWS_AS(gen_synthetic(4, 100, spec, rng), ConfigError);
    spec.weights = {0.15, 0.05};
    CHECK_NOTHROW(gen_synthetic(4, 100, spec, rng));
}

TEST_CASE("gen_eps_corrupted: eps = 0 is a pure Gaussian sample") {
    Rng rng(95);
    const GeneratedData g = gen_eps_corrupted(8, 500, 0.0, Adversary::directional_mixture, rng);
    CHECK(g.data.n() == 500);
    CHECK(g.true_mean.norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int l : g.labels) CHECK(l == 0);
}

TEST_CASE("gen_eps_corrupted: determinism and label counts") {
    Rng a(96), b(96);
    const GeneratedData ga = gen_eps_corrupted(8, 300, 0.1, Adversary::norm_inflation, a);
    const GeneratedData gb = gen_eps_corrupted(8, 300, 0.1, Adversary::norm_inflation, b);
    CHECK(ga.data.samples() == gb.data.samples());
    CHECK(ga.labels == gb.labels);
    int outliers = 0;
    for (int l : ga.labels) outliers += l;
    CHECK(outliers == 30); // ceil(eps * n)
}

TEST_CASE("gen_eps_corrupted: directional adversary biases the raw mean") {
    Rng rng(97);
    const GeneratedData g =
        gen_eps_corrupted(32, 20000, 0.1, Adversary::directional_mixture, rng);
    const Eigen::VectorXd raw = g.data.samples().colwise().mean().transpose();
    CHECK((raw - g.true_mean).norm() >= 0.25);
}

TEST_CASE("gen_eps_corrupted: all adversaries produce valid labeled data") {
    for (Adversary adv : {Adversary::directional_mixture, Adversary::norm_inflation,
                          Adversary::replace_remove}) {
        Rng rng(98);
        const GeneratedData g = gen_eps_corrupted(6, 200, 0.15, adv, rng);
        CHECK(g.data.n() == 200);
        int outliers = 0;
        for (int l : g.labels) outliers += l;
        CHECK(outliers == 30);
    }
    Rng rng(99);
    CHECK_THROWS_AS(gen_eps_corrupted(4, 100, 0.5, Adversary::norm_inflation, rng),
                    InvalidEpsilon);
}

TEST_CASE("labels round-trip through CSV") {
    const std::string path = "/tmp/que_test_labels.csv";
    const std::vector<int> labels{0, 1, 1, 0, 1};
    save_labels_csv(labels, path);
    CHECK(load_labels_csv(path) == labels);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_labels_csv("/tmp/que_no_such_file.csv"), IoError);
}
