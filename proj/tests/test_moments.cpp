#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "helpers.hpp"
#include "que/errors.hpp"
#include "que/moments.hpp"

using namespace que;
using namespace que::test;

namespace {

Dataset rows(std::initializer_list<std::initializer_list<double>> data) {
    const Eigen::Index n = static_cast<Eigen::Index>(data.size());
    const Eigen::Index d = static_cast<Eigen::Index>(data.begin()->size());
    Eigen::MatrixXd m(n, d);
    Eigen::Index i = 0;
    for (const auto& row : data) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return Dataset(m);
}

WeightVector weights(std::initializer_list<double> w) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(w.size()));
    Eigen::Index i = 0;
    for (double x : w) v[i++] = x;
    return WeightVector(v);
}

} // namespace

TEST_CASE("weighted_mean: symmetric pair") {
    const auto mu = weighted_mean(rows({{1, 0}, {0, 1}}), weights({0.5, 0.5}));
    CHECK(mu.isApprox(Eigen::Vector2d(0.5, 0.5)));
}

TEST_CASE("weighted_mean: full mass on one sample returns it exactly") {
    const auto data = rows({{3.25, -1.5}, {7.0, 2.0}, {0.0, 9.0}});
    const auto mu = weighted_mean(data, weights({0.0, 1.0, 0.0}));
    CHECK(mu == Eigen::Vector2d(7.0, 2.0));
}

TEST_CASE("weighted_mean: four-point arithmetic") {
    const auto data = rows({{2, 0}, {-2, 0}, {0, 1}, {0, -1}});
    const auto mu = weighted_mean(data, weights({0.4, 0.1, 0.25, 0.25}));
    CHECK(mu[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(mu[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("weighted_mean: zero mass throws") {
    CHECK_THROWS_AS(weighted_mean(rows({{1, 0}}), weights({0.0})), ZeroMass);
}

TEST_CASE("weighted_cov_matvec: rank-one pair") {
    const auto data = rows({{1, 0}, {-1, 0}});
    const auto w = weights({0.5, 0.5});
    CHECK(weighted_cov_matvec(data, w, Eigen::Vector2d(1, 0)).isApprox(Eigen::Vector2d(1, 0)));
    // Null direction.
    CHECK(weighted_cov_matvec(data, w, Eigen::Vector2d(0, 1)).norm() == doctest::Approx(0.0));
}

TEST_CASE("weighted_cov_matvec: mass on one point gives the zero operator") {
    const auto data = rows({{4, 5}, {1, 2}});
    const auto w = weights({0.0, 1.0});
    CHECK(weighted_cov_matvec(data, w, Eigen::Vector2d(3, -7)).norm() == doctest::Approx(0.0));
}

TEST_CASE("weighted_cov_shifted_matvec: isotropic construction gives zero") {
    const double c = std::sqrt(2.0);
    const auto data = rows({{c, 0}, {-c, 0}, {0, c}, {0, -c}});
    const auto w = weights({0.25, 0.25, 0.25, 0.25}); // M(w) = Id
    const Eigen::Vector2d v(0.3, -1.7);
    CHECK(weighted_cov_shifted_matvec(data, w, v).norm() < 1e-12);
}

TEST_CASE("weighted_cov_shifted_matvec: scalar case (m-1)v") {
    const auto data = rows({{2}, {-2}}); // M = 4
    const auto w = weights({0.5, 0.5});
    Eigen::VectorXd v(1);
    v << 2.5;
    CHECK(weighted_cov_shifted_matvec(data, w, v)[0] == doctest::Approx(3.0 * 2.5));
}

TEST_CASE("weighted_cov_shifted_matvec: explicit matrix") {
    const auto data = rows({{1, 0}, {-1, 0}});
    const auto w = weights({0.5, 0.5});
    const auto out = weighted_cov_shifted_matvec(data, w, Eigen::Vector2d(0, 1));
    CHECK(out.isApprox(Eigen::Vector2d(0, -1)));
}

TEST_CASE("estimate_spectral_norm: identity, diagonal and zero operators") {
    Rng rng(7);
    const auto id8 = estimate_spectral_norm(
        [](const Eigen::VectorXd& v) { return v; }, 8, 0.1, 0.01, rng);
    CHECK(id8.value >= 0.9);
    CHECK(id8.value <= 1.1);

    const Eigen::Vector2d diag(4.0, 1.0);
    const auto d41 = estimate_spectral_norm(
        [&](const Eigen::VectorXd& v) { return (diag.array() * v.array()).matrix().eval(); }, 2,
        0.1, 0.01, rng);
    CHECK(d41.value >= 3.6);
    CHECK(d41.value <= 4.4);

    const auto zero = estimate_spectral_norm(
        [](const Eigen::VectorXd& v) { return (0.0 * v).eval(); }, 5, 0.1, 0.01, rng);
    CHECK(zero.value <= 1e-9);
}

TEST_CASE("bucket_reduce: counts and degenerate shapes") {
    Rng rng(11);
    const Dataset big = random_dataset(1000, 3, rng);
    const Dataset reduced = bucket_reduce(big, 0.05, rng);
    CHECK(reduced.n() == 500); // floor(10*0.05*1000) buckets of size 2
    CHECK(reduced.d() == 3);
    // Every output is the mean of a disjoint pair, so the grand mean is
    // preserved exactly (all 1000 samples used: 500 * 2).
    CHECK((reduced.samples().colwise().mean() - big.samples().colwise().mean()).norm() < 1e-12);

    // Constant data maps to the same constant.
    const Dataset constant(Eigen::MatrixXd::Constant(40, 2, 3.5));
    const Dataset creduced = bucket_reduce(constant, 0.05, rng);
    CHECK((creduced.samples().array() == 3.5).all());

    // eps = 1/(10n): a single bucket holding the full empirical mean.
    const Dataset small = random_dataset(20, 2, rng);
    const Dataset one = bucket_reduce(small, 1.0 / 200.0, rng);
    CHECK(one.n() == 1);
    CHECK((one.samples().row(0) - small.samples().colwise().mean()).norm() < 1e-12);
}

TEST_CASE("bucket_reduce: rejects out-of-range eps") {
    Rng rng(3);
    const Dataset data = random_dataset(100, 2, rng);
    CHECK_THROWS_AS(bucket_reduce(data, 0.0, rng), InvalidEpsilon);
    CHECK_THROWS_AS(bucket_reduce(data, 0.2, rng), InvalidEpsilon); // > 1/20
    const Dataset tiny = random_dataset(5, 2, rng);
    CHECK_THROWS_AS(bucket_reduce(tiny, 0.01, rng), InvalidEpsilon); // 10*eps*n < 1
}

TEST_CASE("property: PSD ordering |w|M(w) - |w'|M(w') >= 0 for w' <= w") {
    Rng rng(21);
    std::uniform_int_distribution<int> dim(1, 6), count(2, 12);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 250; ++trial) {
        const Eigen::Index d = dim(rng), n = count(rng);
        const Dataset data = random_dataset(n, d, rng, 2.0);
        const WeightVector w = random_weights(n, rng, 0.05);
        Eigen::VectorXd shrunk = w.values();
        for (Eigen::Index i = 0; i < n; ++i) shrunk[i] *= unif(rng);
        if (shrunk.sum() <= 0.0) continue;
        const WeightVector wp(shrunk);
        const Eigen::MatrixXd gap =
            w.mass() * dense_weighted_cov(data, w) - wp.mass() * dense_weighted_cov(data, wp);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gap);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("property: matvec agrees with the dense operator") {
    Rng rng(22);
    std::uniform_int_distribution<int> dim(1, 16), count(2, 40);
    for (int trial = 0; trial < 250; ++trial) {
        const Eigen::Index d = dim(rng), n = count(rng);
        const Dataset data = random_dataset(n, d, rng, 3.0);
        const WeightVector w = random_weights(n, rng);
        const Eigen::VectorXd v = gaussian_matrix(d, 1, rng);
        const Eigen::VectorXd fast = weighted_cov_matvec(data, w, v);
        const Eigen::VectorXd dense = dense_weighted_cov(data, w) * v;
        CHECK((fast - dense).norm() <= 1e-10 * (dense.norm() + 1.0));
        const Eigen::VectorXd shifted = weighted_cov_shifted_matvec(data, w, v);
        CHECK((shifted - (dense - v)).norm() <= 1e-10 * (dense.norm() + v.norm() + 1.0));
    }
}

TEST_CASE("property: spectral norm estimate hits the 10% band almost always") {
    Rng rng(23);
    std::uniform_int_distribution<int> dim(2, 32);
    int failures = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        const Eigen::Index d = dim(rng);
        Eigen::MatrixXd g = gaussian_matrix(d, d, rng);
        const Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
        const double truth = sym.operatorNorm();
        const auto est = estimate_spectral_norm(
            [&](const Eigen::VectorXd& v) { return (sym * v).eval(); }, d, 0.1, 0.01, rng);
        if (est.value < 0.9 * truth || est.value > 1.1 * truth) ++failures;
    }
    CHECK(failures <= 4); // <= 2% target
}

TEST_CASE("property: block spectral estimator matches the scalar contract") {
    Rng rng(24);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index d = 16;
        const Eigen::MatrixXd psd = random_psd(d, 3.0, rng);
        const auto est = estimate_spectral_norm_block(
            [&](const Eigen::MatrixXd& v) { return (psd * v).eval(); }, d, 0.1, 0.01, rng);
        CHECK(est.value >= 0.9 * 3.0);
        CHECK(est.value <= 1.1 * 3.0);
    }
}
