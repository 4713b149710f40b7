#include "que/scoring.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "que/matexp.hpp"

namespace que {

namespace {

// Chebyshev coefficients of exp on [-1, 1] at degree 5: a_0 = I_0(1) and
// a_k = 2*I_k(1) for the modified Bessel functions I_k.
constexpr double kChebExp[6] = {
    1.2660658777520084, 1.1303182079849700, 0.2714953395340766,
    0.0443368498486638, 0.0054742404420937, 0.0005429263119139,
};

Eigen::VectorXd empirical_mean(const Dataset& data) {
    return data.samples().colwise().mean().transpose();
}

Eigen::MatrixXd centered_samples(const Dataset& data) {
    Eigen::MatrixXd c = data.samples();
    c.rowwise() -= empirical_mean(data).transpose();
    return c;
}

} // namespace

Eigen::VectorXd baseline_l2(const Dataset& data) {
    if (data.n() < 2) {
        throw DataError("baseline_l2 needs at least two samples");
    }
    return centered_samples(data).rowwise().norm();
}

Eigen::VectorXd baseline_spectral(const Dataset& data, Rng& rng) {
    if (data.n() < 2) {
        throw DataError("baseline_spectral needs at least two samples");
    }
    const Eigen::MatrixXd xc = centered_samples(data);
    const double nn = static_cast<double>(data.n());
    if (xc.squaredNorm() / nn <= 1e-24) {
        throw DegenerateCovariance();
    }
    const Eigen::Index d = data.d();
    const int iters = static_cast<int>(std::ceil(10.0 * std::log(static_cast<double>(d) + 1.0) / 0.1));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = gauss(rng);
    v.normalize();
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd next = xc.transpose() * (xc * v) / nn;
        const double norm = next.norm();
        if (norm <= 0.0) {
            throw DegenerateCovariance();
        }
        v = next / norm;
    }
    const Eigen::VectorXd proj = xc * v;
    return proj.array().square();
}

Eigen::VectorXd que_scores(const Dataset& data, double alpha, const QueScoreConfig& cfg, Rng& rng) {
    if (data.n() < 2) {
        throw DataError("que_scores needs at least two samples");
    }
    if (alpha < 0.0) {
        throw ConfigError("alpha must be nonnegative");
    }
    const Eigen::Index n = data.n();
    const Eigen::Index d = data.d();
    const Eigen::MatrixXd xc = centered_samples(data);
    const double nn = static_cast<double>(n);

    if (xc.squaredNorm() / nn <= 1e-24) {
        throw DegenerateCovariance();
    }

    if (cfg.mode == ScoreMode::exact) {
        const Eigen::MatrixXd cov = xc.transpose() * xc / nn;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        if (eig.info() != Eigen::Success) {
            throw DataError("eigendecomposition failed in que_scores");
        }
        const Eigen::VectorXd lam = eig.eigenvalues();
        const double top = lam.maxCoeff();
        if (!(top > 0.0)) {
            throw DegenerateCovariance();
        }
        // Exponent alpha * Sbar / |Sbar|, shifted by its top eigenvalue so the
        // largest exponential is exactly 1 at any alpha.
        const Eigen::VectorXd expo = (alpha * (lam.array() / top - 1.0)).exp();
        const double trace = expo.sum();
        const Eigen::MatrixXd proj = xc * eig.eigenvectors(); // n x d coordinates
        return (proj.array().square().rowwise() * expo.transpose().array()).rowwise().sum() /
               trace;
    }

    // Fast path: exp((alpha/2) B) with B = Sbar/|Sbar| approximated by a
    // degree-5 Chebyshev polynomial plus scaling-and-squaring, pushed through
    // a JL sketch. Squarings s = ceil(log2(max(1, alpha))).
    const int s = static_cast<int>(std::ceil(std::log2(std::max(1.0, alpha))));
    if (s > 16) {
        throw TooLarge("approx mode supports alpha up to 2^16; use exact mode");
    }
    auto norm_rng = rng; // dedicated stream so the sketch below is unaffected
    const double lam_hat =
        estimate_spectral_norm_block(
            [&](const Eigen::MatrixXd& V) {
                return (xc.transpose() * (xc * V) / nn).eval();
            },
            d, 0.1, 0.01, norm_rng)
            .value;
    if (!(lam_hat > 0.0)) {
        throw DegenerateCovariance();
    }
    const double theta = (alpha / 2.0) / std::pow(2.0, s); // <= 1/2

    // One application of the degree-5 Chebyshev approximant of exp at theta*B.
    const auto cheb_apply = [&](const Eigen::MatrixXd& X) {
        const auto m_apply = [&](const Eigen::MatrixXd& V) {
            return (theta * (xc.transpose() * (xc * V)) / (nn * lam_hat)).eval();
        };
        Eigen::MatrixXd b2 = Eigen::MatrixXd::Zero(X.rows(), X.cols());
        Eigen::MatrixXd b1 = Eigen::MatrixXd::Zero(X.rows(), X.cols());
        for (int k = 5; k >= 1; --k) {
            Eigen::MatrixXd bk = kChebExp[k] * X + 2.0 * m_apply(b1) - b2;
            b2 = std::move(b1);
            b1 = std::move(bk);
        }
        return (kChebExp[0] * X + m_apply(b1) - b2).eval();
    };

    int r = cfg.r.value_or(default_sketch_width(n, d, cfg.delta));
    Eigen::MatrixXd at; // holds exp((alpha/2) B) S^T, d x r
    if (r >= d) {
        at = Eigen::MatrixXd::Identity(d, d);
        r = static_cast<int>(d);
    } else {
        at.resize(d, r);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double scale = 1.0 / std::sqrt(static_cast<double>(r));
        for (Eigen::Index j = 0; j < r; ++j) {
            for (Eigen::Index i = 0; i < d; ++i) {
                at(i, j) = scale * gauss(rng);
            }
        }
    }
    const long applications = 1L << s; // C^(2^s) via repeated application
    for (long a = 0; a < applications; ++a) {
        at = cheb_apply(at);
    }

    const double trace = at.squaredNorm();
    if (!(trace > 0.0)) {
        throw DegenerateCovariance();
    }
    return (xc * at).rowwise().squaredNorm() / trace;
}

WhiteningTransform fit_whitening(const Dataset& reference, WhiteningKind kind, int k, double ridge,
                                 double power) {
    WhiteningTransform w;
    w.kind = kind;
    w.ridge = ridge;
    w.k = k;
    if (kind == WhiteningKind::identity) {
        return w;
    }
    if (!(ridge > 0.0)) {
        throw ConfigError("whitening ridge must be positive");
    }
    if (power != -0.5 && power != -1.0) {
        throw ConfigError("whitening power must be -0.5 or -1");
    }
    const Eigen::Index d = reference.d();
    if (kind == WhiteningKind::exact && reference.n() < d + 1) {
        throw SingularReference("exact whitening needs at least d+1 reference samples");
    }
    if (kind == WhiteningKind::topk && (k < 1 || k > d)) {
        throw ConfigError("topk whitening needs 1 <= k <= d");
    }
    const Eigen::MatrixXd xc = centered_samples(reference);
    const Eigen::MatrixXd cov = xc.transpose() * xc / static_cast<double>(reference.n());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw DataError("eigendecomposition failed in fit_whitening");
    }
    const Eigen::VectorXd lam = eig.eigenvalues(); // ascending
    const Eigen::MatrixXd v = eig.eigenvectors();

    if (kind == WhiteningKind::exact) {
        const double cond = (lam.maxCoeff() + ridge) / (lam.minCoeff() + ridge);
        if (!std::isfinite(cond) || cond > 1e12) {
            throw SingularReference("reference covariance ill-conditioned beyond the ridge");
        }
        const Eigen::VectorXd scale = (lam.array() + ridge).pow(power);
        w.matrix = v * scale.asDiagonal() * v.transpose();
        return w;
    }

    // topk: invert only the top-k eigendirections, identity on the rest:
    // sum_{i<=k} lam_i^power v_i v_i^T + (Id - sum_{i<=k} v_i v_i^T).
    w.matrix = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < k; ++i) {
        const Eigen::Index idx = d - 1 - i; // descending order
        const double li = lam[idx];
        if (!(li > 0.0)) {
            throw SingularReference("topk whitening hit a nonpositive eigenvalue");
        }
        const Eigen::VectorXd vi = v.col(idx);
        w.matrix += (std::pow(li, power) - 1.0) * (vi * vi.transpose());
    }
    return w;
}

Dataset apply_whitening(const WhiteningTransform& w, const Dataset& data) {
    if (w.kind == WhiteningKind::identity) {
        return data;
    }
    if (w.matrix.cols() != data.d()) {
        throw DimensionMismatch("whitening transform dimension does not match dataset");
    }
    return Dataset(data.samples() * w.matrix.transpose());
}

double rocauc(const LabeledScores& scored, TieConvention ties) {
    if (scored.tau.size() != static_cast<Eigen::Index>(scored.labels.size())) {
        throw DimensionMismatch("scores and labels differ in length");
    }
    std::vector<double> out_scores, in_scores;
    for (Eigen::Index i = 0; i < scored.tau.size(); ++i) {
        (scored.labels[static_cast<std::size_t>(i)] ? out_scores : in_scores)
            .push_back(scored.tau[i]);
    }
    if (out_scores.empty() || in_scores.empty()) {
        throw OneClassOnly();
    }
    // Sort inliers once; each outlier then contributes via two binary searches.
    std::sort(in_scores.begin(), in_scores.end());
    double acc = 0.0;
    for (double t : out_scores) {
        const auto lo = std::lower_bound(in_scores.begin(), in_scores.end(), t);
        const auto hi = std::upper_bound(lo, in_scores.end(), t);
        const double below = static_cast<double>(lo - in_scores.begin());
        const double equal = static_cast<double>(hi - lo);
        acc += below + (ties == TieConvention::half ? 0.5 * equal : equal);
    }
    return acc / (static_cast<double>(out_scores.size()) * static_cast<double>(in_scores.size()));
}

} // namespace que
