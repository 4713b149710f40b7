#include "que/matexp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "que/errors.hpp"

namespace que {

namespace {

constexpr Eigen::Index kDensifyGuard = 2048;

// splitmix64: cheap deterministic stream splitter so each sketch row draws
// from its own substream regardless of row evaluation order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

void WeightHistory::push(const Dataset& data, const WeightVector& w) {
    if (w.mass() <= 0.0) {
        throw ZeroMass("history entries need positive mass");
    }
    entries_.push_back(Entry{w, weighted_mean(data, w)});
}

Eigen::MatrixXd WeightHistory::apply_half_exponent(const Dataset& data,
                                                   const Eigen::MatrixXd& V) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(V.rows(), V.cols());
    if (alpha_ == 0.0) {
        return out;
    }
    for (const Entry& e : entries_) {
        out += weighted_cov_matmat(data, e.w, V);
    }
    return (alpha_ / 2.0) * out;
}

Eigen::MatrixXd WeightHistory::dense_exponent_sum(const Dataset& data) const {
    const Eigen::Index d = data.d();
    if (d > kDensifyGuard) {
        throw TooLarge("dense exponent requested for d > 2048");
    }
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
    for (const Entry& e : entries_) {
        Eigen::MatrixXd centered = data.samples();
        centered.rowwise() -= e.center.transpose();
        sum.noalias() += centered.transpose() * e.w.values().asDiagonal() * centered;
    }
    return sum;
}

int default_sketch_width(Eigen::Index n, Eigen::Index d, double delta) {
    const double by_samples = std::ceil(20.0 * std::log((static_cast<double>(n) + 1.0) / delta));
    return static_cast<int>(std::min(static_cast<double>(d), by_samples));
}

int default_poly_degree(Eigen::Index d) {
    return std::max(10, static_cast<int>(std::ceil(2.0 * std::log(static_cast<double>(d) + 1.0))));
}

Eigen::VectorXd taylor_exp_matvec(const WeightHistory& history, const Dataset& data, int ell,
                                  const Eigen::VectorXd& v) {
    if (ell < 0) {
        throw ConfigError("polynomial degree must be nonnegative");
    }
    if (v.size() != data.d()) {
        throw DimensionMismatch("vector dimension does not match dataset");
    }
    // Horner form: P_ell(Y) v = v + Y(v + Y(v + ...)/... )/1, innermost first.
    Eigen::MatrixXd r = v;
    for (int j = ell; j >= 1; --j) {
        r = v + history.apply_half_exponent(data, r) / static_cast<double>(j);
    }
    return r;
}

SketchedExponentialOracle build_sketched_oracle(const Dataset& data, const WeightHistory& history,
                                                const WeightVector& w_now, int r, int ell,
                                                std::uint64_t seed) {
    if (r < 1 || ell < 0) {
        throw ConfigError("sketch width and polynomial degree must be positive");
    }
    const Eigen::Index d = data.d(); // empty history means a zero exponent, P_ell(0) = Id

    // S^T as a d x r block. With r >= d a Gaussian sketch only adds variance
    // without reducing dimension, so we use the identity instead; the oracle
    // is then exact up to Taylor truncation.
    Eigen::MatrixXd st;
    const bool identity_sketch = r >= d;
    if (identity_sketch) {
        r = static_cast<int>(d);
        st = Eigen::MatrixXd::Identity(d, d);
    } else {
        st.resize(d, r);
        const double scale = 1.0 / std::sqrt(static_cast<double>(r));
        for (int row = 0; row < r; ++row) {
            Rng stream(mix_seed(seed, static_cast<std::uint64_t>(row)));
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (Eigen::Index j = 0; j < d; ++j) {
                st(j, row) = scale * gauss(stream);
            }
        }
    }

    // A^T = P_ell(Y) S^T, all columns at once (Horner on the block).
    Eigen::MatrixXd at = st;
    for (int j = ell; j >= 1; --j) {
        at = st + history.apply_half_exponent(data, at) / static_cast<double>(j);
    }

    SketchedExponentialOracle oracle;
    oracle.sketch = at.transpose();
    oracle.trace_estimate = oracle.sketch.squaredNorm();
    oracle.r = r;
    oracle.ell = ell;
    oracle.seed = seed;
    oracle.center = weighted_mean(data, w_now);
    if (!(oracle.trace_estimate > 0.0) || !oracle.sketch.allFinite()) {
        throw DataError("sketched oracle produced a degenerate sketch");
    }
    return oracle;
}

ScoreReport sketched_scores(const SketchedExponentialOracle& oracle, const Dataset& data,
                            const WeightVector& w_now, bool weighted_q) {
    if (oracle.sketch.cols() != data.d()) {
        throw DimensionMismatch("oracle sketch dimension does not match dataset");
    }
    if (w_now.size() != data.n()) {
        throw DimensionMismatch("weight vector length does not match dataset");
    }
    // |A (X_i - mu)|^2 row by row: project all samples through A^T at once.
    Eigen::MatrixXd proj = data.samples() * oracle.sketch.transpose(); // n x r
    proj.rowwise() -= (oracle.sketch * oracle.center).transpose();

    ScoreReport report;
    report.oracle_kind = OracleKind::sketched;
    report.tau = proj.rowwise().squaredNorm() / oracle.trace_estimate;
    if (weighted_q) {
        report.q = w_now.values().dot(report.tau) - 1.0;
    } else {
        report.q = report.tau.sum() - static_cast<double>(report.tau.size());
    }
    return report;
}

Eigen::MatrixXd exact_density_matrix(const Dataset& data, const WeightHistory& history) {
    const Eigen::Index d = data.d();
    if (d > kDensifyGuard) {
        throw TooLarge("exact oracle requested for d > 2048");
    }
    const Eigen::MatrixXd sum = history.dense_exponent_sum(data);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sum);
    if (eig.info() != Eigen::Success) {
        throw DataError("eigendecomposition failed in exact oracle");
    }
    // exp(alpha * sum) / tr: shift by the top eigenvalue before
    // exponentiating so the largest term is exactly 1.
    const Eigen::VectorXd lam = eig.eigenvalues();
    const double top = lam.maxCoeff();
    Eigen::VectorXd expo = ((lam.array() - top) * history.alpha()).exp();
    expo /= expo.sum();
    return eig.eigenvectors() * expo.asDiagonal() * eig.eigenvectors().transpose();
}

ScoreReport exact_scores(const Dataset& data, const WeightHistory& history,
                         const WeightVector& w_now, bool weighted_q) {
    if (w_now.size() != data.n()) {
        throw DimensionMismatch("weight vector length does not match dataset");
    }
    const Eigen::MatrixXd u = exact_density_matrix(data, history);
    const Eigen::VectorXd mu = weighted_mean(data, w_now);
    Eigen::MatrixXd centered = data.samples();
    centered.rowwise() -= mu.transpose();

    ScoreReport report;
    report.oracle_kind = OracleKind::exact;
    // tau_i = x_i^T U x_i = |U^{1/2} x_i|^2; computed via (X U) . X rowwise.
    report.tau = ((centered * u).array() * centered.array()).rowwise().sum();
    report.tau = report.tau.cwiseMax(0.0); // clamp eigensolver noise at zero
    if (weighted_q) {
        report.q = w_now.values().dot(report.tau) - 1.0;
    } else {
        report.q = report.tau.sum() - static_cast<double>(report.tau.size());
    }
    return report;
}

std::string ScoreReport::to_json() const {
    std::ostringstream out;
    out.precision(17);
    out << "{\"tau\": [";
    for (Eigen::Index i = 0; i < tau.size(); ++i) {
        if (i) out << ", ";
        out << tau[i];
    }
    out << "], \"q\": ";
    if (q.has_value()) {
        out << *q;
    } else {
        out << "null";
    }
    out << ", \"oracle\": \"" << (oracle_kind == OracleKind::exact ? "exact" : "sketched")
        << "\"}";
    return out.str();
}

} // namespace que
