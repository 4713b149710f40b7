#include "que/synthetic.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "que/errors.hpp"

namespace que {

namespace {

Eigen::VectorXd random_unit_vector(Eigen::Index d, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(d);
    double norm = 0.0;
    do {
        for (Eigen::Index i = 0; i < d; ++i) v[i] = gauss(rng);
        norm = v.norm();
    } while (norm <= 1e-12);
    return v / norm;
}

Eigen::MatrixXd gaussian_block(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = gauss(rng);
        }
    }
    return m;
}

} // namespace

std::vector<double> CorruptionSpec::resolved_weights() const {
    if (!weights.empty()) return weights;
    return std::vector<double>(static_cast<std::size_t>(k), eps / static_cast<double>(k));
}

void CorruptionSpec::validate(Eigen::Index d) const {
    if (!(eps >= 0.0) || !(eps < 0.5)) {
        throw InvalidEpsilon("corruption fraction must lie in [0, 1/2)");
    }
    if (k < 1 || k > d) {
        throw ConfigError("corruption directions k must satisfy 1 <= k <= d");
    }
    if (!(sigma >= 0.0) || !(magnitude > 0.0)) {
        throw ConfigError("corruption spread must be >= 0 and magnitude > 0");
    }
    const auto w = resolved_weights();
    if (static_cast<int>(w.size()) != k) {
        throw ConfigError("per-direction weights must have k entries");
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(total - eps) > 1e-12) {
        throw ConfigError("per-direction weights must sum to eps");
    }
}

GeneratedData gen_synthetic(Eigen::Index d, Eigen::Index n, const CorruptionSpec& spec, Rng& rng) {
    spec.validate(d);
    if (n < 1 || d < 1) {
        throw ConfigError("gen_synthetic needs n >= 1 and d >= 1");
    }
    const double nn = static_cast<double>(n);
    const Eigen::Index inliers = static_cast<Eigen::Index>(std::ceil((1.0 - spec.eps) * nn));
    const auto frac = spec.resolved_weights();

    std::vector<Eigen::Index> counts;
    Eigen::Index outliers = 0;
    for (double f : frac) {
        const Eigen::Index c = spec.eps > 0.0 ? static_cast<Eigen::Index>(std::ceil(f * nn)) : 0;
        counts.push_back(c);
        outliers += c;
    }

    Eigen::MatrixXd samples(inliers + outliers, d);
    std::vector<int> labels(static_cast<std::size_t>(inliers + outliers), 0);
    samples.topRows(inliers) = gaussian_block(inliers, d, rng);

    Eigen::Index row = inliers;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double center = spec.magnitude *
                              std::sqrt(static_cast<double>(spec.k) / spec.eps);
        const Eigen::Index plus = counts[i] / 2 + counts[i] % 2; // split evenly, odd one goes +
        for (Eigen::Index j = 0; j < counts[i]; ++j, ++row) {
            samples.row(row) = spec.sigma * gaussian_block(1, d, rng);
            samples(row, static_cast<Eigen::Index>(i)) += (j < plus ? center : -center);
            labels[static_cast<std::size_t>(row)] = 1;
        }
    }

    return GeneratedData{Dataset(std::move(samples)), std::move(labels),
                         Eigen::VectorXd::Zero(d)};
}

GeneratedData gen_eps_corrupted(Eigen::Index d, Eigen::Index n, double eps, Adversary adversary,
                                Rng& rng) {
    if (!(eps >= 0.0) || !(eps < 0.5)) {
        throw InvalidEpsilon("eps must lie in [0, 1/2)");
    }
    if (n < 1 || d < 1) {
        throw ConfigError("gen_eps_corrupted needs n >= 1 and d >= 1");
    }
    const Eigen::VectorXd mu_star = random_unit_vector(d, rng);
    Eigen::MatrixXd samples = gaussian_block(n, d, rng);
    samples.rowwise() += mu_star.transpose();
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    if (eps == 0.0) {
        return GeneratedData{Dataset(std::move(samples)), std::move(labels), mu_star};
    }

    // The adversary replaces the ceil(eps*n) samples most extreme along a
    // random direction.
    const Eigen::Index m = static_cast<Eigen::Index>(std::ceil(eps * static_cast<double>(n)));
    const Eigen::VectorXd v = random_unit_vector(d, rng);
    const Eigen::VectorXd proj = samples * v;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return proj[a] > proj[b]; });
    order.resize(static_cast<std::size_t>(m));

    const Eigen::VectorXd sample_mean = samples.colwise().mean().transpose();
    const double bias_norm = 0.9 / std::sqrt(eps);

    switch (adversary) {
        case Adversary::directional_mixture: {
            // Shift the replaced samples by a single bias vector.
            const Eigen::VectorXd u = random_unit_vector(d, rng);
            for (Eigen::Index i : order) {
                samples.row(i) += bias_norm * u.transpose();
            }
            break;
        }
        case Adversary::norm_inflation: {
            // Inflate the replaced samples threefold about the sample mean.
            for (Eigen::Index i : order) {
                samples.row(i) =
                    sample_mean.transpose() + 3.0 * (samples.row(i) - sample_mean.transpose());
            }
            break;
        }
        case Adversary::replace_remove: {
            // Spread the same bias budget over three random orthogonal
            // directions.
            const Eigen::Index dirs = std::min<Eigen::Index>(3, d);
            Eigen::MatrixXd basis = gaussian_block(d, dirs, rng);
            const Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
            const Eigen::MatrixXd q =
                qr.householderQ() * Eigen::MatrixXd::Identity(d, dirs);
            for (std::size_t j = 0; j < order.size(); ++j) {
                samples.row(order[j]) +=
                    bias_norm * q.col(static_cast<Eigen::Index>(j) % dirs).transpose();
            }
            break;
        }
    }
    for (Eigen::Index i : order) {
        labels[static_cast<std::size_t>(i)] = 1;
    }
    return GeneratedData{Dataset(std::move(samples)), std::move(labels), mu_star};
}

void save_labels_csv(const std::vector<int>& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    for (int l : labels) {
        out << l << '\n';
    }
}

std::vector<int> load_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        // Accept either a bare 0/1 or the last comma-separated column.
        const auto pos = line.find_last_of(',');
        const std::string field = pos == std::string::npos ? line : line.substr(pos + 1);
        try {
            labels.push_back(std::stoi(field));
        } catch (const std::exception&) {
            throw IoError(path + ": cannot parse label '" + field + "'");
        }
    }
    if (labels.empty()) {
        throw IoError(path + ": no labels");
    }
    return labels;
}

} // namespace que
