#include "que/robust_mean.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "que/filter.hpp"

namespace que {

namespace {

double log_clamped(double x) { return std::max(1.0, std::log(x)); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// The MMW driver keeps alpha * |M(w_j)| <= 1, so each history entry adds at
// most 1/2 to the half-exponent's spectral norm. The Taylor degree must stay
// ahead of that norm or the polynomial stops resembling exp.
int adaptive_degree(int base, std::size_t history_len) {
    const double y = 0.5 * static_cast<double>(history_len);
    const int needed = static_cast<int>(std::ceil(y + 3.0 * std::sqrt(y) + 5.0));
    return std::max(base, needed);
}

struct ScoreContext {
    const Dataset& data;
    const EstimatorConfig& cfg;
    double oracle_delta;
    std::uint64_t call_counter = 0;

    ScoreReport compute(const WeightHistory& history, const WeightVector& w) {
        if (cfg.oracle == OracleChoice::exact) {
            return exact_scores(data, history, w, cfg.weighted_q);
        }
        const int r = cfg.r.value_or(default_sketch_width(data.n(), data.d(), oracle_delta));
        const int ell = adaptive_degree(cfg.ell.value_or(default_poly_degree(data.d())),
                                        history.length());
        const auto oracle = build_sketched_oracle(data, history, w, r, ell,
                                                  mix_seed(cfg.seed, ++call_counter));
        return sketched_scores(oracle, data, w, cfg.weighted_q);
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

void EstimatorConfig::validate() const {
    if (!(eps > 0.0) || !(eps < 0.5)) {
        throw InvalidEpsilon("eps must lie in (0, 1/2)");
    }
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw ConfigError("delta must lie in (0, 1)");
    }
    if (epoch_cap.has_value() && *epoch_cap < 1) {
        throw ConfigError("epoch_cap must be >= 1");
    }
    if (iter_cap.has_value() && *iter_cap < 1) {
        throw ConfigError("iter_cap must be >= 1");
    }
    if (gamma2.has_value() && !(*gamma2 > 0.0)) {
        throw ConfigError("gamma2 must be positive");
    }
}

double EstimatorConfig::resolved_gamma1(Eigen::Index n, Eigen::Index d) const {
    if (gamma1) return *gamma1;
    const double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    if (mode == EstimatorMode::bounded_cov) {
        return std::sqrt(2.0 * dd / (nn * delta)) + std::sqrt(eps) / std::exp(1.0);
    }
    return 2.0 * std::sqrt((dd + std::log(1.0 / delta)) / nn);
}

double EstimatorConfig::resolved_gamma2(Eigen::Index n, Eigen::Index d) const {
    if (gamma2) return *gamma2;
    const double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    if (mode == EstimatorMode::bounded_cov) {
        return std::max(1.0, dd * (std::log(dd) + std::log(2.0 / delta)) / (0.1 * eps * nn));
    }
    const double a = (dd + std::log(1.0 / delta)) / nn;
    return 2.0 * std::max(std::sqrt(a), a);
}

double EstimatorConfig::resolved_beta2(Eigen::Index n, Eigen::Index d) const {
    if (beta2) return *beta2;
    const double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    return 4.0 * std::log(1.0 / eps) + (dd + std::log(1.0 / delta)) / (eps * nn);
}

double EstimatorConfig::resolved_beta1(Eigen::Index n, Eigen::Index d) const {
    if (beta1) return *beta1;
    return std::sqrt(resolved_beta2(n, d));
}

double EstimatorConfig::resolved_xi(Eigen::Index n, Eigen::Index d) const {
    const double g1 = resolved_gamma1(n, d);
    const double g2 = resolved_gamma2(n, d);
    const double b1 = resolved_beta1(n, d);
    const double b2 = resolved_beta2(n, d);
    return g2 + 2.0 * g1 * g1 + 4.0 * eps * eps * b1 * b1 + 2.0 * eps * b2 +
           xi_o_constant * eps * std::log(1.0 / eps);
}

int EstimatorConfig::resolved_epoch_cap(double kappa_value, Eigen::Index n) const {
    if (epoch_cap) return *epoch_cap;
    const double arg = std::max(kappa_value * kappa_value, 2.0) * static_cast<double>(n);
    return static_cast<int>(std::ceil(std::log(arg) / std::log(1.5))) + 4;
}

int EstimatorConfig::resolved_iter_cap(Eigen::Index d) const {
    if (iter_cap) return *iter_cap;
    return static_cast<int>(std::ceil(20.0 * std::log2(static_cast<double>(d) + 2.0))) + 4;
}

std::vector<double> EpochTrace::lambda_history() const {
    std::vector<double> out;
    for (const EpochRecord& e : epochs) {
        out.insert(out.end(), e.lambda_history.begin(), e.lambda_history.end());
    }
    return out;
}

std::pair<Dataset, std::vector<Eigen::Index>> naive_prune(const Dataset& data, double radius,
                                                          double delta, Rng& rng) {
    if (!(radius > 0.0)) {
        throw ConfigError("prune radius must be positive");
    }
    const Eigen::Index n = data.n();
    const int rounds = static_cast<int>(std::ceil(std::log2(2.0 / delta)));
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);

    for (int round = 0; round < rounds; ++round) {
        const Eigen::Index center = pick(rng);
        const Eigen::VectorXd c = data.row(center).transpose();
        Eigen::VectorXd dist2 = (data.samples().rowwise() - c.transpose()).rowwise().squaredNorm();
        const double near2 = 4.0 * radius * radius;   // (2r)^2
        const double keep2 = 16.0 * radius * radius;  // (4r)^2
        const Eigen::Index near = (dist2.array() <= near2).count();
        if (2 * near > n) { // strictly more than half certify the center
            std::vector<Eigen::Index> kept;
            kept.reserve(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < n; ++i) {
                if (dist2[i] <= keep2) kept.push_back(i);
            }
            Eigen::MatrixXd out(static_cast<Eigen::Index>(kept.size()), data.d());
            for (std::size_t i = 0; i < kept.size(); ++i) {
                out.row(static_cast<Eigen::Index>(i)) = data.row(kept[i]);
            }
            return {Dataset(std::move(out)), std::move(kept)};
        }
    }
    throw PruneFailed();
}

FilterResult que_score_filter(const Dataset& data, const EstimatorConfig& cfg) {
    cfg.validate();
    if (cfg.mode != EstimatorMode::bounded_cov) {
        throw ConfigError("que_score_filter requires bounded_cov mode");
    }
    const Eigen::Index n = data.n();
    const Eigen::Index d = data.d();
    const double gamma2 = cfg.resolved_gamma2(n, d);
    const double kappa = cfg.kappa.value_or(
        std::max(1.0, data.samples().rowwise().norm().maxCoeff()));
    const double oracle_delta = cfg.oracle_delta.value_or(cfg.delta);
    const int epoch_cap = cfg.resolved_epoch_cap(kappa, n);
    const int iter_cap = cfg.resolved_iter_cap(d);

    Rng rng(mix_seed(cfg.seed, 0x51e));
    ScoreContext scores{data, cfg, oracle_delta};
    WeightVector w = WeightVector::uniform(n);
    EpochTrace trace;

    const auto lambda_of = [&](const WeightVector& wv) {
        auto matmat = [&](const Eigen::MatrixXd& V) { return weighted_cov_matmat(data, wv, V); };
        return estimate_spectral_norm_block(matmat, d, 0.1, oracle_delta, rng).value;
    };

    for (int s = 0; s < epoch_cap; ++s) {
        const auto epoch_start = Clock::now();
        const double lambda0 = lambda_of(w);
        if (lambda0 <= 100.0 * gamma2) {
            return FilterResult{weighted_mean(data, w), w, std::move(trace)};
        }
        const double alpha = 1.0 / (1.1 * lambda0);
        WeightHistory history(alpha);
        EpochRecord rec;
        rec.lambda0 = lambda0;
        const double mass_before = w.mass();

        double lambda_t = lambda0;
        for (int t = 0; t < iter_cap; ++t) {
            if (t > 0) lambda_t = lambda_of(w);
            rec.lambda_history.push_back(lambda_t);
            rec.alpha_lambda.push_back(alpha * lambda_t);
            if (lambda_t <= (2.0 / 3.0) * lambda0) break;

            const ScoreReport report = scores.compute(history, w);
            const double weighted_sum = w.values().dot(report.tau);
            if (weighted_sum > lambda0 / 5.0) {
                w = one_d_filter(w, report.tau, 0.25).new_weights;
            }
            history.push(data, w); // feedback F_t = M(w_{t+1}) either way
            ++rec.iterations;
        }
        rec.lambda_end = lambda_t;
        rec.mass_removed = mass_before - w.mass();
        rec.seconds = seconds_since(epoch_start);
        trace.epochs.push_back(std::move(rec));
    }
    throw NonConvergence("bounded-cov filter: epoch cap exceeded before lambda <= 100*gamma2");
}

FilterResult sg_que_score_filter(const Dataset& data, const EstimatorConfig& cfg) {
    cfg.validate();
    if (cfg.mode != EstimatorMode::subgaussian) {
        throw ConfigError("sg_que_score_filter requires subgaussian mode");
    }
    const Eigen::Index n = data.n();
    const Eigen::Index d = data.d();
    const double xi = cfg.resolved_xi(n, d);
    const double threshold = cfg.xi_c * xi;
    const double kappa = cfg.kappa.value_or(
        std::max(1.0, data.samples().rowwise().norm().maxCoeff()));
    const double oracle_delta = cfg.oracle_delta.value_or(cfg.delta);
    const int epoch_cap = cfg.resolved_epoch_cap(kappa, n);
    const int iter_cap = cfg.resolved_iter_cap(d);

    Rng rng(mix_seed(cfg.seed, 0x5900d));
    ScoreContext scores{data, cfg, oracle_delta};
    WeightVector w = WeightVector::uniform(n);
    EpochTrace trace;

    // lambda tracks |M(w) - Id|: the power method on the shifted operator.
    const auto lambda_of = [&](const WeightVector& wv) {
        auto matmat = [&](const Eigen::MatrixXd& V) {
            return (weighted_cov_matmat(data, wv, V) - V).eval();
        };
        return estimate_spectral_norm_block(matmat, d, 0.1, oracle_delta, rng).value;
    };

    for (int s = 0; s < epoch_cap; ++s) {
        const auto epoch_start = Clock::now();
        const double lambda0 = lambda_of(w);
        if (lambda0 <= threshold) {
            return FilterResult{weighted_mean(data, w), w, std::move(trace)};
        }
        const double alpha = 1.0 / (1.1 * lambda0);
        WeightHistory history(alpha);
        EpochRecord rec;
        rec.lambda0 = lambda0;
        const double mass_before = w.mass();

        double lambda_t = lambda0;
        for (int t = 0; t < iter_cap; ++t) {
            if (t > 0) lambda_t = lambda_of(w);
            rec.lambda_history.push_back(lambda_t);
            rec.alpha_lambda.push_back(alpha * lambda_t);
            if (lambda_t <= 0.5 * lambda0) break;

            const ScoreReport report = scores.compute(history, w);
            const double q = report.q.value_or(0.0);
            if (q > lambda0 / (1.1 * 5.0)) {
                // Sort scores descending (ties by index ascending) and filter
                // only the smallest prefix carrying at least 2*eps weight.
                std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
                std::iota(order.begin(), order.end(), Eigen::Index{0});
                std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
                    if (report.tau[a] != report.tau[b]) return report.tau[a] > report.tau[b];
                    return a < b;
                });
                std::size_t m = 0;
                double cum = 0.0;
                while (m < order.size() && cum < 2.0 * cfg.eps) {
                    cum += w[order[m]];
                    ++m;
                }
                Eigen::VectorXd w_top(static_cast<Eigen::Index>(m));
                Eigen::VectorXd tau_top(static_cast<Eigen::Index>(m));
                for (std::size_t i = 0; i < m; ++i) {
                    w_top[static_cast<Eigen::Index>(i)] = w[order[i]];
                    tau_top[static_cast<Eigen::Index>(i)] = report.tau[order[i]];
                }
                const FilterOutcome out = one_d_filter(WeightVector(w_top), tau_top, 0.25);
                Eigen::VectorXd spliced = w.values();
                for (std::size_t i = 0; i < m; ++i) {
                    spliced[order[i]] = out.new_weights[static_cast<Eigen::Index>(i)];
                }
                w = WeightVector(std::move(spliced));
            }
            history.push(data, w); // feedback F_t = M(w_{t+1}) - Id
            ++rec.iterations;
        }
        rec.lambda_end = lambda_t;
        rec.mass_removed = mass_before - w.mass();
        rec.seconds = seconds_since(epoch_start);
        trace.epochs.push_back(std::move(rec));
    }
    throw NonConvergence("sub-Gaussian filter: epoch cap exceeded before lambda <= C*xi");
}

PipelineResult estimate_mean_pipeline(const Dataset& data, const EstimatorConfig& cfg) {
    cfg.validate();
    if (data.n() < 2) {
        throw DataError("pipeline needs at least two samples");
    }
    const Eigen::Index d = data.d();
    const double n = static_cast<double>(data.n());

    const double radius = cfg.mode == EstimatorMode::bounded_cov
                              ? std::sqrt(4.0 * static_cast<double>(d) * n / cfg.delta)
                              : std::sqrt(4.0 * static_cast<double>(d) * std::log(n / cfg.delta));

    Rng rng(mix_seed(cfg.seed, 0xb00c));
    auto [pruned, kept] = naive_prune(data, radius, cfg.delta / 4.0, rng);

    const Eigen::VectorXd center =
        pruned.samples().colwise().mean().transpose();
    Eigen::MatrixXd shifted = pruned.samples();
    shifted.rowwise() -= center.transpose();
    const Dataset centered(std::move(shifted));

    EstimatorConfig inner = cfg;
    inner.kappa = radius;
    inner.oracle_delta =
        cfg.delta / (4.0 * log_clamped(radius) * log_clamped(static_cast<double>(d)));

    FilterResult res = cfg.mode == EstimatorMode::bounded_cov ? que_score_filter(centered, inner)
                                                              : sg_que_score_filter(centered, inner);

    PipelineResult out;
    out.mu_hat = res.mu_hat + center;
    out.trace = std::move(res.trace);
    out.retained = pruned.n();
    out.seed = cfg.seed;
    out.mode = cfg.mode;
    out.oracle = cfg.oracle;
    return out;
}

std::string PipelineResult::to_json() const {
    std::ostringstream s;
    s.precision(17);
    s << "{\"mu_hat\": [";
    for (Eigen::Index i = 0; i < mu_hat.size(); ++i) {
        if (i) s << ", ";
        s << mu_hat[i];
    }
    s << "], \"epochs\": " << trace.epochs.size();
    s << ", \"retained\": " << retained;
    s << ", \"lambda_history\": [";
    const auto lams = trace.lambda_history();
    for (std::size_t i = 0; i < lams.size(); ++i) {
        if (i) s << ", ";
        s << lams[i];
    }
    s << "], \"seed\": " << seed;
    s << ", \"mode\": \"" << (mode == EstimatorMode::bounded_cov ? "bounded-cov" : "subgaussian")
      << "\"";
    s << ", \"oracle\": \"" << (oracle == OracleChoice::exact ? "exact" : "sketched") << "\"}";
    return s.str();
}

} // namespace que
