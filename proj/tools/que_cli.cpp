// que: command-line harness for data generation, robust mean estimation,
// outlier scoring, ROCAUC evaluation, and runtime benchmarks.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "que/dataset.hpp"
#include "que/robust_mean.hpp"
#include "que/scoring.hpp"
#include "que/synthetic.hpp"

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_dataset(const que::Dataset& data, const std::string& path) {
    if (has_suffix(path, ".bin") || has_suffix(path, ".qued")) {
        data.save_binary(path);
    } else {
        data.save_csv(path);
    }
}

que::Dataset read_dataset(const std::string& path, bool header) {
    if (has_suffix(path, ".bin") || has_suffix(path, ".qued")) {
        return que::Dataset::load_binary(path);
    }
    return que::Dataset::load_csv(path, header);
}

void write_scores(const Eigen::VectorXd& scores, std::ostream& out) {
    out << "index,score\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        out << i << ',' << scores[i] << '\n';
    }
}

Eigen::VectorXd read_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw que::IoError("cannot open '" + path + "' for reading");
    }
    std::vector<double> vals;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("index,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        const auto pos = line.find_last_of(',');
        const std::string field = pos == std::string::npos ? line : line.substr(pos + 1);
        try {
            vals.push_back(std::stod(field));
        } catch (const std::exception&) {
            throw que::IoError(path + ": cannot parse score '" + field + "'");
        }
    }
    if (vals.empty()) {
        throw que::IoError(path + ": no scores");
    }
    return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

int run(int argc, char** argv) {
    CLI::App app{"QUE robust statistics toolkit"};
    app.require_subcommand(1);

    if (const char* threads = std::getenv("QUE_THREADS")) {
        const int t = std::atoi(threads);
        if (t > 0) Eigen::setNbThreads(t);
    }

    // gen ------------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a synthetic or eps-corrupted dataset");
    long long gen_d = 0, gen_n = 0;
    double gen_eps = 0.0, gen_c = 1.0, gen_sigma = 0.2;
    int gen_k = 1;
    std::uint64_t gen_seed = 0;
    std::string gen_adversary = "synthetic", gen_out, gen_labels_out;
    gen->add_option("--d", gen_d, "dimension")->required();
    gen->add_option("--n", gen_n, "sample count")->required();
    gen->add_option("--eps", gen_eps, "corruption fraction")->required();
    gen->add_option("--k", gen_k, "corruption directions (synthetic adversary)");
    gen->add_option("--adversary", gen_adversary,
                    "synthetic | directional | norm-inflation | replace-remove")
        ->check(CLI::IsMember({"synthetic", "directional", "norm-inflation", "replace-remove"}));
    gen->add_option("--C", gen_c, "cluster magnitude (synthetic)");
    gen->add_option("--sigma", gen_sigma, "cluster spread (synthetic)");
    gen->add_option("--seed", gen_seed, "RNG seed")->required();
    gen->add_option("--out", gen_out, "output path (.bin for binary, else CSV)")->required();
    gen->add_option("--labels-out", gen_labels_out, "labels CSV path");

    // estimate -------------------------------------------------------------
    auto* est = app.add_subcommand("estimate", "robust mean estimation pipeline");
    std::string est_input, est_mode = "bounded-cov", est_oracle = "sketched", est_json_out;
    double est_eps = 0.1, est_delta = 0.05;
    double est_gamma1 = -1.0, est_gamma2 = -1.0;
    std::uint64_t est_seed = 0;
    bool est_header = false, est_seed_given = false;
    est->add_option("--input", est_input, "dataset path")->required();
    est->add_option("--mode", est_mode)->check(CLI::IsMember({"bounded-cov", "subgaussian"}));
    est->add_option("--eps", est_eps, "corruption fraction upper bound");
    est->add_option("--delta", est_delta, "failure probability");
    est->add_option("--oracle", est_oracle)->check(CLI::IsMember({"exact", "sketched"}));
    est->add_option("--gamma1", est_gamma1, "override gamma1");
    est->add_option("--gamma2", est_gamma2, "override gamma2");
    est->add_flag("--header", est_header, "skip one CSV header line");
    est->add_option("--seed", est_seed, "RNG seed")->each([&](const std::string&) {
        est_seed_given = true;
    });
    est->add_option("--json-out", est_json_out, "write the result record as JSON");

    // score ----------------------------------------------------------------
    auto* score = app.add_subcommand("score", "per-sample outlier scores");
    std::string sc_input, sc_method = "que", sc_whiten = "none", sc_whiten_ref, sc_out,
                sc_whiten_power = "sqrt";
    double sc_alpha = 4.0;
    bool sc_approx = false, sc_header = false;
    std::uint64_t sc_seed = 0;
    score->add_option("--input", sc_input)->required();
    score->add_option("--method", sc_method)->check(CLI::IsMember({"que", "l2", "spectral"}));
    score->add_option("--alpha", sc_alpha, "QUE exponent strength");
    score->add_flag("--approx", sc_approx, "Chebyshev + sketch fast path");
    score->add_option("--whiten", sc_whiten, "none | exact | topk:<k>");
    score->add_option("--whiten-ref", sc_whiten_ref, "reference dataset for whitening");
    score->add_option("--whiten-power", sc_whiten_power, "sqrt (inverse square root) | inv")
        ->check(CLI::IsMember({"sqrt", "inv"}));
    score->add_flag("--header", sc_header, "skip one CSV header line");
    score->add_option("--seed", sc_seed, "RNG seed");
    score->add_option("--out", sc_out, "scores CSV path (stdout if omitted)");

    // eval -----------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "ROCAUC of scores against labels");
    std::string ev_scores, ev_labels, ev_ties = "half";
    eval->add_option("--scores", ev_scores)->required();
    eval->add_option("--labels", ev_labels)->required();
    eval->add_option("--ties", ev_ties)->check(CLI::IsMember({"half", "geq"}));

    // bench ----------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "pipeline wall time per n");
    long long bn_d = 64;
    double bn_eps = 0.1;
    std::string bn_oracle = "sketched";
    std::vector<long long> bn_nlist;
    int bn_repeats = 3;
    std::uint64_t bn_seed = 0;
    bench->add_option("--d", bn_d);
    bench->add_option("--n-list", bn_nlist, "sample counts")->required()->delimiter(',');
    bench->add_option("--eps", bn_eps);
    bench->add_option("--oracle", bn_oracle)->check(CLI::IsMember({"exact", "sketched"}));
    bench->add_option("--repeats", bn_repeats);
    bench->add_option("--seed", bn_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // usage errors exit 2
    }

    if (gen->parsed()) {
        que::Rng rng(gen_seed);
        que::GeneratedData g = [&] {
            if (gen_adversary == "synthetic") {
                que::CorruptionSpec spec;
                spec.eps = gen_eps;
                spec.k = gen_k;
                spec.magnitude = gen_c;
                spec.sigma = gen_sigma;
                return que::gen_synthetic(gen_d, gen_n, spec, rng);
            }
            const que::Adversary adv = gen_adversary == "directional"
                                           ? que::Adversary::directional_mixture
                                           : gen_adversary == "norm-inflation"
                                                 ? que::Adversary::norm_inflation
                                                 : que::Adversary::replace_remove;
            return que::gen_eps_corrupted(gen_d, gen_n, gen_eps, adv, rng);
        }();
        write_dataset(g.data, gen_out);
        if (!gen_labels_out.empty()) {
            que::save_labels_csv(g.labels, gen_labels_out);
        }
        return 0;
    }

    if (est->parsed()) {
        if (!est_json_out.empty() && !est_seed_given) {
            throw que::ConfigError("--seed is required when --json-out is used");
        }
        const que::Dataset data = read_dataset(est_input, est_header);
        que::EstimatorConfig cfg;
        cfg.eps = est_eps;
        cfg.delta = est_delta;
        cfg.mode = est_mode == "bounded-cov" ? que::EstimatorMode::bounded_cov
                                             : que::EstimatorMode::subgaussian;
        cfg.oracle = est_oracle == "exact" ? que::OracleChoice::exact : que::OracleChoice::sketched;
        cfg.seed = est_seed;
        if (est_gamma1 > 0.0) cfg.gamma1 = est_gamma1;
        if (est_gamma2 > 0.0) cfg.gamma2 = est_gamma2;
        const que::PipelineResult res = que::estimate_mean_pipeline(data, cfg);
        std::cout.precision(10);
        std::cout << "mu_hat:";
        for (Eigen::Index i = 0; i < res.mu_hat.size(); ++i) std::cout << ' ' << res.mu_hat[i];
        std::cout << "\nepochs: " << res.trace.epochs.size() << "\nretained: " << res.retained
                  << "\nlambda:";
        for (double l : res.trace.lambda_history()) std::cout << ' ' << l;
        std::cout << '\n';
        if (!est_json_out.empty()) {
            std::ofstream out(est_json_out);
            if (!out) throw que::IoError("cannot open '" + est_json_out + "' for writing");
            out << res.to_json() << '\n';
        }
        return 0;
    }

    if (score->parsed()) {
        que::Dataset data = read_dataset(sc_input, sc_header);
        if (sc_whiten != "none") {
            if (sc_whiten_ref.empty()) {
                throw que::ConfigError("--whiten requires --whiten-ref");
            }
            const que::Dataset ref = read_dataset(sc_whiten_ref, sc_header);
            que::WhiteningKind kind = que::WhiteningKind::exact;
            int k = 0;
            if (sc_whiten.rfind("topk:", 0) == 0) {
                kind = que::WhiteningKind::topk;
                k = std::stoi(sc_whiten.substr(5));
            } else if (sc_whiten != "exact") {
                throw que::ConfigError("--whiten must be none, exact, or topk:<k>");
            }
            const double power = sc_whiten_power == "inv" ? -1.0 : -0.5;
            data = que::apply_whitening(que::fit_whitening(ref, kind, k, 1e-6, power), data);
        }
        que::Rng rng(sc_seed);
        Eigen::VectorXd scores;
        if (sc_method == "l2") {
            scores = que::baseline_l2(data);
        } else if (sc_method == "spectral") {
            scores = que::baseline_spectral(data, rng);
        } else {
            que::QueScoreConfig qcfg;
            qcfg.mode = sc_approx ? que::ScoreMode::approx : que::ScoreMode::exact;
            scores = que::que_scores(data, sc_alpha, qcfg, rng);
        }
        if (sc_out.empty()) {
            write_scores(scores, std::cout);
        } else {
            std::ofstream out(sc_out);
            if (!out) throw que::IoError("cannot open '" + sc_out + "' for writing");
            write_scores(scores, out);
        }
        return 0;
    }

    if (eval->parsed()) {
        que::LabeledScores ls;
        ls.tau = read_scores(ev_scores);
        ls.labels = que::load_labels_csv(ev_labels);
        const double auc = que::rocauc(
            ls, ev_ties == "half" ? que::TieConvention::half : que::TieConvention::geq);
        std::cout.precision(10);
        std::cout << auc << '\n';
        return 0;
    }

    if (bench->parsed()) {
        std::vector<long long> ns = bn_nlist;
        std::sort(ns.begin(), ns.end());
        ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
        std::cout << "n,median_seconds\n";
        for (long long n : ns) {
            std::vector<double> times;
            for (int rep = 0; rep < bn_repeats; ++rep) {
                que::Rng rng(bn_seed + static_cast<std::uint64_t>(rep));
                const que::GeneratedData g = que::gen_eps_corrupted(
                    bn_d, n, bn_eps, que::Adversary::directional_mixture, rng);
                que::EstimatorConfig cfg;
                cfg.eps = bn_eps;
                cfg.mode = que::EstimatorMode::bounded_cov;
                cfg.oracle = bn_oracle == "exact" ? que::OracleChoice::exact
                                                  : que::OracleChoice::sketched;
                cfg.seed = bn_seed + static_cast<std::uint64_t>(rep);
                const auto start = std::chrono::steady_clock::now();
                (void)que::estimate_mean_pipeline(g.data, cfg);
                times.push_back(
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count());
            }
            std::sort(times.begin(), times.end());
            std::cout << n << ',' << times[times.size() / 2] << '\n';
        }
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const que::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const que::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
