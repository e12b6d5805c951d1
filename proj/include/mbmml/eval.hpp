#ifndef MBMML_EVAL_HPP
#define MBMML_EVAL_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbmml/common.hpp"
#include "mbmml/core.hpp"
#include "mbmml/io.hpp"
#include "mbmml/search.hpp"
#include "mbmml/synth.hpp"

namespace mbmml {

struct MbScore {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    double precision = 1.0;
    double recall = 1.0;
    int edit_distance = 0;
};

// 0/0 is defined as 1: an empty learned MB asserts nothing false.
inline MbScore score_mb(const MarkovBlanket& truth, const MarkovBlanket& learned) {
    if (truth.target != learned.target) throw StructureError("score_mb: target mismatch");
    MbScore s;
    for (int m : learned.members)
        truth.members.count(m) ? ++s.tp : ++s.fp;
    for (int m : truth.members)
        if (!learned.members.count(m)) ++s.fn;
    s.precision = (s.tp + s.fp) == 0 ? 1.0 : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    s.recall = (s.tp + s.fn) == 0 ? 1.0 : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
    s.edit_distance = s.fp + s.fn;
    return s;
}

struct Aggregate {
    double mean = 0.0;
    double ci_half_width = 0.0;  // 1.96 * sd / sqrt(m)
    int n = 0;
};

inline Aggregate aggregate(const std::vector<double>& values) {
    if (values.size() < 2) throw DataError("aggregate: need at least 2 values");
    Aggregate a;
    a.n = static_cast<int>(values.size());
    for (double v : values) a.mean += v;
    a.mean /= static_cast<double>(a.n);
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    const double sd = std::sqrt(ss / static_cast<double>(a.n - 1));
    a.ci_half_width = 1.96 * sd / std::sqrt(static_cast<double>(a.n));
    return a;
}

struct ExperimentConfig {
    int n_vars = 15;
    int max_fanin = 3;
    int max_arity = 3;
    double gen_alpha = 1.0;
    int n_networks = 3;
    int n_datasets = 3;
    std::vector<int> sample_sizes{100, 500, 2000, 5000};
    std::uint64_t seed = 0;
    std::vector<std::string> methods{"cpt", "nb"};
    double alpha = 1.0;  // scoring prior
    int mbp_samples = 100;
    double significance = 0.01;
    std::vector<double> alpha_sweep;       // optional scoring-alpha sweep (cpt)
    int alpha_sweep_sample_size = 500;

    static ExperimentConfig from_json(const std::string& text) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("experiment config parse error: ") + e.what());
        }
        ExperimentConfig c;
        try {
            c.n_vars = j.at("n_vars").get<int>();
            c.max_fanin = j.at("max_fanin").get<int>();
            c.max_arity = j.at("max_arity").get<int>();
            c.gen_alpha = j.value("gen_alpha", 1.0);
            c.n_networks = j.at("n_networks").get<int>();
            c.n_datasets = j.at("n_datasets").get<int>();
            c.sample_sizes = j.at("sample_sizes").get<std::vector<int>>();
            c.seed = j.at("seed").get<std::uint64_t>();
            c.methods = j.value("methods", c.methods);
            c.alpha = j.value("alpha", 1.0);
            c.mbp_samples = j.value("mbp_samples", 100);
            c.significance = j.value("significance", 0.01);
            c.alpha_sweep = j.value("alpha_sweep", std::vector<double>{});
            c.alpha_sweep_sample_size = j.value("alpha_sweep_sample_size", 500);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("experiment config field error: ") + e.what());
        }
        return c;
    }
};

namespace detail {

inline ModelKind model_from_name(const std::string& name) {
    if (name == "cpt") return ModelKind::Cpt;
    if (name == "nb") return ModelKind::Nb;
    if (name == "mbp") return ModelKind::Mbp;
    if (name == "iamb") return ModelKind::Iamb;
    throw DataError("unknown method '" + name + "'");
}

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

struct CellResult {
    std::string method;
    int network = 0;
    int dataset = 0;
    int sample_size = 0;
    bool ok = true;
    std::string error;
    double seconds = 0.0;
    // per-target metric values, paired with the true MB size of the target
    std::vector<std::tuple<int, double, double, double>> rows;  // (true_mb_size, ed, precision, recall)
};

}  // namespace detail

// The benchmark grid: for each (network, dataset, sample size, method),
// generate, discover, score against the ground-truth blankets and aggregate.
// Writes report.csv, mb_size_breakdown.csv, cells.csv and (when a sweep is
// configured) alpha_sweep.csv into outdir.
inline void run_experiment(const ExperimentConfig& config, const std::string& outdir, int jobs = 1) {
    namespace fs = std::filesystem;
    fs::create_directories(outdir);

    std::vector<BayesianNetwork> networks;
    std::vector<std::vector<MarkovBlanket>> truths;
    for (int i = 0; i < config.n_networks; ++i) {
        NetworkSpec spec{config.n_vars, config.max_fanin, config.max_arity, config.gen_alpha,
                         derive_seed(config.seed, {1, static_cast<std::uint64_t>(i)})};
        networks.push_back(random_network(spec));
        std::vector<MarkovBlanket> truth;
        for (int v = 0; v < config.n_vars; ++v)
            truth.push_back(markov_blanket_of(networks.back().dag, v));
        truths.push_back(std::move(truth));
    }

    std::vector<detail::CellResult> cells;
    auto run_cell = [&](int net, int ds, int size, const std::string& method) {
        detail::CellResult cell;
        cell.method = method;
        cell.network = net;
        cell.dataset = ds;
        cell.sample_size = size;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            Rng rng(derive_seed(config.seed, {2, static_cast<std::uint64_t>(net),
                                              static_cast<std::uint64_t>(ds),
                                              static_cast<std::uint64_t>(size)}));
            const auto data = ancestral_sample(networks[static_cast<std::size_t>(net)], size, rng);
            SearchConfig sc;
            sc.model = detail::model_from_name(method);
            sc.prior.alpha = config.alpha;
            sc.mbp_samples = config.mbp_samples;
            sc.significance = config.significance;
            sc.symmetry = default_symmetry(sc.model);
            sc.seed = derive_seed(config.seed, {3, static_cast<std::uint64_t>(net),
                                                static_cast<std::uint64_t>(ds),
                                                static_cast<std::uint64_t>(size)});
            const auto learned = discover_all(data, sc, jobs);
            for (int v = 0; v < config.n_vars; ++v) {
                const auto& truth = truths[static_cast<std::size_t>(net)][static_cast<std::size_t>(v)];
                const auto s = score_mb(truth, learned.blankets[static_cast<std::size_t>(v)]);
                cell.rows.emplace_back(static_cast<int>(truth.members.size()),
                                       static_cast<double>(s.edit_distance), s.precision, s.recall);
            }
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
        cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        cells.push_back(std::move(cell));
    };

    for (int net = 0; net < config.n_networks; ++net)
        for (int ds = 0; ds < config.n_datasets; ++ds)
            for (int size : config.sample_sizes)
                for (const auto& method : config.methods) run_cell(net, ds, size, method);

    // report.csv: one row per (method, sample size, metric), per-target pooling.
    std::string report = "method,n_vars,max_fanin,sample_size,metric,mean,ci_half_width,n_observations\n";
    const char* metric_names[3] = {"edit_distance", "precision", "recall"};
    for (const auto& method : config.methods) {
        for (int size : config.sample_sizes) {
            std::vector<double> pooled[3];
            for (const auto& cell : cells) {
                if (cell.method != method || cell.sample_size != size || !cell.ok) continue;
                for (const auto& [mbsize, ed, prec, rec] : cell.rows) {
                    (void)mbsize;
                    pooled[0].push_back(ed);
                    pooled[1].push_back(prec);
                    pooled[2].push_back(rec);
                }
            }
            for (int m = 0; m < 3; ++m) {
                if (pooled[m].size() < 2) continue;
                const auto a = aggregate(pooled[m]);
                report += method + "," + std::to_string(config.n_vars) + "," +
                          std::to_string(config.max_fanin) + "," + std::to_string(size) + "," +
                          metric_names[m] + "," + detail::fixed6(a.mean) + "," +
                          detail::fixed6(a.ci_half_width) + "," + std::to_string(a.n) + "\n";
            }
        }
    }
    detail::write_file(outdir + "/report.csv", report);

    // mb_size_breakdown.csv: edit distance bucketed by true MB size.
    std::string breakdown =
        "method,n_vars,max_fanin,sample_size,mb_size_bucket,metric,mean,ci_half_width,n_observations\n";
    for (const auto& method : config.methods) {
        for (int size : config.sample_sizes) {
            std::map<int, std::vector<double>> buckets;
            for (const auto& cell : cells) {
                if (cell.method != method || cell.sample_size != size || !cell.ok) continue;
                for (const auto& [mbsize, ed, prec, rec] : cell.rows) {
                    (void)prec;
                    (void)rec;
                    buckets[mbsize].push_back(ed);
                }
            }
            for (const auto& [bucket, values] : buckets) {
                if (values.size() < 2) continue;
                const auto a = aggregate(values);
                breakdown += method + "," + std::to_string(config.n_vars) + "," +
                             std::to_string(config.max_fanin) + "," + std::to_string(size) + "," +
                             std::to_string(bucket) + ",edit_distance," + detail::fixed6(a.mean) + "," +
                             detail::fixed6(a.ci_half_width) + "," + std::to_string(a.n) + "\n";
            }
        }
    }
    detail::write_file(outdir + "/mb_size_breakdown.csv", breakdown);

    // cells.csv: per-cell status and timing.
    std::string cellcsv = "method,network,dataset,sample_size,status,seconds,error\n";
    for (const auto& cell : cells)
        cellcsv += cell.method + "," + std::to_string(cell.network) + "," + std::to_string(cell.dataset) +
                   "," + std::to_string(cell.sample_size) + "," + (cell.ok ? "ok" : "failed") + "," +
                   detail::fixed6(cell.seconds) + "," + cell.error + "\n";
    detail::write_file(outdir + "/cells.csv", cellcsv);

    // alpha_sweep.csv: MBMML+CPT under swept scoring alphas on the first network.
    if (!config.alpha_sweep.empty()) {
        std::string sweep = "alpha,sample_size,mean_mb_size,mean_edit_distance,mean_precision,mean_recall\n";
        Rng rng(derive_seed(config.seed, {4}));
        const auto data =
            ancestral_sample(networks.front(), config.alpha_sweep_sample_size, rng);
        for (double alpha : config.alpha_sweep) {
            SearchConfig sc;
            sc.model = ModelKind::Cpt;
            sc.prior.alpha = alpha;
            sc.symmetry = default_symmetry(sc.model);
            sc.seed = derive_seed(config.seed, {5});
            const auto learned = discover_all(data, sc, jobs);
            double mbsize = 0.0, ed = 0.0, prec = 0.0, rec = 0.0;
            for (int v = 0; v < config.n_vars; ++v) {
                const auto s = score_mb(truths.front()[static_cast<std::size_t>(v)],
                                        learned.blankets[static_cast<std::size_t>(v)]);
                mbsize += static_cast<double>(learned.blankets[static_cast<std::size_t>(v)].members.size());
                ed += static_cast<double>(s.edit_distance);
                prec += s.precision;
                rec += s.recall;
            }
            const double n = static_cast<double>(config.n_vars);
            sweep += detail::format_double(alpha) + "," + std::to_string(config.alpha_sweep_sample_size) +
                     "," + detail::fixed6(mbsize / n) + "," + detail::fixed6(ed / n) + "," +
                     detail::fixed6(prec / n) + "," + detail::fixed6(rec / n) + "\n";
        }
        detail::write_file(outdir + "/alpha_sweep.csv", sweep);
    }
}

}  // namespace mbmml

#endif
