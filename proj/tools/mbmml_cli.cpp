// mbmml: Markov Blanket discovery with MML scores, plus the synthetic
// benchmark machinery around it. One binary, subcommands per task.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mbmml/mbmml.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

// Machine-readable provenance header on stderr: version, seed, config digest.
void log_header(std::uint64_t seed, const std::string& config_text) {
    std::fprintf(stderr, "{\"tool\":\"mbmml\",\"version\":\"%s\",\"seed\":%llu,\"config_digest\":\"%016llx\"}\n",
                 kVersion, static_cast<unsigned long long>(seed),
                 static_cast<unsigned long long>(mbmml::fnv1a(config_text)));
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 1; i < argc; ++i) {
        if (i > 1) s += ' ';
        s += argv[i];
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markov Blanket discovery using MML scores"};
    app.require_subcommand(1);

    // gen-net
    auto* gen = app.add_subcommand("gen-net", "generate a random Bayesian network");
    int gen_vars = 0, gen_fanin = 0, gen_arity = 2;
    double gen_alpha = 1.0;
    std::optional<std::uint64_t> gen_seed;
    std::string gen_out;
    gen->add_option("--vars", gen_vars, "number of variables")->required();
    gen->add_option("--max-fanin", gen_fanin, "maximum parents per node")->required();
    gen->add_option("--max-arity", gen_arity, "maximum states per variable")->required();
    gen->add_option("--gen-alpha", gen_alpha, "symmetric Dirichlet concentration for CPT rows");
    gen->add_option("--seed", gen_seed, "base seed (required)");
    gen->add_option("-o,--output", gen_out, "output network JSON path")->required();

    // sample
    auto* sample = app.add_subcommand("sample", "draw records from a network by ancestral sampling");
    std::string sample_net, sample_out;
    int sample_n = 0;
    std::optional<std::uint64_t> sample_seed;
    sample->add_option("--net", sample_net, "network JSON path")->required();
    sample->add_option("-n,--records", sample_n, "number of records")->required();
    sample->add_option("--seed", sample_seed, "base seed (required)");
    sample->add_option("-o,--output", sample_out, "output dataset CSV path")->required();

    // discover
    auto* discover = app.add_subcommand("discover", "learn Markov Blankets from a dataset");
    std::string disc_data, disc_method = "cpt", disc_target, disc_symmetry, disc_out;
    double disc_alpha = 1.0, disc_significance = 0.01;
    int disc_k = 100;
    bool disc_all = false;
    std::optional<std::uint64_t> disc_seed;
    int disc_jobs = 1;
    discover->add_option("--data", disc_data, "dataset CSV path")->required();
    discover->add_option("--method", disc_method, "cpt|nb|mbp|iamb")
        ->check(CLI::IsMember({"cpt", "nb", "mbp", "iamb"}));
    discover->add_option("--target", disc_target, "single target variable name");
    discover->add_flag("--all", disc_all, "discover every variable's MB");
    discover->add_option("--alpha", disc_alpha, "scoring Dirichlet concentration");
    discover->add_option("--symmetry", disc_symmetry, "union|intersection|none (default per method)")
        ->check(CLI::IsMember({"union", "intersection", "none"}));
    discover->add_option("--mbp-samples", disc_k, "MBP ensemble size K");
    discover->add_option("--significance", disc_significance, "IAMB significance level");
    discover->add_option("--seed", disc_seed, "base seed (required)");
    discover->add_option("-o,--output", disc_out, "output MB set JSON path")->required();
    discover->add_option("--jobs", disc_jobs, "parallel per-target workers (0 = auto)");

    // count-mbp
    auto* count = app.add_subcommand("count-mbp", "count labeled Markov Blanket polytrees");
    int count_n = 0;
    count->add_option("--mb-size", count_n, "Markov Blanket size n")->required();

    // eval
    auto* evalc = app.add_subcommand("eval", "score learned blankets against a network's true MBs");
    std::string eval_truth, eval_learned, eval_out, eval_format = "csv";
    int eval_sample_size = 0;
    evalc->add_option("--truth", eval_truth, "ground-truth network JSON")->required();
    evalc->add_option("--learned", eval_learned, "learned MB set JSON")->required();
    evalc->add_option("-o,--output", eval_out, "output report path")->required();
    evalc->add_option("--format", eval_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    evalc->add_option("--sample-size", eval_sample_size, "sample size column value for the report");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a benchmark grid from a config file");
    std::string exp_config, exp_out;
    int exp_jobs = 1;
    exp->add_option("--config", exp_config, "experiment config JSON")->required();
    exp->add_option("-o,--outdir", exp_out, "output directory")->required();
    exp->add_option("--jobs", exp_jobs, "parallel workers per grid cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    const std::string config_text = join_args(argc, argv);
    try {
        if (*gen) {
            if (!gen_seed) throw CLI::ValidationError("--seed is required for gen-net");
            log_header(*gen_seed, config_text);
            mbmml::NetworkSpec spec{gen_vars, gen_fanin, gen_arity, gen_alpha, *gen_seed};
            const auto bn = mbmml::random_network(spec);
            mbmml::detail::write_file(gen_out, mbmml::network_to_json(bn));
        } else if (*sample) {
            if (!sample_seed) throw CLI::ValidationError("--seed is required for sample");
            log_header(*sample_seed, config_text);
            const auto bn = mbmml::network_from_json(mbmml::detail::read_file(sample_net));
            mbmml::Rng rng(mbmml::derive_seed(*sample_seed, {0x64617461ULL}));  // "data" stream
            const auto data = mbmml::ancestral_sample(bn, sample_n, rng);
            mbmml::detail::write_file(sample_out, mbmml::dataset_csv(data));
        } else if (*discover) {
            if (!disc_seed) throw CLI::ValidationError("--seed is required for discover");
            if (disc_all == !disc_target.empty())
                throw CLI::ValidationError("exactly one of --target or --all is required");
            log_header(*disc_seed, config_text);
            const auto data = mbmml::dataset_from_csv(mbmml::detail::read_file(disc_data));
            mbmml::SearchConfig sc;
            sc.model = mbmml::detail::model_from_name(disc_method);
            sc.prior.alpha = disc_alpha;
            sc.mbp_samples = disc_k;
            sc.significance = disc_significance;
            sc.seed = *disc_seed;
            sc.symmetry = disc_symmetry.empty()
                              ? mbmml::default_symmetry(sc.model)
                              : (disc_symmetry == "union"          ? mbmml::SymmetryMode::Union
                                 : disc_symmetry == "intersection" ? mbmml::SymmetryMode::Intersection
                                                                   : mbmml::SymmetryMode::None);
            if (disc_all) {
                const auto mbs = mbmml::discover_all(data, sc, disc_jobs);
                mbmml::detail::write_file(disc_out, mbmml::mbs_to_json(mbs, data.variables));
            } else {
                const int target = data.index_of(disc_target);
                mbmml::MarkovBlanketSet mbs;
                mbs.method = mbmml::to_string(sc.model);
                mbs.seed = sc.seed;
                mbs.alpha = sc.prior.alpha;
                mbs.symmetry = "none";  // single-target runs cannot be symmetry enforced
                char digest[17];
                std::snprintf(digest, sizeof digest, "%016llx",
                              static_cast<unsigned long long>(mbmml::fnv1a(mbmml::dataset_csv(data))));
                mbs.dataset_hash = digest;
                mbs.blankets.push_back(mbmml::discover_one(data, target, sc));
                mbmml::detail::write_file(disc_out, mbmml::mbs_to_json(mbs, data.variables));
            }
        } else if (*count) {
            std::cout << mbmml::count_mbp(count_n).get_str() << "\n";
        } else if (*evalc) {
            const auto bn = mbmml::network_from_json(mbmml::detail::read_file(eval_truth));
            const auto mbs =
                mbmml::mbs_from_json(mbmml::detail::read_file(eval_learned), bn.dag.variables());
            std::vector<double> ed, prec, rec;
            for (const auto& mb : mbs.blankets) {
                const auto truth = mbmml::markov_blanket_of(bn.dag, mb.target);
                const auto s = mbmml::score_mb(truth, mb);
                ed.push_back(static_cast<double>(s.edit_distance));
                prec.push_back(s.precision);
                rec.push_back(s.recall);
            }
            int max_fanin = 0;
            for (int i = 0; i < bn.dag.size(); ++i)
                max_fanin = std::max(max_fanin, static_cast<int>(bn.dag.parents(i).size()));
            const char* names[3] = {"edit_distance", "precision", "recall"};
            const std::vector<double>* cols[3] = {&ed, &prec, &rec};
            if (eval_format == "json") {
                nlohmann::ordered_json j;
                j["method"] = mbs.method;
                j["n_vars"] = bn.dag.size();
                j["max_fanin"] = max_fanin;
                j["sample_size"] = eval_sample_size;
                for (int m = 0; m < 3; ++m) {
                    const auto a = mbmml::aggregate(*cols[m]);
                    j[names[m]] = {{"mean", a.mean}, {"ci_half_width", a.ci_half_width},
                                   {"n_observations", a.n}};
                }
                mbmml::detail::write_file(eval_out, j.dump(2) + "\n");
            } else {
                std::string csv =
                    "method,n_vars,max_fanin,sample_size,metric,mean,ci_half_width,n_observations\n";
                for (int m = 0; m < 3; ++m) {
                    const auto a = mbmml::aggregate(*cols[m]);
                    csv += mbs.method + "," + std::to_string(bn.dag.size()) + "," +
                           std::to_string(max_fanin) + "," + std::to_string(eval_sample_size) + "," +
                           names[m] + "," + mbmml::detail::fixed6(a.mean) + "," +
                           mbmml::detail::fixed6(a.ci_half_width) + "," + std::to_string(a.n) + "\n";
                }
                mbmml::detail::write_file(eval_out, csv);
            }
        } else if (*exp) {
            const auto text = mbmml::detail::read_file(exp_config);
            const auto config = mbmml::ExperimentConfig::from_json(text);
            log_header(config.seed, text);
            mbmml::run_experiment(config, exp_out, exp_jobs);
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const mbmml::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
