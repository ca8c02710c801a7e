#include "cli_app.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ils/analytics.hpp"
#include "ils/error.hpp"
#include "ils/estimators.hpp"
#include "ils/experiments.hpp"
#include "ils/linalg.hpp"
#include "ils/reduction.hpp"

namespace ils::cli {

namespace {

// Triangular factor plus the map from an observation to ytilde.
struct Problem {
    UpperTriangular r;
    std::optional<DenseMatrix> q1;  // set when the input was a general A

    std::vector<double> reduce_observation(const std::vector<double>& y) const {
        if (!q1) {
            if (y.size() != r.size()) throw DomainError("--y has " + std::to_string(y.size()) + " entries, expected " +
                                                        std::to_string(r.size()));
            return y;
        }
        if (y.size() != q1->rows())
            throw DomainError("--y has " + std::to_string(y.size()) + " entries, expected " +
                              std::to_string(q1->rows()));
        std::vector<double> yt(q1->cols(), 0.0);
        for (std::size_t j = 0; j < q1->cols(); ++j)
            for (std::size_t i = 0; i < q1->rows(); ++i) yt[j] += (*q1)(i, j) * y[i];
        return yt;
    }
};

struct MatrixInput {
    std::string r_path;
    std::string a_path;

    void add_to(CLI::App* sub) {
        auto* r = sub->add_option("--r", r_path, "upper triangular R (matrix text file)");
        auto* a = sub->add_option("--a", a_path, "general model matrix A, QR-factorized first");
        r->excludes(a);
    }

    Problem load() const {
        if (r_path.empty() && a_path.empty()) throw CLI::RequiredError("--r or --a");
        if (!r_path.empty()) return {UpperTriangular(load_matrix(r_path)), std::nullopt};
        auto qr = qr_factorize(load_matrix(a_path));
        return {std::move(qr.r), std::move(qr.q1)};
    }
};

std::vector<double> load_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    auto v = read_vector(in);
    if (v.empty()) throw IoError(path + " holds no vector");
    return v;
}

// Writes to --out when given, else to the console stream.
void emit(const std::string& out_path, std::ostream& console, const std::function<void(std::ostream&)>& body) {
    if (out_path.empty()) {
        body(console);
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw IoError("cannot open " + out_path + " for writing");
    body(f);
    if (!f) throw IoError("failed writing " + out_path);
}

void write_ints(std::ostream& out, std::span<const std::int64_t> v) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
    out << '\n';
}

std::string join_indices_one_based(const std::vector<std::size_t>& idx) {
    std::string s;
    for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? ";" : "") + std::to_string(idx[i] + 1);
    return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Integer least squares toolkit: reduction, Babai and sphere decoding, success probability", "ils"};
    app.require_subcommand(1);

    std::string out_path;
    double delta = kDefaultDelta;
    double sigma = 0.0;
    std::optional<double> beta;
    std::string y_path;

    // reduce
    MatrixInput reduce_in;
    std::string reduce_method = "lll";
    auto* reduce = app.add_subcommand("reduce", "LLL-reduce R (or the R factor of A)");
    reduce_in.add_to(reduce);
    reduce->add_option("--delta", delta, "Lovasz parameter in (1/4, 1]");
    reduce->add_option("--method", reduce_method, "lll or permute")->check(CLI::IsMember({"lll", "permute"}));
    reduce->add_option("--out", out_path, "output file");

    // babai
    MatrixInput babai_in;
    auto* babai = app.add_subcommand("babai", "nearest-plane (Babai) estimate");
    babai_in.add_to(babai);
    babai->add_option("--y", y_path, "observation vector file")->required();
    babai->add_option("--out", out_path, "output file");

    // sphere
    MatrixInput sphere_in;
    auto* sphere = app.add_subcommand("sphere", "exact ILS solution by depth-first search");
    sphere_in.add_to(sphere);
    sphere->add_option("--y", y_path, "observation vector file")->required();
    sphere->add_option("--beta", beta, "initial search radius");
    sphere->add_option("--out", out_path, "output file");

    // prob
    MatrixInput prob_in;
    auto* prob = app.add_subcommand("prob", "success probability of the Babai estimate");
    prob_in.add_to(prob);
    prob->add_option("--sigma", sigma, "noise standard deviation")->required();
    prob->add_option("--out", out_path, "output file");

    // bounds
    MatrixInput bounds_in;
    auto* bounds = app.add_subcommand("bounds", "success probability with its lower and upper bounds (CSV row)");
    bounds_in.add_to(bounds);
    bounds->add_option("--sigma", sigma, "noise standard deviation")->required();
    bounds->add_option("--out", out_path, "output file");

    // complexity
    MatrixInput cx_in;
    auto* complexity = app.add_subcommand("complexity", "volume estimate of the search node count");
    cx_in.add_to(complexity);
    complexity->add_option("--beta", beta, "search radius")->required();
    complexity->add_option("--out", out_path, "output file");

    // experiment
    ExperimentConfig cfg;
    std::string config_path, kind = "probability", methods_csv, sigma_csv, delta_csv, summary_path;
    int case_id = 1;
    std::size_t n = 20, runs = 200, trials = 0, threads = 0;
    std::uint64_t seed = 0;
    bool serial = false;
    auto* experiment = app.add_subcommand("experiment", "Monte-Carlo harness over random models (CSV)");
    auto* o_config = experiment->add_option("--config", config_path, "key=value configuration file");
    experiment->add_option("--kind", kind, "probability, empirical or complexity")
        ->check(CLI::IsMember({"probability", "empirical", "complexity"}));
    auto* o_case = experiment->add_option("--case", case_id, "model case 1, 2 or 3");
    auto* o_n = experiment->add_option("--n", n, "dimension");
    auto* o_sigma = experiment->add_option("--sigma", sigma_csv, "comma-separated sigma grid");
    auto* o_delta = experiment->add_option("--delta", delta_csv, "comma-separated delta grid");
    auto* o_runs = experiment->add_option("--runs", runs, "number of random models");
    auto* o_trials = experiment->add_option("--trials", trials, "noise draws per run (empirical kind)");
    auto* o_methods = experiment->add_option("--methods", methods_csv, "subset of QR,SQRD,VBLAST,LLL-permute,LLL");
    auto* o_seed = experiment->add_option("--seed", seed, "master seed (default: $ILS_SEED or 0)");
    experiment->add_option("--beta", beta, "fixed radius for the complexity kind (default: Babai residual)");
    experiment->add_option("--summary", summary_path, "also write per-cell averages to this file");
    experiment->add_option("--threads", threads, "OpenMP thread count (0: runtime default)");
    experiment->add_flag("--serial", serial, "run the serial reference path");
    experiment->add_option("--out", out_path, "output file");

    if (argc <= 1) {
        err << app.help();
        return kUsage;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (reduce->parsed()) {
            const Problem p = reduce_in.load();
            const ReducedBasis rb = reduce_method == "lll" ? lll_reduce(p.r, delta) : lll_permute_only(p.r, delta);
            emit(out_path, out, [&](std::ostream& o) {
                write_matrix(o, rb.r_bar.dense());
                write_matrix(o, rb.z.to_dense());
                o << trace_json(rb) << '\n';
            });
        } else if (babai->parsed()) {
            const Problem p = babai_in.load();
            const IlsInstance inst(p.r, p.reduce_observation(load_vector(y_path)));
            const auto x = babai_point(inst);
            emit(out_path, out, [&](std::ostream& o) { write_ints(o, x); });
        } else if (sphere->parsed()) {
            const Problem p = sphere_in.load();
            const IlsInstance inst(p.r, p.reduce_observation(load_vector(y_path)));
            SphereOptions opts;
            opts.initial_radius = beta;
            const SphereResult res = sphere_decode(inst, opts);
            emit(out_path, out, [&](std::ostream& o) {
                if (!res.found) {
                    o << "no lattice point within radius\n";
                } else {
                    write_ints(o, res.solution);
                    o << "residual " << format_real(res.residual_norm) << '\n';
                }
                o << "nodes " << res.nodes_total << '\n';
            });
        } else if (prob->parsed()) {
            const Problem p = prob_in.load();
            const Probability pr = log_success_probability(p.r, sigma);
            emit(out_path, out, [&](std::ostream& o) {
                o << format_real(pr.value());
                if (pr.underflow()) o << " underflow log_p_b=" << format_real(pr.log_value);
                o << '\n';
            });
        } else if (bounds->parsed()) {
            const Problem p = bounds_in.load();
            const BoundsReport b = compute_bounds(p.r, sigma);
            emit(out_path, out, [&](std::ostream& o) {
                o << b.n << ',' << format_real(b.sigma) << ',' << format_real(b.p_b) << ','
                  << format_real(b.chi2_lower) << ',' << format_real(b.beta1) << ',' << format_real(b.beta2) << ','
                  << format_real(b.beta3) << ',' << join_indices_one_based(b.block_indices) << '\n';
            });
        } else if (complexity->parsed()) {
            const Problem p = cx_in.load();
            const ComplexityEstimate c = complexity_estimate(p.r, *beta);
            emit(out_path, out, [&](std::ostream& o) {
                o << format_real(c.zeta_hat);
                if (c.overflow) o << " overflow log_zeta_hat=" << format_real(c.log_zeta_hat);
                o << '\n';
                write_vector(o, c.per_level_terms);
            });
        } else if (experiment->parsed()) {
            cfg.seed = default_seed();
            if (o_config->count()) {
                std::ifstream in(config_path);
                if (!in) throw IoError("cannot open " + config_path);
                cfg = parse_config(in, cfg);
            }
            if (o_case->count()) cfg.case_id = case_id;
            if (o_n->count()) cfg.n = n;
            if (o_sigma->count()) cfg.sigma_grid = parse_real_list(sigma_csv);
            if (o_delta->count()) cfg.delta_grid = parse_real_list(delta_csv);
            if (o_runs->count()) cfg.runs = runs;
            if (o_trials->count()) cfg.trials_per_run = trials;
            if (o_methods->count()) cfg.methods = parse_method_list(methods_csv);
            if (o_seed->count()) cfg.seed = seed;
            cfg.validate();
#ifdef _OPENMP
            if (threads > 0) omp_set_num_threads(static_cast<int>(threads));
#endif
            const Execution exec = serial ? Execution::Serial : Execution::Parallel;
            std::vector<ExperimentRecord> records;
            if (kind == "probability") {
                records = run_probability_experiment(cfg, exec);
            } else if (kind == "empirical") {
                records = run_empirical_success(cfg, exec);
            } else {
                BetaRule rule;
                if (beta) rule = {BetaRule::Kind::Fixed, *beta};
                records = run_complexity_experiment(cfg, rule, exec);
            }
            emit(out_path, out, [&](std::ostream& o) { emit_csv(records, o); });
            if (!summary_path.empty()) {
                const auto rows = summarize(records);
                emit(summary_path, out, [&](std::ostream& o) { emit_summary_csv(rows, o); });
            }
        }
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumeric;
    }
    return kOk;
}

}  // namespace ils::cli
