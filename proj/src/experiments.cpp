#include "ils/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "ils/analytics.hpp"
#include "ils/error.hpp"
#include "ils/estimators.hpp"
#include "ils/generators.hpp"
#include "ils/reduction.hpp"

namespace ils {

namespace {

constexpr Method kAllMethods[] = {Method::Qr, Method::Sqrd, Method::Vblast, Method::LllPermute, Method::Lll};

// Relative slack below which two probabilities count as equal in decrease tallies.
constexpr double kDecreaseSlack = 1e-12;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_real(const std::string& s) {
    const std::string t = trim(s);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0') throw DomainError("not a number: '" + t + "'");
    return v;
}

std::int64_t parse_int(const std::string& s) {
    const std::string t = trim(s);
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || *end != '\0') throw DomainError("not an integer: '" + t + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    const std::string t = trim(s);
    char* end = nullptr;
    if (t.empty() || t[0] == '-') throw DomainError("not an unsigned integer: '" + t + "'");
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (*end != '\0') throw DomainError("not an unsigned integer: '" + t + "'");
    return v;
}

// ---------------------------------------------------------------------------
// One transformed ILS problem per (method, delta).

struct Transformed {
    Method method = Method::Qr;
    double delta = 0.0;
    DenseMatrix q1;
    UpperTriangular r;
    std::vector<std::size_t> perm;       // empty: identity
    std::optional<ReducedBasis> reduced;  // LLL variants

    // ytilde for an observation y of the original model.
    std::vector<double> transform(std::span<const double> y) const {
        std::vector<double> yt(q1.cols(), 0.0);
        for (std::size_t j = 0; j < q1.cols(); ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < q1.rows(); ++i) s += q1(i, j) * y[i];
            yt[j] = s;
        }
        if (reduced) apply_reflections(reduced->trace, yt);
        return yt;
    }

    // Estimate in the transformed coordinates back to the original x.
    IntVector to_original(const IntVector& z) const {
        IntVector w = reduced ? reduced->z.apply(z) : z;
        if (perm.empty()) return w;
        IntVector x(w.size());
        for (std::size_t j = 0; j < perm.size(); ++j) x[perm[j]] = w[j];
        return x;
    }

    std::int64_t permutations() const { return reduced ? reduced->trace.permutation_count : 0; }
};

DenseMatrix make_model(const ExperimentConfig& cfg, RngStream& rng) {
    switch (cfg.case_id) {
        case 1: return generate_case1(cfg.n, rng);
        case 2: return generate_case2(cfg.n, rng);
        case 3: return generate_case3(cfg.n, rng).a;
        default: throw DomainError("case must be 1, 2 or 3");
    }
}

std::vector<Transformed> build_transforms(const ExperimentConfig& cfg, const DenseMatrix& a) {
    std::vector<Transformed> out;
    const QrFactors qr = qr_factorize(a);
    for (Method m : kAllMethods) {
        if (std::find(cfg.methods.begin(), cfg.methods.end(), m) == cfg.methods.end()) continue;
        switch (m) {
            case Method::Qr: out.push_back({m, 0.0, qr.q1, qr.r, {}, std::nullopt}); break;
            case Method::Sqrd: {
                auto o = sqrd_order(a);
                out.push_back({m, 0.0, std::move(o.qr.q1), std::move(o.qr.r), std::move(o.perm), std::nullopt});
                break;
            }
            case Method::Vblast: {
                auto o = vblast_order(a);
                out.push_back({m, 0.0, std::move(o.qr.q1), std::move(o.qr.r), std::move(o.perm), std::nullopt});
                break;
            }
            case Method::LllPermute:
            case Method::Lll:
                for (double delta : cfg.delta_grid) {
                    const ReduceOptions opts{.trace_diag = false, .record_reflections = true};
                    ReducedBasis rb = m == Method::Lll ? lll_reduce(qr.r, delta, opts) : lll_permute_only(qr.r, delta, opts);
                    UpperTriangular rbar = rb.r_bar;
                    out.push_back({m, delta, qr.q1, std::move(rbar), {}, std::move(rb)});
                }
                break;
        }
    }
    return out;
}

ExperimentRecord base_record(const ExperimentConfig& cfg, const Transformed& t, std::size_t run, double sigma,
                             double zeta_radius) {
    ExperimentRecord rec;
    rec.case_id = cfg.case_id;
    rec.n = cfg.n;
    rec.sigma = sigma;
    rec.delta = t.delta;
    rec.method = t.method;
    rec.run_index = run;
    const BoundsReport b = compute_bounds(t.r, sigma);
    rec.p_b = b.p_b;
    rec.chi2_lower = b.chi2_lower;
    rec.beta1 = b.beta1;
    rec.beta2 = b.beta2;
    rec.beta3 = b.beta3;
    rec.zeta_hat = complexity_estimate(t.r, zeta_radius).zeta_hat;
    rec.permutation_count = t.permutations();
    return rec;
}

std::vector<double> observe(const DenseMatrix& a, std::span<const double> x_hat, double sigma, RngStream& rng) {
    std::vector<double> y = a * x_hat;
    for (double& v : y) v += sigma * rng.normal();
    return y;
}

[[noreturn]] void rethrow_with_run(std::exception_ptr e, std::size_t run) {
    const std::string prefix = "run " + std::to_string(run) + ": ";
    try {
        std::rethrow_exception(e);
    } catch (const OverflowError& ex) {
        throw OverflowError(prefix + ex.what());
    } catch (const RankDeficientError& ex) {
        throw RankDeficientError(prefix + ex.what());
    } catch (const BudgetExceededError& ex) {
        throw BudgetExceededError(prefix + ex.what());
    } catch (const DomainError& ex) {
        throw DomainError(prefix + ex.what());
    } catch (const std::exception& ex) {
        throw Error(prefix + ex.what());
    }
}

// Runs are independent; each owns an RNG substream keyed by its index, so the
// merged and sorted output does not depend on scheduling.
template <class PerRun>
std::vector<ExperimentRecord> for_each_run(const ExperimentConfig& cfg, Execution exec, PerRun&& per_run) {
    cfg.validate();
    const auto runs = static_cast<std::ptrdiff_t>(cfg.runs);
    std::vector<std::vector<ExperimentRecord>> slots(cfg.runs);
    std::vector<std::exception_ptr> errors(cfg.runs);
    const RngStream root(cfg.seed);

    auto body = [&](std::ptrdiff_t i) {
        try {
            RngStream rng = root.substream(static_cast<std::uint64_t>(i));
            slots[i] = per_run(static_cast<std::size_t>(i), rng);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < runs; ++i) body(i);
    } else {
        for (std::ptrdiff_t i = 0; i < runs; ++i) body(i);
    }

    for (std::size_t i = 0; i < cfg.runs; ++i)
        if (errors[i]) rethrow_with_run(errors[i], i);

    std::vector<ExperimentRecord> out;
    for (auto& s : slots) out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    sort_records(out);
    return out;
}

auto sort_key(const ExperimentRecord& r) {
    return std::make_tuple(r.case_id, r.n, r.sigma, r.delta, static_cast<int>(r.method), r.run_index);
}

std::string optional_field(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace

// ---------------------------------------------------------------------------

std::string_view method_name(Method m) noexcept {
    switch (m) {
        case Method::Qr: return "QR";
        case Method::Sqrd: return "SQRD";
        case Method::Vblast: return "VBLAST";
        case Method::LllPermute: return "LLL-permute";
        case Method::Lll: return "LLL";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    std::string s = trim(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
    if (s == "QR") return Method::Qr;
    if (s == "SQRD") return Method::Sqrd;
    if (s == "VBLAST" || s == "V-BLAST") return Method::Vblast;
    if (s == "LLL-PERMUTE" || s == "LLLPERMUTE" || s == "PERMUTE") return Method::LllPermute;
    if (s == "LLL") return Method::Lll;
    throw DomainError("unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_method_list(std::string_view csv) {
    std::vector<Method> out;
    for (const auto& part : split(csv, ',')) {
        if (trim(part).empty()) continue;
        const Method m = parse_method(part);
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (out.empty()) throw DomainError("method list is empty");
    return out;
}

bool uses_delta(Method m) noexcept { return m == Method::Lll || m == Method::LllPermute; }

std::vector<double> parse_real_list(std::string_view csv) {
    std::vector<double> out;
    for (const auto& part : split(csv, ','))
        if (!trim(part).empty()) out.push_back(parse_real(part));
    return out;
}

void ExperimentConfig::validate() const {
    if (case_id < 1 || case_id > 3) throw DomainError("case must be 1, 2 or 3");
    if (n < 1) throw DomainError("n must be positive");
    if (case_id == 2 && n < 2) throw DomainError("case 2 needs n >= 2");
    if (runs < 1) throw DomainError("runs must be at least 1");
    if (sigma_grid.empty()) throw DomainError("sigma grid is empty");
    for (double s : sigma_grid)
        if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("sigma values must be positive");
    if (methods.empty()) throw DomainError("method list is empty");
    const bool needs_delta = std::any_of(methods.begin(), methods.end(), uses_delta);
    if (needs_delta && delta_grid.empty()) throw DomainError("delta grid is empty");
    for (double d : delta_grid)
        if (!(d > 0.25 && d <= 1.0)) throw DomainError("delta values must lie in (1/4, 1]");
    if (!(zeta_radius > 0.0)) throw DomainError("zeta radius must be positive");
}

std::vector<ExperimentRecord> run_probability_experiment(const ExperimentConfig& cfg, Execution exec) {
    return for_each_run(cfg, exec, [&](std::size_t run, RngStream& rng) {
        const DenseMatrix a = make_model(cfg, rng);
        std::vector<ExperimentRecord> recs;
        for (const auto& t : build_transforms(cfg, a))
            for (double sigma : cfg.sigma_grid) recs.push_back(base_record(cfg, t, run, sigma, cfg.zeta_radius));
        return recs;
    });
}

std::vector<ExperimentRecord> run_empirical_success(const ExperimentConfig& cfg, Execution exec) {
    if (cfg.trials_per_run < 1) throw DomainError("empirical runs need trials >= 1");
    return for_each_run(cfg, exec, [&](std::size_t run, RngStream& rng) {
        const DenseMatrix a = make_model(cfg, rng);
        const auto transforms = build_transforms(cfg, a);
        const IntVector x_hat(cfg.n, cfg.x_hat_value);
        const std::vector<double> x_hat_real(cfg.n, static_cast<double>(cfg.x_hat_value));
        std::vector<ExperimentRecord> recs;
        for (std::size_t s = 0; s < cfg.sigma_grid.size(); ++s) {
            const double sigma = cfg.sigma_grid[s];
            // Same noise draws for every method of this run and sigma.
            const RngStream noise_root = rng.substream(1 + s);
            for (const auto& t : transforms) {
                RngStream noise = noise_root;
                std::size_t hits = 0;
                for (std::size_t trial = 0; trial < cfg.trials_per_run; ++trial) {
                    const auto y = observe(a, x_hat_real, sigma, noise);
                    const IlsInstance inst(t.r, t.transform(y));
                    if (t.to_original(babai_point(inst)) == x_hat) ++hits;
                }
                ExperimentRecord rec = base_record(cfg, t, run, sigma, cfg.zeta_radius);
                rec.empirical_success = static_cast<double>(hits) / static_cast<double>(cfg.trials_per_run);
                recs.push_back(std::move(rec));
            }
        }
        return recs;
    });
}

std::vector<ExperimentRecord> run_complexity_experiment(const ExperimentConfig& cfg, BetaRule rule, Execution exec,
                                                        std::size_t exact_count_max_n) {
    if (rule.kind == BetaRule::Kind::Fixed && !(rule.value > 0.0)) throw DomainError("fixed radius must be positive");
    return for_each_run(cfg, exec, [&](std::size_t run, RngStream& rng) {
        const DenseMatrix a = make_model(cfg, rng);
        const auto transforms = build_transforms(cfg, a);
        const QrFactors qr = qr_factorize(a);
        const std::vector<double> x_hat_real(cfg.n, static_cast<double>(cfg.x_hat_value));
        std::vector<ExperimentRecord> recs;
        for (std::size_t s = 0; s < cfg.sigma_grid.size(); ++s) {
            const double sigma = cfg.sigma_grid[s];
            RngStream noise = rng.substream(1 + s);
            const auto y = observe(a, x_hat_real, sigma, noise);

            double beta = rule.value;
            if (rule.kind == BetaRule::Kind::BabaiResidual) {
                const Transformed base{Method::Qr, 0.0, qr.q1, qr.r, {}, std::nullopt};
                const IlsInstance inst(qr.r, base.transform(y));
                beta = residual_norm(inst, babai_point(inst)) * (1.0 + 1e-9);
            }
            for (const auto& t : transforms) {
                ExperimentRecord rec = base_record(cfg, t, run, sigma, beta);
                if (cfg.n <= exact_count_max_n) {
                    try {
                        const auto counts = count_points_per_level(IlsInstance(t.r, t.transform(y)), beta);
                        std::int64_t total = 0;
                        for (auto c : counts) total += c;
                        rec.exact_nodes = total;
                    } catch (const BudgetExceededError&) {
                        rec.exact_nodes = -1;
                    }
                }
                recs.push_back(std::move(rec));
            }
        }
        return recs;
    });
}

void sort_records(std::vector<ExperimentRecord>& records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const auto& a, const auto& b) { return sort_key(a) < sort_key(b); });
}

// ---------------------------------------------------------------------------

std::string csv_header() {
    return "case,n,sigma,delta,method,run_index,p_b,chi2_lower,beta1,beta2,beta3,zeta_hat,"
           "empirical_success,permutation_count,exact_nodes";
}

void emit_csv(std::span<const ExperimentRecord> records, std::ostream& out) {
    out << csv_header() << '\n';
    for (const auto& r : records) {
        out << r.case_id << ',' << r.n << ',' << format_real(r.sigma) << ',' << format_real(r.delta) << ','
            << method_name(r.method) << ',' << r.run_index << ',' << format_real(r.p_b) << ','
            << format_real(r.chi2_lower) << ',' << format_real(r.beta1) << ',' << format_real(r.beta2) << ','
            << format_real(r.beta3) << ',' << format_real(r.zeta_hat) << ',' << optional_field(r.empirical_success)
            << ',' << r.permutation_count << ',' << (r.exact_nodes ? std::to_string(*r.exact_nodes) : std::string())
            << '\n';
    }
    if (!out) throw IoError("failed writing CSV output");
}

void emit_csv(std::span<const ExperimentRecord> records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    emit_csv(records, out);
}

std::vector<ExperimentRecord> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != csv_header()) throw IoError("CSV header does not match");
    std::vector<ExperimentRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 15) throw IoError("CSV line " + std::to_string(line_no) + " has the wrong field count");
        try {
            ExperimentRecord r;
            r.case_id = static_cast<int>(parse_int(f[0]));
            r.n = static_cast<std::size_t>(parse_int(f[1]));
            r.sigma = parse_real(f[2]);
            r.delta = parse_real(f[3]);
            r.method = parse_method(f[4]);
            r.run_index = static_cast<std::size_t>(parse_int(f[5]));
            r.p_b = parse_real(f[6]);
            r.chi2_lower = parse_real(f[7]);
            r.beta1 = parse_real(f[8]);
            r.beta2 = parse_real(f[9]);
            r.beta3 = parse_real(f[10]);
            r.zeta_hat = parse_real(f[11]);
            if (!trim(f[12]).empty()) r.empirical_success = parse_real(f[12]);
            r.permutation_count = parse_int(f[13]);
            if (!trim(f[14]).empty()) r.exact_nodes = parse_int(f[14]);
            out.push_back(r);
        } catch (const DomainError& e) {
            throw IoError("CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<SummaryRow> summarize(std::span<const ExperimentRecord> records) {
    using RunKey = std::tuple<int, std::size_t, double, std::size_t>;
    std::map<RunKey, double> qr_pb;
    for (const auto& r : records)
        if (r.method == Method::Qr) qr_pb[{r.case_id, r.n, r.sigma, r.run_index}] = r.p_b;

    using CellKey = std::tuple<int, std::size_t, double, double, int>;
    struct Acc {
        SummaryRow row;
        std::size_t empirical_count = 0;
        double empirical_sum = 0.0;
    };
    std::map<CellKey, Acc> cells;
    for (const auto& r : records) {
        auto& acc = cells[{r.case_id, r.n, r.sigma, r.delta, static_cast<int>(r.method)}];
        auto& row = acc.row;
        row.case_id = r.case_id;
        row.n = r.n;
        row.sigma = r.sigma;
        row.delta = r.delta;
        row.method = r.method;
        ++row.runs;
        row.mean_p_b += r.p_b;
        row.mean_chi2_lower += r.chi2_lower;
        row.mean_beta1 += r.beta1;
        row.mean_beta2 += r.beta2;
        row.mean_beta3 += r.beta3;
        row.mean_zeta_hat += r.zeta_hat;
        if (r.empirical_success) {
            ++acc.empirical_count;
            acc.empirical_sum += *r.empirical_success;
        }
        const auto it = qr_pb.find({r.case_id, r.n, r.sigma, r.run_index});
        if (it != qr_pb.end() && r.p_b < it->second * (1.0 - kDecreaseSlack)) ++row.decreases_vs_qr;
    }

    std::vector<SummaryRow> out;
    for (auto& [key, acc] : cells) {
        auto row = acc.row;
        const double k = static_cast<double>(row.runs);
        row.mean_p_b /= k;
        row.mean_chi2_lower /= k;
        row.mean_beta1 /= k;
        row.mean_beta2 /= k;
        row.mean_beta3 /= k;
        row.mean_zeta_hat /= k;
        if (acc.empirical_count) row.mean_empirical = acc.empirical_sum / static_cast<double>(acc.empirical_count);
        out.push_back(row);
    }
    return out;
}

void emit_summary_csv(std::span<const SummaryRow> rows, std::ostream& out) {
    out << "case,n,sigma,delta,method,runs,mean_p_b,mean_chi2_lower,mean_beta1,mean_beta2,mean_beta3,"
           "mean_zeta_hat,mean_empirical,decreases_vs_qr\n";
    for (const auto& r : rows) {
        out << r.case_id << ',' << r.n << ',' << format_real(r.sigma) << ',' << format_real(r.delta) << ','
            << method_name(r.method) << ',' << r.runs << ',' << format_real(r.mean_p_b) << ','
            << format_real(r.mean_chi2_lower) << ',' << format_real(r.mean_beta1) << ','
            << format_real(r.mean_beta2) << ',' << format_real(r.mean_beta3) << ','
            << format_real(r.mean_zeta_hat) << ',' << optional_field(r.mean_empirical) << ',' << r.decreases_vs_qr
            << '\n';
    }
}

std::vector<DeltaDecrease> count_delta_decreases(std::span<const ExperimentRecord> records, Method method) {
    // (case, n, sigma, run) -> delta -> p_b
    std::map<std::tuple<int, std::size_t, double, std::size_t>, std::map<double, double>> by_run;
    std::map<double, std::vector<double>> deltas_by_sigma;
    for (const auto& r : records) {
        if (r.method != method) continue;
        by_run[{r.case_id, r.n, r.sigma, r.run_index}][r.delta] = r.p_b;
        deltas_by_sigma[r.sigma].push_back(r.delta);
    }

    std::vector<DeltaDecrease> out;
    for (auto& [sigma, ds] : deltas_by_sigma) {
        std::sort(ds.begin(), ds.end());
        ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
        for (std::size_t t = 0; t + 1 < ds.size(); ++t) {
            DeltaDecrease dd{sigma, ds[t], ds[t + 1], 0};
            for (const auto& [key, pb] : by_run) {
                if (std::get<2>(key) != sigma) continue;
                const auto lo = pb.find(ds[t]);
                const auto hi = pb.find(ds[t + 1]);
                if (lo != pb.end() && hi != pb.end() && hi->second < lo->second * (1.0 - kDecreaseSlack))
                    ++dd.runs_decreased;
            }
            out.push_back(dd);
        }
    }
    return out;
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DomainError("config line " + std::to_string(line_no) + " lacks '='");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key == "case") cfg.case_id = static_cast<int>(parse_int(value));
        else if (key == "n") cfg.n = static_cast<std::size_t>(parse_int(value));
        else if (key == "sigma") cfg.sigma_grid = parse_real_list(value);
        else if (key == "delta") cfg.delta_grid = parse_real_list(value);
        else if (key == "runs") cfg.runs = static_cast<std::size_t>(parse_int(value));
        else if (key == "trials") cfg.trials_per_run = static_cast<std::size_t>(parse_int(value));
        else if (key == "methods") cfg.methods = parse_method_list(value);
        else if (key == "seed") cfg.seed = parse_u64(value);
        else if (key == "zeta_radius") cfg.zeta_radius = parse_real(value);
        else if (key == "x_hat") cfg.x_hat_value = parse_int(value);
        else throw DomainError("unknown config key '" + key + "' on line " + std::to_string(line_no));
    }
    return cfg;
}

std::uint64_t default_seed() {
    const char* env = std::getenv("ILS_SEED");
    if (!env || !*env) return 0;
    return parse_u64(env);
}

}  // namespace ils
