#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ils {

/// Column orderings / reductions compared by the harness, in output order.
enum class Method { Qr, Sqrd, Vblast, LllPermute, Lll };

std::string_view method_name(Method m) noexcept;
Method parse_method(std::string_view name);
std::vector<Method> parse_method_list(std::string_view csv);
/// Methods whose result depends on delta.
bool uses_delta(Method m) noexcept;

enum class Execution { Serial, Parallel };

struct ExperimentConfig {
    int case_id = 1;
    std::size_t n = 20;
    std::vector<double> sigma_grid{0.1, 0.2, 0.3};
    std::vector<double> delta_grid{1.0};
    std::size_t runs = 200;
    std::size_t trials_per_run = 0;
    std::vector<Method> methods{Method::Qr, Method::Lll};
    std::uint64_t seed = 0;
    /// Search radius used for the zeta_hat column of probability records.
    double zeta_radius = 1.0;
    /// Every entry of the true integer vector (success is translation invariant).
    std::int64_t x_hat_value = 0;

    void validate() const;
};

/// One (run, sigma, delta, method) cell. `delta` is 0 for methods that do
/// not take one. The chi2/beta columns are computed on the method's own
/// triangular factor, so for method QR they are the bounds predicted from
/// the unreduced problem.
struct ExperimentRecord {
    int case_id = 1;
    std::size_t n = 0;
    double sigma = 0.0;
    double delta = 0.0;
    Method method = Method::Qr;
    std::size_t run_index = 0;
    double p_b = 0.0;
    double chi2_lower = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double zeta_hat = 0.0;
    std::optional<double> empirical_success;
    std::int64_t permutation_count = 0;
    std::optional<std::int64_t> exact_nodes;

    friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// Analytic success probabilities and bounds for every run and grid cell.
std::vector<ExperimentRecord> run_probability_experiment(const ExperimentConfig& cfg,
                                                         Execution exec = Execution::Parallel);

/// Same cells, plus the observed frequency of the nearest-plane estimate
/// hitting the true vector over cfg.trials_per_run noise draws.
std::vector<ExperimentRecord> run_empirical_success(const ExperimentConfig& cfg,
                                                    Execution exec = Execution::Parallel);

struct BetaRule {
    enum class Kind { Fixed, BabaiResidual };
    Kind kind = Kind::BabaiResidual;
    double value = 1.0;  ///< radius for Kind::Fixed
};

/// Complexity estimate per cell, and for n <= exact_count_max_n the exact
/// fixed-radius node count. The radius comes from the QR problem of the run
/// so all methods are compared at the same beta. exact_nodes is -1 when the
/// enumeration budget ran out.
std::vector<ExperimentRecord> run_complexity_experiment(const ExperimentConfig& cfg, BetaRule rule,
                                                        Execution exec = Execution::Parallel,
                                                        std::size_t exact_count_max_n = 10);

/// Sort key: case, n, sigma, delta, method, run index.
void sort_records(std::vector<ExperimentRecord>& records);

std::string csv_header();
void emit_csv(std::span<const ExperimentRecord> records, std::ostream& out);
void emit_csv(std::span<const ExperimentRecord> records, const std::string& path);
std::vector<ExperimentRecord> parse_csv(std::istream& in);

struct SummaryRow {
    int case_id = 1;
    std::size_t n = 0;
    double sigma = 0.0;
    double delta = 0.0;
    Method method = Method::Qr;
    std::size_t runs = 0;
    double mean_p_b = 0.0;
    double mean_chi2_lower = 0.0;
    double mean_beta1 = 0.0;
    double mean_beta2 = 0.0;
    double mean_beta3 = 0.0;
    double mean_zeta_hat = 0.0;
    std::optional<double> mean_empirical;
    /// Runs where this method's p_b is below the QR p_b of the same run and sigma.
    std::size_t decreases_vs_qr = 0;
};

/// Averages per (case, n, sigma, delta, method), in sorted order.
std::vector<SummaryRow> summarize(std::span<const ExperimentRecord> records);
void emit_summary_csv(std::span<const SummaryRow> rows, std::ostream& out);

struct DeltaDecrease {
    double sigma = 0.0;
    double delta_from = 0.0;
    double delta_to = 0.0;
    std::size_t runs_decreased = 0;
};

/// For consecutive delta values of the given method, the number of runs in
/// which p_b went down as delta went up.
std::vector<DeltaDecrease> count_delta_decreases(std::span<const ExperimentRecord> records,
                                                 Method method = Method::Lll);

/// Flat key=value configuration (keys: case, n, sigma, delta, runs, trials,
/// methods, seed, zeta_radius, x_hat). '#' starts a comment.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});

/// Seed from the ILS_SEED environment variable, 0 when unset.
std::uint64_t default_seed();

std::vector<double> parse_real_list(std::string_view csv);

}  // namespace ils
