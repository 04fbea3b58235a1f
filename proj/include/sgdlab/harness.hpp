#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sgdlab/loja_estimator.hpp"
#include "sgdlab/sgd_engine.hpp"
#include "sgdlab/theory_bounds.hpp"

namespace sgdlab {
namespace harness {

// Flat key=value text config; '#' starts a comment, blank lines ignored.
class Config {
   public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback);
    std::string require_string(const std::string& key);
    double get_double(const std::string& key, double fallback);
    std::int64_t get_int(const std::string& key, std::int64_t fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
    bool get_bool(const std::string& key, bool fallback);
    Vec get_vec(const std::string& key, const Vec& fallback);
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback);

    void override_kv(const std::string& key, const std::string& value);
    // Throws ConfigError when a key was never read (catches typos).
    void reject_unknown() const;
    std::string origin() const { return origin_; }

   private:
    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> touched_;
    std::string origin_;
    const std::string* find(const std::string& key) const;
};

struct ExperimentConfig {
    std::string kind;
    std::uint64_t seed = 1;
    std::string out_prefix = "out";
    std::int64_t replicas = 1;

    // engine
    std::string landscape = "quadratic";
    int dim = 1;
    Vec x0;
    StepSchedule sched;
    NoiseSpec noise;
    std::int64_t horizon = 1000;
    double r_loc = 10.0;
    double delta_excess = 0.5;
    std::int64_t stride = 0;  // 0 = auto (about 1000 records)
    std::optional<DropoutSpec> dropout;

    // classification
    double tail_fraction = 0.1;
    double eps_x = 1e-2;
    double eps_f = 1e-2;

    // certificate / theory inputs
    double f_star = 0.0;
    double beta_hat = 0.0;  // 0 = take from catalog metadata or estimate
    double c_hat = 0.0;
    double delta_prime = 0.5;
    double beta_pad = 0.02;

    // estimate-loja
    std::int64_t samples = 10000;
    double band_lo = 1e-8;
    double band_hi = 1e-1;
    Vec box_lo, box_hi;
    double ball_radius = 0.0;  // > 0 selects a ball region at x0
    double band_eps = 0.0;     // > 0 wraps the region in a level band

    // detect-levels
    int grid_per_dim = 201;
    double f_tol = 1e-3;
    double merge_tol = 1e-6;

    // martingale experiment
    double mart_beta = 2.0;
    double mart_a = 1.0;
    std::string xi_family = "gaussian";
    double xi_pareto_p = 1.5;
    std::vector<double> kappas = {5.0, 10.0, 20.0};

    // mlp
    std::string dataset_path;
    std::vector<int> widths = {1, 2, 1};
    std::string activation = "softplus";
    std::int64_t teacher_m = 64;
    double input_scale = 1.0;
    double x0_perturb = 0.1;  // start at teacher + this * noise

    // check-conditions
    std::optional<double> alpha1, alpha2, check_beta;
};

ExperimentConfig parse_experiment(Config& cfg, const std::string& kind);

// Per-recorded-index aggregate over replicas. The tracked event at n is the
// conjunction of locality (through n-1), excess, and no-dropout conditions.
struct McIndexRow {
    std::int64_t n = 0;
    double t = 0.0;
    std::int64_t event_count = 0;
    double iw_mean = 0.0;  // M^{-1} sum 1_B (F - F*)
    double iw_se = 0.0;
    double cond_gap = 0.0;   // mean F - F* over the event cell
    double cond_grad = 0.0;  // mean |f| over the event cell
    double dispersion = 0.0;  // per-coordinate std of X over the cell, rms
    bool low_count = true;    // event_count < 30
};

struct McSummary {
    std::int64_t replicas = 0;
    std::int64_t stayed_local = 0;
    std::int64_t excess_ok = 0;
    std::int64_t no_dropout = 0;
    std::int64_t overflowed = 0;
    std::int64_t class_count[4] = {0, 0, 0, 0};  // indexed by Classification
    std::vector<McIndexRow> rows;
    std::vector<Vec> final_points;  // final iterate per replica (kept small runs only)
};

McSummary monte_carlo(const EngineConfig& engine, std::int64_t replicas, std::uint64_t seed,
                      double f_star, double tail_fraction, double eps_x, double eps_f,
                      bool keep_final_points = false);

struct BoundCompareResult {
    TheoryParams params;
    ConditionReport prop_assu;
    std::vector<McIndexRow> rows;   // rows with n >= N
    std::vector<double> bound;      // two-term curve per row
    std::vector<double> consolidated;
    std::vector<bool> violation;    // emp > bound + 3 se
    double headline = 0.0;          // max (emp - bound) / se
    double min_slack_ratio = 0.0;   // min bound / max(emp, tiny)
    std::int64_t stayed_local = 0;
    std::int64_t replicas = 0;
};

BoundCompareResult bound_compare(const ExperimentConfig& cfg);

struct MartingaleKappaRow {
    double kappa = 0.0;
    std::int64_t exceed_count = 0;
    double freq = 0.0;
    double ci_half = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct MartingaleResult {
    std::vector<MartingaleKappaRow> rows;  // bracket version (finite variance only)
    bool bracket_applicable = false;
    double osc_median = 0.0;
    double osc_q90 = 0.0;
    double tail_std = 0.0;  // sqrt(sum of increment variances over the last decade)
    bool convergence_pass = false;
    std::int64_t replicas = 0;
};

MartingaleResult martingale_lemma_experiment(const ExperimentConfig& cfg);

struct DropoutCell {
    std::int64_t n_prime = 0;
    std::int64_t count = 0;
    std::int64_t excursions = 0;
    double rho = 0.0;
};

struct DropoutResult {
    std::int64_t replicas = 0;
    std::int64_t dropout_count = 0;
    std::int64_t excursion_count = 0;
    double freq = 0.0;
    double ci_half = 0.0;
    double pooled_bound = 0.0;  // mean of rho_{T_r} over dropout replicas
    std::string verdict;        // pass | fail | not_applicable
    std::vector<DropoutCell> cells;  // N' cells with >= 30 replicas
};

DropoutResult dropout_experiment(const ExperimentConfig& cfg);

// Per-step CSV, schema:
// replica,n,t_n,F,gradnorm,xnorm,in_locality,excess_ok,above_dropout
void emit_csv(std::span<const TrajectoryRecord> records,
              std::span<const std::int64_t> replica_ids, const std::string& path);

struct RunOutput {
    std::vector<std::string> files;
    std::string summary_text;
    bool hypothesis_ok = true;
};

// Dispatch on cfg.kind; writes the experiment's files under cfg.out_prefix.
RunOutput run_experiment(const ExperimentConfig& cfg);

// Shared helpers (also used by the CLI and tests).
LandscapeSpec landscape_from_config(const ExperimentConfig& cfg);
EngineConfig engine_from_config(const ExperimentConfig& cfg, const LandscapeSpec& spec);
std::int64_t auto_stride(std::int64_t horizon, std::int64_t stride_key);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace harness
}  // namespace sgdlab
