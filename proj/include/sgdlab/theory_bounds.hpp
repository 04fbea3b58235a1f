#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgdlab/rng.hpp"
#include "sgdlab/schedule_noise.hpp"

namespace sgdlab {

// One named hypothesis with its evaluated sides. "boundary" marks a
// non-strict borderline (e.g. a series exponent exactly -1), which counts
// as a failure because the theorems need strict summability.
struct ConditionEntry {
    std::string name;
    bool pass = false;
    bool applicable = true;
    bool boundary = false;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string note;
};

struct ConditionReport {
    std::string title;
    std::vector<ConditionEntry> entries;

    bool overall() const;
    const ConditionEntry* find(const std::string& name) const;
    // Deterministic key=value block, one entry per line group.
    std::string to_text() const;
};

// Constants of the finite-horizon moment bound: exponent beta, Lojasiewicz
// constant C_L, excess level delta, drift share delta', ratio constant kappa,
// sequence prefactors C_v/C_w, master-equation shift y0 and rate eta, initial
// value R, start index N, and the successive-v sup ratio s >= 1.
struct TheoryParams {
    double beta = 0.75;
    double c_l = 1.0;
    double delta = 1.0;
    double delta_prime = 0.5;
    double kappa = 1.0;
    double c_v = 1.0;
    double c_w = 1.0;
    double y0 = 1.0;
    double eta = 1.0;
    double big_r = 1.0;
    std::int64_t start_n = 1;
    double sup_ratio = 1.0;
    bool master_feasible = false;
};

void validate(const TheoryParams& tp);

// Solution of d/dt Phi = -eta Phi^{2 beta}, Phi_0 = R.
double phi(double big_r, double beta, double eta, double t);

// g(y) = kappa y - (1 - delta') C_L^2 |y|^{2 beta} + 1.
double master_g(double y, const TheoryParams& tp);

struct MasterSolution {
    bool feasible = false;
    double y0 = 0.0;
    double eta = 0.0;
    double dominance_from = 0.0;  // audited analytically for y beyond this
    std::string note;
};

// Finds (y0, eta) with s * g(y + y0) <= -eta y^{2 beta} for all y >= 0,
// or reports infeasibility (no shift y0 <= 1e6 works).
MasterSolution solve_master_equation(double beta, double c_l, double delta_prime, double kappa,
                                     double s);

// Re-verification on a fresh grid (log-uniform random when a stream is
// given) plus the closed-form large-y dominance argument.
bool audit_master_equation(double beta, double c_l, double delta_prime, double kappa, double s,
                           double y0, double eta, int points, const RngStream* stream = nullptr,
                           double* worst_margin = nullptr);

// v_n = C_v t_n^{-1/(2 beta - 1)}, w_n = C_w t_n^{-1/(2 beta - 1)}.
struct VwPair {
    double v = 0.0;
    double w = 0.0;
};
VwPair vw_from_t(const TheoryParams& tp, double t_n);
VwPair vw_sequences(const TheoryParams& tp, const StepSchedule& sched, std::int64_t n);

// s at its maximum over n > N, i.e. (t_{N+1}/t_N)^{2 beta/(2 beta - 1)};
// verifies on an audit range that the successive ratio is decreasing.
double compute_sup_ratio(const StepSchedule& sched, std::int64_t start_n, double beta);

// phi(kappa) = 4/kappa^2 + sum_{n>=0} 2^{n+3}/(2^n + kappa)^2, absolute
// accuracy <= 1e-12 (series summed to relative 1e-15 plus closed-form
// geometric tail).
double phi_tailbound(double kappa);

// Two-term excursion bound
//   phi((1-delta') T / (gamma_{N'+1} sigma_{N'+1}^2))
//   + 2 lipf sum_{l>N'} (gamma_l sigma_l)^2 / T.
double dropout_prob_bound(std::int64_t n_prime, double big_t, const TheoryParams& tp,
                          const StepSchedule& sched, const NoiseSpec& ns, double lipf);

ConditionReport check_theorem1(double alpha1, double alpha2, const StepSchedule& sched,
                               const NoiseSpec& ns);
ConditionReport check_theorem2(double gamma, double sigma, double q);
ConditionReport check_rate_conditions(double gamma, double sigma, double q, double beta);
ConditionReport check_prop_assu(double gamma, double sigma, double q);

// Lower end of the admissible beta interval for (a')(b')(c') at the given
// exponents; empty optional when no beta in (1/2, 1) qualifies.
std::optional<double> admissible_beta_low(double gamma, double sigma, double q);

struct BoundCurve {
    std::vector<double> two_term;      // Phi^{(R)}_{t_n - t_N} + (y0 + 7) v_n
    std::vector<double> consolidated;  // prefactor * Phi^{(R)}_{t_n - t_N}
    double prefactor = 0.0;
};

BoundCurve bound_curve(const TheoryParams& tp, const StepSchedule& sched,
                       const std::vector<std::int64_t>& n_list);

}  // namespace sgdlab
