#include "sgdlab/theory_bounds.hpp"

#include <algorithm>
#include <cmath>

#include "sgdlab/errors.hpp"
#include "sgdlab/textio.hpp"

namespace sgdlab {

namespace {

ConditionEntry entry(std::string name, bool pass, double lhs, double rhs,
                     std::string note = "") {
    ConditionEntry e;
    e.name = std::move(name);
    e.pass = pass;
    e.lhs = lhs;
    e.rhs = rhs;
    e.note = std::move(note);
    return e;
}

ConditionEntry na_entry(std::string name, std::string note) {
    ConditionEntry e;
    e.name = std::move(name);
    e.pass = true;
    e.applicable = false;
    e.note = std::move(note);
    return e;
}

// Strict series test for sum n^a: converges iff a < -1; a == -1 is a
// boundary failure.
ConditionEntry series_entry(std::string name, double exponent) {
    ConditionEntry e = entry(std::move(name), exponent < -1.0, exponent, -1.0);
    if (exponent == -1.0) {
        e.boundary = true;
        e.note = "boundary";
    }
    return e;
}

// Upper bound for sum_{l > from} l^a with a < -1: direct summation of the
// head plus the integral tail from the last summed index.
double sum_power_tail(double a, std::int64_t from, std::int64_t head_terms = 1000000) {
    double s = 0.0;
    std::int64_t l = from + 1;
    const std::int64_t stop = from + head_terms;
    for (; l <= stop; ++l) {
        const double term = std::pow(static_cast<double>(l), a);
        s += term;
        if (term < 1e-16 * s) {
            ++l;
            break;
        }
    }
    const double last = static_cast<double>(l - 1);
    s += std::pow(last, a + 1.0) / (-1.0 - a);
    return s;
}

}  // namespace

bool ConditionReport::overall() const {
    for (const auto& e : entries)
        if (e.applicable && !e.pass) return false;
    return true;
}

const ConditionEntry* ConditionReport::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

std::string ConditionReport::to_text() const {
    std::string out;
    out += "check=" + title + "\n";
    for (const auto& e : entries) {
        out += e.name + ".pass=" + fmt(e.pass) + "\n";
        if (!e.applicable) {
            out += e.name + ".applicable=0\n";
        } else {
            out += e.name + ".lhs=" + fmt(e.lhs) + "\n";
            out += e.name + ".rhs=" + fmt(e.rhs) + "\n";
        }
        if (e.boundary) out += e.name + ".boundary=1\n";
        if (!e.note.empty()) out += e.name + ".note=" + e.note + "\n";
    }
    out += "overall=" + fmt(overall()) + "\n";
    return out;
}

void validate(const TheoryParams& tp) {
    if (!(tp.beta > 0.5 && tp.beta < 1.0))
        throw ParamError("TheoryParams: beta must lie in (1/2, 1)");
    if (!(tp.c_l > 0.0)) throw ParamError("TheoryParams: C_L must be positive");
    if (!(tp.delta > 0.0)) throw ParamError("TheoryParams: delta must be positive");
    if (!(tp.delta_prime > 0.0 && tp.delta_prime < 1.0))
        throw ParamError("TheoryParams: delta' must lie in (0, 1)");
    if (!(tp.kappa > 0.0)) throw ParamError("TheoryParams: kappa must be positive");
    if (!(tp.c_v > 0.0 && tp.c_w > 0.0))
        throw ParamError("TheoryParams: C_v and C_w must be positive");
    if (!(tp.y0 > 0.0 && tp.eta > 0.0))
        throw ParamError("TheoryParams: y0 and eta must be positive");
    if (!(tp.big_r > 0.0)) throw ParamError("TheoryParams: R must be positive");
    if (tp.start_n < 1) throw ParamError("TheoryParams: N must be >= 1");
    if (!(tp.sup_ratio >= 1.0)) throw ParamError("TheoryParams: sup ratio must be >= 1");
}

double phi(double big_r, double beta, double eta, double t) {
    if (!(big_r > 0.0)) throw ParamError("phi: R must be positive");
    if (!(beta > 0.5 && beta < 1.0)) throw ParamError("phi: beta must lie in (1/2, 1)");
    if (!(eta > 0.0)) throw ParamError("phi: eta must be positive");
    if (!(t >= 0.0)) throw ParamError("phi: t must be >= 0");
    const double p = 2.0 * beta - 1.0;
    return big_r * std::pow(p * eta * std::pow(big_r, p) * t + 1.0, -1.0 / p);
}

double master_g(double y, const TheoryParams& tp) {
    return tp.kappa * y -
           (1.0 - tp.delta_prime) * tp.c_l * tp.c_l * std::pow(std::abs(y), 2.0 * tp.beta) + 1.0;
}

namespace {

double g_raw(double y, double beta, double c_l, double delta_prime, double kappa) {
    return kappa * y - (1.0 - delta_prime) * c_l * c_l * std::pow(std::abs(y), 2.0 * beta) + 1.0;
}

// Beyond this z the linear-plus-constant part of -s g is beaten by the
// power term with margin coefficient a_coef = s(1-d')C_L^2 - eta.
double dominance_threshold(double beta, double s, double kappa, double a_coef) {
    const double p = 2.0 * beta;
    const double z1 = kappa > 0.0 ? std::pow(2.0 * s * kappa / a_coef, 1.0 / (p - 1.0)) : 0.0;
    const double z2 = std::pow(2.0 * s / a_coef, 1.0 / p);
    return std::max(z1, z2);
}

bool master_holds_at(double y, double beta, double c_l, double delta_prime, double kappa,
                     double s, double y0, double eta, double* margin) {
    const double lhs = s * g_raw(y + y0, beta, c_l, delta_prime, kappa);
    const double rhs = -eta * std::pow(y, 2.0 * beta);
    if (margin) *margin = rhs - lhs;
    return lhs <= rhs;
}

}  // namespace

MasterSolution solve_master_equation(double beta, double c_l, double delta_prime, double kappa,
                                     double s) {
    if (!(beta > 0.5 && beta < 1.0))
        throw ParamError("solve_master_equation: beta must lie in (1/2, 1)");
    if (!(c_l > 0.0)) throw ParamError("solve_master_equation: C_L must be positive");
    if (!(delta_prime >= 0.0 && delta_prime < 1.0))
        throw ParamError("solve_master_equation: delta' must lie in [0, 1)");
    if (!(kappa >= 0.0)) throw ParamError("solve_master_equation: kappa must be >= 0");
    if (!(s >= 1.0)) throw ParamError("solve_master_equation: s must be >= 1");

    MasterSolution sol;
    const double coef = (1.0 - delta_prime) * c_l * c_l;
    const double p = 2.0 * beta;
    // g is decreasing beyond this point
    const double y_turn = kappa > 0.0 ? std::pow(kappa / (coef * p), 1.0 / (p - 1.0)) : 0.0;

    for (double y0 = 1.0 / 1024.0; y0 <= 1e6; y0 *= 2.0) {
        if (y0 < y_turn) continue;
        if (!(g_raw(y0, beta, c_l, delta_prime, kappa) <= -2.0 / s)) continue;

        // eta from the infimum of -s g(y + y0) / y^{2 beta} over a geometric grid
        double inf_ratio = s * coef;  // y -> infinity limit
        for (double y = 1e-6; y <= 1e9; y *= 1.25) {
            const double num = -s * g_raw(y + y0, beta, c_l, delta_prime, kappa);
            if (num <= 0.0) {
                inf_ratio = -1.0;  // g not negative somewhere past the shift
                break;
            }
            inf_ratio = std::min(inf_ratio, num / std::pow(y, p));
        }
        if (inf_ratio <= 0.0) continue;

        double eta = 0.9 * inf_ratio;
        bool ok = false;
        for (int round = 0; round < 8 && eta > 0.0; ++round) {
            if (audit_master_equation(beta, c_l, delta_prime, kappa, s, y0, eta, 10000)) {
                ok = true;
                break;
            }
            eta *= 0.9;
        }
        if (!ok) continue;

        sol.feasible = true;
        sol.y0 = y0;
        sol.eta = eta;
        sol.dominance_from =
            dominance_threshold(beta, s, kappa, s * coef - eta);
        return sol;
    }
    sol.note = "no shift y0 <= 1e6 satisfies the master inequality";
    return sol;
}

bool audit_master_equation(double beta, double c_l, double delta_prime, double kappa, double s,
                           double y0, double eta, int points, const RngStream* stream,
                           double* worst_margin) {
    const double coef = (1.0 - delta_prime) * c_l * c_l;
    const double a_coef = s * coef - eta;
    if (!(a_coef > 0.0)) return false;  // power term must dominate asymptotically
    const double z_cross = dominance_threshold(beta, s, kappa, a_coef);
    // audit y in (0, y_hi]; beyond y_hi the closed-form dominance applies
    const double y_hi = std::max(z_cross, 1.0) + y0 + 10.0;
    const double y_lo = 1e-9;
    const double log_lo = std::log(y_lo), log_hi = std::log(y_hi);
    double worst = std::numeric_limits<double>::infinity();
    bool pass = true;
    // y = 0 boundary: need s g(y0) <= 0
    if (s * g_raw(y0, beta, c_l, delta_prime, kappa) > 0.0) pass = false;
    for (int i = 0; i < points; ++i) {
        double u;
        if (stream) {
            u = uniform01(*stream, 0, static_cast<std::uint64_t>(i));
        } else {
            u = (static_cast<double>(i) + 0.5) / static_cast<double>(points);
        }
        const double y = std::exp(log_lo + u * (log_hi - log_lo));
        double margin;
        if (!master_holds_at(y, beta, c_l, delta_prime, kappa, s, y0, eta, &margin)) pass = false;
        worst = std::min(worst, margin);
    }
    if (worst_margin) *worst_margin = worst;
    return pass;
}

VwPair vw_from_t(const TheoryParams& tp, double t_n) {
    if (!(t_n > 0.0)) throw ParamError("vw_from_t: natural time must be positive");
    const double e = -1.0 / (2.0 * tp.beta - 1.0);
    const double base = std::pow(t_n, e);
    return VwPair{tp.c_v * base, tp.c_w * base};
}

VwPair vw_sequences(const TheoryParams& tp, const StepSchedule& sched, std::int64_t n) {
    if (n < 1) throw ParamError("vw_sequences: n must be >= 1");
    return vw_from_t(tp, natural_time(sched, n));
}

double compute_sup_ratio(const StepSchedule& sched, std::int64_t start_n, double beta) {
    if (start_n < 1) throw ParamError("compute_sup_ratio: N must be >= 1");
    if (!(beta > 0.5 && beta < 1.0))
        throw ParamError("compute_sup_ratio: beta must lie in (1/2, 1)");
    const double expo = 2.0 * beta / (2.0 * beta - 1.0);
    double t_prev = natural_time(sched, start_n);
    double first = 0.0;
    double prev_ratio = std::numeric_limits<double>::infinity();
    // successive ratios must be decreasing on the audit range so the first
    // one is the supremum
    for (std::int64_t n = start_n + 1; n <= start_n + 1000; ++n) {
        const double t = t_prev + gamma_at(sched, n);
        const double ratio = std::pow(t / t_prev, expo);
        if (n == start_n + 1) first = ratio;
        if (ratio > prev_ratio * (1.0 + 1e-12))
            throw NumericError("compute_sup_ratio: successive ratio not decreasing");
        prev_ratio = ratio;
        t_prev = t;
    }
    return first;
}

double phi_tailbound(double kappa) {
    if (!(kappa > 0.0)) throw ParamError("phi_tailbound: kappa must be positive");
    double sum = 4.0 / (kappa * kappa);
    double pow2 = 1.0;  // 2^n
    int n = 0;
    for (; n < 2000; ++n) {
        const double term = 8.0 * pow2 / ((pow2 + kappa) * (pow2 + kappa));
        sum += term;
        pow2 *= 2.0;
        // geometric tail from the next index: sum_{m>=n+1} 2^{m+3}/2^{2m} = 16 * 2^{-(n+1)}
        const double tail = 16.0 / pow2;
        if (term < 1e-15 * sum && tail < 1e-13) {
            sum += tail;
            break;
        }
    }
    return sum;
}

double dropout_prob_bound(std::int64_t n_prime, double big_t, const TheoryParams& tp,
                          const StepSchedule& sched, const NoiseSpec& ns, double lipf) {
    if (n_prime < 1) throw ParamError("dropout_prob_bound: N' must be >= 1");
    if (!(big_t > 0.0)) throw ParamError("dropout_prob_bound: T must be positive");
    if (!(lipf >= 0.0)) throw ParamError("dropout_prob_bound: Lipschitz bound must be >= 0");
    // step sizes decrease, so the drift-share condition binds at N'+1
    const double g1 = gamma_at(sched, n_prime + 1);
    if (2.0 * lipf * g1 > tp.delta_prime)
        throw HypothesisError("dropout_prob_bound: 2 Lip gamma_n <= delta' fails at n = N'+1");
    if (-sched.gamma_exp + 2.0 * ns.sigma_exp > 0.0)
        throw HypothesisError("dropout_prob_bound: (gamma_n sigma_n^2) is not decreasing");
    const double series_exp = 2.0 * (ns.sigma_exp - sched.gamma_exp);
    if (!(series_exp < -1.0))
        throw HypothesisError("dropout_prob_bound: sum (gamma_l sigma_l)^2 diverges");

    const double s1 = sigma_at(ns, n_prime + 1);
    const double head = phi_tailbound((1.0 - tp.delta_prime) * big_t / (g1 * s1 * s1));
    const double prefactor = sched.c_gamma * sched.c_gamma * ns.c_sigma * ns.c_sigma;
    const double series = prefactor * sum_power_tail(series_exp, n_prime);
    return head + 2.0 * lipf * series / big_t;
}

ConditionReport check_theorem1(double alpha1, double alpha2, const StepSchedule& sched,
                               const NoiseSpec& ns) {
    if (!(alpha1 > 0.0 && alpha1 <= alpha2 && alpha2 <= 1.0))
        throw ParamError("check_theorem1: need 0 < alpha1 <= alpha2 <= 1");
    ConditionReport rep;
    rep.title = "theorem1";
    rep.entries.push_back(
        entry("step_to_zero", sched.gamma_exp > 0.0, sched.gamma_exp, 0.0));
    rep.entries.push_back(series_entry(
        "moment_series", (ns.sigma_exp - sched.gamma_exp) * (1.0 + alpha1)));
    if (alpha2 < 1.0) {
        rep.entries.push_back(series_entry(
            "hoelder_series", -sched.gamma_exp * (1.0 + alpha2) / (1.0 - alpha2)));
    } else {
        rep.entries.push_back(na_entry("hoelder_series", "alpha2=1"));
    }
    // sum gamma_n = infinity, needed for the gradient-vanishing conclusion
    rep.entries.push_back(
        entry("divergent_steps", sched.gamma_exp <= 1.0, sched.gamma_exp, 1.0));
    return rep;
}

ConditionReport check_theorem2(double gamma, double sigma, double q) {
    ConditionReport rep;
    rep.title = "theorem2";
    rep.entries.push_back(
        entry("gamma_range", gamma > 0.5 && gamma <= 1.0, gamma, 0.5, "need 1/2 < gamma <= 1"));
    rep.entries.push_back(entry("q_ge_2", q >= 2.0, q, 2.0));
    rep.entries.push_back(
        entry("step_noise_balance", 2.0 / 3.0 * (sigma + 1.0) < gamma,
              2.0 / 3.0 * (sigma + 1.0), gamma, "need (2/3)(sigma+1) < gamma"));
    const double denom = 2.0 * gamma - sigma - 1.0;
    rep.entries.push_back(entry("moment_denominator", denom > 0.0, denom, 0.0,
                                "need 2 gamma - sigma - 1 > 0"));
    if (denom > 0.0) {
        rep.entries.push_back(entry("moment_order", 1.0 / denom < q, 1.0 / denom, q,
                                    "need 1/(2 gamma - sigma - 1) < q"));
    } else {
        ConditionEntry e = entry("moment_order", false, 0.0, q, "denominator not positive");
        rep.entries.push_back(e);
    }
    return rep;
}

ConditionReport check_rate_conditions(double gamma, double sigma, double q, double beta) {
    if (!(beta > 0.5 && beta < 1.0))
        throw ParamError("check_rate_conditions: beta must lie in (1/2, 1)");
    if (!(gamma > 0.5 && gamma <= 1.0))
        throw ParamError("check_rate_conditions: gamma must lie in (1/2, 1]");
    ConditionReport rep;
    rep.title = "rate_conditions";
    if (gamma < 1.0) {
        const double den = 2.0 * beta - 1.0;
        const double rhs_a = ((4.0 * beta - 1.0) * gamma - 2.0 * beta) / den;
        const double rhs_b = (2.0 * beta * gamma - 1.0) / den - 1.0 / q;
        rep.entries.push_back(entry("a_prime", 2.0 * sigma <= rhs_a, 2.0 * sigma, rhs_a));
        rep.entries.push_back(entry("b_prime", sigma <= rhs_b, sigma, rhs_b));
        rep.entries.push_back(
            entry("c_prime", gamma >= 1.0 / (2.0 * beta), gamma, 1.0 / (2.0 * beta)));
    } else {
        rep.entries.push_back(
            entry("sigma_below_half", sigma < 0.5, sigma, 0.5, "gamma=1 clause"));
        rep.entries.push_back(entry("q_ge_2", q >= 2.0, q, 2.0, "gamma=1 clause"));
    }
    return rep;
}

std::optional<double> admissible_beta_low(double gamma, double sigma, double q) {
    if (!(gamma > 0.5 && gamma <= 1.0)) return std::nullopt;
    const auto passes = [&](double beta) {
        return check_rate_conditions(gamma, sigma, q, beta).overall();
    };
    const double hi = 1.0 - 1e-9;
    if (!passes(hi)) return std::nullopt;
    if (gamma == 1.0) return 0.5 + 1e-9;  // the gamma=1 clause set is beta-free
    double lo = 0.5 + 1e-9;
    if (passes(lo)) return lo;
    // each clause is monotone in beta, so a single bisection finds the edge
    double bad = lo, good = hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (bad + good);
        if (passes(mid))
            good = mid;
        else
            bad = mid;
    }
    return good;
}

ConditionReport check_prop_assu(double gamma, double sigma, double q) {
    if (!(gamma > 0.5 && gamma <= 1.0))
        throw ParamError("check_prop_assu: gamma must lie in (1/2, 1]");
    ConditionReport rep;
    rep.title = "prop_assu";
    rep.entries.push_back(entry("drift_vs_noise", 3.0 * gamma - 2.0 * sigma > 2.0,
                                3.0 * gamma - 2.0 * sigma, 2.0,
                                "need 3 gamma - 2 sigma > 2"));
    const double denom = 2.0 * gamma - sigma - 1.0;
    if (denom > 0.0) {
        rep.entries.push_back(entry("moment_order", q > 1.0 / denom, 1.0 / denom, q,
                                    "need q > 1/(2 gamma - sigma - 1)"));
    } else {
        rep.entries.push_back(
            entry("moment_order", false, denom, 0.0, "2 gamma - sigma - 1 not positive"));
    }
    rep.entries.push_back(entry("q_ge_2", q >= 2.0, q, 2.0));

    const auto lo = admissible_beta_low(gamma, sigma, q);
    ConditionEntry betas = entry("beta_interval", lo.has_value(), lo.value_or(1.0), 1.0);
    betas.note = lo ? "admissible beta in [lhs, 1)" : "no admissible beta";
    rep.entries.push_back(betas);

    // thresholds beyond which w_N/(gamma sigma^2) blows up and the tail
    // series is o(w_n)
    const double d1 = 2.0 * gamma - 4.0 * sigma;
    if (d1 > 0.0) {
        const double th1 = (1.0 - 2.0 * sigma) / d1;
        rep.entries.push_back(entry("w_ratio_threshold", th1 < 1.0, th1, 1.0,
                                    "need beta above lhs"));
    } else {
        rep.entries.push_back(na_entry("w_ratio_threshold", "denominator not positive"));
    }
    const double d2 = 4.0 * gamma - 4.0 * sigma - 2.0;
    if (d2 > 0.0) {
        const double th2 = (gamma - 2.0 * sigma) / d2;
        rep.entries.push_back(entry("tail_vs_w_threshold", th2 < 1.0, th2, 1.0,
                                    "need beta above lhs"));
    } else {
        rep.entries.push_back(na_entry("tail_vs_w_threshold", "denominator not positive"));
    }
    return rep;
}

BoundCurve bound_curve(const TheoryParams& tp, const StepSchedule& sched,
                       const std::vector<std::int64_t>& n_list) {
    validate(tp);
    BoundCurve out;
    if (n_list.empty()) return out;
    std::int64_t n_max = tp.start_n;
    for (auto n : n_list) {
        if (n < tp.start_n) throw ParamError("bound_curve: every n must be >= N");
        n_max = std::max(n_max, n);
    }
    const NaturalTime times(sched, n_max);
    const double t_start = times.at(tp.start_n);
    const double p = 2.0 * tp.beta - 1.0;
    out.prefactor =
        1.0 + (tp.y0 + 7.0) * tp.c_v / tp.big_r *
                  std::pow(p * tp.eta * std::pow(tp.big_r, p) + 1.0 / t_start, 1.0 / p);
    out.two_term.reserve(n_list.size());
    out.consolidated.reserve(n_list.size());
    for (auto n : n_list) {
        const double ph = phi(tp.big_r, tp.beta, tp.eta, times.at(n) - t_start);
        const double v = vw_from_t(tp, times.at(n)).v;
        out.two_term.push_back(ph + (tp.y0 + 7.0) * v);
        out.consolidated.push_back(out.prefactor * ph);
    }
    return out;
}

}  // namespace sgdlab
