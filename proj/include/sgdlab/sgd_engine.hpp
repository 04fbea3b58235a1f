#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgdlab/landscape.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/schedule_noise.hpp"
#include "sgdlab/vecops.hpp"

namespace sgdlab {

// Tracks the first time the target value undershoots the reference level by
// more than w_n = c_w * t_n^{-1/(2 beta - 1)}, from index start_n on.
struct DropoutSpec {
    double f_star = 0.0;
    double c_w = 1.0;
    double beta = 0.75;
    std::int64_t start_n = 1;
};

struct EngineConfig {
    const LandscapeSpec* landscape = nullptr;
    StepSchedule schedule;
    NoiseSpec noise;
    Vec x0;
    std::int64_t horizon = 1;
    double r_loc = 1.0;         // tracked locality radius
    double delta_excess = 1.0;  // excess threshold on gamma_n |D_n|
    std::optional<DropoutSpec> dropout;
    std::int64_t stride = 1;  // recording stride; violation indices stay full resolution
    std::int64_t extra_record_n = 0;  // additionally record this index (0 = none)
};

void validate(const EngineConfig& cfg);

// Per recorded step: iterate, target value, gradient norm, natural time,
// raw per-step flags, and the running (Polyak-Ruppert) average. The
// compatibility indicator at n is the conjunction of the flags up to n and
// is recovered from the first-violation indices.
struct TrajectoryRecord {
    int dim = 1;
    std::vector<std::int64_t> steps;
    std::vector<double> x;            // steps.size() * dim, row major
    std::vector<double> f_value;
    std::vector<double> grad_norm;
    std::vector<double> t;
    std::vector<std::uint8_t> in_locality;    // |X_n| <= r_loc
    std::vector<std::uint8_t> excess_ok;      // gamma_n |D_n| <= delta (true at n=0)
    std::vector<std::uint8_t> above_dropout;  // F(X_n) - F* >= -w_n for n >= N (true before N)
    std::vector<double> running_avg;          // steps.size() * dim

    std::optional<std::int64_t> locality_exit;  // first n with |X_n| > r_loc
    std::optional<std::int64_t> excess_exit;    // first n with gamma_n |D_n| > delta
    std::optional<std::int64_t> dropout_time;   // first n >= N with F(X_n) - F* < -w_n
    std::optional<std::int64_t> overflow_at;    // truncation point on numeric overflow
    std::int64_t steps_taken = 0;

    std::span<const double> x_at(std::size_t record_index) const {
        return {x.data() + record_index * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
    std::span<const double> avg_at(std::size_t record_index) const {
        return {running_avg.data() + record_index * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
    // Compatibility indicator (all tracked event conditions hold through n;
    // locality only through n-1, matching the event family the mean bound
    // conditions on).
    bool event_indicator(std::int64_t n) const;
};

// One SGD update X_n = x - gamma_n (f(x) + D_n); returns the new iterate and
// the noise used. Throws NumericError on non-finite results.
std::pair<Vec, Vec> step(std::span<const double> x, std::int64_t n, const EngineConfig& cfg,
                         const RngStream& rng);

TrajectoryRecord run(const EngineConfig& cfg, const RngStream& rng);

enum class Classification { ConvergedPoint, ConvergedLevelOnly, Diverged, Escaped };

std::string to_string(Classification c);

Classification classify_convergence(const TrajectoryRecord& rec, double tail_fraction,
                                    double eps_x, double eps_f);

}  // namespace sgdlab
