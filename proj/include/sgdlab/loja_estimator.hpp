#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sgdlab/landscape.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/vecops.hpp"

namespace sgdlab {

// Sampling region: a bounding box plus an optional membership predicate
// (ball, level band, annulus, ...). Uniform proposals are drawn in the box
// and rejected against the predicate.
struct Region {
    Vec lo, hi;
    std::function<bool(std::span<const double>)> pred;  // empty = whole box
    std::string describe;

    bool contains(std::span<const double> p) const;
    static Region box(Vec lo, Vec hi);
    static Region ball(Vec center, double radius);
};

struct LojaCertificate {
    std::string landscape;
    std::string region;
    double level = 0.0;       // F*
    double beta = 0.5;        // clamped to [1/2, 1)
    double beta_raw = 0.5;    // unclamped envelope slope
    double c_lower = 0.0;     // C_L estimate (5% envelope shrink)
    bool certified = false;   // fresh-sample audit passed
    Vec worst_point;          // sample attaining the minimal ratio
    std::int64_t accepted = 0;

    std::string to_text() const;
};

// |f| scan over a grid, local descent refinement of near-critical points to
// |f| <= 1e-10, then F-value merging within merge_tol. Returns sorted
// distinct levels (empty when the grid sees no near-critical point).
std::vector<double> detect_critical_levels(const LandscapeSpec& spec, const Region& box,
                                           int grid_per_dim, double f_tol, double merge_tol);

// Lower-envelope fit of log|f| over log|F - F*| on samples with
// |F - F*| in (band_lo, band_hi), rejection-sampled from the region.
LojaCertificate estimate_loja(const LandscapeSpec& spec, const Region& region, double f_star,
                              std::int64_t samples, double band_lo, double band_hi,
                              const RngStream& rng);

// The sublevel band {y in box : |F(y) - level| < eps} as a predicate region.
Region neighborhood_fit(const LandscapeSpec& spec, double level, const Region& box, double eps);

// Finite-cover combination: one (beta, C_L) valid on the union of the
// certificate regions, given a bound on |F - level| over the union.
LojaCertificate merge_certificates(const std::vector<LojaCertificate>& certs, double range_bound);

}  // namespace sgdlab
