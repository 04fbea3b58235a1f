#include "sgdlab/loja_estimator.hpp"

#include <algorithm>
#include <cmath>

#include "sgdlab/errors.hpp"
#include "sgdlab/textio.hpp"

namespace sgdlab {

bool Region::contains(std::span<const double> p) const {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return !pred || pred(p);
}

Region Region::box(Vec lo_in, Vec hi_in) {
    Region r;
    r.describe = "box";
    r.lo = std::move(lo_in);
    r.hi = std::move(hi_in);
    if (r.lo.size() != r.hi.size()) throw ParamError("Region::box: corner dimensions differ");
    for (std::size_t i = 0; i < r.lo.size(); ++i)
        if (!(r.lo[i] < r.hi[i])) throw ParamError("Region::box: empty box");
    return r;
}

Region Region::ball(Vec center, double radius) {
    if (!(radius > 0.0)) throw ParamError("Region::ball: radius must be positive");
    Region r;
    r.describe = "ball:r=" + fmt(radius);
    r.lo.resize(center.size());
    r.hi.resize(center.size());
    for (std::size_t i = 0; i < center.size(); ++i) {
        r.lo[i] = center[i] - radius;
        r.hi[i] = center[i] + radius;
    }
    Vec c = std::move(center);
    r.pred = [c, radius](std::span<const double> p) { return dist2(p, c) <= radius; };
    return r;
}

std::string LojaCertificate::to_text() const {
    std::string s;
    s += "landscape=" + landscape + "\n";
    s += "region=" + region + "\n";
    s += "level=" + fmt(level) + "\n";
    s += "beta=" + fmt(beta) + "\n";
    s += "beta_raw=" + fmt(beta_raw) + "\n";
    s += "c_lower=" + fmt(c_lower) + "\n";
    s += "certified=" + fmt(certified) + "\n";
    s += "accepted=" + fmt(accepted) + "\n";
    std::string wp;
    for (std::size_t i = 0; i < worst_point.size(); ++i) {
        if (i) wp += ",";
        wp += fmt(worst_point[i]);
    }
    s += "worst_point=" + wp + "\n";
    return s;
}

namespace {

// Backtracking descent of h(x) = |f(x)|^2 with a finite-difference gradient
// of h; stops at |f| <= tol. Returns true on success.
bool refine_critical(const LandscapeSpec& spec, Vec& x, double tol) {
    const std::size_t d = x.size();
    Vec grad_h(d), probe(d), fvec(d);
    const auto h_at = [&](const Vec& p) {
        spec.gradient(p, fvec);
        return dot(fvec, fvec);
    };
    double h = h_at(x);
    double step0 = 1.0;
    for (int iter = 0; iter < 400; ++iter) {
        if (std::sqrt(h) <= tol) return true;
        const double scale = 1e-7 * std::max(1.0, norm2(x));
        for (std::size_t i = 0; i < d; ++i) {
            probe = x;
            probe[i] += scale;
            const double hp = h_at(probe);
            probe[i] -= 2.0 * scale;
            const double hm = h_at(probe);
            grad_h[i] = (hp - hm) / (2.0 * scale);
        }
        const double g2 = dot(grad_h, grad_h);
        if (g2 == 0.0) return std::sqrt(h) <= tol;
        double step = step0;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            probe = x;
            axpy(-step, grad_h, probe);
            const double h_new = h_at(probe);
            if (h_new <= h - 1e-4 * step * g2) {
                x = probe;
                h = h_new;
                step0 = step * 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) return std::sqrt(h) <= tol;
    }
    return std::sqrt(h) <= tol;
}

}  // namespace

std::vector<double> detect_critical_levels(const LandscapeSpec& spec, const Region& box,
                                           int grid_per_dim, double f_tol, double merge_tol) {
    if (grid_per_dim < 3) throw ParamError("detect_critical_levels: grid must be >= 3 per dim");
    if (!(f_tol > 0.0 && merge_tol > 0.0))
        throw ParamError("detect_critical_levels: tolerances must be positive");
    const std::size_t d = static_cast<std::size_t>(spec.dim);
    if (box.lo.size() != d) throw ParamError("detect_critical_levels: box dimension mismatch");
    double total = 1.0;
    for (std::size_t i = 0; i < d; ++i) total *= static_cast<double>(grid_per_dim);
    if (total > 2e7) throw ParamError("detect_critical_levels: grid too large");

    std::vector<double> level_values;
    Vec x(d), fvec(d);
    std::vector<int> idx(d, 0);
    const std::int64_t npts = static_cast<std::int64_t>(total);
    for (std::int64_t k = 0; k < npts; ++k) {
        std::int64_t rem = k;
        for (std::size_t i = 0; i < d; ++i) {
            const int ii = static_cast<int>(rem % grid_per_dim);
            rem /= grid_per_dim;
            x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * static_cast<double>(ii) /
                                   static_cast<double>(grid_per_dim - 1);
        }
        spec.gradient(x, fvec);
        if (norm2(fvec) > f_tol) continue;
        Vec refined = x;
        if (!refine_critical(spec, refined, 1e-10)) continue;
        level_values.push_back(spec.value(refined));
    }
    std::sort(level_values.begin(), level_values.end());
    std::vector<double> merged;
    for (double v : level_values) {
        if (merged.empty() || v - merged.back() > merge_tol)
            merged.push_back(v);
    }
    return merged;
}

namespace {

struct SamplePoint {
    Vec x;
    double log_gap = 0.0;   // log |F - F*|
    double log_grad = 0.0;  // log |f|
    double grad = 0.0;
};

std::vector<SamplePoint> draw_band_samples(const LandscapeSpec& spec, const Region& region,
                                           double f_star, std::int64_t want, double band_lo,
                                           double band_hi, const RngStream& rng,
                                           std::uint64_t step_base) {
    const std::size_t d = static_cast<std::size_t>(spec.dim);
    std::vector<SamplePoint> out;
    out.reserve(static_cast<std::size_t>(want));
    Vec x(d), fvec(d);
    const std::int64_t max_attempts = want * 2000;
    for (std::int64_t att = 0; att < max_attempts && std::ssize(out) < want; ++att) {
        const std::uint64_t step = step_base + static_cast<std::uint64_t>(att);
        for (std::size_t i = 0; i < d; ++i)
            x[i] = region.lo[i] + (region.hi[i] - region.lo[i]) * uniform01(rng, step, i);
        if (region.pred && !region.pred(x)) continue;
        const double gap = std::abs(spec.value(x) - f_star);
        if (!(gap > band_lo && gap < band_hi)) continue;
        spec.gradient(x, fvec);
        SamplePoint p;
        p.x = x;
        p.grad = norm2(fvec);
        p.log_gap = std::log(gap);
        p.log_grad = p.grad > 0.0 ? std::log(p.grad) : -std::numeric_limits<double>::infinity();
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

LojaCertificate estimate_loja(const LandscapeSpec& spec, const Region& region, double f_star,
                              std::int64_t samples, double band_lo, double band_hi,
                              const RngStream& rng) {
    if (!(band_lo >= 0.0 && band_lo < band_hi))
        throw ParamError("estimate_loja: need 0 <= band_lo < band_hi");
    if (samples < 100) throw ParamError("estimate_loja: need at least 100 samples");

    auto pts = draw_band_samples(spec, region, f_star, samples, band_lo, band_hi, rng, 0);
    if (std::ssize(pts) < 100)
        throw ParamError("estimate_loja: insufficient data, only " + fmt(std::ssize(pts)) +
                         " samples accepted in the band");

    LojaCertificate cert;
    cert.landscape = spec.name;
    cert.region = region.describe;
    cert.level = f_star;
    cert.accepted = std::ssize(pts);

    // lower envelope: per-bin minima of log|f| over log-gap bins
    double lo = pts[0].log_gap, hi = pts[0].log_gap;
    for (const auto& p : pts) {
        lo = std::min(lo, p.log_gap);
        hi = std::max(hi, p.log_gap);
    }
    constexpr int kBins = 32;
    std::vector<double> bin_min(kBins, std::numeric_limits<double>::infinity());
    std::vector<double> bin_arg(kBins, 0.0);
    const double width = (hi - lo) > 0.0 ? (hi - lo) : 1.0;
    for (const auto& p : pts) {
        int b = static_cast<int>((p.log_gap - lo) / width * kBins);
        b = std::clamp(b, 0, kBins - 1);
        if (p.log_grad < bin_min[b]) {
            bin_min[b] = p.log_grad;
            bin_arg[b] = p.log_gap;
        }
    }
    std::vector<double> fx, fy;
    for (int b = 0; b < kBins; ++b) {
        if (std::isfinite(bin_min[b])) {
            fx.push_back(bin_arg[b]);
            fy.push_back(bin_min[b]);
        }
    }
    if (fx.size() < 2) throw ParamError("estimate_loja: degenerate band, fewer than 2 bins");
    const LineFit fit = fit_line(fx, fy);
    cert.beta_raw = fit.slope;
    cert.beta = std::clamp(fit.slope, 0.5, 1.0 - 1e-9);

    // minimal residual intercept at the clamped exponent, shrunk 5%
    double c_min = std::numeric_limits<double>::infinity();
    const SamplePoint* worst = nullptr;
    bool degenerate = false;
    for (const auto& p : pts) {
        if (!std::isfinite(p.log_grad)) {
            degenerate = true;  // a genuinely critical point inside the band
            worst = &p;
            break;
        }
        const double c = p.log_grad - cert.beta * p.log_gap;
        if (c < c_min) {
            c_min = c;
            worst = &p;
        }
    }
    if (worst) cert.worst_point = worst->x;
    if (degenerate) {
        cert.c_lower = 0.0;
        cert.certified = false;
        return cert;
    }
    cert.c_lower = 0.95 * std::exp(c_min);

    // fresh-sample audit
    auto audit = draw_band_samples(spec, region, f_star, samples, band_lo, band_hi, rng,
                                   static_cast<std::uint64_t>(samples) * 4000);
    bool ok = std::ssize(audit) >= 100;
    for (const auto& p : audit) {
        if (!std::isfinite(p.log_grad) ||
            p.grad < cert.c_lower * std::exp(cert.beta * p.log_gap)) {
            ok = false;
            break;
        }
    }
    cert.certified = ok;
    return cert;
}

Region neighborhood_fit(const LandscapeSpec& spec, double level, const Region& box, double eps) {
    if (!(eps > 0.0)) throw ParamError("neighborhood_fit: eps must be positive");
    Region r = box;
    r.describe = "band:level=" + fmt(level) + ",eps=" + fmt(eps) +
                 (box.describe.empty() ? "" : "," + box.describe);
    const auto value = spec.value;
    const auto inner = box.pred;
    r.pred = [value, inner, level, eps](std::span<const double> p) {
        if (inner && !inner(p)) return false;
        return std::abs(value(p) - level) < eps;
    };
    return r;
}

LojaCertificate merge_certificates(const std::vector<LojaCertificate>& certs,
                                   double range_bound) {
    if (certs.empty()) throw ParamError("merge_certificates: empty list");
    if (!(range_bound > 0.0)) throw ParamError("merge_certificates: range bound must be positive");
    LojaCertificate out = certs.front();
    double beta = 0.0;
    for (const auto& c : certs) beta = std::max(beta, c.beta);
    double c_l = std::numeric_limits<double>::infinity();
    bool cert_all = true;
    std::string regions;
    for (const auto& c : certs) {
        // |f| >= c |F-l|^{b} >= c R^{b - beta} |F-l|^{beta} on |F-l| <= R
        c_l = std::min(c_l, c.c_lower * std::pow(range_bound, c.beta - beta));
        cert_all = cert_all && c.certified;
        if (!regions.empty()) regions += "+";
        regions += c.region;
    }
    out.beta = beta;
    out.beta_raw = beta;
    out.c_lower = c_l;
    out.certified = cert_all;
    out.region = regions;
    return out;
}

}  // namespace sgdlab
