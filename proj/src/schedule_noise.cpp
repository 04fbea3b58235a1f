#include "sgdlab/schedule_noise.hpp"

#include <cmath>

#include "sgdlab/errors.hpp"

namespace sgdlab {

double gamma_at(const StepSchedule& s, std::int64_t n) {
    if (n < 1) throw ParamError("gamma_at: n must be >= 1");
    if (!(s.c_gamma > 0.0)) throw ParamError("gamma_at: C_gamma must be positive");
    if (s.gamma_exp < 0.0) throw ParamError("gamma_at: gamma exponent must be >= 0");
    return s.c_gamma * std::pow(static_cast<double>(n), -s.gamma_exp);
}

double natural_time(const StepSchedule& s, std::int64_t n) {
    if (n < 0) throw ParamError("natural_time: n must be >= 0");
    double t = 0.0;
    for (std::int64_t l = 1; l <= n; ++l) t += gamma_at(s, l);
    return t;
}

NaturalTime::NaturalTime(const StepSchedule& s, std::int64_t n_max) {
    if (n_max < 0) throw ParamError("NaturalTime: horizon must be >= 0");
    prefix_.resize(static_cast<std::size_t>(n_max) + 1);
    prefix_[0] = 0.0;
    double t = 0.0;
    for (std::int64_t l = 1; l <= n_max; ++l) {
        t += gamma_at(s, l);
        prefix_[static_cast<std::size_t>(l)] = t;
    }
}

double NaturalTime::at(std::int64_t n) const {
    if (n < 0 || n >= static_cast<std::int64_t>(prefix_.size()))
        throw ParamError("NaturalTime::at: index outside cached horizon");
    return prefix_[static_cast<std::size_t>(n)];
}

NoiseFamily noise_family_from_string(const std::string& tag) {
    if (tag == "gaussian") return NoiseFamily::Gaussian;
    if (tag == "bounded_uniform") return NoiseFamily::BoundedUniform;
    if (tag == "heavy_tailed") return NoiseFamily::HeavyTailed;
    if (tag == "minibatch") return NoiseFamily::Minibatch;
    throw ParamError("unknown noise family '" + tag +
                     "'; expected gaussian | bounded_uniform | heavy_tailed | minibatch");
}

std::string to_string(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::Gaussian: return "gaussian";
        case NoiseFamily::BoundedUniform: return "bounded_uniform";
        case NoiseFamily::HeavyTailed: return "heavy_tailed";
        case NoiseFamily::Minibatch: return "minibatch";
    }
    return "?";
}

double sigma_at(const NoiseSpec& ns, std::int64_t n) {
    if (n < 1) throw ParamError("sigma_at: n must be >= 1");
    if (ns.c_sigma < 0.0) throw ParamError("sigma_at: C_sigma must be >= 0");
    return ns.c_sigma * std::pow(static_cast<double>(n), ns.sigma_exp);
}

Vec sample_noise(const NoiseSpec& ns, std::int64_t n, const RngStream& rng) {
    if (n < 1) throw ParamError("sample_noise: n must be >= 1");
    if (ns.dim < 1) throw ParamError("sample_noise: dimension must be positive");
    const std::size_t d = static_cast<std::size_t>(ns.dim);
    const double sn = sigma_at(ns, n);
    Vec out(d, 0.0);
    if (sn == 0.0) return out;
    const std::uint64_t step = static_cast<std::uint64_t>(n);

    switch (ns.family) {
        case NoiseFamily::Gaussian: {
            const double scale = sn / std::sqrt(static_cast<double>(d));
            for (std::size_t i = 0; i < d; ++i) out[i] = scale * normal01(rng, step, i);
            return out;
        }
        case NoiseFamily::BoundedUniform: {
            const double scale = sn * std::sqrt(3.0) / std::sqrt(static_cast<double>(d));
            for (std::size_t i = 0; i < d; ++i)
                out[i] = scale * (2.0 * uniform01(rng, step, i) - 1.0);
            return out;
        }
        case NoiseFamily::HeavyTailed: {
            const double p = ns.pareto_tail;
            if (!(p > 1.0)) throw ParamError("sample_noise: heavy_tailed requires tail index > 1");
            double pp = ns.calibrated_moment;
            if (!(pp > 0.0 && pp < p))
                throw ParamError("sample_noise: calibrated moment p' must lie in (0, p)");
            // magnitude Pareto(p) on [1, inf), direction uniform on the sphere
            const double u = uniform01(rng, step, 2 * d);
            const double mag = std::pow(1.0 - u, -1.0 / p);
            const double kappa = std::pow(p / (p - pp), 1.0 / pp);
            Vec dir(d);
            double nrm = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                dir[i] = normal01(rng, step, i);
                nrm += dir[i] * dir[i];
            }
            nrm = std::sqrt(nrm);
            if (nrm == 0.0) nrm = 1.0;
            const double scale = sn * mag / (kappa * nrm);
            for (std::size_t i = 0; i < d; ++i) out[i] = scale * dir[i];
            return out;
        }
        case NoiseFamily::Minibatch:
            throw ParamError(
                "sample_noise: minibatch noise is position dependent and is produced by the "
                "engine against a dataset-backed landscape");
    }
    throw ParamError("sample_noise: unhandled family");
}

}  // namespace sgdlab
