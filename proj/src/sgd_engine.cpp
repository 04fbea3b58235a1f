#include "sgdlab/sgd_engine.hpp"

#include <cmath>

#include "sgdlab/errors.hpp"
#include "sgdlab/textio.hpp"

namespace sgdlab {

void validate(const EngineConfig& cfg) {
    if (cfg.landscape == nullptr) throw ConfigError("engine: landscape missing");
    if (cfg.horizon < 1) throw ConfigError("engine: horizon must be >= 1");
    if (cfg.stride < 1) throw ConfigError("engine: record stride must be >= 1");
    if (static_cast<int>(cfg.x0.size()) != cfg.landscape->dim)
        throw ConfigError("engine: X0 dimension does not match the landscape");
    if (!(cfg.r_loc > norm2(cfg.x0)))
        throw ConfigError("engine: locality radius must exceed |X0|");
    if (!(cfg.delta_excess > 0.0)) throw ConfigError("engine: excess threshold must be positive");
    if (cfg.noise.dim != cfg.landscape->dim)
        throw ConfigError("engine: noise dimension does not match the landscape");
    if (cfg.noise.family == NoiseFamily::Minibatch) {
        if (!cfg.landscape->batch_gradient || cfg.landscape->dataset_size == 0)
            throw ConfigError(
                "engine: minibatch noise needs a dataset-backed landscape (batch gradient hook)");
        if (cfg.noise.batch_size < 1) throw ConfigError("engine: batch size must be >= 1");
    }
    if (cfg.dropout) {
        if (!(cfg.dropout->beta > 0.5 && cfg.dropout->beta < 1.0))
            throw ConfigError("engine: dropout beta must lie in (1/2, 1)");
        if (!(cfg.dropout->c_w > 0.0)) throw ConfigError("engine: dropout C_w must be positive");
        if (cfg.dropout->start_n < 1) throw ConfigError("engine: dropout start must be >= 1");
    }
}

bool TrajectoryRecord::event_indicator(std::int64_t n) const {
    if (locality_exit && *locality_exit <= n - 1) return false;
    if (excess_exit && *excess_exit <= n) return false;
    if (dropout_time && *dropout_time <= n) return false;
    if (overflow_at && *overflow_at <= n) return false;
    return true;
}

namespace {

// Noise for one step; minibatch noise is the centered resampled gradient.
Vec draw_noise(const EngineConfig& cfg, std::span<const double> x, std::span<const double> grad,
               std::int64_t n, const RngStream& rng) {
    if (cfg.noise.family != NoiseFamily::Minibatch) return sample_noise(cfg.noise, n, rng);
    const std::size_t d = x.size();
    std::vector<std::size_t> batch(static_cast<std::size_t>(cfg.noise.batch_size));
    for (std::size_t i = 0; i < batch.size(); ++i)
        batch[i] = static_cast<std::size_t>(uniform_index(
            rng, static_cast<std::uint64_t>(n), i, cfg.landscape->dataset_size));
    Vec g_batch(d, 0.0);
    cfg.landscape->batch_gradient(x, batch, g_batch);
    for (std::size_t i = 0; i < d; ++i) g_batch[i] -= grad[i];
    return g_batch;
}

}  // namespace

std::pair<Vec, Vec> step(std::span<const double> x, std::int64_t n, const EngineConfig& cfg,
                         const RngStream& rng) {
    if (!all_finite(x)) throw ParamError("step: iterate must be finite");
    if (n < 1) throw ParamError("step: n must be >= 1");
    const Vec g = cfg.landscape->grad(x);
    const Vec d = draw_noise(cfg, x, g, n, rng);
    const double gamma = gamma_at(cfg.schedule, n);
    Vec next(x.begin(), x.end());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] -= gamma * (g[i] + d[i]);
    if (!all_finite(next))
        throw NumericError("step: non-finite iterate at n=" + fmt(n));
    return {std::move(next), d};
}

TrajectoryRecord run(const EngineConfig& cfg, const RngStream& rng) {
    validate(cfg);
    const LandscapeSpec& land = *cfg.landscape;
    const std::size_t d = static_cast<std::size_t>(land.dim);

    TrajectoryRecord rec;
    rec.dim = land.dim;

    const double dropout_exp =
        cfg.dropout ? -1.0 / (2.0 * cfg.dropout->beta - 1.0) : 0.0;

    Vec x(cfg.x0);
    Vec avg(cfg.x0);
    Vec grad(d);
    double t_now = 0.0;
    double f_now = land.F(x);

    // per-step flag state, tracked at full resolution
    bool loc_now = norm2(x) <= cfg.r_loc;
    bool exc_now = true;
    bool drop_now = true;
    if (!loc_now) rec.locality_exit = 0;

    const auto push_record = [&](std::int64_t n) {
        rec.steps.push_back(n);
        rec.x.insert(rec.x.end(), x.begin(), x.end());
        land.gradient(x, grad);
        rec.f_value.push_back(f_now);
        rec.grad_norm.push_back(norm2(grad));
        rec.t.push_back(t_now);
        rec.in_locality.push_back(loc_now ? 1 : 0);
        rec.excess_ok.push_back(exc_now ? 1 : 0);
        rec.above_dropout.push_back(drop_now ? 1 : 0);
        rec.running_avg.insert(rec.running_avg.end(), avg.begin(), avg.end());
    };

    push_record(0);

    std::int64_t n = 1;
    for (; n <= cfg.horizon; ++n) {
        land.gradient(x, grad);
        const Vec noise = draw_noise(cfg, x, grad, n, rng);
        const double gamma = gamma_at(cfg.schedule, n);
        for (std::size_t i = 0; i < d; ++i) x[i] -= gamma * (grad[i] + noise[i]);
        t_now += gamma;

        const double f_next = land.F(x);
        if (!all_finite(x) || !std::isfinite(f_next)) {
            rec.overflow_at = n;
            break;
        }
        f_now = f_next;

        loc_now = norm2(x) <= cfg.r_loc;
        if (!loc_now && !rec.locality_exit) rec.locality_exit = n;

        exc_now = gamma * norm2(noise) <= cfg.delta_excess;
        if (!exc_now && !rec.excess_exit) rec.excess_exit = n;

        drop_now = true;
        if (cfg.dropout && n >= cfg.dropout->start_n) {
            const double w_n = cfg.dropout->c_w * std::pow(t_now, dropout_exp);
            drop_now = f_now - cfg.dropout->f_star >= -w_n;
            if (!drop_now && !rec.dropout_time) rec.dropout_time = n;
        }

        const double dn = static_cast<double>(n);
        for (std::size_t i = 0; i < d; ++i) avg[i] += (x[i] - avg[i]) / (dn + 1.0);

        if (n % cfg.stride == 0 || n == cfg.horizon || n == cfg.extra_record_n) push_record(n);
    }
    rec.steps_taken = rec.overflow_at ? *rec.overflow_at - 1 : cfg.horizon;
    return rec;
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::ConvergedPoint: return "converged_point";
        case Classification::ConvergedLevelOnly: return "converged_level_only";
        case Classification::Diverged: return "diverged";
        case Classification::Escaped: return "escaped";
    }
    return "?";
}

Classification classify_convergence(const TrajectoryRecord& rec, double tail_fraction,
                                    double eps_x, double eps_f) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw ParamError("classify_convergence: tail fraction must lie in (0, 1)");
    if (rec.locality_exit) return Classification::Escaped;
    if (rec.steps.empty()) throw ParamError("classify_convergence: empty record");

    const std::int64_t last = rec.steps.back();
    const std::int64_t cutoff =
        static_cast<std::int64_t>(std::floor((1.0 - tail_fraction) * static_cast<double>(last)));
    std::size_t first_idx = rec.steps.size();
    for (std::size_t i = 0; i < rec.steps.size(); ++i) {
        if (rec.steps[i] >= cutoff) {
            first_idx = i;
            break;
        }
    }
    if (first_idx >= rec.steps.size())
        throw ParamError("classify_convergence: tail window is empty");

    double max_pair = 0.0;
    for (std::size_t i = first_idx; i < rec.steps.size(); ++i)
        for (std::size_t j = i + 1; j < rec.steps.size(); ++j)
            max_pair = std::max(max_pair, dist2(rec.x_at(i), rec.x_at(j)));

    double mean_grad = 0.0;
    double f_min = rec.f_value[first_idx], f_max = rec.f_value[first_idx];
    std::size_t count = 0;
    for (std::size_t i = first_idx; i < rec.steps.size(); ++i) {
        mean_grad += rec.grad_norm[i];
        f_min = std::min(f_min, rec.f_value[i]);
        f_max = std::max(f_max, rec.f_value[i]);
        ++count;
    }
    mean_grad /= static_cast<double>(count);

    if (max_pair <= eps_x && mean_grad <= eps_f) return Classification::ConvergedPoint;
    if (f_max - f_min <= eps_f && max_pair > eps_x) return Classification::ConvergedLevelOnly;
    return Classification::Diverged;
}

}  // namespace sgdlab
