#include "sgdlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "sgdlab/analytic_mlp.hpp"
#include "sgdlab/errors.hpp"
#include "sgdlab/stats.hpp"
#include "sgdlab/textio.hpp"

namespace sgdlab {
namespace harness {

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_string(text, path);
}

Config Config::from_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + fmt(std::int64_t(line_no)) +
                              ": expected key=value, got '" + line + "'");
        const std::string key = strip(line.substr(0, eq));
        const std::string val = strip(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + fmt(std::int64_t(line_no)) + ": empty key");
        cfg.kv_[key] = val;
    }
    return cfg;
}

const std::string* Config::find(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return nullptr;
    touched_.insert(key);
    return &it->second;
}

bool Config::has(const std::string& key) const { return find(key) != nullptr; }

std::string Config::get_string(const std::string& key, const std::string& fallback) {
    const auto* v = find(key);
    return v ? *v : fallback;
}

std::string Config::require_string(const std::string& key) {
    const auto* v = find(key);
    if (!v) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    return *v;
}

namespace {

double parse_double(const std::string& s, const std::string& key) {
    double out;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    const auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc() || res.ptr != e)
        throw ConfigError("key '" + key + "': cannot parse '" + s + "' as a number");
    return out;
}

}  // namespace

double Config::get_double(const std::string& key, double fallback) {
    const auto* v = find(key);
    return v ? parse_double(*v, key) : fallback;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) {
    const auto* v = find(key);
    if (!v) return fallback;
    std::int64_t out;
    const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
    if (res.ec != std::errc() || res.ptr != v->data() + v->size())
        throw ConfigError("key '" + key + "': cannot parse '" + *v + "' as an integer");
    return out;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) {
    const auto* v = find(key);
    if (!v) return fallback;
    std::uint64_t out;
    const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
    if (res.ec != std::errc() || res.ptr != v->data() + v->size())
        throw ConfigError("key '" + key + "': cannot parse '" + *v + "' as an unsigned integer");
    return out;
}

bool Config::get_bool(const std::string& key, bool fallback) {
    const auto* v = find(key);
    if (!v) return fallback;
    if (*v == "1" || *v == "true") return true;
    if (*v == "0" || *v == "false") return false;
    throw ConfigError("key '" + key + "': expected 0/1/true/false, got '" + *v + "'");
}

Vec Config::get_vec(const std::string& key, const Vec& fallback) {
    const auto* v = find(key);
    if (!v) return fallback;
    Vec out;
    std::size_t pos = 0;
    while (pos <= v->size()) {
        std::size_t comma = v->find(',', pos);
        if (comma == std::string::npos) comma = v->size();
        out.push_back(parse_double(v->substr(pos, comma - pos), key));
        pos = comma + 1;
    }
    return out;
}

std::vector<int> Config::get_int_list(const std::string& key, const std::vector<int>& fallback) {
    if (!has(key)) return fallback;
    const Vec v = get_vec(key, {});
    std::vector<int> out;
    out.reserve(v.size());
    for (double d : v) out.push_back(static_cast<int>(d));
    return out;
}

void Config::override_kv(const std::string& key, const std::string& value) { kv_[key] = value; }

void Config::reject_unknown() const {
    for (const auto& [k, v] : kv_) {
        if (!touched_.count(k))
            throw ConfigError(origin_ + ": unknown key '" + k + "'");
    }
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

ExperimentConfig parse_experiment(Config& cfg, const std::string& kind) {
    ExperimentConfig ec;
    ec.kind = kind.empty() ? cfg.get_string("kind", "run") : kind;
    ec.seed = cfg.get_u64("seed", 1);
    ec.out_prefix = cfg.get_string("out", "out");
    ec.replicas = cfg.get_int("replicas", 1);
    if (ec.replicas < 1) throw ConfigError("replicas must be >= 1");

    ec.landscape = cfg.get_string("landscape", "quadratic");
    ec.dim = static_cast<int>(cfg.get_int("dim", 0));
    ec.x0 = cfg.get_vec("x0", {});
    ec.sched.c_gamma = cfg.get_double("gamma_c", 1.0);
    ec.sched.gamma_exp = cfg.get_double("gamma", 1.0);
    ec.noise.c_sigma = cfg.get_double("sigma_c", 0.0);
    ec.noise.sigma_exp = cfg.get_double("sigma", 0.0);
    ec.noise.q = cfg.get_double("q", 2.0);
    ec.noise.family = noise_family_from_string(cfg.get_string("noise", "gaussian"));
    ec.noise.pareto_tail = cfg.get_double("pareto_p", 2.0);
    ec.noise.calibrated_moment = cfg.get_double("pareto_moment", 1.5);
    ec.noise.batch_size = static_cast<int>(cfg.get_int("batch_size", 8));
    ec.horizon = cfg.get_int("horizon", 1000);
    ec.r_loc = cfg.get_double("r_loc", 10.0);
    ec.delta_excess = cfg.get_double("delta_excess", 0.5);
    ec.stride = cfg.get_int("stride", 0);

    if (cfg.get_bool("dropout", false)) {
        DropoutSpec ds;
        ds.f_star = cfg.get_double("dropout_level", 0.0);
        ds.c_w = cfg.get_double("dropout_cw", 1.0);
        ds.beta = cfg.get_double("dropout_beta", 0.75);
        ds.start_n = cfg.get_int("dropout_n", 1);
        ec.dropout = ds;
    }

    ec.tail_fraction = cfg.get_double("tail_fraction", 0.1);
    ec.eps_x = cfg.get_double("eps_x", 1e-2);
    ec.eps_f = cfg.get_double("eps_f", 1e-2);

    ec.f_star = cfg.get_double("f_star", 0.0);
    ec.beta_hat = cfg.get_double("beta", 0.0);
    ec.c_hat = cfg.get_double("c_l", 0.0);
    ec.delta_prime = cfg.get_double("delta_prime", 0.5);
    ec.beta_pad = cfg.get_double("beta_pad", 0.02);

    ec.samples = cfg.get_int("samples", 10000);
    ec.band_lo = cfg.get_double("band_lo", 1e-8);
    ec.band_hi = cfg.get_double("band_hi", 1e-1);
    ec.box_lo = cfg.get_vec("box_lo", {});
    ec.box_hi = cfg.get_vec("box_hi", {});
    ec.ball_radius = cfg.get_double("ball_radius", 0.0);
    ec.band_eps = cfg.get_double("band_eps", 0.0);

    ec.grid_per_dim = static_cast<int>(cfg.get_int("grid_per_dim", 201));
    ec.f_tol = cfg.get_double("f_tol", 1e-3);
    ec.merge_tol = cfg.get_double("merge_tol", 1e-6);

    ec.mart_beta = cfg.get_double("mart_beta", 2.0);
    ec.mart_a = cfg.get_double("mart_a", 1.0);
    ec.xi_family = cfg.get_string("xi", "gaussian");
    ec.xi_pareto_p = cfg.get_double("xi_pareto_p", 1.5);
    {
        const Vec ks = cfg.get_vec("kappas", {5.0, 10.0, 20.0});
        ec.kappas.assign(ks.begin(), ks.end());
    }

    ec.dataset_path = cfg.get_string("dataset", "");
    ec.widths = cfg.get_int_list("widths", {1, 2, 1});
    ec.activation = cfg.get_string("activation", "softplus");
    ec.teacher_m = cfg.get_int("teacher_m", 64);
    ec.input_scale = cfg.get_double("input_scale", 1.0);
    ec.x0_perturb = cfg.get_double("x0_perturb", 0.1);

    if (cfg.has("alpha1")) ec.alpha1 = cfg.get_double("alpha1", 0.0);
    if (cfg.has("alpha2")) ec.alpha2 = cfg.get_double("alpha2", 0.0);
    if (cfg.has("check_beta")) ec.check_beta = cfg.get_double("check_beta", 0.0);

    cfg.reject_unknown();
    return ec;
}

LandscapeSpec landscape_from_config(const ExperimentConfig& cfg) {
    if (cfg.landscape == "mlp") {
        mlp::Architecture arch;
        arch.widths = cfg.widths;
        arch.act = mlp::activation_from_string(cfg.activation);
        mlp::Dataset data;
        if (!cfg.dataset_path.empty()) {
            data = mlp::load_dataset(cfg.dataset_path);
        } else {
            data = mlp::make_teacher_student(arch, cfg.teacher_m, cfg.input_scale,
                                             RngStream{cfg.seed, 0xda7a})
                       .data;
        }
        if (data.d_in != arch.widths.front() || data.d_out != arch.widths.back())
            throw ConfigError("mlp: dataset dimensions do not match the architecture");
        return mlp::as_landscape(arch, data);
    }
    return cfg.dim > 0 ? catalog_get(cfg.landscape, cfg.dim) : catalog_get(cfg.landscape);
}

std::int64_t auto_stride(std::int64_t horizon, std::int64_t stride_key) {
    if (stride_key > 0) return stride_key;
    return std::max<std::int64_t>(1, horizon / 512);
}

EngineConfig engine_from_config(const ExperimentConfig& cfg, const LandscapeSpec& spec) {
    EngineConfig ec;
    ec.landscape = &spec;
    ec.schedule = cfg.sched;
    ec.noise = cfg.noise;
    ec.noise.dim = spec.dim;
    ec.x0 = cfg.x0;
    if (ec.x0.empty()) ec.x0.assign(static_cast<std::size_t>(spec.dim), 0.0);
    if (static_cast<int>(ec.x0.size()) != spec.dim)
        throw ConfigError("x0 dimension does not match the landscape");
    ec.horizon = cfg.horizon;
    ec.r_loc = cfg.r_loc;
    ec.delta_excess = cfg.delta_excess;
    ec.dropout = cfg.dropout;
    ec.stride = auto_stride(cfg.horizon, cfg.stride);
    return ec;
}

// ---------------------------------------------------------------------------
// Monte Carlo aggregation
// ---------------------------------------------------------------------------

namespace {

std::vector<std::int64_t> template_steps(const EngineConfig& cfg) {
    std::vector<std::int64_t> out;
    out.push_back(0);
    for (std::int64_t n = 1; n <= cfg.horizon; ++n)
        if (n % cfg.stride == 0 || n == cfg.horizon || n == cfg.extra_record_n)
            out.push_back(n);
    return out;
}

struct IndexAccum {
    double s1 = 0.0;  // sum of 1_B (F - F*)
    double s2 = 0.0;
    std::int64_t count = 0;   // event cell size
    double gap_sum = 0.0;     // conditional sums over the cell
    double grad_sum = 0.0;
    Vec mean;  // Welford over cell, per coordinate
    Vec m2;
    double t = 0.0;
};

}  // namespace

McSummary monte_carlo(const EngineConfig& engine, std::int64_t replicas, std::uint64_t seed,
                      double f_star, double tail_fraction, double eps_x, double eps_f,
                      bool keep_final_points) {
    validate(engine);
    McSummary sum;
    sum.replicas = replicas;
    const std::vector<std::int64_t> steps = template_steps(engine);
    const std::size_t d = static_cast<std::size_t>(engine.landscape->dim);
    std::vector<IndexAccum> acc(steps.size());
    for (auto& a : acc) {
        a.mean.assign(d, 0.0);
        a.m2.assign(d, 0.0);
    }
    if (keep_final_points) sum.final_points.resize(static_cast<std::size_t>(replicas));

    const std::int64_t chunk = std::max<std::int64_t>(
        4, 4 * static_cast<std::int64_t>(std::thread::hardware_concurrency()));
    std::vector<TrajectoryRecord> recs(static_cast<std::size_t>(chunk));

    for (std::int64_t base = 0; base < replicas; base += chunk) {
        const std::int64_t batch = std::min(chunk, replicas - base);
        parallel_for(static_cast<std::size_t>(batch), [&](std::size_t i) {
            const RngStream stream{seed, static_cast<std::uint64_t>(base + std::int64_t(i) + 1)};
            recs[i] = run(engine, stream);
        });
        // reduce in replica order
        for (std::int64_t i = 0; i < batch; ++i) {
            const TrajectoryRecord& rec = recs[static_cast<std::size_t>(i)];
            if (!rec.locality_exit) ++sum.stayed_local;
            if (!rec.excess_exit) ++sum.excess_ok;
            if (!rec.dropout_time) ++sum.no_dropout;
            if (rec.overflow_at) ++sum.overflowed;
            const Classification cls =
                classify_convergence(rec, tail_fraction, eps_x, eps_f);
            ++sum.class_count[static_cast<int>(cls)];
            if (keep_final_points) {
                const auto x = rec.x_at(rec.steps.size() - 1);
                sum.final_points[static_cast<std::size_t>(base + i)].assign(x.begin(), x.end());
            }
            std::size_t row = 0;
            for (std::size_t j = 0; j < rec.steps.size(); ++j) {
                while (row < steps.size() && steps[row] < rec.steps[j]) ++row;
                if (row >= steps.size() || steps[row] != rec.steps[j]) continue;
                IndexAccum& a = acc[row];
                a.t = rec.t[j];
                const bool ind = rec.event_indicator(rec.steps[j]);
                const double gap = rec.f_value[j] - f_star;
                const double weighted = ind ? gap : 0.0;
                a.s1 += weighted;
                a.s2 += weighted * weighted;
                if (ind) {
                    ++a.count;
                    a.gap_sum += gap;
                    a.grad_sum += rec.grad_norm[j];
                    const auto x = rec.x_at(j);
                    for (std::size_t k = 0; k < d; ++k) {
                        const double delta = x[k] - a.mean[k];
                        a.mean[k] += delta / static_cast<double>(a.count);
                        a.m2[k] += delta * (x[k] - a.mean[k]);
                    }
                }
            }
        }
    }

    sum.rows.reserve(steps.size());
    const double m = static_cast<double>(replicas);
    for (std::size_t row = 0; row < steps.size(); ++row) {
        const IndexAccum& a = acc[row];
        McIndexRow r;
        r.n = steps[row];
        r.t = a.t;
        r.event_count = a.count;
        r.iw_mean = a.s1 / m;
        if (replicas > 1) {
            const double var = std::max(0.0, (a.s2 - m * r.iw_mean * r.iw_mean) / (m - 1.0));
            r.iw_se = std::sqrt(var / m);
        }
        r.low_count = a.count < 30;
        if (a.count > 0) {
            r.cond_gap = a.gap_sum / static_cast<double>(a.count);
            r.cond_grad = a.grad_sum / static_cast<double>(a.count);
            if (a.count > 1) {
                double v = 0.0;
                for (std::size_t k = 0; k < d; ++k)
                    v += a.m2[k] / static_cast<double>(a.count - 1);
                r.dispersion = std::sqrt(v);
            }
        }
        sum.rows.push_back(r);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

void emit_csv(std::span<const TrajectoryRecord> records,
              std::span<const std::int64_t> replica_ids, const std::string& path) {
    if (records.size() != replica_ids.size())
        throw ParamError("emit_csv: one replica id per record required");
    std::string out = "replica,n,t_n,F,gradnorm,xnorm,in_locality,excess_ok,above_dropout\n";
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return replica_ids[a] < replica_ids[b];
    });
    for (std::size_t oi : order) {
        const TrajectoryRecord& rec = records[oi];
        for (std::size_t j = 0; j < rec.steps.size(); ++j) {
            out += fmt(replica_ids[oi]);
            out += ',';
            out += fmt(rec.steps[j]);
            out += ',';
            out += fmt(rec.t[j]);
            out += ',';
            out += fmt(rec.f_value[j]);
            out += ',';
            out += fmt(rec.grad_norm[j]);
            out += ',';
            out += fmt(norm2(rec.x_at(j)));
            out += ',';
            out += fmt(rec.in_locality[j] != 0);
            out += ',';
            out += fmt(rec.excess_ok[j] != 0);
            out += ',';
            out += fmt(rec.above_dropout[j] != 0);
            out += '\n';
        }
    }
    write_text_file(path, out);
}

namespace {

std::string mc_csv(const McSummary& s) {
    std::string out =
        "n,t_n,event_count,iw_mean,iw_se,cond_gap,cond_grad,dispersion,low_count\n";
    for (const auto& r : s.rows) {
        out += fmt(r.n);
        out += ',';
        out += fmt(r.t);
        out += ',';
        out += fmt(r.event_count);
        out += ',';
        out += fmt(r.iw_mean);
        out += ',';
        out += fmt(r.iw_se);
        out += ',';
        out += fmt(r.cond_gap);
        out += ',';
        out += fmt(r.cond_grad);
        out += ',';
        out += fmt(r.dispersion);
        out += ',';
        out += fmt(r.low_count);
        out += '\n';
    }
    return out;
}

std::string mc_summary_text(const ExperimentConfig& cfg, const McSummary& s) {
    std::string out;
    out += "kind=" + cfg.kind + "\n";
    out += "landscape=" + cfg.landscape + "\n";
    out += "replicas=" + fmt(s.replicas) + "\n";
    out += "seed=" + fmt(cfg.seed) + "\n";
    out += "horizon=" + fmt(cfg.horizon) + "\n";
    out += "stayed_local=" + fmt(s.stayed_local) + "\n";
    out += "excess_ok=" + fmt(s.excess_ok) + "\n";
    out += "no_dropout=" + fmt(s.no_dropout) + "\n";
    out += "overflowed=" + fmt(s.overflowed) + "\n";
    out += "class.converged_point=" + fmt(s.class_count[0]) + "\n";
    out += "class.converged_level_only=" + fmt(s.class_count[1]) + "\n";
    out += "class.diverged=" + fmt(s.class_count[2]) + "\n";
    out += "class.escaped=" + fmt(s.class_count[3]) + "\n";
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Experiment dispatch
// ---------------------------------------------------------------------------

RunOutput run_experiment(const ExperimentConfig& cfg) {
    RunOutput out;
    if (cfg.kind == "run" || cfg.kind == "mlp_train") {
        ExperimentConfig ec = cfg;
        LandscapeSpec spec = landscape_from_config(ec);
        if (cfg.kind == "mlp_train" && ec.landscape != "mlp")
            throw ConfigError("mlp_train requires landscape=mlp");
        if (ec.landscape == "mlp" && ec.x0.empty()) {
            mlp::Architecture arch;
            arch.widths = ec.widths;
            arch.act = mlp::activation_from_string(ec.activation);
            // start near the teacher when the data is teacher generated
            Vec theta = ec.dataset_path.empty()
                            ? mlp::make_teacher_student(arch, ec.teacher_m, ec.input_scale,
                                                        RngStream{ec.seed, 0xda7a})
                                  .teacher_theta
                            : mlp::random_theta(arch, 1.0, RngStream{ec.seed, 0x7e7a});
            if (ec.dataset_path.empty() && ec.x0_perturb > 0.0) {
                for (std::size_t i = 0; i < theta.size(); ++i)
                    theta[i] += ec.x0_perturb * normal01(RngStream{ec.seed, 0x9e97}, 1, i);
            }
            ec.x0 = std::move(theta);
        }
        const EngineConfig eng = engine_from_config(ec, spec);
        const TrajectoryRecord rec = run(eng, RngStream{ec.seed, 1});
        const std::string csv_path = ec.out_prefix + "_trajectory.csv";
        const std::int64_t id = 1;
        emit_csv({&rec, 1}, {&id, 1}, csv_path);
        out.files.push_back(csv_path);

        std::string txt;
        txt += "kind=" + ec.kind + "\n";
        txt += "landscape=" + ec.landscape + "\n";
        txt += "seed=" + fmt(ec.seed) + "\n";
        txt += "horizon=" + fmt(ec.horizon) + "\n";
        txt += "steps_taken=" + fmt(rec.steps_taken) + "\n";
        txt += "final_F=" + fmt(rec.f_value.back()) + "\n";
        txt += "final_gradnorm=" + fmt(rec.grad_norm.back()) + "\n";
        txt += "classification=" +
               to_string(classify_convergence(rec, ec.tail_fraction, ec.eps_x, ec.eps_f)) + "\n";
        txt += "locality_exit=" + (rec.locality_exit ? fmt(*rec.locality_exit) : "none") + "\n";
        txt += "excess_exit=" + (rec.excess_exit ? fmt(*rec.excess_exit) : "none") + "\n";
        txt += "dropout_time=" + (rec.dropout_time ? fmt(*rec.dropout_time) : "none") + "\n";
        txt += "overflow_at=" + (rec.overflow_at ? fmt(*rec.overflow_at) : "none") + "\n";
        const std::string sum_path = ec.out_prefix + "_summary.txt";
        write_text_file(sum_path, txt);
        out.files.push_back(sum_path);
        out.summary_text = txt;
        return out;
    }
    if (cfg.kind == "mc") {
        LandscapeSpec spec = landscape_from_config(cfg);
        const EngineConfig eng = engine_from_config(cfg, spec);
        const McSummary s = monte_carlo(eng, cfg.replicas, cfg.seed, cfg.f_star,
                                        cfg.tail_fraction, cfg.eps_x, cfg.eps_f);
        const std::string csv_path = cfg.out_prefix + "_mc.csv";
        write_text_file(csv_path, mc_csv(s));
        out.files.push_back(csv_path);
        const std::string txt = mc_summary_text(cfg, s);
        const std::string sum_path = cfg.out_prefix + "_summary.txt";
        write_text_file(sum_path, txt);
        out.files.push_back(sum_path);
        out.summary_text = txt;
        return out;
    }
    if (cfg.kind == "estimate_loja") {
        LandscapeSpec spec = landscape_from_config(cfg);
        Region region = cfg.ball_radius > 0.0
                            ? Region::ball(cfg.x0, cfg.ball_radius)
                            : Region::box(cfg.box_lo, cfg.box_hi);
        if (cfg.band_eps > 0.0)
            region = neighborhood_fit(spec, cfg.f_star, region, cfg.band_eps);
        const LojaCertificate cert = estimate_loja(spec, region, cfg.f_star, cfg.samples,
                                                   cfg.band_lo, cfg.band_hi,
                                                   RngStream{cfg.seed, 0x10ca});
        const std::string path = cfg.out_prefix + "_certificate.txt";
        write_text_file(path, cert.to_text());
        out.files.push_back(path);
        out.summary_text = cert.to_text();
        return out;
    }
    if (cfg.kind == "bound_compare") {
        const BoundCompareResult res = bound_compare(cfg);
        std::string csv = "n,t_n,event_count,iw_mean,iw_se,bound,consolidated,violation\n";
        for (std::size_t i = 0; i < res.rows.size(); ++i) {
            const auto& r = res.rows[i];
            csv += fmt(r.n);
            csv += ',';
            csv += fmt(r.t);
            csv += ',';
            csv += fmt(r.event_count);
            csv += ',';
            csv += fmt(r.iw_mean);
            csv += ',';
            csv += fmt(r.iw_se);
            csv += ',';
            csv += fmt(res.bound[i]);
            csv += ',';
            csv += fmt(res.consolidated[i]);
            csv += ',';
            csv += fmt(static_cast<bool>(res.violation[i]));
            csv += '\n';
        }
        const std::string csv_path = cfg.out_prefix + "_bound.csv";
        write_text_file(csv_path, csv);
        out.files.push_back(csv_path);

        std::string txt;
        txt += "kind=bound_compare\n";
        txt += "landscape=" + cfg.landscape + "\n";
        txt += "replicas=" + fmt(res.replicas) + "\n";
        txt += "stayed_local=" + fmt(res.stayed_local) + "\n";
        txt += "beta=" + fmt(res.params.beta) + "\n";
        txt += "c_l=" + fmt(res.params.c_l) + "\n";
        txt += "delta=" + fmt(res.params.delta) + "\n";
        txt += "delta_prime=" + fmt(res.params.delta_prime) + "\n";
        txt += "kappa=" + fmt(res.params.kappa) + "\n";
        txt += "c_v=" + fmt(res.params.c_v) + "\n";
        txt += "c_w=" + fmt(res.params.c_w) + "\n";
        txt += "y0=" + fmt(res.params.y0) + "\n";
        txt += "eta=" + fmt(res.params.eta) + "\n";
        txt += "R=" + fmt(res.params.big_r) + "\n";
        txt += "N=" + fmt(res.params.start_n) + "\n";
        txt += "sup_ratio=" + fmt(res.params.sup_ratio) + "\n";
        txt += "master_feasible=" + fmt(res.params.master_feasible) + "\n";
        txt += "headline_se_units=" + fmt(res.headline) + "\n";
        txt += "min_slack_ratio=" + fmt(res.min_slack_ratio) + "\n";
        bool any_violation = false;
        for (const auto v : res.violation) any_violation = any_violation || v;
        txt += "any_violation=" + fmt(any_violation) + "\n";
        txt += res.prop_assu.to_text();
        const std::string sum_path = cfg.out_prefix + "_summary.txt";
        write_text_file(sum_path, txt);
        out.files.push_back(sum_path);
        out.summary_text = txt;
        out.hypothesis_ok = true;
        return out;
    }
    if (cfg.kind == "martingale_lemma") {
        const MartingaleResult res = martingale_lemma_experiment(cfg);
        std::string csv = "kappa,exceed_count,freq,ci_half,bound,pass\n";
        for (const auto& r : res.rows) {
            csv += fmt(r.kappa);
            csv += ',';
            csv += fmt(r.exceed_count);
            csv += ',';
            csv += fmt(r.freq);
            csv += ',';
            csv += fmt(r.ci_half);
            csv += ',';
            csv += fmt(r.bound);
            csv += ',';
            csv += fmt(r.pass);
            csv += '\n';
        }
        const std::string csv_path = cfg.out_prefix + "_mart.csv";
        write_text_file(csv_path, csv);
        out.files.push_back(csv_path);

        std::string txt;
        txt += "kind=martingale_lemma\n";
        txt += "replicas=" + fmt(res.replicas) + "\n";
        txt += "bracket_applicable=" + fmt(res.bracket_applicable) + "\n";
        txt += "osc_median=" + fmt(res.osc_median) + "\n";
        txt += "osc_q90=" + fmt(res.osc_q90) + "\n";
        txt += "tail_std=" + fmt(res.tail_std) + "\n";
        txt += "convergence_pass=" + fmt(res.convergence_pass) + "\n";
        bool all_pass = true;
        for (const auto& r : res.rows) all_pass = all_pass && r.pass;
        txt += "tail_bound_pass=" + fmt(all_pass) + "\n";
        const std::string sum_path = cfg.out_prefix + "_summary.txt";
        write_text_file(sum_path, txt);
        out.files.push_back(sum_path);
        out.summary_text = txt;
        return out;
    }
    if (cfg.kind == "dropout_bound") {
        const DropoutResult res = dropout_experiment(cfg);
        std::string csv = "n_prime,count,excursions,rho\n";
        for (const auto& c : res.cells) {
            csv += fmt(c.n_prime);
            csv += ',';
            csv += fmt(c.count);
            csv += ',';
            csv += fmt(c.excursions);
            csv += ',';
            csv += fmt(c.rho);
            csv += '\n';
        }
        const std::string csv_path = cfg.out_prefix + "_dropout.csv";
        write_text_file(csv_path, csv);
        out.files.push_back(csv_path);

        std::string txt;
        txt += "kind=dropout_bound\n";
        txt += "replicas=" + fmt(res.replicas) + "\n";
        txt += "dropout_count=" + fmt(res.dropout_count) + "\n";
        txt += "excursion_count=" + fmt(res.excursion_count) + "\n";
        txt += "freq=" + fmt(res.freq) + "\n";
        txt += "ci_half=" + fmt(res.ci_half) + "\n";
        txt += "pooled_bound=" + fmt(res.pooled_bound) + "\n";
        txt += "verdict=" + res.verdict + "\n";
        const std::string sum_path = cfg.out_prefix + "_summary.txt";
        write_text_file(sum_path, txt);
        out.files.push_back(sum_path);
        out.summary_text = txt;
        return out;
    }
    if (cfg.kind == "gen_teacher_data") {
        mlp::Architecture arch;
        arch.widths = cfg.widths;
        arch.act = mlp::activation_from_string(cfg.activation);
        const auto ts = mlp::make_teacher_student(arch, cfg.teacher_m, cfg.input_scale,
                                                  RngStream{cfg.seed, 0xda7a});
        const std::string path =
            cfg.dataset_path.empty() ? cfg.out_prefix + "_data.txt" : cfg.dataset_path;
        mlp::save_dataset(ts.data, path);
        out.files.push_back(path);
        out.summary_text = "samples=" + fmt(std::int64_t(ts.data.size())) + "\nbound=" +
                           fmt(ts.data.bound) + "\n";
        return out;
    }
    throw ConfigError("unknown experiment kind '" + cfg.kind + "'");
}

}  // namespace harness
}  // namespace sgdlab
