#include "sgdlab/analytic_mlp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>

#include "sgdlab/errors.hpp"
#include "sgdlab/textio.hpp"

namespace sgdlab {
namespace mlp {

Activation activation_from_string(const std::string& tag) {
    if (tag == "softplus") return Activation::Softplus;
    if (tag == "tanh") return Activation::Tanh;
    if (tag == "sigmoid") return Activation::Sigmoid;
    throw ParamError("unknown activation '" + tag + "'; expected softplus | tanh | sigmoid");
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Softplus: return "softplus";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "?";
}

void Architecture::validate() const {
    if (widths.size() < 2) throw ParamError("architecture: need at least input and output widths");
    for (int w : widths)
        if (w < 1) throw ParamError("architecture: all widths must be >= 1");
}

std::size_t Architecture::param_count() const {
    std::size_t p = 0;
    for (std::size_t l = 1; l < widths.size(); ++l)
        p += static_cast<std::size_t>(widths[l]) * static_cast<std::size_t>(widths[l - 1]) +
             static_cast<std::size_t>(widths[l]);
    return p;
}

std::size_t Architecture::weight_offset(int layer) const {
    std::size_t off = 0;
    for (int l = 1; l < layer; ++l)
        off += static_cast<std::size_t>(widths[static_cast<std::size_t>(l)]) *
                   static_cast<std::size_t>(widths[static_cast<std::size_t>(l) - 1]) +
               static_cast<std::size_t>(widths[static_cast<std::size_t>(l)]);
    return off;
}

std::size_t Architecture::bias_offset(int layer) const {
    return weight_offset(layer) +
           static_cast<std::size_t>(widths[static_cast<std::size_t>(layer)]) *
               static_cast<std::size_t>(widths[static_cast<std::size_t>(layer) - 1]);
}

namespace {

double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

double logistic(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

double act_value(Activation a, double u) {
    switch (a) {
        case Activation::Softplus: return softplus(u);
        case Activation::Tanh: return std::tanh(u);
        case Activation::Sigmoid: return logistic(u);
    }
    return 0.0;
}

double act_deriv(Activation a, double u) {
    switch (a) {
        case Activation::Softplus: return logistic(u);
        case Activation::Tanh: {
            const double t = std::tanh(u);
            return 1.0 - t * t;
        }
        case Activation::Sigmoid: {
            const double s = logistic(u);
            return s * (1.0 - s);
        }
    }
    return 0.0;
}

// Forward pass keeping pre-activations; scratch holds one buffer per layer.
struct Workspace {
    std::vector<Vec> pre;   // z_1 .. z_L
    std::vector<Vec> post;  // h_0 = x, h_1 .. h_{L-1}
};

void forward(const Architecture& arch, std::span<const double> theta, std::span<const double> x,
             Workspace& ws) {
    const int depth = arch.depth();
    ws.pre.resize(static_cast<std::size_t>(depth));
    ws.post.resize(static_cast<std::size_t>(depth));
    ws.post[0].assign(x.begin(), x.end());
    for (int l = 1; l <= depth; ++l) {
        const int rows = arch.widths[static_cast<std::size_t>(l)];
        const int cols = arch.widths[static_cast<std::size_t>(l) - 1];
        const double* w = theta.data() + arch.weight_offset(l);
        const double* b = theta.data() + arch.bias_offset(l);
        const Vec& in = ws.post[static_cast<std::size_t>(l) - 1];
        Vec& z = ws.pre[static_cast<std::size_t>(l) - 1];
        z.resize(static_cast<std::size_t>(rows));
        for (int r = 0; r < rows; ++r) {
            double acc = b[r];
            const double* wr = w + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols);
            for (int c = 0; c < cols; ++c) acc += wr[c] * in[static_cast<std::size_t>(c)];
            z[static_cast<std::size_t>(r)] = acc;
        }
        if (l < depth) {
            Vec& h = ws.post[static_cast<std::size_t>(l)];
            h.resize(static_cast<std::size_t>(rows));
            for (int r = 0; r < rows; ++r)
                h[static_cast<std::size_t>(r)] =
                    act_value(arch.act, z[static_cast<std::size_t>(r)]);
        }
    }
}

}  // namespace

Vec realize(const Architecture& arch, std::span<const double> theta, std::span<const double> x) {
    arch.validate();
    if (theta.size() != arch.param_count())
        throw ParamError("realize: parameter vector has wrong length");
    if (static_cast<int>(x.size()) != arch.widths.front())
        throw ParamError("realize: input has wrong dimension");
    Workspace ws;
    forward(arch, theta, x, ws);
    return ws.pre.back();
}

double empirical_target(const Architecture& arch, std::span<const double> theta,
                        const Dataset& data) {
    if (data.size() == 0) throw ParamError("empirical_target: dataset is empty");
    Workspace ws;
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        forward(arch, theta, data.x(i), ws);
        const Vec& out = ws.pre.back();
        const auto y = data.y(i);
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double r = out[j] - y[j];
            total += r * r;
        }
    }
    return total / static_cast<double>(data.size());
}

Vec gradient(const Architecture& arch, std::span<const double> theta, const Dataset& data,
             std::span<const std::size_t> batch) {
    arch.validate();
    if (theta.size() != arch.param_count())
        throw ParamError("gradient: parameter vector has wrong length");
    const int depth = arch.depth();
    Vec grad(theta.size(), 0.0);
    Workspace ws;
    std::vector<Vec> delta(static_cast<std::size_t>(depth));

    const std::size_t count = batch.empty() ? data.size() : batch.size();
    if (count == 0) throw ParamError("gradient: empty sample set");
    const double inv = 1.0 / static_cast<double>(count);

    for (std::size_t bi = 0; bi < count; ++bi) {
        const std::size_t i = batch.empty() ? bi : batch[bi];
        if (i >= data.size()) throw ParamError("gradient: batch index out of range");
        forward(arch, theta, data.x(i), ws);

        const auto y = data.y(i);
        Vec& dl = delta[static_cast<std::size_t>(depth) - 1];
        const Vec& out = ws.pre.back();
        dl.resize(out.size());
        for (std::size_t j = 0; j < out.size(); ++j) dl[j] = 2.0 * inv * (out[j] - y[j]);

        for (int l = depth; l >= 1; --l) {
            const int rows = arch.widths[static_cast<std::size_t>(l)];
            const int cols = arch.widths[static_cast<std::size_t>(l) - 1];
            const Vec& dz = delta[static_cast<std::size_t>(l) - 1];
            const Vec& in = ws.post[static_cast<std::size_t>(l) - 1];
            double* gw = grad.data() + arch.weight_offset(l);
            double* gb = grad.data() + arch.bias_offset(l);
            for (int r = 0; r < rows; ++r) {
                const double d = dz[static_cast<std::size_t>(r)];
                gb[r] += d;
                double* gwr = gw + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols);
                for (int c = 0; c < cols; ++c) gwr[c] += d * in[static_cast<std::size_t>(c)];
            }
            if (l > 1) {
                const double* w = theta.data() + arch.weight_offset(l);
                Vec& prev = delta[static_cast<std::size_t>(l) - 2];
                prev.assign(static_cast<std::size_t>(cols), 0.0);
                for (int r = 0; r < rows; ++r) {
                    const double d = dz[static_cast<std::size_t>(r)];
                    const double* wr =
                        w + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols);
                    for (int c = 0; c < cols; ++c) prev[static_cast<std::size_t>(c)] += d * wr[c];
                }
                const Vec& z = ws.pre[static_cast<std::size_t>(l) - 2];
                for (int c = 0; c < cols; ++c)
                    prev[static_cast<std::size_t>(c)] *=
                        act_deriv(arch.act, z[static_cast<std::size_t>(c)]);
            }
        }
    }
    return grad;
}

LandscapeSpec as_landscape(const Architecture& arch, const Dataset& data) {
    arch.validate();
    if (data.size() == 0) throw ParamError("as_landscape: dataset is empty");
    auto arch_p = std::make_shared<Architecture>(arch);
    auto data_p = std::make_shared<Dataset>(data);
    LandscapeSpec s;
    s.name = "mlp";
    s.dim = static_cast<int>(arch.param_count());
    s.smoothness = Smoothness::LipschitzGradient;
    s.value = [arch_p, data_p](std::span<const double> theta) {
        return empirical_target(*arch_p, theta, *data_p);
    };
    s.gradient = [arch_p, data_p](std::span<const double> theta, std::span<double> g) {
        const Vec full = gradient(*arch_p, theta, *data_p);
        std::copy(full.begin(), full.end(), g.begin());
    };
    s.batch_gradient = [arch_p, data_p](std::span<const double> theta,
                                        std::span<const std::size_t> batch, std::span<double> g) {
        const Vec gb = gradient(*arch_p, theta, *data_p, batch);
        std::copy(gb.begin(), gb.end(), g.begin());
    };
    s.dataset_size = data.size();
    return s;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_dataset: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::vector<double> numbers;
    std::int64_t d_in = 0, d_out = 0, m = 0;
    double bound = 0.0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    const auto skip_ws = [&] {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\n' || *p == '\r')) ++p;
    };
    const auto next_double = [&](double& out) {
        skip_ws();
        if (p >= end) return false;
        const auto res = std::from_chars(p, end, out);
        if (res.ec != std::errc()) return false;
        p = res.ptr;
        return true;
    };
    double v;
    if (!next_double(v)) throw IoError("load_dataset: bad header in '" + path + "'");
    d_in = static_cast<std::int64_t>(v);
    if (!next_double(v)) throw IoError("load_dataset: bad header in '" + path + "'");
    d_out = static_cast<std::int64_t>(v);
    if (!next_double(v)) throw IoError("load_dataset: bad header in '" + path + "'");
    m = static_cast<std::int64_t>(v);
    if (!next_double(bound)) throw IoError("load_dataset: bad header in '" + path + "'");
    if (d_in < 1 || d_out < 1 || m < 1)
        throw IoError("load_dataset: header dimensions must be positive in '" + path + "'");
    const std::int64_t want = m * (d_in + d_out);
    numbers.reserve(static_cast<std::size_t>(want));
    while (next_double(v)) numbers.push_back(v);
    if (std::ssize(numbers) != want)
        throw IoError("load_dataset: expected " + fmt(want) + " values, found " +
                      fmt(std::ssize(numbers)) + " in '" + path + "'");

    Dataset data;
    data.d_in = static_cast<int>(d_in);
    data.d_out = static_cast<int>(d_out);
    data.bound = bound;
    data.xs.reserve(static_cast<std::size_t>(m * d_in));
    data.ys.reserve(static_cast<std::size_t>(m * d_out));
    for (std::int64_t i = 0; i < m; ++i) {
        const double* row = numbers.data() + static_cast<std::size_t>(i * (d_in + d_out));
        data.xs.insert(data.xs.end(), row, row + d_in);
        data.ys.insert(data.ys.end(), row + d_in, row + d_in + d_out);
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (norm2(data.x(i)) > bound * (1.0 + 1e-12) || norm2(data.y(i)) > bound * (1.0 + 1e-12))
            throw IoError("load_dataset: support bound violated at sample " + fmt(std::int64_t(i)));
    }
    return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_dataset: cannot open '" + path + "' for writing");
    out << fmt(std::int64_t(data.d_in)) << " " << fmt(std::int64_t(data.d_out)) << " "
        << fmt(std::int64_t(data.size())) << " " << fmt(data.bound) << "\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::string line;
        const auto x = data.x(i);
        const auto y = data.y(i);
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (j) line += " ";
            line += fmt(x[j]);
        }
        for (std::size_t j = 0; j < y.size(); ++j) {
            line += " ";
            line += fmt(y[j]);
        }
        out << line << "\n";
    }
    if (!out) throw IoError("save_dataset: write failed for '" + path + "'");
}

Vec random_theta(const Architecture& arch, double scale, const RngStream& rng,
                 std::uint64_t step) {
    arch.validate();
    Vec theta(arch.param_count());
    for (int l = 1; l <= arch.depth(); ++l) {
        const double fan_in = static_cast<double>(arch.widths[static_cast<std::size_t>(l) - 1]);
        const double sd = scale / std::sqrt(fan_in);
        const std::size_t w0 = arch.weight_offset(l);
        const std::size_t b0 = arch.bias_offset(l);
        const std::size_t wn =
            static_cast<std::size_t>(arch.widths[static_cast<std::size_t>(l)]) *
            static_cast<std::size_t>(arch.widths[static_cast<std::size_t>(l) - 1]);
        for (std::size_t k = 0; k < wn; ++k)
            theta[w0 + k] = sd * normal01(rng, step, (w0 + k));
        const std::size_t bn = static_cast<std::size_t>(arch.widths[static_cast<std::size_t>(l)]);
        for (std::size_t k = 0; k < bn; ++k)
            theta[b0 + k] = scale * normal01(rng, step, (b0 + k));
    }
    return theta;
}

TeacherStudent make_teacher_student(const Architecture& arch, std::int64_t m, double input_scale,
                                    const RngStream& rng) {
    arch.validate();
    if (m < 1) throw ParamError("make_teacher_student: need at least one sample");
    TeacherStudent ts;
    ts.teacher_theta = random_theta(arch, 1.0, rng, 0);
    ts.data.d_in = arch.widths.front();
    ts.data.d_out = arch.widths.back();
    double bound = 0.0;
    for (std::int64_t i = 0; i < m; ++i) {
        Vec x(static_cast<std::size_t>(ts.data.d_in));
        for (std::size_t j = 0; j < x.size(); ++j)
            x[j] = input_scale *
                   (2.0 * uniform01(rng, static_cast<std::uint64_t>(i) + 1, j) - 1.0);
        const Vec y = realize(arch, ts.teacher_theta, x);
        bound = std::max(bound, norm2(x));
        bound = std::max(bound, norm2(y));
        ts.data.xs.insert(ts.data.xs.end(), x.begin(), x.end());
        ts.data.ys.insert(ts.data.ys.end(), y.begin(), y.end());
    }
    ts.data.bound = bound;
    return ts;
}

GradBounds estimate_grad_bounds(const Architecture& arch, const Dataset& data, double radius,
                                std::int64_t samples, const RngStream& rng) {
    if (!(radius > 0.0)) throw ParamError("estimate_grad_bounds: radius must be positive");
    if (samples < 2) throw ParamError("estimate_grad_bounds: need at least two samples");
    GradBounds gb;
    Vec prev_theta, prev_grad;
    for (std::int64_t k = 0; k < samples; ++k) {
        Vec theta = random_theta(arch, 1.0, rng, static_cast<std::uint64_t>(k) + 1);
        const double nt = norm2(theta);
        if (nt > 0.0) {
            // project into the ball with a radius spread
            const double target =
                radius * uniform01(rng, static_cast<std::uint64_t>(k) + 1, 1u << 20);
            for (auto& t : theta) t *= target / nt;
        }
        Vec g = gradient(arch, theta, data);
        gb.sup_grad = std::max(gb.sup_grad, norm2(g));
        if (k > 0) {
            const double dx = dist2(theta, prev_theta);
            if (dx > 1e-12)
                gb.lipschitz = std::max(gb.lipschitz, dist2(g, prev_grad) / dx);
        }
        prev_theta = std::move(theta);
        prev_grad = std::move(g);
    }
    gb.sup_grad *= 1.5;
    gb.lipschitz *= 1.5;
    return gb;
}

}  // namespace mlp
}  // namespace sgdlab
