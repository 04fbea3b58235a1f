#include "sgdlab/landscape.hpp"

#include <cmath>
#include <limits>

#include "sgdlab/errors.hpp"

namespace sgdlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LandscapeSpec make_quadratic(int d) {
    LandscapeSpec s;
    s.name = "quadratic";
    s.dim = d;
    s.value = [](std::span<const double> x) {
        double f = 0.0;
        for (double v : x) f += 0.5 * v * v;
        return f;
    };
    s.gradient = [](std::span<const double> x, std::span<double> g) {
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i];
    };
    s.known_levels = std::vector<double>{0.0};
    s.known_loja = LojaParams{0.5, std::sqrt(2.0), kInf, 0.0};
    CriticalStructure cs;
    cs.points.push_back(Vec(static_cast<std::size_t>(d), 0.0));
    cs.levels = {0.0};
    s.critical = std::move(cs);
    s.grad_sup_on_ball = [](double r) { return r; };
    s.grad_lip_on_ball = [](double) { return 1.0; };
    return s;
}

LandscapeSpec make_quartic(int d) {
    LandscapeSpec s;
    s.name = "quartic";
    s.dim = d;
    s.value = [](std::span<const double> x) {
        double f = 0.0;
        for (double v : x) f += v * v * v * v;
        return f;
    };
    s.gradient = [](std::span<const double> x, std::span<double> g) {
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = 4.0 * x[i] * x[i] * x[i];
    };
    s.known_levels = std::vector<double>{0.0};
    // |grad| / F^{3/4} is minimized on the diagonal, giving 4 d^{-1/4}.
    s.known_loja = LojaParams{0.75, 4.0 * std::pow(static_cast<double>(d), -0.25), kInf, 0.0};
    CriticalStructure cs;
    cs.points.push_back(Vec(static_cast<std::size_t>(d), 0.0));
    cs.levels = {0.0};
    s.critical = std::move(cs);
    s.grad_sup_on_ball = [](double r) { return 4.0 * r * r * r; };
    s.grad_lip_on_ball = [](double r) { return 12.0 * r * r; };
    return s;
}

LandscapeSpec make_double_well(int d) {
    LandscapeSpec s;
    s.name = "double_well";
    s.dim = d;
    s.value = [](std::span<const double> x) {
        double f = 0.0;
        for (double v : x) {
            const double u = v * v - 1.0;
            f += u * u;
        }
        return f;
    };
    s.gradient = [](std::span<const double> x, std::span<double> g) {
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = 4.0 * x[i] * (x[i] * x[i] - 1.0);
    };
    std::vector<double> levels;
    for (int k = 0; k <= d; ++k) levels.push_back(static_cast<double>(k));
    s.known_levels = levels;
    if (d == 1) s.known_loja = LojaParams{0.5, 2.0, 0.5, 0.0};
    CriticalStructure cs;
    cs.points.push_back(Vec(static_cast<std::size_t>(d), 1.0));   // all-minima corner, level 0
    cs.points.push_back(Vec(static_cast<std::size_t>(d), -1.0));  // level 0
    cs.points.push_back(Vec(static_cast<std::size_t>(d), 0.0));   // all-maxima point, level d
    cs.levels = levels;
    s.critical = std::move(cs);
    const double sd = std::sqrt(static_cast<double>(d));
    s.grad_sup_on_ball = [sd](double r) {
        // per coordinate |4(t^3 - t)| <= 4 max(r^3 - r, 2/(3 sqrt 3)) for the
        // interior hump; take a simple safe envelope
        const double hump = 4.0 * 2.0 / (3.0 * std::sqrt(3.0));
        const double edge = r > 1.0 ? 4.0 * (r * r * r - r) : 0.0;
        return sd * std::max(hump, edge);
    };
    s.grad_lip_on_ball = [](double r) { return std::max(12.0 * r * r - 4.0, 4.0); };
    return s;
}

LandscapeSpec make_circle_valley() {
    LandscapeSpec s;
    s.name = "circle_valley";
    s.dim = 2;
    s.value = [](std::span<const double> x) {
        const double u = x[0] * x[0] + x[1] * x[1] - 1.0;
        return u * u;
    };
    s.gradient = [](std::span<const double> x, std::span<double> g) {
        const double u = x[0] * x[0] + x[1] * x[1] - 1.0;
        g[0] = 4.0 * u * x[0];
        g[1] = 4.0 * u * x[1];
    };
    s.known_levels = std::vector<double>{0.0, 1.0};
    // transversally quadratic valley: |f| = 4 r |r^2-1| >= 2 F^{1/2} for r >= 1/2
    s.known_loja = LojaParams{0.5, 2.0, 0.5, 0.0};
    CriticalStructure cs;
    cs.points = {Vec{1.0, 0.0}, Vec{0.0, 1.0}, Vec{-1.0, 0.0}, Vec{0.0, -1.0}, Vec{0.0, 0.0}};
    cs.levels = {0.0, 1.0};
    s.critical = std::move(cs);
    s.grad_sup_on_ball = [](double r) { return 4.0 * r * std::max(r * r - 1.0, 1.0); };
    s.grad_lip_on_ball = [](double r) {
        return 4.0 * std::max(r * r - 1.0, 1.0) + 8.0 * r * r;
    };
    return s;
}

LandscapeSpec make_saddle_cubic() {
    LandscapeSpec s;
    s.name = "saddle_cubic";
    s.dim = 2;
    s.value = [](std::span<const double> x) {
        return x[0] * x[0] * x[0] / 3.0 - x[0] + 0.5 * x[1] * x[1];
    };
    s.gradient = [](std::span<const double> x, std::span<double> g) {
        g[0] = x[0] * x[0] - 1.0;
        g[1] = x[1];
    };
    s.known_levels = std::vector<double>{-2.0 / 3.0, 2.0 / 3.0};
    s.known_loja = LojaParams{0.5, 1.0, 0.3, -2.0 / 3.0};
    CriticalStructure cs;
    cs.points = {Vec{1.0, 0.0}, Vec{-1.0, 0.0}};  // local minimum and saddle
    cs.levels = {-2.0 / 3.0, 2.0 / 3.0};
    s.critical = std::move(cs);
    s.grad_sup_on_ball = [](double r) {
        const double fx = std::max(r * r - 1.0, 1.0);
        return std::sqrt(fx * fx + r * r);
    };
    s.grad_lip_on_ball = [](double r) { return std::max(2.0 * r, 1.0); };
    return s;
}

LandscapeSpec make_rosenbrock_mod() {
    constexpr double a = 5.0;  // tamer curvature than the classic 100
    LandscapeSpec s;
    s.name = "rosenbrock_mod";
    s.dim = 2;
    s.value = [](std::span<const double> x) {
        const double u = 1.0 - x[0];
        const double v = x[1] - x[0] * x[0];
        return u * u + a * v * v;
    };
    s.gradient = [](std::span<const double> x, std::span<double> g) {
        const double v = x[1] - x[0] * x[0];
        g[0] = -2.0 * (1.0 - x[0]) - 4.0 * a * x[0] * v;
        g[1] = 2.0 * a * v;
    };
    s.known_levels = std::vector<double>{0.0};
    CriticalStructure cs;
    cs.points = {Vec{1.0, 1.0}};
    cs.levels = {0.0};
    s.critical = std::move(cs);
    s.grad_sup_on_ball = [](double r) {
        const double gx = 2.0 * (1.0 + r) + 4.0 * a * r * (r + r * r);
        const double gy = 2.0 * a * (r + r * r);
        return std::sqrt(gx * gx + gy * gy);
    };
    s.grad_lip_on_ball = [](double r) {
        // Frobenius bound on the Hessian over the ball
        const double hxx = 2.0 + 4.0 * a * r + 12.0 * a * r * r;
        const double hxy = 4.0 * a * r;
        const double hyy = 2.0 * a;
        return std::sqrt(hxx * hxx + 2.0 * hxy * hxy + hyy * hyy);
    };
    return s;
}

int natural_dim(const std::string& name) {
    if (name == "circle_valley" || name == "saddle_cubic" || name == "rosenbrock_mod") return 2;
    return 1;
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"quadratic", "quartic", "double_well", "circle_valley", "saddle_cubic",
            "rosenbrock_mod"};
}

LandscapeSpec catalog_get(const std::string& name, int dim) {
    if (dim < 1) throw ParamError("catalog_get: dimension must be positive");
    if (name == "quadratic") return make_quadratic(dim);
    if (name == "quartic") return make_quartic(dim);
    if (name == "double_well") return make_double_well(dim);
    if (name == "circle_valley" || name == "saddle_cubic" || name == "rosenbrock_mod") {
        if (dim != 2)
            throw ParamError("catalog_get: landscape '" + name + "' is two-dimensional");
        if (name == "circle_valley") return make_circle_valley();
        if (name == "saddle_cubic") return make_saddle_cubic();
        return make_rosenbrock_mod();
    }
    std::string msg = "catalog_get: unknown landscape '" + name + "'; valid names:";
    for (const auto& n : catalog_names()) msg += " " + n;
    throw ParamError(msg);
}

LandscapeSpec catalog_get(const std::string& name) {
    return catalog_get(name, natural_dim(name));
}

Vec finite_diff_gradient(const LandscapeSpec& spec, std::span<const double> x, double h) {
    if (!(h > 0.0)) throw ParamError("finite_diff_gradient: h must be positive");
    if (!all_finite(x)) throw ParamError("finite_diff_gradient: x must be finite");
    Vec probe(x.begin(), x.end());
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = probe[i];
        probe[i] = xi + h;
        const double fp = spec.value(probe);
        probe[i] = xi - h;
        const double fm = spec.value(probe);
        probe[i] = xi;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NumericError("finite_diff_gradient: non-finite target evaluation");
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

double loja_ratio(const LandscapeSpec& spec, std::span<const double> x, double level,
                  double beta) {
    if (!(beta >= 0.5 && beta < 1.0))
        throw ParamError("loja_ratio: beta must lie in [0.5, 1)");
    const double gap = std::abs(spec.value(x) - level);
    const double gn = spec.grad_norm(x);
    if (gap == 0.0) {
        if (gn > 0.0) return std::numeric_limits<double>::infinity();
        return std::numeric_limits<double>::quiet_NaN();
    }
    return gn / std::pow(gap, beta);
}

}  // namespace sgdlab
