#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgdlab/vecops.hpp"

namespace sgdlab {

enum class Smoothness {
    LipschitzGradient,
    HoelderGradient,  // gradient alpha-Hoelder with exponent hoelder_alpha in (0,1)
};

// Lower-bound parameters |f(y)| >= c_lower * |F(y) - level|^beta valid at
// distance <= radius from the critical set of the given level.
struct LojaParams {
    double beta = 0.5;
    double c_lower = 1.0;
    double radius = 0.0;
    double level = 0.0;
};

struct CriticalStructure {
    std::vector<Vec> points;     // representative points with |f| <= 1e-10
    std::vector<double> levels;  // distinct critical levels on the reference box
};

// Immutable target-function description. Evaluators must be pure; instances
// are shared read-only across Monte-Carlo workers.
struct LandscapeSpec {
    std::string name;
    int dim = 1;
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    Smoothness smoothness = Smoothness::LipschitzGradient;
    double hoelder_alpha = 1.0;

    std::optional<std::vector<double>> known_levels;
    std::optional<LojaParams> known_loja;
    std::optional<CriticalStructure> critical;

    // sup|f| and a Lipschitz constant of f on {|x| <= r}; closed-form
    // (possibly conservative) for catalog entries, absent otherwise.
    std::function<double(double)> grad_sup_on_ball;
    std::function<double(double)> grad_lip_on_ball;

    // Set by analytic_mlp::as_landscape: mean gradient over a sample index
    // batch, used for position-dependent minibatch noise.
    std::function<void(std::span<const double>, std::span<const std::size_t>, std::span<double>)>
        batch_gradient;
    std::size_t dataset_size = 0;

    double F(std::span<const double> x) const { return value(x); }

    Vec grad(std::span<const double> x) const {
        Vec g(static_cast<std::size_t>(dim));
        gradient(x, g);
        return g;
    }

    double grad_norm(std::span<const double> x) const {
        Vec g = grad(x);
        return norm2(g);
    }
};

// Fixed catalog: quadratic, quartic, double_well, circle_valley,
// saddle_cubic, rosenbrock_mod. The names are part of the CLI contract.
LandscapeSpec catalog_get(const std::string& name, int dim);
LandscapeSpec catalog_get(const std::string& name);  // natural default dimension
std::vector<std::string> catalog_names();

// Central differences of F, one probe pair per coordinate.
Vec finite_diff_gradient(const LandscapeSpec& spec, std::span<const double> x, double h);

// |f(x)| / |F(x) - level|^beta. Returns +infinity when the denominator
// vanishes but the gradient does not, NaN when both vanish.
double loja_ratio(const LandscapeSpec& spec, std::span<const double> x, double level, double beta);

}  // namespace sgdlab
