#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sgdlab/landscape.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/vecops.hpp"

namespace sgdlab {
namespace mlp {

enum class Activation { Softplus, Tanh, Sigmoid };

Activation activation_from_string(const std::string& tag);
std::string to_string(Activation a);

// Feed-forward architecture N_0 .. N_L with an analytic activation between
// affine layers and squared-error loss. Parameters are a flat vector with a
// frozen layout: for l = 1..L, matrix A_l row major, then bias b_l.
struct Architecture {
    std::vector<int> widths;  // N_0 .. N_L, all >= 1
    Activation act = Activation::Softplus;

    int depth() const { return static_cast<int>(widths.size()) - 1; }
    std::size_t param_count() const;
    std::size_t weight_offset(int layer) const;  // layer in 1..L
    std::size_t bias_offset(int layer) const;
    void validate() const;
};

struct Dataset {
    int d_in = 1;
    int d_out = 1;
    std::vector<double> xs;  // size m * d_in
    std::vector<double> ys;  // size m * d_out
    double bound = 0.0;      // B with |x_i|, |y_i| <= B

    std::size_t size() const { return xs.size() / static_cast<std::size_t>(d_in); }
    std::span<const double> x(std::size_t i) const {
        return {xs.data() + i * static_cast<std::size_t>(d_in), static_cast<std::size_t>(d_in)};
    }
    std::span<const double> y(std::size_t i) const {
        return {ys.data() + i * static_cast<std::size_t>(d_out), static_cast<std::size_t>(d_out)};
    }
};

// Alternating affine maps and componentwise activation; the last layer is
// affine only. Softplus uses the overflow-safe max(u,0) + log1p(exp(-|u|)).
Vec realize(const Architecture& arch, std::span<const double> theta, std::span<const double> x);

// (1/m) sum_i |realize(theta, x_i) - y_i|^2.
double empirical_target(const Architecture& arch, std::span<const double> theta,
                        const Dataset& data);

// Exact reverse-mode gradient of the (mini-batch) empirical target; full
// batch when `batch` is empty. Samples accumulate in index order.
Vec gradient(const Architecture& arch, std::span<const double> theta, const Dataset& data,
             std::span<const std::size_t> batch = {});

// Packages the empirical target over parameter space as a landscape, with
// the batch-gradient hook for minibatch noise.
LandscapeSpec as_landscape(const Architecture& arch, const Dataset& data);

// File format: header "d_in d_out m B", then m lines of d_in + d_out
// decimals. The support bound is verified on load.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

// Teacher-student data: random teacher parameters, inputs uniform in
// [-input_scale, input_scale]^{d_in}, targets from the teacher network.
struct TeacherStudent {
    Vec teacher_theta;
    Dataset data;
};
TeacherStudent make_teacher_student(const Architecture& arch, std::int64_t m, double input_scale,
                                    const RngStream& rng);

Vec random_theta(const Architecture& arch, double scale, const RngStream& rng,
                 std::uint64_t step = 0);

// Sampled bounds for sup|f| and Lip(f) on {|theta| <= radius}, inflated by
// a 1.5 safety factor.
struct GradBounds {
    double sup_grad = 0.0;
    double lipschitz = 0.0;
};
GradBounds estimate_grad_bounds(const Architecture& arch, const Dataset& data, double radius,
                                std::int64_t samples, const RngStream& rng);

}  // namespace mlp
}  // namespace sgdlab
