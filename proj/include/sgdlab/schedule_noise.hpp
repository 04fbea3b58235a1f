#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgdlab/rng.hpp"
#include "sgdlab/vecops.hpp"

namespace sgdlab {

// gamma_n = C_gamma * n^{-gamma_exp}, n >= 1.
struct StepSchedule {
    double c_gamma = 1.0;
    double gamma_exp = 1.0;
};

double gamma_at(const StepSchedule& s, std::int64_t n);

// t_n = sum_{l<=n} gamma_l, t_0 = 0; direct left-to-right summation.
double natural_time(const StepSchedule& s, std::int64_t n);

// Cached prefix sums of the step sizes, for loops that touch every index up
// to a large horizon. at(n) reproduces natural_time(s, n) bit for bit
// because both sum in the same order.
class NaturalTime {
   public:
    NaturalTime(const StepSchedule& s, std::int64_t n_max);
    double at(std::int64_t n) const;
    std::int64_t horizon() const { return static_cast<std::int64_t>(prefix_.size()) - 1; }

   private:
    std::vector<double> prefix_;
};

enum class NoiseFamily { Gaussian, BoundedUniform, HeavyTailed, Minibatch };

NoiseFamily noise_family_from_string(const std::string& tag);
std::string to_string(NoiseFamily f);

// Conditionally mean-zero perturbations with scale sigma_n = C_sigma * n^sigma_exp.
// Scaling is chosen so the Euclidean norm |D_n| carries the moment bound
// independently of the dimension:
//   gaussian:        D = sigma_n * Z / sqrt(d),  E|D|^2 = sigma_n^2 exactly
//   bounded_uniform: D = sigma_n * U / sqrt(d),  U_i uniform on [-sqrt3, sqrt3]
//   heavy_tailed(p): D = sigma_n * (S / kappa) * u,  S Pareto with tail index p,
//                    u uniform on the sphere, kappa = (p/(p-p'))^{1/p'} so that
//                    E[|D|^{p'}]^{1/p'} = sigma_n; only moments of order < p exist
//   minibatch:       position dependent, produced by the engine (sample_noise rejects it)
struct NoiseSpec {
    double c_sigma = 1.0;
    double sigma_exp = 0.0;
    double q = 2.0;  // targeted conditional moment order, q >= 1
    NoiseFamily family = NoiseFamily::Gaussian;
    int dim = 1;
    double pareto_tail = 2.0;      // p, heavy_tailed only
    double calibrated_moment = 1.5;  // p' < p used for scale calibration
    int batch_size = 1;            // minibatch only
};

double sigma_at(const NoiseSpec& ns, std::int64_t n);

// D_n for step n; pure in (spec, n, stream).
Vec sample_noise(const NoiseSpec& ns, std::int64_t n, const RngStream& rng);

}  // namespace sgdlab
