#pragma once

// Half-spectral space-time covariance models
//
//   K(s,t) = int f(w) [ C(s delta(w)) + eta2 1{s=0} ] e^{i theta(w) phi's} e^{i t w} dw
//
// with f the temporal spectral density (convention K(0,t) = int f e^{itw} dw,
// so f carries the 1/(2pi) inversion factor internally), C an isotropic
// spatial kernel, delta an even positive interaction function, theta an odd
// phase and phi a unit direction.  When the spectral density h of C is known
// in closed form the full spectrum is
//
//   g(lambda, w) = f(w) delta(w)^{-d} h(|lambda - theta(w) phi| / delta(w)),
//
// with h in the convention C(x) = int h(|l|) e^{i l'x} dl, so that
// K(s,t) = int int g e^{i(s'lambda + t w)} dlambda dw holds literally.

#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace halfspec {

// Named model parameters (insertion-ordered).
class Params {
public:
    Params() = default;
    Params(std::initializer_list<std::pair<std::string, double>> init);

    double get(const std::string& name) const;
    double get_or(const std::string& name, double fallback) const;
    void set(const std::string& name, double value);
    bool has(const std::string& name) const;
    const std::vector<std::pair<std::string, double>>& items() const { return kv_; }

private:
    std::vector<std::pair<std::string, double>> kv_;
};

struct HalfSpectralModel {
    int d = 3;
    std::function<double(double)> f;      // temporal spectral density over w
    std::function<double(double)> C;      // isotropic spatial kernel over r >= 0
    std::function<double(double)> delta;  // even positive interaction function
    std::function<double(double)> theta;  // odd phase; empty means theta == 0
    Eigen::VectorXd phi;                  // unit vector in R^d
    double eta2 = 0.0;                    // spatial nugget multiplier of f

    std::function<double(double)> h;      // isotropic spectral density of C
    bool has_h = false;

    // Closed-form space-time covariance (Gneiting G); models carrying this
    // are evaluated directly rather than via the half-spectrum.
    std::function<double(const Eigen::VectorXd&, double)> cov_closed;
    bool has_cov_closed = false;

    bool f_singular_at_zero = false;      // f_G-type integrable log singularity
    double tail_k = std::numeric_limits<double>::quiet_NaN();       // f ~ c w^{-k}
    double nu_spatial = std::numeric_limits<double>::quiet_NaN();   // Matern-style nu

    std::string family;
    Params params;

    bool has_theta() const { return static_cast<bool>(theta); }
};

// f(w)[C(|s| delta(w)) + eta2 1{s=0}] exp(i theta(w) phi's).  Hermitian in w.
std::complex<double> half_spectrum_eval(const HalfSpectralModel& m,
                                        const Eigen::VectorXd& s, double omega);

// f(w) delta(w)^{-d} h(|lambda - theta(w) phi| / delta(w)).  Requires has_h.
double full_spectrum_eval(const HalfSpectralModel& m,
                          const Eigen::VectorXd& lambda, double omega);

// Spectral density of the temporal margin of the Gneiting model G at
// kappa = 1, without the 1/(2pi) factor:
//   f_G(w) = (phi/beta)[pi sin(x) - 2 Si(x) sin(x) - 2 Ci(x) cos(x)],
// x = |w|/beta.  Positive for all w != 0; logarithmically singular at 0.
double f_G_eval(double beta, double phi_var, double omega);

// Closed-form Gneiting covariance G(s,t) including the nugget term.
double gneiting_G_cov(const Params& p, const Eigen::VectorXd& s, double t);

// Model families ------------------------------------------------------------

HalfSpectralModel make_matern_in_time(const Params& p, int d = 3);        // Example 1
HalfSpectralModel make_ar2_in_time(const Params& p, int d = 3);           // Example 2
HalfSpectralModel make_marginal_matern(const Params& p, int d = 3);       // Example 3
HalfSpectralModel make_k_fG(const Params& p, int d = 3);
HalfSpectralModel make_separable_exponential(const Params& p, int d = 3);
HalfSpectralModel make_cressie_huang(const Params& p, int d = 3);
HalfSpectralModel make_gneiting_separable_half(const Params& p, int d = 3);
HalfSpectralModel make_gneiting_G(const Params& p, int d = 3);

// Parameter metadata used by fitting transforms and CLI validation.
struct ParamDef {
    enum class Domain { Positive, NonNegative, Real, ZeroTwo, ZeroOne, AboveMinusHalf };
    std::string name;
    Domain domain;
    double default_value;
};

const std::vector<std::string>& family_names();
const std::vector<ParamDef>& family_params(const std::string& family);

// Builds a model by family name, filling defaults and validating domains.
// An optional phi overrides the default unit-x direction; a nonzero "rho"
// parameter installs the linear phase theta(w) = rho w.
HalfSpectralModel make_model(const std::string& family, const Params& params, int d = 3,
                             const Eigen::VectorXd* phi = nullptr);

// JSON round-trip of the model specification:
//   {"family": ..., "params": {...}, "d": ..., "phi": [...]}
nlohmann::json model_spec_json(const HalfSpectralModel& m);
HalfSpectralModel model_from_json(const nlohmann::json& j);

}  // namespace halfspec
