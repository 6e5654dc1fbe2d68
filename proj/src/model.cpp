#include "halfspec/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "halfspec/numerics.hpp"
#include "halfspec/specfun.hpp"

namespace halfspec {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

[[noreturn]] void param_fail(const std::string& msg) {
    throw std::invalid_argument("model: " + msg);
}

// Spline-accelerated Matern kernel amp * m_{nu_s}(alpha r), where
// m_{nu_s}(x) = x^{nu_s} K_{nu_s}(x).  The spline interpolates
// log m_{nu_s}(e^u); relative error ~1e-9, far below every covariance
// tolerance in use, at ~20ns per call instead of a Bessel evaluation.
class MaternKernel {
public:
    MaternKernel(double nu_s, double alpha, double amp)
        : nu_s_(nu_s), alpha_(alpha), amp_(amp) {
        m0_ = specfun::matern_m(nu_s, 0.0);
        const double u_lo = std::log(1e-8);
        const double u_hi = std::log(r_cut_);
        const int n = 6144;
        std::vector<double> u(n), y(n);
        for (int i = 0; i < n; ++i) {
            u[i] = u_lo + (u_hi - u_lo) * i / (n - 1.0);
            y[i] = std::log(specfun::matern_m(nu_s, std::exp(u[i])));
        }
        spline_ = CubicSpline(std::move(u), std::move(y));
    }

    double operator()(double r) const {
        const double x = alpha_ * r;
        if (x <= 1e-8) return amp_ * m0_;
        if (x >= r_cut_) return 0.0;
        return amp_ * std::exp(spline_(std::log(x)));
    }

    double at_zero() const { return amp_ * m0_; }

private:
    double nu_s_, alpha_, amp_, m0_;
    static constexpr double r_cut_ = 650.0;  // m_{nu_s}(r_cut) ~ e^{-320}, still representable
    CubicSpline spline_;
};

std::function<double(double)> matern_kernel_fn(double nu_s, double alpha, double amp) {
    auto k = std::make_shared<MaternKernel>(nu_s, alpha, amp);
    return [k](double r) { return (*k)(r); };
}

// Spectral density of amp * m_{nu_s}(alpha r) in R^d under the convention
// C(x) = int h(|l|) e^{i l'x} dl:
//   h(rho) = amp * 2^{nu_s-1} Gamma(nu_s + d/2) / pi^{d/2}
//            * alpha^{2 nu_s} (alpha^2 + rho^2)^{-(nu_s + d/2)}.
std::function<double(double)> matern_h_fn(double nu_s, double alpha, double amp, int d) {
    const double c = amp * std::exp((nu_s - 1.0) * std::log(2.0) + std::lgamma(nu_s + 0.5 * d)) /
                     std::pow(kPi, 0.5 * d) * std::pow(alpha, 2.0 * nu_s);
    const double expo = nu_s + 0.5 * d;
    return [c, expo, alpha](double rho) { return c * std::pow(alpha * alpha + rho * rho, -expo); };
}

// Spectral density of amp * exp(-alpha^2 r^2), same convention.
std::function<double(double)> gaussian_h_fn(double alpha, double amp, int d) {
    const double c = amp * std::pow(2.0 * std::sqrt(kPi) * alpha, -d);
    const double q = 1.0 / (4.0 * alpha * alpha);
    return [c, q](double rho) { return c * std::exp(-q * rho * rho); };
}

void require_positive(const Params& p, const char* name) {
    if (!(p.get(name) > 0.0)) param_fail(std::string(name) + " must be > 0");
}

Eigen::VectorXd default_phi(int d) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    v(0) = 1.0;
    return v;
}

void install_phase(HalfSpectralModel& m, const Params& p) {
    const double rho = p.get_or("rho", 0.0);
    if (rho != 0.0) {
        m.theta = [rho](double w) { return rho * w; };
    }
}

}  // namespace

Params::Params(std::initializer_list<std::pair<std::string, double>> init) {
    for (const auto& [k, v] : init) set(k, v);
}

double Params::get(const std::string& name) const {
    for (const auto& [k, v] : kv_) {
        if (k == name) return v;
    }
    param_fail("missing parameter '" + name + "'");
}

double Params::get_or(const std::string& name, double fallback) const {
    for (const auto& [k, v] : kv_) {
        if (k == name) return v;
    }
    return fallback;
}

void Params::set(const std::string& name, double value) {
    for (auto& [k, v] : kv_) {
        if (k == name) {
            v = value;
            return;
        }
    }
    kv_.emplace_back(name, value);
}

bool Params::has(const std::string& name) const {
    for (const auto& [k, v] : kv_) {
        if (k == name) return true;
    }
    return false;
}

std::complex<double> half_spectrum_eval(const HalfSpectralModel& m,
                                        const Eigen::VectorXd& s, double omega) {
    const double snorm = s.norm();
    const double r = (snorm == 0.0) ? 0.0 : snorm * m.delta(omega);
    const double base = m.f(omega) * (m.C(r) + (snorm == 0.0 ? m.eta2 : 0.0));
    if (!m.theta) return {base, 0.0};
    const double ph = m.theta(omega) * m.phi.dot(s);
    return {base * std::cos(ph), base * std::sin(ph)};
}

double full_spectrum_eval(const HalfSpectralModel& m,
                          const Eigen::VectorXd& lambda, double omega) {
    if (!m.has_h) {
        throw std::invalid_argument("full_spectrum_eval: model has no closed-form spatial spectral density");
    }
    const double del = m.delta(omega);
    double rho;
    if (m.theta) {
        rho = (lambda - m.theta(omega) * m.phi).norm();
    } else {
        rho = lambda.norm();
    }
    return m.f(omega) * std::pow(del, -m.d) * m.h(rho / del);
}

double f_G_eval(double beta, double phi_var, double omega) {
    if (!(beta > 0.0) || !(phi_var > 0.0)) param_fail("f_G requires beta, phi_var > 0");
    if (omega == 0.0) {
        throw std::domain_error("f_G_eval: logarithmic singularity at omega = 0");
    }
    const double x = std::fabs(omega) / beta;
    return 2.0 * phi_var / beta * specfun::cisi_aux_g(x);
}

double gneiting_G_cov(const Params& p, const Eigen::VectorXd& s, double t) {
    const double phi_var = p.get("phi_var"), alpha = p.get("alpha"), beta = p.get("beta");
    const double kappa = p.get_or("kappa", 1.0), gamma = p.get_or("gamma", 0.0);
    const double eta2 = p.get_or("eta2", 0.0);
    if (!(beta > 0.0) || kappa < 0.0 || kappa > 2.0 || gamma < 0.0 || gamma > 1.0 ||
        !(alpha > 0.0) || !(phi_var > 0.0) || eta2 < 0.0) {
        param_fail("gneiting_G_cov: parameter out of domain");
    }
    const double u = beta * std::pow(std::fabs(t), kappa) + 1.0;
    const double snorm = s.norm();
    double v = phi_var / u * std::exp(-alpha * snorm / std::pow(u, 0.5 * gamma));
    if (snorm == 0.0) v += eta2 / u;
    return v;
}

HalfSpectralModel make_matern_in_time(const Params& p, int d) {
    require_positive(p, "phi_var");
    require_positive(p, "alpha");
    require_positive(p, "beta");
    require_positive(p, "kappa");
    const double nu = p.get("nu");
    if (!(nu + 0.5 > 0.0)) param_fail("matern_in_time: nu + 1/2 must be > 0");
    const double eta2 = p.get_or("eta2", 0.0);
    if (eta2 < 0.0) param_fail("eta2 must be >= 0");
    const double phi_var = p.get("phi_var"), alpha = p.get("alpha");
    const double beta2 = p.get("beta") * p.get("beta"), kappa = p.get("kappa");

    HalfSpectralModel m;
    m.d = d;
    m.f = [beta2, kappa](double w) { return std::pow(beta2 + w * w, -(kappa + 0.5)); };
    m.delta = [beta2, kappa, nu](double w) {
        return std::pow(beta2 + w * w, (kappa + 0.5) / (2.0 * nu + 1.0));
    };
    m.C = matern_kernel_fn(nu + 0.5, alpha, phi_var);
    m.h = matern_h_fn(nu + 0.5, alpha, phi_var, d);
    m.has_h = true;
    m.eta2 = eta2;
    m.phi = default_phi(d);
    m.tail_k = 2.0 * kappa + 1.0;
    m.nu_spatial = nu;
    m.family = "matern_in_time";
    m.params = p;
    install_phase(m, p);
    return m;
}

HalfSpectralModel make_ar2_in_time(const Params& p, int d) {
    require_positive(p, "beta1");
    require_positive(p, "beta2");
    require_positive(p, "phi_var");
    require_positive(p, "alpha");
    const double nu = p.get("nu");
    if (!(nu + 0.5 > 0.0)) param_fail("ar2_in_time: nu + 1/2 must be > 0");
    const double eta2 = p.get_or("eta2", 0.0);
    if (eta2 < 0.0) param_fail("eta2 must be >= 0");
    const double b1 = p.get("beta1"), b2 = p.get("beta2");
    const double phi_var = p.get("phi_var"), alpha = p.get("alpha");

    HalfSpectralModel m;
    m.d = d;
    // Continuous AR(2) spectrum; integrates to exactly 1.
    m.f = [b1, b2](double w) {
        const double w2 = w * w;
        const double q = b2 - w2;
        return b1 * b2 / (kPi * (q * q + b1 * b1 * w2));
    };
    m.delta = [fm = m.f, nu](double w) { return std::pow(fm(w), -0.5 / (nu + 0.5)); };
    m.C = matern_kernel_fn(nu + 0.5, alpha, phi_var);
    m.h = matern_h_fn(nu + 0.5, alpha, phi_var, d);
    m.has_h = true;
    m.eta2 = eta2;
    m.phi = default_phi(d);
    m.tail_k = 4.0;
    m.nu_spatial = nu;
    m.family = "ar2_in_time";
    m.params = p;
    install_phase(m, p);
    return m;
}

HalfSpectralModel make_marginal_matern(const Params& p, int d) {
    require_positive(p, "phi_var");
    require_positive(p, "alpha");
    require_positive(p, "beta");
    require_positive(p, "kappa");
    require_positive(p, "nu");
    const double eta2 = p.get_or("eta2", 0.0);
    if (eta2 < 0.0) param_fail("eta2 must be >= 0");
    const double phi_var = p.get("phi_var"), alpha = p.get("alpha");
    const double beta = p.get("beta"), kappa = p.get("kappa"), nu = p.get("nu");

    HalfSpectralModel m;
    m.d = d;
    // f_B: Matern spectral density normalized to a probability density.
    const double fb_c = std::pow(beta, 2.0 * kappa) *
                        std::exp(std::lgamma(kappa + 0.5) - std::lgamma(kappa)) / std::sqrt(kPi);
    m.f = [fb_c, beta, kappa](double w) {
        return fb_c * std::pow(beta * beta + w * w, -(kappa + 0.5));
    };
    // delta(w) = |F_A^{-1}(F_B(w))| realized through the upper tails:
    // with x = 1/(1 + (w/beta)^2), 1 - |2 F_B(w) - 1| = I_x(kappa, 1/2),
    // so delta(w) = 1 / (2 sqrt(P^{-1}(nu, I_x(kappa, 1/2)))).  Increasing
    // in |w| from delta(0) = 0 and unbounded.
    m.delta = [beta, kappa, nu](double w) {
        if (w == 0.0) return 0.0;
        const double z = w / beta;
        const double x = 1.0 / (1.0 + z * z);
        const double tail = specfun::inc_beta_reg(kappa, 0.5, x);
        if (tail >= 1.0) return 0.0;
        return 0.5 / std::sqrt(specfun::reg_gamma_p_inv(nu, tail));
    };
    m.C = [phi_var, alpha](double r) { return phi_var * std::exp(-alpha * alpha * r * r); };
    m.h = gaussian_h_fn(alpha, phi_var, d);
    m.has_h = true;
    m.eta2 = eta2;
    m.phi = default_phi(d);
    m.tail_k = 2.0 * kappa + 1.0;
    m.nu_spatial = nu;
    m.family = "marginal_matern";
    m.params = p;
    install_phase(m, p);
    return m;
}

HalfSpectralModel make_k_fG(const Params& p, int d) {
    require_positive(p, "phi_var");
    require_positive(p, "alpha");
    require_positive(p, "beta");
    const double nu = p.get("nu");
    if (!(nu + 0.5 > 0.0)) param_fail("k_fG: nu + 1/2 must be > 0");
    const double eta2 = p.get_or("eta2", 0.0);
    if (eta2 < 0.0) param_fail("eta2 must be >= 0");
    const double phi_var = p.get("phi_var"), alpha = p.get("alpha"), beta = p.get("beta");

    HalfSpectralModel m;
    m.d = d;
    // Normalized so K(0,t) = phi_var (beta|t|+1)^{-1}.
    m.f = [beta, phi_var](double w) { return f_G_eval(beta, phi_var, w) / kTwoPi; };
    m.delta = [beta, nu](double w) {
        return std::pow(f_G_eval(beta, 1.0, w) / kTwoPi, -0.5 / (nu + 0.5));
    };
    const double norm = 1.0 / specfun::matern_m(nu + 0.5, 0.0);
    m.C = matern_kernel_fn(nu + 0.5, alpha, norm);
    m.h = matern_h_fn(nu + 0.5, alpha, norm, d);
    m.has_h = true;
    m.eta2 = eta2;
    m.phi = default_phi(d);
    m.f_singular_at_zero = true;
    m.tail_k = 2.0;
    m.nu_spatial = nu;
    m.family = "k_fG";
    m.params = p;
    install_phase(m, p);
    return m;
}

HalfSpectralModel make_separable_exponential(const Params& p, int d) {
    require_positive(p, "phi_var");
    require_positive(p, "alpha");
    require_positive(p, "beta");
    const double eta2 = p.get_or("eta2", 0.0);
    if (eta2 < 0.0) param_fail("eta2 must be >= 0");
    const double phi_var = p.get("phi_var"), alpha = p.get("alpha"), beta = p.get("beta");

    HalfSpectralModel m;
    m.d = d;
    m.f = [phi_var, beta](double w) { return phi_var * beta / (kPi * (beta * beta + w * w)); };
    m.delta = [](double) { return 1.0; };
    m.C = [alpha](double r) { return std::exp(-alpha * r); };
    m.h = matern_h_fn(0.5, alpha, 1.0 / specfun::matern_m(0.5, 0.0), d);
    m.has_h = true;
    m.eta2 = eta2;
    m.phi = default_phi(d);
    m.tail_k = 2.0;
    m.nu_spatial = 0.0;
    m.family = "separable_exponential";
    m.params = p;
    install_phase(m, p);
    return m;
}

HalfSpectralModel make_cressie_huang(const Params& p, int d) {
    require_positive(p, "phi_var");
    require_positive(p, "alpha");
    require_positive(p, "beta");
    const double eta2 = p.get_or("eta2", 0.0);
    if (eta2 < 0.0) param_fail("eta2 must be >= 0");
    const double phi_var = p.get("phi_var"), alpha = p.get("alpha");
    const double beta2 = p.get("beta") * p.get("beta");

    HalfSpectralModel m;
    m.d = d;
    m.f = [phi_var, beta2](double w) { return phi_var / (beta2 + w * w); };
    m.delta = [](double) { return 1.0; };
    m.C = [alpha](double r) { return std::exp(-alpha * alpha * r * r); };
    m.h = gaussian_h_fn(alpha, 1.0, d);
    m.has_h = true;
    m.eta2 = eta2;
    m.phi = default_phi(d);
    m.tail_k = 2.0;
    m.family = "cressie_huang";
    m.params = p;
    install_phase(m, p);
    return m;
}

HalfSpectralModel make_gneiting_separable_half(const Params& p, int d) {
    require_positive(p, "phi_var");
    require_positive(p, "alpha");
    require_positive(p, "beta");
    const double eta2 = p.get_or("eta2", 0.0);
    if (eta2 < 0.0) param_fail("eta2 must be >= 0");
    const double phi_var = p.get("phi_var"), alpha = p.get("alpha"), beta = p.get("beta");

    HalfSpectralModel m;
    m.d = d;
    m.f = [beta, phi_var](double w) { return f_G_eval(beta, phi_var, w) / kTwoPi; };
    m.delta = [](double) { return 1.0; };
    m.C = [alpha](double r) { return std::exp(-alpha * r); };
    m.h = matern_h_fn(0.5, alpha, 1.0 / specfun::matern_m(0.5, 0.0), d);
    m.has_h = true;
    m.eta2 = eta2;
    m.phi = default_phi(d);
    m.f_singular_at_zero = true;
    m.tail_k = 2.0;
    m.nu_spatial = 0.0;
    m.family = "gneiting_separable_half";
    m.params = p;
    install_phase(m, p);
    return m;
}

HalfSpectralModel make_gneiting_G(const Params& p, int d) {
    require_positive(p, "phi_var");
    require_positive(p, "alpha");
    require_positive(p, "beta");
    const double kappa = p.get_or("kappa", 1.0), gamma = p.get_or("gamma", 0.0);
    if (kappa < 0.0 || kappa > 2.0) param_fail("gneiting_G: kappa must be in [0,2]");
    if (gamma < 0.0 || gamma > 1.0) param_fail("gneiting_G: gamma must be in [0,1]");
    const double eta2 = p.get_or("eta2", 0.0);
    if (eta2 < 0.0) param_fail("eta2 must be >= 0");

    HalfSpectralModel m;
    m.d = d;
    Params pc = p;
    pc.set("kappa", kappa);
    pc.set("gamma", gamma);
    pc.set("eta2", eta2);
    m.cov_closed = [pc](const Eigen::VectorXd& s, double t) { return gneiting_G_cov(pc, s, t); };
    m.has_cov_closed = true;
    m.eta2 = eta2;
    m.phi = default_phi(d);
    m.tail_k = (kappa < 1.0) ? 1.0 + kappa : 2.0;  // margin tail exponent at kappa <= 1
    m.family = "gneiting_G";
    m.params = pc;
    return m;
}

namespace {

using Factory = HalfSpectralModel (*)(const Params&, int);

struct FamilyEntry {
    std::vector<ParamDef> defs;
    Factory factory;
};

using D = ParamDef::Domain;

const std::map<std::string, FamilyEntry>& registry() {
    static const std::map<std::string, FamilyEntry> reg = {
        {"matern_in_time",
         {{{"phi_var", D::Positive, 1.0},
           {"alpha", D::Positive, 1.0},
           {"beta", D::Positive, 1.0},
           {"kappa", D::Positive, 0.5},
           {"nu", D::AboveMinusHalf, 0.5},
           {"eta2", D::NonNegative, 0.0},
           {"rho", D::Real, 0.0}},
          &make_matern_in_time}},
        {"ar2_in_time",
         {{{"phi_var", D::Positive, 1.0},
           {"alpha", D::Positive, 1.0},
           {"beta1", D::Positive, 1.0},
           {"beta2", D::Positive, 1.0},
           {"nu", D::AboveMinusHalf, 1.5},
           {"eta2", D::NonNegative, 0.0},
           {"rho", D::Real, 0.0}},
          &make_ar2_in_time}},
        {"marginal_matern",
         {{{"phi_var", D::Positive, 1.0},
           {"alpha", D::Positive, 1.0},
           {"beta", D::Positive, 1.0},
           {"kappa", D::Positive, 1.0},
           {"nu", D::Positive, 0.5},
           {"eta2", D::NonNegative, 0.0},
           {"rho", D::Real, 0.0}},
          &make_marginal_matern}},
        {"k_fG",
         {{{"phi_var", D::Positive, 1.0},
           {"alpha", D::Positive, 1.0},
           {"beta", D::Positive, 1.0},
           {"nu", D::AboveMinusHalf, 0.5},
           {"eta2", D::NonNegative, 0.0},
           {"rho", D::Real, 0.0}},
          &make_k_fG}},
        {"separable_exponential",
         {{{"phi_var", D::Positive, 1.0},
           {"alpha", D::Positive, 1.0},
           {"beta", D::Positive, 1.0},
           {"eta2", D::NonNegative, 0.0},
           {"rho", D::Real, 0.0}},
          &make_separable_exponential}},
        {"cressie_huang",
         {{{"phi_var", D::Positive, 1.0},
           {"alpha", D::Positive, 1.0},
           {"beta", D::Positive, 1.0},
           {"eta2", D::NonNegative, 0.0},
           {"rho", D::Real, 0.0}},
          &make_cressie_huang}},
        {"gneiting_separable_half",
         {{{"phi_var", D::Positive, 1.0},
           {"alpha", D::Positive, 1.0},
           {"beta", D::Positive, 1.0},
           {"eta2", D::NonNegative, 0.0},
           {"rho", D::Real, 0.0}},
          &make_gneiting_separable_half}},
        {"gneiting_G",
         {{{"phi_var", D::Positive, 1.0},
           {"alpha", D::Positive, 1.0},
           {"beta", D::Positive, 1.0},
           {"kappa", D::ZeroTwo, 1.0},
           {"gamma", D::ZeroOne, 0.0},
           {"eta2", D::NonNegative, 0.0}},
          &make_gneiting_G}},
    };
    return reg;
}

void check_domain(const ParamDef& def, double v) {
    using enum ParamDef::Domain;
    bool ok = true;
    switch (def.domain) {
        case Positive: ok = v > 0.0; break;
        case NonNegative: ok = v >= 0.0; break;
        case Real: ok = std::isfinite(v); break;
        case ZeroTwo: ok = v >= 0.0 && v <= 2.0; break;
        case ZeroOne: ok = v >= 0.0 && v <= 1.0; break;
        case AboveMinusHalf: ok = v > -0.5; break;
    }
    if (!ok || !std::isfinite(v)) {
        param_fail("parameter '" + def.name + "' = " + std::to_string(v) + " out of domain");
    }
}

}  // namespace

const std::vector<std::string>& family_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, e] : registry()) v.push_back(k);
        return v;
    }();
    return names;
}

const std::vector<ParamDef>& family_params(const std::string& family) {
    const auto it = registry().find(family);
    if (it == registry().end()) param_fail("unknown family '" + family + "'");
    return it->second.defs;
}

HalfSpectralModel make_model(const std::string& family, const Params& params, int d,
                             const Eigen::VectorXd* phi) {
    const auto it = registry().find(family);
    if (it == registry().end()) param_fail("unknown family '" + family + "'");
    if (d < 1) param_fail("spatial dimension must be >= 1");
    Params full;
    for (const ParamDef& def : it->second.defs) {
        const double v = params.get_or(def.name, def.default_value);
        check_domain(def, v);
        full.set(def.name, v);
    }
    for (const auto& [k, v] : params.items()) {
        bool known = false;
        for (const ParamDef& def : it->second.defs) known = known || def.name == k;
        if (!known) param_fail("family '" + family + "' has no parameter '" + k + "'");
    }
    HalfSpectralModel m = it->second.factory(full, d);
    if (phi != nullptr) {
        if (phi->size() != d) param_fail("phi must have length d");
        const double n = phi->norm();
        if (std::fabs(n - 1.0) > 1e-12) param_fail("phi must be a unit vector");
        m.phi = *phi;
    }
    return m;
}

nlohmann::json model_spec_json(const HalfSpectralModel& m) {
    nlohmann::json jp = nlohmann::json::object();
    for (const auto& [k, v] : m.params.items()) jp[k] = v;
    nlohmann::json j;
    j["family"] = m.family;
    j["params"] = jp;
    j["d"] = m.d;
    j["phi"] = std::vector<double>(m.phi.data(), m.phi.data() + m.phi.size());
    return j;
}

HalfSpectralModel model_from_json(const nlohmann::json& j) {
    Params p;
    for (const auto& [k, v] : j.at("params").items()) p.set(k, v.get<double>());
    const int d = j.value("d", 3);
    if (j.contains("phi")) {
        const auto v = j.at("phi").get<std::vector<double>>();
        Eigen::VectorXd phi = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
        return make_model(j.at("family").get<std::string>(), p, d, &phi);
    }
    return make_model(j.at("family").get<std::string>(), p, d);
}

}  // namespace halfspec
