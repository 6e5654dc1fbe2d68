#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "halfspec/model.hpp"
#include "halfspec/specfun.hpp"

using namespace halfspec;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Eigen::VectorXd vec3(double x, double y, double z) {
    Eigen::VectorXd v(3);
    v << x, y, z;
    return v;
}

// Independent cosine-transform oracle for f_G (Ooura's method, no Si/Ci).
double fg_cosine_oracle(double beta, double phi_var, double omega) {
    boost::math::quadrature::ooura_fourier_cos<double> integrator;
    const auto f = [beta, phi_var](double t) { return phi_var / (beta * t + 1.0); };
    return 2.0 * integrator.integrate(f, std::fabs(omega)).first;
}

}  // namespace

TEST_CASE("matern_in_time: half-spectrum matches the closed form") {
    const Params p{{"phi_var", 1.3}, {"alpha", 0.7}, {"beta", 0.9}, {"kappa", 1.25}, {"nu", 0.35}};
    const HalfSpectralModel m = make_matern_in_time(p, 3);
    const double kap = 1.25, nu = 0.35, beta = 0.9, alpha = 0.7, phi_var = 1.3;
    for (double w : {0.0, 0.4, 2.0, 17.0}) {
        const double f = std::pow(beta * beta + w * w, -(kap + 0.5));
        // s = 0: f(w) phi_var 2^{nu-1/2} Gamma(nu+1/2)
        const auto at0 = half_spectrum_eval(m, vec3(0, 0, 0), w);
        CHECK(at0.imag() == 0.0);
        CHECK(at0.real() ==
              doctest::Approx(f * phi_var * std::exp((nu - 0.5) * std::log(2.0) + std::lgamma(nu + 0.5)))
                  .epsilon(1e-10));
        // s != 0: second line of the Matern-in-time half-spectral form
        const Eigen::VectorXd s = vec3(1.1, -0.3, 0.2);
        const double arg = alpha * s.norm() * std::pow(beta * beta + w * w, 0.5 * (kap + 0.5) / (nu + 0.5));
        const double want = phi_var * f * specfun::matern_m(nu + 0.5, arg);
        CHECK(half_spectrum_eval(m, s, w).real() == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("matern_in_time at kappa = nu has a d+1 dimensional Matern spectrum") {
    const double nu = 0.5, beta = 0.8, alpha = 1.2;
    const Params p{{"phi_var", 1.0}, {"alpha", alpha}, {"beta", beta}, {"kappa", nu}, {"nu", nu}};
    const HalfSpectralModel m = make_matern_in_time(p, 3);
    const double expo = nu + 2.0;  // nu + (d+1)/2
    const double g00 = full_spectrum_eval(m, vec3(0, 0, 0), 0.0);
    for (double w : {0.0, 0.7, 3.0}) {
        for (double l : {0.0, 0.5, 2.5}) {
            const double got = full_spectrum_eval(m, vec3(l, 0, 0), w) / g00;
            const double want = std::pow((alpha * alpha * (beta * beta + w * w) + l * l) /
                                             (alpha * alpha * beta * beta),
                                         -expo);
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("full spectrum shape follows Eq-5 structure in beta") {
    // g(0,0) should scale as (alpha^2 beta^{2(kappa+1/2)/(nu+1/2)})^{-(nu+(d+1)/2)}.
    const double kap = 0.75, nu = 0.4, alpha = 0.6;
    const auto g00 = [&](double beta) {
        const Params p{{"phi_var", 1.0}, {"alpha", alpha}, {"beta", beta}, {"kappa", kap}, {"nu", nu}};
        return full_spectrum_eval(make_matern_in_time(p, 3), vec3(0, 0, 0), 0.0);
    };
    const double expo = nu + 2.0;
    const double ratio_got = g00(1.4) / g00(0.7);
    const double d0 = std::pow(1.4, 2.0 * (kap + 0.5) / (nu + 0.5));
    const double d1 = std::pow(0.7, 2.0 * (kap + 0.5) / (nu + 0.5));
    CHECK(ratio_got == doctest::Approx(std::pow(d0 / d1, -expo)).epsilon(1e-12));
}

TEST_CASE("full spectrum integrates back to K(0,0) (two integration routes)") {
    // d = 1 keeps the double integral cheap.
    const Params p{{"phi_var", 0.9}, {"alpha", 1.1}, {"beta", 1.0}, {"kappa", 0.5}, {"nu", 0.5}};
    const HalfSpectralModel m = make_matern_in_time(p, 1);
    const auto inner = [&](double w) {
        Eigen::VectorXd lam(1);
        const auto fl = [&](double l) {
            lam(0) = l;
            return full_spectrum_eval(m, lam, w);
        };
        return 2.0 * (gauss_kronrod<double, 31>::integrate(fl, 0.0, 20.0, 10, 1e-10) +
                      gauss_kronrod<double, 31>::integrate(fl, 20.0, 600.0, 10, 1e-10));
    };
    const double gg = 2.0 * (gauss_kronrod<double, 31>::integrate(inner, 0.0, 20.0, 8, 1e-8) +
                             gauss_kronrod<double, 31>::integrate(inner, 20.0, 3000.0, 8, 1e-8));
    // Half-spectral route: K(0,0) = int f (C(0)+eta2) dw.
    const auto half = [&](double w) { return half_spectrum_eval(m, vec3(0, 0, 0).head(1), w).real(); };
    const double hh = 2.0 * gauss_kronrod<double, 31>::integrate(half, 0.0, 4000.0, 12, 1e-10);
    CHECK(gg == doctest::Approx(hh).epsilon(1e-3));
}

TEST_CASE("ar2_in_time basics") {
    const Params p{{"phi_var", 1.0}, {"alpha", 1.0}, {"beta1", 1.3}, {"beta2", 0.8}, {"nu", 1.5}};
    const HalfSpectralModel m = make_ar2_in_time(p, 3);
    CHECK(m.f(0.0) == doctest::Approx(1.3 / (kPi * 0.8)).epsilon(1e-14));
    // omega^4 f -> beta1 beta2 / pi
    CHECK(std::pow(1e5, 4) * m.f(1e5) == doctest::Approx(1.3 * 0.8 / kPi).epsilon(1e-6));
    // f integrates to one
    const double mass = 2.0 * gauss_kronrod<double, 61>::integrate(m.f, 0.0, 1e5, 12, 1e-11);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
    // class-1 delta rule
    CHECK(m.delta(2.0) == doctest::Approx(std::pow(m.f(2.0), -0.25)).epsilon(1e-13));
}

TEST_CASE("marginal_matern delta: zero at 0, even, nondecreasing, unbounded") {
    const Params p{{"phi_var", 1.0}, {"alpha", 1.0}, {"beta", 1.0}, {"kappa", 2.0}, {"nu", 0.5}};
    const HalfSpectralModel m = make_marginal_matern(p, 3);
    CHECK(m.delta(0.0) == 0.0);
    CHECK(m.delta(1.3) == doctest::Approx(m.delta(-1.3)).epsilon(1e-13));
    double prev = 0.0;
    for (double w = 0.25; w < 2000.0; w *= 1.7) {
        const double d = m.delta(w);
        CHECK(d >= prev);
        prev = d;
    }
    CHECK(m.delta(1e5) > 1e3);  // unbounded growth
    CHECK(m.delta(1e7) > m.delta(1e5));
}

TEST_CASE("marginal_matern delta couples F_B to |A| quantiles") {
    // At omega with F_B(omega) = q, delta must equal the matching |A|
    // quantile 1/sqrt(4 P^{-1}(nu, 2-2q)).  Cross-check through quadrature
    // of f_B and the implementation's own reg_gamma_p_inv.
    const double beta = 1.2, kappa = 1.4, nu = 0.7;
    const Params p{{"phi_var", 1.0}, {"alpha", 1.0}, {"beta", beta}, {"kappa", kappa}, {"nu", nu}};
    const HalfSpectralModel m = make_marginal_matern(p, 3);
    for (double w : {0.3, 1.0, 2.7, 9.0}) {
        // 2 - 2 F_B(w) = 2 * upper tail mass of f_B beyond w
        const double tail = gauss_kronrod<double, 61>::integrate(m.f, w, 1e6, 15, 1e-13);
        const double want = 0.5 / std::sqrt(specfun::reg_gamma_p_inv(nu, 2.0 * tail));
        CHECK(m.delta(w) == doctest::Approx(want).epsilon(1e-7));
    }
}

TEST_CASE("f_G_eval against the independent cosine transform") {
    const double beta = 0.8, phi_var = 1.7;
    for (double w : {0.05, 0.3, 0.8, 1.0, 2.4, 7.0, 19.0}) {
        CHECK(f_G_eval(beta, phi_var, w) ==
              doctest::Approx(fg_cosine_oracle(beta, phi_var, w)).epsilon(1e-9));
        CHECK(f_G_eval(beta, phi_var, w) == f_G_eval(beta, phi_var, -w));
        CHECK(f_G_eval(beta, phi_var, w) > 0.0);
    }
    // Frozen spot value at omega/beta = 1 (phi = beta = 1).
    CHECK(f_G_eval(1.0, 1.0, 1.0) == doctest::Approx(0.6867559231128541).epsilon(1e-12));
    CHECK_THROWS_AS(f_G_eval(1.0, 1.0, 0.0), std::domain_error);
    // omega^2 f_G -> 2 phi beta within 1% by omega/beta = 1e4.
    const double w = 1e4 * beta;
    CHECK(w * w * f_G_eval(beta, phi_var, w) / (phi_var * beta) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("k_fG: delta diverges and f carries the inversion factor") {
    const Params p{{"phi_var", 2.0}, {"alpha", 0.5}, {"beta", 0.7}, {"nu", 0.5}};
    const HalfSpectralModel m = make_k_fG(p, 3);
    double prev = m.delta(10.0);
    for (int j = 2; j <= 6; ++j) {
        const double cur = m.delta(std::pow(10.0, j));
        CHECK(cur > prev);
        prev = cur;
    }
    // total temporal mass: int f dw = phi_var (margin (beta|t|+1)^{-1} at 0)
    const double mass = 2.0 * (gauss_kronrod<double, 61>::integrate(m.f, 1e-12, 1.0, 15, 1e-11) +
                               gauss_kronrod<double, 61>::integrate(m.f, 1.0, 1e3, 15, 1e-11) +
                               gauss_kronrod<double, 61>::integrate(m.f, 1e3, 1e8, 15, 1e-11));
    CHECK(mass == doctest::Approx(2.0).epsilon(2e-4));
    CHECK(m.f_singular_at_zero);
}

TEST_CASE("separable and Cressie-Huang families") {
    const Params p{{"phi_var", 1.5}, {"alpha", 0.9}, {"beta", 1.1}};
    const HalfSpectralModel se = make_separable_exponential(p, 3);
    CHECK(se.delta(3.3) == 1.0);
    CHECK(se.C(0.0) == 1.0);
    CHECK(se.C(2.0) == doctest::Approx(std::exp(-1.8)).epsilon(1e-14));
    // f is the exponential margin spectrum: int f dw = phi_var
    const double mass = 2.0 * (gauss_kronrod<double, 61>::integrate(se.f, 0.0, 1e3, 12, 1e-12) +
                               gauss_kronrod<double, 61>::integrate(se.f, 1e3, 1e9, 12, 1e-12));
    CHECK(mass == doctest::Approx(1.5).epsilon(1e-6));

    const HalfSpectralModel ch = make_cressie_huang(p, 3);
    CHECK(ch.f(0.0) == doctest::Approx(1.5 / (1.1 * 1.1)).epsilon(1e-14));
    CHECK(ch.delta(9.0) == 1.0);
    CHECK(ch.C(1.0) == doctest::Approx(std::exp(-0.81)).epsilon(1e-14));
}

TEST_CASE("gneiting_G closed form") {
    const Params p{{"phi_var", 1.2}, {"alpha", 0.4}, {"beta", 0.9},
                   {"kappa", 1.0}, {"gamma", 0.5}, {"eta2", 0.3}};
    CHECK(gneiting_G_cov(p, vec3(0, 0, 0), 0.0) == doctest::Approx(1.5).epsilon(1e-14));
    // gamma = 0 separates: G(s,t) G(0,0) = G(s,0) G(0,t) away from the nugget
    Params ps = p;
    ps.set("gamma", 0.0);
    ps.set("eta2", 0.0);
    const Eigen::VectorXd s = vec3(2.0, 1.0, 0.0);
    const double lhs = gneiting_G_cov(ps, s, 2.5) * gneiting_G_cov(ps, vec3(0, 0, 0), 0.0);
    const double rhs = gneiting_G_cov(ps, s, 0.0) * gneiting_G_cov(ps, vec3(0, 0, 0), 2.5);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    // G(s,t)/G(0,t) decreasing in |s|
    double prev = 1.0;
    for (double r = 0.5; r < 10.0; r += 0.5) {
        const double v = gneiting_G_cov(p, vec3(r, 0, 0), 1.0) / gneiting_G_cov(p, vec3(0, 0, 0), 1.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(gneiting_G_cov(Params{{"phi_var", 1.0}, {"alpha", 1.0}, {"beta", 1.0}, {"kappa", 2.5}},
                                   vec3(0, 0, 0), 0.0),
                    std::invalid_argument);
}

TEST_CASE("half_spectrum_eval is Hermitian in omega for phased models") {
    for (const std::string& fam : {"matern_in_time", "k_fG", "marginal_matern", "separable_exponential"}) {
        Params p;
        p.set("rho", 1.7);
        const HalfSpectralModel m = make_model(fam, p, 3);
        for (double w : {0.25, 1.0, 4.0}) {
            for (double r : {0.0, 1.2}) {
                const Eigen::VectorXd s = vec3(r, 0.4 * r, 0.0);
                const auto a = half_spectrum_eval(m, s, w);
                const auto b = half_spectrum_eval(m, s, -w);
                CHECK(b.real() == doctest::Approx(a.real()).epsilon(1e-13));
                CHECK(b.imag() == doctest::Approx(-a.imag()).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("theta == 0 gives exactly real values; s = 0 includes the nugget") {
    Params p;
    p.set("eta2", 0.25);
    const HalfSpectralModel m = make_model("matern_in_time", p, 3);
    const auto v = half_spectrum_eval(m, vec3(0.7, 0.1, -0.4), 1.1);
    CHECK(v.imag() == 0.0);
    const auto v0 = half_spectrum_eval(m, vec3(0, 0, 0), 1.1);
    CHECK(v0.real() == doctest::Approx(m.f(1.1) * (m.C(0.0) + 0.25)).epsilon(1e-14));
    // C(0) is the spatial scale regardless of omega (delta never enters at s=0).
    for (double w : {0.1, 2.0, 50.0}) {
        CHECK(half_spectrum_eval(m, vec3(0, 0, 0), w).real() / m.f(w) ==
              doctest::Approx(m.C(0.0) + 0.25).epsilon(1e-13));
    }
}

TEST_CASE("model registry, domains and JSON round trip") {
    CHECK(family_names().size() == 8);
    CHECK_THROWS_AS(make_model("nope", Params{}), std::invalid_argument);
    CHECK_THROWS_AS(make_model("matern_in_time", Params{{"alpha", -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(make_model("matern_in_time", Params{{"bogus", 1.0}}), std::invalid_argument);
    Eigen::VectorXd bad_phi = vec3(1.0, 1.0, 0.0);
    CHECK_THROWS_AS(make_model("k_fG", Params{}, 3, &bad_phi), std::invalid_argument);

    Params p{{"phi_var", 1.4}, {"alpha", 0.03}, {"beta", 0.4}, {"kappa", 0.5},
             {"nu", 0.4}, {"eta2", 0.1}, {"rho", 2.0}};
    Eigen::VectorXd phi = vec3(0.0, 1.0, 0.0);
    const HalfSpectralModel m = make_model("matern_in_time", p, 3, &phi);
    const nlohmann::json j = model_spec_json(m);
    const HalfSpectralModel m2 = model_from_json(j);
    CHECK(m2.family == "matern_in_time");
    for (double w : {0.3, 2.0}) {
        const Eigen::VectorXd s = vec3(5.0, 2.0, 1.0);
        const auto a = half_spectrum_eval(m, s, w);
        const auto b = half_spectrum_eval(m2, s, w);
        CHECK(a.real() == b.real());
        CHECK(a.imag() == b.imag());
    }
}
