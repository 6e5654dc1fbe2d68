#pragma once

// Special functions backing the covariance model families: modified Bessel
// function of the second kind, the Matern kernel r^nu K_nu(r), the
// regularized lower incomplete gamma function and its inverse, a specialized
// Gauss hypergeometric, the regularized incomplete beta function, and the
// sine/cosine integrals.
//
// All functions are pure, reentrant and safe to call concurrently.  Domain
// violations throw std::domain_error; results exceeding double range throw
// std::overflow_error.  Accuracy targets are ~1e-12 relative or better over
// the domains exercised by the model families (see tests/test_specfun.cpp).

namespace halfspec::specfun {

// K_nu(x) for x > 0.  Any real order (K_{-nu} = K_nu).
double bessel_k(double nu, double x);

// r^nu K_nu(r) for nu > 0, r >= 0, with the analytic limit
// 2^{nu-1} Gamma(nu) at r = 0.  Stable for large nu where K_nu(r) alone
// would overflow, and for large r where it would underflow.
double matern_m(double nu, double r);

// Regularized lower incomplete gamma P(s,x) = gamma(s,x)/Gamma(s), s > 0,
// x >= 0, and its functional inverse on p in [0,1).
double reg_gamma_p(double s, double x);
double reg_gamma_p_inv(double s, double p);

// 2F1(1/2, kappa+1/2; 3/2; -z^2) for kappa > 0 and any real z, via the
// Pfaff transformation w -> w/(w-1) so the defining series converges for
// every z; a complementary incomplete-beta branch takes over for large |z|
// where the transformed series becomes slow.
double hyp2f1_fb(double kappa, double z);

// Regularized incomplete beta I_x(a,b), a,b > 0, x in [0,1].
double inc_beta_reg(double a, double b, double x);

// Si(x) = int_0^x sin t / t dt (odd, defined on all reals) and
// Ci(x) = -int_x^inf cos t / t dt (x > 0).
double sin_integral(double x);
double cos_integral(double x);

// Auxiliary function g(x) = int_0^inf t e^{-xt}/(1+t^2) dt for x > 0,
// satisfying Ci(x) = f(x) sin x - g(x) cos x.  Evaluating the spectral
// density f_G through g avoids the catastrophic cancellation the direct
// Si/Ci formula suffers at large arguments.
double cisi_aux_g(double x);

}  // namespace halfspec::specfun
