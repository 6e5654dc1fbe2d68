#include "halfspec/specfun.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace halfspec::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFpMin = std::numeric_limits<double>::min() / kEps;
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kEulerGamma = 0.577215664901532860606512090082402431;

[[noreturn]] void domain_fail(const std::string& what) {
    throw std::domain_error("specfun: " + what);
}

// Taylor coefficients of 1/Gamma(1+x) about x = 0 (Abramowitz & Stegun
// 6.1.34, shifted by one index).
constexpr double kInvGammaTaylor[11] = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.04200263503409523553,
    0.16653861138229148950,
    -0.04219773455554433675,
    -0.00962197152787697356,
    0.00721894324666309954,
    -0.00116516759185906511,
    -0.00021524167411495097,
    0.00012805028238811619,
};

// gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
// gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
// for |mu| <= 1/2.  Series near 0 where the direct form cancels.
void gamma_one_pm(double mu, double& gam1, double& gam2) {
    const double mu2 = mu * mu;
    if (std::fabs(mu) < 0.05) {
        const double* a = kInvGammaTaylor;
        gam1 = -(a[1] + mu2 * (a[3] + mu2 * (a[5] + mu2 * (a[7] + mu2 * a[9]))));
        gam2 = a[0] + mu2 * (a[2] + mu2 * (a[4] + mu2 * (a[6] + mu2 * (a[8] + mu2 * a[10]))));
    } else {
        const double gp = 1.0 / std::tgamma(1.0 + mu);
        const double gm = 1.0 / std::tgamma(1.0 - mu);
        gam1 = (gm - gp) / (2.0 * mu);
        gam2 = (gm + gp) / 2.0;
    }
}

struct KPair {
    double k_mu;   // K_mu(x), possibly scaled by e^x (see scaled flag)
    double k_mu1;  // K_{mu+1}(x), same scaling
};

// Temme's series for K_mu and K_{mu+1}, |mu| <= 1/2, 0 < x <= 2.
KPair bessel_k_temme(double mu, double x) {
    const double x2 = 0.5 * x;
    const double mu2 = mu * mu;
    const double pimu = kPi * mu;
    const double fact = (std::fabs(pimu) < 1e-15) ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = (std::fabs(e) < 1e-15) ? 1.0 : std::sinh(e) / e;
    double gam1, gam2;
    gamma_one_pm(mu, gam1, gam2);
    const double gampl = gam2 - mu * gam1;  // 1/Gamma(1+mu)
    const double gammi = gam2 + mu * gam1;  // 1/Gamma(1-mu)
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;        // (x/2)^{-mu} Gamma(1+mu) / 2
    double q = 0.5 / (e * gammi);      // (x/2)^{+mu} Gamma(1-mu) / 2
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= 500; ++i) {
        ff = (i * ff + p + q) / (i * i - mu2);
        c *= d / i;
        p /= (i - mu);
        q /= (i + mu);
        const double del = c * ff;
        sum += del;
        const double del1 = c * (p - i * ff);
        sum1 += del1;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return {sum, sum1 * (2.0 / x)};
}

// Steed's continued fraction CF2 for K_mu and K_{mu+1}, |mu| <= 1/2, x > 2.
// Returns e^x K (scaled) so the caller controls the exponential.
KPair bessel_k_cf2_scaled(double mu, double x) {
    const double mu2 = mu * mu;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 5000; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) < kEps) break;
    }
    h = a1 * h;
    const double k_mu = std::sqrt(kPi / (2.0 * x)) / s;  // e^x K_mu(x)
    const double k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    return {k_mu, k_mu1};
}

// Gauss hypergeometric series 2F1(a,b;c;x) for 0 <= x < 1, c > 0.
double hyp2f1_series(double a, double b, double c, double x) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 2000000; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        if (std::fabs(term) <= kEps * std::fabs(sum)) return sum;
    }
    throw std::runtime_error("specfun: hyp2f1 series did not converge (x=" + std::to_string(x) + ")");
}

// Continued fraction for the incomplete beta (Lentz), valid for
// x < (a+1)/(a+b+2).
double betacf(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

struct CiSi {
    double ci;
    double si;  // si(x) = Si(x) - pi/2
};

// Lentz continued fraction for the complex exponential integral at ix,
// x >= 2 (Thompson & Barnett).
CiSi cisi_cf(double x) {
    using C = std::complex<double>;
    C b(1.0, x);
    C c(1.0 / kFpMin, 0.0);
    C d = 1.0 / b;
    C h = d;
    for (int i = 2; i <= 10000; ++i) {
        const double a = -(i - 1.0) * (i - 1.0);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const C del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    h *= C(std::cos(x), -std::sin(x));
    return {-h.real(), h.imag()};
}

CiSi cisi_series(double x) {
    // Power series; x in (0, 2].
    const double x2 = x * x;
    double term = x;  // (-1)^k x^{2k+1}/(2k+1)!
    double sum_si = x;
    for (int k = 1; k <= 60; ++k) {
        term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
        const double del = term / (2.0 * k + 1.0);
        sum_si += del;
        if (std::fabs(del) < kEps * std::fabs(sum_si)) break;
    }
    double sum_ci = 0.0, t2 = 1.0;  // t2 = (-1)^k x^{2k}/(2k)!
    for (int k = 1; k <= 60; ++k) {
        t2 *= -x2 / ((2.0 * k - 1.0) * (2.0 * k));
        const double del = t2 / (2.0 * k);
        sum_ci += del;
        if (std::fabs(del) < kEps * (std::fabs(sum_ci) + 1.0)) break;
    }
    return {kEulerGamma + std::log(x) + sum_ci, sum_si - kPi / 2.0};
}

CiSi cisi(double x) {
    return (x >= 2.0) ? cisi_cf(x) : cisi_series(x);
}

}  // namespace

double bessel_k(double nu, double x) {
    if (!(x > 0.0)) domain_fail("bessel_k requires x > 0");
    nu = std::fabs(nu);
    const int nl = static_cast<int>(std::floor(nu + 0.5));
    const double mu = nu - nl;
    KPair kp;
    double scale_log = 0.0;  // result = e^{scale_log} * recurrence output
    if (x <= 2.0) {
        kp = bessel_k_temme(mu, x);
    } else {
        kp = bessel_k_cf2_scaled(mu, x);
        scale_log = -x;
    }
    double km = kp.k_mu, k1 = kp.k_mu1;
    for (int j = 1; j <= nl - 1; ++j) {
        const double knext = km + 2.0 * (mu + j) / x * k1;
        if (!std::isfinite(knext)) throw std::overflow_error("specfun: bessel_k overflow");
        km = k1;
        k1 = knext;
    }
    const double k_unscaled = (nl == 0) ? km : k1;
    if (scale_log == 0.0) {
        if (!std::isfinite(k_unscaled)) throw std::overflow_error("specfun: bessel_k overflow");
        return k_unscaled;
    }
    const double lg = std::log(k_unscaled) + scale_log;
    if (lg > 700.0) throw std::overflow_error("specfun: bessel_k overflow");
    return std::exp(lg);
}

double matern_m(double nu, double r) {
    if (!(nu > 0.0)) domain_fail("matern_m requires nu > 0");
    if (r < 0.0) domain_fail("matern_m requires r >= 0");
    const double limit_log = (nu - 1.0) * std::log(2.0) + std::lgamma(nu);
    if (r < 1e-12) return std::exp(limit_log);
    const int nl = static_cast<int>(std::floor(nu + 0.5));
    const double mu = nu - nl;
    if (r <= 2.0) {
        // Carry the recurrence on B_j = r^{mu+j} K_{mu+j}(r); all terms
        // positive and bounded by 2^{nu-1} Gamma(nu) scale, so no overflow
        // for the orders used here.
        const KPair kp = bessel_k_temme(mu, r);
        const double rmu = std::pow(r, mu);
        double b0 = rmu * kp.k_mu;
        double b1 = rmu * r * kp.k_mu1;
        if (nl == 0) return b0;
        const double r2 = r * r;
        for (int j = 1; j <= nl - 1; ++j) {
            const double bn = r2 * b0 + 2.0 * (mu + j) * b1;
            b0 = b1;
            b1 = bn;
        }
        return b1;
    }
    const KPair kp = bessel_k_cf2_scaled(mu, r);  // e^r K
    double km = kp.k_mu, k1 = kp.k_mu1;
    for (int j = 1; j <= nl - 1; ++j) {
        const double knext = km + 2.0 * (mu + j) / r * k1;
        km = k1;
        k1 = knext;
    }
    const double kscaled = (nl == 0) ? km : k1;
    const double lg = nu * std::log(r) - r + std::log(kscaled);
    if (lg > 700.0) throw std::overflow_error("specfun: matern_m overflow");
    return std::exp(lg);
}

double reg_gamma_p(double s, double x) {
    if (!(s > 0.0)) domain_fail("reg_gamma_p requires s > 0");
    if (x < 0.0) domain_fail("reg_gamma_p requires x >= 0");
    if (x == 0.0) return 0.0;
    const double lpre = -x + s * std::log(x) - std::lgamma(s);
    if (x < s + 1.0) {
        // Series for P.
        double ap = s, del = 1.0 / s, sum = del;
        for (int n = 0; n < 1000; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * kEps) break;
        }
        return sum * std::exp(lpre);
    }
    // Lentz continued fraction for Q.
    double b = x + 1.0 - s;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    const double q = std::exp(lpre) * h;
    return 1.0 - q;
}

double reg_gamma_p_inv(double s, double p) {
    if (!(s > 0.0)) domain_fail("reg_gamma_p_inv requires s > 0");
    if (p < 0.0 || p >= 1.0) domain_fail("reg_gamma_p_inv requires p in [0,1)");
    if (p == 0.0) return 0.0;
    const double gln = std::lgamma(s);
    const double a1 = s - 1.0;
    double x;
    if (s > 1.0) {
        // Wilson-Hilferty start.
        const double pp = (p < 0.5) ? p : 1.0 - p;
        const double t = std::sqrt(-2.0 * std::log(pp));
        double x0 = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (p < 0.5) x0 = -x0;
        const double u = 1.0 - 1.0 / (9.0 * s) - x0 / (3.0 * std::sqrt(s));
        x = std::max(1e-3, s * u * u * u);
    } else {
        const double t = 1.0 - s * (0.253 + s * 0.12);
        x = (p < t) ? std::pow(p / t, 1.0 / s) : 1.0 - std::log(1.0 - (p - t) / (1.0 - t));
    }
    const double lna1 = (s > 1.0) ? std::log(a1) : 0.0;
    const double afac = (s > 1.0) ? std::exp(a1 * (lna1 - 1.0) - gln) : 0.0;
    for (int j = 0; j < 24; ++j) {
        if (x <= 0.0) return 0.0;
        const double err = reg_gamma_p(s, x) - p;
        double t;
        if (s > 1.0) {
            t = afac * std::exp(-(x - a1) + a1 * (std::log(x) - lna1));
        } else {
            t = std::exp(-x + a1 * std::log(x) - gln);
        }
        const double u = err / t;
        double dx = u / (1.0 - 0.5 * std::min(1.0, u * ((s - 1.0) / x - 1.0)));
        x -= dx;
        if (x <= 0.0) x = 0.5 * (x + dx);
        if (std::fabs(dx) < 1e-15 * x) break;
    }
    return x;
}

double inc_beta_reg(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) domain_fail("inc_beta_reg requires a, b > 0");
    if (x < 0.0 || x > 1.0) domain_fail("inc_beta_reg requires x in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double hyp2f1_fb(double kappa, double z) {
    if (!(kappa > 0.0)) domain_fail("hyp2f1_fb requires kappa > 0");
    if (z == 0.0) return 1.0;
    const double z2 = z * z;
    const double opz2 = 1.0 + z2;
    const double u = z2 / opz2;
    if (u <= 0.8) {
        // Pfaff transformation: 2F1(1/2, k+1/2; 3/2; -z^2)
        //   = (1+z^2)^{-1/2} 2F1(1/2, 1-k; 3/2; z^2/(1+z^2)).
        return hyp2f1_series(0.5, 1.0 - kappa, 1.5, u) / std::sqrt(opz2);
    }
    // z 2F1 = int_0^z (1+t^2)^{-(k+1/2)} dt = [B(1/2,k) - B_x(k,1/2)]/2,
    // x = 1/(1+z^2); B_x(k,1/2) = x^k/k 2F1(k, 1/2; k+1; x).
    const double x = 1.0 / opz2;
    const double beta_half_k = std::exp(std::lgamma(0.5) + std::lgamma(kappa) - std::lgamma(kappa + 0.5));
    const double bx = std::pow(x, kappa) / kappa * hyp2f1_series(kappa, 0.5, kappa + 1.0, x);
    return (beta_half_k - bx) / (2.0 * std::fabs(z));
}

double sin_integral(double x) {
    if (x == 0.0) return 0.0;
    const double ax = std::fabs(x);
    const double s = cisi(ax).si + kPi / 2.0;
    return (x > 0.0) ? s : -s;
}

double cos_integral(double x) {
    if (!(x > 0.0)) domain_fail("cos_integral requires x > 0");
    return cisi(x).ci;
}

double cisi_aux_g(double x) {
    if (!(x > 0.0)) domain_fail("cisi_aux_g requires x > 0");
    const CiSi v = cisi(x);
    // g = -Ci(x) cos x - si(x) sin x
    return -v.ci * std::cos(x) - v.si * std::sin(x);
}

}  // namespace halfspec::specfun
