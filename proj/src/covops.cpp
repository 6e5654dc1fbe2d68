#include "halfspec/covops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/FFT>

#include "halfspec/numerics.hpp"

namespace halfspec {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// Log-log slope of f between two probe frequencies; closed-form exponent
// preferred when the family registered one.
double tail_exponent(const HalfSpectralModel& m) {
    if (std::isfinite(m.tail_k)) return m.tail_k;
    const double w1 = 1e3, w2 = 1e5;
    const double f1 = m.f(w1), f2 = m.f(w2);
    if (!(f1 > 0.0) || !(f2 > 0.0)) return 2.0;
    const double k = -(std::log(f2) - std::log(f1)) / (std::log(w2) - std::log(w1));
    return std::max(1.1, k);
}

}  // namespace

double default_omega_max(const HalfSpectralModel& m, double t, double tail_mass) {
    const double k = tail_exponent(m);
    const double w_ref = 100.0;
    const double c_f = m.f(w_ref) * std::pow(w_ref, k);
    const double f_scale = m.f_singular_at_zero ? m.f(0.5) : m.f(1e-3);
    const double target = std::max(tail_mass * std::max(f_scale, 1e-300), 1e-300);
    // Static bound: int_W^inf f ~ c_f W^{1-k}/(k-1).  With oscillation e^{itw}
    // integration by parts tightens it to ~2 c_f W^{-k}/|t|.
    double w_static = std::pow(c_f / ((k - 1.0) * target), 1.0 / (k - 1.0));
    if (t != 0.0) {
        const double w_osc = std::pow(2.0 * c_f / (std::fabs(t) * target), 1.0 / k);
        w_static = std::min(w_static, w_osc);
    }
    return std::clamp(w_static, 64.0, 1e9);
}

CovPointResult cov_point(const HalfSpectralModel& m, const Eigen::VectorXd& s, double t,
                         const QuadSpec& spec) {
    using boost::math::quadrature::gauss_kronrod;
    const double omega_max = (spec.omega_max > 0.0) ? spec.omega_max : default_omega_max(m, t, spec.tail_mass);

    // Effective oscillation rate: e^{itw} plus the linear part of the phase.
    double t_eff = std::fabs(t);
    if (m.theta) {
        const double proj = std::fabs(m.phi.dot(s));
        const double th1 = std::fabs(m.theta(1.0));
        t_eff += th1 * proj;
    }
    const bool oscillatory = t_eff > 1e-12;
    const double osc_cap = oscillatory ? 8.0 * kPi / t_eff
                                       : std::numeric_limits<double>::infinity();

    // Panel edges: dyadic refinement toward 0 to resolve the f scale (and
    // possible origin singularity); oscillatory integrands additionally cap
    // panels to a few periods of e^{itw}.
    std::vector<double> edges;
    edges.push_back(omega_max);
    double e = omega_max;
    const double e_min = std::min(0.5, osc_cap);
    while (e > e_min) {
        e *= 0.5;
        edges.push_back(e);
    }
    edges.push_back(0.0);
    std::vector<double> panels;  // ascending edges
    panels.push_back(0.0);
    for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
        const double lo = panels.back(), hi = *it;
        if (hi <= lo) continue;
        int chunks = 1;
        if (oscillatory && hi - lo > osc_cap) {
            chunks = static_cast<int>(std::ceil((hi - lo) / osc_cap));
        }
        for (int c = 1; c <= chunks; ++c) panels.push_back(lo + (hi - lo) * c / chunks);
    }

    // Folded complex integrand over (0, omega_max]: F(w) + F(-w).
    const auto integrand = [&](double w) -> std::complex<double> {
        const std::complex<double> a = half_spectrum_eval(m, s, w) * std::polar(1.0, t * w);
        const std::complex<double> b = half_spectrum_eval(m, s, -w) * std::polar(1.0, -t * w);
        return a + b;
    };

    std::vector<double> re_parts(panels.size() - 1), im_parts(panels.size() - 1), errs(panels.size() - 1);
    parallel_for(panels.size() - 1, [&](std::size_t i) {
        double err = 0.0;
        const std::complex<double> v = gauss_kronrod<double, 61>::integrate(
            integrand, panels[i], panels[i + 1], spec.max_depth, 1e-12, &err);
        re_parts[i] = v.real();
        im_parts[i] = v.imag();
        errs[i] = err;
    });
    CovPointResult out;
    out.value = pairwise_sum(re_parts);
    out.imag_residual = std::fabs(pairwise_sum(im_parts));
    out.abs_err = pairwise_sum(errs);
    const double tol = std::max({spec.abs_tol, spec.rel_tol * std::fabs(out.value), 1e-13});
    out.converged = out.abs_err <= tol;
    return out;
}

CovGrid cov_slice_fft(const HalfSpectralModel& m, const Eigen::VectorXd& s,
                      int n_grid, double omega_max) {
    if (n_grid < 1024 || (n_grid & (n_grid - 1)) != 0) {
        throw std::invalid_argument("cov_slice_fft: n_grid must be a power of two >= 1024");
    }
    if (!(omega_max > 0.0)) throw std::invalid_argument("cov_slice_fft: omega_max must be > 0");
    const int n = n_grid;
    const double dw = 2.0 * omega_max / n;
    const double snorm = s.norm();
    const double proj = m.phi.size() == s.size() ? m.phi.dot(s) : 0.0;

    std::vector<std::complex<double>> F(n);
    parallel_for(n, [&](std::size_t j) {
        const double w = (static_cast<double>(j) + 0.5 - 0.5 * n) * dw;
        const double r = (snorm == 0.0) ? 0.0 : snorm * m.delta(w);
        double v = m.f(w) * (m.C(r) + (snorm == 0.0 ? m.eta2 : 0.0));
        if (m.theta) {
            F[j] = std::polar(v, m.theta(w) * proj);
        } else {
            F[j] = v;
        }
    });

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec_in(F), idft(n);
    fft.inv(idft, spec_in);  // idft[m] = (1/n) sum_j F_j e^{+2pi i j m / n}

    CovGrid grid;
    grid.s = s;
    grid.t_grid.resize(n);
    grid.values.resize(n);
    const double dt = kPi / omega_max;
    double max_imag = 0.0;
    for (int mm = -n / 2; mm < n / 2; ++mm) {
        const int idx = (mm % n + n) % n;
        // phase from the half-step offset: e^{i t_m (0.5 - n/2) dw}
        const std::complex<double> ph = std::polar(1.0, kTwoPi * mm * (0.5 - 0.5 * n) / n);
        const std::complex<double> val = static_cast<double>(n) * dw * idft[idx] * ph;
        const int row = mm + n / 2;
        grid.t_grid(row) = mm * dt;
        grid.values(row) = val.real();
        max_imag = std::max(max_imag, std::fabs(val.imag()));
    }
    grid.imag_residual = max_imag;
    const double f_ref = m.f_singular_at_zero ? m.f(0.5 * dw) : m.f(0.0);
    const double f_hi = m.f(omega_max - 0.5 * dw);
    grid.aliasing_warning = f_ref > 0.0 && (f_hi / f_ref) > 1e-8;
    return grid;
}

std::complex<double> aliased_half_spectrum(const HalfSpectralModel& m,
                                           const Eigen::VectorXd& s, double omega, int m_trunc) {
    if (m_trunc < 0) throw std::invalid_argument("aliased_half_spectrum: m must be >= 0");
    std::complex<double> acc{0.0, 0.0};
    for (int j = -m_trunc; j <= m_trunc; ++j) {
        acc += half_spectrum_eval(m, s, omega + kTwoPi * j);
    }
    return acc;
}

CrossSpectralMatrix cross_spectral_matrix(const HalfSpectralModel& m,
                                          const Eigen::MatrixXd& coords, double omega,
                                          int m_trunc) {
    const int p = static_cast<int>(coords.cols());
    if (coords.rows() != m.d) {
        throw std::invalid_argument("cross_spectral_matrix: coords must be d x p");
    }
    CrossSpectralMatrix out;
    out.omega = omega;
    out.coords = coords;
    out.S.resize(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            const Eigen::VectorXd lag = coords.col(i) - coords.col(j);
            const std::complex<double> v = aliased_half_spectrum(m, lag, omega, m_trunc);
            out.S(i, j) = v;
            out.S(j, i) = std::conj(v);
        }
    }
    return out;
}

}  // namespace halfspec
