#pragma once

// Space-time covariance evaluation from half-spectra: adaptive quadrature at
// single lags, FFT over time-lag grids, the fold-in aliasing correction for
// daily sampling, and cross-spectral matrices over site sets.

#include <complex>

#include <Eigen/Dense>

#include "halfspec/model.hpp"

namespace halfspec {

struct QuadSpec {
    double omega_max = 0.0;  // 0 = choose from the tail so truncated mass < tail_mass
    double rel_tol = 1e-9;
    double abs_tol = 0.0;    // 0 = relative control only
    double tail_mass = 1e-9; // target truncated-tail bound relative to K(0,0) scale
    int max_depth = 12;
};

struct CovPointResult {
    double value = 0.0;
    double abs_err = 0.0;         // achieved quadrature error estimate
    double imag_residual = 0.0;   // |Im| of the complex quadrature; ~0 for a valid model
    bool converged = true;
};

// K(s,t) by adaptive Gauss-Kronrod quadrature of the half-spectral integral
// over a symmetric frequency range.  The complex integrand is integrated as
// is; the imaginary residue is reported, not dropped.
CovPointResult cov_point(const HalfSpectralModel& m, const Eigen::VectorXd& s, double t,
                         const QuadSpec& spec = {});

struct CovGrid {
    Eigen::VectorXd s;         // spatial lag the slice was computed at
    Eigen::VectorXd t_grid;    // uniform time lags, symmetric about 0
    Eigen::VectorXd values;    // K(s, t) on t_grid
    double imag_residual = 0.0;
    bool aliasing_warning = false;
};

// K(s, .) over a uniform time-lag grid via one FFT of the half-spectrum
// sampled on n_grid frequencies offset half a step from 0 (so spectra with
// an integrable singularity at the origin never get evaluated there).
// Grid spacing in t is pi/omega_max.
CovGrid cov_slice_fft(const HalfSpectralModel& m, const Eigen::VectorXd& s,
                      int n_grid = 1 << 16, double omega_max = 1024.0);

// sum_{j=-m}^{m} f(w+2pi j)[C(s delta(w+2pi j)) + eta2 1{s=0}] e^{i theta(.) phi's},
// the spectrum of the process sampled at integer t folded into (-pi, pi].
std::complex<double> aliased_half_spectrum(const HalfSpectralModel& m,
                                           const Eigen::VectorXd& s, double omega, int m_trunc = 50);

struct CrossSpectralMatrix {
    double omega = 0.0;
    Eigen::MatrixXcd S;       // p x p Hermitian
    Eigen::MatrixXd coords;   // d x p site coordinates the matrix was built on
};

// S_ij = aliased_half_spectrum(m, s_i - s_j, omega, m_trunc); Hermitian by
// construction.
CrossSpectralMatrix cross_spectral_matrix(const HalfSpectralModel& m,
                                          const Eigen::MatrixXd& coords, double omega,
                                          int m_trunc = 50);

// Smallest frequency cutoff with estimated truncated tail mass below
// tail_mass relative to the f scale; used when QuadSpec.omega_max == 0.
double default_omega_max(const HalfSpectralModel& m, double t, double tail_mass = 1e-9);

}  // namespace halfspec
