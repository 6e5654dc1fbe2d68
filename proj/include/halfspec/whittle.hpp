#pragma once

// Multivariate Whittle log-likelihood for regular monitoring data.

#include <Eigen/Dense>

#include "halfspec/dataio.hpp"
#include "halfspec/model.hpp"

namespace halfspec {

struct PeriodogramSet {
    int n = 0;
    Eigen::VectorXd freqs;   // 2 pi k / n for k = 0..n-1
    Eigen::MatrixXcd J;      // p x n, column k holds DFT_k / sqrt(n)

    // Rank-one periodogram matrix J_k J_k^*.
    Eigen::MatrixXcd periodogram(int k) const { return J.col(k) * J.col(k).adjoint(); }
};

// Per-station DFT coefficients scaled so that sum_k tr I_k / n equals the
// total sample variance (frequency 0 carries only the mean, removed in
// preprocessing).
PeriodogramSet periodograms(const RegularMonitoringData& data);

// l_W = -1/2 sum_{k=1}^{n-1} [ log det(2 pi S(w_k)) + tr((2 pi S(w_k))^{-1} I_k) ]
// with S the aliased cross-spectral matrix (truncation m_trunc) and
// I_k = J_k J_k^*.  E[I_k] ~ 2 pi S(w_k), so the sum matches the exact
// Gaussian log-likelihood up to constants.  Mirror frequencies are folded;
// deterministic given (model, data, m_trunc) regardless of thread count.
double whittle_loglik(const HalfSpectralModel& m, const RegularMonitoringData& data,
                      int m_trunc = 50);
double whittle_loglik(const HalfSpectralModel& m, const PeriodogramSet& pgram,
                      const Eigen::MatrixXd& coords, int m_trunc = 50);

}  // namespace halfspec
