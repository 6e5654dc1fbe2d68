#pragma once

// Exact Gaussian space-time log-likelihood through the block-Toeplitz
// Levinson (Whittle-Wiggins-Robinson) recursion, with a dense Cholesky
// oracle behind a size guard.

#include <vector>

#include <Eigen/Dense>

#include "halfspec/dataio.hpp"
#include "halfspec/model.hpp"

namespace halfspec {

// Gamma_0..Gamma_{n-1} with Gamma_tau[i][j] = K(s_i - s_j, tau).
// Gamma_{-tau} = Gamma_tau^T; blocks need not be symmetric individually
// (theta != 0 breaks full symmetry).
struct BlockCovarianceSequence {
    std::vector<Eigen::MatrixXd> blocks;

    int p() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].rows()); }
    int n() const { return static_cast<int>(blocks.size()); }
};

// Builds the lag blocks at integer time lags.  Half-spectral models go
// through one FFT of the aliased spectrum per site pair on a half-offset
// frequency grid of N >= max(4n, 4096) points; closed-form models fill
// entries directly.
BlockCovarianceSequence block_sequence(const HalfSpectralModel& m,
                                       const Eigen::MatrixXd& coords, int n,
                                       int m_trunc = 50);

struct BlockLevinsonResult {
    Eigen::VectorXd solution;  // T^{-1} rhs
    double logdet = 0.0;       // log det T
};

// Solves T x = rhs and computes log det T in O(p^3 n^2), T the symmetric
// positive definite block-Toeplitz matrix assembled from the sequence.
// Throws if positive definiteness is lost, reporting the recursion step.
BlockLevinsonResult block_levinson(const BlockCovarianceSequence& seq,
                                   const Eigen::VectorXd& rhs);

// -1/2 [ p n log 2pi + log det T + z' T^{-1} z ], z the time-major stack of
// the series (time outer, station inner).
double exact_loglik(const HalfSpectralModel& m, const RegularMonitoringData& data,
                    int m_trunc = 50);
double exact_loglik(const BlockCovarianceSequence& seq, const Eigen::MatrixXd& series);

// Dense assembly and Cholesky path, usable while p*n <= 5000; correctness
// oracle for the recursion.
Eigen::MatrixXd dense_block_toeplitz(const BlockCovarianceSequence& seq);
double exact_loglik_dense(const BlockCovarianceSequence& seq, const Eigen::MatrixXd& series);

}  // namespace halfspec
