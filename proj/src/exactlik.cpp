#include "halfspec/exactlik.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "halfspec/covops.hpp"
#include "halfspec/detail/wwr.hpp"
#include "halfspec/numerics.hpp"

namespace halfspec {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

int next_pow2(int n) {
    int v = 1;
    while (v < n) v <<= 1;
    return v;
}

double logdet_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    double s = 0.0;
    const auto& L = llt.matrixLLT();
    for (int i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
    return 2.0 * s;
}

}  // namespace

// WWR recursion engine lives in halfspec/detail/wwr.hpp (shared with simulate).

BlockCovarianceSequence block_sequence(const HalfSpectralModel& m,
                                       const Eigen::MatrixXd& coords, int n,
                                       int m_trunc) {
    if (n < 1) throw std::invalid_argument("block_sequence: n must be >= 1");
    const int p = static_cast<int>(coords.cols());
    if (coords.rows() != m.d) throw std::invalid_argument("block_sequence: coords must be d x p");

    BlockCovarianceSequence seq;
    seq.blocks.assign(n, Eigen::MatrixXd::Zero(p, p));

    if (m.has_cov_closed) {
        for (int tau = 0; tau < n; ++tau) {
            for (int i = 0; i < p; ++i) {
                for (int j = 0; j < p; ++j) {
                    seq.blocks[tau](i, j) = m.cov_closed(coords.col(i) - coords.col(j),
                                                         static_cast<double>(tau));
                }
            }
        }
        return seq;
    }

    // One FFT of the aliased spectrum per unordered site pair; stationarity
    // gives the transposed entry from the negative lags of the same grid.
    const int N = next_pow2(std::max(4 * n, 4096));
    const int nj = 2 * m_trunc + 1;
    const double dw = kTwoPi / N;

    // Frequency-dependent quantities shared by every pair.
    std::vector<double> f_val(static_cast<std::size_t>(N) * nj);
    std::vector<double> d_val(static_cast<std::size_t>(N) * nj);
    std::vector<double> th_val;
    const bool asym = m.has_theta();
    if (asym) th_val.resize(static_cast<std::size_t>(N) * nj);
    parallel_for(N, [&](std::size_t g) {
        const double w = -kPi + (static_cast<double>(g) + 0.5) * dw;
        for (int j = 0; j < nj; ++j) {
            const double wj = w + kTwoPi * (j - m_trunc);
            f_val[g * nj + j] = m.f(wj);
            d_val[g * nj + j] = m.delta(wj);
            if (asym) th_val[g * nj + j] = m.theta(wj);
        }
    });

    struct Pair {
        int i, j;
        double dist, proj;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            const Eigen::VectorXd lag = coords.col(i) - coords.col(j);
            pairs.push_back({i, j, lag.norm(), asym ? m.phi.dot(lag) : 0.0});
        }
    }

    std::vector<std::vector<std::complex<double>>> pair_cov(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t pi) {
        const Pair& pr = pairs[pi];
        std::vector<std::complex<double>> F(N);
        for (int g = 0; g < N; ++g) {
            double acc_re = 0.0, acc_im = 0.0;
            for (int j = 0; j < nj; ++j) {
                const std::size_t idx = static_cast<std::size_t>(g) * nj + j;
                double v = f_val[idx] *
                           (m.C(pr.dist == 0.0 ? 0.0 : pr.dist * d_val[idx]) +
                            (pr.dist == 0.0 ? m.eta2 : 0.0));
                if (asym) {
                    const double ph = th_val[idx] * pr.proj;
                    acc_re += v * std::cos(ph);
                    acc_im += v * std::sin(ph);
                } else {
                    acc_re += v;
                }
            }
            F[g] = {acc_re, acc_im};
        }
        // K(s, tau) = int_{-pi}^{pi} S_alias(s, w) e^{i tau w} dw, midpoint rule.
        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> idft(N);
        fft.inv(idft, F);  // (1/N) sum_g F_g e^{+2 pi i g t / N}
        auto& cov = pair_cov[pi];
        cov.resize(N);
        for (int t = 0; t < N; ++t) {
            const std::complex<double> ph = std::polar(1.0, dw * t * (0.5 - 0.5 * N));
            cov[t] = static_cast<double>(N) * dw * idft[t] * ph;
        }
    });

    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const Pair& pr = pairs[pi];
        const auto& cov = pair_cov[pi];
        for (int tau = 0; tau < n; ++tau) {
            const double k_pos = cov[tau].real();                    // K(s_i - s_j, +tau)
            const double k_neg = cov[(N - tau) % N].real();          // K(s_i - s_j, -tau)
            seq.blocks[tau](pr.i, pr.j) = k_pos;
            seq.blocks[tau](pr.j, pr.i) = k_neg;                     // K(s_j - s_i, +tau)
        }
    }
    return seq;
}

BlockLevinsonResult block_levinson(const BlockCovarianceSequence& seq,
                                   const Eigen::VectorXd& rhs) {
    const int p = seq.p();
    const int n = seq.n();
    if (rhs.size() != static_cast<Eigen::Index>(p) * n) {
        throw std::invalid_argument("block_levinson: rhs has wrong length");
    }
    detail::WwrEngine eng(seq);
    BlockLevinsonResult out;
    out.solution.resize(static_cast<Eigen::Index>(p) * n);
    out.logdet = logdet_llt(eng.sigma_f_llt());
    out.solution.head(p) = eng.sigma_f_llt().solve(rhs.head(p));

    for (int r = 0; r + 1 < n; ++r) {
        eng.advance();
        out.logdet += logdet_llt(eng.sigma_f_llt());
        // Residual of the next block equation under the current solution.
        Eigen::VectorXd eps = rhs.segment(static_cast<Eigen::Index>(r + 1) * p, p);
        for (int j = 0; j <= r; ++j) {
            eps.noalias() -= seq.blocks[r + 1 - j] * out.solution.segment(static_cast<Eigen::Index>(j) * p, p);
        }
        const Eigen::VectorXd w = eng.sigma_f_llt().solve(eps);
        // Last block column of T^{-1} is built from the forward coefficients:
        // y_j -= F(r+1-j)^T w.
        for (int j = 0; j <= r; ++j) {
            out.solution.segment(static_cast<Eigen::Index>(j) * p, p).noalias() -=
                eng.F(r + 1 - j).transpose() * w;
        }
        out.solution.segment(static_cast<Eigen::Index>(r + 1) * p, p) = w;
    }
    return out;
}

double exact_loglik(const BlockCovarianceSequence& seq, const Eigen::MatrixXd& series) {
    const int p = seq.p();
    const int n = seq.n();
    if (series.rows() != p || series.cols() != n) {
        throw std::invalid_argument("exact_loglik: series must be p x n matching the block sequence");
    }
    detail::WwrEngine eng(seq);
    double logdet = 0.0, quad = 0.0;
    for (int t = 0; t < n; ++t) {
        if (t > 0) eng.advance();
        logdet += logdet_llt(eng.sigma_f_llt());
        Eigen::VectorXd eps = series.col(t);
        for (int k = 1; k <= t; ++k) {
            eps.noalias() -= eng.F(k) * series.col(t - k);
        }
        quad += eps.dot(eng.sigma_f_llt().solve(eps));
    }
    const double np = static_cast<double>(p) * n;
    return -0.5 * (np * std::log(kTwoPi) + logdet + quad);
}

double exact_loglik(const HalfSpectralModel& m, const RegularMonitoringData& data,
                    int m_trunc) {
    const BlockCovarianceSequence seq = block_sequence(m, data.coords, data.n(), m_trunc);
    return exact_loglik(seq, data.series);
}

Eigen::MatrixXd dense_block_toeplitz(const BlockCovarianceSequence& seq) {
    const int p = seq.p();
    const int n = seq.n();
    if (static_cast<long>(p) * n > 5000) {
        throw std::invalid_argument("dense_block_toeplitz: p*n exceeds the 5000 dense-path guard");
    }
    Eigen::MatrixXd T(static_cast<Eigen::Index>(p) * n, static_cast<Eigen::Index>(p) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Eigen::MatrixXd& b = seq.blocks[std::abs(i - j)];
            if (i >= j) {
                T.block(static_cast<Eigen::Index>(i) * p, static_cast<Eigen::Index>(j) * p, p, p) = b;
            } else {
                T.block(static_cast<Eigen::Index>(i) * p, static_cast<Eigen::Index>(j) * p, p, p) =
                    b.transpose();
            }
        }
    }
    return T;
}

double exact_loglik_dense(const BlockCovarianceSequence& seq, const Eigen::MatrixXd& series) {
    const Eigen::MatrixXd T = dense_block_toeplitz(seq);
    Eigen::LLT<Eigen::MatrixXd> llt(T);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("exact_loglik_dense: covariance not positive definite");
    }
    const int p = seq.p(), n = seq.n();
    Eigen::VectorXd z(static_cast<Eigen::Index>(p) * n);
    for (int t = 0; t < n; ++t) z.segment(static_cast<Eigen::Index>(t) * p, p) = series.col(t);
    const double quad = z.dot(llt.solve(z));
    const double np = static_cast<double>(p) * n;
    return -0.5 * (np * std::log(kTwoPi) + logdet_llt(llt) + quad);
}

}  // namespace halfspec
