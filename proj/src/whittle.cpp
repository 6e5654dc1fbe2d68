#include "halfspec/whittle.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "halfspec/numerics.hpp"

namespace halfspec {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

[[noreturn]] void singular_fail(double omega, const Eigen::MatrixXcd& S) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S, Eigen::EigenvaluesOnly);
    throw std::runtime_error("whittle_loglik: singular cross-spectral matrix at omega = " +
                             std::to_string(omega) + ", min eigenvalue = " +
                             std::to_string(es.eigenvalues().minCoeff()));
}

}  // namespace

PeriodogramSet periodograms(const RegularMonitoringData& data) {
    const int p = data.p(), n = data.n();
    if (p < 1 || n < 2) throw std::invalid_argument("periodograms: need p >= 1, n >= 2");
    PeriodogramSet out;
    out.n = n;
    out.freqs.resize(n);
    for (int k = 0; k < n; ++k) out.freqs(k) = kTwoPi * k / n;
    out.J.resize(p, n);
    Eigen::FFT<double> fft;
    std::vector<double> row(n);
    std::vector<std::complex<double>> spec(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < p; ++i) {
        for (int t = 0; t < n; ++t) row[t] = data.series(i, t);
        fft.fwd(spec, row);
        for (int k = 0; k < n; ++k) out.J(i, k) = spec[k] * scale;
    }
    return out;
}

double whittle_loglik(const HalfSpectralModel& m, const PeriodogramSet& pgram,
                      const Eigen::MatrixXd& coords, int m_trunc) {
    const int p = static_cast<int>(coords.cols());
    const int n = pgram.n;
    if (pgram.J.rows() != p) throw std::invalid_argument("whittle_loglik: coords/periodogram mismatch");
    if (coords.rows() != m.d) throw std::invalid_argument("whittle_loglik: coords must be d x p");

    Eigen::MatrixXd dist(p, p), proj(p, p);
    const bool asym = m.has_theta();
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            const Eigen::VectorXd lag = coords.col(i) - coords.col(j);
            dist(i, j) = lag.norm();
            proj(i, j) = asym ? m.phi.dot(lag) : 0.0;
        }
    }

    const int half = n / 2;  // frequencies 1..half cover 1..n-1 with mirror weights
    const int nj = 2 * m_trunc + 1;
    std::vector<double> terms(half, 0.0);

    parallel_for(half, [&](std::size_t kk) {
        const int k = static_cast<int>(kk) + 1;
        const double w = (k <= n - k) ? kTwoPi * k / n : kTwoPi * k / n - kTwoPi;
        const double weight = (2 * k == n) ? 1.0 : 2.0;  // Nyquist counted once

        std::vector<double> f_j(nj), d_j(nj), th_j(asym ? nj : 0);
        double f_sum = 0.0;
        for (int j = 0; j < nj; ++j) {
            const double wj = w + kTwoPi * (j - m_trunc);
            f_j[j] = m.f(wj);
            d_j[j] = m.delta(wj);
            if (asym) th_j[j] = m.theta(wj);
            f_sum += f_j[j];
        }

        const Eigen::VectorXcd Jk = pgram.J.col(k);
        double logdet = 0.0, quad = 0.0;
        bool done = false;
        for (double jitter : {0.0, 1e-12, 1e-10, 1e-8}) {
            if (asym) {
                Eigen::MatrixXcd S(p, p);
                for (int a = 0; a < p; ++a) {
                    for (int b = a; b < p; ++b) {
                        std::complex<double> acc{0.0, 0.0};
                        for (int j = 0; j < nj; ++j) {
                            const double r = (a == b) ? 0.0 : dist(a, b) * d_j[j];
                            const double v = f_j[j] * (m.C(r) + (a == b ? m.eta2 : 0.0));
                            const double ph = th_j[j] * proj(a, b);
                            acc += std::complex<double>(v * std::cos(ph), v * std::sin(ph));
                        }
                        S(a, b) = kTwoPi * acc;
                        S(b, a) = std::conj(S(a, b));
                    }
                }
                if (jitter > 0.0) S += jitter * (S.real().trace() / p) * Eigen::MatrixXcd::Identity(p, p);
                Eigen::LLT<Eigen::MatrixXcd> llt(S);
                if (llt.info() != Eigen::Success) {
                    if (jitter == 1e-8) singular_fail(w, S);
                    continue;
                }
                const auto& L = llt.matrixLLT();
                for (int i = 0; i < p; ++i) logdet += 2.0 * std::log(L(i, i).real());
                const Eigen::VectorXcd y = llt.matrixL().solve(Jk);
                quad = y.squaredNorm();
            } else {
                Eigen::MatrixXd S(p, p);
                for (int a = 0; a < p; ++a) {
                    for (int b = a; b < p; ++b) {
                        double acc = 0.0;
                        if (a == b) {
                            acc = f_sum * (m.C(0.0) + m.eta2);
                        } else {
                            for (int j = 0; j < nj; ++j) acc += f_j[j] * m.C(dist(a, b) * d_j[j]);
                        }
                        S(a, b) = kTwoPi * acc;
                        S(b, a) = S(a, b);
                    }
                }
                if (jitter > 0.0) S += jitter * (S.trace() / p) * Eigen::MatrixXd::Identity(p, p);
                Eigen::LLT<Eigen::MatrixXd> llt(S);
                if (llt.info() != Eigen::Success) {
                    if (jitter == 1e-8) singular_fail(w, S.cast<std::complex<double>>());
                    continue;
                }
                const auto& L = llt.matrixLLT();
                for (int i = 0; i < p; ++i) logdet += 2.0 * std::log(L(i, i));
                const Eigen::VectorXd yr = llt.matrixL().solve(Jk.real());
                const Eigen::VectorXd yi = llt.matrixL().solve(Jk.imag());
                quad = yr.squaredNorm() + yi.squaredNorm();
            }
            done = true;
            break;
        }
        if (!done) singular_fail(w, Eigen::MatrixXcd::Identity(p, p));
        terms[kk] = weight * (logdet + quad);
    });

    return -0.5 * pairwise_sum(terms);
}

double whittle_loglik(const HalfSpectralModel& m, const RegularMonitoringData& data,
                      int m_trunc) {
    return whittle_loglik(m, periodograms(data), data.coords, m_trunc);
}

}  // namespace halfspec
