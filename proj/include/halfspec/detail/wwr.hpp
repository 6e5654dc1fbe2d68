#pragma once

// Whittle-Wiggins-Robinson recursion over block order for symmetric
// positive definite block-Toeplitz matrices with blocks Gamma_tau,
// Gamma_{-tau} = Gamma_tau^T.  Forward/backward prediction coefficients are
// kept for the current order only; the innovation covariances provide the
// log-determinant and the innovations the quadratic form.

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "halfspec/exactlik.hpp"

namespace halfspec::detail {

class WwrEngine {
public:
    explicit WwrEngine(const BlockCovarianceSequence& seq)
        : G_(seq.blocks) {
        if (seq.n() == 0) throw std::invalid_argument("block sequence is empty");
        Sf_ = G_[0];
        Sb_ = G_[0];
        refactor(0);
    }

    int order() const { return order_; }
    const Eigen::MatrixXd& sigma_f() const { return Sf_; }
    const Eigen::LLT<Eigen::MatrixXd>& sigma_f_llt() const { return Sf_llt_; }

    // Coefficient F(k), k = 1..order: prediction X_t ~ sum_k F(k) X_{t-k}.
    const Eigen::MatrixXd& F(int k) const { return F_[k - 1]; }

    // Advance predictors from the current order r to r+1.
    void advance() {
        const int r = order_;
        const Eigen::MatrixXd& gnext = G_.at(r + 1);
        Eigen::MatrixXd df = gnext;  // forward innovation cross-covariance
        Eigen::MatrixXd db = gnext.transpose();
        for (int k = 1; k <= r; ++k) {
            df.noalias() -= F_[k - 1] * G_[r + 1 - k];
            db.noalias() -= B_[k - 1] * G_[r + 1 - k].transpose();
        }
        const Eigen::MatrixXd kf = Sb_llt_.solve(df.transpose()).transpose();  // df Sb^{-1}
        const Eigen::MatrixXd kb = Sf_llt_.solve(db.transpose()).transpose();  // db Sf^{-1}

        std::vector<Eigen::MatrixXd> fn(r + 1), bn(r + 1);
        for (int k = 1; k <= r; ++k) {
            fn[k - 1] = F_[k - 1] - kf * B_[r - k];
            bn[k - 1] = B_[k - 1] - kb * F_[r - k];
        }
        fn[r] = kf;
        bn[r] = kb;
        F_ = std::move(fn);
        B_ = std::move(bn);
        Sf_ -= kf * db;
        Sb_ -= kb * df;
        Sf_ = 0.5 * (Sf_ + Sf_.transpose()).eval();
        Sb_ = 0.5 * (Sb_ + Sb_.transpose()).eval();
        order_ = r + 1;
        refactor(order_);
    }

private:
    void refactor(int step) {
        Sf_llt_.compute(Sf_);
        Sb_llt_.compute(Sb_);
        if (Sf_llt_.info() != Eigen::Success || Sb_llt_.info() != Eigen::Success) {
            throw std::runtime_error(
                "block_levinson: loss of positive definiteness at recursion step " +
                std::to_string(step));
        }
    }

    const std::vector<Eigen::MatrixXd>& G_;
    int order_ = 0;
    std::vector<Eigen::MatrixXd> F_, B_;
    Eigen::MatrixXd Sf_, Sb_;
    Eigen::LLT<Eigen::MatrixXd> Sf_llt_, Sb_llt_;
};

}  // namespace halfspec::detail
