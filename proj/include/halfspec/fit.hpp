#pragma once

// Derivative-free maximum-likelihood estimation: Nelder-Mead simplex over
// transformed coordinates, numerical Hessians and delta-method standard
// errors.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "halfspec/dataio.hpp"
#include "halfspec/model.hpp"

namespace halfspec {

struct FitOptions {
    int max_iter = 4000;          // simplex iterations per (re)start
    double diam_tol = 1e-6;       // simplex diameter convergence threshold
    double spread_tol = 1e-8;     // objective spread convergence threshold
    int max_restarts = 3;
    double init_step = 0.25;      // initial simplex edge in transformed space
    std::string trace_csv;        // per-iteration trace file when nonempty
};

struct FitResult {
    Params params;                     // all family parameters at the optimum
    double loglik = 0.0;
    std::vector<std::string> free_names;
    Eigen::MatrixXd hessian;           // of the objective in transformed coordinates
    Eigen::VectorXd se;                // delta-method standard errors per free parameter
    int n_evals = 0;
    bool converged = false;
};

// Maximizes objective(params) over the family's parameters not pinned in
// `fixed`, starting from `init` (missing entries fall back to family
// defaults).  Positive parameters move in log space, interval parameters in
// scaled-logit space, rho in identity.  Pinned parameters are returned
// bit-identical to their pins.
FitResult fit(const std::function<double(const Params&)>& objective,
              const std::string& family, const Params& init, const Params& fixed,
              const FitOptions& opts = {});

// Central second differences with step max(1e-4, 1e-4 |x_i|) per coordinate;
// symmetric by construction.  Throws on non-finite evaluations, naming the
// coordinate.
Eigen::MatrixXd numerical_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& at);

// Moment-based starting values: phi_var from the total variance, alpha from
// the median inter-site distance, beta from the pooled lag-1 autocorrelation.
Params default_init(const std::string& family, const RegularMonitoringData& data);

// Convenience drivers wiring the two likelihoods.  phi (when the family has
// a phase) defaults to the east-to-west direction at the site centroid.
FitResult fit_whittle(const std::string& family, const RegularMonitoringData& data,
                      const Params& init, const Params& fixed, int m_trunc = 50,
                      const FitOptions& opts = {});
FitResult fit_exact(const std::string& family, const RegularMonitoringData& data,
                    const Params& init, const Params& fixed, int m_trunc = 50,
                    const FitOptions& opts = {});

nlohmann::json fit_result_json(const FitResult& r);

}  // namespace halfspec
