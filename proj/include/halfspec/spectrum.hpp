#pragma once

// Numerical spectral diagnostics: the relative-flatness regularity condition
// on full spectra, its invariance under linear phase shifts, and effective
// smoothness reports.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "halfspec/model.hpp"

namespace halfspec {

struct ConditionReport {
    struct Path {
        std::string name;              // "omega", "lambda", "diagonal"
        std::vector<double> norms;     // base-point norms probed
        std::vector<double> sup_dev;   // sup |g(x+u)/g(x) - 1| over the R-ball
        std::string verdict;           // pass / fail / inconclusive
    };
    std::vector<Path> paths;
    std::string verdict;
    double R = 5.0;
};

// Probes sup_{|(u,v)| < R} |g(lambda+v, omega+u)/g(lambda, omega) - 1| along
// paths to infinity (omega with lambda fixed, lambda with omega fixed, and
// the diagonal), at the given base-point norms, using grid_density
// quasi-random ball points.  The limit statement is not decidable by finite
// sampling; verdicts are banded: pass when the last-third geometric mean of
// the sup values is < 0.05 and trending down, fail when it stays > 0.5,
// inconclusive otherwise.
ConditionReport check_condition(const std::function<double(const Eigen::VectorXd&, double)>& g,
                                int dim, double R = 5.0, std::vector<double> norms = {},
                                int grid_density = 512);

// Same check on a model's full spectrum (requires a closed-form h).
ConditionReport check_condition(const HalfSpectralModel& m, double R = 5.0,
                                std::vector<double> norms = {}, int grid_density = 512);

// True iff the condition verdict with theta == 0 equals the verdict with
// theta(w) = rho w.
bool check_theorem1_invariance(const HalfSpectralModel& m, double rho, double R = 5.0,
                               std::vector<double> norms = {}, int grid_density = 512);

struct SmoothnessReport {
    double k = 0.0;              // temporal tail exponent, f ~ c_f w^{-k}
    double nu_eff_space = 0.0;   // (nu + 1/2)(k-1)/k; +inf for analytic-in-space models
    double nu_eff_time = 0.0;    // (k-1)/2
    int m_space = 0;             // mean-square differentiability orders:
    int m_time = 0;              // largest integer strictly below the effective smoothness
    bool k_from_regression = false;
};

// Closed-form tail exponent when the family registered one, otherwise a
// log-log regression of f over omega in [1e3, 1e6].
SmoothnessReport smoothness_report(const HalfSpectralModel& m);

nlohmann::json condition_report_json(const ConditionReport& r);
nlohmann::json smoothness_report_json(const SmoothnessReport& r);

}  // namespace halfspec
