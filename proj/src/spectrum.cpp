#include "halfspec/spectrum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "halfspec/numerics.hpp"

namespace halfspec {

namespace {

std::vector<double> default_norms() {
    // 10^1, 10^1.5, ..., 10^4
    std::vector<double> v;
    for (int i = 2; i <= 8; ++i) v.push_back(std::pow(10.0, 0.5 * i));
    return v;
}

// Verdict bands over the last third of the sup-deviation sequence: the limit
// statement itself is not decidable from finite samples, so thresholds are
// explicit and an inconclusive outcome is possible.
std::string path_verdict(const std::vector<double>& sup) {
    const std::size_t q = std::max<std::size_t>(2, sup.size() / 3);
    const std::size_t start = sup.size() - q;
    double log_acc = 0.0;
    bool all_large = true;
    for (std::size_t i = start; i < sup.size(); ++i) {
        log_acc += std::log(std::max(sup[i], 1e-300));
        all_large = all_large && sup[i] > 0.5;
    }
    const double gmean = std::exp(log_acc / q);
    const bool trending_down = sup.back() <= sup[start];
    if (gmean < 0.05 && trending_down) return "pass";
    if (all_large) return "fail";
    return "inconclusive";
}

}  // namespace

ConditionReport check_condition(const std::function<double(const Eigen::VectorXd&, double)>& g,
                                int dim, double R, std::vector<double> norms,
                                int grid_density) {
    if (dim < 0) throw std::invalid_argument("check_condition: dim must be >= 0");
    if (norms.empty()) norms = default_norms();
    if (norms.size() < 3) throw std::invalid_argument("check_condition: need >= 3 norms");
    for (std::size_t i = 1; i < norms.size(); ++i) {
        if (norms[i] <= norms[i - 1]) throw std::invalid_argument("check_condition: norms must increase");
    }
    const auto ball = halton_ball(dim + 1, R, grid_density);

    ConditionReport rep;
    rep.R = R;

    struct PathDef {
        std::string name;
        // Base point at a given norm: lambda (may be empty when dim == 0), omega.
        std::function<void(double, Eigen::VectorXd&, double&)> base;
    };
    std::vector<PathDef> defs;
    const double omega0 = 1.7;  // generic fixed frequency away from origin singularities
    defs.push_back({"omega", [dim](double N, Eigen::VectorXd& lam, double& w) {
                        lam = Eigen::VectorXd::Zero(dim);
                        w = N;
                    }});
    if (dim >= 1) {
        defs.push_back({"lambda", [dim, omega0](double N, Eigen::VectorXd& lam, double& w) {
                            lam = Eigen::VectorXd::Zero(dim);
                            lam(0) = N;
                            w = omega0;
                        }});
        defs.push_back({"diagonal", [dim](double N, Eigen::VectorXd& lam, double& w) {
                            lam = Eigen::VectorXd::Zero(dim);
                            lam(0) = N / std::sqrt(2.0);
                            w = N / std::sqrt(2.0);
                        }});
    }

    bool any_fail = false, all_pass = true;
    for (const auto& def : defs) {
        ConditionReport::Path path;
        path.name = def.name;
        path.norms = norms;
        for (double N : norms) {
            Eigen::VectorXd lam;
            double w = 0.0;
            def.base(N, lam, w);
            const double g0 = g(lam, w);
            if (!(g0 > 0.0) || !std::isfinite(g0)) {
                throw std::runtime_error("check_condition: spectrum not strictly positive at a base point on path '" +
                                         def.name + "'");
            }
            double sup = 0.0;
            Eigen::VectorXd lam_p(dim);
            for (const auto& pt : ball) {
                for (int c = 0; c < dim; ++c) lam_p(c) = lam(c) + pt[c];
                const double wp = w + pt[dim];
                const double ratio = g(lam_p, wp) / g0;
                const double dev = std::fabs(ratio - 1.0);
                if (std::isfinite(dev)) {
                    sup = std::max(sup, dev);
                } else {
                    sup = std::numeric_limits<double>::infinity();
                }
            }
            path.sup_dev.push_back(sup);
        }
        path.verdict = path_verdict(path.sup_dev);
        any_fail = any_fail || path.verdict == "fail";
        all_pass = all_pass && path.verdict == "pass";
        rep.paths.push_back(std::move(path));
    }
    rep.verdict = any_fail ? "fail" : (all_pass ? "pass" : "inconclusive");
    return rep;
}

ConditionReport check_condition(const HalfSpectralModel& m, double R,
                                std::vector<double> norms, int grid_density) {
    const auto g = [&m](const Eigen::VectorXd& lam, double w) {
        return full_spectrum_eval(m, lam, w);
    };
    return check_condition(g, m.d, R, std::move(norms), grid_density);
}

bool check_theorem1_invariance(const HalfSpectralModel& m, double rho, double R,
                               std::vector<double> norms, int grid_density) {
    HalfSpectralModel sym = m;
    sym.theta = nullptr;
    HalfSpectralModel shifted = m;
    if (rho == 0.0) {
        shifted.theta = nullptr;
    } else {
        shifted.theta = [rho](double w) { return rho * w; };
    }
    const ConditionReport a = check_condition(sym, R, norms, grid_density);
    const ConditionReport b = check_condition(shifted, R, std::move(norms), grid_density);
    return a.verdict == b.verdict;
}

SmoothnessReport smoothness_report(const HalfSpectralModel& m) {
    SmoothnessReport rep;
    if (std::isfinite(m.tail_k)) {
        rep.k = m.tail_k;
    } else {
        if (!m.f) throw std::invalid_argument("smoothness_report: model has no temporal spectral density");
        // Log-log regression of f over omega in [1e3, 1e6].
        const int npt = 40;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < npt; ++i) {
            const double lw = std::log(1e3) + (std::log(1e6) - std::log(1e3)) * i / (npt - 1.0);
            const double fv = m.f(std::exp(lw));
            if (!(fv > 0.0)) throw std::runtime_error("smoothness_report: f not positive on the tail grid");
            const double lf = std::log(fv);
            sx += lw;
            sy += lf;
            sxx += lw * lw;
            sxy += lw * lf;
        }
        const double slope = (npt * sxy - sx * sy) / (npt * sxx - sx * sx);
        rep.k = -slope;
        rep.k_from_regression = true;
        if (!(rep.k > 1.0)) throw std::runtime_error("smoothness_report: tail regression nonconvergent (k <= 1)");
    }
    rep.nu_eff_time = 0.5 * (rep.k - 1.0);
    if (std::isfinite(m.nu_spatial)) {
        rep.nu_eff_space = (m.nu_spatial + 0.5) * (rep.k - 1.0) / rep.k;
    } else {
        rep.nu_eff_space = std::numeric_limits<double>::infinity();
    }
    // Largest integer strictly below the effective smoothness.
    const auto strict_floor = [](double x) {
        if (std::isinf(x)) return std::numeric_limits<int>::max();
        const double r = std::round(x);
        if (std::fabs(x - r) < 1e-12) return static_cast<int>(r) - 1;
        return static_cast<int>(std::floor(x));
    };
    rep.m_space = strict_floor(rep.nu_eff_space);
    rep.m_time = strict_floor(rep.nu_eff_time);
    return rep;
}

nlohmann::json condition_report_json(const ConditionReport& r) {
    nlohmann::json paths = nlohmann::json::array();
    for (const auto& p : r.paths) {
        paths.push_back({{"name", p.name},
                         {"norms", p.norms},
                         {"sup_dev", p.sup_dev},
                         {"verdict", p.verdict}});
    }
    return {{"verdict", r.verdict}, {"R", r.R}, {"paths", paths}};
}

nlohmann::json smoothness_report_json(const SmoothnessReport& r) {
    nlohmann::json j;
    j["k"] = r.k;
    if (std::isinf(r.nu_eff_space)) {
        j["nu_eff_space"] = "inf";
        j["m_space"] = "inf";
    } else {
        j["nu_eff_space"] = r.nu_eff_space;
        j["m_space"] = r.m_space;
    }
    j["nu_eff_time"] = r.nu_eff_time;
    j["m_time"] = r.m_time;
    j["k_from_regression"] = r.k_from_regression;
    return j;
}

}  // namespace halfspec
