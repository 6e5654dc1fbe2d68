#include "halfspec/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "halfspec/exactlik.hpp"
#include "halfspec/whittle.hpp"

namespace halfspec {

namespace {

constexpr double kPenalty = -1e300;

struct Transform {
    enum class Kind { Log, Logit01, Logit02, Identity, LogShiftHalf } kind;

    double to_x(double v) const {
        switch (kind) {
            case Kind::Log: return std::log(std::max(v, 1e-12));
            case Kind::Logit01: {
                const double c = std::clamp(v, 1e-10, 1.0 - 1e-10);
                return std::log(c / (1.0 - c));
            }
            case Kind::Logit02: {
                const double c = std::clamp(v / 2.0, 1e-10, 1.0 - 1e-10);
                return std::log(c / (1.0 - c));
            }
            case Kind::Identity: return v;
            case Kind::LogShiftHalf: return std::log(std::max(v + 0.5, 1e-12));
        }
        return v;
    }

    double to_v(double x) const {
        switch (kind) {
            case Kind::Log: return std::exp(x);
            case Kind::Logit01: return 1.0 / (1.0 + std::exp(-x));
            case Kind::Logit02: return 2.0 / (1.0 + std::exp(-x));
            case Kind::Identity: return x;
            case Kind::LogShiftHalf: return std::exp(x) - 0.5;
        }
        return x;
    }

    double dv_dx(double x) const {
        switch (kind) {
            case Kind::Log: return std::exp(x);
            case Kind::Logit01: {
                const double s = 1.0 / (1.0 + std::exp(-x));
                return s * (1.0 - s);
            }
            case Kind::Logit02: {
                const double s = 1.0 / (1.0 + std::exp(-x));
                return 2.0 * s * (1.0 - s);
            }
            case Kind::Identity: return 1.0;
            case Kind::LogShiftHalf: return std::exp(x);
        }
        return 1.0;
    }
};

Transform transform_for(ParamDef::Domain d) {
    using D = ParamDef::Domain;
    using K = Transform::Kind;
    switch (d) {
        case D::Positive: return {K::Log};
        case D::NonNegative: return {K::Log};
        case D::Real: return {K::Identity};
        case D::ZeroTwo: return {K::Logit02};
        case D::ZeroOne: return {K::Logit01};
        case D::AboveMinusHalf: return {K::LogShiftHalf};
    }
    return {K::Identity};
}

struct NmState {
    Eigen::MatrixXd verts;   // dim x (dim+1)
    Eigen::VectorXd vals;    // dim+1
    int n_evals = 0;
};

double simplex_diameter(const Eigen::MatrixXd& verts) {
    double d = 0.0;
    for (int i = 1; i < verts.cols(); ++i) {
        d = std::max(d, (verts.col(i) - verts.col(0)).norm());
    }
    return d;
}

}  // namespace

Eigen::MatrixXd numerical_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& at) {
    const int dim = static_cast<int>(at.size());
    Eigen::VectorXd h(dim);
    for (int i = 0; i < dim; ++i) h(i) = std::max(1e-4, 1e-4 * std::fabs(at(i)));

    const auto eval = [&](const Eigen::VectorXd& x, const std::string& where) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            throw std::runtime_error("numerical_hessian: non-finite evaluation at " + where);
        }
        return v;
    };

    Eigen::MatrixXd H(dim, dim);
    const double f0 = eval(at, "center");
    for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd xp = at, xm = at;
        xp(i) += h(i);
        xm(i) -= h(i);
        const double fp = eval(xp, "coordinate " + std::to_string(i));
        const double fm = eval(xm, "coordinate " + std::to_string(i));
        H(i, i) = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
        for (int j = i + 1; j < dim; ++j) {
            Eigen::VectorXd xpp = at, xpm = at, xmp = at, xmm = at;
            xpp(i) += h(i); xpp(j) += h(j);
            xpm(i) += h(i); xpm(j) -= h(j);
            xmp(i) -= h(i); xmp(j) += h(j);
            xmm(i) -= h(i); xmm(j) -= h(j);
            const std::string where = "coordinates " + std::to_string(i) + "," + std::to_string(j);
            const double v = (eval(xpp, where) - eval(xpm, where) - eval(xmp, where) + eval(xmm, where)) /
                             (4.0 * h(i) * h(j));
            H(i, j) = v;
            H(j, i) = v;
        }
    }
    return H;
}

FitResult fit(const std::function<double(const Params&)>& objective,
              const std::string& family, const Params& init, const Params& fixed,
              const FitOptions& opts) {
    const auto& defs = family_params(family);

    // Assemble the full starting vector and the free-coordinate map.
    Params start;
    std::vector<const ParamDef*> free_defs;
    for (const ParamDef& def : defs) {
        if (fixed.has(def.name)) {
            start.set(def.name, fixed.get(def.name));
        } else {
            start.set(def.name, init.get_or(def.name, def.default_value));
            free_defs.push_back(&def);
        }
    }
    for (const auto& [k, v] : fixed.items()) {
        (void)v;
        bool known = false;
        for (const ParamDef& def : defs) known = known || def.name == k;
        if (!known) throw std::invalid_argument("fit: fixed pin '" + k + "' is not a parameter of " + family);
    }
    const int dim = static_cast<int>(free_defs.size());
    if (dim == 0) throw std::invalid_argument("fit: no free parameters");

    std::vector<Transform> trans;
    Eigen::VectorXd x0(dim);
    for (int i = 0; i < dim; ++i) {
        trans.push_back(transform_for(free_defs[i]->domain));
        const double v = start.get(free_defs[i]->name);
        if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite initial value for " + free_defs[i]->name);
        x0(i) = trans[i].to_x(v);
    }

    int n_evals = 0;
    const auto params_at = [&](const Eigen::VectorXd& x) {
        Params p = start;
        for (int i = 0; i < dim; ++i) p.set(free_defs[i]->name, trans[i].to_v(x(i)));
        return p;
    };
    const auto F = [&](const Eigen::VectorXd& x) -> double {
        ++n_evals;
        try {
            const double v = objective(params_at(x));
            return std::isfinite(v) ? v : kPenalty;
        } catch (const std::exception&) {
            return kPenalty;  // rejected vertex
        }
    };

    std::ofstream trace;
    if (!opts.trace_csv.empty()) {
        trace.open(opts.trace_csv);
        trace << "iteration,best_objective";
        for (const auto* def : free_defs) trace << "," << def->name;
        trace << "\n";
    }

    // Nelder-Mead (maximization), standard coefficients.
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    Eigen::VectorXd best_x = x0;
    double best_val = F(x0);
    bool converged = false;
    double step = opts.init_step;

    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        NmState st;
        st.verts.resize(dim, dim + 1);
        st.vals.resize(dim + 1);
        st.verts.col(0) = best_x;
        st.vals(0) = best_val;
        for (int i = 0; i < dim; ++i) {
            Eigen::VectorXd v = best_x;
            v(i) += step;
            st.verts.col(i + 1) = v;
            st.vals(i + 1) = F(v);
        }

        for (int iter = 0; iter < opts.max_iter; ++iter) {
            // Order descending (maximization: best first).
            std::vector<int> idx(dim + 1);
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](int a, int b) { return st.vals(a) > st.vals(b); });
            Eigen::MatrixXd v2 = st.verts;
            Eigen::VectorXd f2 = st.vals;
            for (int i = 0; i <= dim; ++i) {
                st.verts.col(i) = v2.col(idx[i]);
                st.vals(i) = f2(idx[i]);
            }

            if (trace.is_open()) {
                trace << iter << "," << st.vals(0);
                const Params pb = params_at(st.verts.col(0));
                for (const auto* def : free_defs) trace << "," << pb.get(def->name);
                trace << "\n";
            }

            const double spread = st.vals(0) - st.vals(dim);
            if (simplex_diameter(st.verts) < opts.diam_tol && spread < opts.spread_tol) {
                converged = true;
                break;
            }

            const Eigen::VectorXd centroid = st.verts.leftCols(dim).rowwise().mean();
            const Eigen::VectorXd xr = centroid + alpha * (centroid - st.verts.col(dim));
            const double fr = F(xr);
            if (fr > st.vals(0)) {
                const Eigen::VectorXd xe = centroid + gamma * (xr - centroid);
                const double fe = F(xe);
                if (fe > fr) {
                    st.verts.col(dim) = xe;
                    st.vals(dim) = fe;
                } else {
                    st.verts.col(dim) = xr;
                    st.vals(dim) = fr;
                }
            } else if (fr > st.vals(dim - 1)) {
                st.verts.col(dim) = xr;
                st.vals(dim) = fr;
            } else {
                const Eigen::VectorXd xc = centroid + rho * (st.verts.col(dim) - centroid);
                const double fc = F(xc);
                if (fc > st.vals(dim)) {
                    st.verts.col(dim) = xc;
                    st.vals(dim) = fc;
                } else {
                    for (int i = 1; i <= dim; ++i) {
                        st.verts.col(i) = st.verts.col(0) + sigma * (st.verts.col(i) - st.verts.col(0));
                        st.vals(i) = F(st.verts.col(i));
                    }
                }
            }
        }

        int ib = 0;
        st.vals.maxCoeff(&ib);
        if (st.vals(ib) > best_val) {
            best_val = st.vals(ib);
            best_x = st.verts.col(ib);
        }
        if (converged && restart == opts.max_restarts) break;
        step *= 0.3;  // restart from a tighter perturbed simplex around the best
    }

    FitResult out;
    out.params = params_at(best_x);
    out.loglik = best_val;
    out.n_evals = n_evals;
    out.converged = converged;
    for (const auto* def : free_defs) out.free_names.push_back(def->name);
    // Pins returned bit-identical.
    for (const auto& [k, v] : fixed.items()) out.params.set(k, v);

    // Hessian in transformed coordinates and delta-method standard errors.
    out.se = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::quiet_NaN());
    try {
        const auto fx = [&](const Eigen::VectorXd& x) { return objective(params_at(x)); };
        out.hessian = numerical_hessian(fx, best_x);
        const Eigen::MatrixXd neg = -out.hessian;
        const Eigen::LLT<Eigen::MatrixXd> llt(neg);
        if (llt.info() == Eigen::Success) {
            const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
            for (int i = 0; i < dim; ++i) {
                out.se(i) = std::sqrt(std::max(cov(i, i), 0.0)) * std::fabs(trans[i].dv_dx(best_x(i)));
            }
        }
    } catch (const std::exception&) {
        // SEs stay NaN when the surface is not locally quadratic.
    }
    return out;
}

Params default_init(const std::string& family, const RegularMonitoringData& data) {
    const int p = data.p(), n = data.n();
    double total_var = 0.0;
    for (int i = 0; i < p; ++i) {
        const double mu = data.series.row(i).mean();
        total_var += (data.series.row(i).array() - mu).square().sum() / (n - 1);
    }
    total_var /= p;

    std::vector<double> dists;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            dists.push_back((data.coords.col(i) - data.coords.col(j)).norm());
        }
    }
    double med_dist = 1.0;
    if (!dists.empty()) {
        std::sort(dists.begin(), dists.end());
        med_dist = dists[dists.size() / 2];
    }

    double rho1 = 0.0;
    for (int i = 0; i < p; ++i) {
        const double mu = data.series.row(i).mean();
        double num = 0.0, den = 0.0;
        for (int t = 0; t + 1 < n; ++t) {
            num += (data.series(i, t) - mu) * (data.series(i, t + 1) - mu);
        }
        den = (data.series.row(i).array() - mu).square().sum();
        if (den > 0.0) rho1 += num / den;
    }
    rho1 = std::clamp(rho1 / p, 0.01, 0.99);
    const double beta = std::clamp(-std::log(rho1), 0.01, 5.0);

    Params init;
    init.set("phi_var", std::max(total_var, 1e-8));
    init.set("alpha", 1.0 / std::max(med_dist, 1e-8));
    for (const ParamDef& def : family_params(family)) {
        if (def.name == "beta") init.set("beta", beta);
        if (def.name == "beta1") init.set("beta1", beta);
        if (def.name == "beta2") init.set("beta2", beta * beta);
        if (def.name == "eta2") init.set("eta2", 0.05 * std::max(total_var, 1e-8));
    }
    return init;
}

FitResult fit_whittle(const std::string& family, const RegularMonitoringData& data,
                      const Params& init, const Params& fixed, int m_trunc,
                      const FitOptions& opts) {
    const PeriodogramSet pgram = periodograms(data);
    const Eigen::Vector3d ew = east_to_west_direction(data.coords);
    const Eigen::VectorXd phi = ew;
    const auto objective = [&](const Params& p) {
        const HalfSpectralModel m = make_model(family, p, 3, &phi);
        return whittle_loglik(m, pgram, data.coords, m_trunc);
    };
    return fit(objective, family, init, fixed, opts);
}

FitResult fit_exact(const std::string& family, const RegularMonitoringData& data,
                    const Params& init, const Params& fixed, int m_trunc,
                    const FitOptions& opts) {
    const Eigen::Vector3d ew = east_to_west_direction(data.coords);
    const Eigen::VectorXd phi = ew;
    const auto objective = [&](const Params& p) {
        const HalfSpectralModel m = make_model(family, p, 3, &phi);
        return exact_loglik(m, data, m_trunc);
    };
    return fit(objective, family, init, fixed, opts);
}

nlohmann::json fit_result_json(const FitResult& r) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : r.params.items()) params[k] = v;
    nlohmann::json se = nlohmann::json::object();
    for (std::size_t i = 0; i < r.free_names.size(); ++i) {
        const double s = r.se(static_cast<Eigen::Index>(i));
        if (std::isfinite(s)) {
            se[r.free_names[i]] = s;
        } else {
            se[r.free_names[i]] = nullptr;
        }
    }
    std::vector<std::vector<double>> hess;
    for (int i = 0; i < r.hessian.rows(); ++i) {
        hess.emplace_back(r.hessian.row(i).begin(), r.hessian.row(i).end());
    }
    return {{"params", params},
            {"loglik", r.loglik},
            {"free", r.free_names},
            {"se", se},
            {"hessian", hess},
            {"n_evals", r.n_evals},
            {"converged", r.converged}};
}

}  // namespace halfspec
