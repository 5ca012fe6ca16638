#include "lapsekit/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lapsekit/error.hpp"

namespace lapsekit {

namespace {

constexpr double kProbClamp = 1e-15;
constexpr double kWeightFloor = 1e-10;

double softplus(double eta) {
    if (eta > 35.0) return eta;
    if (eta < -35.0) return std::exp(eta);
    return std::log1p(std::exp(eta));
}

std::vector<double> linear_predictor(const DesignMatrix& design, double intercept,
                                     std::span<const double> beta) {
    if (beta.size() != design.n_cols()) {
        throw Error("coefficient count " + std::to_string(beta.size()) + " does not match design width " +
                    std::to_string(design.n_cols()));
    }
    std::vector<double> eta(design.n_rows(), intercept);
    for (std::size_t j = 0; j < design.n_cols(); ++j) {
        const double b = beta[j];
        if (b == 0.0) continue;
        auto col = design.column(j);
        for (std::size_t r = 0; r < col.size(); ++r) eta[r] += b * col[r];
    }
    return eta;
}

/// Dense SPD solve via Cholesky; dim stays small (feature count).
/// Returns false when the matrix is not positive definite.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t dim) {
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i * dim + j];
            for (std::size_t k = 0; k < j; ++k) sum -= a[i * dim + k] * a[j * dim + k];
            if (i == j) {
                if (sum <= 0.0) return false;
                a[i * dim + i] = std::sqrt(sum);
            } else {
                a[i * dim + j] = sum / a[j * dim + j];
            }
        }
    }
    for (std::size_t i = 0; i < dim; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= a[i * dim + k] * b[k];
        b[i] = sum / a[i * dim + i];
    }
    for (std::size_t ii = dim; ii-- > 0;) {
        double sum = b[ii];
        for (std::size_t k = ii + 1; k < dim; ++k) sum -= a[k * dim + ii] * b[k];
        b[ii] = sum / a[ii * dim + ii];
    }
    return true;
}

double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

} // namespace

double sigmoid(double eta) {
    double p = eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

std::vector<double> predict_proba(const LinearFit& fit, const DesignMatrix& design) {
    auto eta = linear_predictor(design, fit.intercept, fit.coefficients);
    std::vector<double> out(eta.size());
    std::transform(eta.begin(), eta.end(), out.begin(), [](double e) { return sigmoid(e); });
    return out;
}

double logit_nll(const DesignMatrix& design, std::span<const std::int8_t> labels, double intercept,
                 std::span<const double> beta) {
    if (labels.size() != design.n_rows()) throw Error("label count does not match design rows");
    auto eta = linear_predictor(design, intercept, beta);
    double nll = 0;
    for (std::size_t r = 0; r < eta.size(); ++r) {
        nll += softplus(eta[r]) - (labels[r] == 1 ? eta[r] : 0.0);
    }
    return nll;
}

std::vector<double> logit_gradient(const DesignMatrix& design, std::span<const std::int8_t> labels,
                                   double intercept, std::span<const double> beta) {
    auto eta = linear_predictor(design, intercept, beta);
    std::vector<double> resid(eta.size()); // p - y
    for (std::size_t r = 0; r < eta.size(); ++r) {
        resid[r] = sigmoid(eta[r]) - static_cast<double>(labels[r]);
    }
    std::vector<double> grad(design.n_cols() + 1, 0.0);
    grad[0] = std::accumulate(resid.begin(), resid.end(), 0.0);
    for (std::size_t j = 0; j < design.n_cols(); ++j) {
        auto col = design.column(j);
        double g = 0;
        for (std::size_t r = 0; r < col.size(); ++r) g += col[r] * resid[r];
        grad[j + 1] = g;
    }
    return grad;
}

LinearFit fit_logit(const DesignMatrix& design, std::span<const std::int8_t> labels) {
    const std::size_t n = design.n_rows();
    if (labels.size() != n) throw Error("label count does not match design rows");
    const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::int8_t{1}));
    if (pos == 0 || pos == n) throw Error("logit fit needs both classes present");

    // Reference coding: drop the first dummy of every categorical block.
    std::vector<std::size_t> active;
    bool dropped_any = false;
    for (const auto& [feature, cols] : design.feature_groups()) {
        if (cols.size() == 1 && design.provenance()[cols[0]].level == "numeric") {
            active.push_back(cols[0]);
        } else {
            dropped_any = true;
            for (std::size_t t = 1; t < cols.size(); ++t) active.push_back(cols[t]);
        }
    }
    std::sort(active.begin(), active.end());
    const std::size_t q = active.size();
    const std::size_t dim = q + 1;

    std::vector<double> beta(dim, 0.0); // slot 0 = intercept
    beta[0] = std::log(static_cast<double>(pos) / static_cast<double>(n - pos));

    auto eta_of = [&](const std::vector<double>& b) {
        std::vector<double> eta(n, b[0]);
        for (std::size_t jj = 0; jj < q; ++jj) {
            const double bj = b[jj + 1];
            if (bj == 0.0) continue;
            auto col = design.column(active[jj]);
            for (std::size_t r = 0; r < n; ++r) eta[r] += bj * col[r];
        }
        return eta;
    };
    auto nll_of = [&](const std::vector<double>& eta) {
        double nll = 0;
        for (std::size_t r = 0; r < n; ++r) nll += softplus(eta[r]) - (labels[r] == 1 ? eta[r] : 0.0);
        return nll;
    };

    std::vector<double> eta = eta_of(beta);
    double nll = nll_of(eta);
    int iterations = 0;
    bool converged = false;

    std::vector<double> hess(dim * dim);
    std::vector<double> step(dim);
    std::vector<double> w(n), resid(n);
    for (int iter = 0; iter < 100; ++iter) {
        iterations = iter + 1;
        for (std::size_t r = 0; r < n; ++r) {
            double p = sigmoid(eta[r]);
            w[r] = std::max(p * (1.0 - p), kWeightFloor);
            resid[r] = static_cast<double>(labels[r]) - p;
        }
        std::fill(hess.begin(), hess.end(), 0.0);
        std::fill(step.begin(), step.end(), 0.0);
        // normal equations over [1, X_active]
        for (std::size_t r = 0; r < n; ++r) {
            hess[0] += w[r];
            step[0] += resid[r];
        }
        for (std::size_t jj = 0; jj < q; ++jj) {
            auto colj = design.column(active[jj]);
            double hj0 = 0, gj = 0;
            for (std::size_t r = 0; r < n; ++r) {
                hj0 += w[r] * colj[r];
                gj += resid[r] * colj[r];
            }
            hess[(jj + 1) * dim] = hj0;
            hess[jj + 1] = hj0;
            step[jj + 1] = gj;
            for (std::size_t kk = 0; kk <= jj; ++kk) {
                auto colk = design.column(active[kk]);
                double h = 0;
                for (std::size_t r = 0; r < n; ++r) h += w[r] * colj[r] * colk[r];
                hess[(jj + 1) * dim + (kk + 1)] = h;
                hess[(kk + 1) * dim + (jj + 1)] = h;
            }
        }
        // jitter keeps the solve alive under near-collinearity; flagged below
        double ridge = 0.0;
        std::vector<double> chol;
        for (int attempt = 0; attempt < 6; ++attempt) {
            chol = hess;
            if (ridge > 0) {
                for (std::size_t i = 0; i < dim; ++i) chol[i * dim + i] += ridge;
            }
            std::vector<double> rhs = step;
            if (cholesky_solve(chol, rhs, dim)) {
                step = rhs;
                break;
            }
            ridge = ridge == 0.0 ? 1e-8 : ridge * 100.0;
            if (attempt == 5) throw Error("logit fit: normal equations are singular");
        }

        double t = 1.0;
        std::vector<double> candidate(dim);
        double new_nll = nll;
        std::vector<double> new_eta;
        for (int half = 0; half < 40; ++half) {
            for (std::size_t i = 0; i < dim; ++i) candidate[i] = beta[i] + t * step[i];
            new_eta = eta_of(candidate);
            new_nll = nll_of(new_eta);
            if (new_nll <= nll + 1e-14) break;
            t /= 2.0;
        }
        beta = candidate;
        eta = std::move(new_eta);
        double drop = nll - new_nll;
        nll = new_nll;
        if (std::abs(drop) < 1e-10 * (std::abs(nll) + 1.0)) {
            converged = true;
            break;
        }
    }

    LinearFit fit;
    fit.provenance = design.provenance();
    fit.coefficients.assign(design.n_cols(), 0.0);
    fit.intercept = beta[0];
    for (std::size_t jj = 0; jj < q; ++jj) fit.coefficients[active[jj]] = beta[jj + 1];
    fit.coding = dropped_any ? Coding::reference : Coding::full_one_hot;
    fit.penalized = false;
    fit.standardized_covariates = design.standardization().has_value();
    fit.standardization = design.standardization();
    fit.iterations = iterations;
    fit.final_objective = nll;
    fit.converged = converged;
    auto grad = logit_gradient(design, labels, fit.intercept, fit.coefficients);
    double gnorm = 0;
    gnorm += grad[0] * grad[0];
    for (std::size_t jj = 0; jj < q; ++jj) gnorm += grad[active[jj] + 1] * grad[active[jj] + 1];
    fit.gradient_norm = std::sqrt(gnorm);
    // Perfect separation drives the likelihood to zero while coefficients
    // diverge; surface it instead of returning a silently absurd fit.
    double max_beta = 0;
    for (std::size_t i = 1; i < dim; ++i) max_beta = std::max(max_beta, std::abs(beta[i]));
    fit.separation_flag = nll < 1e-6 * static_cast<double>(n) || max_beta > 1e3;
    fit.raw_intercept = fit.intercept;
    fit.raw_coefficients = fit.coefficients;
    return fit;
}

double penalty_value(std::span<const double> beta, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
    double l1 = 0, l2 = 0;
    for (double b : beta) {
        l1 += std::abs(b);
        l2 += b * b;
    }
    return alpha * l1 + (1.0 - alpha) * 0.5 * l2;
}

LinearFit fit_elastic_net(const DesignMatrix& design, std::span<const std::int8_t> labels, double lambda,
                          double alpha) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
    if (!design.standardization()) {
        throw Error("elastic net requires a standardized design matrix");
    }
    const std::size_t n = design.n_rows();
    const std::size_t q = design.n_cols();
    if (labels.size() != n) throw Error("label count does not match design rows");
    const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::int8_t{1}));
    if (pos == 0 || pos == n) throw Error("elastic net fit needs both classes present");

    const double l1 = lambda * alpha;
    const double l2 = lambda * (1.0 - alpha);

    std::vector<double> beta(q, 0.0);
    double intercept = std::log(static_cast<double>(pos) / static_cast<double>(n - pos));
    std::vector<double> eta(n, intercept);

    auto objective = [&](const std::vector<double>& b, const std::vector<double>& e) {
        double nll = 0;
        for (std::size_t r = 0; r < n; ++r) nll += softplus(e[r]) - (labels[r] == 1 ? e[r] : 0.0);
        return nll + lambda * penalty_value(b, alpha);
    };
    auto recompute_eta = [&](double b0, const std::vector<double>& b) {
        std::vector<double> e(n, b0);
        for (std::size_t j = 0; j < q; ++j) {
            if (b[j] == 0.0) continue;
            auto col = design.column(j);
            for (std::size_t r = 0; r < n; ++r) e[r] += b[j] * col[r];
        }
        return e;
    };
    // max KKT violation over intercept and coefficients at the exact nll
    auto kkt_residual = [&](double b0, const std::vector<double>& b) {
        auto grad = logit_gradient(design, labels, b0, b);
        double worst = std::abs(grad[0]);
        for (std::size_t j = 0; j < q; ++j) {
            double g = grad[j + 1];
            if (b[j] == 0.0) {
                worst = std::max(worst, std::max(0.0, std::abs(g) - l1));
            } else {
                worst = std::max(worst, std::abs(g + l1 * (b[j] > 0 ? 1.0 : -1.0) + l2 * b[j]));
            }
        }
        return worst;
    };

    double obj = objective(beta, eta);
    std::vector<double> trace{obj};
    std::vector<double> w(n);
    bool converged = false;
    int outer_used = 0;

    // pinned coordinates: standardized-constant columns stay at 0
    const auto& constant = design.standardization()->constant;

    // covariance form of the quadratic subproblem: with dim = q + 1 (slot 0 is
    // the unpenalized intercept), each coordinate update costs O(dim) instead
    // of O(n), which keeps cyclic descent cheap even when one-hot blocks are
    // nearly collinear with the intercept and many sweeps are needed
    const std::size_t dim = q + 1;
    std::vector<double> a(dim * dim), b(dim);

    constexpr int kMaxOuter = 400;
    for (int outer = 0; outer < kMaxOuter; ++outer) {
        outer_used = outer + 1;
        // quadratic model at the current eta: A = X'WX, b = X'W z
        std::vector<double> wz(n); // w * z with z = eta + (y - p)/w
        for (std::size_t r = 0; r < n; ++r) {
            double p = sigmoid(eta[r]);
            w[r] = std::max(p * (1.0 - p), kWeightFloor);
            wz[r] = w[r] * eta[r] + (static_cast<double>(labels[r]) - p);
        }
        std::fill(a.begin(), a.end(), 0.0);
        std::fill(b.begin(), b.end(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            a[0] += w[r];
            b[0] += wz[r];
        }
        for (std::size_t j = 0; j < q; ++j) {
            auto colj = design.column(j);
            double aj0 = 0, bj = 0;
            for (std::size_t r = 0; r < n; ++r) {
                aj0 += w[r] * colj[r];
                bj += wz[r] * colj[r];
            }
            a[(j + 1) * dim] = aj0;
            a[j + 1] = aj0;
            b[j + 1] = bj;
            for (std::size_t k = 0; k <= j; ++k) {
                auto colk = design.column(k);
                double ajk = 0;
                for (std::size_t r = 0; r < n; ++r) ajk += w[r] * colj[r] * colk[r];
                a[(j + 1) * dim + (k + 1)] = ajk;
                a[(k + 1) * dim + (j + 1)] = ajk;
            }
        }

        std::vector<double> beta_new = beta;
        double intercept_new = intercept;
        std::vector<double> s(dim, 0.0); // A * current candidate
        {
            std::vector<double> cand(dim);
            cand[0] = intercept_new;
            for (std::size_t j = 0; j < q; ++j) cand[j + 1] = beta_new[j];
            for (std::size_t i = 0; i < dim; ++i) {
                double acc = 0;
                for (std::size_t k = 0; k < dim; ++k) acc += a[i * dim + k] * cand[k];
                s[i] = acc;
            }
        }
        for (int inner = 0; inner < 100000; ++inner) {
            double max_delta = 0;
            // intercept coordinate, unpenalized
            {
                double rho = b[0] - s[0] + a[0] * intercept_new;
                double updated = rho / a[0];
                double delta = updated - intercept_new;
                if (delta != 0.0) {
                    intercept_new = updated;
                    for (std::size_t i = 0; i < dim; ++i) s[i] += a[i * dim] * delta;
                    max_delta = std::max(max_delta, std::abs(delta));
                }
            }
            for (std::size_t j = 0; j < q; ++j) {
                if (constant[j]) continue;
                const std::size_t jj = j + 1;
                double ajj = a[jj * dim + jj];
                if (ajj <= 0.0) continue;
                double rho = b[jj] - s[jj] + ajj * beta_new[j];
                double updated = soft_threshold(rho, l1) / (ajj + l2);
                double delta = updated - beta_new[j];
                if (delta != 0.0) {
                    beta_new[j] = updated;
                    for (std::size_t i = 0; i < dim; ++i) s[i] += a[i * dim + jj] * delta;
                    max_delta = std::max(max_delta, std::abs(delta));
                }
            }
            if (max_delta < 1e-12) break;
        }

        // proximal-Newton step with backtracking on the true objective
        double t = 1.0;
        double obj_new = obj;
        std::vector<double> beta_try, eta_try;
        double intercept_try = intercept;
        for (int half = 0; half < 30; ++half) {
            beta_try = beta;
            for (std::size_t j = 0; j < q; ++j) beta_try[j] += t * (beta_new[j] - beta[j]);
            intercept_try = intercept + t * (intercept_new - intercept);
            eta_try = recompute_eta(intercept_try, beta_try);
            obj_new = objective(beta_try, eta_try);
            if (obj_new <= obj + 1e-13 * (std::abs(obj) + 1.0)) break;
            t /= 2.0;
        }
        double step_size = 0;
        for (std::size_t j = 0; j < q; ++j) step_size = std::max(step_size, std::abs(beta_try[j] - beta[j]));
        step_size = std::max(step_size, std::abs(intercept_try - intercept));
        beta = std::move(beta_try);
        intercept = intercept_try;
        eta = std::move(eta_try);
        obj = obj_new;
        trace.push_back(obj);

        if (kkt_residual(intercept, beta) < 5e-7) {
            converged = true;
            break;
        }
        if (step_size < 1e-14) {
            // quadratic model is stationary; accept if optimality nearly holds
            converged = kkt_residual(intercept, beta) < 1e-6;
            break;
        }
    }

    if (!converged) {
        std::string msg = "elastic net did not converge; objective trace:";
        std::size_t from = trace.size() > 8 ? trace.size() - 8 : 0;
        for (std::size_t i = from; i < trace.size(); ++i) msg += " " + std::to_string(trace[i]);
        throw Error(msg);
    }

    LinearFit fit;
    fit.provenance = design.provenance();
    fit.coefficients = beta;
    fit.intercept = intercept;
    fit.lambda = lambda;
    fit.alpha = alpha;
    fit.penalized = true;
    fit.coding = Coding::full_one_hot;
    fit.standardized_covariates = true;
    fit.standardization = design.standardization();
    fit.iterations = outer_used;
    fit.final_objective = obj;
    auto grad = logit_gradient(design, labels, intercept, beta);
    fit.gradient_norm = std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
    fit.converged = converged;

    // raw-scale view: beta_raw = beta / sd, intercept absorbs the means
    const auto& st = *design.standardization();
    fit.raw_coefficients.assign(q, 0.0);
    fit.raw_intercept = intercept;
    for (std::size_t j = 0; j < q; ++j) {
        if (st.constant[j]) continue;
        fit.raw_coefficients[j] = beta[j] / st.sd[j];
        fit.raw_intercept -= beta[j] * st.mean[j] / st.sd[j];
    }
    return fit;
}

} // namespace lapsekit
