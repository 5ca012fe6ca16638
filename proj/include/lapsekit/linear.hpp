#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lapsekit/dataset.hpp"

namespace lapsekit {

enum class Coding { reference, full_one_hot };

/// Fitted logistic model over a design matrix. For penalized fits the
/// coefficients correspond to standardized covariates; raw-scale equivalents
/// are kept alongside for interpretation.
struct LinearFit {
    double intercept = 0.0;
    std::vector<double> coefficients; // one per design column (dropped columns hold 0)
    std::vector<ColumnProvenance> provenance;

    double lambda = 0.0;
    double alpha = 0.0;
    bool penalized = false;
    Coding coding = Coding::reference;
    bool standardized_covariates = false;
    std::optional<Standardization> standardization; // transform to replay on new data

    int iterations = 0;
    double final_objective = 0.0;
    double gradient_norm = 0.0;
    bool converged = false;
    bool separation_flag = false; // perfectly separable data, coefficients unbounded

    // raw-scale view of a standardized fit
    double raw_intercept = 0.0;
    std::vector<double> raw_coefficients;
};

/// Overflow-safe logistic probabilities, clamped into (0,1).
std::vector<double> predict_proba(const LinearFit& fit, const DesignMatrix& design);

double sigmoid(double eta);

/// Negative Bernoulli log-likelihood (sum over rows) at the given parameters.
double logit_nll(const DesignMatrix& design, std::span<const std::int8_t> labels, double intercept,
                 std::span<const double> beta);

/// Gradient of the negative log-likelihood; slot 0 is the intercept, then one
/// entry per design column.
std::vector<double> logit_gradient(const DesignMatrix& design, std::span<const std::int8_t> labels,
                                   double intercept, std::span<const double> beta);

/// Unpenalized maximum-likelihood logit via Newton/IRLS with step halving.
/// Categorical blocks are reduced to reference coding internally (first level
/// dropped, its coefficient reported as 0) to keep the likelihood regular.
LinearFit fit_logit(const DesignMatrix& design, std::span<const std::int8_t> labels);

/// alpha * ||beta||_1 + (1 - alpha)/2 * ||beta||_2^2, intercept excluded.
double penalty_value(std::span<const double> beta, double alpha);

/// Elastic-net penalized logit on a standardized full one-hot design:
/// minimizes nll(beta) + lambda * penalty(beta). Cyclic coordinate descent on
/// the local quadratic approximation with soft thresholding; the returned fit
/// satisfies the subgradient optimality conditions within 1e-6.
LinearFit fit_elastic_net(const DesignMatrix& design, std::span<const std::int8_t> labels, double lambda,
                          double alpha);

} // namespace lapsekit
