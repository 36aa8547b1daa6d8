#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "poseq/covariates.hpp"
#include "poseq/pose.hpp"

namespace poseq {

struct FitOptions {
    double lambda = 1e-6;
    int max_sweeps = 10000;
    double tolerance = 1e-10;  // max absolute coefficient change per sweep
    bool fit_intercept = true;
    // Interpret lambda under the halved objective (1/(2N))||r||^2 + lambda*||b||_1
    // used by some solvers; equivalent to doubling lambda under the native
    // (1/N) objective.
    bool halved_objective = false;
};

struct FitStats {
    int iterations = 0;
    double final_objective = 0.0;
    bool converged = false;
    // Objective after each completed sweep; non-increasing by construction.
    std::vector<double> objective_history;
};

/// Sparse linear pose-utility model: predicted similarity is
/// intercept + <coefficients, covariates(pose)>.
struct LassoModel {
    CovariateSpec spec;
    std::vector<std::string> term_names;
    std::vector<double> coefficients;
    double intercept = 0.0;
    double lambda = 0.0;
    FitStats fit_stats;
};

/// Minimizes (1/N)||s - X b - intercept||_2^2 + lambda*||b||_1 by cyclic
/// coordinate descent with soft thresholding at level lambda/2. The
/// intercept is unpenalized and handled by residual re-centering after each
/// sweep. Zero-variance columns get a zero coefficient. Non-convergence
/// within max_sweeps is reported through fit_stats, not an error.
LassoModel fit(const DesignMatrix& design, const std::vector<double>& targets,
               const FitOptions& options);

/// As fit(), but stamps the model with the covariate spec that produced the
/// design so predictions on raw poses work.
LassoModel fit(const DesignMatrix& design, const std::vector<double>& targets,
               const FitOptions& options, const CovariateSpec& spec);

double predict(const LassoModel& model, const PoseAngles& pose);

/// 1 - (1 - R^2)(N - 1)/(N - T - 1); requires N > T + 1 and nonzero target
/// variance.
double adjusted_r2(const LassoModel& model, const DesignMatrix& design,
                   const std::vector<double>& targets);

/// Maximum violation of the subgradient stationarity conditions of the
/// (1/N) objective at the model's coefficients. Zero (up to numerical
/// noise) certifies optimality.
double kkt_residual(const LassoModel& model, const DesignMatrix& design,
                    const std::vector<double>& targets);

}  // namespace poseq
