#include "poseq/lasso.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace poseq {

namespace {

double soft_threshold(double a, double t) {
    if (a > t) return a - t;
    if (a < -t) return a + t;
    return 0.0;
}

void check_inputs(const DesignMatrix& design, const std::vector<double>& targets) {
    if (design.rows == 0 || design.cols == 0) {
        throw std::invalid_argument("fit: design matrix must have N >= 1 and T >= 1");
    }
    if (targets.size() != design.rows) {
        throw std::invalid_argument("fit: targets length " + std::to_string(targets.size()) +
                                    " does not match design rows " + std::to_string(design.rows));
    }
    for (double v : design.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite design entry");
    }
    for (double v : targets) {
        if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite target");
    }
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

LassoModel fit(const DesignMatrix& design, const std::vector<double>& targets,
               const FitOptions& options, const CovariateSpec& spec) {
    LassoModel model = fit(design, targets, options);
    model.spec = spec;
    return model;
}

LassoModel fit(const DesignMatrix& design, const std::vector<double>& targets,
               const FitOptions& options) {
    check_inputs(design, targets);
    if (options.lambda < 0.0 || !std::isfinite(options.lambda)) {
        throw std::invalid_argument("fit: lambda must be finite and >= 0");
    }
    if (options.max_sweeps < 1) {
        throw std::invalid_argument("fit: max_sweeps must be >= 1");
    }
    if (options.tolerance < 0.0) {
        throw std::invalid_argument("fit: tolerance must be >= 0");
    }

    const std::size_t n = design.rows;
    const std::size_t t = design.cols;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double lambda = options.halved_objective ? 2.0 * options.lambda : options.lambda;

    // The sweeps run on second-moment statistics instead of the raw rows:
    // gram = X'X/N, xs = X's/N. One coordinate update is then O(T), which
    // keeps the many sweeps needed by strongly correlated polynomial
    // columns affordable.
    std::vector<double> gram(t * t, 0.0);
    std::vector<double> xs(t, 0.0);
    std::vector<double> col_mean(t, 0.0);
    double target_mean = mean(targets);
    double targets_sq = 0.0;
    for (double v : targets) targets_sq += v * v;
    targets_sq *= inv_n;
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = &design.values[r * t];
        const double s = targets[r];
        for (std::size_t j = 0; j < t; ++j) {
            xs[j] += row[j] * s;
            col_mean[j] += row[j];
            for (std::size_t k = j; k < t; ++k) {
                gram[j * t + k] += row[j] * row[k];
            }
        }
    }
    for (std::size_t j = 0; j < t; ++j) {
        xs[j] *= inv_n;
        col_mean[j] *= inv_n;
        for (std::size_t k = j; k < t; ++k) {
            gram[j * t + k] *= inv_n;
            gram[k * t + j] = gram[j * t + k];
        }
    }

    // q_j = (1/N) sum x_kj^2 is the gram diagonal; zero-variance columns are
    // masked out and keep a zero coefficient.
    std::vector<bool> masked(t, false);
    for (std::size_t j = 0; j < t; ++j) {
        const double variance = gram[j * t + j] - col_mean[j] * col_mean[j];
        masked[j] = (variance <= 0.0);
    }

    std::vector<double> beta(t, 0.0);
    double intercept = options.fit_intercept ? target_mean : 0.0;

    auto objective = [&]() {
        // ||s - b - X beta||^2/N expanded in the precomputed moments.
        double bg = 0.0, bc = 0.0, bm = 0.0, l1 = 0.0;
        for (std::size_t j = 0; j < t; ++j) {
            double gj = 0.0;
            for (std::size_t k = 0; k < t; ++k) {
                gj += gram[j * t + k] * beta[k];
            }
            bg += beta[j] * gj;
            bc += beta[j] * xs[j];
            bm += beta[j] * col_mean[j];
            l1 += std::fabs(beta[j]);
        }
        const double sse = targets_sq - 2.0 * intercept * target_mean - 2.0 * bc +
                           intercept * intercept + 2.0 * intercept * bm + bg;
        return std::max(0.0, sse) + lambda * l1;
    };

    FitStats stats;
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (std::size_t j = 0; j < t; ++j) {
            if (masked[j]) continue;
            const double* row = &gram[j * t];
            double gj = 0.0;
            for (std::size_t k = 0; k < t; ++k) {
                gj += row[k] * beta[k];
            }
            // rho_j = (1/N) <x_j, residual> + q_j beta_j
            const double q = row[j];
            const double rho = xs[j] - intercept * col_mean[j] - gj + q * beta[j];
            const double updated = soft_threshold(rho, lambda / 2.0) / q;
            const double delta = updated - beta[j];
            if (delta != 0.0) {
                beta[j] = updated;
            }
            max_delta = std::max(max_delta, std::fabs(delta));
        }
        if (options.fit_intercept) {
            double bm = 0.0;
            for (std::size_t j = 0; j < t; ++j) {
                bm += col_mean[j] * beta[j];
            }
            intercept = target_mean - bm;
        }
        stats.iterations = sweep;
        stats.objective_history.push_back(objective());
        if (max_delta <= options.tolerance) {
            stats.converged = true;
            break;
        }
    }
    stats.final_objective = stats.objective_history.back();

    LassoModel model;
    model.term_names = design.term_names;
    model.coefficients = std::move(beta);
    model.intercept = intercept;
    model.lambda = lambda;
    model.fit_stats = std::move(stats);
    return model;
}

double predict(const LassoModel& model, const PoseAngles& pose) {
    const CovariateVector cov = covariate_vector(pose, model.spec);
    if (cov.values.size() != model.coefficients.size()) {
        throw std::invalid_argument("predict: model coefficients do not match its covariate spec");
    }
    double s = model.intercept;
    for (std::size_t j = 0; j < cov.values.size(); ++j) {
        s += model.coefficients[j] * cov.values[j];
    }
    return s;
}

double adjusted_r2(const LassoModel& model, const DesignMatrix& design,
                   const std::vector<double>& targets) {
    check_inputs(design, targets);
    if (design.cols != model.coefficients.size()) {
        throw std::invalid_argument("adjusted_r2: design width does not match model");
    }
    const std::size_t n = design.rows;
    const std::size_t t = design.cols;
    if (n <= t + 1) {
        throw std::invalid_argument("adjusted_r2: requires N > T + 1");
    }
    const double target_mean = mean(targets);
    double sst = 0.0, sse = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double pred = model.intercept;
        for (std::size_t c = 0; c < t; ++c) {
            pred += design.values[r * t + c] * model.coefficients[c];
        }
        const double err = targets[r] - pred;
        sse += err * err;
        const double dev = targets[r] - target_mean;
        sst += dev * dev;
    }
    if (sst == 0.0) {
        throw std::invalid_argument("adjusted_r2: targets have zero variance");
    }
    const double r2 = 1.0 - sse / sst;
    const double nn = static_cast<double>(n);
    const double tt = static_cast<double>(t);
    return 1.0 - (1.0 - r2) * (nn - 1.0) / (nn - tt - 1.0);
}

double kkt_residual(const LassoModel& model, const DesignMatrix& design,
                    const std::vector<double>& targets) {
    check_inputs(design, targets);
    if (design.cols != model.coefficients.size()) {
        throw std::invalid_argument("kkt_residual: design width does not match model");
    }
    const std::size_t n = design.rows;
    const std::size_t t = design.cols;
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<double> residual(n);
    for (std::size_t r = 0; r < n; ++r) {
        double pred = model.intercept;
        for (std::size_t c = 0; c < t; ++c) {
            pred += design.values[r * t + c] * model.coefficients[c];
        }
        residual[r] = targets[r] - pred;
    }

    double worst = 0.0;
    for (std::size_t c = 0; c < t; ++c) {
        double dot = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            dot += design.values[r * t + c] * residual[r];
        }
        const double g = 2.0 * inv_n * dot;
        double violation;
        if (model.coefficients[c] != 0.0) {
            const double sign = model.coefficients[c] > 0.0 ? 1.0 : -1.0;
            violation = std::fabs(g - model.lambda * sign);
        } else {
            violation = std::max(0.0, std::fabs(g) - model.lambda);
        }
        worst = std::max(worst, violation);
    }
    return worst;
}

}  // namespace poseq
