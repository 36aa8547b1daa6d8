#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "poseq/pose.hpp"

namespace poseq {

/// Shape of the covariate expansion: powers 1..degree of the four signed
/// angle components, plus one block of four sign-split cross products per
/// power step above 1. The intercept is a separate unpenalized model field,
/// never a design column.
struct CovariateSpec {
    int degree = 2;
    bool include_intercept = true;

    bool operator==(const CovariateSpec&) const = default;
};

/// Number of covariates produced by a spec: 4n + 4(n-1).
std::size_t covariate_count(const CovariateSpec& spec);

/// Canonical term names for a spec, e.g. "p+^1", "y-^2", "p-^1*y+^1".
std::vector<std::string> term_names(const CovariateSpec& spec);

struct CovariateVector {
    std::vector<double> values;
    std::vector<std::string> term_names;
};

/// Splits a signed angle into (max(a,0), min(a,0)). Exactly one component
/// is nonzero unless the angle is 0.
std::pair<double, double> split_signed(double angle_deg);

/// Evaluates the covariate expansion at one pose, in the canonical term
/// order: all power terms for i = 1..n, then all interaction blocks for
/// i = 2..n. Angles enter in degrees.
CovariateVector covariate_vector(const PoseAngles& pose, const CovariateSpec& spec);

/// Row-major N x T design matrix with the term names shared by all rows.
struct DesignMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;  // row-major
    std::vector<std::string> term_names;

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Row k is covariate_vector(poses[k], spec).
DesignMatrix design_matrix(const std::vector<PoseAngles>& poses, const CovariateSpec& spec);

}  // namespace poseq
