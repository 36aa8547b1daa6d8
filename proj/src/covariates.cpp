#include "poseq/covariates.hpp"

#include <cmath>
#include <stdexcept>

namespace poseq {

namespace {

void check_spec(const CovariateSpec& spec) {
    if (spec.degree < 1) {
        throw std::invalid_argument("CovariateSpec: degree must be >= 1");
    }
}

std::string power_name(const char* axis, int power) {
    return std::string(axis) + "^" + std::to_string(power);
}

}  // namespace

std::size_t covariate_count(const CovariateSpec& spec) {
    check_spec(spec);
    const std::size_t n = static_cast<std::size_t>(spec.degree);
    return 4 * n + 4 * (n - 1);
}

std::vector<std::string> term_names(const CovariateSpec& spec) {
    check_spec(spec);
    std::vector<std::string> names;
    names.reserve(covariate_count(spec));
    for (int i = 1; i <= spec.degree; ++i) {
        names.push_back(power_name("p+", i));
        names.push_back(power_name("p-", i));
        names.push_back(power_name("y+", i));
        names.push_back(power_name("y-", i));
    }
    // The i = 1 interaction block would be a constant (degree-0 x degree-0)
    // and is absorbed by the intercept.
    for (int i = 2; i <= spec.degree; ++i) {
        const int k = i - 1;
        names.push_back(power_name("p+", k) + "*" + power_name("y+", k));
        names.push_back(power_name("p+", k) + "*" + power_name("y-", k));
        names.push_back(power_name("p-", k) + "*" + power_name("y+", k));
        names.push_back(power_name("p-", k) + "*" + power_name("y-", k));
    }
    return names;
}

std::pair<double, double> split_signed(double angle_deg) {
    if (!std::isfinite(angle_deg)) {
        throw std::invalid_argument("split_signed: angle must be finite");
    }
    return {std::max(angle_deg, 0.0), std::min(angle_deg, 0.0)};
}

CovariateVector covariate_vector(const PoseAngles& pose, const CovariateSpec& spec) {
    check_spec(spec);
    if (!std::isfinite(pose.yaw_deg) || !std::isfinite(pose.pitch_deg)) {
        throw std::invalid_argument("covariate_vector: pose angles must be finite");
    }
    const auto [p_pos, p_neg] = split_signed(pose.pitch_deg);
    const auto [y_pos, y_neg] = split_signed(pose.yaw_deg);

    CovariateVector cov;
    cov.term_names = term_names(spec);
    cov.values.reserve(cov.term_names.size());

    double pp = 1.0, pn = 1.0, yp = 1.0, yn = 1.0;
    for (int i = 1; i <= spec.degree; ++i) {
        pp *= p_pos;
        pn *= p_neg;
        yp *= y_pos;
        yn *= y_neg;
        cov.values.push_back(pp);
        cov.values.push_back(pn);
        cov.values.push_back(yp);
        cov.values.push_back(yn);
    }
    for (int i = 2; i <= spec.degree; ++i) {
        const double a_pos = std::pow(p_pos, i - 1);
        const double a_neg = std::pow(p_neg, i - 1);
        const double b_pos = std::pow(y_pos, i - 1);
        const double b_neg = std::pow(y_neg, i - 1);
        cov.values.push_back(a_pos * b_pos);
        cov.values.push_back(a_pos * b_neg);
        cov.values.push_back(a_neg * b_pos);
        cov.values.push_back(a_neg * b_neg);
    }
    return cov;
}

DesignMatrix design_matrix(const std::vector<PoseAngles>& poses, const CovariateSpec& spec) {
    if (poses.empty()) {
        throw std::invalid_argument("design_matrix: pose list must be non-empty");
    }
    DesignMatrix m;
    m.term_names = term_names(spec);
    m.rows = poses.size();
    m.cols = m.term_names.size();
    m.values.reserve(m.rows * m.cols);
    for (const PoseAngles& pose : poses) {
        CovariateVector cov = covariate_vector(pose, spec);
        m.values.insert(m.values.end(), cov.values.begin(), cov.values.end());
    }
    return m;
}

}  // namespace poseq
