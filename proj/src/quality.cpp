#include "poseq/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "poseq/errors.hpp"

namespace poseq {

namespace {

constexpr double kPi = 3.14159265358979323846;

int round_half_away(double v) {
    return static_cast<int>(std::lround(v));
}

}  // namespace

QualityScore iso_component(double angle_deg) {
    if (!std::isfinite(angle_deg)) {
        throw std::invalid_argument("iso_component: angle must be finite");
    }
    const double clamped = std::min(std::fabs(angle_deg), 90.0);
    const double c = std::cos(clamped * kPi / 180.0);
    return QualityScore{round_half_away(100.0 * c * c)};
}

QualityScore iso_fused(const PoseAngles& pose) {
    return std::min(iso_component(pose.yaw_deg), iso_component(pose.pitch_deg));
}

Calibration calibrate(const LassoModel& model, const DesignMatrix& training_design,
                      const std::vector<PoseAngles>& training_poses) {
    if (training_poses.empty() || training_design.rows == 0) {
        throw std::invalid_argument("calibrate: training set must be non-empty");
    }
    if (training_design.rows != training_poses.size()) {
        throw std::invalid_argument("calibrate: design rows do not match pose count");
    }
    if (training_design.cols != model.coefficients.size()) {
        throw std::invalid_argument("calibrate: design width does not match model");
    }

    const double s_ceil = predict(model, PoseAngles{0.0, 0.0, std::nullopt});
    double s_floor = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < training_design.rows; ++r) {
        double pred = model.intercept;
        for (std::size_t c = 0; c < training_design.cols; ++c) {
            pred += training_design.at(r, c) * model.coefficients[c];
        }
        s_floor = std::min(s_floor, pred);
    }
    if (!(s_ceil > s_floor)) {
        throw CalibrationError("calibrate: degenerate model, frontal prediction does not "
                               "exceed the training minimum");
    }
    return Calibration{s_floor, s_ceil};
}

Calibration calibrate(const LassoModel& model, const std::vector<PoseAngles>& training_poses) {
    return calibrate(model, design_matrix(training_poses, model.spec), training_poses);
}

QualityScore syp_quality(const LassoModel& model, const Calibration& cal,
                         const PoseAngles& pose) {
    if (!(cal.s_ceil > cal.s_floor)) {
        throw CalibrationError("syp_quality: calibration has s_ceil <= s_floor");
    }
    const double s = predict(model, pose);
    const double scaled = 100.0 * (s - cal.s_floor) / (cal.s_ceil - cal.s_floor);
    return QualityScore{round_half_away(std::clamp(scaled, 0.0, 100.0))};
}

}  // namespace poseq
