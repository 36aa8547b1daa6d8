#pragma once

#include <vector>

#include "poseq/covariates.hpp"
#include "poseq/lasso.hpp"
#include "poseq/pose.hpp"

namespace poseq {

/// Integer utility score in [0, 100]; 100 means no pose-induced loss.
struct QualityScore {
    int value = 0;

    bool operator==(const QualityScore&) const = default;
    auto operator<=>(const QualityScore&) const = default;
};

/// Affine map from predicted similarity onto the [0, 100] score range.
/// s_ceil anchors to 100 (frontal prediction), s_floor to 0 (worst
/// training-grid prediction).
struct Calibration {
    double s_floor = 0.0;
    double s_ceil = 1.0;
};

/// 100 * cos^2(angle), rounded half away from zero, with |angle| clamped to
/// 90 degrees so that views past profile never score above 0.
QualityScore iso_component(double angle_deg);

/// Minimum of the yaw and pitch component qualities.
QualityScore iso_fused(const PoseAngles& pose);

/// Anchors the calibration on the training set: ceiling at the frontal
/// prediction, floor at the minimum prediction over the training rows.
/// Throws CalibrationError when the model is degenerate (ceiling <= floor).
Calibration calibrate(const LassoModel& model, const DesignMatrix& training_design,
                      const std::vector<PoseAngles>& training_poses);

/// Convenience overload that builds the design from the poses.
Calibration calibrate(const LassoModel& model, const std::vector<PoseAngles>& training_poses);

/// Calibrated model quality: scale the prediction into [0, 100], clip, and
/// round half away from zero.
QualityScore syp_quality(const LassoModel& model, const Calibration& cal,
                         const PoseAngles& pose);

}  // namespace poseq
