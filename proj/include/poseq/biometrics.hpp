#pragma once

#include <optional>
#include <string>
#include <vector>

#include "poseq/pose.hpp"
#include "poseq/quality.hpp"

namespace poseq {

/// One reference-vs-probe comparison. Higher score means more similar.
struct ComparisonRecord {
    std::string reference_id;
    std::string probe_id;
    double score = 0.0;
    bool mated = false;
    std::optional<PoseAngles> reference_pose;
    std::optional<PoseAngles> probe_pose;
    std::optional<QualityScore> reference_quality;
    std::optional<QualityScore> probe_quality;
};

struct ScoreSet {
    std::vector<double> mated;
    std::vector<double> nonmated;
};

struct ErrorRates {
    double fnmr = 0.0;
    double fmr = 0.0;
};

/// A score >= threshold counts as a match. FNMR is the fraction of mated
/// scores strictly below the threshold; FMR the fraction of non-mated
/// scores at or above it.
ErrorRates error_rates_at(const ScoreSet& scores, double threshold);

/// Equal error rate: sweeps the distinct observed scores (plus a sentinel
/// above the maximum) as thresholds and linearly interpolates between the
/// two operating points bracketing the FNMR/FMR crossing. An exact tie is
/// returned as-is.
double eer(const ScoreSet& scores);

/// Smallest candidate threshold whose FMR is at or below the target.
double threshold_at_fmr(const ScoreSet& scores, double fmr_target);

/// FNMR at the threshold_at_fmr operating point.
double fnmr_at_fmr(const ScoreSet& scores, double fmr_target);

/// FMR at the largest candidate threshold whose FNMR is at or below the
/// target.
double fmr_at_fnmr(const ScoreSet& scores, double fnmr_target);

enum class Metric { Eer, FnmrAtFmr, FmrAtFnmr };

Metric parse_metric(const std::string& name);
std::string metric_name(Metric metric);

/// Per-cell metric values parallel to grid.cells; cells with no mated
/// records stay empty rather than defaulting to zero.
struct SurfaceGrid {
    PoseGrid grid;
    Metric metric = Metric::Eer;
    double target = 0.0;
    std::vector<std::optional<double>> values;
};

/// Groups mated records by exact probe (yaw, pitch) grid cell and computes
/// the metric per cell against the shared non-mated score set. Mated
/// records must carry a probe pose; records whose pose is not a grid cell
/// are an error.
SurfaceGrid surface_grid(const std::vector<ComparisonRecord>& records,
                         const std::vector<double>& nonmated, const PoseGrid& grid,
                         Metric metric, double target);

}  // namespace poseq
