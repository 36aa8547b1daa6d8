#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace poseq {

/// Head rotation in degrees. Yaw is rotation about the vertical axis,
/// pitch about the lateral axis. Roll is carried for ingestion only and
/// never participates in quality estimation.
struct PoseAngles {
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    std::optional<double> roll_deg;

    bool operator==(const PoseAngles&) const = default;
};

/// Throws std::invalid_argument if yaw/pitch (or roll, when present) are
/// non-finite or outside [-180, 180].
void validate_pose(const PoseAngles& pose);

/// Rectangular yaw-pitch experiment grid. Cells enumerate the Cartesian
/// product pitch x yaw in row-major order (pitch outer, yaw inner).
struct PoseGrid {
    std::vector<double> yaw_values;
    std::vector<double> pitch_values;
    std::vector<PoseAngles> cells;

    std::size_t size() const { return cells.size(); }
};

/// Builds the grid from the two axis value lists. Duplicates within each
/// list are dropped, first occurrence wins, input order is preserved.
PoseGrid make_grid(const std::vector<double>& yaw_values,
                   const std::vector<double>& pitch_values);

/// Shipped default: 12 evenly spaced yaw values over [-34, 45] and
/// 12 evenly spaced pitch values over [-21, 34], the signed range that
/// survives re-annotation of full nominal rotations.
PoseGrid default_grid();

/// One pose-estimator output for a sample generated at a nominal pose.
struct PoseEstimate {
    std::string sample_id;
    PoseAngles nominal;
    PoseAngles estimated;
};

/// Lookup from nominal (yaw, pitch) labels to the componentwise median of
/// the estimated angles observed at that label.
class ReannotationTable {
public:
    using Key = std::pair<double, double>;  // (yaw, pitch)

    ReannotationTable() = default;
    explicit ReannotationTable(std::map<Key, std::pair<double, double>> entries)
        : entries_(std::move(entries)) {}

    const std::map<Key, std::pair<double, double>>& entries() const { return entries_; }

    bool contains(const PoseAngles& nominal) const;

private:
    std::map<Key, std::pair<double, double>> entries_;
};

/// Groups estimates by exact nominal (yaw, pitch) and stores the median of
/// the estimated yaws and pitches per group. Even-count median is the mean
/// of the two middle values.
ReannotationTable build_reannotation_table(const std::vector<PoseEstimate>& estimates);

/// Exact-key lookup; roll passes through unchanged. Throws NotFoundError
/// naming the pose when the nominal key is absent.
PoseAngles reannotate(const ReannotationTable& table, const PoseAngles& nominal);

}  // namespace poseq
