#pragma once

#include <optional>
#include <string>
#include <vector>

#include "poseq/biometrics.hpp"
#include "poseq/edc.hpp"
#include "poseq/lasso.hpp"
#include "poseq/pose.hpp"
#include "poseq/quality.hpp"
#include "poseq/simulator.hpp"

namespace poseq {

/// Shortest decimal representation that parses back to the same double.
/// Used for every float written to CSV so outputs are byte-stable.
std::string format_double(double value);

struct SourceManifest {
    std::string path;
    std::size_t row_count = 0;
    std::string checksum;  // FNV-1a 64 of the file bytes, hex
};

struct Dataset {
    std::vector<ComparisonRecord> records;
    std::vector<double> nonmated_scores;  // scores of the mated = 0 records
    SourceManifest manifest;

    std::vector<ComparisonRecord> mated_records() const;
};

/// Parses the score CSV (header: reference_id,probe_id,mated,score plus the
/// optional ref_yaw,ref_pitch,probe_yaw,probe_pitch,ref_quality,
/// probe_quality columns, any order). Structural problems throw
/// FormatError; per-row violations are collected over the whole file and
/// thrown together as RowErrors.
Dataset load_scores(const std::string& path);

void save_scores(const std::string& path, const std::vector<ComparisonRecord>& records);

/// Pose list CSV: sample_id,yaw,pitch with an optional roll column.
struct PoseRow {
    std::string sample_id;
    PoseAngles pose;
};

std::vector<PoseRow> load_poses(const std::string& path);
void save_poses(const std::string& path, const std::vector<PoseRow>& rows);

/// Pose-estimate CSV: sample_id,nominal_yaw,nominal_pitch,est_yaw,est_pitch.
std::vector<PoseEstimate> load_estimates(const std::string& path);

void save_reannotation_table(const std::string& path, const ReannotationTable& table);
ReannotationTable load_reannotation_table(const std::string& path);

struct LoadedModel {
    LassoModel model;
    std::optional<Calibration> calibration;
};

void save_model(const std::string& path, const LassoModel& model,
                const std::optional<Calibration>& calibration);
LoadedModel load_model(const std::string& path);

SimulatorConfig load_simulator_config(const std::string& path);
void save_simulator_config(const std::string& path, const SimulatorConfig& config);

struct QualityRow {
    std::string sample_id;
    PoseAngles pose;
    QualityScore iso;
    QualityScore syp;
};

void write_quality_csv(const std::string& path, const std::vector<QualityRow>& rows);
void write_surface_csv(const std::string& path, const SurfaceGrid& surface);
void write_edc_csv(const std::string& path, const EdcCurve& curve);
/// JSON sidecar with the fixed threshold, FMR target, and the pAUC value
/// keyed as "pauc@<max_discard>".
void write_edc_sidecar(const std::string& path, const EdcCurve& curve, double pauc_value);

}  // namespace poseq
