#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "poseq/biometrics.hpp"
#include "poseq/pose.hpp"

namespace poseq {

/// Synthetic-dataset generator: mated scores follow a ground-truth linear
/// pose-degradation model plus Gaussian noise; non-mated scores are drawn
/// from an independent Gaussian. Both streams are deterministic per seed.
struct SimulatorConfig {
    PoseGrid grid;
    int n_identities = 1000;
    // Keys use the covariate term grammar; bare "p+" etc. are aliases for
    // the degree-1 terms "p+^1".
    std::map<std::string, double> truth_coefficients;
    double intercept = 1.0;
    double mated_noise_sd = 0.05;
    double nonmated_mean = 0.0;
    double nonmated_sd = 0.1;
    int n_nonmated = 1000;
    std::uint64_t seed = 42;
};

/// Degree-1 degradation coefficients measured for well-known face
/// recognition systems: arcface, magface, curricularface, adaface,
/// facevacs. Throws NotFoundError for other names.
std::map<std::string, double> reference_truth_coefficients(const std::string& system);

/// Default dataset: the shipped grid, arcface truth coefficients, and the
/// noise parameters above.
SimulatorConfig default_simulator_config();

/// One mated record per (identity, grid cell): frontal reference, probe at
/// the cell, score = intercept + truth model + noise.
std::vector<ComparisonRecord> simulate_mated(const SimulatorConfig& config);

/// n_nonmated draws from the non-mated score distribution. Independent of
/// the mated stream: both derive their own generator from the seed.
std::vector<double> simulate_nonmated(const SimulatorConfig& config);

/// Non-mated draws wrapped as frontal-vs-frontal records so a single score
/// file can hold the whole dataset.
std::vector<ComparisonRecord> simulate_nonmated_records(const SimulatorConfig& config);

}  // namespace poseq
