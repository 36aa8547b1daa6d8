#pragma once

#include <vector>

#include "poseq/biometrics.hpp"

namespace poseq {

struct EdcPoint {
    double discard_fraction = 0.0;
    double fnmr = 0.0;
};

/// FNMR as a step function of the fraction of lowest-quality comparisons
/// discarded, at a decision threshold fixed once on the full set.
struct EdcCurve {
    std::vector<EdcPoint> points;  // discard fractions strictly increasing from 0
    double threshold = 0.0;
    double fmr_target = 0.0;
    double max_discard = 0.0;
};

/// Builds the curve from mated records carrying reference and probe
/// qualities. Pairwise quality is min(reference, probe). The threshold is
/// fixed on the full record set at the FMR target's operating point; one
/// point is emitted per distinct pairwise quality level fully discarded,
/// plus the endpoints at 0 and max_discard.
EdcCurve edc_curve(const std::vector<ComparisonRecord>& records,
                   const std::vector<double>& nonmated, double fmr_target,
                   double max_discard);

/// Area under the curve's right-continuous step interpolation on
/// [0, max_discard]. Raw (unnormalized) value.
double pauc(const EdcCurve& curve, double max_discard);

}  // namespace poseq
