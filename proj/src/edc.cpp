#include "poseq/edc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace poseq {

EdcCurve edc_curve(const std::vector<ComparisonRecord>& records,
                   const std::vector<double>& nonmated, double fmr_target,
                   double max_discard) {
    if (!(max_discard > 0.0 && max_discard <= 1.0)) {
        throw std::invalid_argument("edc_curve: max_discard must lie in (0, 1]");
    }

    std::vector<double> scores;
    std::vector<int> qualities;
    scores.reserve(records.size());
    qualities.reserve(records.size());
    for (const ComparisonRecord& rec : records) {
        if (!rec.mated) continue;
        if (!rec.reference_quality || !rec.probe_quality) {
            throw std::invalid_argument("edc_curve: mated record " + rec.probe_id +
                                        " is missing a quality value");
        }
        scores.push_back(rec.score);
        qualities.push_back(std::min(rec.reference_quality->value, rec.probe_quality->value));
    }
    if (scores.empty()) {
        throw std::invalid_argument("edc_curve: no mated records");
    }
    if (nonmated.empty()) {
        throw std::invalid_argument("edc_curve: non-mated score set must be non-empty");
    }

    const ScoreSet full{scores, nonmated};
    const double threshold = threshold_at_fmr(full, fmr_target);

    // Stable ascending quality order; ties keep input order.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return qualities[a] < qualities[b]; });

    const double n = static_cast<double>(scores.size());
    std::size_t misses = 0;  // false non-matches among the retained suffix
    for (double s : scores) {
        if (s < threshold) ++misses;
    }

    EdcCurve curve;
    curve.threshold = threshold;
    curve.fmr_target = fmr_target;
    curve.max_discard = max_discard;
    curve.points.push_back({0.0, static_cast<double>(misses) / n});

    std::size_t discarded = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const int level = qualities[order[i]];
        std::size_t j = i;
        while (j < order.size() && qualities[order[j]] == level) {
            if (scores[order[j]] < threshold) --misses;
            ++j;
        }
        discarded += j - i;
        i = j;
        const double fraction = static_cast<double>(discarded) / n;
        if (fraction > max_discard || discarded == order.size()) {
            break;
        }
        const double remaining = n - static_cast<double>(discarded);
        curve.points.push_back({fraction, static_cast<double>(misses) / remaining});
    }
    if (curve.points.back().discard_fraction < max_discard) {
        curve.points.push_back({max_discard, curve.points.back().fnmr});
    }
    return curve;
}

double pauc(const EdcCurve& curve, double max_discard) {
    if (!(max_discard > 0.0)) {
        throw std::invalid_argument("pauc: max_discard must be positive");
    }
    if (max_discard > curve.max_discard) {
        throw std::invalid_argument("pauc: max_discard exceeds the curve domain");
    }
    if (curve.points.empty() || curve.points.front().discard_fraction != 0.0) {
        throw std::invalid_argument("pauc: curve must start at discard 0");
    }
    double area = 0.0;
    for (std::size_t k = 0; k < curve.points.size(); ++k) {
        const double start = curve.points[k].discard_fraction;
        if (start >= max_discard) break;
        const double end = (k + 1 < curve.points.size())
                               ? std::min(curve.points[k + 1].discard_fraction, max_discard)
                               : max_discard;
        area += curve.points[k].fnmr * (end - start);
    }
    return area;
}

}  // namespace poseq
