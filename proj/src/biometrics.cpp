#include "poseq/biometrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace poseq {

namespace {

void check_scores(const ScoreSet& scores) {
    if (scores.mated.empty() || scores.nonmated.empty()) {
        throw std::invalid_argument("score set needs at least one mated and one non-mated score");
    }
    for (double s : scores.mated) {
        if (!std::isfinite(s)) throw std::invalid_argument("non-finite mated score");
    }
    for (double s : scores.nonmated) {
        if (!std::isfinite(s)) throw std::invalid_argument("non-finite non-mated score");
    }
}

void check_target(double target, const char* what) {
    if (!(target > 0.0 && target < 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie strictly between 0 and 1");
    }
}

struct SortedScores {
    std::vector<double> mated;
    std::vector<double> nonmated;

    explicit SortedScores(const ScoreSet& scores)
        : mated(scores.mated), nonmated(scores.nonmated) {
        std::sort(mated.begin(), mated.end());
        std::sort(nonmated.begin(), nonmated.end());
    }

    double fnmr(double threshold) const {
        const auto below = std::lower_bound(mated.begin(), mated.end(), threshold);
        return static_cast<double>(below - mated.begin()) / static_cast<double>(mated.size());
    }

    double fmr(double threshold) const {
        const auto below = std::lower_bound(nonmated.begin(), nonmated.end(), threshold);
        return static_cast<double>(nonmated.end() - below) /
               static_cast<double>(nonmated.size());
    }

    // Distinct observed scores plus a sentinel above the maximum, so the
    // (FNMR, FMR) sweep always reaches the (1, 0) endpoint.
    std::vector<double> candidate_thresholds() const {
        std::vector<double> all;
        all.reserve(mated.size() + nonmated.size() + 1);
        all.insert(all.end(), mated.begin(), mated.end());
        all.insert(all.end(), nonmated.begin(), nonmated.end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        all.push_back(std::nextafter(all.back(), std::numeric_limits<double>::infinity()));
        return all;
    }
};

}  // namespace

ErrorRates error_rates_at(const ScoreSet& scores, double threshold) {
    check_scores(scores);
    if (!std::isfinite(threshold)) {
        throw std::invalid_argument("error_rates_at: threshold must be finite");
    }
    const SortedScores sorted(scores);
    return ErrorRates{sorted.fnmr(threshold), sorted.fmr(threshold)};
}

double eer(const ScoreSet& scores) {
    check_scores(scores);
    const SortedScores sorted(scores);

    double prev_fnmr = 0.0, prev_fmr = 1.0, prev_diff = -1.0;
    bool have_prev = false;
    for (double t : sorted.candidate_thresholds()) {
        const double fnmr = sorted.fnmr(t);
        const double fmr = sorted.fmr(t);
        const double diff = fnmr - fmr;
        if (diff == 0.0) {
            return fnmr;
        }
        if (diff > 0.0) {
            if (!have_prev) {
                return fnmr;  // unreachable: the lowest threshold has FNMR 0, FMR 1
            }
            const double alpha = -prev_diff / (diff - prev_diff);
            return prev_fnmr + alpha * (fnmr - prev_fnmr);
        }
        prev_fnmr = fnmr;
        prev_fmr = fmr;
        prev_diff = diff;
        have_prev = true;
    }
    (void)prev_fmr;
    return prev_fnmr;  // unreachable: the sentinel threshold has FNMR 1, FMR 0
}

double threshold_at_fmr(const ScoreSet& scores, double fmr_target) {
    check_scores(scores);
    check_target(fmr_target, "fmr_target");
    const SortedScores sorted(scores);
    for (double t : sorted.candidate_thresholds()) {
        if (sorted.fmr(t) <= fmr_target) {
            return t;
        }
    }
    throw std::logic_error("threshold_at_fmr: sentinel threshold must satisfy the target");
}

double fnmr_at_fmr(const ScoreSet& scores, double fmr_target) {
    const double t = threshold_at_fmr(scores, fmr_target);
    return SortedScores(scores).fnmr(t);
}

double fmr_at_fnmr(const ScoreSet& scores, double fnmr_target) {
    check_scores(scores);
    check_target(fnmr_target, "fnmr_target");
    const SortedScores sorted(scores);
    double best = std::numeric_limits<double>::quiet_NaN();
    for (double t : sorted.candidate_thresholds()) {
        if (sorted.fnmr(t) <= fnmr_target) {
            best = t;  // keep the largest qualifying threshold
        }
    }
    if (std::isnan(best)) {
        throw std::logic_error("fmr_at_fnmr: lowest threshold must satisfy the target");
    }
    return sorted.fmr(best);
}

Metric parse_metric(const std::string& name) {
    if (name == "eer") return Metric::Eer;
    if (name == "fnmr@fmr") return Metric::FnmrAtFmr;
    if (name == "fmr@fnmr") return Metric::FmrAtFnmr;
    throw std::invalid_argument("unknown metric: " + name);
}

std::string metric_name(Metric metric) {
    switch (metric) {
        case Metric::Eer: return "eer";
        case Metric::FnmrAtFmr: return "fnmr@fmr";
        case Metric::FmrAtFnmr: return "fmr@fnmr";
    }
    throw std::logic_error("metric_name: unhandled metric");
}

SurfaceGrid surface_grid(const std::vector<ComparisonRecord>& records,
                         const std::vector<double>& nonmated, const PoseGrid& grid,
                         Metric metric, double target) {
    if (nonmated.empty()) {
        throw std::invalid_argument("surface_grid: non-mated score set must be non-empty");
    }
    std::map<std::pair<double, double>, std::size_t> cell_index;
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        cell_index[{grid.cells[i].yaw_deg, grid.cells[i].pitch_deg}] = i;
    }

    std::vector<std::vector<double>> per_cell(grid.cells.size());
    for (const ComparisonRecord& rec : records) {
        if (!rec.mated) continue;
        if (!rec.probe_pose) {
            throw std::invalid_argument("surface_grid: mated record " + rec.probe_id +
                                        " has no probe pose");
        }
        const auto it = cell_index.find({rec.probe_pose->yaw_deg, rec.probe_pose->pitch_deg});
        if (it == cell_index.end()) {
            throw std::invalid_argument("surface_grid: probe pose of record " + rec.probe_id +
                                        " is not a grid cell");
        }
        per_cell[it->second].push_back(rec.score);
    }

    SurfaceGrid out;
    out.grid = grid;
    out.metric = metric;
    out.target = target;
    out.values.resize(grid.cells.size());
    for (std::size_t i = 0; i < per_cell.size(); ++i) {
        if (per_cell[i].empty()) {
            continue;  // missing cell, reported as an empty value
        }
        const ScoreSet cell_scores{per_cell[i], nonmated};
        switch (metric) {
            case Metric::Eer: out.values[i] = eer(cell_scores); break;
            case Metric::FnmrAtFmr: out.values[i] = fnmr_at_fmr(cell_scores, target); break;
            case Metric::FmrAtFnmr: out.values[i] = fmr_at_fnmr(cell_scores, target); break;
        }
    }
    return out;
}

}  // namespace poseq
