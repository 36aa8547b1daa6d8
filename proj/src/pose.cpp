#include "poseq/pose.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "poseq/errors.hpp"

namespace poseq {

namespace {

void check_angle(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
    if (value < -180.0 || value > 180.0) {
        throw std::invalid_argument(std::string(name) + " out of [-180, 180]: " +
                                    std::to_string(value));
    }
}

std::vector<double> dedup_keep_order(const std::vector<double>& values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        if (std::find(out.begin(), out.end(), v) == out.end()) {
            out.push_back(v);
        }
    }
    return out;
}

double median_inplace(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = lo + static_cast<double>(k) * (hi - lo) / static_cast<double>(n - 1);
    }
    return out;
}

}  // namespace

void validate_pose(const PoseAngles& pose) {
    check_angle(pose.yaw_deg, "yaw_deg");
    check_angle(pose.pitch_deg, "pitch_deg");
    if (pose.roll_deg) {
        check_angle(*pose.roll_deg, "roll_deg");
    }
}

PoseGrid make_grid(const std::vector<double>& yaw_values,
                   const std::vector<double>& pitch_values) {
    if (yaw_values.empty() || pitch_values.empty()) {
        throw std::invalid_argument("make_grid: axis value lists must be non-empty");
    }
    for (double v : yaw_values) check_angle(v, "yaw value");
    for (double v : pitch_values) check_angle(v, "pitch value");

    PoseGrid grid;
    grid.yaw_values = dedup_keep_order(yaw_values);
    grid.pitch_values = dedup_keep_order(pitch_values);
    grid.cells.reserve(grid.yaw_values.size() * grid.pitch_values.size());
    for (double pitch : grid.pitch_values) {
        for (double yaw : grid.yaw_values) {
            grid.cells.push_back(PoseAngles{yaw, pitch, std::nullopt});
        }
    }
    return grid;
}

PoseGrid default_grid() {
    return make_grid(linspace(-34.0, 45.0, 12), linspace(-21.0, 34.0, 12));
}

bool ReannotationTable::contains(const PoseAngles& nominal) const {
    return entries_.count({nominal.yaw_deg, nominal.pitch_deg}) > 0;
}

ReannotationTable build_reannotation_table(const std::vector<PoseEstimate>& estimates) {
    if (estimates.empty()) {
        throw std::invalid_argument("build_reannotation_table: no estimates given");
    }
    std::map<ReannotationTable::Key, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const PoseEstimate& e : estimates) {
        validate_pose(e.nominal);
        if (!std::isfinite(e.estimated.yaw_deg) || !std::isfinite(e.estimated.pitch_deg)) {
            throw std::invalid_argument("build_reannotation_table: non-finite estimate for sample " +
                                        e.sample_id);
        }
        auto& [yaws, pitches] = groups[{e.nominal.yaw_deg, e.nominal.pitch_deg}];
        yaws.push_back(e.estimated.yaw_deg);
        pitches.push_back(e.estimated.pitch_deg);
    }

    std::map<ReannotationTable::Key, std::pair<double, double>> entries;
    for (auto& [key, group] : groups) {
        entries[key] = {median_inplace(group.first), median_inplace(group.second)};
    }
    return ReannotationTable(std::move(entries));
}

PoseAngles reannotate(const ReannotationTable& table, const PoseAngles& nominal) {
    auto it = table.entries().find({nominal.yaw_deg, nominal.pitch_deg});
    if (it == table.entries().end()) {
        std::ostringstream msg;
        msg << "reannotate: nominal pose (yaw=" << nominal.yaw_deg
            << ", pitch=" << nominal.pitch_deg << ") not in table";
        throw NotFoundError(msg.str());
    }
    return PoseAngles{it->second.first, it->second.second, nominal.roll_deg};
}

}  // namespace poseq
