#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "poseq/errors.hpp"
#include "poseq/pose.hpp"

using namespace poseq;

TEST_CASE("make_grid singleton") {
    const PoseGrid grid = make_grid({0.0}, {0.0});
    REQUIRE(grid.size() == 1);
    CHECK(grid.cells[0] == PoseAngles{0.0, 0.0, std::nullopt});
}

TEST_CASE("make_grid 3x3 product, row-major with pitch outer") {
    const PoseGrid grid = make_grid({-20.0, 0.0, 20.0}, {-20.0, 0.0, 20.0});
    REQUIRE(grid.size() == 9);
    CHECK(grid.cells[0] == PoseAngles{-20.0, -20.0, std::nullopt});
    CHECK(grid.cells[1] == PoseAngles{0.0, -20.0, std::nullopt});
    CHECK(grid.cells[3] == PoseAngles{-20.0, 0.0, std::nullopt});
    CHECK(grid.cells[8] == PoseAngles{20.0, 20.0, std::nullopt});
}

TEST_CASE("default grid is 12x12 = 144 cells spanning the signed range") {
    const PoseGrid grid = default_grid();
    CHECK(grid.size() == 144);
    CHECK(grid.yaw_values.front() == -34.0);
    CHECK(grid.yaw_values.back() == 45.0);
    CHECK(grid.pitch_values.front() == -21.0);
    CHECK(grid.pitch_values.back() == 34.0);
}

TEST_CASE("make_grid rejects empty and non-finite input") {
    CHECK_THROWS_AS(make_grid({}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({0.0}, {}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({std::nan("")}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({0.0}, {200.0}), std::invalid_argument);
}

TEST_CASE("make_grid cell count is the product of deduplicated lengths") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> len(1, 8);
    std::uniform_int_distribution<int> angle(-90, 90);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> yaws, pitches;
        for (int i = 0; i < len(rng); ++i) yaws.push_back(angle(rng));
        for (int i = 0; i < len(rng); ++i) pitches.push_back(angle(rng));
        const PoseGrid grid = make_grid(yaws, pitches);
        std::vector<double> dy = yaws, dp = pitches;
        std::sort(dy.begin(), dy.end());
        dy.erase(std::unique(dy.begin(), dy.end()), dy.end());
        std::sort(dp.begin(), dp.end());
        dp.erase(std::unique(dp.begin(), dp.end()), dp.end());
        CHECK(grid.size() == dy.size() * dp.size());
    }
}

TEST_CASE("reannotation medians: odd, single, even") {
    std::vector<PoseEstimate> estimates;
    // Full nominal rotation maps to 45 degrees of achieved yaw.
    for (double y : {44.0, 45.0, 46.0}) {
        estimates.push_back({"s", PoseAngles{90.0, 0.0}, PoseAngles{y, 1.0}});
    }
    estimates.push_back({"t", PoseAngles{-90.0, 0.0}, PoseAngles{-34.0, 0.0}});
    estimates.push_back({"u", PoseAngles{50.0, 0.0}, PoseAngles{10.0, 0.0}});
    estimates.push_back({"v", PoseAngles{50.0, 0.0}, PoseAngles{20.0, 0.0}});

    const ReannotationTable table = build_reannotation_table(estimates);
    CHECK(reannotate(table, PoseAngles{90.0, 0.0}).yaw_deg == 45.0);
    CHECK(reannotate(table, PoseAngles{90.0, 0.0}).pitch_deg == 1.0);
    CHECK(reannotate(table, PoseAngles{-90.0, 0.0}).yaw_deg == -34.0);
    CHECK(reannotate(table, PoseAngles{50.0, 0.0}).yaw_deg == 15.0);  // mean of middle two
}

TEST_CASE("reannotate passes roll through and errors on missing keys") {
    const ReannotationTable table =
        build_reannotation_table({{"s", PoseAngles{0.0, 0.0}, PoseAngles{0.0, 0.0}}});
    const PoseAngles out = reannotate(table, PoseAngles{0.0, 0.0, 7.5});
    CHECK(out.yaw_deg == 0.0);
    CHECK(out.roll_deg == 7.5);
    CHECK_THROWS_AS(reannotate(table, PoseAngles{50.0, 0.0}), NotFoundError);
    CHECK_THROWS_WITH_AS(reannotate(table, PoseAngles{50.0, 0.0}),
                         doctest::Contains("yaw=50"), NotFoundError);
}

TEST_CASE("build_reannotation_table rejects empty input") {
    CHECK_THROWS_AS(build_reannotation_table({}), std::invalid_argument);
}

TEST_CASE("reannotation table is invariant under estimate reordering") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> angle(-45.0, 45.0);
    std::uniform_int_distribution<int> pick(0, 3);
    const std::vector<PoseAngles> nominals{{90.0, 0.0}, {0.0, 20.0}, {-40.0, -20.0}, {20.0, 80.0}};

    std::vector<PoseEstimate> estimates;
    for (int i = 0; i < 60; ++i) {
        estimates.push_back({"e" + std::to_string(i), nominals[pick(rng)],
                             PoseAngles{angle(rng), angle(rng)}});
    }
    const ReannotationTable reference = build_reannotation_table(estimates);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(estimates.begin(), estimates.end(), rng);
        CHECK(build_reannotation_table(estimates).entries() == reference.entries());
    }
}

TEST_CASE("odd-count medians are members of the estimate set") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> angle(-60.0, 60.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<PoseEstimate> estimates;
        std::vector<double> yaws;
        const int count = 2 * (trial % 5) + 1;
        for (int i = 0; i < count; ++i) {
            const double y = angle(rng);
            yaws.push_back(y);
            estimates.push_back({"s", PoseAngles{10.0, 10.0}, PoseAngles{y, angle(rng)}});
        }
        const ReannotationTable table = build_reannotation_table(estimates);
        const double median = reannotate(table, PoseAngles{10.0, 10.0}).yaw_deg;
        CHECK(std::count(yaws.begin(), yaws.end(), median) > 0);
    }
}
