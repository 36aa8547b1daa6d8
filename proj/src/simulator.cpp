#include "poseq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "poseq/covariates.hpp"
#include "poseq/errors.hpp"

namespace poseq {

namespace {

// Marsaglia polar sampler on top of mt19937_64. Unlike
// std::normal_distribution, the draw sequence is pinned by this code and
// stays identical across standard library implementations.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{seed, stream};
        engine_.seed(seq);
    }

    double next(double mean, double sd) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + sd * spare_;
        }
        double u, v, r2;
        do {
            u = uniform_pm1();
            v = uniform_pm1();
            r2 = u * u + v * v;
        } while (r2 >= 1.0 || r2 == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = v * scale;
        has_spare_ = true;
        return mean + sd * (u * scale);
    }

private:
    double uniform_pm1() {
        // 53-bit mantissa draw in [0, 1), mapped to (-1, 1).
        const std::uint64_t bits = engine_() >> 11;
        const double unit = static_cast<double>(bits) * (1.0 / 9007199254740992.0);
        return 2.0 * unit - 1.0;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::string normalize_term(const std::string& name) {
    if (name == "p+" || name == "p-" || name == "y+" || name == "y-") {
        return name + "^1";
    }
    return name;
}

int term_degree(const std::string& term) {
    // Sum of the exponents after each '^'.
    int degree = 0;
    for (std::size_t i = 0; i + 1 < term.size(); ++i) {
        if (term[i] == '^') {
            degree += std::stoi(term.substr(i + 1));
        }
    }
    return degree;
}

void check_config(const SimulatorConfig& config) {
    if (config.grid.cells.empty()) {
        throw std::invalid_argument("simulator: grid must be non-empty");
    }
    if (config.n_identities < 1) {
        throw std::invalid_argument("simulator: n_identities must be >= 1");
    }
    if (config.mated_noise_sd < 0.0) {
        throw std::invalid_argument("simulator: mated_noise_sd must be >= 0");
    }
    if (config.nonmated_sd <= 0.0) {
        throw std::invalid_argument("simulator: nonmated_sd must be > 0");
    }
    if (config.n_nonmated < 1) {
        throw std::invalid_argument("simulator: n_nonmated must be >= 1");
    }
    if (config.truth_coefficients.empty()) {
        throw std::invalid_argument("simulator: truth_coefficients must be non-empty");
    }
}

}  // namespace

std::map<std::string, double> reference_truth_coefficients(const std::string& system) {
    // Degree-1 sign-split coefficients (per degree of rotation) measured
    // against frontal references for each system.
    if (system == "arcface") {
        return {{"p-^1", 1.12e-02}, {"p+^1", -1.13e-02}, {"y-^1", 8.73e-03}, {"y+^1", -6.27e-03}};
    }
    if (system == "magface") {
        return {{"p-^1", 1.14e-02}, {"p+^1", -1.17e-02}, {"y-^1", 8.76e-03}, {"y+^1", -6.17e-03}};
    }
    if (system == "curricularface") {
        return {{"p-^1", 1.18e-02}, {"p+^1", -1.23e-02}, {"y-^1", 9.20e-03}, {"y+^1", -6.68e-03}};
    }
    if (system == "adaface") {
        return {{"p-^1", 1.23e-02}, {"p+^1", -1.26e-02}, {"y-^1", 1.02e-02}, {"y+^1", -7.06e-03}};
    }
    if (system == "facevacs") {
        return {{"p-^1", 8.83e-03}, {"p+^1", -1.07e-02}, {"y-^1", 6.67e-03}, {"y+^1", -4.70e-03}};
    }
    throw NotFoundError("reference_truth_coefficients: unknown system '" + system + "'");
}

SimulatorConfig default_simulator_config() {
    SimulatorConfig config;
    config.grid = default_grid();
    config.truth_coefficients = reference_truth_coefficients("arcface");
    return config;
}

std::vector<ComparisonRecord> simulate_mated(const SimulatorConfig& config) {
    check_config(config);

    int degree = 1;
    for (const auto& [name, coef] : config.truth_coefficients) {
        (void)coef;
        degree = std::max(degree, term_degree(normalize_term(name)));
    }
    const CovariateSpec spec{degree, true};
    const std::vector<std::string> names = term_names(spec);

    // Per-cell noise-free score, resolved once.
    std::vector<double> base(config.grid.cells.size());
    for (std::size_t c = 0; c < config.grid.cells.size(); ++c) {
        const CovariateVector cov = covariate_vector(config.grid.cells[c], spec);
        double s = config.intercept;
        for (const auto& [raw_name, coef] : config.truth_coefficients) {
            const std::string name = normalize_term(raw_name);
            const auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end()) {
                throw std::invalid_argument("simulator: unknown truth term '" + raw_name + "'");
            }
            s += coef * cov.values[static_cast<std::size_t>(it - names.begin())];
        }
        base[c] = s;
    }

    GaussianStream noise(config.seed, 0);
    std::vector<ComparisonRecord> records;
    records.reserve(static_cast<std::size_t>(config.n_identities) * config.grid.cells.size());
    const PoseAngles frontal{0.0, 0.0, std::nullopt};
    for (int id = 0; id < config.n_identities; ++id) {
        const std::string subject = "id" + std::to_string(id);
        for (std::size_t c = 0; c < config.grid.cells.size(); ++c) {
            ComparisonRecord rec;
            rec.reference_id = subject + "_ref";
            rec.probe_id = subject + "_cell" + std::to_string(c);
            rec.mated = true;
            rec.score = base[c] + (config.mated_noise_sd > 0.0
                                       ? noise.next(0.0, config.mated_noise_sd)
                                       : 0.0);
            rec.reference_pose = frontal;
            rec.probe_pose = config.grid.cells[c];
            records.push_back(std::move(rec));
        }
    }
    return records;
}

std::vector<double> simulate_nonmated(const SimulatorConfig& config) {
    check_config(config);
    GaussianStream noise(config.seed, 1);
    std::vector<double> scores(static_cast<std::size_t>(config.n_nonmated));
    for (double& s : scores) {
        s = noise.next(config.nonmated_mean, config.nonmated_sd);
    }
    return scores;
}

std::vector<ComparisonRecord> simulate_nonmated_records(const SimulatorConfig& config) {
    const std::vector<double> scores = simulate_nonmated(config);
    std::vector<ComparisonRecord> records;
    records.reserve(scores.size());
    const PoseAngles frontal{0.0, 0.0, std::nullopt};
    for (std::size_t k = 0; k < scores.size(); ++k) {
        ComparisonRecord rec;
        rec.reference_id = "nm" + std::to_string(k) + "_a";
        rec.probe_id = "nm" + std::to_string(k) + "_b";
        rec.mated = false;
        rec.score = scores[k];
        rec.reference_pose = frontal;
        rec.probe_pose = frontal;
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace poseq
