#include "poseq/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "poseq/errors.hpp"

namespace poseq {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::string format_double_impl(double value) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    fields.push_back(current);
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

std::optional<double> parse_double(const std::string& field) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto result = std::from_chars(first, last, value);
    if (result.ec != std::errc{} || result.ptr != last || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<int> parse_int(const std::string& field) {
    int value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto result = std::from_chars(first, last, value);
    if (result.ec != std::errc{} || result.ptr != last) {
        return std::nullopt;
    }
    return value;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError(path + ": cannot open file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError(path + ": cannot open file for writing");
    }
    out << content;
    if (!out) {
        throw FormatError(path + ": write failed");
    }
}

// Maps header names to column indices, enforcing required/known columns.
class Header {
public:
    Header(const std::string& path, const std::string& line,
           const std::vector<std::string>& required, const std::vector<std::string>& optional) {
        const std::vector<std::string> names = split_csv_line(strip_cr(line));
        for (std::size_t i = 0; i < names.size(); ++i) {
            const std::string& name = names[i];
            const bool known =
                std::find(required.begin(), required.end(), name) != required.end() ||
                std::find(optional.begin(), optional.end(), name) != optional.end();
            if (!known) {
                throw FormatError(path + ": unknown column '" + name + "'");
            }
            if (index_.count(name)) {
                throw FormatError(path + ": duplicate column '" + name + "'");
            }
            index_[name] = i;
        }
        for (const std::string& name : required) {
            if (!index_.count(name)) {
                throw FormatError(path + ": missing required column '" + name + "'");
            }
        }
        width_ = names.size();
    }

    std::size_t width() const { return width_; }
    bool has(const std::string& name) const { return index_.count(name) > 0; }
    const std::string& field(const std::vector<std::string>& row, const std::string& name) const {
        return row[index_.at(name)];
    }

private:
    std::map<std::string, std::size_t> index_;
    std::size_t width_ = 0;
};

// Iterates data lines, collecting per-row failures; throws RowErrors at the
// end if any row was rejected.
template <typename Fn>
void for_each_row(const std::string& path, std::istream& in, const Header& header, Fn&& fn) {
    std::vector<RowError> errors;
    std::string line;
    std::size_t line_no = 1;  // header was line 1
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.width()) {
            errors.push_back({line_no, "expected " + std::to_string(header.width()) +
                                           " fields, got " + std::to_string(fields.size())});
            continue;
        }
        try {
            fn(fields, line_no);
        } catch (const std::exception& e) {
            errors.push_back({line_no, e.what()});
        }
    }
    if (!errors.empty()) {
        throw RowErrors(path, std::move(errors));
    }
}

double required_double(const Header& header, const std::vector<std::string>& row,
                       const std::string& name) {
    const std::string& field = header.field(row, name);
    const auto value = parse_double(field);
    if (!value) {
        throw std::runtime_error(name + ": not a finite number: '" + field + "'");
    }
    return *value;
}

std::optional<double> optional_double(const Header& header, const std::vector<std::string>& row,
                                      const std::string& name) {
    if (!header.has(name)) return std::nullopt;
    const std::string& field = header.field(row, name);
    if (field.empty()) return std::nullopt;
    const auto value = parse_double(field);
    if (!value) {
        throw std::runtime_error(name + ": not a finite number: '" + field + "'");
    }
    return value;
}

std::optional<QualityScore> optional_quality(const Header& header,
                                             const std::vector<std::string>& row,
                                             const std::string& name) {
    if (!header.has(name)) return std::nullopt;
    const std::string& field = header.field(row, name);
    if (field.empty()) return std::nullopt;
    const auto value = parse_int(field);
    if (!value || *value < 0 || *value > 100) {
        throw std::runtime_error(name + ": not an integer in [0, 100]: '" + field + "'");
    }
    return QualityScore{*value};
}

json grid_to_json(const PoseGrid& grid) {
    return json{{"yaw_values", grid.yaw_values}, {"pitch_values", grid.pitch_values}};
}

void require_field(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) {
        throw FormatError(path + ": missing field '" + key + "'");
    }
}

void check_format_version(const json& j, const std::string& path) {
    require_field(j, path, "format_version");
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion) {
        throw ModelVersionError(path + ": unsupported format_version " +
                                std::to_string(version));
    }
}

json parse_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace

std::string format_double(double value) {
    return format_double_impl(value);
}

std::vector<ComparisonRecord> Dataset::mated_records() const {
    std::vector<ComparisonRecord> out;
    for (const ComparisonRecord& rec : records) {
        if (rec.mated) out.push_back(rec);
    }
    return out;
}

Dataset load_scores(const std::string& path) {
    const std::string content = read_file(path);
    std::istringstream in(content);
    std::string header_line;
    if (!std::getline(in, header_line)) {
        throw FormatError(path + ": empty file, header required");
    }
    const Header header(path, header_line, {"reference_id", "probe_id", "mated", "score"},
                        {"ref_yaw", "ref_pitch", "probe_yaw", "probe_pitch", "ref_quality",
                         "probe_quality"});
    if (header.has("ref_yaw") != header.has("ref_pitch")) {
        throw FormatError(path + ": ref_yaw and ref_pitch must appear together");
    }
    if (header.has("probe_yaw") != header.has("probe_pitch")) {
        throw FormatError(path + ": probe_yaw and probe_pitch must appear together");
    }

    Dataset dataset;
    for_each_row(path, in, header, [&](const std::vector<std::string>& row, std::size_t) {
        ComparisonRecord rec;
        rec.reference_id = header.field(row, "reference_id");
        rec.probe_id = header.field(row, "probe_id");
        if (rec.reference_id.empty() || rec.probe_id.empty()) {
            throw std::runtime_error("reference_id/probe_id must be non-empty");
        }
        const std::string& mated_field = header.field(row, "mated");
        if (mated_field == "1") {
            rec.mated = true;
        } else if (mated_field == "0") {
            rec.mated = false;
        } else {
            throw std::runtime_error("mated: expected 0 or 1, got '" + mated_field + "'");
        }
        rec.score = required_double(header, row, "score");

        const auto ref_yaw = optional_double(header, row, "ref_yaw");
        const auto ref_pitch = optional_double(header, row, "ref_pitch");
        if (ref_yaw.has_value() != ref_pitch.has_value()) {
            throw std::runtime_error("ref_yaw and ref_pitch must be set together");
        }
        if (ref_yaw) {
            PoseAngles pose{*ref_yaw, *ref_pitch, std::nullopt};
            validate_pose(pose);
            rec.reference_pose = pose;
        }
        const auto probe_yaw = optional_double(header, row, "probe_yaw");
        const auto probe_pitch = optional_double(header, row, "probe_pitch");
        if (probe_yaw.has_value() != probe_pitch.has_value()) {
            throw std::runtime_error("probe_yaw and probe_pitch must be set together");
        }
        if (probe_yaw) {
            PoseAngles pose{*probe_yaw, *probe_pitch, std::nullopt};
            validate_pose(pose);
            rec.probe_pose = pose;
        }
        rec.reference_quality = optional_quality(header, row, "ref_quality");
        rec.probe_quality = optional_quality(header, row, "probe_quality");
        dataset.records.push_back(std::move(rec));
    });

    for (const ComparisonRecord& rec : dataset.records) {
        if (!rec.mated) dataset.nonmated_scores.push_back(rec.score);
    }
    char checksum[20];
    std::snprintf(checksum, sizeof(checksum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    dataset.manifest = {path, dataset.records.size(), checksum};
    return dataset;
}

void save_scores(const std::string& path, const std::vector<ComparisonRecord>& records) {
    const bool any_ref_pose = std::any_of(records.begin(), records.end(),
                                          [](const auto& r) { return r.reference_pose.has_value(); });
    const bool any_probe_pose = std::any_of(records.begin(), records.end(),
                                            [](const auto& r) { return r.probe_pose.has_value(); });
    const bool any_quality = std::any_of(records.begin(), records.end(), [](const auto& r) {
        return r.reference_quality.has_value() || r.probe_quality.has_value();
    });

    std::ostringstream out;
    out << "reference_id,probe_id,mated,score";
    if (any_ref_pose) out << ",ref_yaw,ref_pitch";
    if (any_probe_pose) out << ",probe_yaw,probe_pitch";
    if (any_quality) out << ",ref_quality,probe_quality";
    out << "\n";
    for (const ComparisonRecord& rec : records) {
        out << rec.reference_id << ',' << rec.probe_id << ',' << (rec.mated ? '1' : '0') << ','
            << format_double(rec.score);
        if (any_ref_pose) {
            out << ',';
            if (rec.reference_pose) {
                out << format_double(rec.reference_pose->yaw_deg) << ','
                    << format_double(rec.reference_pose->pitch_deg);
            } else {
                out << ',';
            }
        }
        if (any_probe_pose) {
            out << ',';
            if (rec.probe_pose) {
                out << format_double(rec.probe_pose->yaw_deg) << ','
                    << format_double(rec.probe_pose->pitch_deg);
            } else {
                out << ',';
            }
        }
        if (any_quality) {
            out << ',';
            if (rec.reference_quality) out << rec.reference_quality->value;
            out << ',';
            if (rec.probe_quality) out << rec.probe_quality->value;
        }
        out << "\n";
    }
    write_file(path, out.str());
}

std::vector<PoseRow> load_poses(const std::string& path) {
    const std::string content = read_file(path);
    std::istringstream in(content);
    std::string header_line;
    if (!std::getline(in, header_line)) {
        throw FormatError(path + ": empty file, header required");
    }
    const Header header(path, header_line, {"sample_id", "yaw", "pitch"}, {"roll"});

    std::vector<PoseRow> rows;
    for_each_row(path, in, header, [&](const std::vector<std::string>& row, std::size_t) {
        PoseRow pr;
        pr.sample_id = header.field(row, "sample_id");
        if (pr.sample_id.empty()) {
            throw std::runtime_error("sample_id must be non-empty");
        }
        pr.pose.yaw_deg = required_double(header, row, "yaw");
        pr.pose.pitch_deg = required_double(header, row, "pitch");
        pr.pose.roll_deg = optional_double(header, row, "roll");
        validate_pose(pr.pose);
        rows.push_back(std::move(pr));
    });
    return rows;
}

void save_poses(const std::string& path, const std::vector<PoseRow>& rows) {
    const bool any_roll = std::any_of(rows.begin(), rows.end(),
                                      [](const auto& r) { return r.pose.roll_deg.has_value(); });
    std::ostringstream out;
    out << "sample_id,yaw,pitch";
    if (any_roll) out << ",roll";
    out << "\n";
    for (const PoseRow& row : rows) {
        out << row.sample_id << ',' << format_double(row.pose.yaw_deg) << ','
            << format_double(row.pose.pitch_deg);
        if (any_roll) {
            out << ',';
            if (row.pose.roll_deg) out << format_double(*row.pose.roll_deg);
        }
        out << "\n";
    }
    write_file(path, out.str());
}

std::vector<PoseEstimate> load_estimates(const std::string& path) {
    const std::string content = read_file(path);
    std::istringstream in(content);
    std::string header_line;
    if (!std::getline(in, header_line)) {
        throw FormatError(path + ": empty file, header required");
    }
    const Header header(path, header_line,
                        {"sample_id", "nominal_yaw", "nominal_pitch", "est_yaw", "est_pitch"}, {});

    std::vector<PoseEstimate> estimates;
    for_each_row(path, in, header, [&](const std::vector<std::string>& row, std::size_t) {
        PoseEstimate e;
        e.sample_id = header.field(row, "sample_id");
        e.nominal.yaw_deg = required_double(header, row, "nominal_yaw");
        e.nominal.pitch_deg = required_double(header, row, "nominal_pitch");
        e.estimated.yaw_deg = required_double(header, row, "est_yaw");
        e.estimated.pitch_deg = required_double(header, row, "est_pitch");
        validate_pose(e.nominal);
        estimates.push_back(std::move(e));
    });
    return estimates;
}

void save_reannotation_table(const std::string& path, const ReannotationTable& table) {
    json entries = json::array();
    for (const auto& [nominal, adjusted] : table.entries()) {
        entries.push_back(json{{"nominal", {nominal.first, nominal.second}},
                               {"adjusted", {adjusted.first, adjusted.second}}});
    }
    const json j{{"format_version", kFormatVersion}, {"entries", entries}};
    write_file(path, j.dump(2) + "\n");
}

ReannotationTable load_reannotation_table(const std::string& path) {
    const json j = parse_json_file(path);
    check_format_version(j, path);
    require_field(j, path, "entries");

    std::map<ReannotationTable::Key, std::pair<double, double>> entries;
    for (const json& entry : j.at("entries")) {
        require_field(entry, path, "nominal");
        require_field(entry, path, "adjusted");
        const auto nominal = entry.at("nominal").get<std::vector<double>>();
        const auto adjusted = entry.at("adjusted").get<std::vector<double>>();
        if (nominal.size() != 2 || adjusted.size() != 2) {
            throw FormatError(path + ": entries must hold [yaw, pitch] pairs");
        }
        if (!std::isfinite(adjusted[0]) || !std::isfinite(adjusted[1])) {
            throw FormatError(path + ": non-finite adjusted pose");
        }
        const ReannotationTable::Key key{nominal[0], nominal[1]};
        if (entries.count(key)) {
            throw FormatError(path + ": duplicate nominal pose entry");
        }
        entries[key] = {adjusted[0], adjusted[1]};
    }
    return ReannotationTable(std::move(entries));
}

void save_model(const std::string& path, const LassoModel& model,
                const std::optional<Calibration>& calibration) {
    json terms = json::array();
    for (std::size_t j = 0; j < model.coefficients.size(); ++j) {
        terms.push_back(json{{"name", model.term_names[j]}, {"coef", model.coefficients[j]}});
    }
    json doc{{"format_version", kFormatVersion},
             {"spec", {{"degree", model.spec.degree},
                       {"include_intercept", model.spec.include_intercept}}},
             {"lambda", model.lambda},
             {"intercept", model.intercept},
             {"terms", terms},
             {"fit_stats", {{"iterations", model.fit_stats.iterations},
                            {"final_objective", model.fit_stats.final_objective},
                            {"converged", model.fit_stats.converged}}}};
    if (calibration) {
        doc["calibration"] = {{"s_floor", calibration->s_floor}, {"s_ceil", calibration->s_ceil}};
    }
    write_file(path, doc.dump(2) + "\n");
}

LoadedModel load_model(const std::string& path) {
    const json j = parse_json_file(path);
    check_format_version(j, path);
    for (const char* key : {"spec", "lambda", "intercept", "terms"}) {
        require_field(j, path, key);
    }
    const json& spec_json = j.at("spec");
    require_field(spec_json, path, "degree");

    LoadedModel loaded;
    LassoModel& model = loaded.model;
    model.spec.degree = spec_json.at("degree").get<int>();
    model.spec.include_intercept = spec_json.value("include_intercept", true);
    model.lambda = j.at("lambda").get<double>();
    model.intercept = j.at("intercept").get<double>();
    for (const json& term : j.at("terms")) {
        require_field(term, path, "name");
        require_field(term, path, "coef");
        model.term_names.push_back(term.at("name").get<std::string>());
        model.coefficients.push_back(term.at("coef").get<double>());
    }
    if (model.term_names != term_names(model.spec)) {
        throw FormatError(path + ": terms do not match the canonical order for degree " +
                          std::to_string(model.spec.degree));
    }
    if (j.contains("fit_stats")) {
        const json& stats = j.at("fit_stats");
        model.fit_stats.iterations = stats.value("iterations", 0);
        model.fit_stats.final_objective = stats.value("final_objective", 0.0);
        model.fit_stats.converged = stats.value("converged", false);
    }
    if (j.contains("calibration")) {
        const json& cal = j.at("calibration");
        require_field(cal, path, "s_floor");
        require_field(cal, path, "s_ceil");
        loaded.calibration = Calibration{cal.at("s_floor").get<double>(),
                                         cal.at("s_ceil").get<double>()};
        if (!(loaded.calibration->s_ceil > loaded.calibration->s_floor)) {
            throw FormatError(path + ": calibration must satisfy s_ceil > s_floor");
        }
    }
    return loaded;
}

SimulatorConfig load_simulator_config(const std::string& path) {
    const json j = parse_json_file(path);
    check_format_version(j, path);

    static const std::vector<std::string> known{
        "format_version", "grid", "n_identities", "truth_preset", "truth_coefficients",
        "intercept", "mated_noise_sd", "nonmated_mean", "nonmated_sd", "n_nonmated", "seed"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw FormatError(path + ": unknown field '" + key + "'");
        }
    }

    SimulatorConfig config = default_simulator_config();
    if (j.contains("grid")) {
        const json& grid = j.at("grid");
        require_field(grid, path, "yaw_values");
        require_field(grid, path, "pitch_values");
        config.grid = make_grid(grid.at("yaw_values").get<std::vector<double>>(),
                                grid.at("pitch_values").get<std::vector<double>>());
    }
    config.n_identities = j.value("n_identities", config.n_identities);
    if (j.contains("truth_preset") && j.contains("truth_coefficients")) {
        throw FormatError(path + ": truth_preset and truth_coefficients are mutually exclusive");
    }
    if (j.contains("truth_preset")) {
        config.truth_coefficients =
            reference_truth_coefficients(j.at("truth_preset").get<std::string>());
    } else if (j.contains("truth_coefficients")) {
        config.truth_coefficients =
            j.at("truth_coefficients").get<std::map<std::string, double>>();
    }
    config.intercept = j.value("intercept", config.intercept);
    config.mated_noise_sd = j.value("mated_noise_sd", config.mated_noise_sd);
    config.nonmated_mean = j.value("nonmated_mean", config.nonmated_mean);
    config.nonmated_sd = j.value("nonmated_sd", config.nonmated_sd);
    config.n_nonmated = j.value("n_nonmated", config.n_nonmated);
    config.seed = j.value("seed", config.seed);
    return config;
}

void save_simulator_config(const std::string& path, const SimulatorConfig& config) {
    const json j{{"format_version", kFormatVersion},
                 {"grid", grid_to_json(config.grid)},
                 {"n_identities", config.n_identities},
                 {"truth_coefficients", config.truth_coefficients},
                 {"intercept", config.intercept},
                 {"mated_noise_sd", config.mated_noise_sd},
                 {"nonmated_mean", config.nonmated_mean},
                 {"nonmated_sd", config.nonmated_sd},
                 {"n_nonmated", config.n_nonmated},
                 {"seed", config.seed}};
    write_file(path, j.dump(2) + "\n");
}

void write_quality_csv(const std::string& path, const std::vector<QualityRow>& rows) {
    std::ostringstream out;
    out << "sample_id,yaw,pitch,iso_quality,syp_quality\n";
    for (const QualityRow& row : rows) {
        out << row.sample_id << ',' << format_double(row.pose.yaw_deg) << ','
            << format_double(row.pose.pitch_deg) << ',' << row.iso.value << ','
            << row.syp.value << "\n";
    }
    write_file(path, out.str());
}

void write_surface_csv(const std::string& path, const SurfaceGrid& surface) {
    std::ostringstream out;
    out << "pitch,yaw,metric,value\n";
    const std::string name = metric_name(surface.metric);
    for (std::size_t i = 0; i < surface.grid.cells.size(); ++i) {
        if (!surface.values[i]) continue;  // missing cell, no row
        const PoseAngles& cell = surface.grid.cells[i];
        out << format_double(cell.pitch_deg) << ',' << format_double(cell.yaw_deg) << ','
            << name << ',' << format_double(*surface.values[i]) << "\n";
    }
    write_file(path, out.str());
}

void write_edc_csv(const std::string& path, const EdcCurve& curve) {
    std::ostringstream out;
    out << "discard_fraction,fnmr\n";
    for (const EdcPoint& point : curve.points) {
        out << format_double(point.discard_fraction) << ',' << format_double(point.fnmr) << "\n";
    }
    write_file(path, out.str());
}

void write_edc_sidecar(const std::string& path, const EdcCurve& curve, double pauc_value) {
    char key[32];
    std::snprintf(key, sizeof(key), "pauc@%.2f", curve.max_discard);
    const json j{{"threshold", curve.threshold},
                 {"fmr_target", curve.fmr_target},
                 {key, pauc_value}};
    write_file(path, j.dump(2) + "\n");
}

}  // namespace poseq
