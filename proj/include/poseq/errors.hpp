#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace poseq {

/// Lookup misses (e.g. a pose absent from a re-annotation table).
class NotFoundError : public std::runtime_error {
public:
    explicit NotFoundError(const std::string& what) : std::runtime_error(what) {}
};

/// Structural problems in an input file: bad header, unknown column,
/// malformed JSON, missing required field.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// A single rejected data row.
struct RowError {
    std::size_t line = 0;  // 1-based line number in the source file
    std::string message;
};

/// Aggregate of all row-level failures collected while parsing a file.
/// Thrown after the whole file has been scanned so the report is complete.
class RowErrors : public std::runtime_error {
public:
    RowErrors(const std::string& path, std::vector<RowError> errors)
        : std::runtime_error(path + ": " + std::to_string(errors.size()) +
                             " malformed row(s)"),
          path_(path),
          errors_(std::move(errors)) {}

    const std::string& path() const { return path_; }
    const std::vector<RowError>& errors() const { return errors_; }

private:
    std::string path_;
    std::vector<RowError> errors_;
};

/// Degenerate calibration (all predictions equal) or a quality request
/// against a model that was saved without calibration.
class CalibrationError : public std::runtime_error {
public:
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

/// Serialized model carries an unsupported format_version.
class ModelVersionError : public std::runtime_error {
public:
    explicit ModelVersionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace poseq
