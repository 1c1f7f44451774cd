#pragma once

#include "vortexstab/config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace vortexstab {

/// CSV with a fixed column order and 17-significant-digit floats; identical
/// inputs produce byte-identical files.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);

    void add_row(const std::vector<double>& values);
    void add_row_mixed(const std::vector<std::string>& cells);
    std::string serialize() const;
    void save(const std::string& path) const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

/// FNV-1a 64-bit content hash as fixed-width hex.
std::string fnv1a_hex(const std::string& bytes);
std::string file_hash(const std::string& path);

/// JSON run manifest: config echo, fitted numbers, and every output file with
/// its content hash.  Deterministic (no timestamps).
class Manifest {
public:
    explicit Manifest(const std::string& subcommand);

    void set_config(const Config& cfg);
    nlohmann::json& results() { return doc_["results"]; }
    void add_output(const std::string& path);
    void save(const std::string& path) const;
    const nlohmann::json& doc() const { return doc_; }

private:
    nlohmann::json doc_;
};

/// Writes a diagnostic JSON {error_class, message} used on nonzero exits.
void write_error_json(const std::string& path, const std::string& error_class,
                      const std::string& message);

}  // namespace vortexstab
