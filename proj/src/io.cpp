#include "vortexstab/io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace vortexstab {

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty())
        throw ConfigError("csv: no columns");
}

void CsvWriter::add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size())
        throw ConfigError("csv: row width mismatch");
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) row += ",";
        row += format_double(values[i]);
    }
    rows_.push_back(std::move(row));
}

void CsvWriter::add_row_mixed(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
        throw ConfigError("csv: row width mismatch");
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ",";
        row += cells[i];
    }
    rows_.push_back(std::move(row));
}

std::string CsvWriter::serialize() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ",";
        out += columns_[i];
    }
    out += "\n";
    for (const std::string& row : rows_) {
        out += row;
        out += "\n";
    }
    return out;
}

void CsvWriter::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("csv: cannot write '" + path + "'");
    f << serialize();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("hash: cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return fnv1a_hex(ss.str());
}

Manifest::Manifest(const std::string& subcommand) {
    doc_["tool"] = "vortexstab";
    doc_["subcommand"] = subcommand;
    doc_["results"] = nlohmann::json::object();
    doc_["outputs"] = nlohmann::json::array();
}

void Manifest::set_config(const Config& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (const std::string& k : cfg.keys()) j[k] = cfg.get_string(k);
    doc_["config"] = j;
}

void Manifest::add_output(const std::string& path) {
    doc_["outputs"].push_back({{"path", path}, {"fnv1a64", file_hash(path)}});
}

void Manifest::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("manifest: cannot write '" + path + "'");
    f << doc_.dump(2) << "\n";
}

void write_error_json(const std::string& path, const std::string& error_class,
                      const std::string& message) {
    nlohmann::json j{{"error_class", error_class}, {"message", message}};
    std::ofstream f(path, std::ios::binary);
    if (f) f << j.dump(2) << "\n";
}

}  // namespace vortexstab
