#pragma once

// Columnar output for the command-line front end: CSV with '#' metadata
// lines, or JSON with the same content, written atomically.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qfc {

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// 12 significant digits, '.' decimal point regardless of locale.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string s(buf);
    for (char& c : s) {
        if (c == ',') c = '.';
    }
    return s;
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (const auto& [key, value] : t.metadata) out += "# " + key + "=" + value + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            if (const double* d = std::get_if<double>(&row[i])) {
                out += format_number(*d);
            } else {
                out += std::get<std::string>(row[i]);
            }
        }
        out += "\n";
    }
    return out;
}

inline nlohmann::ordered_json to_json_value(const Table& t) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [key, value] : t.metadata) meta[key] = value;
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json rec = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
            std::visit([&](const auto& v) { rec[t.columns[i]] = v; }, row[i]);
        }
        records.push_back(std::move(rec));
    }
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    doc["metadata"] = std::move(meta);
    doc["columns"] = t.columns;
    doc["records"] = std::move(records);
    return doc;
}

inline std::string to_json(const Table& t) { return to_json_value(t).dump(2) + "\n"; }

/// Writes content to `path` through a sibling temporary file and a rename,
/// so readers never observe a partially written file. Empty path: stdout.
inline void write_atomic(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content << std::flush;
        return;
    }
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace qfc
