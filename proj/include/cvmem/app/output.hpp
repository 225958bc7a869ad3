// Deterministic tabular output: locale-free CSV and JSON, numbers at 12
// significant digits.

#pragma once

#include "cvmem/app/config.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace cvmem::app {

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw std::logic_error("Table::add: width mismatch in " + name);
        rows.push_back(std::move(row));
    }
};

inline constexpr int significant_digits = 12;

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, significant_digits);
    return std::string(buf.data(), res.ptr);
}

/// `v` rounded to 12 significant digits, so JSON prints at most that many.
inline double rounded(double v) {
    if (!std::isfinite(v)) return v;
    const std::string s = format_number(v);
    double out = v;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

inline std::string csv_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_number(v);
            } else if constexpr (std::is_same_v<T, long long>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                return v;
            }
        },
        c);
}

inline nlohmann::ordered_json json_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) return format_number(v);
                return rounded(v);
            } else {
                return v;
            }
        },
        c);
}

inline std::string render_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
        out += '\n';
    }
    return out;
}

/// {"<name>": [ {column: value, ...}, ... ], <extra fields>}
inline std::string render_json(const Table& t, const nlohmann::ordered_json& extra = nlohmann::ordered_json::object()) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
        rows.push_back(std::move(obj));
    }
    doc[t.name] = std::move(rows);
    for (const auto& [k, v] : extra.items()) doc[k] = v;
    return doc.dump(2) + "\n";
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw IoError("write failed for " + path.string());
}

/// Writes <out_dir>/<name>.<csv|json> and returns the path.
inline std::filesystem::path write_table(const RunConfig& cfg, const Table& t,
                                         const nlohmann::ordered_json& extra = nlohmann::ordered_json::object()) {
    const std::filesystem::path path = cfg.out_dir / (t.name + "." + to_string(cfg.format));
    write_text(path, cfg.format == OutputFormat::csv ? render_csv(t) : render_json(t, extra));
    return path;
}

}  // namespace cvmem::app
