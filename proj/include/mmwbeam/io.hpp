#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmwbeam/config.hpp"
#include "mmwbeam/error.hpp"

namespace mmwbeam {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

/// Result rows, written either as CSV or as JSON records.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    Table() = default;
    explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}

    void add(std::vector<Cell> row) {
        detail::require(row.size() == columns.size(), "Table::add: row width does not match the header");
        rows.push_back(std::move(row));
    }
};

/// 12 significant digits, '.' decimal point regardless of locale.
inline std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    std::string s(buf);
    for (auto& ch : s)
        if (ch == ',') ch = '.';
    if (s == "-0") s = "0";
    return s;
}

inline std::string format_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(double x) const { return format_number(x); }
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(bool x) const { return x ? "true" : "false"; }
        std::string operator()(const std::string& x) const {
            if (x.find_first_of(",\"\n") == std::string::npos) return x;
            std::string q = "\"";
            for (char ch : x) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + "\"";
        }
    };
    return std::visit(Visitor{}, c);
}

inline nlohmann::json cell_json(const Cell& c) {
    return std::visit([](const auto& x) { return nlohmann::json(x); }, c);
}

inline nlohmann::json provenance(const ExperimentConfig& c) {
    return {{"tool", "mmwbeam"}, {"version", version}, {"config", to_json(c)}};
}

inline std::string render_csv(const Table& t, const ExperimentConfig& c) {
    std::string out = std::string("# mmwbeam ") + version + "\n# config: " + to_json(c).dump() + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
        out += "\n";
    }
    return out;
}

inline nlohmann::json records(const Table& t) {
    auto arr = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        arr.push_back(std::move(r));
    }
    return arr;
}

inline std::string render_json(const nlohmann::json& body, const ExperimentConfig& c) {
    nlohmann::json doc = {{"provenance", provenance(c)}};
    for (const auto& [k, v] : body.items()) doc[k] = v;
    return doc.dump(2) + "\n";
}

inline std::string render(const Table& t, const ExperimentConfig& c, OutputFormat format) {
    return format == OutputFormat::Csv ? render_csv(t, c) : render_json({{"records", records(t)}}, c);
}

/// Pulls the config back out of a file written by render_csv or render_json.
inline ExperimentConfig read_provenance(const std::string& text) {
    if (text.rfind("# mmwbeam ", 0) == 0) {
        const std::string tag = "\n# config: ";
        const auto at = text.find(tag);
        if (at == std::string::npos) throw config_error("<provenance>", "missing config line");
        const auto start = at + tag.size();
        return parse_config(std::string_view(text).substr(start, text.find('\n', start) - start));
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("<provenance>", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.contains("provenance") || !doc["provenance"].contains("config"))
        throw config_error("<provenance>", "missing provenance.config");
    return parse_config_document(doc["provenance"]["config"]);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw io_error(path.parent_path().string(), "cannot create directory: " + ec.message());
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error(path.string(), "cannot open for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) throw io_error(path.string(), "write failed");
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error(path.string(), "cannot open for reading");
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace mmwbeam
