#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace purity_mc {

enum class TableId { table1, table2, table3, table4 };

inline std::string to_string(TableId id) {
    switch (id) {
        case TableId::table1: return "table1";
        case TableId::table2: return "table2";
        case TableId::table3: return "table3";
        case TableId::table4: return "table4";
    }
    throw std::logic_error("unreachable TableId");
}

inline TableId table_id_from_string(const std::string& s) {
    if (s == "table1") return TableId::table1;
    if (s == "table2") return TableId::table2;
    if (s == "table3") return TableId::table3;
    if (s == "table4") return TableId::table4;
    throw std::invalid_argument("unknown table id: " + s);
}

// One published reference row: transcribed values, never recomputed. Rows
// whose budgets are beyond desk scale carry note "full-budget" and are
// skipped by default configurations.
struct ReferenceRow {
    TableId table_id = TableId::table1;
    double alpha = 0.0;
    double value = 0.0;
    double error = 0.0;
    double n_mc_millions = 0.0;
    std::string note;
    std::optional<double> published_bound;  // table4 carries a bound column

    std::uint64_t calls_budget() const {
        return static_cast<std::uint64_t>(n_mc_millions * 1e6 + 0.5);
    }
    bool full_budget_only() const { return note == "full-budget"; }
};

// FNV-1a 64-bit, used to pin the reference file's exact bytes in a test.
inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;  // canonical FNV-1a offset basis
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::uint64_t fnv1a64_file(const std::string& path) {
    const std::string bytes = read_file_bytes(path);
    return fnv1a64(bytes.data(), bytes.size());
}

struct ReferenceTables {
    std::vector<ReferenceRow> rows;
    std::map<std::string, std::string> notes;  // file-level discrepancy notes

    static ReferenceTables load(const std::string& path) {
        const std::string bytes = read_file_bytes(path);
        nlohmann::json j = nlohmann::json::parse(bytes);
        ReferenceTables out;
        for (const auto& r : j.at("rows")) {
            ReferenceRow row;
            row.table_id = table_id_from_string(r.at("table").get<std::string>());
            row.alpha = r.at("alpha").get<double>();
            row.value = r.at("value").get<double>();
            row.error = r.at("error").get<double>();
            row.n_mc_millions = r.at("n_mc_millions").get<double>();
            if (r.contains("note")) row.note = r.at("note").get<std::string>();
            if (r.contains("published_bound"))
                row.published_bound = r.at("published_bound").get<double>();
            out.rows.push_back(std::move(row));
        }
        if (j.contains("notes"))
            for (const auto& [key, val] : j.at("notes").items())
                out.notes[key] = val.get<std::string>();
        if (out.rows.empty()) throw std::runtime_error("reference file has no rows: " + path);
        return out;
    }

    std::vector<ReferenceRow> rows_for(TableId id, bool include_full_budget) const {
        std::vector<ReferenceRow> out;
        for (const auto& r : rows)
            if (r.table_id == id && (include_full_budget || !r.full_budget_only()))
                out.push_back(r);
        return out;
    }

    std::optional<ReferenceRow> find(TableId id, double alpha) const {
        for (const auto& r : rows)
            if (r.table_id == id && r.alpha == alpha) return r;
        return std::nullopt;
    }
};

}  // namespace purity_mc
