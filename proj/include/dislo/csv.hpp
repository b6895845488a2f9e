#pragma once

// Minimal CSV helpers for the project's own unquoted, comma-separated files.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dislo/errors.hpp"

namespace dislo::csv {

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

template <typename Int>
std::optional<Int> to_int(std::string_view s) {
    Int v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::optional<double> to_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        const std::string tmp{s};
        const double v = std::stod(tmp, &used);
        if (used != tmp.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

/// Whole-file table with a header row; cells addressed by column name.
class Table {
public:
    static Table read(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open " + path);
        Table t;
        t.path_ = path;
        std::string line;
        if (!std::getline(in, line)) throw FormatError(path, 1, "missing header row");
        strip_cr(line);
        for (auto h : split(line)) t.header_.emplace_back(h);
        for (std::size_t i = 0; i < t.header_.size(); ++i) t.index_[t.header_[i]] = i;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            strip_cr(line);
            if (line.empty()) continue;
            auto cells = split(line);
            if (cells.size() != t.header_.size())
                throw FormatError(path, lineno,
                                  "expected " + std::to_string(t.header_.size()) + " fields, got " +
                                      std::to_string(cells.size()));
            std::vector<std::string> row;
            row.reserve(cells.size());
            for (auto c : cells) row.emplace_back(c);
            t.rows_.push_back(std::move(row));
            t.lines_.push_back(lineno);
        }
        return t;
    }

    std::size_t rows() const { return rows_.size(); }
    bool has(const std::string& col) const { return index_.contains(col); }

    const std::string& at(std::size_t row, const std::string& col) const {
        auto it = index_.find(col);
        if (it == index_.end()) throw FormatError(path_, 1, "missing column '" + col + "'");
        return rows_[row][it->second];
    }

    template <typename Int>
    Int integer(std::size_t row, const std::string& col) const {
        auto v = to_int<Int>(at(row, col));
        if (!v) throw FormatError(path_, lines_[row], col + ": not an integer");
        return *v;
    }

    double real(std::size_t row, const std::string& col) const {
        auto v = to_double(at(row, col));
        if (!v) throw FormatError(path_, lines_[row], col + ": not a number");
        return *v;
    }

    std::size_t line_of(std::size_t row) const { return lines_[row]; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::vector<std::string> header_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::size_t> lines_;
};

}  // namespace dislo::csv
