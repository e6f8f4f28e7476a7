#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace occupancy {

/// Empty cell; rendered as an empty CSV field and JSON null.
struct Blank {};

using Cell = std::variant<Blank, std::string, std::uint64_t, double, bool>;

/// 17 significant digits: round-trips every binary64.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

inline std::string format_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(Blank) const { return {}; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  };
  return std::visit(Visitor{}, cell);
}

/// A column-ordered table emitted as CSV or as a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void write_csv(std::ostream& out) const {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        const auto text = format_cell(row[c]);
        const bool quote = text.find_first_of(",\"\n") != std::string::npos;
        if (c) out << ',';
        if (quote) {
          out << '"';
          for (char ch : text) out << (ch == '"' ? "\"\"" : std::string(1, ch));
          out << '"';
        } else {
          out << text;
        }
      }
      out << '\n';
    }
  }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t c = 0; c < row.size(); ++c) {
        struct Visitor {
          nlohmann::ordered_json operator()(Blank) const { return nullptr; }
          nlohmann::ordered_json operator()(const std::string& s) const { return s; }
          nlohmann::ordered_json operator()(std::uint64_t v) const { return v; }
          nlohmann::ordered_json operator()(double v) const {
            if (!std::isfinite(v)) return nullptr;
            return v;
          }
          nlohmann::ordered_json operator()(bool v) const { return v; }
        };
        obj[columns[c]] = std::visit(Visitor{}, row[c]);
      }
      arr.push_back(std::move(obj));
    }
    return arr;
  }

  void write_json(std::ostream& out) const { out << to_json().dump(2) << '\n'; }
};

}  // namespace occupancy
