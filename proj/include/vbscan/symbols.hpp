#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vbscan/address.hpp"
#include "vbscan/error.hpp"

namespace vbscan {

enum class VarType { Bool, Int, DInt, Time };

inline std::uint32_t byte_width(VarType t) {
  switch (t) {
    case VarType::Bool: return 1;
    case VarType::Int: return 2;
    case VarType::DInt:
    case VarType::Time: return 4;
  }
  return 1;
}

/// Upper-case form used in symbol maps and program files.
inline std::string_view type_keyword(VarType t) {
  switch (t) {
    case VarType::Bool: return "BOOL";
    case VarType::Int: return "INT";
    case VarType::DInt: return "DINT";
    case VarType::Time: return "TIME";
  }
  return "BOOL";
}

/// Mixed-case form used in rendered reports.
inline std::string_view type_display(VarType t) {
  switch (t) {
    case VarType::Bool: return "Bool";
    case VarType::Int: return "Int";
    case VarType::DInt: return "DInt";
    case VarType::Time: return "Time";
  }
  return "Bool";
}

inline std::optional<VarType> parse_type(std::string_view s) {
  if (s == "BOOL") return VarType::Bool;
  if (s == "INT") return VarType::Int;
  if (s == "DINT") return VarType::DInt;
  if (s == "TIME") return VarType::Time;
  return std::nullopt;
}

struct Symbol {
  DbNumber db = 0;
  std::uint32_t byte_offset = 0;
  std::optional<std::uint8_t> bit;  // set for BOOL, empty for byte-aligned types
  std::string name;
  VarType type = VarType::Bool;
  std::string description;

  /// Every (byte, bit) pair the variable occupies.
  std::vector<std::pair<std::uint32_t, std::uint8_t>> bits() const {
    std::vector<std::pair<std::uint32_t, std::uint8_t>> out;
    if (bit) {
      out.emplace_back(byte_offset, *bit);
      return out;
    }
    for (std::uint32_t i = 0; i < byte_width(type); ++i) {
      for (std::uint8_t b = 0; b < 8; ++b) out.emplace_back(byte_offset + i, b);
    }
    return out;
  }

  bool operator==(const Symbol&) const = default;
};

using SymbolMap = std::vector<Symbol>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::uint32_t parse_uint(const std::string& field, std::size_t line, const char* what) {
  if (field.empty() || field.find_first_not_of("0123456789") != std::string::npos ||
      field.size() > 9) {
    throw Error(ErrorCode::Schema, "line " + std::to_string(line) + ": bad " + what + " '" + field + "'");
  }
  return static_cast<std::uint32_t>(std::stoul(field));
}

}  // namespace detail

// Lines are `db,byte_offset,bit_or_dash,name,type[,description]`. Blank lines
// and lines starting with '#' are ignored. The description column is an
// extension; it may contain commas.
inline SymbolMap parse_symbol_map(std::string_view text) {
  SymbolMap out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (fields.size() < 5) {
      const auto comma = line.find(',', pos);
      if (comma == std::string::npos) {
        fields.push_back(detail::trim(std::string_view(line).substr(pos)));
        pos = line.size() + 1;
        break;
      }
      fields.push_back(detail::trim(std::string_view(line).substr(pos, comma - pos)));
      pos = comma + 1;
    }
    if (fields.size() < 5) {
      throw Error(ErrorCode::Schema, "line " + std::to_string(line_no) + ": expected at least 5 fields");
    }

    Symbol sym;
    const std::uint32_t db = detail::parse_uint(fields[0], line_no, "db");
    if (db > 0xFFFF) throw Error(ErrorCode::Range, "line " + std::to_string(line_no) + ": db too large");
    sym.db = static_cast<DbNumber>(db);
    sym.byte_offset = detail::parse_uint(fields[1], line_no, "byte offset");
    sym.name = fields[3];
    if (sym.name.empty()) throw Error(ErrorCode::Schema, "line " + std::to_string(line_no) + ": empty name");
    const auto type = parse_type(fields[4]);
    if (!type) {
      throw Error(ErrorCode::Schema, "line " + std::to_string(line_no) + ": unknown type '" + fields[4] + "'");
    }
    sym.type = *type;
    if (fields[2] == "-") {
      if (sym.type == VarType::Bool) {
        throw Error(ErrorCode::Schema, "line " + std::to_string(line_no) + ": BOOL needs a bit index");
      }
    } else {
      if (sym.type != VarType::Bool) {
        throw Error(ErrorCode::Schema,
                    "line " + std::to_string(line_no) + ": multi-byte variable must use '-' for bit");
      }
      const std::uint32_t bit = detail::parse_uint(fields[2], line_no, "bit");
      if (bit > 7) throw Error(ErrorCode::Range, "line " + std::to_string(line_no) + ": bit index > 7");
      sym.bit = static_cast<std::uint8_t>(bit);
    }
    if (pos <= line.size()) sym.description = detail::trim(std::string_view(line).substr(pos));
    out.push_back(std::move(sym));
  }
  return out;
}

inline SymbolMap load_symbol_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Schema, "cannot open symbol map " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_symbol_map(ss.str());
}

inline std::string format_symbol_map(const SymbolMap& map) {
  std::string out;
  for (const auto& s : map) {
    out += std::to_string(s.db) + "," + std::to_string(s.byte_offset) + "," +
           (s.bit ? std::to_string(*s.bit) : std::string("-")) + "," + s.name + "," +
           std::string(type_keyword(s.type));
    if (!s.description.empty()) out += "," + s.description;
    out += "\n";
  }
  return out;
}

}  // namespace vbscan
