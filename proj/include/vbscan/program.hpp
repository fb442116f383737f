#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vbscan/address.hpp"
#include "vbscan/error.hpp"
#include "vbscan/fb.hpp"

namespace vbscan {

enum class BindingKind { Default, Direct, Gvb, Pointer };

inline std::string_view to_string(BindingKind k) {
  switch (k) {
    case BindingKind::Default: return "default";
    case BindingKind::Direct: return "direct";
    case BindingKind::Gvb: return "gvb";
    case BindingKind::Pointer: return "pointer";
  }
  return "?";
}

struct Binding {
  BindingKind kind = BindingKind::Default;
  std::int64_t value = 0;                           // Default start value or Direct literal
  std::variant<BitAddress, ByteSpan> source{};      // Gvb
  PointerValue pointer{};                           // Pointer

  static Binding make_default(std::int64_t v = 0) { return {BindingKind::Default, v, {}, {}}; }
  static Binding direct(std::int64_t v) { return {BindingKind::Direct, v, {}, {}}; }
  static Binding gvb(std::variant<BitAddress, ByteSpan> src) { return {BindingKind::Gvb, 0, src, {}}; }
  static Binding to(PointerValue p) { return {BindingKind::Pointer, 0, {}, p}; }
};

struct FbInstance {
  std::string name;
  FbKind kind = FbKind::CTU;
  DbNumber fvb = 0;
  std::map<std::string, Binding, std::less<>> bindings;

  const FbLayout& layout() const { return layout_of(kind); }
};

struct VbDecl {
  DbNumber number = 0;
  std::uint32_t size = 0;
  bool write_protected = false;
  std::vector<Byte> initial;  // zero-extended to size
};

// A bit copy executed between instances: before instance `position`, or after
// the last one when position == instances.size().
struct Wire {
  BitAddress source;
  BitAddress destination;
  std::size_t position = 0;
};

struct Program {
  std::string name;
  std::vector<VbDecl> vbs;
  std::vector<FbInstance> instances;
  std::vector<Wire> wiring;

  const VbDecl* vb(DbNumber n) const {
    for (const auto& v : vbs) {
      if (v.number == n) return &v;
    }
    return nullptr;
  }

  const FbInstance* instance(std::string_view n) const {
    for (const auto& i : instances) {
      if (i.name == n) return &i;
    }
    return nullptr;
  }
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// '#' starts a comment unless it is part of a P# pointer literal.
inline std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' && (i == 0 || line[i - 1] != 'P')) return line.substr(0, i);
  }
  return line;
}

inline std::int64_t parse_literal(const std::string& tok, std::size_t line) {
  if (tok == "TRUE") return 1;
  if (tok == "FALSE") return 0;
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(tok, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty()) {
    throw Error(ErrorCode::Schema, "line " + std::to_string(line) + ": bad literal '" + tok + "'");
  }
  return v;
}

inline void check_value_range(VarType type, std::int64_t v, std::size_t line) {
  std::int64_t lo = 0, hi = 0;
  switch (type) {
    case VarType::Bool: lo = 0; hi = 1; break;
    case VarType::Int: lo = -32768; hi = 32767; break;
    case VarType::DInt:
    case VarType::Time: lo = INT32_MIN; hi = INT32_MAX; break;
  }
  if (v < lo || v > hi) {
    throw Error(ErrorCode::Range, "line " + std::to_string(line) + ": value " + std::to_string(v) +
                                      " does not fit " + std::string(type_keyword(type)));
  }
}

inline void store_be(std::vector<Byte>& bytes, std::uint32_t offset, std::uint32_t width,
                     std::int64_t v) {
  const auto u = static_cast<std::uint64_t>(v);
  for (std::uint32_t i = 0; i < width; ++i) {
    bytes[offset + i] = static_cast<Byte>(u >> (8 * (width - 1 - i)));
  }
}

inline VbDecl* find_vb(std::vector<VbDecl>& vbs, DbNumber n) {
  for (auto& v : vbs) {
    if (v.number == n) return &v;
  }
  return nullptr;
}

inline void require_resolves(const std::vector<VbDecl>& vbs, const ByteSpan& span, std::size_t line) {
  for (const auto& v : vbs) {
    if (v.number != span.db) continue;
    if (span.end() > v.size) {
      throw Error(ErrorCode::UnresolvedAddress,
                  "line " + std::to_string(line) + ": " + to_string(span) + " outside DB" +
                      std::to_string(v.number) + " (" + std::to_string(v.size) + " bytes)");
    }
    return;
  }
  throw Error(ErrorCode::UnresolvedAddress,
              "line " + std::to_string(line) + ": DB" + std::to_string(span.db) + " is not declared");
}

}  // namespace detail

// Program text format, one statement per line, '#' starts a comment:
//
//   program <name>
//   vb <n> size <bytes> [protected]
//   set <DBn.DBXb.i|DBn.DBBb|DBn.DBWb|DBn.DBDb> = <literal>
//   instance <name> <CTU|CTD|TP|ALERT|TCONN> DB<n>
//     <INPUT> default [literal]
//     <INPUT> direct <literal>
//     <INPUT> gvb <address>
//     <INPUT> pointer P#DBn.DBXb.i
//   end
//   wire <bit address> -> <bit address>
//
// Literals are decimal integers or TRUE/FALSE. A wire runs at the point in the
// instance sequence where it appears.
inline Program parse_program(std::string_view text) {
  Program prog;
  struct PendingSet {
    Address addr;
    std::int64_t value;
    std::size_t line;
  };
  std::vector<PendingSet> sets;
  struct PendingWire {
    Wire wire;
    std::size_t line;
  };
  std::vector<PendingWire> wires;
  std::vector<std::size_t> instance_lines;
  std::optional<FbInstance> open;
  std::size_t open_line = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> Error {
    return Error(ErrorCode::Schema, "line " + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    raw = detail::strip_comment(raw);
    const auto tok = detail::split_ws(raw);
    if (tok.empty()) continue;

    if (open) {
      if (tok[0] == "end") {
        if (tok.size() != 1) throw fail("'end' takes no arguments");
        prog.instances.push_back(std::move(*open));
        instance_lines.push_back(open_line);
        open.reset();
        continue;
      }
      const LayoutVar* var = open->layout().find(tok[0]);
      if (var == nullptr || var->role != VarRole::Input) {
        throw fail("'" + tok[0] + "' is not an input of " + std::string(to_string(open->kind)));
      }
      if (open->bindings.contains(tok[0])) throw fail("input '" + tok[0] + "' bound twice");
      if (tok.size() < 2) throw fail("missing binding mode for '" + tok[0] + "'");
      const std::string& mode = tok[1];
      Binding b;
      if (var->pointer != (mode == "pointer")) {
        throw fail(var->pointer ? "input '" + tok[0] + "' only accepts a pointer binding"
                                : "input '" + tok[0] + "' does not accept a pointer binding");
      }
      if (mode == "default") {
        if (tok.size() > 3) throw fail("too many arguments");
        b = Binding::make_default(tok.size() == 3 ? detail::parse_literal(tok[2], line_no) : 0);
        detail::check_value_range(var->type, b.value, line_no);
      } else if (mode == "direct") {
        if (tok.size() != 3) throw fail("direct binding needs exactly one literal");
        b = Binding::direct(detail::parse_literal(tok[2], line_no));
        detail::check_value_range(var->type, b.value, line_no);
      } else if (mode == "gvb") {
        if (tok.size() != 3) throw fail("gvb binding needs exactly one address");
        const Address a = parse_address(tok[2]);
        if (const auto* bit = std::get_if<BitAddress>(&a)) {
          if (var->type != VarType::Bool) throw fail("gvb source width does not match " + tok[0]);
          b = Binding::gvb(*bit);
        } else if (const auto* span = std::get_if<ByteSpan>(&a)) {
          if (var->type == VarType::Bool || span->length != byte_width(var->type)) {
            throw fail("gvb source width does not match " + tok[0]);
          }
          b = Binding::gvb(*span);
        } else {
          throw fail("gvb source must be a plain address, not a pointer");
        }
      } else if (mode == "pointer") {
        if (tok.size() != 3) throw fail("pointer binding needs exactly one P# value");
        const Address a = parse_address(tok[2]);
        const auto* p = std::get_if<PointerValue>(&a);
        if (p == nullptr) throw fail("pointer binding needs a P# value");
        b = Binding::to(*p);
      } else {
        throw fail("unknown binding mode '" + mode + "'");
      }
      open->bindings.emplace(tok[0], b);
      continue;
    }

    const std::string& kw = tok[0];
    if (kw == "program") {
      if (tok.size() != 2) throw fail("program takes one name");
      prog.name = tok[1];
    } else if (kw == "vb") {
      if (tok.size() < 4 || tok.size() > 5 || tok[2] != "size") throw fail("expected 'vb <n> size <bytes> [protected]'");
      const std::int64_t n = detail::parse_literal(tok[1], line_no);
      const std::int64_t size = detail::parse_literal(tok[3], line_no);
      if (n < 0 || n > 0xFFFF) throw Error(ErrorCode::Range, "line " + std::to_string(line_no) + ": VB number out of range");
      if (size < 0 || size > 0xFFFFFF) throw Error(ErrorCode::Range, "line " + std::to_string(line_no) + ": VB size out of range");
      bool prot = false;
      if (tok.size() == 5) {
        if (tok[4] != "protected") throw fail("unknown VB flag '" + tok[4] + "'");
        prot = true;
      }
      if (prog.vb(static_cast<DbNumber>(n)) != nullptr) {
        throw Error(ErrorCode::DuplicateVb, "line " + std::to_string(line_no) + ": DB" + tok[1] + " declared twice");
      }
      prog.vbs.push_back({static_cast<DbNumber>(n), static_cast<std::uint32_t>(size), prot,
                          std::vector<Byte>(static_cast<std::size_t>(size), 0)});
    } else if (kw == "set") {
      if (tok.size() != 4 || tok[2] != "=") throw fail("expected 'set <address> = <literal>'");
      const Address a = parse_address(tok[1]);
      if (std::holds_alternative<PointerValue>(a)) throw fail("cannot set a pointer address");
      sets.push_back({a, detail::parse_literal(tok[3], line_no), line_no});
    } else if (kw == "instance") {
      if (tok.size() != 4) throw fail("expected 'instance <name> <kind> DB<n>'");
      const auto kind = parse_fb_kind(tok[2]);
      if (!kind) throw fail("unknown FB kind '" + tok[2] + "'");
      if (tok[3].rfind("DB", 0) != 0) throw fail("expected DB<n> for the instance VB");
      const std::int64_t n = detail::parse_literal(tok[3].substr(2), line_no);
      if (n < 0 || n > 0xFFFF) throw Error(ErrorCode::Range, "line " + std::to_string(line_no) + ": VB number out of range");
      if (prog.instance(tok[1]) != nullptr) throw fail("instance '" + tok[1] + "' declared twice");
      open = FbInstance{tok[1], *kind, static_cast<DbNumber>(n), {}};
      open_line = line_no;
    } else if (kw == "wire") {
      if (tok.size() != 4 || tok[2] != "->") throw fail("expected 'wire <src> -> <dst>'");
      wires.push_back({{parse_bit_address(tok[1]), parse_bit_address(tok[3]), prog.instances.size()}, line_no});
    } else {
      throw fail("unknown statement '" + kw + "'");
    }
  }
  if (open) {
    line_no = open_line;
    throw fail("instance '" + open->name + "' is missing 'end'");
  }

  // Resolution pass.
  for (const auto& s : sets) {
    std::uint32_t width = 1;
    ByteSpan span;
    VarType type = VarType::Int;
    if (const auto* bit = std::get_if<BitAddress>(&s.addr)) {
      span = {bit->db, bit->byte_offset, 1};
      type = VarType::Bool;
    } else {
      span = std::get<ByteSpan>(s.addr);
      width = span.length;
      type = width == 4 ? VarType::DInt : VarType::Int;
    }
    detail::require_resolves(prog.vbs, span, s.line);
    VbDecl* vb = detail::find_vb(prog.vbs, span.db);
    if (const auto* bit = std::get_if<BitAddress>(&s.addr)) {
      detail::check_value_range(type, s.value, s.line);
      Byte& b = vb->initial[bit->byte_offset];
      b = static_cast<Byte>(s.value ? (b | (1u << bit->bit)) : (b & ~(1u << bit->bit)));
    } else if (width == 1) {
      if (s.value < -128 || s.value > 255) {
        throw Error(ErrorCode::Range, "line " + std::to_string(s.line) + ": byte value out of range");
      }
      vb->initial[span.start] = static_cast<Byte>(s.value);
    } else {
      detail::check_value_range(type, s.value, s.line);
      detail::store_be(vb->initial, span.start, width, s.value);
    }
  }

  std::set<DbNumber> fvbs;
  for (std::size_t i = 0; i < prog.instances.size(); ++i) {
    const FbInstance& inst = prog.instances[i];
    line_no = instance_lines[i];
    const FbLayout& layout = inst.layout();
    detail::require_resolves(prog.vbs, {inst.fvb, 0, layout.size}, line_no);
    if (!fvbs.insert(inst.fvb).second) throw fail("DB" + std::to_string(inst.fvb) + " used by two instances");
    for (const LayoutVar* in_var : layout.inputs()) {
      auto it = inst.bindings.find(in_var->name);
      if (it == inst.bindings.end()) {
        throw fail("instance '" + inst.name + "' leaves input '" + std::string(in_var->name) + "' unbound");
      }
      const Binding& b = it->second;
      if (b.kind == BindingKind::Gvb) {
        if (const auto* bit = std::get_if<BitAddress>(&b.source)) {
          detail::require_resolves(prog.vbs, {bit->db, bit->byte_offset, 1}, line_no);
        } else {
          detail::require_resolves(prog.vbs, std::get<ByteSpan>(b.source), line_no);
        }
      }
    }
  }
  for (const auto& w : wires) {
    detail::require_resolves(prog.vbs, {w.wire.source.db, w.wire.source.byte_offset, 1}, w.line);
    detail::require_resolves(prog.vbs, {w.wire.destination.db, w.wire.destination.byte_offset, 1}, w.line);
    prog.wiring.push_back(w.wire);
  }
  return prog;
}

inline Program load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Schema, "cannot open program file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

}  // namespace vbscan
