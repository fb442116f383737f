#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vbscan/address.hpp"
#include "vbscan/symbols.hpp"

namespace vbscan {

enum class FbKind { CTU, CTD, TP, ALERT, TCONN };

enum class VarRole { Input, Output, Static };

inline std::string_view to_string(FbKind k) {
  switch (k) {
    case FbKind::CTU: return "CTU";
    case FbKind::CTD: return "CTD";
    case FbKind::TP: return "TP";
    case FbKind::ALERT: return "ALERT";
    case FbKind::TCONN: return "TCONN";
  }
  return "?";
}

inline std::optional<FbKind> parse_fb_kind(std::string_view s) {
  if (s == "CTU") return FbKind::CTU;
  if (s == "CTD") return FbKind::CTD;
  if (s == "TP") return FbKind::TP;
  if (s == "ALERT") return FbKind::ALERT;
  if (s == "TCONN") return FbKind::TCONN;
  return std::nullopt;
}

struct LayoutVar {
  std::string_view name;
  std::uint32_t offset;
  std::optional<std::uint8_t> bit;  // BOOL only
  VarType type;
  VarRole role;
  bool pointer = false;  // 6-byte PointerValue slot, input only
  std::string_view description;

  std::uint32_t width() const { return pointer ? PointerValue::kEncodedSize : byte_width(type); }
};

struct FbLayout {
  FbKind kind;
  std::uint32_t size;
  std::vector<LayoutVar> vars;

  const LayoutVar* find(std::string_view name) const {
    for (const auto& v : vars) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }

  std::vector<const LayoutVar*> inputs() const {
    std::vector<const LayoutVar*> out;
    for (const auto& v : vars) {
      if (v.role == VarRole::Input) out.push_back(&v);
    }
    return out;
  }

  /// Per-byte mask of bits that belong to a declared variable.
  std::vector<Byte> used_bits() const {
    std::vector<Byte> mask(size, 0);
    for (const auto& v : vars) {
      if (v.bit) {
        mask[v.offset] = static_cast<Byte>(mask[v.offset] | (1u << *v.bit));
      } else {
        for (std::uint32_t i = 0; i < v.width(); ++i) mask[v.offset + i] = 0xFF;
      }
    }
    return mask;
  }

  SymbolMap symbols(DbNumber fvb) const {
    SymbolMap out;
    for (const auto& v : vars) {
      if (v.pointer) continue;
      out.push_back({fvb, v.offset, v.bit, std::string(v.name), v.type, std::string(v.description)});
    }
    return out;
  }
};

// fVB layouts. Edge memory and timer/connection progress live in FbShadow,
// outside the fVB, so they are not reachable over the network.
inline const FbLayout& layout_of(FbKind kind) {
  using R = VarRole;
  static const FbLayout ctu{FbKind::CTU, 8, {
      {"CU", 0, 0, VarType::Bool, R::Input, false, "Counter input"},
      {"R", 0, 1, VarType::Bool, R::Input, false, "Reset"},
      {"PV", 2, {}, VarType::Int, R::Input, false, "Max count before Q is triggered"},
      {"Q", 4, 0, VarType::Bool, R::Output, false, "Indicates if CV is greater than PV"},
      {"CV", 6, {}, VarType::Int, R::Static, false, "Count value"},
  }};
  static const FbLayout ctd{FbKind::CTD, 8, {
      {"CD", 0, 0, VarType::Bool, R::Input, false, "Counter down input"},
      {"LD", 0, 1, VarType::Bool, R::Input, false, "Load PV into CV"},
      {"PV", 2, {}, VarType::Int, R::Input, false, "Count loaded by LD"},
      {"Q", 4, 0, VarType::Bool, R::Output, false, "Indicates if CV is at or below zero"},
      {"CV", 6, {}, VarType::Int, R::Static, false, "Count value"},
  }};
  static const FbLayout tp{FbKind::TP, 12, {
      {"IN", 0, 0, VarType::Bool, R::Input, false, "Pulse trigger"},
      {"PT", 2, {}, VarType::Time, R::Input, false, "Pulse length in cycles"},
      {"Q", 6, 0, VarType::Bool, R::Output, false, "Pulse output"},
      {"ET", 8, {}, VarType::Time, R::Output, false, "Elapsed pulse cycles"},
  }};
  static const FbLayout alert{FbKind::ALERT, 16, {
      {"TRIG", 0, 0, VarType::Bool, R::Input, false, "Send request"},
      {"BUSY", 0, 1, VarType::Bool, R::Output, false, "Send in progress"},
      {"SENT", 2, {}, VarType::Int, R::Static, false, "Alerts sent"},
      {"USER", 4, {}, VarType::Int, R::Output, false, "Recipient read through USERNAME"},
      {"WATCH_DOG_TIME", 6, {}, VarType::Time, R::Input, false, "Send timeout"},
      {"USERNAME", 10, {}, VarType::Int, R::Input, true, "Pointer to recipient id"},
  }};
  static const FbLayout tconn{FbKind::TCONN, 4, {
      {"REQ", 0, 0, VarType::Bool, R::Input, false, "Connect request"},
      {"BUSY", 0, 1, VarType::Bool, R::Output, false, "Connect in progress"},
      {"CONNECTED", 0, 2, VarType::Bool, R::Output, false, "Connection established"},
      {"ID", 2, {}, VarType::Int, R::Input, false, "Connection id"},
  }};
  switch (kind) {
    case FbKind::CTU: return ctu;
    case FbKind::CTD: return ctd;
    case FbKind::TP: return tp;
    case FbKind::ALERT: return alert;
    case FbKind::TCONN: return tconn;
  }
  return ctu;
}

struct FbShadow {
  bool edge = false;  // previous value of the edge-triggered input
  bool running = false;
  std::int32_t elapsed = 0;
  bool pending = false;
  bool connected = false;

  bool operator==(const FbShadow&) const = default;
};

inline bool rising_edge(bool input, FbShadow& shadow) {
  const bool rising = input && !shadow.edge;
  shadow.edge = input;
  return rising;
}

struct CtuIo {
  bool cu = false;
  bool r = false;
  std::int16_t pv = 0;
  bool q = false;
  std::int16_t cv = 0;
};

inline void ctu_step(CtuIo& io, FbShadow& shadow) {
  if (rising_edge(io.cu, shadow) && io.cv < std::numeric_limits<std::int16_t>::max()) ++io.cv;
  if (io.r) io.cv = 0;
  io.q = io.cv >= io.pv;
}

struct CtdIo {
  bool cd = false;
  bool ld = false;
  std::int16_t pv = 0;
  bool q = false;
  std::int16_t cv = 0;
};

inline void ctd_step(CtdIo& io, FbShadow& shadow) {
  const bool rising = rising_edge(io.cd, shadow);
  if (io.ld) {
    io.cv = io.pv;
  } else if (rising && io.cv > std::numeric_limits<std::int16_t>::min()) {
    --io.cv;
  }
  io.q = io.cv <= 0;
}

struct TpIo {
  bool in = false;
  std::int32_t pt = 0;
  bool q = false;
  std::int32_t et = 0;
};

// A rising IN starts a pulse that is not retriggerable; Q stays high for PT
// cycles, then ET drops back to zero.
inline void tp_step(TpIo& io, FbShadow& shadow) {
  if (rising_edge(io.in, shadow) && !shadow.running) {
    shadow.running = true;
    shadow.elapsed = 0;
  }
  if (shadow.running) {
    ++shadow.elapsed;
    if (shadow.elapsed > io.pt) {
      shadow.running = false;
      shadow.elapsed = 0;
    }
  }
  io.et = shadow.elapsed;
  io.q = io.et > 0 && io.et <= io.pt;
}

struct AlertIo {
  bool trig = false;
  bool busy = false;
  std::int16_t sent = 0;
  std::int16_t user = 0;
  std::int32_t watch_dog_time = 0;
  std::int16_t username = 0;  // dereferenced through the USERNAME pointer
};

inline void alert_step(AlertIo& io, FbShadow& shadow) {
  const bool fire = rising_edge(io.trig, shadow) && !io.busy;
  if (fire && io.sent < std::numeric_limits<std::int16_t>::max()) ++io.sent;
  io.busy = fire;
  io.user = io.username;
}

struct TconnIo {
  bool req = false;
  bool busy = false;
  bool connected = false;
  std::int16_t id = 0;
};

inline void tconn_step(TconnIo& io, FbShadow& shadow) {
  if (shadow.pending) {
    shadow.pending = false;
    shadow.connected = true;
  }
  const bool start = rising_edge(io.req, shadow) && !io.busy;
  if (start) shadow.pending = true;
  io.busy = start;
  io.connected = shadow.connected;
}

}  // namespace vbscan
