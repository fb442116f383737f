// vbscan: soft-PLC server, memory vulnerability scanner, oracle and demos.
//
// Exit codes
//   0  success
//   1  internal error
//   2  bad input (usage, unreadable or invalid program/symbols/report, bad config)
//   3  scan incomplete (link lost mid-scan)
//   4  at least one byte could not be confirmed restored
//   5  refused: safe state not confirmed
//   6  connection failure or timeout
//   7  target refused the request (no such VB, access denied, wrong mode, shape)

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "vbscan/vbscan.hpp"

namespace {

using namespace vbscan;

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kBadInput = 2,
  kIncomplete = 3,
  kUnrestored = 4,
  kSafeState = 5,
  kConnection = 6,
  kTarget = 7,
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SafeState: return kSafeState;
    case ErrorCode::ConnectionFailed:
    case ErrorCode::Timeout: return kConnection;
    case ErrorCode::NoSuchVb:
    case ErrorCode::OutOfRange:
    case ErrorCode::AccessDenied:
    case ErrorCode::Mode:
    case ErrorCode::Protocol:
    case ErrorCode::MalformedFrame:
    case ErrorCode::ShapeMismatch: return kTarget;
    default: return kBadInput;
  }
}

std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }

std::uint16_t default_port() {
  if (const char* env = std::getenv("VBSCAN_PORT"); env != nullptr && *env != '\0') {
    try {
      const unsigned long v = std::stoul(env);
      if (v <= 65535) return static_cast<std::uint16_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "vbscan: ignoring invalid VBSCAN_PORT=" << env << "\n";
  }
  return wire::kDefaultPort;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Config, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::Config, "cannot write " + path);
}

LockstepParams parse_lockstep(const std::string& text) {
  LockstepParams p;
  std::vector<std::uint32_t> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long n = 0;
    try {
      n = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty() || n > 1'000'000) {
      throw Error(ErrorCode::Config, "--lockstep-cycles expects d,k[,n] cycle counts, got '" + text + "'");
    }
    v.push_back(static_cast<std::uint32_t>(n));
  }
  if (v.size() < 2 || v.size() > 3) throw Error(ErrorCode::Config, "--lockstep-cycles expects d,k[,n]");
  p.direct_cycles = v[0];
  p.delayed_cycles = v[1];
  if (v.size() == 3) p.next_byte_cycles = v[2];
  return p;
}

std::pair<std::string, std::uint16_t> parse_listen(const std::string& text, std::uint16_t fallback_port) {
  const auto colon = text.rfind(':');
  std::string host = colon == std::string::npos ? text : text.substr(0, colon);
  std::string port = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (colon == std::string::npos && !text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
    host = "127.0.0.1";
    port = text;
  }
  if (host.empty()) host = "127.0.0.1";
  if (port.empty()) return {host, fallback_port};
  try {
    const unsigned long p = std::stoul(port);
    if (p <= 65535) return {host, static_cast<std::uint16_t>(p)};
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Config, "bad listen address '" + text + "'");
}

Program load_named_program(const std::string& name) { return load_program(resolve_program(name).string()); }

std::optional<SymbolMap> load_symbols(const std::string& name) {
  if (name.empty()) return std::nullopt;
  return load_symbol_map(resolve_bundled(name, ".csv").string());
}

// Finishes a scan-like command: report to stdout, optional JSON, exit code
// from completeness and restoration.
int emit_report(const ScanReport& report, const std::string& json_path) {
  std::cout << render_text(report);
  if (!json_path.empty()) write_file(json_path, render_json(report));
  if (any_unrestored(report)) return kUnrestored;
  if (report.incomplete) return kIncomplete;
  return kOk;
}

// ---- serve -----------------------------------------------------------------

struct ServeArgs {
  std::string program;
  std::string listen;
  bool lockstep = false;
  std::uint32_t cycle_ms = 0;
  int rack = 0;
  int slot = 2;
  std::uint32_t exit_after_ms = 0;
};

int run_serve(const ServeArgs& a) {
  Program program;
  try {
    program = load_named_program(a.program);
  } catch (const Error& e) {
    std::cerr << "vbscan: cannot load program: " << e.what() << "\n";
    return kBadInput;
  }
  if (a.lockstep == (a.cycle_ms != 0)) {
    std::cerr << "vbscan: choose exactly one of --lockstep or --cycle-ms N\n";
    return kBadInput;
  }
  const auto [host, port] = parse_listen(a.listen, default_port());
  Runtime runtime(program, a.lockstep ? ClockMode::lockstep()
                                      : ClockMode::wallclock(std::chrono::milliseconds(a.cycle_ms)));
  wire::Server server(runtime, {host, port, static_cast<Byte>(a.rack), static_cast<Byte>(a.slot)});
  server.start();
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  runtime.start();
  std::cout << "serving program " << program.name << " on " << host << ":" << server.port() << " ("
            << (a.lockstep ? "lockstep" : "cycle " + std::to_string(a.cycle_ms) + " ms") << "), "
            << runtime.cycle_count() << " cycles" << std::endl;
  const auto started = std::chrono::steady_clock::now();
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    if (a.exit_after_ms != 0 &&
        std::chrono::steady_clock::now() - started >= std::chrono::milliseconds(a.exit_after_ms)) {
      break;
    }
  }
  runtime.stop();
  server.stop();
  std::cout << "stopped after " << runtime.cycle_count() << " cycles, " << server.requests_served()
            << " requests" << std::endl;
  return kOk;
}

// ---- scan ------------------------------------------------------------------

struct ScanArgs {
  std::string ip = "127.0.0.1";
  std::uint16_t port = wire::kDefaultPort;
  int rack = 0;
  int slot = 2;
  int db = -1;
  std::uint32_t read2_ms = 5000;
  std::uint32_t next_byte_ms = 1000;
  bool confirm = false;
  bool allow_fast = false;
  bool interactive = false;
  std::string symbols;
  std::string json;
  std::string lockstep;
};

ScanConfig scan_config(const ScanArgs& a) {
  ScanConfig c;
  c.host = a.ip;
  c.port = a.port;
  c.rack = static_cast<Byte>(a.rack);
  c.slot = static_cast<Byte>(a.slot);
  c.db = static_cast<DbNumber>(a.db);
  c.read2_ms = a.read2_ms;
  c.next_byte_ms = a.next_byte_ms;
  c.safe_state_confirmed = a.confirm;
  c.allow_fast = a.allow_fast;
  if (!a.lockstep.empty()) c.lockstep = parse_lockstep(a.lockstep);
  return c;
}

// Connects, re-prompting for the address on failure in interactive mode.
void connect_client(wire::Client& client, ScanConfig& config, bool interactive) {
  for (;;) {
    try {
      client.connect(config.host, config.port, config.rack, config.slot);
      return;
    } catch (const Error& e) {
      if (!interactive || (e.code() != ErrorCode::ConnectionFailed && e.code() != ErrorCode::Timeout)) throw;
      std::cerr << "connection to " << config.host << ":" << config.port << " failed: " << e.what() << "\n"
                << "PLC IP address to retry (empty keeps " << config.host << ", q quits): " << std::flush;
      std::string line;
      if (!std::getline(std::cin, line) || line == "q") throw;
      if (!line.empty()) config.host = line;
    }
  }
}

int run_scan(const ScanArgs& a) {
  ScanConfig config = scan_config(a);
  validate(config);  // before any traffic
  const auto symbols = load_symbols(a.symbols);
  wire::Client client;
  connect_client(client, config, a.interactive);
  ScanHooks hooks;
  hooks.on_byte = [](const ByteResult& r) {
    std::cerr << "byte " << r.offset << (r.vulnerable() ? " vulnerable" : "") << "\n";
  };
  hooks.reconnect = [&] {
    client.close();
    client.connect(config.host, config.port, config.rack, config.slot);
  };
  const ScanReport report = scan(config, client, symbols ? &*symbols : nullptr, hooks);
  return emit_report(report, a.json);
}

// ---- oracle ----------------------------------------------------------------

struct OracleArgs {
  std::string program;
  int db = -1;
  std::string lockstep = "1,5,1";
  std::string symbols;
  std::string json;
};

int run_oracle(const OracleArgs& a) {
  const Program program = load_named_program(a.program);
  const auto symbols = load_symbols(a.symbols);
  Runtime runtime(program, ClockMode::lockstep());
  runtime.step(1);  // settle computed outputs before sampling originals
  const ScanReport report = oracle_scan(runtime, static_cast<DbNumber>(a.db), parse_lockstep(a.lockstep),
                                        symbols ? &*symbols : nullptr);
  return emit_report(report, a.json);
}

// ---- pointer-probe ---------------------------------------------------------

struct ProbeArgs {
  ScanArgs target;
  std::string program;
  std::string pointer_at;
  std::uint32_t target_length = 2;
};

int run_probe(const ProbeArgs& a) {
  const BitAddress at = [&] {
    const Address addr = parse_address(a.pointer_at);
    if (const auto* b = std::get_if<BitAddress>(&addr)) return *b;
    if (const auto* s = std::get_if<ByteSpan>(&addr)) return BitAddress{s->db, s->start, 0};
    throw Error(ErrorCode::Config, "--pointer-at expects the slot's first byte, e.g. DB100.DBB10");
  }();
  const ByteSpan slot{at.db, at.byte_offset, PointerValue::kEncodedSize};
  ScanConfig config = scan_config(a.target);
  if (!a.program.empty() && !config.lockstep) config.lockstep = LockstepParams{};
  validate(config);

  auto probe = [&](PlcLink& link) {
    Session session{&link, config, {}, sleep_for};
    const auto report = pointer_probe(session, slot, a.target_length);
    std::cout << render_probe(report);
    return kOk;
  };
  if (!a.program.empty()) {
    Runtime runtime(load_named_program(a.program), ClockMode::lockstep());
    runtime.step(1);
    RuntimeLink link(runtime);
    return probe(link);
  }
  wire::Client client;
  connect_client(client, config, a.target.interactive);
  return probe(client);
}

// ---- attack-demo -----------------------------------------------------------

struct AttackArgs {
  std::string scenario;
  std::string program = "attack_scenario";
  std::uint32_t events = 10;
  bool remote = false;
  std::string ip = "127.0.0.1";
  std::uint16_t port = wire::kDefaultPort;
  int rack = 0;
  int slot = 2;
};

int run_attack(const AttackArgs& a) {
  auto show = [](const AttackTranscript& t) {
    std::cout << t.render();
    std::cout << "result: " << t.scenario << " SENT=" << t.alert_sent << "\n";
    return kOk;
  };
  if (a.remote) {
    wire::Client client;
    client.connect(a.ip, a.port, static_cast<Byte>(a.rack), static_cast<Byte>(a.slot));
    return show(attack_demo(client, a.scenario, a.events));
  }
  Runtime runtime(load_named_program(a.program), ClockMode::lockstep());
  RuntimeLink link(runtime);
  return show(attack_demo(link, a.scenario, a.events));
}

// ---- diff ------------------------------------------------------------------

int run_diff(const std::string& a, const std::string& b) {
  const ScanReport ra = parse_json(read_file(a));
  const ScanReport rb = parse_json(read_file(b));
  std::cout << "A: " << a << "\nB: " << b << "\n\n" << render_diff(diff(ra, rb));
  return kOk;
}

void add_target_options(CLI::App* cmd, ScanArgs& s, bool require_db) {
  cmd->add_option("--ip", s.ip, "PLC IP address")->capture_default_str();
  cmd->add_option("--port", s.port, "PLC port (default from VBSCAN_PORT or 10102)")->capture_default_str();
  cmd->add_option("--rack", s.rack, "CPU rack number")->check(CLI::Range(0, 255))->capture_default_str();
  cmd->add_option("--slot", s.slot, "CPU slot number")->check(CLI::Range(0, 255))->capture_default_str();
  auto* db = cmd->add_option("--db", s.db, "target VB (DB number)")->check(CLI::Range(0, 65535));
  if (require_db) db->required();
  cmd->add_option("--read2-ms", s.read2_ms, "delay before the delayed read")->capture_default_str();
  cmd->add_option("--next-byte-ms", s.next_byte_ms, "delay between bytes")->capture_default_str();
  cmd->add_flag("--i-confirm-safe-state", s.confirm, "confirm the plant is in a safe state");
  cmd->add_flag("--allow-fast", s.allow_fast, "permit --next-byte-ms below 1000");
  cmd->add_flag("--interactive", s.interactive, "re-prompt for the address on connection failure");
  cmd->add_option("--lockstep-cycles", s.lockstep, "step a LOCKSTEP target d,k[,n] cycles instead of sleeping");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PLC variable block vulnerability scanner"};
  app.require_subcommand(1);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "run a soft-PLC program behind the wire protocol");
  serve_cmd->add_option("--program", serve.program, "program file or bundled name")->required();
  serve_cmd->add_option("--listen", serve.listen, "HOST:PORT to listen on (port 0 = any)");
  serve_cmd->add_flag("--lockstep", serve.lockstep, "advance cycles only on STEP requests");
  serve_cmd->add_option("--cycle-ms", serve.cycle_ms, "free-running cycle period")->check(CLI::Range(1, 60000));
  serve_cmd->add_option("--rack", serve.rack, "rack to accept")->check(CLI::Range(0, 255));
  serve_cmd->add_option("--slot", serve.slot, "slot to accept")->check(CLI::Range(0, 255));
  serve_cmd->add_option("--exit-after-ms", serve.exit_after_ms, "stop by itself after this long");

  ScanArgs scan_args;
  scan_args.port = default_port();
  auto* scan_cmd = app.add_subcommand("scan", "scan one VB by bit inversion");
  add_target_options(scan_cmd, scan_args, true);
  scan_cmd->add_option("--symbols", scan_args.symbols, "symbol map CSV (file or bundled name)");
  scan_cmd->add_option("--json", scan_args.json, "also write the report as JSON");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "per-bit ground truth from an in-process simulator");
  oracle_cmd->add_option("--program", oracle.program, "program file or bundled name")->required();
  oracle_cmd->add_option("--db", oracle.db, "VB to classify")->required()->check(CLI::Range(0, 65535));
  oracle_cmd->add_option("--lockstep-cycles", oracle.lockstep, "d,k[,n] cycle counts")->capture_default_str();
  oracle_cmd->add_option("--symbols", oracle.symbols, "symbol map CSV (file or bundled name)");
  oracle_cmd->add_option("--json", oracle.json, "also write the report as JSON");

  ProbeArgs probe;
  probe.target.port = default_port();
  auto* probe_cmd = app.add_subcommand("pointer-probe", "check a stored pointer and the memory it points at");
  add_target_options(probe_cmd, probe.target, false);
  probe_cmd->add_option("--program", probe.program, "probe an in-process simulator instead of a remote PLC");
  probe_cmd->add_option("--pointer-at", probe.pointer_at, "first byte of the 6-byte pointer slot")->required();
  probe_cmd->add_option("--target-length", probe.target_length, "bytes to scan at the pointer target")
      ->check(CLI::Range(1, 4096))
      ->capture_default_str();

  AttackArgs attack;
  attack.port = default_port();
  auto* attack_cmd = app.add_subcommand("attack-demo", "replay an unauthorised-command scenario");
  attack_cmd->add_option("--scenario", attack.scenario, "baseline, cu-hold-false, cv-zero, reset-hold, busy-lock")
      ->required();
  attack_cmd->add_option("--events", attack.events, "valve-open events")->capture_default_str();
  attack_cmd->add_option("--program", attack.program, "in-process program")->capture_default_str();
  attack_cmd->add_flag("--remote", attack.remote, "target a LOCKSTEP server instead");
  attack_cmd->add_option("--ip", attack.ip, "server address for --remote");
  attack_cmd->add_option("--port", attack.port, "server port for --remote");
  attack_cmd->add_option("--rack", attack.rack, "rack for --remote")->check(CLI::Range(0, 255));
  attack_cmd->add_option("--slot", attack.slot, "slot for --remote")->check(CLI::Range(0, 255));

  std::string diff_a, diff_b;
  auto* diff_cmd = app.add_subcommand("diff", "compare two JSON reports of the same VB");
  diff_cmd->add_option("a", diff_a, "first report")->required();
  diff_cmd->add_option("b", diff_b, "second report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    if (*serve_cmd) return run_serve(serve);
    if (*scan_cmd) return run_scan(scan_args);
    if (*oracle_cmd) return run_oracle(oracle);
    if (*probe_cmd) return run_probe(probe);
    if (*attack_cmd) return run_attack(attack);
    if (*diff_cmd) return run_diff(diff_a, diff_b);
  } catch (const Error& e) {
    std::cerr << "vbscan: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "vbscan: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
