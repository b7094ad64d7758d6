// foonlink: FOON task graphs, detection-stream recognition and NGSI-LD publishing.
//
// Exit codes: 0 success, 1 domain failure (invalid graph, failed check,
// broker rejection), 2 usage or I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "foonlink/foonlink.hpp"

namespace fs = std::filesystem;
using namespace foonlink;

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsage = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string kb_dir;
  std::string broker_url;
  std::string context_url;
  std::uint64_t seed = 0;
  bool json_logs = false;
};

Globals g_opts;

void log(const char* level, const std::string& msg) {
  if (g_opts.json_logs) {
    nlohmann::ordered_json j{{"level", level}, {"msg", msg}};
    std::cerr << j.dump() << '\n';
  } else {
    std::cerr << "foonlink: " << level << ": " << msg << '\n';
  }
}

std::optional<fs::path> kb_dir() {
  if (g_opts.kb_dir.empty()) return std::nullopt;
  return fs::path(g_opts.kb_dir);
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  auto doc = kb::read_file(path);
  if (!doc) throw IoError("cannot read '" + path + "'");
  return *doc;
}

void write_output(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << data;
}

// A path to a FOONv1 file, or the name of a KB subgraph.
Subgraph resolve_subgraph(const std::string& ref) {
  std::error_code ec;
  if (fs::is_regular_file(ref, ec)) return parse_foon(read_input(ref));
  if (auto g = kb::load_named(ref, kb_dir())) return *g;
  throw IoError("no FOON file or KB subgraph named '" + ref + "'");
}

ngsi::BrokerConfig broker_config() {
  auto cfg = ngsi::BrokerConfig::from_env();
  if (!g_opts.broker_url.empty()) cfg.base_url = g_opts.broker_url;
  if (!g_opts.context_url.empty()) cfg.context_url = g_opts.context_url;
  return cfg;
}

void add_recognizer_flags(CLI::App* sub, recognition::RecognizerConfig& rc) {
  sub->add_option("--tau-grasp", rc.tau_grasp, "Grasp distance threshold (normalized)")->capture_default_str();
  sub->add_option("--tau-release", rc.tau_release, "Release distance threshold (normalized)")->capture_default_str();
  sub->add_option("--tau-attach", rc.tau_attach, "Attachment distance threshold (normalized)")->capture_default_str();
  sub->add_option("--k-confirm", rc.k_confirm, "Consecutive frames needed to confirm a grasp")->capture_default_str();
  sub->add_option("--min-confidence", rc.min_confidence, "Minimum unit confidence")->capture_default_str();
}

int cmd_validate(const std::string& file) {
  auto doc = read_input(file);
  Subgraph g;
  try {
    g = parse_foon(doc);
  } catch (const Error& e) {
    std::cout << file << ": " << e.what() << '\n';
    return kDomainFailure;
  }
  auto report = validate(g);
  for (const auto& v : report) std::cout << v.to_string() << '\n';
  return report.empty() ? kOk : kDomainFailure;
}

int cmd_merge(const std::vector<std::string>& files, const std::string& out) {
  std::vector<Subgraph> graphs;
  for (const auto& f : files) {
    auto g = resolve_subgraph(f);
    auto report = validate(g);
    if (!report.empty()) {
      for (const auto& v : report) log("error", g.name + ": " + v.to_string());
      return kDomainFailure;
    }
    graphs.push_back(std::move(g));
  }
  write_output(out, serialize_universal(merge(graphs)));
  return kOk;
}

int cmd_dot(const std::string& file, const std::string& out) {
  std::error_code ec;
  if (fs::is_regular_file(file, ec)) {
    auto doc = read_input(file);
    if (is_universal_document(doc)) {
      auto f = parse_universal(doc);
      write_output(out, export_dot(f, text::join(f.subgraph_names(), "+")));
      return kOk;
    }
    write_output(out, export_dot(parse_foon(doc)));
    return kOk;
  }
  write_output(out, export_dot(resolve_subgraph(file)));
  return kOk;
}

int cmd_simulate(const std::string& subgraph, double noise, double fps, const std::string& out) {
  auto g = resolve_subgraph(subgraph);
  if (auto report = validate(g); !report.empty()) {
    log("error", g.name + ": " + report.front().to_string());
    return kDomainFailure;
  }
  recognition::SimulationOptions opt;
  opt.noise_sigma = noise;
  opt.fps = fps;
  opt.seed = g_opts.seed;
  std::ostringstream ss;
  recognition::write_jsonl(ss, recognition::simulate_stream(g, opt));
  write_output(out, ss.str());
  return kOk;
}

int cmd_recognize(const std::string& foon, const std::string& stream, const recognition::RecognizerConfig& rc,
                  bool segments, const std::string& out) {
  auto g = resolve_subgraph(foon);
  std::istringstream in(read_input(stream));
  std::vector<std::string> diags;
  auto frames = recognition::read_jsonl(in, &diags);
  auto result = recognition::recognize(frames, g, rc);
  for (const auto& d : diags) log("warn", d);
  for (const auto& d : result.diagnostics) log("warn", d);
  nlohmann::ordered_json j;
  if (segments) {
    j = nlohmann::ordered_json::array();
    for (const auto& u : result.units)
      for (const auto& s : u.evidence) j.push_back(recognition::to_json(s));
  } else {
    j = recognition::to_json(result.units);
  }
  write_output(out, j.dump(2) + "\n");
  return kOk;
}

struct PublishFlags {
  std::string units;
  std::string foon;
  std::string run_id = "run-0";
  std::string epoch;
  std::string token;
  int retries = 3;
  double timeout = 10;
  bool batch = false;
  bool inputs = false;
};

int cmd_publish(const PublishFlags& pf) {
  auto cfg = broker_config();
  if (cfg.base_url.empty()) {
    log("error", "no broker URL: pass --broker-url or set FOON_BROKER_URL");
    return kUsage;
  }
  cfg.run_id = pf.run_id;
  cfg.retries = pf.retries;
  cfg.timeout = pf.timeout;
  cfg.batch_upsert = pf.batch;
  if (!pf.token.empty()) cfg.bearer_token = pf.token;

  auto units_json = nlohmann::json::parse(read_input(pf.units), nullptr, false);
  if (units_json.is_discarded() || !units_json.is_array()) throw IoError("'" + pf.units + "' is not a JSON array");

  ngsi::MappingOptions mapping;
  mapping.run_id = pf.run_id;
  mapping.selection = pf.inputs ? ngsi::ObjectSelection::inputs : ngsi::ObjectSelection::outputs;
  if (pf.epoch.empty()) {
    mapping.stream_epoch = std::chrono::time_point_cast<std::chrono::milliseconds>(ngsi::Clock::now());
  } else if (auto ts = ngsi::parse_time(pf.epoch)) {
    mapping.stream_epoch = *ts;
  } else {
    throw CLI::ValidationError("--epoch", "expected YYYY-MM-DDTHH:MM:SS[.mmm]Z");
  }

  ngsi::BrokerClient client(cfg);
  std::map<std::string, Subgraph> graphs;
  auto out = nlohmann::ordered_json::array();
  for (const auto& uj : units_json) {
    auto unit = recognition::recognized_unit_from_json(uj);
    const std::string ref = pf.foon.empty() ? unit.unit.subgraph : pf.foon;
    if (!graphs.count(ref)) graphs.emplace(ref, resolve_subgraph(ref));
    auto [task, resources] = ngsi::foon2ont(unit, graphs.at(ref), mapping);
    out.push_back(client.publish(task, resources).to_json());
  }
  write_output("", out.dump(2) + "\n");
  return kOk;
}

int cmd_roundtrip(const std::string& subgraph, double noise, double fps, const std::string& run_id,
                  const recognition::RecognizerConfig& rc) {
  auto g = resolve_subgraph(subgraph);
  pipeline::RoundtripOptions opt;
  opt.noise_sigma = noise;
  opt.fps = fps;
  opt.seed = g_opts.seed;
  opt.recognizer = rc;
  opt.mapping.run_id = run_id.empty() ? "roundtrip-" + std::to_string(g_opts.seed) : run_id;
  opt.mapping.stream_epoch = std::chrono::time_point_cast<std::chrono::milliseconds>(ngsi::Clock::now());

  auto cfg = broker_config();
  cfg.run_id = opt.mapping.run_id;
  broker::BrokerSim sim;
  std::unique_ptr<broker::BrokerSimServer> server;
  if (cfg.base_url.empty()) {
    server = std::make_unique<broker::BrokerSimServer>(sim);
    server->start();
    cfg.base_url = server->url();
    log("info", "embedded broker simulator at " + cfg.base_url);
  }
  ngsi::BrokerClient client(cfg);
  auto report = pipeline::run_roundtrip(g, client, opt);
  std::cout << report.summary();
  if (!report.pass())
    std::cout << "expected " << pipeline::format_sequence(report.expected) << "\nobserved "
              << pipeline::format_sequence(report.observed) << '\n';
  return report.pass() ? kOk : kDomainFailure;
}

int cmd_broker_sim(const std::string& host, int port) {
  broker::BrokerSim sim;
  broker::BrokerSimServer server(sim);
  log("info", "broker simulator listening on " + host + ":" + std::to_string(port));
  server.listen(host, port);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FOON task graphs, activity recognition and NGSI-LD publishing"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--kb-dir", g_opts.kb_dir, "Directory with <name>.foon files overriding the built-in KB");
  app.add_option("--broker-url", g_opts.broker_url, "NGSI-LD broker base URL (env FOON_BROKER_URL)");
  app.add_option("--context-url", g_opts.context_url, "JSON-LD @context URL (env FOON_CONTEXT_URL)");
  app.add_option("--seed", g_opts.seed, "Random seed")->capture_default_str();
  app.add_flag("--json-logs", g_opts.json_logs, "Write diagnostics as JSON lines");

  std::string file, out;
  std::vector<std::string> files;

  auto* validate_cmd = app.add_subcommand("validate", "Check a FOONv1 file for structural violations");
  validate_cmd->add_option("file", file, "FOONv1 file")->required();

  auto* merge_cmd = app.add_subcommand("merge", "Merge subgraphs into a universal FOON (FOONv1-U)");
  merge_cmd->add_option("files", files, "FOONv1 files or KB names")->required();
  merge_cmd->add_option("-o,--output", out, "Output file (default stdout)");

  auto* dot_cmd = app.add_subcommand("dot", "Export a subgraph or universal FOON as Graphviz DOT");
  dot_cmd->add_option("file", file, "FOONv1/FOONv1-U file or KB name")->required();
  dot_cmd->add_option("-o,--output", out, "Output file (default stdout)");

  std::string subgraph;
  double noise = 0, fps = 30;
  auto* sim_cmd = app.add_subcommand("simulate", "Synthesize a detection stream (JSON Lines) for a subgraph");
  sim_cmd->add_option("--subgraph", subgraph, "FOONv1 file or KB name")->required();
  sim_cmd->add_option("--noise", noise, "Centroid jitter sigma (normalized)")->capture_default_str();
  sim_cmd->add_option("--fps", fps, "Frame rate")->capture_default_str();
  sim_cmd->add_option("-o,--output", out, "Output file (default stdout)");

  recognition::RecognizerConfig rc;
  std::string foon, stream;
  bool segments = false;
  auto* rec_cmd = app.add_subcommand("recognize", "Recognize functional units in a detection stream");
  rec_cmd->add_option("--foon", foon, "FOONv1 file or KB name")->required();
  rec_cmd->add_option("--stream", stream, "Detection stream (JSON Lines, '-' for stdin)")->required();
  rec_cmd->add_flag("--segments", segments, "Print grasp/transport/release segments instead of units");
  rec_cmd->add_option("-o,--output", out, "Output file (default stdout)");
  add_recognizer_flags(rec_cmd, rc);

  PublishFlags pf;
  auto* pub_cmd = app.add_subcommand("publish", "Map recognized units to Task/Resource entities and publish them");
  pub_cmd->add_option("--units", pf.units, "Recognized units JSON ('-' for stdin)")->required();
  pub_cmd->add_option("--foon", pf.foon, "FOONv1 file or KB name (default: each unit's subgraph)");
  pub_cmd->add_option("--broker", g_opts.broker_url, "Broker base URL");
  pub_cmd->add_option("--run-id", pf.run_id, "Run identifier used in entity URNs")->capture_default_str();
  pub_cmd->add_option("--epoch", pf.epoch, "Wall-clock time of stream t=0 (default now)");
  pub_cmd->add_option("--retries", pf.retries, "Retries per request")->capture_default_str();
  pub_cmd->add_option("--timeout", pf.timeout, "Request timeout in seconds")->capture_default_str();
  pub_cmd->add_option("--token", pf.token, "Static bearer token");
  pub_cmd->add_flag("--batch", pf.batch, "Use the batch upsert endpoint");
  pub_cmd->add_flag("--inputs", pf.inputs, "Map input objects instead of output objects");

  std::string run_id;
  auto* rt_cmd = app.add_subcommand("roundtrip", "simulate -> recognize -> publish -> verify against a broker");
  rt_cmd->add_option("--subgraph", subgraph, "FOONv1 file or KB name")->required();
  rt_cmd->add_option("--noise", noise, "Centroid jitter sigma (normalized)")->capture_default_str();
  rt_cmd->add_option("--fps", fps, "Frame rate")->capture_default_str();
  rt_cmd->add_option("--broker", g_opts.broker_url, "Broker base URL (default: embedded simulator)");
  rt_cmd->add_option("--run-id", run_id, "Run identifier (default roundtrip-<seed>)");
  add_recognizer_flags(rt_cmd, rc);

  std::string host = "127.0.0.1";
  int port = 1026;
  auto* bs_cmd = app.add_subcommand("broker-sim", "Run the NGSI-LD broker simulator");
  bs_cmd->add_option("--port", port, "Port")->capture_default_str();
  bs_cmd->add_option("--host", host, "Bind address")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate_cmd) return cmd_validate(file);
    if (*merge_cmd) return cmd_merge(files, out);
    if (*dot_cmd) return cmd_dot(file, out);
    if (*sim_cmd) return cmd_simulate(subgraph, noise, fps, out);
    if (*rec_cmd) return cmd_recognize(foon, stream, rc, segments, out);
    if (*pub_cmd) return cmd_publish(pf);
    if (*rt_cmd) return cmd_roundtrip(subgraph, noise, fps, run_id, rc);
    if (*bs_cmd) return cmd_broker_sim(host, port);
  } catch (const IoError& e) {
    log("error", e.what());
    return kUsage;
  } catch (const CLI::ValidationError& e) {
    log("error", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    log("error", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    log("error", e.what());
    return kDomainFailure;
  }
  return kUsage;
}
