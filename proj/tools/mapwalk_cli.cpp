// mapwalk: analyze | simulate | verify | example
//
// Exit codes: 0 all checks pass, 1 statistical failure, 2 structural
// inconsistency or exact-check failure, 3 input or resource error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mapwalk/mapwalk.hpp"

namespace {

using namespace mapwalk;

enum Exit : int { kOk = 0, kStatistical = 1, kStructural = 2, kInput = 3 };

struct Options {
  std::string law_file;
  std::string config_file;
  std::string out_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<double> alpha;
  std::optional<long long> k_min, k_max, k;
  std::optional<std::size_t> window;
  bool no_timestamp = false;
  bool json = false;
  bool text = false;
};

void add_common(CLI::App* cmd, Options& o, bool simulation) {
  cmd->add_option("--law", o.law_file, "mapping-law JSON file");
  cmd->add_option("--out", o.out_file, "write the report here instead of stdout");
  cmd->add_flag("--no-timestamp", o.no_timestamp, "omit the timestamp field");
  auto* j = cmd->add_flag("--json", o.json, "JSON output (default)");
  auto* t = cmd->add_flag("--text", o.text, "text rendering of the JSON report");
  j->excludes(t);
  if (!simulation) return;
  cmd->add_option("--config", o.config_file, "simulation config JSON");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--replications", o.replications, "independent paths");
  cmd->add_option("--alpha", o.alpha, "significance level");
  cmd->add_option("--k-min", o.k_min, "first time of the window");
  cmd->add_option("--k-max", o.k_max, "last time of the window");
  cmd->add_option("--k", o.k, "observation time");
  cmd->add_option("--window", o.window, "width of the N-window");
}

// Config file first, command-line flags override it.
SimulationRequest build_request(const Options& o) {
  SimulationRequest req;
  if (!o.config_file.empty()) {
    req = simulation_request_from_json(detail::parse_json_text(detail::read_file(o.config_file), o.config_file),
                                       o.config_file);
  }
  if (!o.law_file.empty()) req.law_file = o.law_file;
  auto& c = req.config;
  if (o.seed) c.seed = *o.seed;
  if (o.replications) c.replications = *o.replications;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.k_min) c.k_min = *o.k_min;
  if (o.k_max) c.k_max = *o.k_max;
  if (o.k) c.k = *o.k;
  if (o.window) c.window = *o.window;
  if (!o.k && (c.k < c.k_min || c.k > c.k_max)) c.k = c.k_max;
  validate(c);
  return req;
}

MappingLaw law_for(const std::string& file) {
  if (file.empty()) throw InputError("--law is required");
  return load_law(file);
}

int status_of(const VerificationReport& r) {
  if (!r.exact_ok()) return kStructural;
  if (!r.statistical_ok()) return kStatistical;
  return kOk;
}

Json simulation_section(const Analysis& a, const SimulationRequest& req, VerificationReport& out) {
  const SimulationModel model(a);
  Json sim = {{"mode", req.mode}, {"config", config_json(req.config)}};
  if (req.mode == "nonstationary") {
    const auto& fam = *req.family;
    // Validates the family against the structure before sampling.
    family_law(a.S, a.rees, a.cliques, a.limits, fam, 0);
    Json c = Json::array(), lw = Json::array();
    for (std::size_t i = 0; i < fam.c.size(); ++i) {
      c.push_back(to_string(fam.c[i]));
      lw.push_back(detail::tuple_measure_json(fam.lambda_W[i]));
    }
    sim["family"] = {{"c", c}, {"Lambda_W", lw}};
    Json expected = Json::array();
    for (std::size_t j = 0; j < a.rees.p; ++j) {
      Json row = Json::array();
      for (const auto& w : a.cliques.W) {
        row.push_back(to_string(fam.c[j] == 0 ? Rational(0) : fam.c[j] * fam.lambda_W[j].weight(w)));
      }
      expected.push_back(row);
    }
    sim["Y_C_Z_W_expected"] = expected;
    out = verify_nonstationary(model, fam, req.config);
  } else {
    const auto lambda_w = req.lambda_W ? *req.lambda_W : uniform_on_W(a.cliques);
    sim["Lambda_W"] = detail::tuple_measure_json(lambda_w);
    out = verify_third_noise(model, lambda_w, req.config);
  }
  sim["verification"] = verification_json(out);
  return sim;
}

// Mixing trend, T^e tail and, on the worked example, the mono-particle events.
Json extras_section(const Analysis& a, const SimulationRequest& req, VerificationReport& gate) {
  const SimulationModel model(a);
  const auto& cfg = req.config;
  Json extra;
  const std::size_t e = a.rees.e;
  const auto trend = mixing_trend(model, e, e, {5, 20, 50}, cfg.replications, cfg.seed, cfg.alpha);
  Json rows = Json::array();
  for (const auto& c : trend.checks) rows.push_back(check_json(c));
  extra["mixing_trend"] = {{"f", a.S[e].to_string()}, {"h", a.S[e].to_string()}, {"entries", rows},
                           {"note", "informational: finite n need not be mixed yet"}};

  const auto lambda_w = req.lambda_W ? *req.lambda_W : uniform_on_W(a.cliques);
  const std::size_t max_t = 50;
  const auto tail = te_tail(model, lambda_w, cfg, max_t);
  Json word = Json::array();
  for (std::size_t f : witness_word(model)) word.push_back(model.map(f).to_string());
  Json exceed = Json::array();
  for (std::size_t t = 0; t <= max_t; ++t) {
    exceed.push_back(static_cast<double>(tail.exceed[t]) / static_cast<double>(tail.replications));
  }
  extra["Te_tail"] = {{"witness_word", word},
                      {"P(k - T^e_k > t)", exceed},
                      {"unobserved", tail.unobserved},
                      {"replications", tail.replications}};

  if (a.law == example_law()) {
    const auto mono = verify_mono_projection(model, cfg);
    extra["mono_projection"] = verification_json(mono);
    gate.append(mono);
  }
  return extra;
}

void emit(const Json& report, const Options& o) {
  const std::string body = o.text ? render_text(report) : report.dump(2) + "\n";
  if (o.out_file.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(o.out_file, std::ios::binary);
  if (!out) throw InputError("cannot write " + o.out_file);
  out << body;
}

int run(const std::string& command, const Options& o) {
  if (command == "analyze") {
    const auto a = analyze(law_for(o.law_file));
    Json report = analysis_json(a);
    stamp(report, std::nullopt, !o.no_timestamp);
    emit(report, o);
    return kOk;
  }
  auto req = build_request(o);
  const MappingLaw law = command == "example" ? example_law() : law_for(req.law_file);
  const auto a = analyze(law);
  Json report = analysis_json(a);
  VerificationReport gate;
  report["simulation"] = simulation_section(a, req, gate);
  if (command == "verify" || command == "example") {
    report["verification_extras"] = extras_section(a, req, gate);
  }
  stamp(report, req.config.seed, !o.no_timestamp);
  emit(report, o);
  return status_of(gate);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact limit structure and seeded simulation of random mapping compositions"};
  app.require_subcommand(1);
  Options o;
  add_common(app.add_subcommand("analyze", "structural report for a mapping law"), o, false);
  add_common(app.add_subcommand("simulate", "analyze, then simulate and run the checks"), o, true);
  add_common(app.add_subcommand("verify", "simulate plus mixing trend and T^e tail"), o, true);
  add_common(app.add_subcommand("example", "the built-in two-map example with a fixed seed"), o, true);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, o);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kInput;
  } catch (const ClassificationError& e) {
    std::cerr << "classification error: " << e.what() << "\n" << e.residual();
    return kStructural;
  } catch (const StructuralError& e) {
    std::cerr << "structural inconsistency: " << e.what() << "\n";
    return kStructural;
  }
}
