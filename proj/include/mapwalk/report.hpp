#pragma once

// Law and config file parsing, JSON reports, and the text rendering of a
// report. The text form is produced from the JSON only.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mapwalk/analysis.hpp"
#include "mapwalk/errors.hpp"
#include "mapwalk/simulate.hpp"

namespace mapwalk {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses JSON text; syntax errors carry the line and column.
inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& err) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < err.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline const Json& field(const Json& obj, const char* name, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  auto it = obj.find(name);
  if (it == obj.end()) throw InputError(where + ": missing field \"" + name + "\"");
  return *it;
}

inline Rational rational_field(const Json& v, const std::string& where) {
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  if (v.is_number_integer()) return Rational(v.get<long long>());
  throw InputError(where + ": expected a rational string such as \"1/2\"");
}

template <class M>
Json measure_json(const Semigroup& s, const M& m) {
  Json out = Json::object();
  for (const auto& [z, w] : m) out[s[z].to_string()] = to_string(w);
  return out;
}

inline Json tuple_measure_json(const TupleMeasure& m) {
  Json out = Json::object();
  for (const auto& [x, w] : m) out[x.to_string()] = to_string(w);
  return out;
}

inline Json elements_json(const Semigroup& s, const std::vector<std::size_t>& idx) {
  Json out = Json::array();
  for (std::size_t i : idx) out.push_back(s[i].to_string());
  return out;
}

inline Json local_g_json(const Semigroup& s, const ReesData& rd, const std::vector<std::size_t>& local) {
  Json out = Json::array();
  for (std::size_t g : local) out.push_back(s[rd.G[g]].to_string());
  return out;
}

inline Json one_based(std::span<const Point> pts) {
  Json out = Json::array();
  for (Point p : pts) out.push_back(p + 1);
  return out;
}

}  // namespace detail

// {"n": 5, "generators": [[2,3,4,1,5], ...], "weights": ["1/2", ...]}
inline MappingLaw law_from_json(const Json& j, const std::string& origin = "law") {
  const Json& jn = detail::field(j, "n", origin);
  if (!jn.is_number_integer() || jn.get<long long>() < 1) throw InputError(origin + ".n: expected a positive integer");
  const auto n = jn.get<std::size_t>();
  const Json& jg = detail::field(j, "generators", origin);
  const Json& jw = detail::field(j, "weights", origin);
  if (!jg.is_array() || jg.empty()) throw InputError(origin + ".generators: expected a nonempty array");
  if (!jw.is_array()) throw InputError(origin + ".weights: expected an array");
  if (jg.size() != jw.size()) {
    throw InputError(origin + ": " + std::to_string(jg.size()) + " generators but " + std::to_string(jw.size()) +
                     " weights");
  }
  std::vector<Transformation> maps;
  std::vector<Rational> weights;
  for (std::size_t i = 0; i < jg.size(); ++i) {
    const std::string where = origin + ".generators[" + std::to_string(i) + "]";
    std::vector<long long> img;
    if (jg[i].is_string()) {
      try {
        maps.push_back(Transformation::parse(jg[i].get<std::string>()));
      } catch (const InputError& e) {
        throw InputError(where + ": " + e.what());
      }
    } else if (jg[i].is_array()) {
      for (std::size_t t = 0; t < jg[i].size(); ++t) {
        const Json& v = jg[i][t];
        if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > static_cast<long long>(n)) {
          throw InputError(where + "[" + std::to_string(t) + "]: expected an integer in 1.." + std::to_string(n));
        }
        img.push_back(v.get<long long>());
      }
      try {
        maps.push_back(Transformation::from_one_based(img));
      } catch (const InputError& e) {
        throw InputError(where + ": " + e.what());
      }
    } else {
      throw InputError(where + ": expected an image list");
    }
    if (maps.back().size() != n) {
      throw InputError(where + ": has " + std::to_string(maps.back().size()) + " images, n = " + std::to_string(n));
    }
    weights.push_back(detail::rational_field(jw[i], origin + ".weights[" + std::to_string(i) + "]"));
  }
  try {
    return MappingLaw(maps, weights);
  } catch (const InputError& e) {
    throw InputError(origin + ".weights: " + e.what());
  }
}

inline MappingLaw load_law(const std::string& path) {
  return law_from_json(detail::parse_json_text(detail::read_file(path), path), path);
}

inline Json law_to_json(const MappingLaw& law) {
  Json gens = Json::array();
  Json ws = Json::array();
  const auto w = law.weights();
  const auto maps = law.support();
  for (std::size_t i = 0; i < maps.size(); ++i) {
    Json img = Json::array();
    for (Point p : maps[i].images()) img.push_back(p + 1);
    gens.push_back(img);
    ws.push_back(to_string(w[i]));
  }
  return Json{{"n", law.degree()}, {"generators", gens}, {"weights", ws}};
}

// {"(2,4,5)": "1/2", ...}
inline TupleMeasure tuple_measure_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object of tuple -> rational");
  TupleMeasure out;
  for (const auto& [key, value] : j.items()) {
    Tuple x;
    try {
      x = Tuple::parse(key);
    } catch (const InputError& e) {
      throw InputError(where + "." + key + ": " + e.what());
    }
    const Rational q = detail::rational_field(value, where + "." + key);
    if (q < 0) throw InputError(where + "." + key + ": negative mass");
    out.add(x, q);
  }
  return out;
}

// The uniform law on W, used when no Lambda_W is given.
inline TupleMeasure uniform_on_W(const CliqueData& cd) {
  TupleMeasure out;
  const Rational q(1, static_cast<long long>(cd.W.size()));
  for (const auto& w : cd.W) out.add(w, q);
  return out;
}

struct SimulationRequest {
  std::string law_file;
  std::string mode = "stationary";
  std::optional<TupleMeasure> lambda_W;
  std::optional<InvariantFamily> family;
  SimulationConfig config;
};

// {law_file, mode, Lambda_W | family, k_min, k_max, replications, seed, alpha, window}
inline SimulationRequest simulation_request_from_json(const Json& j, const std::string& origin = "config") {
  if (!j.is_object()) throw InputError(origin + ": expected an object");
  SimulationRequest req;
  auto integer = [&](const char* name, auto& target) {
    if (!j.contains(name)) return;
    const Json& v = j.at(name);
    if (!v.is_number_integer()) throw InputError(origin + "." + name + ": expected an integer");
    target = v.get<std::remove_reference_t<decltype(target)>>();
  };
  if (j.contains("law_file")) {
    if (!j.at("law_file").is_string()) throw InputError(origin + ".law_file: expected a string");
    req.law_file = j.at("law_file").get<std::string>();
  }
  if (j.contains("mode")) {
    if (!j.at("mode").is_string()) throw InputError(origin + ".mode: expected a string");
    req.mode = j.at("mode").get<std::string>();
    if (req.mode != "stationary" && req.mode != "nonstationary") {
      throw InputError(origin + ".mode: expected \"stationary\" or \"nonstationary\"");
    }
  }
  if (j.contains("replications")) {
    const Json& v = j.at("replications");
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw InputError(origin + ".replications: expected a nonnegative integer");
    }
    req.config.replications = v.get<std::size_t>();
  }
  integer("k_min", req.config.k_min);
  integer("k_max", req.config.k_max);
  integer("k", req.config.k);
  integer("window", req.config.window);
  integer("seed", req.config.seed);
  if (j.contains("alpha")) {
    if (!j.at("alpha").is_number()) throw InputError(origin + ".alpha: expected a number");
    req.config.alpha = j.at("alpha").get<double>();
  }
  if (j.contains("Lambda_W")) req.lambda_W = tuple_measure_from_json(j.at("Lambda_W"), origin + ".Lambda_W");
  if (j.contains("family")) {
    const std::string where = origin + ".family";
    const Json& f = j.at("family");
    const Json& c = detail::field(f, "c", where);
    const Json& lw = detail::field(f, "Lambda_W", where);
    if (!c.is_array() || !lw.is_array() || c.size() != lw.size()) {
      throw InputError(where + ": c and Lambda_W must be arrays of equal length");
    }
    InvariantFamily fam;
    for (std::size_t i = 0; i < c.size(); ++i) {
      fam.c.push_back(detail::rational_field(c[i], where + ".c[" + std::to_string(i) + "]"));
      fam.lambda_W.push_back(tuple_measure_from_json(lw[i], where + ".Lambda_W[" + std::to_string(i) + "]"));
    }
    req.family = std::move(fam);
  }
  if (req.mode == "nonstationary" && !req.family) throw InputError(origin + ": nonstationary mode needs a family");
  return req;
}

// Structural sections of the report.
inline Json analysis_json(const Analysis& a, std::size_t projection_limit = 24) {
  const auto& s = a.S;
  const auto& rd = a.rees;
  const auto& cd = a.cliques;
  const auto& lim = a.limits;
  Json j;
  j["input"] = law_to_json(a.law);

  Json all = Json::array();
  for (const auto& t : s.elements()) all.push_back(t.to_string());
  j["semigroup"] = {{"size", s.size()},
                    {"kernel_size", a.K.size()},
                    {"m_mu", a.K.min_rank},
                    {"elements", all},
                    {"kernel", detail::elements_json(s, a.K.elements)}};

  std::vector<std::size_t> local_all(rd.G.size());
  for (std::size_t i = 0; i < local_all.size(); ++i) local_all[i] = i;
  j["rees"] = {{"e", s[rd.e].to_string()},
               {"L", detail::elements_json(s, rd.L)},
               {"G", detail::elements_json(s, rd.G)},
               {"R", detail::elements_json(s, rd.R)},
               {"H", detail::local_g_json(s, rd, rd.H)},
               {"gamma", s[rd.G[rd.gamma]].to_string()},
               {"p", rd.p},
               {"C", detail::local_g_json(s, rd, rd.C)},
               {"H_equals_G", rd.H.size() == rd.G.size()}};

  Json cycle = Json::array();
  for (const auto& c : lim.cycle) cycle.push_back(detail::measure_json(s, c));
  j["limits"] = {{"p", lim.p},
                 {"eta_L", detail::measure_json(s, lim.eta_L)},
                 {"eta_R", detail::measure_json(s, lim.eta_R)},
                 {"H", detail::local_g_json(s, rd, rd.H)},
                 {"gamma", s[rd.G[rd.gamma]].to_string()},
                 {"eta", detail::measure_json(s, lim.eta)},
                 {"nu", detail::measure_json(s, lim.nu)},
                 {"eta_equals_nu", lim.eta == lim.nu},
                 {"cycle", cycle}};

  Json cliques = Json::array();
  for (const auto& c : cd.cliques) cliques.push_back(detail::one_based(c));
  Json W = Json::array();
  for (const auto& w : cd.W) W.push_back(detail::one_based(w.points()));
  Json proj = Json::array();
  for (std::size_t i = 0; i < cd.W_mu.size() && i < projection_limit; ++i) {
    const auto f = project_tuple(cd, cd.W_mu[i]);
    proj.push_back({{"x", cd.W_mu[i].to_string()},
                    {"L", s[rd.L[f.l]].to_string()},
                    {"G", s[rd.G[f.g]].to_string()},
                    {"W", cd.W[f.w].to_string()}});
  }
  j["cliques"] = {{"m_mu", cd.m_mu},
                  {"f_cliques", cliques},
                  {"W_mu_size", cd.W_mu.size()},
                  {"W", W},
                  {"example_projections", proj}};

  const auto lambda_w = uniform_on_W(cd);
  const auto lambda = invariant_law(s, a.mu, rd, cd, lim, lambda_w);
  Json marginal = Json::array();
  for (const auto& q : coordinate_marginal(lambda, 0, s.degree())) marginal.push_back(to_string(q));
  j["invariant_law"] = {{"Lambda_W", detail::tuple_measure_json(lambda_w)},
                        {"Lambda", detail::tuple_measure_json(lambda)},
                        {"first_marginal", marginal}};
  return j;
}

inline Json check_json(const Check& c) {
  Json j = {{"name", c.name}, {"kind", c.kind}, {"pass", c.pass}, {"replications", c.replications},
            {"seed", c.seed}};
  if (c.kind == "statistical") {
    j["statistic"] = c.statistic;
    j["df"] = c.df;
    j["p_value"] = c.p_value;
    j["alpha"] = c.threshold;
  }
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline Json verification_json(const VerificationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  Json out = {{"exact_ok", r.exact_ok()}, {"statistical_ok", r.statistical_ok()}, {"checks", checks}};
  if (!r.phase_table.empty()) out["Y_C_Z_W_counts"] = r.phase_table;
  return out;
}

inline Json config_json(const SimulationConfig& c) {
  return {{"replications", c.replications}, {"k_min", c.k_min}, {"k_max", c.k_max}, {"k", c.k},
          {"window", c.window},             {"seed", c.seed},   {"alpha", c.alpha}};
}

inline std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Adds tool version, seed and (optionally) a timestamp to a report.
inline void stamp(Json& report, std::optional<std::uint64_t> seed, bool timestamp) {
  report["tool_version"] = kToolVersion;
  if (seed) report["seed"] = *seed;
  if (timestamp) report["timestamp"] = utc_timestamp();
}

namespace detail {

inline std::string scalar(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void render(std::ostream& os, const std::string& key, const Json& v, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (v.is_object()) {
    if (!key.empty()) os << pad << key << ":\n";
    const int inner = key.empty() ? depth : depth + 1;
    for (const auto& [k, x] : v.items()) render(os, k, x, inner);
    return;
  }
  if (v.is_array()) {
    const bool flat = std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_primitive(); });
    if (flat) {
      os << pad << key << ": [";
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << scalar(v[i]);
      os << "]\n";
      return;
    }
    os << pad << key << ":\n";
    for (std::size_t i = 0; i < v.size(); ++i) render(os, "- " + std::to_string(i), v[i], depth + 1);
    return;
  }
  os << pad << key << ": " << scalar(v) << "\n";
}

}  // namespace detail

inline std::string render_text(const Json& report) {
  std::ostringstream os;
  detail::render(os, "", report, 0);
  return os.str();
}

}  // namespace mapwalk
