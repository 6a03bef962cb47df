#include "bellquad/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "bellquad/chsh.hpp"
#include "bellquad/errors.hpp"
#include "bellquad/feasibility_oracle.hpp"
#include "bellquad/quantum_model.hpp"

namespace bellquad::cli {
namespace {

using Path = std::vector<std::string>;

// Raw text of one input document, kept so that field errors can point at a line.
struct Source {
  std::string_view name;
  const std::string& text;
};

std::string dotted(const Path& path) {
  std::string out;
  for (const auto& key : path) {
    if (!out.empty() && key.front() != '[') out += '.';
    out += key;
  }
  return out;
}

// Best effort: follow the quoted keys of `path` through the text in order.
int locate(const Source& src, const Path& path) {
  std::size_t pos = 0;
  bool found = false;
  for (const auto& key : path) {
    if (key.front() == '[') continue;
    const auto hit = src.text.find('"' + key + '"', pos);
    if (hit == std::string::npos) break;
    pos = hit;
    found = true;
  }
  if (!found) return 0;
  return 1 + static_cast<int>(std::count(src.text.begin(), src.text.begin() + static_cast<long>(pos), '\n'));
}

std::string where(const Source& src, const Path& path) {
  std::string out = std::string(src.name);
  if (!path.empty()) out += " field '" + dotted(path) + "'";
  if (const int line = locate(src, path); line > 0) out += " (line " + std::to_string(line) + ")";
  return out + ": ";
}

[[noreturn]] void fail(const Source& src, const Path& path, const std::string& message) {
  throw ValidationError(where(src, path) + message);
}

// Runs f, prefixing any library error with the field it came from.
template <class F>
auto at_field(const Source& src, const Path& path, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(where(src, path) + e.what());
  } catch (const InconsistencyError& e) {
    throw InconsistencyError(where(src, path) + e.what());
  }
}

Path child(Path path, const std::string& key) {
  path.push_back(key);
  return path;
}

const Json& member(const Source& src, const Json& obj, const Path& path, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(src, child(path, key), "missing");
  return *it;
}

void require_object(const Source& src, const Json& j, const Path& path,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(src, path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) fail(src, child(path, key), "unknown field");
  }
}

double number(const Source& src, const Json& j, const Path& path) {
  if (!j.is_number()) fail(src, path, "expected a number");
  return j.get<double>();
}

Complex complex_number(const Source& src, const Json& j, const Path& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) fail(src, path, "expected a number or a [re, im] pair");
  return {number(src, j[0], child(path, "[0]")), number(src, j[1], child(path, "[1]"))};
}

Json parse_document(const Source& src) {
  try {
    return Json::parse(src.text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string(src.name) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Input model

DensityMatrix parse_state(const Source& src, const Json& j, const Path& path) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "singlet") return DensityMatrix::singlet();
    if (name == "mixed" || name == "maximally_mixed") return DensityMatrix::maximally_mixed();
    if (name == "ket:00" || name == "product_00") return DensityMatrix::product_00();
    if (name.rfind("werner:", 0) == 0) {
      double p = 0;
      std::istringstream in(name.substr(7));
      in.imbue(std::locale::classic());
      if (!(in >> p) || !in.eof()) fail(src, path, "bad Werner weight in '" + name + "'");
      return at_field(src, path, [&] { return DensityMatrix::werner(p); });
    }
    fail(src, path, "unknown state '" + name + "'");
  }
  require_object(src, j, path, {"ket", "matrix"});
  if (j.contains("ket") == j.contains("matrix")) fail(src, path, "give exactly one of 'ket' or 'matrix'");
  if (j.contains("ket")) {
    const Path kp = child(path, "ket");
    const Json& k = j["ket"];
    if (!k.is_array() || k.size() != 4) fail(src, kp, "expected 4 amplitudes");
    Ket4 ket{};
    for (int i = 0; i < 4; ++i) ket[i] = complex_number(src, k[i], child(kp, "[" + std::to_string(i) + "]"));
    return at_field(src, kp, [&] { return DensityMatrix::pure(ket); });
  }
  const Path mp = child(path, "matrix");
  const Json& m = j["matrix"];
  if (!m.is_array() || m.size() != 4) fail(src, mp, "expected 4 rows");
  Matrix4 rho{};
  for (int r = 0; r < 4; ++r) {
    const Path rp = child(mp, "[" + std::to_string(r) + "]");
    if (!m[r].is_array() || m[r].size() != 4) fail(src, rp, "expected 4 entries");
    for (int c = 0; c < 4; ++c) rho[r][c] = complex_number(src, m[r][c], child(rp, "[" + std::to_string(c) + "]"));
  }
  return at_field(src, mp, [&] { return DensityMatrix(rho); });
}

UnitVector parse_direction(const Source& src, const Json& j, const Path& path) {
  if (!j.is_array() || j.size() != 3) fail(src, path, "expected [x, y, z]");
  const double x = number(src, j[0], path), y = number(src, j[1], path), z = number(src, j[2], path);
  return at_field(src, path, [&] { return UnitVector(x, y, z); });
}

AnalyzerSettings parse_settings(const Source& src, const Json& j, const Path& path) {
  require_object(src, j, path, {"A", "A'", "B", "B'"});
  auto dir = [&](const char* key) { return parse_direction(src, member(src, j, path, key), child(path, key)); };
  return {dir("A"), dir("A'"), dir("B"), dir("B'")};
}

// The measured probabilities, with P(A'B') absent in three-experiment data.
struct MeasuredProbs {
  Singles singles;
  double ab = 0, ab_prime = 0, a_prime_b = 0;
  std::optional<double> a_prime_b_prime;
  bool from_state = false;
};

MeasuredProbs parse_probabilities(const Source& src, const Json& j, const Path& path) {
  require_object(src, j, path, {"singles", "doubles"});
  const Path sp = child(path, "singles");
  const Json& s = member(src, j, path, "singles");
  require_object(src, s, sp, {"A", "A'", "B", "B'"});
  const Path dp = child(path, "doubles");
  const Json& d = member(src, j, path, "doubles");
  require_object(src, d, dp, {"AB", "AB'", "A'B", "A'B'"});
  auto get = [&](const Json& obj, const Path& p, const char* key) {
    return number(src, member(src, obj, p, key), child(p, key));
  };
  MeasuredProbs m;
  m.singles = {get(s, sp, "A"), get(s, sp, "A'"), get(s, sp, "B"), get(s, sp, "B'")};
  m.ab = get(d, dp, "AB");
  m.ab_prime = get(d, dp, "AB'");
  m.a_prime_b = get(d, dp, "A'B");
  if (d.contains("A'B'")) m.a_prime_b_prime = get(d, dp, "A'B'");
  return m;
}

FamilyParams parse_params(const Source& src, const Json& j, const Path& path) {
  require_object(src, j, path, {"dotdot", "a_plus", "aprime_plus", "bb", "aprime_bprime"});
  FamilyParams p;
  auto opt = [&](const char* key, double& out) {
    if (j.contains(key)) out = number(src, j[key], child(path, key));
  };
  opt("dotdot", p.t_dotdot);
  opt("a_plus", p.t_a_plus);
  opt("aprime_plus", p.t_a_prime_plus);
  if (j.contains("bb")) {
    const Path bp = child(path, "bb");
    const Json& bb = j["bb"];
    if (!bb.is_array() || bb.size() != 4) fail(src, bp, "expected 4 numbers");
    for (int i = 0; i < 4; ++i) p.t_bb[i] = number(src, bb[i], child(bp, "[" + std::to_string(i) + "]"));
  }
  if (j.contains("aprime_bprime")) p.t_a_prime_b_prime = number(src, j["aprime_bprime"], child(path, "aprime_bprime"));
  at_field(src, path, [&] {
    p.validate();
    return 0;
  });
  return p;
}

struct Input {
  std::optional<DensityMatrix> state;
  std::optional<AnalyzerSettings> settings;
  std::optional<MeasuredProbs> measured;
  FamilyParams params;
};

Input parse_input(const std::string& text, const std::optional<std::string>& params_text) {
  const Source src{"input", text};
  const Json doc = parse_document(src);
  require_object(src, doc, {}, {"description", "state", "settings", "probabilities", "params"});
  Input in;
  if (doc.contains("state")) in.state = parse_state(src, doc["state"], {"state"});
  if (doc.contains("settings")) in.settings = parse_settings(src, doc["settings"], {"settings"});
  if (doc.contains("probabilities"))
    in.measured = parse_probabilities(src, doc["probabilities"], {"probabilities"});
  if (params_text) {
    const Source psrc{"params", *params_text};
    in.params = parse_params(psrc, parse_document(psrc), {});
  } else if (doc.contains("params")) {
    in.params = parse_params(src, doc["params"], {"params"});
  }
  return in;
}

const char* kNeedsProbs = "input needs 'probabilities', or 'state' together with 'settings'";

MeasuredProbs measured_of(const Input& in, const std::string& text) {
  if (in.measured) return *in.measured;
  if (!in.state || !in.settings) throw ValidationError(std::string("input: ") + kNeedsProbs);
  const Source src{"input", text};
  const ExperimentalProbs p =
      at_field(src, {"state"}, [&] { return experimental_probs(*in.state, *in.settings); });
  MeasuredProbs m;
  m.singles = p.singles();
  m.ab = p.doubles().ab;
  m.ab_prime = p.doubles().ab_prime;
  m.a_prime_b = p.doubles().a_prime_b;
  m.a_prime_b_prime = p.doubles().a_prime_b_prime;
  m.from_state = true;
  return m;
}

ExperimentalProbs four_experiments(const MeasuredProbs& m, const std::string& text) {
  const Source src{"input", text};
  if (!m.a_prime_b_prime) fail(src, {"probabilities", "doubles", "A'B'"}, "required for four experiments");
  return at_field(src, {"probabilities"}, [&] {
    return ExperimentalProbs(m.singles, {m.ab, m.ab_prime, m.a_prime_b, *m.a_prime_b_prime});
  });
}

ThreeExperimentProbs three_experiments(const MeasuredProbs& m, const std::string& text) {
  const Source src{"input", text};
  return at_field(src, {"probabilities"},
                  [&] { return ThreeExperimentProbs(m.singles, m.ab, m.ab_prime, m.a_prime_b); });
}

// ---------------------------------------------------------------------------
// Report fragments

constexpr const char* kExperimentNames[4] = {"AB", "AB'", "A'B", "A'B'"};
constexpr Setting kExpA[4] = {Setting::unprimed, Setting::unprimed, Setting::primed, Setting::primed};
constexpr Setting kExpB[4] = {Setting::unprimed, Setting::primed, Setting::unprimed, Setting::primed};

Json probs_json(const MeasuredProbs& m) {
  Json d{{"AB", m.ab}, {"AB'", m.ab_prime}, {"A'B", m.a_prime_b}};
  if (m.a_prime_b_prime) d["A'B'"] = *m.a_prime_b_prime;
  return {{"singles", {{"A", m.singles.a}, {"A'", m.singles.a_prime}, {"B", m.singles.b}, {"B'", m.singles.b_prime}}},
          {"doubles", d}};
}

Json probs_json(const ExperimentalProbs& p) {
  MeasuredProbs m;
  m.singles = p.singles();
  m.ab = p.doubles().ab;
  m.ab_prime = p.doubles().ab_prime;
  m.a_prime_b = p.doubles().a_prime_b;
  m.a_prime_b_prime = p.doubles().a_prime_b_prime;
  return probs_json(m);
}

Json correlations_json(const CorrelationSet& c) {
  return {{"AB", c.ab}, {"AB'", c.ab_prime}, {"A'B", c.a_prime_b}, {"A'B'", c.a_prime_b_prime}};
}

Json chsh_json(const ChshReport& r) {
  Json variants = Json::array();
  Json inequalities = Json::array();
  for (CVariant v : kCVariants) {
    const int i = static_cast<int>(v);
    const std::string name = variant_name(v);
    variants.push_back({{"variant", name}, {"C", r.c_values[i]}, {"S", r.s_values[i]}});
    inequalities.push_back({{"inequality", "0 <= C(" + name + ")"}, {"slack", r.lower_slack(v)}});
    inequalities.push_back({{"inequality", "C(" + name + ") <= 1"}, {"slack", r.upper_slack(v)}});
  }
  return {{"satisfied", r.satisfied}, {"boundary", r.boundary}, {"margin", r.margin},
          {"max_s", r.max_s()},      {"variants", variants},    {"inequalities", inequalities}};
}

Json interval_json(const Interval& i) { return Json::array({i.lo, i.hi}); }

Json parameter_json(const char* name, double t, const Interval& interval, double value) {
  return {{"name", name}, {"t", t}, {"interval", interval_json(interval)}, {"value", value}};
}

Json distribution_json(const QuadDistribution& q) {
  Json out = Json::object();
  for (int i = 0; i < 16; ++i) out[QuadDistribution::label(i)] = q[i];
  return out;
}

std::string pattern_for(int experiment, Sign x, Sign y) {
  std::string p = "....";
  p[kExpA[experiment] == Setting::unprimed ? 0 : 1] = to_char(x);
  p[kExpB[experiment] == Setting::unprimed ? 2 : 3] = to_char(y);
  return p;
}

// Expected outcome tables of the measured experiments.
std::vector<PairOutcomeTable> measured_tables(const MeasuredProbs& m, int experiments) {
  const Singles& s = m.singles;
  std::vector<PairOutcomeTable> t{expand_pair(s.a, s.b, m.ab), expand_pair(s.a, s.b_prime, m.ab_prime),
                                  expand_pair(s.a_prime, s.b, m.a_prime_b)};
  if (experiments == 4) t.push_back(expand_pair(s.a_prime, s.b_prime, *m.a_prime_b_prime));
  return t;
}

Json marginal_check_json(const QuadDistribution& q, const MeasuredProbs& m, int experiments) {
  const auto tables = measured_tables(m, experiments);
  Json rows = Json::array();
  double worst = 0;
  for (int e = 0; e < experiments; ++e)
    for (Sign x : kSigns)
      for (Sign y : kSigns) {
        const double computed = q.marginal(pattern_for(e, x, y));
        const double expected = tables[e].at(x, y);
        worst = std::max(worst, std::abs(computed - expected));
        rows.push_back({{"experiment", kExperimentNames[e]},
                        {"outcome", std::string{to_char(x), to_char(y)}},
                        {"computed", computed},
                        {"expected", expected},
                        {"residual", computed - expected}});
      }
  return {{"max_abs_residual", worst}, {"marginals", rows}};
}

Json construction_json(const Construction& c, const FamilyParams& p) {
  static constexpr const char* kBbNames[4] = {"P(++++)", "P(+++-)", "P(++-+)", "P(++--)"};
  Json params = Json::array({parameter_json("P(..++)", p.t_dotdot, c.dotdot, c.p_dotdot),
                             parameter_json("P(+.++)", p.t_a_plus, c.a_plus, c.p_a_plus),
                             parameter_json("P(.+++)", p.t_a_prime_plus, c.a_prime_plus, c.p_a_prime_plus)});
  for (int k = 0; k < 4; ++k) params.push_back(parameter_json(kBbNames[k], p.t_bb[k], c.pp_bb[k], c.p_pp_bb[k]));

  Json triples = Json::object();
  for (Sign first : kSigns)
    for (Sign b : kSigns)
      for (Sign bp : kSigns) {
        const std::string tail{to_char(b), to_char(bp)};
        triples["P(" + std::string{to_char(first)} + "." + tail + ")"] = c.triples.p_a_dot(first, b, bp);
      }
  for (Sign first : kSigns)
    for (Sign b : kSigns)
      for (Sign bp : kSigns) {
        const std::string tail{to_char(b), to_char(bp)};
        triples["P(." + std::string{to_char(first)} + tail + ")"] = c.triples.p_dot_a_prime(first, b, bp);
      }
  return {{"parameters", params},
          {"triples", triples},
          {"distribution", distribution_json(c.distribution)},
          {"min_entry", c.distribution.min_entry()}};
}

// An explicit tolerance widens the construction's emptiness test to match the
// CHSH test. A lo > hi gap of up to that size then collapses to a midpoint,
// leaving entries down to -tolerance/2, so the clamp has to accept them too.
ConstructionOptions options_of(const RunConfig& cfg) {
  ConstructionOptions opt;
  if (cfg.tolerance) opt.slack = opt.positivity_tolerance = *cfg.tolerance;
  return opt;
}

double chsh_tolerance(const RunConfig& cfg) { return cfg.tolerance.value_or(kChshTolerance); }

// ---------------------------------------------------------------------------
// Commands

Json cmd_probs(const RunConfig& cfg, const Input& in, const std::string& text) {
  if (!in.state || !in.settings) throw ValidationError("input: probs mode needs 'state' and 'settings'");
  const MeasuredProbs m = measured_of(Input{in.state, in.settings, std::nullopt, {}}, text);
  const ExperimentalProbs p = four_experiments(m, text);
  return {{"probabilities", probs_json(p)},
          {"correlations", correlations_json(correlations_of(p))},
          {"chsh", chsh_json(chsh_probability_form(p, chsh_tolerance(cfg)))}};
}

Json cmd_chsh(const RunConfig& cfg, const Input& in, const std::string& text) {
  const ExperimentalProbs p = four_experiments(measured_of(in, text), text);
  const auto corrs = correlations_of(p);
  const auto corr_form = chsh_correlation_form(corrs, chsh_tolerance(cfg));
  const auto prob_form = chsh_probability_form(p, chsh_tolerance(cfg));
  return {{"probabilities", probs_json(p)},
          {"correlations", correlations_json(corrs)},
          {"correlation_form", {{"values", corr_form.values}, {"satisfied", corr_form.satisfied}}},
          {"probability_form", chsh_json(prob_form)},
          {"forms_agree", corr_form.satisfied == prob_form.satisfied}};
}

Json cmd_construct4(const RunConfig& cfg, const Input& in, const std::string& text) {
  const MeasuredProbs m = measured_of(in, text);
  const ExperimentalProbs p = four_experiments(m, text);
  const auto report = chsh_probability_form(p, options_of(cfg).slack);
  const Construction c = construct_4exp(p, in.params, options_of(cfg));
  Json out{{"experiments", 4}, {"probabilities", probs_json(p)}, {"chsh", chsh_json(report)}};
  out.update(construction_json(c, in.params));
  out["marginal_check"] = marginal_check_json(c.distribution, m, 4);
  return out;
}

Json cmd_construct3(const RunConfig& cfg, const Input& in, const std::string& text) {
  const MeasuredProbs m = measured_of(in, text);
  const ThreeExperimentProbs p = three_experiments(m, text);
  const auto r = construct_3exp(p, in.params, options_of(cfg));
  MeasuredProbs three = m;
  three.a_prime_b_prime.reset();
  Json out{{"experiments", 3}, {"probabilities", probs_json(three)}};
  Json chosen{{"t", in.params.t_a_prime_b_prime.value_or(0.5)},
              {"interval", interval_json(r.a_prime_b_prime)},
              {"value", r.p_a_prime_b_prime}};
  if (m.a_prime_b_prime) {
    const double q = *m.a_prime_b_prime;
    chosen[m.from_state ? "quantum_value" : "supplied_value"] = q;
    chosen["differs"] = std::abs(r.p_a_prime_b_prime - q) > 1e-6;
    chosen[m.from_state ? "quantum_value_admissible" : "supplied_value_admissible"] =
        r.a_prime_b_prime.contains(q, kIntervalSlack);
  }
  out["P(A'B')"] = chosen;
  out.update(construction_json(r.construction, in.params));
  out["marginal_check"] = marginal_check_json(r.construction.distribution, three, 3);
  return out;
}

Json cmd_oracle(const RunConfig& cfg, const Input& in, const std::string& text) {
  const ExperimentalProbs p = four_experiments(measured_of(in, text), text);
  const auto r = feasible(build_system(p), cfg.tolerance.value_or(kLpTolerance));
  const auto chsh = chsh_probability_form(p, chsh_tolerance(cfg));
  static constexpr const char* kRows[9] = {"1", "P(A)", "P(A')", "P(B)", "P(B')", "P(AB)", "P(AB')", "P(A'B)", "P(A'B')"};
  Json cert = Json::object();
  for (int i = 0; i < 9; ++i) cert[kRows[i]] = r.certificate[i];
  Json out{{"probabilities", probs_json(p)},
           {"feasible", r.feasible},
           {"max_min_entry", r.max_min_entry},
           {"certificate", cert},
           {"chsh_satisfied", chsh.satisfied},
           {"agrees_with_chsh", chsh.satisfied == r.feasible}};
  if (r.witness) out["witness"] = distribution_json(*r.witness);
  return out;
}

// Free-parameter values on a grid of `points` per axis.
double grid_value(int k, int points) { return points == 1 ? 0.5 : static_cast<double>(k) / (points - 1); }

FamilyParams params_at(const std::vector<double>& t) {
  FamilyParams p;
  p.t_dotdot = t[0];
  p.t_a_plus = t[1];
  p.t_a_prime_plus = t[2];
  for (int k = 0; k < 4; ++k) p.t_bb[k] = t[3 + k];
  if (t.size() == 8) p.t_a_prime_b_prime = t[7];
  return p;
}

Json cmd_sweep(const RunConfig& cfg, const Input& in, const std::string& text) {
  const MeasuredProbs m = measured_of(in, text);
  const int axes = cfg.experiments == 4 ? 7 : 8;
  std::optional<ExperimentalProbs> four;
  std::optional<ThreeExperimentProbs> three;
  if (cfg.experiments == 4) {
    four = four_experiments(m, text);
    const auto report = chsh_probability_form(*four, options_of(cfg).slack);
    if (!report.satisfied) throw ChshViolation(report);
  } else {
    three = three_experiments(m, text);
  }
  const auto opt = options_of(cfg);

  std::uint64_t runs = 1;
  for (int a = 0; a < axes; ++a) runs *= static_cast<std::uint64_t>(cfg.grid);

  struct Extreme {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<double> t_lo, t_hi;
  };
  std::array<Extreme, 16> extremes;
  std::uint64_t valid = 0, failures = 0;
  double min_entry = std::numeric_limits<double>::infinity();
  std::optional<QuadDistribution> argmin;
  std::vector<double> t_argmin;
  std::string first_failure;

  std::vector<int> k(axes, 0);
  std::vector<double> t(axes);
  for (std::uint64_t run = 0; run < runs; ++run) {
    for (int a = 0; a < axes; ++a) t[a] = grid_value(k[a], cfg.grid);
    try {
      const FamilyParams p = params_at(t);
      const QuadDistribution q =
          four ? construct_4exp(*four, p, opt).distribution : construct_3exp(*three, p, opt).construction.distribution;
      const double lowest = q.min_entry();
      if (lowest >= -kPositivityTolerance) ++valid;
      if (lowest < min_entry) {
        min_entry = lowest;
        argmin = q;
        t_argmin = t;
      }
      for (int i = 0; i < 16; ++i) {
        if (q[i] < extremes[i].lo) extremes[i].lo = q[i], extremes[i].t_lo = t;
        if (q[i] > extremes[i].hi) extremes[i].hi = q[i], extremes[i].t_hi = t;
      }
    } catch (const InternalError&) {
      throw;
    } catch (const Error& e) {
      if (failures++ == 0) first_failure = e.what();
    }
    // Odometer over the grid, last axis fastest.
    for (int a = axes - 1; a >= 0; --a) {
      if (++k[a] < cfg.grid) break;
      k[a] = 0;
    }
  }

  Json extremal = Json::array();
  for (int i = 0; i < 16; ++i)
    extremal.push_back({{"entry", QuadDistribution::label(i)},
                        {"min", extremes[i].lo},
                        {"t_at_min", extremes[i].t_lo},
                        {"max", extremes[i].hi},
                        {"t_at_max", extremes[i].t_hi}});
  Json out{{"experiments", cfg.experiments},
           {"probabilities", probs_json(m)},
           {"grid_points_per_axis", cfg.grid},
           {"axes", axes},
           {"runs", runs},
           {"valid", valid},
           {"failures", failures},
           {"all_valid", valid == runs},
           {"min_entry", min_entry}};
  if (argmin) out["min_entry_distribution"] = {{"t", t_argmin}, {"distribution", distribution_json(*argmin)}};
  if (failures > 0) out["first_failure"] = first_failure;
  out["extremal"] = extremal;
  return out;
}

Json cmd_mc_verify(const RunConfig& cfg, const Input& in, const std::string& text) {
  const MeasuredProbs m = measured_of(in, text);
  const auto opt = options_of(cfg);
  std::optional<QuadDistribution> dist;
  MeasuredProbs expected = m;
  if (cfg.experiments == 4) {
    dist = construct_4exp(four_experiments(m, text), in.params, opt).distribution;
  } else {
    dist = construct_3exp(three_experiments(m, text), in.params, opt).construction.distribution;
    expected.a_prime_b_prime.reset();
  }
  const QuadDistribution& q = *dist;

  // Every slot from the last positive entry on is pinned to 1 so that round-off
  // in the running sum can never select a zero-probability outcome.
  std::array<double, 16> cumulative{};
  double running = 0;
  int last_positive = 0;
  for (int i = 0; i < 16; ++i) {
    running += q[i];
    cumulative[i] = running;
    if (q[i] > 0) last_positive = i;
  }
  for (int i = last_positive; i < 16; ++i) cumulative[i] = 1.0;

  std::mt19937_64 rng(cfg.seed);
  std::array<std::uint64_t, 16> counts{};
  for (std::uint64_t s = 0; s < cfg.samples; ++s) ++counts[inverse_cdf(cumulative, unit_uniform(rng()))];

  const auto tables = measured_tables(expected, cfg.experiments);
  const double n = static_cast<double>(cfg.samples);
  Json rows = Json::array();
  int flagged = 0;
  double max_abs_z = 0;
  for (int e = 0; e < cfg.experiments; ++e)
    for (Sign x : kSigns)
      for (Sign y : kSigns) {
        const std::string pattern = pattern_for(e, x, y);
        std::uint64_t hits = 0;
        for (int i = 0; i < 16; ++i) {
          const std::string l = QuadDistribution::label(i);
          bool match = true;
          for (int c = 0; c < 4; ++c) match = match && (pattern[c] == '.' || pattern[c] == l[c]);
          if (match) hits += counts[i];
        }
        const double p = std::clamp(tables[e].at(x, y), 0.0, 1.0);
        const double empirical = static_cast<double>(hits) / n;
        const double se = std::sqrt(p * (1 - p) / n);
        const double deviation = empirical - p;
        const double z = se > 0 ? deviation / se : 0.0;
        // The absolute floor absorbs round-off in zero-variance marginals.
        const bool flag = std::abs(deviation) > 5 * se + 1e-12;
        flagged += flag ? 1 : 0;
        max_abs_z = std::max(max_abs_z, std::abs(z));
        rows.push_back({{"experiment", kExperimentNames[e]},
                        {"outcome", std::string{to_char(x), to_char(y)}},
                        {"expected", p},
                        {"empirical", empirical},
                        {"standard_error", se},
                        {"z", z},
                        {"flagged", flag}});
      }

  Json count_json = Json::object();
  for (int i = 0; i < 16; ++i) count_json[QuadDistribution::label(i)] = counts[i];
  return {{"experiments", cfg.experiments},
          {"generator", "mt19937_64"},
          {"seed", cfg.seed},
          {"samples", cfg.samples},
          {"distribution", distribution_json(q)},
          {"counts", count_json},
          {"marginals", rows},
          {"max_abs_z", max_abs_z},
          {"flagged", flagged},
          {"passed", flagged == 0}};
}

const char* kind_of(ExitCode code) {
  switch (code) {
    case ExitCode::validation: return "validation";
    case ExitCode::chsh_violation: return "chsh_violation";
    case ExitCode::inconsistency: return "inconsistency";
    case ExitCode::internal: return "internal";
    case ExitCode::success: break;
  }
  return "internal";
}

Json error_report(const RunConfig& cfg, ExitCode code, const std::string& message) {
  return {{"mode", mode_name(cfg.mode)},
          {"status", "error"},
          {"exit_code", static_cast<int>(code)},
          {"error", {{"kind", kind_of(code)}, {"message", message}}}};
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(std::string("cannot open ") + what + " file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

Mode parse_mode(const std::string& name) {
  static const std::pair<const char*, Mode> kModes[] = {
      {"probs", Mode::probs},   {"construct3", Mode::construct3}, {"construct4", Mode::construct4},
      {"chsh", Mode::chsh},     {"oracle", Mode::oracle},         {"sweep", Mode::sweep},
      {"mc-verify", Mode::mc_verify}};
  for (const auto& [n, m] : kModes)
    if (name == n) return m;
  throw UsageError("unknown mode '" + name + "'");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::probs: return "probs";
    case Mode::construct3: return "construct3";
    case Mode::construct4: return "construct4";
    case Mode::chsh: return "chsh";
    case Mode::oracle: return "oracle";
    case Mode::sweep: return "sweep";
    case Mode::mc_verify: return "mc-verify";
  }
  return "?";
}

void RunConfig::validate() const {
  if (samples < 1) throw UsageError("--samples must be at least 1");
  if (grid < 1) throw UsageError("--grid must be at least 1");
  if (experiments != 3 && experiments != 4) throw UsageError("--experiments must be 3 or 4");
  if (tolerance && !(*tolerance >= 0 && std::isfinite(*tolerance)))
    throw UsageError("--tolerance must be a finite nonnegative number");
  if (mode == Mode::sweep) {
    double runs = std::pow(static_cast<double>(grid), experiments == 4 ? 7 : 8);
    if (runs > 1e8) throw UsageError("--grid too large: more than 1e8 sweep points");
  }
}

int inverse_cdf(const std::array<double, 16>& cumulative, double u) noexcept {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return it == cumulative.end() ? 15 : static_cast<int>(it - cumulative.begin());
}

RunOutcome run_text(const RunConfig& config, const std::string& input_text,
                    const std::optional<std::string>& params_text) {
  try {
    config.validate();
    const Input in = parse_input(input_text, params_text);
    Json body;
    switch (config.mode) {
      case Mode::probs: body = cmd_probs(config, in, input_text); break;
      case Mode::chsh: body = cmd_chsh(config, in, input_text); break;
      case Mode::construct3: body = cmd_construct3(config, in, input_text); break;
      case Mode::construct4: body = cmd_construct4(config, in, input_text); break;
      case Mode::oracle: body = cmd_oracle(config, in, input_text); break;
      case Mode::sweep: body = cmd_sweep(config, in, input_text); break;
      case Mode::mc_verify: body = cmd_mc_verify(config, in, input_text); break;
    }
    Json out{{"mode", mode_name(config.mode)}, {"status", "ok"}};
    out.update(body);
    return {0, out};
  } catch (const ChshViolation& e) {
    Json out = error_report(config, e.exit_code(), e.what());
    out["chsh"] = chsh_json(e.report());
    return {static_cast<int>(e.exit_code()), out};
  } catch (const Error& e) {
    return {static_cast<int>(e.exit_code()), error_report(config, e.exit_code(), e.what())};
  } catch (const Json::exception& e) {
    return {2, error_report(config, ExitCode::validation, e.what())};
  } catch (const std::exception& e) {
    return {5, error_report(config, ExitCode::internal, e.what())};
  }
}

RunOutcome run(const RunConfig& config) {
  std::string input, params;
  try {
    input = read_file(config.input_path, "input");
    if (config.params_path) params = read_file(*config.params_path, "params");
  } catch (const ValidationError& e) {
    return {2, error_report(config, ExitCode::validation, e.what())};
  }
  return run_text(config, input,
                  config.params_path ? std::optional<std::string>(params) : std::nullopt);
}

std::string render(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace bellquad::cli
