#include "cfnet/io.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "cfnet/parser.hpp"

namespace cfnet {

namespace {

template <class T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw std::invalid_argument(where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(where + ": bad \"" + key + "\": " + e.what());
  }
}

std::vector<Expr> parse_components(const json& arr, int n, const PrimitiveRegistry& reg, const std::string& where) {
  if (!arr.is_array()) throw std::invalid_argument(where + " must be an array of expression strings");
  std::vector<Expr> out;
  for (std::size_t j = 0; j < arr.size(); ++j) {
    if (!arr[j].is_string() && !arr[j].is_number()) {
      throw std::invalid_argument(where + "[" + std::to_string(j) + "] must be a string");
    }
    const std::string text = arr[j].is_string() ? arr[j].get<std::string>() : arr[j].dump();
    try {
      out.push_back(parse_expr(text, n, reg));
    } catch (const ParseError& e) {
      throw std::invalid_argument(where + "[" + std::to_string(j) + "] '" + text + "': " + e.what() +
                                  " (offset " + std::to_string(e.offset()) + ")");
    }
  }
  return out;
}

}  // namespace

SystemFile system_from_json(const json& j) {
  const std::string where = "system";
  if (!j.is_object()) throw std::invalid_argument("system definition must be a JSON object");
  PrimitiveRegistry reg = PrimitiveRegistry::defaults();
  if (j.contains("primitives")) {
    for (const auto& [name, g] : j.at("primitives").items()) {
      reg = reg.with_growth(name, GrowthConstants{require<double>(g, "a", "primitives." + name),
                                                  require<double>(g, "b", "primitives." + name)});
    }
  }
  SystemFile f;
  SystemSpec& s = f.declared;
  s.n = require<int>(j, "n", where);
  s.m = require<int>(j, "m", where);
  if (s.n < 1 || s.m < 1) throw std::invalid_argument("system: n and m must be >= 1");
  const json& g = j.at("g");
  if (!g.is_array()) throw std::invalid_argument("system: \"g\" must be an array of fields");
  for (std::size_t i = 0; i < g.size(); ++i) {
    s.g.push_back(parse_components(g[i], s.n, reg, "g[" + std::to_string(i) + "]"));
  }
  s.c = require<std::vector<double>>(j, "c", where);
  s.r = require<double>(j, "r", where);
  s.M = require<double>(j, "M", where);
  s.T = require<double>(j, "T", where);
  s.validate();
  if (j.contains("drift")) {
    f.drift = parse_components(j.at("drift"), s.n, reg, "drift");
    if (f.drift.size() != static_cast<std::size_t>(s.n)) throw std::invalid_argument("drift must have n components");
    f.M0 = require<double>(j, "M0", where);
  }
  return f;
}

SystemSpec SystemFile::resolved() const {
  if (!has_drift()) return declared;
  return absorb_drift(declared, drift, M0);
}

ControlPath SystemFile::wrap_control(const ControlPath& u) const {
  if (!has_drift()) return u;
  return prepend_constant_channel(u, M0);
}

json system_to_json(const SystemSpec& sys) {
  json g = json::array();
  for (const auto& field : sys.g) {
    json comps = json::array();
    for (const auto& e : field) comps.push_back(to_string(e));
    g.push_back(std::move(comps));
  }
  return json{{"n", sys.n}, {"m", sys.m}, {"g", g}, {"c", sys.c}, {"r", sys.r}, {"M", sys.M}, {"T", sys.T}};
}

ControlPath control_from_json(const json& j) {
  const std::string where = "control";
  return ControlPath(require<int>(j, "m", where), require<std::vector<double>>(j, "breakpoints", where),
                     require<std::vector<std::vector<double>>>(j, "values", where), require<double>(j, "M", where));
}

json control_to_json(const ControlPath& u) {
  return json{{"m", u.channels()}, {"breakpoints", u.breakpoints()}, {"values", u.values()}, {"M", u.bound()}};
}

json word_to_json(const Word& w) { return json(std::vector<int>(w.letters().begin(), w.letters().end())); }

json signature_to_json(const SignatureTable& sig, int m) {
  json entries = json::array();
  const auto words = words_up_to(m, sig.order());
  for (std::size_t i = 0; i < words.size(); ++i) {
    entries.push_back(json{{"word", word_to_json(words[i])}, {"value", sig[i]}});
  }
  return json{{"K", sig.order()}, {"m", m}, {"entries", entries}};
}

json series_to_json(const SeriesEvaluation& ev) {
  json j{{"x0", ev.x0}, {"K", ev.K}, {"value", ev.value}, {"contributions", ev.contributions}};
  if (ev.tail_bound) {
    j["tail_bound"] = *ev.tail_bound;
  } else {
    j["tail_bound"] = ev.tail_divergent ? "divergent" : "unavailable";
  }
  if (ev.oracle_value) {
    j["oracle"] = json{{"value", *ev.oracle_value}, {"error_estimate", *ev.oracle_error},
                       {"discrepancy", *ev.discrepancy}};
  }
  j["warnings"] = ev.warnings;
  return j;
}

json ode_to_json(const OdeResult& res) {
  json j{{"final_state", res.final_state}, {"y", res.y},           {"y_refined", res.y_refined},
         {"error_estimate", res.error_estimate}, {"steps", res.steps}};
  if (!res.times.empty()) {
    j["times"] = res.times;
    j["trajectory"] = res.trajectory;
  }
  return j;
}

json bound_to_json(const BoundReport& rep) {
  json j{{"kind", to_string(rep.kind)}, {"N", rep.N},     {"m", rep.m}, {"M", rep.M},
         {"T", rep.T},                  {"total", rep.total}, {"precondition_ok", rep.precondition_ok},
         {"precondition", rep.precondition}};
  switch (rep.kind) {
    case BoundKind::Theorem1:
      j["K"] = rep.K;
      j["partial_sum"] = rep.partial_sum;
      j["tail"] = rep.tail ? json(*rep.tail) : json("unavailable");
      if (rep.tail_family) j["tail_family"] = *rep.tail_family;
      break;
    case BoundKind::Bilinear:
      j["r"] = rep.r;
      j["a"] = rep.a;
      break;
    case BoundKind::Analytic:
      j["r"] = rep.r;
      j["n"] = rep.n;
      j["a_r"] = rep.a_r;
      break;
    case BoundKind::Hopfield:
      j["r"] = rep.r;
      j["n"] = rep.n;
      j["a"] = rep.a;
      j["b"] = rep.b;
      break;
  }
  if (rep.margin) j["margin"] = *rep.margin;
  return j;
}

json lambda_to_json(const LambdaReport& rep) {
  return json{{"k", rep.k},
              {"value", rep.value},
              {"argmax_word", word_to_json(rep.argmax_word)},
              {"argmax_point", rep.argmax_point},
              {"words", rep.words},
              {"points", rep.points},
              {"note", "sampled maximum over a finite grid: a lower estimate of the supremum"}};
}

json family_to_json(const LambdaFamily& f) {
  return std::visit(
      [](const auto& v) -> json {
        using F = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<F, BilinearFamily>) {
          return json{{"family", "bilinear"}, {"r", v.r}, {"a", v.a}};
        } else if constexpr (std::is_same_v<F, AnalyticFamily>) {
          return json{{"family", "analytic"}, {"r", v.r}, {"n", v.n}, {"a_r", v.a_r}};
        } else if constexpr (std::is_same_v<F, HopfieldFamily>) {
          return json{{"family", "hopfield"}, {"r", v.r}, {"a", v.a}, {"b", v.b}};
        } else {
          return json{{"family", "geometric"}, {"C", v.C}, {"rho", v.rho}, {"s", v.s}};
        }
      },
      f);
}

LambdaFamily family_from_json(const json& j) {
  const std::string name = require<std::string>(j, "family", "family");
  const std::string where = "family " + name;
  if (name == "bilinear") return BilinearFamily{require<double>(j, "r", where), require<double>(j, "a", where)};
  if (name == "analytic") {
    return AnalyticFamily{require<double>(j, "r", where), require<int>(j, "n", where), require<double>(j, "a_r", where)};
  }
  if (name == "hopfield") {
    return HopfieldFamily{require<double>(j, "r", where), require<double>(j, "a", where), require<double>(j, "b", where)};
  }
  if (name == "geometric") {
    GeometricFamily g{require<double>(j, "C", where), require<double>(j, "rho", where), require<int>(j, "s", where)};
    if (g.s != 0 && g.s != 1) throw std::invalid_argument("geometric family: s must be 0 or 1");
    return g;
  }
  throw std::invalid_argument("unknown family '" + name + "' (expected bilinear, analytic, hopfield or geometric)");
}

json rademacher_to_json(const RademacherEstimate& est) {
  return json{{"estimate", est.estimate}, {"stderr", est.stderr_}, {"N", est.N},         {"K", est.K},
              {"n_controls", est.n_controls}, {"n_eps", est.n_eps}, {"caveat", est.caveat}};
}

json jensen_to_json(const JensenCheck& chk) {
  return json{{"estimate", chk.estimate}, {"stderr", chk.stderr_}, {"rhs", chk.rhs},
              {"exact", chk.exact},       {"pass", chk.pass},      {"margin", chk.margin}};
}

json model_to_json(const FittedModel& model) {
  json coeffs = json::array();
  for (std::size_t i = 0; i < model.words.size(); ++i) {
    coeffs.push_back(json{{"word", word_to_json(model.words[i])}, {"theta", model.theta[i]}, {"box", model.box[i]}});
  }
  return json{{"K", model.K},
              {"loss", to_string(model.loss)},
              {"train_loss", model.train_loss},
              {"iterations", model.iterations},
              {"converged", model.converged},
              {"grad_norm", model.grad_norm},
              {"lipschitz", model.lipschitz},
              {"step", model.step},
              {"box_violations", model.box_violations},
              {"coefficients", coeffs},
              {"warnings", model.warnings}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_json(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("empty entry in number list '" + text + "'");
    item = item.substr(b, e - b + 1);
    double v = 0.0;
    const char* first = item.data();
    if (*first == '+') ++first;
    auto [p, ec] = std::from_chars(first, item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size()) {
      throw std::invalid_argument("'" + item + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace cfnet
