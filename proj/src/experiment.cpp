#include "cfnet/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

namespace cfnet {

namespace {

std::string resolve_path(const std::string& p, const std::string& base) {
  if (base.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(base) / p).string();
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: bad \"") + key + "\": " + e.what());
  }
}

CertifiedFamily explicit_family(const json& j) {
  LambdaFamily f = family_from_json(j);
  BoundKind kind = BoundKind::Theorem1;
  if (std::holds_alternative<BilinearFamily>(f)) kind = BoundKind::Bilinear;
  if (std::holds_alternative<AnalyticFamily>(f)) kind = BoundKind::Analytic;
  if (std::holds_alternative<HopfieldFamily>(f)) kind = BoundKind::Hopfield;
  return CertifiedFamily{f, kind, "family given in the configuration"};
}

}  // namespace

SystemFile load_system(const json& source, const std::string& base_dir) {
  if (!source.is_object()) throw std::invalid_argument("config: \"system\" must be an object");
  SystemFile f;
  const int sources = source.contains("builtin") + source.contains("file") + source.contains("inline");
  if (sources != 1) throw std::invalid_argument("config: system needs exactly one of builtin, file, inline");
  if (source.contains("builtin")) {
    f.declared = builtin_system(source.at("builtin").get<std::string>());
  } else if (source.contains("file")) {
    const auto path = resolve_path(source.at("file").get<std::string>(), base_dir);
    try {
      f = system_from_json(read_json_file(path));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ": " + e.what());
    }
  } else {
    f = system_from_json(source.at("inline"));
  }
  if (source.contains("T")) f.declared.T = source.at("T").get<double>();
  if (source.contains("M")) f.declared.M = source.at("M").get<double>();
  f.declared.validate();
  return f;
}

ExperimentConfig parse_experiment_config(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  const int version = get_or<int>(j, "schema_version", kReportSchemaVersion);
  if (version != kReportSchemaVersion) {
    throw std::invalid_argument("config: unsupported schema_version " + std::to_string(version));
  }
  ExperimentConfig c;
  c.base_dir = base_dir;
  if (!j.contains("system")) throw std::invalid_argument("config: missing \"system\"");
  c.system = j.at("system");
  c.data = j.value("data", json{{"generator", "planted"}});
  c.K = get_or<int>(j, "K", c.K);
  c.loss = parse_loss(get_or<std::string>(j, "loss", "squared"));
  c.delta = get_or<double>(j, "delta", c.delta);
  const json rad = j.value("rademacher", json::object());
  c.n_controls = get_or<std::size_t>(rad, "n_controls", c.n_controls);
  c.n_eps = get_or<std::size_t>(rad, "n_eps", c.n_eps);
  c.max_pieces = get_or<int>(rad, "max_pieces", c.max_pieces);
  const json erm = j.value("erm", json::object());
  c.erm_max_iter = get_or<int>(erm, "max_iter", c.erm_max_iter);
  c.erm_tol = get_or<double>(erm, "tol", c.erm_tol);
  c.bound = j.value("bound", c.bound);
  if (!j.contains("seed")) throw std::invalid_argument("config: missing \"seed\"");
  c.seed = j.at("seed").get<std::uint64_t>();
  if (c.K < 0) throw std::invalid_argument("config: K must be >= 0");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw std::invalid_argument("config: delta must lie in (0, 1)");
  return c;
}

json ExperimentConfig::echo() const {
  json d = data;
  if (d.value("generator", std::string()) == "planted") {
    d["N_train"] = get_or<std::size_t>(data, "N_train", 200);
    d["N_test"] = get_or<std::size_t>(data, "N_test", 200);
    d["noise"] = get_or<double>(data, "noise", 0.0);
    d["label_order"] = get_or<int>(data, "label_order", K);
    d["planted_pieces"] = get_or<int>(data, "planted_pieces", 3);
  }
  return json{{"schema_version", kReportSchemaVersion},
              {"system", system},
              {"data", d},
              {"K", K},
              {"loss", to_string(loss)},
              {"delta", delta},
              {"rademacher", {{"n_controls", n_controls}, {"n_eps", n_eps}, {"max_pieces", max_pieces}}},
              {"erm", {{"max_iter", erm_max_iter}, {"tol", erm_tol}}},
              {"bound", bound},
              {"seed", seed}};
}

std::optional<bool> ExperimentReport::empirical_le_certified() const {
  if (!rademacher_bound) return std::nullopt;
  return empirical.estimate + 3.0 * empirical.stderr_ <= rademacher_bound->total;
}

std::optional<bool> ExperimentReport::gap_le_excess() const {
  if (!excess_risk) return std::nullopt;
  return test_risk - train_risk <= *excess_risk;
}

json ExperimentReport::to_json() const {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["seed"] = seed;
  j["config"] = config;
  j["data"] = json{{"N_train", N_train}, {"N_test", N_test}, {"M1", M1}};
  j["model"] = model_to_json(model);
  j["risk"] = json{{"train", train_risk}, {"test", test_risk}, {"gap", test_risk - train_risk}};

  json cert;
  if (rademacher_bound) {
    cert["status"] = "certified";
    cert["family_basis"] = family_basis;
    cert["rademacher_bound"] = bound_to_json(*rademacher_bound);
    if (theorem1) cert["theorem1"] = bound_to_json(*theorem1);
    cert["M2"] = *M2;
    cert["loss_rademacher"] = *loss_rademacher;
    cert["B"] = *B;
    cert["excess_risk"] = *excess_risk;
  } else {
    cert["status"] = "not certified";
    cert["reason"] = not_certified;
    if (!family_basis.empty()) cert["family_basis"] = family_basis;
  }
  cert["class_note"] =
      "the fitted and certified class is the truncated coefficient box |theta_w| <= (MT)^|w|/|w|!, a relaxation "
      "of the signatures of admissible controls";
  j["certified"] = cert;

  j["empirical"] = rademacher_to_json(empirical);

  json checks;
  if (auto ok = empirical_le_certified()) {
    checks["empirical_le_certified"] =
        json{{"holds", *ok},
             {"lhs", empirical.estimate + 3.0 * empirical.stderr_},
             {"rhs", rademacher_bound->total},
             {"margin", rademacher_bound->total - empirical.estimate - 3.0 * empirical.stderr_}};
  } else {
    checks["empirical_le_certified"] = "not certified";
  }
  if (auto ok = gap_le_excess()) {
    checks["gap_le_excess_risk"] =
        json{{"holds", *ok},
             {"gap", test_risk - train_risk},
             {"certificate", *excess_risk},
             {"note", "high-probability guarantee at the configured delta; reported, not enforced"}};
  } else {
    checks["gap_le_excess_risk"] = "not certified";
  }
  j["checks"] = checks;
  j["warnings"] = warnings;
  return j;
}

ExperimentReport generalization_experiment(const ExperimentConfig& cfg, unsigned threads) {
  ExperimentReport rep;
  rep.config = cfg.echo();
  rep.seed = cfg.seed;

  const SystemFile file = load_system(cfg.system, cfg.base_dir);
  const SystemSpec sys = file.resolved();
  rep.warnings = sys.warnings();
  SeriesEvaluator ev(sys, cfg.K);

  // Certificate family and the output bound M2 it implies.
  std::optional<CertifiedFamily> family;
  if (!cfg.bound.is_object() || !cfg.bound.contains("family")) {
    throw std::invalid_argument("config: \"bound\" needs a \"family\"");
  }
  if (cfg.bound.at("family") == "auto") {
    std::string why;
    family = auto_family(sys, &why);
    if (!family) rep.not_certified = why;
  } else {
    family = explicit_family(cfg.bound);
  }
  if (family) {
    rep.family_basis = family->basis;
    rep.M2 = output_magnitude_bound(family->family, sys.m, sys.M, sys.T);
    if (!rep.M2) rep.not_certified = "the Lambda_k series diverges at m M T = " + std::to_string(sys.m * sys.M * sys.T);
  }

  // Data.
  Dataset train, test;
  const json& d = rep.config.at("data");
  if (d.value("generator", std::string()) == "planted") {
    const auto n_train = d.at("N_train").get<std::size_t>();
    const auto n_test = d.at("N_test").get<std::size_t>();
    const double noise = d.at("noise").get<double>();
    const int label_order = d.at("label_order").get<int>();
    const int pieces = d.at("planted_pieces").get<int>();
    if (n_train < 1) throw std::invalid_argument("config: N_train must be >= 1");
    RandomStream prng(cfg.seed, streams::kPlanted);
    const ControlPath planted =
        file.wrap_control(random_control(file.declared.m, file.declared.M, file.declared.T, pieces, prng));
    SeriesEvaluator label_ev(sys, label_order);
    double M1 = rep.M2 ? *rep.M2 + noise : std::numeric_limits<double>::infinity();
    train = generate_planted(label_ev, planted, n_train, noise, M1, cfg.seed, streams::kData, threads);
    test = generate_planted(label_ev, planted, n_test, noise, M1, cfg.seed, streams::kTestData, threads);
    if (!std::isfinite(M1)) {
      M1 = 0.0;
      for (double y : train.Y) M1 = std::max(M1, std::abs(y));
      for (double y : test.Y) M1 = std::max(M1, std::abs(y));
      rep.warnings.push_back("no certified output bound; M1 set to the largest observed |Y|");
      train.M1 = test.M1 = M1;
    }
    rep.M1 = M1;
  } else {
    if (!d.contains("train_csv") || !d.contains("test_csv") || !d.contains("M1")) {
      throw std::invalid_argument("config: CSV data needs train_csv, test_csv and M1");
    }
    rep.M1 = d.at("M1").get<double>();
    train = read_csv_file(resolve_path(d.at("train_csv").get<std::string>(), cfg.base_dir), sys.r, rep.M1);
    test = read_csv_file(resolve_path(d.at("test_csv").get<std::string>(), cfg.base_dir), sys.r, rep.M1);
    if (train.n != sys.n || test.n != sys.n) throw std::invalid_argument("config: CSV width differs from system n");
  }
  rep.N_train = train.size();
  rep.N_test = test.size();

  // Fit and risks.
  ErmOptions eo;
  eo.loss = cfg.loss;
  eo.max_iter = cfg.erm_max_iter;
  eo.tol = cfg.erm_tol;
  eo.seed = cfg.seed;
  eo.threads = threads;
  rep.model = erm_fit(train, ev, eo);
  rep.train_risk = rep.model.train_loss;
  rep.test_risk = rep.N_test > 0 ? empirical_risk(rep.model, ev, test, threads) : 0.0;
  for (const auto& w : rep.model.warnings) rep.warnings.push_back("erm: " + w);

  // Certified chain.
  if (family && rep.M2) {
    const double N = static_cast<double>(rep.N_train);
    try {
      rep.rademacher_bound = certified_bound(*family, sys, N);
      LambdaInput in;
      in.family = family->family;
      rep.theorem1 = theorem1_bound(in, sys.m, sys.M, sys.T, N, cfg.K);
      rep.loss_rademacher = loss_contraction(cfg.loss, rep.M1, *rep.M2, N, rep.rademacher_bound->total);
      const double span = rep.M1 + *rep.M2;
      rep.B = cfg.loss == LossKind::Squared ? span * span : span;
      rep.excess_risk = excess_risk_bound(*rep.loss_rademacher, *rep.B, N, cfg.delta);
    } catch (const NotCertifiedError& e) {
      rep.rademacher_bound.reset();
      rep.theorem1.reset();
      rep.not_certified = e.what();
    }
  }

  RademacherOptions ro;
  ro.n_controls = cfg.n_controls;
  ro.n_eps = cfg.n_eps;
  ro.max_pieces = cfg.max_pieces;
  ro.seed = cfg.seed;
  ro.threads = threads;
  rep.empirical = empirical_rademacher(train, sys, cfg.K, ro);
  return rep;
}

}  // namespace cfnet
