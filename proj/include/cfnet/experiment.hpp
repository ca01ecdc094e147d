#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cfnet/bounds.hpp"
#include "cfnet/builtins.hpp"
#include "cfnet/erm.hpp"
#include "cfnet/io.hpp"
#include "cfnet/rademacher.hpp"

namespace cfnet {

inline constexpr int kReportSchemaVersion = 1;

/// Experiment configuration (JSON):
///
///   {"schema_version": 1,
///    "system": {"builtin": "bilinear2d"} | {"file": "sys.json"} | {"inline": {...}},
///              optional "T", "M" overrides next to the source,
///    "data": {"generator": "planted", "N_train": 200, "N_test": 200,
///             "noise": 0, "label_order": K, "planted_pieces": 3}
///          | {"train_csv": "a.csv", "test_csv": "b.csv", "M1": 1},
///    "K": 6, "loss": "squared", "delta": 0.05,
///    "rademacher": {"n_controls": 256, "n_eps": 512, "max_pieces": 4},
///    "erm": {"max_iter": 20000, "tol": 1e-10},
///    "bound": {"family": "auto"} | a family object (see family_from_json),
///    "seed": 1}
///
/// Optional fields take the defaults shown. File paths are relative to
/// `base_dir`.
struct ExperimentConfig {
  json system;
  json data;
  int K = 6;
  LossKind loss = LossKind::Squared;
  double delta = 0.05;
  std::size_t n_controls = 256;
  std::size_t n_eps = 512;
  int max_pieces = 4;
  int erm_max_iter = 20000;
  double erm_tol = 1e-10;
  json bound = json{{"family", "auto"}};
  std::uint64_t seed = 0;
  std::string base_dir;

  /// Normalized echo with every default filled in.
  json echo() const;
};

ExperimentConfig parse_experiment_config(const json& j, const std::string& base_dir = {});

/// Resolves a {"builtin"| "file" | "inline"} system object (with optional
/// T and M overrides).
SystemFile load_system(const json& source, const std::string& base_dir = {});

struct ExperimentReport {
  json config;
  std::uint64_t seed = 0;
  std::size_t N_train = 0;
  std::size_t N_test = 0;
  double M1 = 0.0;
  FittedModel model;
  double train_risk = 0.0;
  double test_risk = 0.0;
  /// Certified chain; unset with `not_certified` filled when it fails.
  std::optional<BoundReport> rademacher_bound;
  std::optional<BoundReport> theorem1;
  std::optional<double> M2;
  std::optional<double> loss_rademacher;
  std::optional<double> B;
  std::optional<double> excess_risk;
  std::string family_basis;
  std::string not_certified;
  RademacherEstimate empirical;
  std::vector<std::string> warnings;

  /// estimate + 3 stderr <= certified R_N(F) (only when certified).
  std::optional<bool> empirical_le_certified() const;
  /// test - train risk <= excess-risk certificate (only when certified).
  std::optional<bool> gap_le_excess() const;

  json to_json() const;
};

/// ERM on the train split, train/test risk, the certified chain
/// R_N(F) bound -> loss contraction -> excess risk, and the empirical
/// Rademacher estimate on the training inputs.
ExperimentReport generalization_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

}  // namespace cfnet
