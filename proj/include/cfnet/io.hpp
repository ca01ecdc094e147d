#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfnet/bounds.hpp"
#include "cfnet/erm.hpp"
#include "cfnet/lie.hpp"
#include "cfnet/primitives.hpp"
#include "cfnet/rademacher.hpp"
#include "cfnet/series.hpp"
#include "cfnet/signature.hpp"
#include "cfnet/system.hpp"

namespace cfnet {

using json = nlohmann::json;

/// A system-definition file, possibly with drift.
///
///   {"n": 2, "m": 1, "g": [["x2", "-x1"]], "c": [1, 0],
///    "r": 1, "M": 1, "T": 0.5,
///    "drift": ["0", "-x2"], "M0": 1,                      optional
///    "primitives": {"sigma": {"a": 1, "b": 1}}}            optional
struct SystemFile {
  SystemSpec declared;       ///< the driftless part as written
  std::vector<Expr> drift;   ///< empty when the file has none
  double M0 = 0.0;

  bool has_drift() const { return !drift.empty(); }
  /// The driftless system used everywhere else: declared, or with the drift
  /// absorbed as channel 1.
  SystemSpec resolved() const;
  /// Maps a control for the declared channels to one for resolved().
  ControlPath wrap_control(const ControlPath& u) const;
};

SystemFile system_from_json(const json& j);
json system_to_json(const SystemSpec& sys);

/// {"m": 2, "breakpoints": [0, 0.1, 0.3], "values": [[1, 0], [0, -1]], "M": 1}
ControlPath control_from_json(const json& j);
json control_to_json(const ControlPath& u);

json word_to_json(const Word& w);
json signature_to_json(const SignatureTable& sig, int m);
json series_to_json(const SeriesEvaluation& ev);
json ode_to_json(const OdeResult& res);
json bound_to_json(const BoundReport& rep);
json lambda_to_json(const LambdaReport& rep);
json family_to_json(const LambdaFamily& f);
/// {"family": "bilinear", "r": .., "a": ..} and the other three shapes.
LambdaFamily family_from_json(const json& j);
json rademacher_to_json(const RademacherEstimate& est);
json jensen_to_json(const JensenCheck& chk);
json model_to_json(const FittedModel& model);

json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline, to `path` or stdout when empty.
void write_json(const json& j, const std::string& path = {});

/// "1, 0.5,-2" -> {1, 0.5, -2}.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace cfnet
