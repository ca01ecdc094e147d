// cfnet command-line driver. Every subcommand prints one JSON document to
// stdout (or --out FILE); errors go to stderr with exit status 1.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cfnet/bounds.hpp"
#include "cfnet/builtins.hpp"
#include "cfnet/dataset.hpp"
#include "cfnet/erm.hpp"
#include "cfnet/experiment.hpp"
#include "cfnet/io.hpp"
#include "cfnet/lie.hpp"
#include "cfnet/parser.hpp"
#include "cfnet/rademacher.hpp"
#include "cfnet/series.hpp"
#include "cfnet/signature.hpp"

using namespace cfnet;

namespace {

struct SystemArgs {
  std::string builtin;
  std::string file;
  std::optional<double> T;
  std::optional<double> M;

  void attach(CLI::App* app) {
    auto* b = app->add_option("--builtin", builtin, "builtin system: bilinear2d, analytic1d, hopfield2");
    auto* f = app->add_option("--system", file, "system-definition JSON file");
    b->excludes(f);
    app->add_option("--T", T, "override the horizon T");
    app->add_option("--M", M, "override the control bound M");
  }

  SystemFile load() const {
    json src;
    if (!builtin.empty()) {
      src["builtin"] = builtin;
    } else if (!file.empty()) {
      src["file"] = file;
    } else {
      throw std::invalid_argument("choose a system with --builtin or --system");
    }
    if (T) src["T"] = *T;
    if (M) src["M"] = *M;
    return load_system(src);
  }
};

struct ControlArgs {
  std::string file;
  std::string constant;

  void attach(CLI::App* app) {
    auto* f = app->add_option("--control", file, "control-path JSON file");
    auto* c = app->add_option("--constant", constant, "constant control value per channel, e.g. \"1,0\"");
    f->excludes(c);
  }

  /// A constant control takes T and M from the declared system.
  ControlPath load(const SystemFile& sys) const {
    if (!file.empty()) return sys.wrap_control(control_from_json(read_json_file(file)));
    if (!constant.empty()) {
      return sys.wrap_control(ControlPath::constant(parse_number_list(constant), sys.declared.T, sys.declared.M));
    }
    throw std::invalid_argument("choose a control with --control or --constant");
  }
};

std::optional<LambdaFamily> family_for(const SystemSpec& sys, const std::string& choice, json& notes) {
  if (choice == "none") return std::nullopt;
  if (choice == "auto") {
    std::string why;
    auto cf = auto_family(sys, &why);
    if (!cf) {
      notes.push_back("no Lambda_k family: " + why);
      return std::nullopt;
    }
    notes.push_back(cf->basis);
    return cf->family;
  }
  return family_from_json(json::parse(choice));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chen-Fliess series analysis of control-affine systems"};
  app.require_subcommand(1);
  std::string out;
  unsigned threads = 1;
  app.add_option("--out", out, "write JSON here instead of stdout");
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

  // parse-check
  auto* pc = app.add_subcommand("parse-check", "parse a vector-field expression and print it back");
  std::string expr_text;
  int pc_n = 1;
  pc->add_option("--expr", expr_text, "expression in the field DSL")->required();
  pc->add_option("--n", pc_n, "state dimension")->check(CLI::PositiveNumber);

  // signature
  auto* sg = app.add_subcommand("signature", "signature entries S^w(u) for |w| <= K");
  ControlArgs sg_ctrl;
  sg_ctrl.attach(sg);
  double sg_T = 1.0, sg_M = 1.0;
  int sg_K = 3;
  sg->add_option("--K", sg_K, "maximum word length")->check(CLI::NonNegativeNumber);
  sg->add_option("--T", sg_T, "horizon for --constant");
  sg->add_option("--M", sg_M, "bound for --constant");

  // lie
  auto* lie = app.add_subcommand("lie", "features Phi^w and sampled Lambda_k");
  SystemArgs lie_sys;
  lie_sys.attach(lie);
  int lie_K = 2;
  bool lie_lambda = false;
  std::size_t lie_samples = 512;
  lie->add_option("--K", lie_K, "maximum word length")->check(CLI::NonNegativeNumber);
  lie->add_flag("--lambda", lie_lambda, "also estimate Lambda_k over a domain grid");
  lie->add_option("--samples", lie_samples, "Halton points inside the ball");

  // eval-series
  auto* es = app.add_subcommand("eval-series", "truncated Chen-Fliess series y_K");
  SystemArgs es_sys;
  es_sys.attach(es);
  ControlArgs es_ctrl;
  es_ctrl.attach(es);
  std::string es_x0;
  int es_K = 4;
  bool es_oracle = false;
  double es_step = 1e-3;
  std::string es_family = "auto";
  es->add_option("--x0", es_x0, "initial state, e.g. \"1,0\"")->required();
  es->add_option("--K", es_K, "truncation order")->check(CLI::NonNegativeNumber);
  es->add_flag("--oracle", es_oracle, "compare with an RK4 reference");
  es->add_option("--step", es_step, "RK4 step for --oracle");
  es->add_option("--family", es_family, "Lambda_k family for the tail: auto, none, or a JSON object");

  // simulate
  auto* sim = app.add_subcommand("simulate", "RK4 reference trajectory");
  SystemArgs sim_sys;
  sim_sys.attach(sim);
  ControlArgs sim_ctrl;
  sim_ctrl.attach(sim);
  std::string sim_x0;
  double sim_step = 1e-3;
  bool sim_traj = false;
  sim->add_option("--x0", sim_x0, "initial state")->required();
  sim->add_option("--step", sim_step, "maximum step");
  sim->add_flag("--trajectory", sim_traj, "include every step");

  // bound
  auto* bd = app.add_subcommand("bound", "certified bounds on R_N(F)");
  std::string bd_kind = "auto";
  SystemArgs bd_sys;
  bd_sys.attach(bd);
  double bd_N = 1, bd_r = 1, bd_MM = 1, bd_TT = 1, bd_a = 0, bd_ar = 0, bd_b = 1;
  int bd_m = 1, bd_n = 1, bd_K = 10;
  std::string bd_lambda, bd_family;
  bool bd_truncate = false;
  bd->add_option("--kind", bd_kind, "auto, theorem1, bilinear, analytic, hopfield");
  bd->add_option("--N", bd_N, "sample size")->required();
  bd->add_option("--r", bd_r, "domain radius");
  bd->add_option("--m", bd_m, "channels");
  bd->add_option("--n", bd_n, "state dimension");
  bd->add_option("--bound-M", bd_MM, "control bound (without a system)");
  bd->add_option("--bound-T", bd_TT, "horizon (without a system)");
  bd->add_option("--a", bd_a, "spectral norm (bilinear) or growth rate (hopfield)");
  bd->add_option("--a-r", bd_ar, "polydisc maximum modulus");
  bd->add_option("--b", bd_b, "hopfield growth scale");
  bd->add_option("--K", bd_K, "theorem1 partial-sum order");
  bd->add_option("--lambda", bd_lambda, "theorem1: Lambda_0..Lambda_K, comma separated");
  bd->add_option("--family", bd_family, "theorem1: Lambda_k family as JSON");
  bd->add_flag("--truncate", bd_truncate, "theorem1: report the tail as unavailable");

  // rademacher
  auto* rd = app.add_subcommand("rademacher", "Monte Carlo empirical Rademacher complexity");
  SystemArgs rd_sys;
  rd_sys.attach(rd);
  std::string rd_data;
  double rd_M1 = 1;
  std::size_t rd_N = 50, rd_controls = 256, rd_eps = 512;
  int rd_K = 4, rd_pieces = 4;
  std::uint64_t rd_seed = 0;
  rd->add_option("--data", rd_data, "CSV of samples (default: N points uniform on the ball)");
  rd->add_option("--M1", rd_M1, "label bound for --data");
  rd->add_option("--N", rd_N, "generated sample size");
  rd->add_option("--K", rd_K, "series order")->check(CLI::NonNegativeNumber);
  rd->add_option("--n-controls", rd_controls, "random controls (each also negated)");
  rd->add_option("--n-eps", rd_eps, "sign draws");
  rd->add_option("--max-pieces", rd_pieces, "pieces per random control");
  rd->add_option("--seed", rd_seed, "RNG seed")->required();

  // erm
  auto* er = app.add_subcommand("erm", "fit signature coefficients on the coefficient box");
  SystemArgs er_sys;
  er_sys.attach(er);
  std::string er_data, er_loss = "squared";
  double er_M1 = 1, er_noise = 0;
  std::size_t er_N = 200;
  int er_K = 4, er_iter = 20000, er_pieces = 3;
  double er_tol = 1e-10;
  std::uint64_t er_seed = 0;
  er->add_option("--data", er_data, "CSV of samples (default: planted-control labels)");
  er->add_option("--M1", er_M1, "label bound for --data");
  er->add_option("--N", er_N, "generated sample size");
  er->add_option("--noise", er_noise, "generated label noise amplitude");
  er->add_option("--planted-pieces", er_pieces, "pieces of the planted control");
  er->add_option("--K", er_K, "series order")->check(CLI::NonNegativeNumber);
  er->add_option("--loss", er_loss, "squared or absolute");
  er->add_option("--max-iter", er_iter, "iteration cap");
  er->add_option("--tol", er_tol, "convergence tolerance");
  er->add_option("--seed", er_seed, "RNG seed")->required();

  // experiment
  auto* ex = app.add_subcommand("experiment", "generalization experiment from a JSON config");
  std::string ex_config;
  std::optional<std::uint64_t> ex_seed;
  ex->add_option("--config", ex_config, "experiment configuration JSON")->required();
  ex->add_option("--seed", ex_seed, "RNG seed (overrides the config)");

  CLI11_PARSE(app, argc, argv);

  try {
    json result;
    if (*pc) {
      try {
        Expr e = parse_expr(expr_text, pc_n);
        result = json{{"ok", true}, {"expr", to_string(e)}, {"tree", to_tree_string(e)}, {"nodes", e.node_count()}};
      } catch (const ParseError& e) {
        static const char* kinds[] = {"syntax", "unknown_primitive", "variable_out_of_range"};
        result = json{{"ok", false},
                      {"kind", kinds[static_cast<int>(e.kind())]},
                      {"offset", e.offset()},
                      {"message", e.what()}};
        write_json(result, out);
        return 2;
      }
    } else if (*sg) {
      ControlPath u = !sg_ctrl.file.empty()
                          ? control_from_json(read_json_file(sg_ctrl.file))
                          : ControlPath::constant(parse_number_list(sg_ctrl.constant), sg_T, sg_M);
      auto sig = signature_up_to(u, sg_K);
      result = signature_to_json(sig, u.channels());
      result["control"] = control_to_json(u);
    } else if (*lie) {
      const SystemSpec sys = lie_sys.load().resolved();
      LieTable table(sys);
      table.build_up_to(lie_K);
      json feats = json::array();
      for (const auto& w : words_up_to(sys.m, lie_K)) {
        feats.push_back(json{{"word", word_to_json(w)}, {"feature", to_string(table.feature(w))}});
      }
      result = json{{"system", system_to_json(sys)}, {"K", lie_K}, {"features", feats},
                    {"convention", "feature(w) pairs with S^w and equals the iterated Lie derivative along reverse(w)"}};
      if (lie_lambda) {
        DomainGrid grid;
        grid.samples = lie_samples;
        json lam = json::array();
        for (int k = 0; k <= lie_K; ++k) lam.push_back(lambda_to_json(lambda_k(table, k, grid, kDefaultWordCap, threads)));
        result["lambda"] = lam;
      }
    } else if (*es) {
      const SystemFile file = es_sys.load();
      const SystemSpec sys = file.resolved();
      SeriesOptions opts;
      json notes = json::array();
      opts.family = family_for(sys, es_family, notes);
      opts.run_oracle = es_oracle;
      opts.oracle_step = es_step;
      result = series_to_json(chen_fliess_eval(sys, parse_number_list(es_x0), es_ctrl.load(file), es_K, opts));
      result["notes"] = notes;
    } else if (*sim) {
      const SystemFile file = sim_sys.load();
      const SystemSpec sys = file.resolved();
      result = ode_to_json(ode_reference(sys, parse_number_list(sim_x0), sim_ctrl.load(file), sim_step, sim_traj));
    } else if (*bd) {
      const bool have_sys = !bd_sys.builtin.empty() || !bd_sys.file.empty();
      std::optional<SystemSpec> sys;
      if (have_sys) sys = bd_sys.load().resolved();
      const int m = sys ? sys->m : bd_m;
      const double M = sys ? sys->M : bd_MM;
      const double T = sys ? sys->T : bd_TT;
      BoundReport rep;
      json extra;
      if (bd_kind == "auto") {
        if (!sys) throw std::invalid_argument("--kind auto needs --builtin or --system");
        std::string why;
        auto cf = auto_family(*sys, &why);
        if (!cf) throw std::invalid_argument("no closed-form family: " + why);
        extra["family"] = family_to_json(cf->family);
        extra["basis"] = cf->basis;
        rep = certified_bound(*cf, *sys, bd_N);
      } else if (bd_kind == "theorem1") {
        LambdaInput in;
        if (!bd_lambda.empty()) in.values = parse_number_list(bd_lambda);
        if (!bd_family.empty()) in.family = family_from_json(json::parse(bd_family));
        if (in.values.empty() && !in.family && sys) {
          std::string why;
          auto cf = auto_family(*sys, &why);
          if (!cf) throw std::invalid_argument("no Lambda_k family: " + why);
          in.family = cf->family;
        }
        in.truncate = bd_truncate;
        rep = theorem1_bound(in, m, M, T, bd_N, bd_K);
      } else if (bd_kind == "bilinear") {
        rep = bilinear_bound(bd_r, m, M, T, bd_a, bd_N);
      } else if (bd_kind == "analytic") {
        rep = analytic_bound(bd_r, bd_n, m, M, T, bd_ar, bd_N);
      } else if (bd_kind == "hopfield") {
        rep = hopfield_bound(bd_r, bd_n, M, T, bd_a, bd_b, bd_N);
      } else {
        throw std::invalid_argument("unknown --kind '" + bd_kind + "'");
      }
      result = bound_to_json(rep);
      for (auto& [k, v] : extra.items()) result[k] = v;
    } else if (*rd) {
      const SystemSpec sys = rd_sys.load().resolved();
      Dataset data;
      if (!rd_data.empty()) {
        data = read_csv_file(rd_data, sys.r, rd_M1);
      } else {
        data.n = sys.n;
        data.r = sys.r;
        data.M1 = 0.0;
        for (std::size_t i = 0; i < rd_N; ++i) {
          RandomStream rng(rd_seed, streams::sub(streams::kData, i));
          data.X.push_back(sample_ball(sys.n, sys.r, rng));
          data.Y.push_back(0.0);
        }
      }
      RademacherOptions ro;
      ro.n_controls = rd_controls;
      ro.n_eps = rd_eps;
      ro.max_pieces = rd_pieces;
      ro.seed = rd_seed;
      ro.threads = threads;
      result = rademacher_to_json(empirical_rademacher(data, sys, rd_K, ro));
      result["seed"] = rd_seed;
      std::string why;
      if (auto cf = auto_family(sys, &why)) {
        try {
          result["certified"] = bound_to_json(certified_bound(*cf, sys, static_cast<double>(data.size())));
        } catch (const NotCertifiedError& e) {
          result["certified"] = json{{"status", "not certified"}, {"reason", e.what()}};
        }
      } else {
        result["certified"] = json{{"status", "not certified"}, {"reason", why}};
      }
    } else if (*er) {
      const SystemFile file = er_sys.load();
      const SystemSpec sys = file.resolved();
      SeriesEvaluator ev(sys, er_K);
      Dataset data;
      if (!er_data.empty()) {
        data = read_csv_file(er_data, sys.r, er_M1);
      } else {
        RandomStream prng(er_seed, streams::kPlanted);
        const ControlPath planted =
            file.wrap_control(random_control(file.declared.m, file.declared.M, file.declared.T, er_pieces, prng));
        data = generate_planted(ev, planted, er_N, er_noise, std::numeric_limits<double>::infinity(), er_seed,
                                streams::kData, threads);
        result["planted_control"] = control_to_json(planted);
      }
      ErmOptions eo;
      eo.loss = parse_loss(er_loss);
      eo.max_iter = er_iter;
      eo.tol = er_tol;
      eo.seed = er_seed;
      eo.threads = threads;
      result["model"] = model_to_json(erm_fit(data, ev, eo));
      result["N"] = data.size();
      result["seed"] = er_seed;
    } else if (*ex) {
      const auto base = std::filesystem::path(ex_config).parent_path().string();
      json cfg_json = read_json_file(ex_config);
      if (ex_seed) cfg_json["seed"] = *ex_seed;
      const auto cfg = parse_experiment_config(cfg_json, base);
      result = generalization_experiment(cfg, threads).to_json();
    }
    write_json(result, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
