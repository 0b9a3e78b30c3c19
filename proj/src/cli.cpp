#include "cfnet/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cfnet/errors.hpp"
#include "cfnet/growth.hpp"
#include "cfnet/json_io.hpp"
#include "cfnet/network.hpp"
#include "cfnet/reldeg.hpp"
#include "cfnet/sim.hpp"

namespace cfnet {

namespace {

// Thrown for bad flag combinations that CLI11 cannot express; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string net;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  int degree = 5;
  std::optional<int> from, to;
  bool schema = false;

  // reldeg
  bool certify = false;
  int budget = kDefaultSubgraphBudget;

  // bounds / abel
  std::string K = "1", M = "1";
  int m = 1;
  int n = 10;

  // simulate / validate
  double T = 0.1;
  int steps = 1000;
  std::vector<std::string> input;
  double v = 1.0;
  double threshold = 1e9;
  double rtol = 1e-9;

  // montecarlo
  int samples = 1000;
  int jobs = 1;
  std::optional<int> coeff_from, coeff_to;
  std::string coeff_word = "x0 x0 x1";
  int bins = 20;
};

Json schema_for(const std::string& cmd) {
  const Json envelope_props = {{"tool", {{"type", "string"}}},
                               {"version", {{"type", "string"}}},
                               {"command", {{"type", "string"}}},
                               {"input_hash", {{"type", "string"}}},
                               {"params", {{"type", "object"}}},
                               {"warnings", {{"type", "array"}, {"items", {{"type", "string"}}}}}};
  const Json series = {{"type", "object"},
                       {"required", {"m", "degree", "terms"}},
                       {"properties",
                        {{"m", {{"type", "integer"}}},
                         {"degree", {{"type", "integer"}}},
                         {"terms",
                          {{"type", "array"},
                           {"items",
                            {{"type", "object"},
                             {"properties",
                              {{"word", {{"type", "array"}, {"items", {{"type", "integer"}}}}},
                               {"coeff", {{"type", "string"}}}}}}}}}}}};
  const Json reldeg = {{"type", "object"},
                       {"properties",
                        {{"status", {{"enum", {"defined", "undefined", "undetermined_at_truncation"}}}},
                         {"r", {{"type", "integer"}}},
                         {"leading", {{"type", "string"}}},
                         {"truncation", {{"type", "integer"}}}}}};
  Json result;
  if (cmd == "iomap") {
    result = series;
  } else if (cmd == "reldeg") {
    result = {{"type", "object"},
              {"description", "one pair report, or {pairs: [...], complete: bool} when no pair is given"},
              {"properties",
               {{"from", {{"type", "integer"}}},
                {"to", {{"type", "integer"}}},
                {"measured", reldeg},
                {"prediction",
                 {{"type", "object"},
                  {"properties",
                   {{"predicted", {{"type", "integer"}}},
                    {"condition", {{"enum", {"fully_connected", "distinct", "repeated_sum_nonzero", "violated_unknown"}}}},
                    {"certified", {{"type", "boolean"}}},
                    {"subgraph", {{"type", "object"}}},
                    {"accumulated", {{"type", "object"}}},
                    {"nodes", {{"type", "array"}}}}}}},
                {"prediction_error", {{"type", "string"}}},
                {"consistent", {{"type", "boolean"}}}}}};
  } else if (cmd == "bounds") {
    result = {{"type", "object"},
              {"properties",
               {{"Kbar", {{"type", "number"}}},
                {"Mbar", {{"type", "number"}}},
                {"m", {{"type", "integer"}}},
                {"M_inf", {{"type", "number"}}},
                {"t_star", {{"type", "number"}}}}}};
  } else if (cmd == "abel") {
    result = {{"type", "object"},
              {"description", "CSV columns n,a_n,Mhat_n with a_n exact"},
              {"properties",
               {{"a", {{"type", "array"}, {"items", {{"type", "string"}}}}},
                {"Mhat", {{"type", "array"}, {"items", {{"type", {"number", "null"}}}}}}}}};
  } else if (cmd == "simulate") {
    result = {{"type", "object"},
              {"description", "CSV columns t,y_1..y_m; metadata in the JSON sidecar"},
              {"properties",
               {{"t", {{"type", "array"}}},
                {"y", {{"type", "array"}}},
                {"escape_time", {{"type", {"number", "null"}}}},
                {"escaped_nodes", {{"type", "array"}}},
                {"threshold", {{"type", "number"}}},
                {"integrator", {{"type", "string"}}}}}};
  } else if (cmd == "montecarlo") {
    result = {{"type", "object"},
              {"description", "histogram CSV columns bin_left,bin_right,count"},
              {"properties",
               {{"samples", {{"type", "integer"}}},
                {"seed", {{"type", "integer"}}},
                {"degree", {{"type", "integer"}}},
                {"pairs", {{"type", "array"}}},
                {"histogram", {{"type", "object"}}}}}};
  } else if (cmd == "validate") {
    result = {{"type", "object"},
              {"properties",
               {{"series", series},
                {"max_error", {{"type", "number"}}},
                {"max_error_half_T", {{"type", "number"}}},
                {"ratio", {{"type", "number"}}},
                {"expected_ratio", {{"type", "number"}}}}}};
  }
  Json props = envelope_props;
  props["result"] = result;
  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
          {"title", std::string(kToolName) + " " + cmd},
          {"type", "object"},
          {"required", {"tool", "version", "command", "input_hash", "params", "result"}},
          {"properties", std::move(props)}};
}

class Runner {
 public:
  Runner(std::string cmd, const Options& opt, std::ostream& out) : cmd_(std::move(cmd)), opt_(opt), out_(out) {}

  int run() {
    if (cmd_ == "iomap") return iomap();
    if (cmd_ == "reldeg") return reldeg();
    if (cmd_ == "bounds") return bounds();
    if (cmd_ == "abel") return abel();
    if (cmd_ == "simulate") return simulate();
    if (cmd_ == "montecarlo") return montecarlo();
    if (cmd_ == "validate") return validate();
    throw UsageError("unknown subcommand " + cmd_);
  }

  Json params = Json::object();

 private:
  NetworkSpec load() {
    if (opt_.net.empty()) throw UsageError("--net is required for " + cmd_);
    std::string raw;
    NetworkSpec net = read_network_file(opt_.net, &raw);
    hash_ = fnv1a_hex(raw);
    params["net"] = opt_.net;
    warnings_ = net.warnings();
    return net;
  }

  std::string format(const char* fallback) const { return opt_.format.empty() ? fallback : opt_.format; }

  std::string input_hash() const { return hash_.empty() ? fnv1a_hex(params.dump()) : hash_; }

  Json envelope(Json result) const {
    return {{"tool", kToolName},  {"version", kToolVersion}, {"command", cmd_}, {"input_hash", input_hash()},
            {"params", params},   {"warnings", warnings_},   {"result", std::move(result)}};
  }

  std::string csv_header() const {
    return std::string("# ") + kToolName + " " + kToolVersion + " " + cmd_ + " input_hash=" + input_hash() +
           " params=" + params.dump() + "\n";
  }

  void emit(const std::string& text) {
    if (opt_.out.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(opt_.out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + opt_.out);
    f << text;
  }

  void emit_json(Json result) { emit(envelope(std::move(result)).dump(2) + "\n"); }

  void check_format(std::initializer_list<const char*> allowed, const std::string& f) const {
    for (const char* a : allowed)
      if (f == a) return;
    throw UsageError("--format " + f + " is not available for " + cmd_);
  }

  std::pair<int, int> pair() const {
    if (!opt_.from || !opt_.to) throw UsageError(cmd_ + " needs --from and --to");
    return {*opt_.from, *opt_.to};
  }

  int iomap() {
    NetworkSpec net = load();
    auto [i, j] = pair();
    params["from"] = i;
    params["to"] = j;
    params["degree"] = opt_.degree;
    const std::string f = format("json");
    check_format({"json", "csv"}, f);
    Series d = io_map(net, i, j, opt_.degree);
    if (f == "csv") {
      std::ostringstream os;
      os << csv_header();
      write_series_csv(os, d);
      emit(os.str());
    } else {
      emit_json(series_to_json(d));
    }
    return 0;
  }

  int reldeg() {
    NetworkSpec net = load();
    params["degree"] = opt_.degree;
    params["budget"] = opt_.budget;
    params["certify"] = opt_.certify;
    check_format({"json"}, format("json"));
    if (opt_.from.has_value() != opt_.to.has_value()) throw UsageError("give both --from and --to, or neither");
    if (opt_.from) {
      const int i = *opt_.from, j = *opt_.to;
      params["from"] = i;
      params["to"] = j;
      PairReport report;
      report.source = i;
      report.sink = j;
      report.measured = measure_io_reldeg(net, i, j, opt_.degree);
      try {
        report.predicted = predict_io_reldeg(net, i, j, opt_.degree, opt_.budget);
      } catch (const ConditionError& e) {
        report.prediction_error = e.what();
      }
      if (report.predicted && report.predicted->certified() && report.measured.defined()) {
        report.consistent = report.predicted->r_pred == report.measured.r;
      }
      if (opt_.certify) {
        if (!report.measured.defined()) {
          throw ConditionError("relative degree of v" + std::to_string(i) + " -> y" + std::to_string(j) + " is " +
                               to_string(report.measured.status) + " at degree " + std::to_string(opt_.degree));
        }
        if (!report.predicted || !report.predicted->certified()) {
          throw ConditionError("no sufficient condition certifies the graph prediction for v" + std::to_string(i) +
                               " -> y" + std::to_string(j));
        }
        if (!report.consistent) throw ConditionError("certified prediction disagrees with the measured series");
      }
      emit_json(to_json(report));
      return 0;
    }
    auto matrix = complete_reldeg(net, opt_.degree);
    Json pairs = Json::array();
    for (const auto& row : matrix)
      for (const auto& p : row) pairs.push_back(to_json(p));
    const bool complete = has_complete_relative_degree(matrix);
    if (opt_.certify && !complete) throw ConditionError("the network does not have complete relative degree");
    emit_json({{"pairs", std::move(pairs)}, {"complete", complete}});
    return 0;
  }

  int bounds() {
    check_format({"json"}, format("json"));
    GrowthBound b;
    if (!opt_.net.empty()) {
      NetworkSpec net = load();
      if (!net.all_maximal()) throw ModelError("bounds from a net file needs every node to be a maximal series");
      Coeff Kbar = 0, Mbar = 0;
      for (int k = 1; k <= net.size(); ++k) {
        const auto& s = std::get<MaximalSeriesSpec>(net.node(k));
        if (s.K > Kbar) Kbar = s.K;
        if (s.M > Mbar) Mbar = s.M;
      }
      b = m_inf_bound(Kbar.get_d(), Mbar.get_d(), net.size());
    } else {
      params["K"] = opt_.K;
      params["M"] = opt_.M;
      params["m"] = opt_.m;
      b = m_inf_bound(parse_coeff(opt_.K).get_d(), parse_coeff(opt_.M).get_d(), opt_.m);
    }
    emit_json(to_json(b));
    return 0;
  }

  int abel() {
    params["m"] = opt_.m;
    params["K"] = opt_.K;
    params["M"] = opt_.M;
    params["n"] = opt_.n;
    const std::string f = format("csv");
    check_format({"json", "csv"}, f);
    if (opt_.m < 1) throw DomainError("m must be at least 1");
    if (opt_.n < 0) throw DomainError("n must be nonnegative");
    const Coeff K = parse_coeff(opt_.K), M = parse_coeff(opt_.M);
    if (sgn(K) <= 0 || sgn(M) <= 0) throw DomainError("K and M must be positive");
    AbelSequence a = abel_taylor(opt_.m, K, M, opt_.n);
    if (f == "csv") {
      std::ostringstream os;
      os << csv_header();
      write_abel_csv(os, a);
      emit(os.str());
    } else {
      Json as = Json::array(), mh = Json::array();
      for (std::size_t k = 0; k < a.a.size(); ++k) {
        as.push_back(format_coeff(a.a[k]));
        mh.push_back(k == 0 ? Json(nullptr) : Json(a.Mhat[k]));
      }
      emit_json({{"a", std::move(as)}, {"Mhat", std::move(mh)}});
    }
    return 0;
  }

  std::vector<Signal> constant_inputs(const NetworkSpec& net, const Grid& grid) {
    if (opt_.input.empty()) return {};
    if (static_cast<int>(opt_.input.size()) != net.size()) throw UsageError("--input needs one value per node");
    std::vector<Signal> v;
    for (const std::string& s : opt_.input) {
      const double x = parse_coeff(s).get_d();
      v.push_back(Signal(grid.size(), x));
    }
    params["input"] = opt_.input;
    return v;
  }

  int simulate() {
    NetworkSpec net = load();
    params["T"] = opt_.T;
    params["steps"] = opt_.steps;
    const std::string f = format("csv");
    check_format({"json", "csv"}, f);
    Grid grid{0.0, opt_.T, opt_.steps};
    grid.validate();
    std::vector<Signal> v = constant_inputs(net, grid);
    Trajectory traj;
    if (net.all_maximal()) {
      params["threshold"] = opt_.threshold;
      params["rtol"] = opt_.rtol;
      OdeOptions ode;
      ode.threshold = opt_.threshold;
      ode.rtol = opt_.rtol;
      traj = simulate_maximal_ode(net, v, grid, ode);
    } else if (net.all_polynomial()) {
      if (v.empty()) v.assign(static_cast<std::size_t>(net.size()), Signal(grid.size(), 0.0));
      traj = simulate_picard(net, v, grid);
    } else {
      throw ModelError("simulate needs either all maximal nodes or all polynomial nodes");
    }
    if (f == "json") {
      Json result = {{"t", traj.t}};
      Json ys = Json::array();
      for (const Signal& y : traj.y) {
        Json col = Json::array();
        for (double x : y) col.push_back(std::isfinite(x) ? Json(x) : Json(nullptr));
        ys.push_back(std::move(col));
      }
      result["y"] = std::move(ys);
      Json meta = trajectory_metadata(traj);
      for (auto& [k, val] : meta.items()) result[k] = val;
      emit_json(std::move(result));
      return 0;
    }
    std::ostringstream os;
    os << csv_header();
    write_trajectory_csv(os, traj);
    emit(os.str());
    if (!opt_.out.empty()) {
      std::ofstream side(opt_.out + ".json", std::ios::binary);
      if (!side) throw UsageError("cannot write " + opt_.out + ".json");
      side << envelope(trajectory_metadata(traj)).dump(2) << "\n";
    }
    return 0;
  }

  int montecarlo() {
    if (!opt_.seed) throw UsageError("--seed is required for montecarlo");
    NetworkSpec net = load();
    const std::string f = format("json");
    check_format({"json", "csv"}, f);
    std::vector<std::vector<int>> pattern;
    for (const auto& row : net.weights()) {
      std::vector<int> r;
      for (const Coeff& w : row) r.push_back(is_zero(w) ? 0 : 1);
      pattern.push_back(std::move(r));
    }
    std::vector<NodeSource> nodes;
    for (int k = 1; k <= net.size(); ++k) nodes.push_back(net.node(k));
    GenericityOptions g;
    g.samples = opt_.samples;
    g.seed = *opt_.seed;
    g.degree = opt_.degree;
    g.jobs = opt_.jobs;
    g.coeff_source = opt_.coeff_from.value_or(1);
    g.coeff_sink = opt_.coeff_to.value_or(net.size());
    g.coeff_word = parse_word(opt_.coeff_word, 1);
    g.histogram_bins = opt_.bins;
    if (g.samples < 1) throw DomainError("--samples must be at least 1");
    if (g.histogram_bins < 1) throw DomainError("--bins must be at least 1");
    net.check_node(g.coeff_source);
    net.check_node(g.coeff_sink);
    params["samples"] = g.samples;
    params["seed"] = g.seed;
    params["degree"] = g.degree;
    params["coeff_from"] = g.coeff_source;
    params["coeff_to"] = g.coeff_sink;
    params["coeff_word"] = format_word(g.coeff_word);
    params["bins"] = g.histogram_bins;
    // --jobs changes wall time only, never the result, so it stays out of params.
    GenericityStats stats = genericity_sample(pattern, nodes, g);
    if (f == "csv") {
      std::ostringstream os;
      os << csv_header();
      write_histogram_csv(os, stats);
      emit(os.str());
    } else {
      emit_json(to_json(stats));
    }
    return 0;
  }

  int validate() {
    NetworkSpec net = load();
    auto [i, j] = pair();
    params["from"] = i;
    params["to"] = j;
    params["degree"] = opt_.degree;
    params["T"] = opt_.T;
    params["steps"] = opt_.steps;
    params["v"] = opt_.v;
    check_format({"json"}, format("json"));
    Grid full{0.0, opt_.T, opt_.steps};
    Grid half{0.0, opt_.T / 2, opt_.steps};
    const double v = opt_.v;
    ValidationReport a = validate_io_map(net, i, j, opt_.degree, Signal(full.size(), v), full);
    ValidationReport b = validate_io_map(net, i, j, opt_.degree, Signal(half.size(), v), half);
    Json result = to_json(a, false);
    result["max_error_half_T"] = b.max_error;
    result["ratio"] = b.max_error > 0 ? Json(a.max_error / b.max_error) : Json(nullptr);
    result["expected_ratio"] = std::ldexp(1.0, opt_.degree + 1);
    emit_json(std::move(result));
    return 0;
  }

  std::string cmd_;
  const Options& opt_;
  std::ostream& out_;
  std::string hash_;
  std::vector<std::string> warnings_;
};

void add_common(CLI::App* sub, Options& o, bool net, bool pair) {
  if (net) sub->add_option("--net", o.net, "network JSON file");
  sub->add_option("--out", o.out, "write the result here instead of stdout");
  sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_flag("--schema", o.schema, "print the JSON schema of this command's output and exit");
  if (pair) {
    sub->add_option("--from", o.from, "source node i (input v_i)");
    sub->add_option("--to", o.to, "sink node j (output y_j)");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Closed-loop generating series, relative degree and escape-time analysis for additive "
               "Chen-Fliess networks."};
  app.name(kToolName);
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  auto* iomap = app.add_subcommand("iomap", "generating series d_ji of v_i -> y_j, exact to --degree");
  add_common(iomap, o, true, true);
  iomap->add_option("--degree", o.degree, "truncation degree")->check(CLI::NonNegativeNumber);

  auto* reldeg = app.add_subcommand("reldeg", "measured and graph-predicted relative degree");
  add_common(reldeg, o, true, true);
  reldeg->add_option("--degree", o.degree, "truncation degree for measurement and conditions")
      ->check(CLI::NonNegativeNumber);
  reldeg->add_option("--budget", o.budget, "node budget for forward-path enumeration")->check(CLI::PositiveNumber);
  reldeg->add_flag("--certify", o.certify, "fail (exit 1) unless the relative degree is defined and certified");

  auto* bounds = app.add_subcommand("bounds", "growth constant M_inf and escape-time bound t*");
  add_common(bounds, o, true, false);
  bounds->add_option("--K", o.K, "node constant bound Kbar");
  bounds->add_option("--M", o.M, "node growth bound Mbar");
  bounds->add_option("--m", o.m, "number of nodes");

  auto* abel = app.add_subcommand("abel", "Taylor data of the maximal-network natural response");
  add_common(abel, o, false, false);
  abel->add_option("--m", o.m, "number of nodes");
  abel->add_option("--K", o.K, "node constant K");
  abel->add_option("--M", o.M, "growth constant M");
  abel->add_option("--n", o.n, "highest order");

  auto* simulate = app.add_subcommand("simulate", "simulate the network on [0, T]");
  add_common(simulate, o, true, false);
  simulate->add_option("--T", o.T, "horizon")->check(CLI::PositiveNumber);
  simulate->add_option("--steps", o.steps, "grid intervals")->check(CLI::PositiveNumber);
  simulate->add_option("--input", o.input, "constant input per node (default 0)")->delimiter(',');
  simulate->add_option("--threshold", o.threshold, "blow-up threshold for escape detection")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--rtol", o.rtol, "relative tolerance of the adaptive integrator")->check(CLI::PositiveNumber);

  auto* mc = app.add_subcommand("montecarlo", "random-weight genericity experiment on the net's 0/1 pattern");
  add_common(mc, o, true, false);
  mc->add_option("--seed", o.seed, "RNG seed (required)");
  mc->add_option("--samples", o.samples, "number of sample networks");
  mc->add_option("--degree", o.degree, "truncation degree")->check(CLI::NonNegativeNumber);
  mc->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  mc->add_option("--coeff-from", o.coeff_from, "source of the recorded coefficient");
  mc->add_option("--coeff-to", o.coeff_to, "sink of the recorded coefficient (default m)");
  mc->add_option("--coeff-word", o.coeff_word, "word of the recorded coefficient");
  mc->add_option("--bins", o.bins, "histogram bins");

  auto* validate = app.add_subcommand("validate", "compare F_{d_ji}[v] with a simulated closed loop");
  add_common(validate, o, true, true);
  validate->add_option("--degree", o.degree, "truncation degree N")->check(CLI::NonNegativeNumber);
  validate->add_option("--T", o.T, "horizon; the error is also reported at T/2")->check(CLI::PositiveNumber);
  validate->add_option("--steps", o.steps, "grid intervals")->check(CLI::PositiveNumber);
  validate->add_option("--v", o.v, "constant input applied at the source");

  std::vector<const char*> argv{kToolName};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  if (o.schema) {
    out << schema_for(cmd).dump(2) << "\n";
    return 0;
  }
  if (!o.net.empty() && !std::filesystem::is_regular_file(o.net)) {
    err << "error: cannot read net file " << o.net << "\n";
    return 2;
  }

  Runner runner(cmd, o, out);
  try {
    return runner.run();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    Json j = {{"tool", kToolName},
              {"version", kToolVersion},
              {"command", cmd},
              {"params", runner.params},
              {"error", {{"kind", e.kind()}, {"message", e.what()}}}};
    out << j.dump(2) << "\n";
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cfnet
