#include "cfnet/json_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cfnet/errors.hpp"

namespace cfnet {

Coeff coeff_from_json(const Json& j) {
  if (j.is_string()) return parse_coeff(j.get<std::string>());
  if (j.is_number_integer()) return parse_coeff(j.dump());
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) throw ParseError("non-finite coefficient");
    return parse_coeff(j.dump());
  }
  throw ParseError("coefficient must be a string or a number, got " + j.dump());
}

Json series_to_json(const Series& s) {
  const Series exact = s.exact_part();
  Json terms = Json::array();
  for (const auto& [w, c] : exact.terms()) terms.push_back({{"word", w.letters()}, {"coeff", format_coeff(c)}});
  return {{"m", exact.alphabet_bound()}, {"degree", exact.max_degree()}, {"terms", std::move(terms)}};
}

namespace {

Word word_from_json(const Json& j, int m) {
  if (j.is_string()) return parse_word(j.get<std::string>(), m);
  if (!j.is_array()) throw ParseError("word must be an array of letter indices or a string");
  std::vector<int> letters;
  for (const Json& x : j) {
    if (!x.is_number_integer()) throw ParseError("letter index must be an integer");
    const int v = x.get<int>();
    if (v < 0 || v > m) throw AlphabetError("letter x" + std::to_string(v) + " outside x0..x" + std::to_string(m));
    letters.push_back(v);
  }
  return Word(letters);
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace

Series series_from_terms(const Json& terms, int m) {
  if (!terms.is_array()) throw ParseError("terms must be an array");
  std::vector<std::pair<Word, Coeff>> parsed;
  int degree = 0;
  for (const Json& t : terms) {
    Word w = word_from_json(field(t, "word"), m);
    degree = std::max(degree, static_cast<int>(w.size()));
    parsed.emplace_back(std::move(w), coeff_from_json(field(t, "coeff")));
  }
  Series out(m, degree);
  for (const auto& [w, c] : parsed) out.add(w, c);
  return out;
}

Series series_from_json(const Json& j) {
  const int m = field(j, "m").get<int>();
  if (m < 0) throw AlphabetError("alphabet bound m must be nonnegative");
  Series loose = series_from_terms(field(j, "terms"), m);
  const int degree = j.contains("degree") ? j.at("degree").get<int>() : loose.max_degree();
  if (degree < loose.max_degree()) throw ParseError("a term is longer than the declared degree");
  Series out(m, degree);
  for (const auto& [w, c] : loose.terms()) out.add(w, c);
  return out;
}

NetworkSpec network_from_json(const Json& j) {
  try {
    const Json& nodes_json = field(j, "nodes");
    if (!nodes_json.is_array()) throw ParseError("nodes must be an array");
    const std::size_t m = nodes_json.size();
    if (j.contains("m") && j.at("m").get<std::size_t>() != m) throw ParseError("m does not match the number of nodes");
    std::vector<std::vector<Coeff>> W;
    for (const Json& row : field(j, "W")) {
      std::vector<Coeff> r;
      for (const Json& x : row) r.push_back(coeff_from_json(x));
      W.push_back(std::move(r));
    }
    std::vector<NodeSource> nodes;
    for (const Json& n : nodes_json) {
      const std::string kind = field(n, "kind").get<std::string>();
      if (kind == "poly") {
        nodes.emplace_back(series_from_terms(field(n, "terms"), 1));
      } else if (kind == "maximal") {
        nodes.emplace_back(MaximalSeriesSpec{coeff_from_json(field(n, "K")), coeff_from_json(field(n, "M"))});
      } else {
        throw ParseError("unknown node kind \"" + kind + "\"");
      }
    }
    return NetworkSpec(std::move(W), std::move(nodes));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed network: ") + e.what());
  }
}

Json network_to_json(const NetworkSpec& net) {
  Json W = Json::array();
  for (const auto& row : net.weights()) {
    Json r = Json::array();
    for (const Coeff& w : row) r.push_back(format_coeff(w));
    W.push_back(std::move(r));
  }
  Json nodes = Json::array();
  for (int k = 1; k <= net.size(); ++k) {
    if (const auto* spec = std::get_if<MaximalSeriesSpec>(&net.node(k))) {
      nodes.push_back({{"kind", "maximal"}, {"K", format_coeff(spec->K)}, {"M", format_coeff(spec->M)}});
    } else {
      nodes.push_back({{"kind", "poly"}, {"terms", series_to_json(std::get<Series>(net.node(k)))["terms"]}});
    }
  }
  return {{"m", net.size()}, {"W", std::move(W)}, {"nodes", std::move(nodes)}};
}

NetworkSpec read_network_file(const std::string& path, std::string* raw) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (raw) *raw = text;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return network_from_json(j);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json to_json(const RelDegReport& r) {
  Json j = {{"status", to_string(r.status)}, {"truncation", r.truncation}};
  if (r.defined()) {
    j["r"] = r.r;
    j["leading"] = format_coeff(r.leading);
  }
  return j;
}

Json to_json(const PredictionReport& p) {
  Json nodes = Json::array();
  for (const NodeCondition& c : p.nodes) {
    Json n = {{"node", c.node}, {"incoming", c.incoming}, {"distinct", c.distinct}};
    if (c.tied_sum) n["tied_sum"] = format_coeff(*c.tied_sum);
    nodes.push_back(std::move(n));
  }
  Json acc = Json::object();
  for (const auto& [k, v] : p.accumulated.value) acc[std::to_string(k)] = v;
  Json edges = Json::array();
  for (const auto& [a, b] : p.subgraph.edges) edges.push_back({a, b});
  return {{"predicted", p.r_pred},
          {"condition", to_string(p.condition)},
          {"certified", p.certified()},
          {"subgraph", {{"nodes", p.subgraph.nodes}, {"edges", std::move(edges)}}},
          {"accumulated", std::move(acc)},
          {"nodes", std::move(nodes)}};
}

Json to_json(const PairReport& p) {
  Json j = {{"from", p.source}, {"to", p.sink}, {"measured", to_json(p.measured)}};
  if (p.predicted) j["prediction"] = to_json(*p.predicted);
  if (!p.prediction_error.empty()) j["prediction_error"] = p.prediction_error;
  j["consistent"] = p.consistent;
  return j;
}

Json to_json(const GrowthBound& b) {
  return {{"Kbar", b.Kbar}, {"Mbar", b.Mbar}, {"m", b.m}, {"M_inf", b.M_inf}, {"t_star", b.t_star}};
}

Json to_json(const GenericityStats& s) {
  Json pairs = Json::array();
  for (std::size_t j = 0; j < s.pairs.size(); ++j) {
    for (std::size_t i = 0; i < s.pairs[j].size(); ++i) {
      const PairCounts& c = s.pairs[j][i];
      Json hist = Json::object();
      for (const auto& [r, n] : c.degree_histogram) hist[std::to_string(r)] = n;
      pairs.push_back({{"from", i + 1},
                       {"to", j + 1},
                       {"defined", c.defined},
                       {"undefined", c.undefined},
                       {"undetermined", c.undetermined},
                       {"degrees", std::move(hist)}});
    }
  }
  return {{"samples", s.samples},
          {"seed", s.seed},
          {"degree", s.degree},
          {"pairs", std::move(pairs)},
          {"histogram", {{"bin_edges", s.bin_edges}, {"counts", s.bin_counts}}}};
}

Json to_json(const ValidationReport& v, bool with_signals) {
  Json j = {{"series", series_to_json(v.d)}, {"max_error", v.max_error}, {"expected_order", v.expected_order}};
  if (with_signals) {
    j["predicted"] = v.predicted;
    j["simulated"] = v.simulated;
  }
  return j;
}

Json trajectory_metadata(const Trajectory& t) {
  Json j = {{"escape_time", t.escape_time ? number_or_null(*t.escape_time) : Json(nullptr)},
            {"escaped_nodes", t.escaped_nodes},
            {"threshold", t.threshold},
            {"integrator", t.integrator},
            {"steps_taken", t.steps_taken}};
  if (!t.picard_changes.empty()) j["picard_changes"] = t.picard_changes;
  return j;
}

void write_abel_csv(std::ostream& os, const AbelSequence& a) {
  os << "n,a_n,Mhat_n\n";
  for (std::size_t k = 0; k < a.a.size(); ++k) {
    os << k << ',' << format_coeff(a.a[k]) << ',' << (k == 0 ? std::string() : format_double(a.Mhat[k])) << '\n';
  }
}

void write_histogram_csv(std::ostream& os, const GenericityStats& s) {
  os << "bin_left,bin_right,count\n";
  for (std::size_t b = 0; b < s.bin_counts.size(); ++b) {
    os << format_double(s.bin_edges[b]) << ',' << format_double(s.bin_edges[b + 1]) << ',' << s.bin_counts[b] << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  os << 't';
  for (std::size_t k = 0; k < t.y.size(); ++k) os << ",y_" << k + 1;
  os << '\n';
  for (std::size_t n = 0; n < t.t.size(); ++n) {
    os << format_double(t.t[n]);
    for (const Signal& y : t.y) os << ',' << format_double(y[n]);
    os << '\n';
  }
}

void write_series_csv(std::ostream& os, const Series& s) {
  os << "word,coeff\n";
  const Series exact = s.exact_part();
  for (const auto& [w, c] : exact.terms()) os << '"' << format_word(w) << "\"," << format_coeff(c) << '\n';
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cfnet
