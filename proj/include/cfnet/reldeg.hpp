#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfnet/network.hpp"
#include "cfnet/series.hpp"

namespace cfnet {

enum class RelDegStatus { defined, undefined, undetermined_at_truncation };

const char* to_string(RelDegStatus s);

/// Outcome of matching c = c_N + K x0^(r-1) x1 + x0^(r-1) e against a series.
struct RelDegReport {
  RelDegStatus status = RelDegStatus::undetermined_at_truncation;
  int r = 0;          // valid when status == defined
  Coeff leading = 0;  // <c, x0^(r-1) x1> when defined
  int truncation = 0;

  bool defined() const { return status == RelDegStatus::defined; }
};

/// Measures the relative degree of a series over {x0, x1} from its
/// certified-exact part.
RelDegReport relative_degree(const Series& c);

/// Same, for a series known to vanish above its truncation (a polynomial). An
/// empty input-dependent support then means undefined rather than undetermined.
RelDegReport relative_degree(const Series& c, bool complete);

/// Largest degree to which a measurement is raised so that an acyclic
/// polynomial network's io map is seen in full.
inline constexpr int kCompleteDegreeCap = 16;

/// Measured relative degree of v_source -> y_sink at `degree`. Acyclic
/// polynomial networks whose io maps fit under kCompleteDegreeCap are computed
/// in full, so a vanishing input dependence is reported as undefined.
RelDegReport measure_io_reldeg(const NetworkSpec& net, int source, int sink, int degree);

/// Relative degree of a sum from the relative degrees and leading coefficients
/// of its terms. Only the group tied at the minimum degree decides: the sum is
/// defined iff the leading coefficients of that group do not cancel.
RelDegReport sum_reldeg_predict(const std::vector<RelDegReport>& reports);

struct AccumulatedDegrees {
  std::map<int, int> value;                   // node -> r+
  std::map<int, std::vector<int>> incoming;   // node -> sorted r+ of its subgraph predecessors
};

/// r+_source = r_source, r+_k = r_k + min over incoming r+, evaluated as a
/// node-weighted shortest path. Throws ConditionError when a node lacks a
/// positive degree.
AccumulatedDegrees accumulated_degrees(const Subgraph& g, const std::map<int, int>& node_degrees);

enum class Certificate { fully_connected, distinct, repeated_sum_nonzero, violated_unknown };

const char* to_string(Certificate c);

struct NodeCondition {
  int node = 0;
  std::vector<int> incoming;       // sorted accumulated degrees of predecessors
  bool distinct = true;
  std::optional<Coeff> tied_sum;   // weighted leading sum of the minimal group when it is repeated
};

struct PredictionReport {
  int r_pred = 0;
  Certificate condition = Certificate::violated_unknown;
  Subgraph subgraph;
  AccumulatedDegrees accumulated;
  std::vector<NodeCondition> nodes;

  bool certified() const { return condition != Certificate::violated_unknown; }
};

/// Graph-based prediction of the relative degree of d_ji. Certificates are
/// tried in order: the sink receives an edge from every other node; incoming
/// accumulated degrees are distinct at every node other than the source; the
/// tied minimal groups have a nonzero weighted leading sum, evaluated on the
/// subgraph-restricted network to `condition_degree`.
PredictionReport predict_io_reldeg(const NetworkSpec& net, int source, int sink, int condition_degree,
                                   int node_budget = kDefaultSubgraphBudget);

struct PairReport {
  int source = 0;
  int sink = 0;
  RelDegReport measured;
  std::optional<PredictionReport> predicted;
  std::string prediction_error;  // why no prediction was possible
  /// False only when a certified prediction disagrees with the measurement.
  bool consistent = true;
};

/// Measured (and, where possible, predicted) relative degree of every pair.
/// Entry [j-1][i-1] describes v_i -> y_j.
std::vector<std::vector<PairReport>> complete_reldeg(const NetworkSpec& net, int degree);

/// Whether every pair of the matrix has a defined measured relative degree.
bool has_complete_relative_degree(const std::vector<std::vector<PairReport>>& reports);

struct GenericityOptions {
  int samples = 1000;
  std::uint64_t seed = 0;
  int degree = 4;
  int jobs = 1;
  /// Coefficient recorded per sample: |<d_{sink,source}, word>|.
  int coeff_source = 1;
  int coeff_sink = 1;
  Word coeff_word;
  int histogram_bins = 20;
};

struct PairCounts {
  int defined = 0;
  int undefined = 0;
  int undetermined = 0;
  std::map<int, int> degree_histogram;  // r -> count, over defined samples
};

struct GenericityStats {
  int samples = 0;
  std::uint64_t seed = 0;
  int degree = 0;
  std::vector<std::vector<PairCounts>> pairs;  // [j-1][i-1]
  std::vector<double> coefficient;             // designated coefficient per sample, sample order
  std::vector<double> bin_edges;
  std::vector<int> bin_counts;
};

/// Uniform(0,1] weight draw used for one pattern entry; exposed so that tests
/// can reproduce a sample.
std::vector<std::vector<Coeff>> sample_weights(const std::vector<std::vector<int>>& pattern, std::uint64_t seed,
                                               int sample_index);

/// Replaces every 1 of `pattern` by an independent uniform (0,1] weight and
/// measures every pair's relative degree, `samples` times. Each draw is
/// converted exactly to a rational, so verdicts carry no rounding tolerance.
GenericityStats genericity_sample(const std::vector<std::vector<int>>& pattern, const std::vector<NodeSource>& nodes,
                                  const GenericityOptions& options);

}  // namespace cfnet
