#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cfnet/growth.hpp"
#include "cfnet/network.hpp"
#include "cfnet/reldeg.hpp"
#include "cfnet/series.hpp"
#include "cfnet/sim.hpp"

namespace cfnet {

using Json = nlohmann::ordered_json;

/// Accepts "p/q" strings, decimal strings and JSON numbers. Numbers are read
/// through their decimal text, so 0.25 becomes exactly 1/4.
Coeff coeff_from_json(const Json& j);

/// {"m", "degree", "terms": [{"word": [...], "coeff": "p/q"}]}. Only the
/// certified-exact part is written; "degree" is its truncation.
Json series_to_json(const Series& s);
Series series_from_json(const Json& j);

/// Terms list into a series over {x0..xm} truncated at its longest word.
/// "word" may be an int array or text such as "x0 x1".
Series series_from_terms(const Json& terms, int m);

NetworkSpec network_from_json(const Json& j);
Json network_to_json(const NetworkSpec& net);

/// Reads and parses a net file. Throws ParseError on malformed content.
NetworkSpec read_network_file(const std::string& path, std::string* raw = nullptr);

Json to_json(const RelDegReport& r);
Json to_json(const PredictionReport& p);
Json to_json(const PairReport& p);
Json to_json(const GrowthBound& b);
Json to_json(const GenericityStats& s);
Json to_json(const ValidationReport& v, bool with_signals);
Json trajectory_metadata(const Trajectory& t);

void write_abel_csv(std::ostream& os, const AbelSequence& a);
void write_histogram_csv(std::ostream& os, const GenericityStats& s);
void write_trajectory_csv(std::ostream& os, const Trajectory& t);
void write_series_csv(std::ostream& os, const Series& s);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Shortest decimal that reads back to the same double ("nan" / "inf" aside).
std::string format_double(double x);

}  // namespace cfnet
