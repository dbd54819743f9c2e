#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "innerforge/common.hpp"
#include "innerforge/conjugation.hpp"
#include "innerforge/inner.hpp"
#include "innerforge/toeplitz.hpp"
#include "innerforge/weights.hpp"

namespace innerforge {

using Json = nlohmann::json;

/// {"family": "linear"|"power"|"sampled"|"sum", "kappa", "scale", "samples": [[x, α'], ...],
///  "terms": [[coefficient, {weight}], ...]}
Weight parse_weight(const Json& j);
Weight read_weight(const std::string& path);

/// {"a": 1.0, "zeros": [[re, im], ...]}
BlaschkeInner parse_theta(const Json& j);
BlaschkeInner read_theta(const std::string& path);

/// {"alpha": {weight}, "h": {"samples": [[x, h], ...], "growth": "bounded"}, "K1": 0}
/// with "h" and "K1" optional.
Symbol parse_symbol(const Json& j);
Symbol read_symbol(const std::string& path);

/// One point per line; blank lines and '#' comments skipped.
std::vector<double> read_lattice(const std::string& path);

/// Two-column CSV "x,value"; a non-numeric first line is taken as a header.
SampledFunction read_samples(const std::string& path, GrowthClass growth = {});

std::string read_file(const std::string& path);

/// Comma-separated list of numbers ("10,100,1000").
std::vector<double> parse_list(const std::string& text);

/// "a,b" with a < b.
Interval parse_window(const std::string& text);

/// 12 significant digits.
std::string format_number(double v);

struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// CSV with header; io error when the series is empty or the path unwritable.
void emit_plotdata(const Series& series, const std::string& path);
void write_csv(const Series& series, std::ostream& out);

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0;
  double threshold = 0;
};

/// Machine-readable outcome of one command. Keys serialize in sorted order.
struct Certificate {
  std::string command;
  std::string inputs_digest;
  std::uint64_t seed = 0;
  std::map<std::string, double> constants;
  std::vector<Check> checks;
  double truncation_budget = 0;
  double quadrature_budget = 0;
  std::vector<std::string> warnings;
  Json extra = Json::object();

  void add_check(std::string name, bool pass, double measured, double threshold);
  bool pass() const;
  Json to_json() const;
  std::string dump() const;
};

struct RunConfig {
  Interval window{-40.0, 40.0};
  TailPolicy tail;
  double root_tol = 1e-12;
  double quad_tol = 1e-10;
  double oracle_tol = 1e-6;
  std::size_t grid_points = 10000;
  double grid_per_unit = 8.0;
  std::optional<std::string> out;
  std::optional<std::string> plot;
  bool force = false;
  std::uint64_t seed = 1;

  /// Usage error on an empty window or a nonpositive tolerance.
  void validate() const;
};

/// Serialized summary of a built J (nodes, constants, tail bound).
Json inner_to_json(const InnerJ& J);

}  // namespace innerforge
