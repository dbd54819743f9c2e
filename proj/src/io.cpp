#include "innerforge/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "innerforge/lattice.hpp"

namespace innerforge {

namespace {

double parse_number(std::string_view text, const std::string& context) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw Error(ErrorKind::io, context + ": not a number: '" + std::string(text) + "'");
  return v;
}

Json parse_json_file(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::io, path + ": " + e.what());
  }
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Weight parse_weight(const Json& j) {
  try {
    const std::string family = j.at("family").get<std::string>();
    const double scale = j.value("scale", 1.0);
    if (family == "linear") return Weight::linear(scale);
    if (family == "power") return Weight::power(j.at("kappa").get<double>(), scale);
    if (family == "sampled") {
      std::vector<double> x, a1;
      for (const auto& row : j.at("samples")) {
        x.push_back(row.at(0).get<double>());
        a1.push_back(row.at(1).get<double>());
      }
      return Weight::sampled(std::move(x), std::move(a1));
    }
    if (family == "sum") {
      std::vector<std::pair<double, Weight>> terms;
      for (const auto& t : j.at("terms")) terms.emplace_back(t.at(0).get<double>(), parse_weight(t.at(1)));
      return Weight::sum(std::move(terms));
    }
    throw Error(ErrorKind::usage, "unknown weight family '" + family + "'");
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::io, std::string("weight: ") + e.what());
  }
}

Weight read_weight(const std::string& path) { return parse_weight(parse_json_file(path)); }

Symbol parse_symbol(const Json& j) {
  try {
    Symbol sym;
    sym.alpha = parse_weight(j.at("alpha"));
    if (j.contains("h")) {
      const Json& h = j.at("h");
      std::vector<double> x, v;
      for (const auto& p : h.at("samples")) {
        x.push_back(p.at(0).get<double>());
        v.push_back(p.at(1).get<double>());
      }
      sym.h = SampledFunction(std::move(x), std::move(v), GrowthClass::parse(h.value("growth", std::string("bounded"))));
    }
    sym.K1 = j.value("K1", 0.0);
    return sym;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::io, std::string("symbol: ") + e.what());
  }
}

Symbol read_symbol(const std::string& path) { return parse_symbol(parse_json_file(path)); }

BlaschkeInner parse_theta(const Json& j) {
  try {
    BlaschkeInner B;
    B.a = j.value("a", 0.0);
    if (j.contains("zeros"))
      for (const auto& z : j.at("zeros")) B.zeros.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    B.validate();
    return B;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::io, std::string("theta: ") + e.what());
  }
}

BlaschkeInner read_theta(const std::string& path) { return parse_theta(parse_json_file(path)); }

std::vector<double> read_lattice(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  try {
    return read_points(in);
  } catch (const Error& e) {
    throw Error(ErrorKind::io, path + ": " + e.what());
  }
}

SampledFunction read_samples(const std::string& path, GrowthClass growth) {
  std::istringstream in(read_file(path));
  std::vector<double> x, v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::io, path + ": line " + std::to_string(lineno) + ": expected x,value");
    const std::string ctx = path + ": line " + std::to_string(lineno);
    if (x.empty() && v.empty() && lineno == 1) {
      double probe = 0;
      const auto r = std::from_chars(line.data(), line.data() + comma, probe);
      if (r.ec != std::errc()) continue;  // header
    }
    x.push_back(parse_number(std::string_view(line).substr(0, comma), ctx));
    v.push_back(parse_number(std::string_view(line).substr(comma + 1), ctx));
  }
  return SampledFunction(std::move(x), std::move(v), growth);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    out.push_back(parse_number(std::string_view(text).substr(start, end - start), "list"));
    start = end + 1;
  }
  return out;
}

Interval parse_window(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 2 || !(v[0] < v[1])) throw Error(ErrorKind::usage, "window must be 'a,b' with a < b: " + text);
  return {v[0], v[1]};
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(const Series& series, std::ostream& out) {
  for (std::size_t c = 0; c < series.columns.size(); ++c) out << (c ? "," : "") << series.columns[c];
  out << '\n';
  for (const auto& row : series.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

void emit_plotdata(const Series& series, const std::string& path) {
  if (series.rows.empty() || series.columns.empty()) throw Error(ErrorKind::io, "empty series for " + path);
  for (const auto& row : series.rows)
    if (row.size() != series.columns.size()) throw Error(ErrorKind::io, "ragged series for " + path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  write_csv(series, out);
  if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

void Certificate::add_check(std::string name, bool pass, double measured, double threshold) {
  checks.push_back({std::move(name), pass, measured, threshold});
}

bool Certificate::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

Json Certificate::to_json() const {
  Json j;
  j["command"] = command;
  j["inputs_digest"] = inputs_digest;
  j["seed"] = seed;
  Json consts = Json::object();
  for (const auto& [k, v] : constants) consts[k] = finite_or_null(v);
  j["constants"] = consts;
  Json list = Json::array();
  for (const auto& c : checks)
    list.push_back({{"name", c.name}, {"pass", c.pass}, {"measured", finite_or_null(c.measured)},
                    {"threshold", finite_or_null(c.threshold)}});
  j["checks"] = list;
  j["error_budget"] = {{"truncation", finite_or_null(truncation_budget)},
                       {"quadrature", finite_or_null(quadrature_budget)},
                       {"total", finite_or_null(truncation_budget + quadrature_budget)}};
  j["warnings"] = warnings;
  j["pass"] = pass();
  if (!extra.empty()) j["details"] = extra;
  return j;
}

std::string Certificate::dump() const { return to_json().dump(2) + "\n"; }

void RunConfig::validate() const {
  if (!(window.lo < window.hi)) throw Error(ErrorKind::usage, "window must satisfy a < b");
  if (!(root_tol > 0) || !(quad_tol > 0) || !(oracle_tol > 0)) throw Error(ErrorKind::usage, "tolerances must be positive");
  if (!(tail.width_factor > 0)) throw Error(ErrorKind::usage, "tail width must be positive");
  if (grid_points < 2 || !(grid_per_unit > 0)) throw Error(ErrorKind::usage, "grid density must be positive");
}

Json inner_to_json(const InnerJ& J) {
  Json j;
  j["nodes"] = J.lattice().points();
  j["extended_nodes"] = J.u().nodes().size();
  j["tail_mode"] = std::string(to_string(J.tail().mode));
  j["tail_width"] = J.tail().width_factor;
  j["tail_bound"] = finite_or_null(J.tail_bound());
  j["log_cstar"] = finite_or_null(J.log_cstar());
  Json sig = Json::array();
  for (std::size_t n = 0; n < J.lattice().size(); ++n)
    sig.push_back({{"lambda", J.lattice()[n]}, {"jprime", finite_or_null(J.jprime_at_lambda(n))},
                   {"sigma_one", finite_or_null(J.sigma_one(n))}});
  j["node_data"] = sig;
  return j;
}

}  // namespace innerforge
