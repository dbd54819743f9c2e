#include "innerforge/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "innerforge/io.hpp"
#include "innerforge/lattice.hpp"
#include "innerforge/majorant.hpp"
#include "innerforge/toeplitz.hpp"

namespace innerforge {

namespace {

struct Common {
  std::string weight;
  std::string lattice;
  std::string window = "-40,40";
  std::string out;
  std::string plot;
  std::string tail_mode = "alpha_regular";
  double tail_width = 5.0;
  std::uint64_t seed = 1;
};

struct Session {
  std::string command;
  std::vector<std::string> args;
  Common common;
  std::ostream& out;

  RunConfig config() const {
    RunConfig rc;
    rc.window = parse_window(common.window);
    rc.tail.mode = TailPolicy::parse_mode(common.tail_mode);
    rc.tail.width_factor = common.tail_width;
    rc.seed = common.seed;
    if (!common.out.empty()) rc.out = common.out;
    if (!common.plot.empty()) rc.plot = common.plot;
    rc.validate();
    return rc;
  }

  Weight weight() const {
    if (common.weight.empty()) throw Error(ErrorKind::usage, "--weight is required");
    return read_weight(common.weight);
  }

  Lattice lattice(Interval window) const {
    if (common.lattice.empty()) throw Error(ErrorKind::usage, "--lattice is required");
    std::vector<double> pts = read_lattice(common.lattice);
    pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double x) { return !window.contains(x); }), pts.end());
    return Lattice(std::move(pts), window);
  }

  Certificate certificate(const std::vector<std::string>& files) const {
    // Output paths are not inputs.
    std::string bytes = command;
    for (std::size_t i = 0; i < args.size(); ++i) {
      const std::string& a = args[i];
      if (a == "--out" || a == "--plot" || a == "--csv" || a == "--points-out") {
        ++i;
        continue;
      }
      if (a.rfind("--out=", 0) == 0 || a.rfind("--plot=", 0) == 0 || a.rfind("--csv=", 0) == 0 ||
          a.rfind("--points-out=", 0) == 0)
        continue;
      bytes += '\0' + a;
    }
    for (const auto& f : files)
      if (!f.empty()) bytes += '\0' + read_file(f);
    Certificate c;
    c.command = command;
    c.inputs_digest = hex_digest(fnv1a(bytes));
    c.seed = common.seed;
    return c;
  }

  /// Writes the certificate, prints the summary line, maps failed checks to failure_code.
  int finish(const Certificate& cert, const std::string& summary, int failure_code = 2) const {
    if (!common.out.empty()) {
      std::ofstream f(common.out, std::ios::binary);
      if (!f) throw Error(ErrorKind::io, "cannot write " + common.out);
      f << cert.dump();
    }
    std::string failed;
    for (const auto& c : cert.checks)
      if (!c.pass)
        failed += " " + c.name + " (measured " + format_number(c.measured) + ", threshold " + format_number(c.threshold) + ")";
    out << command << ": " << (cert.pass() ? "PASS" : "FAIL") << " " << summary;
    if (!failed.empty()) out << " failed:" << failed;
    out << "\n";
    return cert.pass() ? 0 : failure_code;
  }
};

std::vector<double> uniform_grid(Interval w, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = i + 1 == n ? w.hi : w.lo + w.length() * static_cast<double>(i) / (n - 1);
  return g;
}

PhaseFunction phase_of(const Weight& w, Interval window, double shift = 0.0) {
  return {[w, shift](double x) { return w.alpha(x) + shift; }, [w](double x) { return w.alpha1(x); }, window, w};
}

// weight-check

int cmd_weight_check(const Session& s, std::size_t probes) {
  const RunConfig rc = s.config();
  const Weight w = s.weight();
  const RegularityReport r = regularity_report(w, rc.window, probes, 1.0, rc.seed);
  Certificate c = s.certificate({s.common.weight});
  c.constants = {{"m", r.m.value}, {"M", r.M.value}, {"C", r.C.value}, {"kappa_hat", r.kappa_hat},
                 {"c_hat", r.c_hat}, {"K0_hat", r.K0_hat}, {"C_upper", r.C_upper},
                 {"m_inner", r.m_inner}, {"M_inner", r.M_inner}, {"C_inner", r.C_inner}};
  c.add_check("comparability", r.comparability_pass, r.M.value / r.m.value, 2.0 * r.M_inner / r.m_inner);
  c.add_check("doubling", r.doubling_pass, r.C.value, 2.0 * r.C_inner);
  c.add_check("lower_growth", r.lower_growth_pass, r.kappa_hat, -1.0);
  return s.finish(c, "m=" + format_number(r.m.value) + " M=" + format_number(r.M.value) + " C=" + format_number(r.C.value) +
                         " kappa=" + format_number(r.kappa_hat));
}

// lattice

struct LatticeOpts {
  double shift = 0;
  std::optional<double> delta;
  double N0 = 20;
  std::optional<double> sep_min;
  std::string points_out;
};

int cmd_lattice(const Session& s, const LatticeOpts& o) {
  const RunConfig rc = s.config();
  const Weight w = s.weight();
  Lattice lat = s.common.lattice.empty() ? level_set(phase_of(w, rc.window, o.shift), rc.window, rc.root_tol)
                                         : s.lattice(rc.window);
  Certificate c = s.certificate({s.common.weight, s.common.lattice});
  const SeparationStats sep = separation_stats(w, lat);
  const GapComparability gc = gap_comparability(w, lat);
  c.constants = {{"points", static_cast<double>(lat.size())}, {"delta_sep", sep.delta_sep}, {"gap_max", sep.gap_max},
                 {"gap_c", gc.c}, {"gap_C", gc.C}};
  c.add_check("separated", sep.delta_sep > 0, sep.delta_sep, 0.0);
  std::string summary = "points=" + std::to_string(lat.size()) + " delta_sep=" + format_number(sep.delta_sep);
  if (o.delta) {
    const double sep_min = o.sep_min.value_or(0.5 * std::min(sep.delta_sep, kTwoPi));
    const RegularizationResult r = regularize(w, lat, *o.delta, o.N0, sep_min);
    c.constants["added"] = static_cast<double>(r.added);
    c.constants["sup_deviation"] = r.sup_deviation;
    c.constants["sup_at"] = r.sup_at;
    c.constants["separation"] = r.separation;
    c.add_check("regularized_band", r.sup_deviation <= r.certified_bound, r.sup_deviation, r.certified_bound);
    c.add_check("regularized_separation", r.separation >= sep_min, r.separation, sep_min);
    lat = r.lattice;
    summary += " added=" + std::to_string(r.added) + " sup=" + format_number(r.sup_deviation);
  }
  if (!o.points_out.empty()) {
    std::ofstream f(o.points_out, std::ios::binary);
    if (!f) throw Error(ErrorKind::io, "cannot write " + o.points_out);
    for (double x : lat.points()) f << format_number(x) << "\n";
  }
  return s.finish(c, summary);
}

// density

int cmd_density(const Session& s, const std::string& r_text, const std::string& kind, const std::string& csv) {
  const RunConfig rc = s.config();
  const Weight w = s.weight();
  const Lattice lat = s.lattice(rc.window);
  const std::vector<double> r = parse_list(r_text);
  if (kind != "upper" && kind != "lower") throw Error(ErrorKind::usage, "--kind must be upper or lower");
  const DensityReport rep = kind == "upper" ? upper_density(w, lat, r) : lower_density(w, lat, r);
  Series series{{"r", "ratio", "interval_left", "interval_right"}, {}};
  for (const auto& row : rep.rows) series.rows.push_back({row.r, row.ratio, row.interval_left, row.interval_right});
  if (csv.empty())
    write_csv(series, s.out);
  else
    emit_plotdata(series, csv);
  Certificate c = s.certificate({s.common.weight, s.common.lattice});
  c.constants = {{"limit_estimate", rep.limit_estimate}, {"threshold", rep.threshold}};
  c.extra["kind"] = kind;
  c.extra["trend"] = rep.trend;
  return s.finish(c, kind + "_density=" + format_number(rep.limit_estimate) + " threshold=" + format_number(rep.threshold));
}

// build-inner

int cmd_build_inner(const Session& s, std::size_t plot_points) {
  const RunConfig rc = s.config();
  const Weight w = s.weight();
  const Lattice lat = s.lattice(rc.window);
  const InnerJ J = InnerJ::build(w, lat, rc.tail);
  const DerivativeCertificate d = fit_derivative_certificate(J);
  double node_err = 0;
  for (std::size_t n = 0; n < lat.size(); ++n) node_err = std::max(node_err, std::abs(J.eval(lat[n]) - Complex(1.0, 0.0)));
  for (double m : lat.midpoints()) node_err = std::max(node_err, std::abs(J.eval(m) + Complex(1.0, 0.0)));
  Certificate c = s.certificate({s.common.weight, s.common.lattice});
  c.constants = {{"tail_bound", J.tail_bound()}, {"log_cstar", J.log_cstar()}, {"N0", static_cast<double>(d.N0)},
                 {"slope_upper", d.slope_upper}, {"slope_lower", d.slope_lower}, {"C_upper", d.C_upper},
                 {"C_lower", d.C_lower}};
  c.truncation_budget = J.tail_bound();
  c.add_check("node_exactness", node_err == 0.0, node_err, 0.0);
  c.extra["inner"] = inner_to_json(J);
  if (rc.plot) {
    Series series{{"x", "argJ"}, {}};
    for (double x : uniform_grid(rc.window, plot_points)) series.rows.push_back({x, J.arg(x)});
    emit_plotdata(series, *rc.plot);
  }
  return s.finish(c, "nodes=" + std::to_string(lat.size()) + " tail_bound=" + format_number(J.tail_bound()) +
                         " N0=" + std::to_string(d.N0));
}

// approximate

struct ApproxOpts {
  double shift = 0;
  std::size_t grid = 10000;
  double ratio_band = 16.0;
  bool force = false;
};

int cmd_approximate(const Session& s, const ApproxOpts& o) {
  const RunConfig rc = s.config();
  const Weight w = s.weight();
  PhaseOptions po;
  po.grid_points = o.grid;
  po.ratio_band = o.ratio_band;
  po.force = o.force;
  po.seed = rc.seed;
  const PhaseFunction f = phase_of(w, rc.window, o.shift);
  const InnerJ J = approximate_phase(w, f, rc.tail, po);
  const PhaseCertificate& pc = *J.certificate();
  Certificate c = s.certificate({s.common.weight});
  c.constants = {{"constant", pc.constant}, {"sup_error", pc.sup_error}, {"ratio_min", pc.ratio_min},
                 {"ratio_max", pc.ratio_max}, {"nodes", static_cast<double>(J.lattice().size())}};
  c.truncation_budget = pc.tail_budget;
  c.add_check("phase_bound", pc.sup_error <= pc.bound + pc.tail_budget, pc.sup_error, pc.bound + pc.tail_budget);
  c.add_check("monotone", pc.monotone, pc.monotone ? 1.0 : 0.0, 1.0);
  if (pc.forced) c.warnings.push_back("hypothesis check forced");
  if (rc.plot) {
    Series series{{"x", "f", "argJ"}, {}};
    for (double x : uniform_grid(rc.window, std::min<std::size_t>(o.grid, 4001)))
      series.rows.push_back({x, f.f(x), J.arg(x) + pc.constant});
    emit_plotdata(series, *rc.plot);
  }
  return s.finish(c, "sup=" + format_number(pc.sup_error) + " bound=" + format_number(pc.bound + pc.tail_budget), 4);
}

// zero-set

struct ZeroOpts {
  std::string symbol;
  std::string h;
  std::string h_growth = "bounded";
  std::optional<double> eps;
  std::optional<double> sep_min;
  std::string r_list;
};

int cmd_zero_set(const Session& s, const ZeroOpts& o) {
  const RunConfig rc = s.config();
  Symbol sym;
  if (!o.symbol.empty()) {
    if (!s.common.weight.empty()) throw Error(ErrorKind::usage, "--symbol and --weight are exclusive");
    sym = read_symbol(o.symbol);
  } else {
    sym.alpha = s.weight();
  }
  if (!o.h.empty()) sym.h = read_samples(o.h, GrowthClass::parse(o.h_growth));
  const Lattice lat = s.lattice(rc.window);
  ZeroSetConfig zc;
  zc.tail = rc.tail;
  zc.eps = o.eps;
  zc.sep_min = o.sep_min;
  zc.seed = rc.seed;
  if (!o.r_list.empty()) zc.r_list = parse_list(o.r_list);
  const ZeroSetWitness wit = zero_set_pipeline(sym, lat, zc);
  double max_T = 0;
  for (const auto& r : wit.residuals) max_T = std::max(max_T, r.abs_T);
  bool sandwich = true;
  for (std::size_t i = 0; i < wit.grid.size(); ++i) {
    const double lb = std::log(bracket(wit.grid[i]));
    sandwich = sandwich && wit.log_m[i] >= std::log(wit.growth.c) - wit.growth.N * lb &&
               wit.log_m[i] <= std::log(wit.growth.C) + wit.growth.N * lb;
  }
  Certificate c = s.certificate({o.symbol, s.common.weight, s.common.lattice, o.h});
  c.constants = {{"upper_density", wit.upper_density}, {"delta", wit.delta}, {"eps", wit.eps}, {"N0", wit.N0},
                 {"N", wit.growth.N}, {"c", wit.growth.c}, {"C", wit.growth.C},
                 {"derivative_floor", wit.derivative_floor}, {"added", static_cast<double>(wit.regularization.added)},
                 {"zygmund", wit.zygmund}};
  c.truncation_budget = wit.J->tail_bound() + wit.I->tail_bound();
  c.warnings = wit.warnings;
  c.add_check("density_gate", wit.upper_density < 1.0 / kTwoPi, wit.upper_density, 1.0 / kTwoPi);
  c.add_check("zeros_exact", max_T == 0.0, max_T, 0.0);
  c.add_check("growth_sandwich", sandwich, wit.growth.N, wit.growth.N);
  c.add_check("derivative_floor", wit.derivative_floor > 0, wit.derivative_floor, 0.0);
  Json table = Json::array();
  for (const auto& r : wit.residuals)
    table.push_back({{"lambda", r.lambda}, {"original", r.original}, {"abs_T", r.abs_T}, {"abs_Tprime", r.abs_Tprime},
                     {"m", r.m}, {"floor", r.floor_value}});
  c.extra["nodes"] = table;
  c.extra["inserted"] = wit.regularization.added;
  if (rc.plot) {
    Series series{{"x", "log_m"}, {}};
    for (std::size_t i = 0; i < wit.grid.size(); ++i) series.rows.push_back({wit.grid[i], wit.log_m[i]});
    emit_plotdata(series, *rc.plot);
  }
  return s.finish(c, "D=" + format_number(wit.upper_density) + " N=" + format_number(wit.growth.N) +
                         " floor=" + format_number(wit.derivative_floor), 4);
}

// necessity

int cmd_necessity(const Session& s, double delta, double N0) {
  const RunConfig rc = s.config();
  const Weight w = s.weight();
  const Lattice lat = s.lattice(rc.window);
  const NecessityCertificate nc = necessity_certificate(w, lat, delta, N0);
  Certificate c = s.certificate({s.common.weight, s.common.lattice});
  c.constants = {{"delta", nc.delta}, {"N0", nc.N0}, {"lower_density", nc.lower_density}, {"slope", nc.slope}};
  Json rows = Json::array();
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : nc.rows) {
    rows.push_back({{"a", r.a}, {"count", r.count}, {"block_count", r.block_count}, {"block_pass", r.block_pass},
                    {"value", r.value}});
    worst = std::min(worst, r.value - delta * r.a);
  }
  c.extra["rows"] = rows;
  c.add_check("telescoped", worst > 0, worst, 0.0);
  return s.finish(c, "rows=" + std::to_string(nc.rows.size()) + " slope=" + format_number(nc.slope));
}

// majorant

struct MajorantOpts {
  std::string theta;
  std::string omega;
  std::string growth = "log";
  std::optional<double> eps;
};

int cmd_majorant(const Session& s, const MajorantOpts& o) {
  const RunConfig rc = s.config();
  if (o.omega.empty()) throw Error(ErrorKind::usage, "--omega is required");
  MajorantProblem p;
  p.theta = o.theta.empty() ? BlaschkeInner{1.0, {}} : read_theta(o.theta);
  p.omega = read_samples(o.omega, GrowthClass::parse(o.growth));
  p.window = rc.window;
  MajorantConfig mc;
  mc.tail = rc.tail;
  mc.eps = o.eps;
  mc.seed = rc.seed;
  const MajorantWitness wit = majorant_pipeline(p, mc);
  const MinorantReport rep = verify_minorant(wit);
  Certificate c = s.certificate({o.theta, o.omega});
  c.constants = {{"eps", wit.eps}, {"inf_alpha1", wit.inf_alpha1}, {"poisson_norm", wit.poisson_norm},
                 {"N", wit.growth.N}, {"N0", static_cast<double>(wit.sinc.N0)}, {"delta_sinc", wit.sinc.delta},
                 {"C_maj", wit.C_maj}, {"ratio_at_origin", wit.ratio_at_origin}, {"zygmund", wit.zygmund}};
  c.truncation_budget = wit.I->tail_bound();
  c.warnings = wit.warnings;
  c.add_check("minorant", rep.max_ratio <= 1.0, rep.max_ratio, 1.0);
  c.add_check("nontrivial", rep.nontriviality >= 1e-6, rep.nontriviality, 1e-6);
  c.add_check("sinc_budget", wit.sinc.delta * (wit.sinc.N0 + 1) < wit.eps, wit.sinc.delta * (wit.sinc.N0 + 1), wit.eps);
  if (rc.plot) {
    Series series{{"x", "omega", "f_final", "ratio"}, {}};
    for (std::size_t i = 0; i < wit.grid.size(); ++i)
      series.rows.push_back({wit.grid[i], wit.omega[i], wit.f_final[i], wit.ratio[i]});
    emit_plotdata(series, *rc.plot);
  }
  return s.finish(c, "N0=" + std::to_string(wit.sinc.N0) + " max_ratio=" + format_number(rep.max_ratio) +
                         " C_maj=" + format_number(wit.C_maj));
}

// oracle-test

int cmd_oracle_test(const Session& s, std::size_t count, double tol) {
  SeededRng rng(s.common.seed);
  std::vector<double> nodes;
  for (int k = -6; k <= 7; ++k) nodes.push_back(kTwoPi * k);
  const HalfIndicator u(nodes);
  double worst_half = 0;
  std::size_t done = 0;
  while (done < count) {
    const double x = rng.uniform(-40.0, 40.0);
    bool near = false;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      near = near || std::abs(x - nodes[k]) < 1e-6;
      if (k < u.mids().size()) near = near || std::abs(x - u.mids()[k]) < 1e-6;
    }
    if (near) continue;
    const double closed = hilbert_piecewise(u, x);
    const double quad = hilbert_quadrature(u, x);
    worst_half = std::max(worst_half, std::abs(closed - quad) / (1 + std::abs(closed)));
    ++done;
  }
  // Indicator of (0, 1): (1/π)(log|x| - log|x - 1| + log(2)/2).
  const PiecewiseConstant ind({{0.0, 1.0, 1.0}}, 0.0);
  double worst_ind = 0;
  for (std::size_t i = 0; i < count; ++i) {
    double x = rng.uniform(-10.0, 10.0);
    if (std::abs(x) < 1e-3 || std::abs(x - 1) < 1e-3) x += 0.5;
    const double exact = (std::log(std::abs(x)) - std::log(std::abs(x - 1)) + 0.5 * std::log(2.0)) / kPi;
    const double err = std::max(std::abs(hilbert_piecewise(ind, x) - exact), std::abs(hilbert_quadrature(ind, x) - exact));
    worst_ind = std::max(worst_ind, err / (1 + std::abs(exact)));
  }
  Certificate c = s.certificate({});
  c.constants = {{"count", static_cast<double>(count)}};
  c.quadrature_budget = std::max(worst_half, worst_ind);
  c.add_check("half_indicator_2piZ", worst_half <= tol, worst_half, tol);
  c.add_check("indicator_unit_interval", worst_ind <= tol, worst_ind, tol);
  return s.finish(c, "worst=" + format_number(std::max(worst_half, worst_ind)) + " tol=" + format_number(tol), 4);
}

void add_common(CLI::App* sub, Common& c, bool weight, bool lattice) {
  if (weight) sub->add_option("--weight", c.weight, "Weight JSON file");
  if (lattice) sub->add_option("--lattice", c.lattice, "Lattice file, one point per line");
  sub->add_option("--window", c.window, "Window a,b")->capture_default_str();
  sub->add_option("--seed", c.seed, "Probe seed")->capture_default_str();
  sub->add_option("--out", c.out, "Certificate JSON path");
  sub->add_option("--plot", c.plot, "Plot-data CSV path");
  sub->add_option("--tail-mode", c.tail_mode, "alpha_regular or zero")->capture_default_str();
  sub->add_option("--tail-width", c.tail_width, "Tail extension in window alpha-lengths")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Meromorphic inner functions, Toeplitz kernel witnesses and majorants", "innerforge"};
  app.require_subcommand(1);
  Common common;
  std::function<int(Session&)> handler;

  std::size_t probes = 10000;
  auto* wc = app.add_subcommand("weight-check", "Regularity diagnostics for a weight");
  add_common(wc, common, true, false);
  wc->add_option("--probes", probes, "Probe count")->capture_default_str();
  wc->callback([&] { handler = [&](Session& s) { return cmd_weight_check(s, probes); }; });

  LatticeOpts lo;
  auto* la = app.add_subcommand("lattice", "Level set or regularization of a lattice");
  add_common(la, common, true, true);
  la->add_option("--shift", lo.shift, "Level-set shift c in {alpha + c in 2 pi Z}");
  la->add_option("--delta", lo.delta, "Regularize with this delta");
  la->add_option("--N0", lo.N0, "Block length in alpha units")->capture_default_str();
  la->add_option("--sep-min", lo.sep_min, "Minimal alpha-separation of inserted points");
  la->add_option("--points-out", lo.points_out, "Write resulting points");
  la->callback([&] { handler = [&](Session& s) { return cmd_lattice(s, lo); }; });

  std::string r_text = "10,100,1000", kind = "upper", csv;
  auto* de = app.add_subcommand("density", "Upper or lower density ratios");
  add_common(de, common, true, true);
  de->add_option("--r", r_text, "Alpha-lengths r")->capture_default_str();
  de->add_option("--kind", kind, "upper or lower")->capture_default_str();
  de->add_option("--csv", csv, "CSV path (stdout when omitted)");
  de->callback([&] { handler = [&](Session& s) { return cmd_density(s, r_text, kind, csv); }; });

  std::size_t plot_points = 4001;
  auto* bi = app.add_subcommand("build-inner", "Build J with {J = 1} equal to the lattice");
  add_common(bi, common, true, true);
  bi->add_option("--plot-points", plot_points, "Samples in the arg J plot")->capture_default_str();
  bi->callback([&] { handler = [&](Session& s) { return cmd_build_inner(s, plot_points); }; });

  ApproxOpts ao;
  auto* ap = app.add_subcommand("approximate", "Approximate the phase f = alpha + shift by arg J");
  add_common(ap, common, true, false);
  ap->add_option("--shift", ao.shift, "Constant added to alpha");
  ap->add_option("--grid", ao.grid, "Grid points for the bound")->capture_default_str();
  ap->add_option("--ratio-band", ao.ratio_band, "Allowed spread of f'/alpha'")->capture_default_str();
  ap->add_flag("--force", ao.force, "Continue when the hypothesis check fails");
  ap->callback([&] { handler = [&](Session& s) { return cmd_approximate(s, ao); }; });

  ZeroOpts zo;
  auto* zs = app.add_subcommand("zero-set", "Toeplitz kernel element vanishing on a lattice superset");
  add_common(zs, common, true, true);
  zs->add_option("--symbol", zo.symbol, "Symbol JSON {alpha, h, K1}; replaces --weight");
  zs->add_option("--h-samples", zo.h, "CSV samples of h in arg U = -alpha + h");
  zs->add_option("--h-growth", zo.h_growth, "bounded, log or poly:K")->capture_default_str();
  zs->add_option("--eps", zo.eps, "Override epsilon");
  zs->add_option("--sep-min", zo.sep_min, "Override insertion separation");
  zs->add_option("--r", zo.r_list, "Alpha-lengths for the density gate");
  zs->callback([&] { handler = [&](Session& s) { return cmd_zero_set(s, zo); }; });

  double nd = 0.5, nN0 = 10;
  auto* ne = app.add_subcommand("necessity", "Telescoped counting certificate for a dense lattice");
  add_common(ne, common, true, true);
  ne->add_option("--delta", nd, "delta")->capture_default_str();
  ne->add_option("--N0", nN0, "Block length in alpha units")->capture_default_str();
  ne->callback([&] { handler = [&](Session& s) { return cmd_necessity(s, nd, nN0); }; });

  MajorantOpts mo;
  auto* mj = app.add_subcommand("majorant", "Minorant witness |f| <= e^-Omega in the model space");
  add_common(mj, common, false, false);
  mj->add_option("--theta", mo.theta, "Blaschke JSON {a, zeros}; default S_1");
  mj->add_option("--omega", mo.omega, "CSV samples of Omega");
  mj->add_option("--growth", mo.growth, "Growth class of Omega")->capture_default_str();
  mj->add_option("--eps", mo.eps, "Override epsilon");
  mj->callback([&] { handler = [&](Session& s) { return cmd_majorant(s, mo); }; });

  std::size_t oc = 100;
  double otol = 1e-6;
  auto* ot = app.add_subcommand("oracle-test", "Closed-form conjugates against quadrature");
  add_common(ot, common, false, false);
  ot->add_option("--count", oc, "Points per oracle")->capture_default_str();
  ot->add_option("--tol", otol, "Relative tolerance")->capture_default_str();
  ot->callback([&] { handler = [&](Session& s) { return cmd_oracle_test(s, oc, otol); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "innerforge: usage error: " << e.what() << "\n";
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Session session{command, args, common, out};
  try {
    return handler(session);
  } catch (const Error& e) {
    err << "innerforge " << command << ": " << e.what();
    if (e.measured()) err << " (measured " << format_number(*e.measured());
    if (e.measured() && e.threshold()) err << ", threshold " << format_number(*e.threshold());
    if (e.measured()) err << ")";
    err << "\n";
    out << command << ": REFUSED " << to_string(e.kind()) << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "innerforge " << command << ": numeric error: " << e.what() << "\n";
    return 4;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace innerforge
