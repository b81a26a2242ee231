// boxlab: command-line front end.
//
//   boxlab box      --d 3 --kind pr --v 0.5
//   boxlab bounds   --d 2 --sweep 0:1:101 --format csv
//   boxlab protocol --d 3 --v 1
//   boxlab lhv      --d 3
//   boxlab seesaw   --d 2 --dim 2 --restarts 20 --seed 42
//
// Exit codes: 0 success, 2 bad arguments, 3 numerical invariant failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "boxlab/boxlab.hpp"

namespace {

using namespace boxlab;
using io::json;

constexpr int kExitArgs = 2;
constexpr int kExitNumerical = 3;

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open output file " + path);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void check_visibility(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("--v must lie in [0, 1]");
}

/// v * PR^d + (1 - v) * uniform.
Box noisy_pr(std::size_t d, double v) {
  check_visibility(v);
  return mix(pr_box(d), uniform_box(d), v);
}

std::vector<double> parse_sweep(const std::string& spec) {
  double a = 0.0, b = 0.0;
  long n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || !in.eof())
    throw InvalidArgument("--sweep expects start:stop:count, got '" + spec + "'");
  if (n < 1) throw InvalidArgument("--sweep count must be >= 1");
  check_visibility(a);
  check_visibility(b);
  std::vector<double> out;
  for (long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

std::optional<double> lhv_value(std::size_t d) {
  try {
    return classical_max(bell_bd(d)).value;
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

void merge(json& into, const json& from) {
  for (const auto& [k, val] : from.items()) into[k] = val;
}

json report_json(std::optional<double> v, const BoundReport& r) {
  json j;
  if (v) j["v"] = *v;
  merge(j, io::to_json(r));
  return j;
}

// --- subcommands -------------------------------------------------------------

struct BoxArgs {
  std::size_t d = 2;
  std::string kind = "pr";
  double v = 1.0;
  std::string out;
};

int run_box(const BoxArgs& a) {
  Box box = a.kind == "pr" ? noisy_pr(a.d, a.v) : uniform_box(a.d);
  json j{{"kind", a.kind}, {"d", a.d}};
  if (a.kind == "pr") j["v"] = a.v;
  j["bell_value"] = eval(bell_bd(a.d), box);
  j["box"] = io::to_json(box);
  emit(io::dump(j), a.out);
  return 0;
}

struct BoundsArgs {
  std::size_t d = 2;
  double v = 1.0;
  std::string sweep;
  std::string box_file;
  std::string format = "json";
  std::string out;
};

int run_bounds(const BoundsArgs& a) {
  const bool csv = a.format == "csv";
  if (!a.box_file.empty()) {
    const Box box = io::box_from_json_text(read_file(a.box_file));
    const auto r = bound_report(box);
    if (csv)
      emit(io::csv_header() + io::csv_row(std::nullopt, r), a.out);
    else
      emit(io::dump(report_json(std::nullopt, r)), a.out);
    return 0;
  }
  const std::vector<double> grid = a.sweep.empty() ? std::vector<double>{a.v} : parse_sweep(a.sweep);
  for (double v : grid) check_visibility(v);
  bell_bd(a.d);  // validates d before the classical search
  const auto lhv = lhv_value(a.d);
  std::vector<BoundReport> reports;
  for (double v : grid) reports.push_back(bound_report(noisy_pr(a.d, v), lhv));

  if (csv) {
    std::string text = io::csv_header();
    for (std::size_t i = 0; i < grid.size(); ++i) text += io::csv_row(grid[i], reports[i]);
    emit(text, a.out);
  } else if (a.sweep.empty()) {
    emit(io::dump(report_json(grid[0], reports[0])), a.out);
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back(report_json(grid[i], reports[i]));
    emit(io::dump(json{{"d", a.d}, {"sweep", a.sweep}, {"rows", std::move(rows)}}), a.out);
  }
  return 0;
}

struct ProtocolArgs {
  std::size_t d = 2;
  double v = 1.0;
  bool no_copy = false;
  bool local = false;
  std::string dilation = "generic";
  std::string dump_dilation;
  std::string out;
};

/// Maximally entangled pair measured in phase-twisted Fourier bases: a fixed
/// product realization used to show that local measurements reveal nothing.
DilationResult local_demo(std::size_t d) {
  const Register sa{"SA", d, Party::Alice}, sb{"SB", d, Party::Bob};
  const RegisterLayout shared_layout{sa, sb};
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(d * d));
  for (std::size_t s = 0; s < d; ++s) amps(static_cast<Eigen::Index>(s * d + s)) = 1.0 / std::sqrt(static_cast<double>(d));
  const StateVector shared(shared_layout, amps);
  const Matrix f = fourier_matrix(d).matrix();
  auto twisted = [&](std::size_t setting, double sign) {
    Matrix phase = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t s = 0; s < d; ++s)
      phase(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) =
          std::polar(1.0, sign * std::numbers::pi * static_cast<double>(setting * s) / static_cast<double>(d * d));
    return Matrix(f.adjoint() * phase);
  };
  std::vector<UnitaryOp> alice, bob;
  for (std::size_t x = 0; x < d; ++x) alice.push_back(coherent_measurement({"A", d, Party::Alice}, sa, twisted(x, 1.0)));
  for (std::size_t y = 0; y < d; ++y) bob.push_back(coherent_measurement({"B", d, Party::Bob}, sb, twisted(y, -1.0).conjugate()));
  return dilate_local(shared, alice, bob);
}

int run_protocol(const ProtocolArgs& a) {
  check_visibility(a.v);
  DilationResult dr = [&] {
    if (a.local) return local_demo(a.d);
    if (a.dilation == "pr") {
      if (a.v != 1.0) throw InvalidArgument("--dilation pr realizes the noiseless box only (--v 1)");
      return dilate_pr(a.d);
    }
    return dilate_generic(noisy_pr(a.d, a.v));
  }();
  const Box realized = extract_box(dr);
  double round_trip_error = 0.0;
  if (!a.local) {
    round_trip_error = realized.max_abs_diff(noisy_pr(a.d, a.v));
    if (round_trip_error > 1e-10) throw NumericalError("dilation does not reproduce the requested box");
  }
  const auto t = reveal_protocol(dr, !a.no_copy);
  const auto pt = product_test(dr.u);

  json j{{"dilation", dr.kind}};
  if (!a.local) j["v"] = a.v;
  j["bell_value"] = eval(bell_bd(a.d), realized);
  j["round_trip_error"] = round_trip_error;
  merge(j, io::to_json(t));
  j["is_product"] = pt.is_product;
  j["choi_entanglement_ebits"] = pt.choi_entanglement_ebits;
  if (!a.dump_dilation.empty()) emit(io::dump(io::to_json(dr)), a.dump_dilation);
  emit(io::dump(j), a.out);
  return 0;
}

struct LhvArgs {
  std::size_t d = 2;
  std::string out;
};

int run_lhv(const LhvArgs& a) {
  const auto f = bell_bd(a.d);
  const auto count = StrategyEnumerator(f.shape()).size();
  const auto m = classical_max(f);
  json j{{"d", a.d}, {"strategies", count}};
  merge(j, io::to_json(m));
  emit(io::dump(j), a.out);
  return 0;
}

struct SeesawArgs {
  std::size_t d = 2;
  std::size_t dim = 0;
  std::size_t restarts = 0;
  std::uint64_t seed = 0;
  std::size_t max_iters = 2000;
  std::string out;
};

int run_seesaw(const SeesawArgs& a) {
  const auto f = bell_bd(a.d);
  SeesawOptions opt;
  opt.local_dim = a.dim ? a.dim : a.d;
  opt.restarts = a.restarts ? a.restarts : (a.d == 2 ? 20 : 50);
  opt.seed = a.seed;
  opt.max_iters = a.max_iters;
  const auto r = seesaw_optimize(f, opt);
  const auto upper = quantum_upper(a.d);
  json j{{"d", a.d}, {"local_dim", opt.local_dim}, {"seed", a.seed}, {"restarts", opt.restarts},
         {"lower_bound", r.best_value}};
  j["quantum_upper"] = io::optional_number(upper);
  j["gap"] = upper ? json(*upper - r.best_value) : json(nullptr);
  merge(j, io::to_json(r));
  emit(io::dump(j), a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boxes, dilations and Tsirelson-type bounds"};
  app.require_subcommand(1);

  BoxArgs box;
  auto* c_box = app.add_subcommand("box", "print a PR or uniform box as JSON");
  c_box->add_option("--d", box.d, "dimension")->required();
  c_box->add_option("--kind", box.kind, "pr or uniform")->check(CLI::IsMember({"pr", "uniform"}));
  c_box->add_option("--v", box.v, "visibility of the PR box against uniform noise");
  c_box->add_option("--out", box.out, "output file");

  BoundsArgs bounds;
  auto* c_bounds = app.add_subcommand("bounds", "evaluate the causal bounds on noisy PR boxes");
  c_bounds->add_option("--d", bounds.d, "dimension");
  auto* o_v = c_bounds->add_option("--v", bounds.v, "visibility");
  auto* o_sweep = c_bounds->add_option("--sweep", bounds.sweep, "visibility grid start:stop:count");
  auto* o_box = c_bounds->add_option("--box", bounds.box_file, "evaluate a box read from a JSON file instead");
  o_v->excludes(o_sweep);
  o_box->excludes(o_v)->excludes(o_sweep);
  c_bounds->add_option("--format", bounds.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  c_bounds->add_option("--out", bounds.out, "output file");

  ProtocolArgs proto;
  auto* c_proto = app.add_subcommand("protocol", "run the reveal protocol on a dilation");
  c_proto->add_option("--d", proto.d, "dimension");
  auto* o_pv = c_proto->add_option("--v", proto.v, "visibility of the realized box");
  c_proto->add_flag("--no-copy", proto.no_copy, "skip the input copy registers");
  auto* o_local = c_proto->add_flag("--local", proto.local, "use a fixed product (local measurement) dilation");
  auto* o_dil = c_proto->add_option("--dilation", proto.dilation, "generic or pr")->check(CLI::IsMember({"generic", "pr"}));
  o_local->excludes(o_pv)->excludes(o_dil);
  c_proto->add_option("--dump-dilation", proto.dump_dilation, "write the dilation (unitary and layout) as JSON");
  c_proto->add_option("--out", proto.out, "output file");

  LhvArgs lhv;
  auto* c_lhv = app.add_subcommand("lhv", "classical maximum of B^d by enumeration");
  c_lhv->add_option("--d", lhv.d, "dimension");
  c_lhv->add_option("--out", lhv.out, "output file");

  SeesawArgs see;
  auto* c_see = app.add_subcommand("seesaw", "see-saw lower bound on the quantum value of B^d");
  c_see->add_option("--d", see.d, "dimension");
  c_see->add_option("--dim", see.dim, "local Hilbert space dimension (default d)");
  c_see->add_option("--restarts", see.restarts, "random restarts (default 20 for d = 2, else 50)");
  c_see->add_option("--seed", see.seed, "seed");
  c_see->add_option("--max-iters", see.max_iters, "sweeps per restart");
  c_see->add_option("--out", see.out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgs;
  }

  try {
    if (*c_box) return run_box(box);
    if (*c_bounds) return run_bounds(bounds);
    if (*c_proto) return run_protocol(proto);
    if (*c_lhv) return run_lhv(lhv);
    if (*c_see) return run_seesaw(see);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgs;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitArgs;
}
