#include "schurlab/cli.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "inputs.hpp"
#include "reports.hpp"
#include "schurlab/schurlab.hpp"
#include "selftest.hpp"

namespace schurlab::cli {

namespace {

struct Globals {
  std::string group = "Z1";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string output = "-";
  std::string format = "auto";
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Outcome {
  json params = json::object();
  std::vector<json> records;
  Table table;
  std::string default_format = "json";
  int exit_code = kExitOk;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(std::size_t v) { return std::to_string(v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Subcommand options, bound to CLI11 before parsing.

struct PhiOpts {
  std::string f;
  int radius = -1;
  bool psd = false;
};

struct DecomposeOpts {
  std::string builtin;
  std::string sequence_file;
  std::string n_range = "1:20";
  double p = 1.5;
  int sep_r = 2;
  int ext_R = 8;
  std::optional<double> eps;
  double eps_relative = 1e-3;
  std::size_t max_k = 16;
  double tol_match = 1e-9;
};

struct SchurOpts {
  std::string kernel;
  std::string f;
  int window_radius = 3;
  std::size_t trials = 50;
};

struct DeltaOpts {
  int F_radius = 1;
  std::string F_file;
  double p = 1.5;
  int K = 0;
  std::size_t profiles = 1;
  std::size_t restarts = 8;
  std::size_t max_sweeps = 200;
  bool oracle = false;
  std::size_t oracle_support = 4;
};

struct AmenOpts {
  std::string F_radii = "1,2,4";
  std::string F_shape = "ball";
  std::string p_ladder = "1.2,1.5,1.8,1.95";
  int K = 0;
  std::size_t profiles = 1;
  std::size_t restarts = 8;
  std::size_t max_sweeps = 200;
};

struct PercOpts {
  std::string model = "tiling:L=4";
  double p = 2.0;
  std::string s = "e";
  std::size_t N = 10'000;
};

struct MtpOpts {
  std::string model = "tiling:L=3";
  std::string s;
  std::size_t N = 100'000;
};

struct Thm54Opts {
  std::string schedule = "builtin:doubling";
  int F_radius = 1;
  std::string F_file;
  std::size_t N = 20'000;
};

std::vector<Element> parse_points(const Group& g, const std::string& text) {
  std::vector<Element> out;
  if (text.empty() || text == "e") return {g.identity()};
  return io::parse_element_list(g, text, ';');
}

// --- phi ---------------------------------------------------------------

Outcome cmd_phi(const Globals& gl, const PhiOpts& o) {
  const Group g = Group::parse(gl.group);
  const SparseFunction f = function_from_spec(g, o.f);
  Outcome out;
  out.default_format = "csv";
  out.params = {{"f", o.f}, {"radius", o.radius}, {"psd", o.psd}};

  std::vector<Element> points;
  if (o.radius < 0) {
    points = phi_kernel(f).support();
  } else {
    points = *g.ball_at_identity(o.radius);
  }
  out.table.header = {"element", "value"};
  for (const auto& s : points) {
    const double v = phi(f, s);
    out.records.push_back({{"record", "phi"}, {"s", io::element_to_json(g, s)}, {"value", v}});
    out.table.rows.push_back({g.format(s), num(v)});
  }
  json summary = {{"record", "phi_summary"},
                  {"points", points.size()},
                  {"support_size", f.support_size()},
                  {"phi_e", phi(f, g.identity())},
                  {"norm2_squared", power_sum(f, 2.0)}};
  if (o.psd) {
    summary["psd"] = to_json(gram_psd_check(phi_kernel(f), points, 1e-9, points.size()));
  }
  out.records.push_back(std::move(summary));
  return out;
}

// --- decompose -----------------------------------------------------------

Outcome cmd_decompose(const Globals& gl, const DecomposeOpts& o) {
  const Group g = Group::parse(gl.group);
  if (o.builtin.empty() == o.sequence_file.empty()) {
    throw ValidationError("decompose needs exactly one of --builtin and --sequence-file");
  }
  std::vector<SparseFunction> fs;
  int first = 0;
  if (!o.builtin.empty()) {
    const auto [a, b] = parse_range(o.n_range);
    first = a;
    fs = builtin_sequence(g, o.builtin, a, b, o.p);
  } else {
    fs = io::sequence_from_json(io::read_json_file(o.sequence_file), g);
    first = 1;
  }
  DecomposeParams params;
  params.sep_r = o.sep_r;
  params.ext_R = o.ext_R;
  params.eps = o.eps;
  params.eps_relative = o.eps_relative;
  params.max_k = o.max_k;
  params.tol_match = o.tol_match;
  const auto report = decompose_sequence(fs, o.p, params);

  Outcome out;
  out.params = {{"builtin", o.builtin},
                {"sequence_file", o.sequence_file},
                {"n_range", o.builtin.empty() ? json(nullptr) : json(o.n_range)},
                {"p", o.p},
                {"sep_r", o.sep_r},
                {"ext_R", o.ext_R},
                {"eps", o.eps ? json(*o.eps) : json(nullptr)},
                {"eps_relative", o.eps_relative},
                {"max_k", o.max_k},
                {"tol_match", o.tol_match}};
  json rec = to_json(g, report);
  rec["record"] = "decomposition";
  rec["first_index"] = first;
  out.records.push_back(std::move(rec));

  out.table.header = {"n", "residual_pp", "residual_inf", "dp"};
  for (const auto& s : report.separations) {
    out.table.header.push_back("sep_" + std::to_string(s.i) + "_" + std::to_string(s.j));
  }
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const int n = first + static_cast<int>(k);
    const std::optional<double> dp =
        k < report.dp_trajectory.size() ? std::optional<double>(report.dp_trajectory[k])
                                        : std::nullopt;
    json seps = json::object();
    std::vector<std::string> row = {std::to_string(n), num(report.residual_pp[k]),
                                    num(report.residual_inf[k]), opt_num(dp)};
    for (const auto& s : report.separations) {
      std::string cell;
      json value = nullptr;
      for (std::size_t t = 0; t < s.indices.size(); ++t) {
        if (s.indices[t] == k) {
          cell = std::to_string(s.distances[t]);
          value = s.distances[t];
        }
      }
      seps[std::to_string(s.i) + "-" + std::to_string(s.j)] = value;
      row.push_back(cell);
    }
    out.records.push_back({{"record", "trajectory"},
                           {"n", n},
                           {"residual_pp", report.residual_pp[k]},
                           {"residual_inf", report.residual_inf[k]},
                           {"dp", dp ? json(*dp) : json(nullptr)},
                           {"separations", seps}});
    out.table.rows.push_back(std::move(row));
  }
  return out;
}

// --- schur-check ---------------------------------------------------------

Outcome cmd_schur(const Globals& gl, const SchurOpts& o) {
  const Group g = Group::parse(gl.group);
  if (o.kernel.empty() == o.f.empty()) {
    throw ValidationError("schur-check needs exactly one of --kernel and --f");
  }
  if (o.window_radius < 0) throw ValidationError("--window-radius must be >= 0");
  const Kernel k = o.kernel.empty() ? phi_kernel(function_from_spec(g, o.f))
                                    : io::kernel_from_json(io::read_json_file(o.kernel), g);
  const auto window = Window::ball(g, o.window_radius);
  const auto support = k.support();

  const auto conv = convolution_operator(k, window);
  const NormResult conv_norm = op_norm(conv);
  const double conv_fin = fin_prop_bound(conv, support);
  const auto conv_schur = schur_test_bound(conv);

  std::size_t fin_violations = 0;
  std::size_t schur_violations = 0;
  double worst_fin_slack = kInfinity;
  double worst_schur_slack = kInfinity;
  for (std::size_t i = 0; i < o.trials; ++i) {
    const auto t = random_operator(window, stream_seed(gl.seed, i),
                                   std::span<const Element>(support));
    const double n = op_norm(t).value;
    const double fin_slack = fin_prop_bound(t, support) - n;
    const double schur_slack = schur_test_bound(t).bound - n;
    worst_fin_slack = std::min(worst_fin_slack, fin_slack);
    worst_schur_slack = std::min(worst_schur_slack, schur_slack);
    if (fin_slack < -1e-9) ++fin_violations;
    if (schur_slack < -1e-9) ++schur_violations;
  }

  const bool nonnegative =
      std::ranges::all_of(k.entries(), [](const Entry& e) { return e.second >= 0.0; });
  json l1 = nullptr;
  if (nonnegative && !k.empty()) {
    const auto f = SparseFunction::make_relaxed(g, {k.entries().begin(), k.entries().end()});
    l1 = to_json(l1_multiplier_bound(f, random_operator(window, stream_seed(gl.seed, o.trials))));
  }

  const auto psd = gram_psd_check(k, window->elements(), 1e-9, window->size());
  json cp = nullptr;
  if (psd.psd) {
    cp = to_json(cp_norm_check(k, window, o.trials, stream_seed(gl.seed, o.trials + 1),
                               gl.threads));
  }
  const int radii_arr[] = {1, 2, 4, 8};
  const auto ladder = convolution_norm_ladder(k, radii_arr);

  Outcome out;
  out.params = {{"kernel", o.kernel},
                {"f", o.f},
                {"window_radius", o.window_radius},
                {"trials", o.trials}};
  out.records.push_back(
      {{"record", "schur_check"},
       {"kernel",
        {{"label", k.label()},
         {"support_size", k.support_size()},
         {"at_identity", k.at_identity()},
         {"sup_norm", k.sup_norm()},
         {"l1_norm", k.l1_norm()}}},
       {"window", {{"radius", o.window_radius}, {"size", window->size()}}},
       {"bounds",
        {{"fin_prop", conv_fin}, {"schur_test", to_json(conv_schur)}, {"l1_multiplier", l1}}},
       {"norms", {{"convolution", to_json(conv_norm)}, {"ladder", to_json(ladder)}}},
       {"psd", to_json(psd)},
       {"violations",
        {{"trials", o.trials},
         {"fin_prop", fin_violations},
         {"schur_test", schur_violations},
         {"min_fin_prop_slack", o.trials ? json(worst_fin_slack) : json(nullptr)},
         {"min_schur_test_slack", o.trials ? json(worst_schur_slack) : json(nullptr)},
         {"cp_norm", cp}}}});
  out.table.header = {"radius", "window_size", "norm"};
  for (const auto& s : ladder) {
    out.table.rows.push_back({std::to_string(s.radius), num(s.window_size), num(s.norm)});
  }
  return out;
}

// --- delta / amenability-report ------------------------------------------

DeltaSearch search_from(const Globals& gl, int K, std::size_t profiles, std::size_t restarts,
                        std::size_t max_sweeps) {
  DeltaSearch s;
  s.support_radius = K;
  s.n_profiles = profiles;
  s.restarts = restarts;
  s.max_sweeps = max_sweeps;
  s.seed = gl.seed;
  s.threads = gl.threads;
  return s;
}

Outcome cmd_delta(const Globals& gl, const DeltaOpts& o) {
  const Group g = Group::parse(gl.group);
  const auto set = set_from_options(g, o.F_radius, o.F_file);
  auto search = search_from(gl, o.K, o.profiles, o.restarts, o.max_sweeps);
  search.grid_oracle = o.oracle;
  search.oracle_max_support = o.oracle_support;
  const auto r = minimize_delta(g, set, o.p, search);

  Outcome out;
  out.params = {{"F_radius", o.F_file.empty() ? json(o.F_radius) : json(nullptr)},
                {"F_file", o.F_file},
                {"p", o.p},
                {"K", o.K},
                {"profiles", o.profiles},
                {"restarts", o.restarts},
                {"max_sweeps", o.max_sweeps},
                {"oracle", o.oracle},
                {"oracle_support", o.oracle_support}};
  json rec = to_json(g, r);
  rec["record"] = "delta";
  out.records.push_back(std::move(rec));
  out.table.header = {"p", "F_size", "K", "value", "witness_value", "oracle_value",
                      "window_norm", "window_size"};
  out.table.rows.push_back(
      {num(r.p), num(r.set.size()), std::to_string(r.log.support_radius), num(r.value),
       num(r.witness_value), r.oracle ? num(r.oracle->value) : std::string(), num(r.window_norm),
       num(r.window_size)});
  return out;
}

Outcome cmd_amenability(const Globals& gl, const AmenOpts& o) {
  const Group g = Group::parse(gl.group);
  const auto radii = parse_int_list(o.F_radii);
  const auto ps = parse_number_list(o.p_ladder);
  std::vector<FolnerSet> sets;
  for (int r : radii) {
    if (r < 0) throw ValidationError("--F-radii must be >= 0");
    if (o.F_shape == "box") {
      sets.push_back(folner_boxes(g, r));
    } else if (o.F_shape == "ball") {
      sets.emplace_back(g, *g.ball_at_identity(r), r);
    } else {
      throw ValidationError("--F-shape must be ball or box");
    }
  }
  const auto report =
      amenability_report(g, sets, ps, search_from(gl, o.K, o.profiles, o.restarts, o.max_sweeps));

  Outcome out;
  out.params = {{"F_radii", radii},        {"F_shape", o.F_shape},  {"p_ladder", ps},
                {"K", o.K},                {"profiles", o.profiles}, {"restarts", o.restarts},
                {"max_sweeps", o.max_sweeps}};
  out.table.header = {"F_radius", "F_size", "p", "value", "witness_value", "window_norm"};
  for (const auto& row : report.rows) {
    json rec = to_json(g, row.result);
    rec["record"] = "amenability_row";
    rec["F_radius"] = row.set_label;
    rec["F_size"] = row.set_size;
    out.records.push_back(std::move(rec));
    out.table.rows.push_back({std::to_string(row.set_label), num(row.set_size), num(row.p),
                              num(row.result.value), num(row.result.witness_value),
                              num(row.result.window_norm)});
  }
  json mono = json::array();
  for (bool b : report.nonincreasing_in_p) mono.push_back(b);
  out.records.push_back({{"record", "amenability_summary"},
                         {"nonincreasing_in_p", mono},
                         {"floor", report.floor}});
  return out;
}

// --- percolation ---------------------------------------------------------

Outcome cmd_percolate(const Globals& gl, const PercOpts& o) {
  const Group g = Group::parse(gl.group);
  const auto model = PercModel::parse(g, o.model);
  const auto points = parse_points(g, o.s);
  const auto est = phi_perc_estimates(model, o.p, points, o.N, gl.seed, gl.threads);

  Outcome out;
  out.params = {{"model", model.spec()}, {"p", o.p}, {"s", o.s}, {"N", o.N}};
  out.table.header = {"s", "mean", "stderr", "exact", "samples", "truncated"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    json rec = to_json(g, est[i]);
    rec["record"] = "percolate";
    rec["s"] = io::element_to_json(g, points[i]);
    out.records.push_back(std::move(rec));
    out.table.rows.push_back({g.format(points[i]), num(est[i].mean), num(est[i].std_error),
                              opt_num(est[i].exact), num(est[i].samples),
                              num(est[i].truncated)});
  }
  return out;
}

Outcome cmd_mtp(const Globals& gl, const MtpOpts& o) {
  const Group g = Group::parse(gl.group);
  const auto model = PercModel::parse(g, o.model);
  const Element s = o.s.empty() ? g.generators().front() : io::parse_element(g, o.s);
  const auto r = mtp_check(model, s, o.N, gl.seed, gl.threads);

  Outcome out;
  out.params = {{"model", model.spec()}, {"s", g.format(s)}, {"N", o.N}};
  json rec = to_json(g, r);
  rec["record"] = "mtp";
  rec["s"] = io::element_to_json(g, s);
  out.records.push_back(std::move(rec));
  out.table.header = {"lhs",        "lhs_stderr", "lhs_exact",        "rhs", "rhs_stderr",
                      "rhs_exact",  "difference", "difference_stderr", "z_score"};
  out.table.rows.push_back({num(r.lhs.mean), num(r.lhs.std_error), opt_num(r.lhs.exact),
                            num(r.rhs.mean), num(r.rhs.std_error), opt_num(r.rhs.exact),
                            num(r.difference), num(r.difference_std_error), num(r.z_score)});
  return out;
}

Outcome cmd_thm54(const Globals& gl, const Thm54Opts& o) {
  const Group g = Group::parse(gl.group);
  const auto schedule = schedule_from_spec(g, o.schedule);
  const auto set = set_from_options(g, o.F_radius, o.F_file);
  const auto report = run_schedule(g, schedule, set, o.N, gl.seed, gl.threads);

  Outcome out;
  out.params = {{"schedule", o.schedule},
                {"F_radius", o.F_file.empty() ? json(o.F_radius) : json(nullptr)},
                {"F_file", o.F_file},
                {"N", o.N}};
  out.table.header = {"n", "model", "p"};
  if (!report.rows.empty()) {
    for (const auto& s : report.rows.front().set) {
      const std::string name = g.format(s);
      out.table.header.push_back("mean[" + name + "]");
      out.table.header.push_back("stderr[" + name + "]");
      out.table.header.push_back("exact[" + name + "]");
    }
  }
  out.table.header.insert(out.table.header.end(), {"psd", "min_eigenvalue", "max_deviation"});
  for (const auto& row : report.rows) {
    json rec = to_json(g, row);
    rec["record"] = "thm54_row";
    out.records.push_back(std::move(rec));
    std::vector<std::string> cells = {std::to_string(row.index), row.model, num(row.p)};
    for (const auto& e : row.values) {
      cells.push_back(num(e.mean));
      cells.push_back(num(e.std_error));
      cells.push_back(opt_num(e.exact));
    }
    cells.push_back(row.psd.psd ? "1" : "0");
    cells.push_back(num(row.psd.min_eigenvalue));
    cells.push_back(num(row.max_deviation));
    out.table.rows.push_back(std::move(cells));
  }
  out.records.push_back({{"record", "thm54_summary"},
                         {"rising", report.rising},
                         {"strong_convergence_surrogate", report.strong_convergence_surrogate}});
  return out;
}

Outcome cmd_selftest(const Globals& gl) {
  Outcome out;
  const auto checks = run_selftest(gl.seed, gl.threads);
  bool all = true;
  out.table.header = {"check", "passed", "detail"};
  for (const auto& c : checks) {
    all = all && c.passed;
    out.records.push_back(
        {{"record", "check"}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    out.table.rows.push_back({c.name, c.passed ? "1" : "0", c.detail});
  }
  out.records.push_back({{"record", "selftest_summary"},
                         {"checks", checks.size()},
                         {"passed", all}});
  out.exit_code = all ? kExitOk : kExitFailure;
  return out;
}

void write_outcome(std::ostream& os, const Globals& gl, const std::string& command,
                   const Outcome& o, double elapsed_ms) {
  const std::string format = gl.format == "auto" ? o.default_format : gl.format;
  const json metadata = {{"record", "metadata"},
                         {"tool", "schurlab"},
                         {"version", std::string(kVersion)},
                         {"timestamp", utc_timestamp()},
                         {"threads", gl.threads},
                         {"elapsed_ms", elapsed_ms}};
  const json config = {{"record", "config"},
                       {"subcommand", command},
                       {"group", gl.group},
                       {"seed", gl.seed},
                       {"output", gl.output},
                       {"format", format},
                       {"params", o.params}};
  if (format == "json") {
    os << metadata.dump() << '\n' << config.dump() << '\n';
    for (const auto& r : o.records) os << r.dump() << '\n';
    return;
  }
  os << "# " << metadata.dump() << '\n' << "# " << config.dump() << '\n';
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << io::csv_field(cells[i]);
    }
    os << '\n';
  };
  line(o.table.header);
  for (const auto& row : o.table.rows) line(row);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Positive-definite functions, Schur multipliers and amenability on groups",
               "schurlab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "INI file with option defaults; command-line flags win");
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.require_subcommand(1);
  app.fallthrough();

  Globals gl;
  gl.threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--group", gl.group, "Group: Z1, Z2, Z3, F2 (free of rank <= 4), C{m}")
      ->capture_default_str();
  app.add_option("--seed", gl.seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--threads", gl.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--output", gl.output, "Output file ('-' for stdout)")->capture_default_str();
  app.add_option("--format", gl.format, "json (NDJSON records) or csv; auto picks per command")
      ->check(CLI::IsMember({"auto", "json", "csv"}))
      ->capture_default_str();

  PhiOpts phi_o;
  auto* phi_cmd = app.add_subcommand("phi", "Evaluate Phi(f) on a ball");
  phi_cmd->add_option("--f", phi_o.f, "builtin:folner:n=10[:p=2], builtin:dirac, "
                                      "builtin:two-bump:n=5[:p=2], or a JSON file")
      ->required();
  phi_cmd->add_option("--radius", phi_o.radius, "Ball radius (default: the support of Phi(f))");
  phi_cmd->add_flag("--psd", phi_o.psd, "Also test positive-definiteness on the evaluated points");

  DecomposeOpts dec_o;
  auto* dec_cmd = app.add_subcommand("decompose", "Profile decomposition of a sequence");
  dec_cmd->add_option("--builtin", dec_o.builtin, "two-bump, folner or dirac")
      ->check(CLI::IsMember({"two-bump", "folner", "dirac"}));
  dec_cmd->add_option("--sequence-file", dec_o.sequence_file, "JSON list of functions");
  dec_cmd->add_option("--n-range", dec_o.n_range, "a:b for builtin sequences")
      ->capture_default_str();
  dec_cmd->add_option("--p", dec_o.p, "Exponent in [1, 2)")->capture_default_str();
  dec_cmd->add_option("--sep-r", dec_o.sep_r, "Separation radius")->capture_default_str();
  dec_cmd->add_option("--ext-R", dec_o.ext_R, "Extraction radius")->capture_default_str();
  dec_cmd->add_option("--eps", dec_o.eps, "Absolute acceptance threshold");
  dec_cmd->add_option("--eps-relative", dec_o.eps_relative, "Threshold relative to ||f_n||_p^p")
      ->capture_default_str();
  dec_cmd->add_option("--max-k", dec_o.max_k, "Profiles per index")->capture_default_str();
  dec_cmd->add_option("--tol-match", dec_o.tol_match, "Chain matching tolerance")
      ->capture_default_str();

  SchurOpts sch_o;
  auto* sch_cmd = app.add_subcommand("schur-check", "Schur multiplier bounds on a window");
  sch_cmd->add_option("--kernel", sch_o.kernel, "Kernel JSON file");
  sch_cmd->add_option("--f", sch_o.f, "Use Phi(f) as the kernel (same syntax as phi --f)");
  sch_cmd->add_option("--window-radius", sch_o.window_radius, "Window B(e, r)")
      ->capture_default_str();
  sch_cmd->add_option("--trials", sch_o.trials, "Random operators")->capture_default_str();

  DeltaOpts del_o;
  auto* del_cmd = app.add_subcommand("delta", "Minimize the delta surrogate over Xi");
  del_cmd->add_option("--F-radius", del_o.F_radius, "F = B(e, r)")->capture_default_str();
  del_cmd->add_option("--F-file", del_o.F_file, "JSON list of the elements of F");
  del_cmd->add_option("--p", del_o.p, "Exponent in [1, 2)")->capture_default_str();
  del_cmd->add_option("--K", del_o.K, "Profile support radius (0 = automatic)")
      ->capture_default_str();
  del_cmd->add_option("--profiles", del_o.profiles, "Profiles per collection")
      ->capture_default_str();
  del_cmd->add_option("--restarts", del_o.restarts, "Random starts")->capture_default_str();
  del_cmd->add_option("--max-sweeps", del_o.max_sweeps, "Sweeps per start")
      ->capture_default_str();
  del_cmd->add_flag("--oracle", del_o.oracle, "Compare with the grid oracle");
  del_cmd->add_option("--oracle-support", del_o.oracle_support, "Grid oracle support size")
      ->capture_default_str();

  AmenOpts am_o;
  auto* am_cmd = app.add_subcommand("amenability-report", "delta over ladders of F and p");
  am_cmd->add_option("--F-radii", am_o.F_radii, "Comma-separated radii")->capture_default_str();
  am_cmd->add_option("--F-shape", am_o.F_shape, "ball or box")->capture_default_str();
  am_cmd->add_option("--p-ladder", am_o.p_ladder, "Comma-separated exponents")
      ->capture_default_str();
  am_cmd->add_option("--K", am_o.K, "Profile support radius (0 = automatic)")
      ->capture_default_str();
  am_cmd->add_option("--profiles", am_o.profiles, "Profiles per collection")
      ->capture_default_str();
  am_cmd->add_option("--restarts", am_o.restarts, "Random starts")->capture_default_str();
  am_cmd->add_option("--max-sweeps", am_o.max_sweeps, "Sweeps per start")->capture_default_str();

  PercOpts pc_o;
  auto* pc_cmd = app.add_subcommand("percolate", "Monte-Carlo phi(s) for a percolation");
  pc_cmd->add_option("--model", pc_o.model, "tiling:L=4 or bernoulli:q=0.4[:cap=N]")
      ->capture_default_str();
  pc_cmd->add_option("--p", pc_o.p, "Exponent in [1, 2]")->capture_default_str();
  pc_cmd->add_option("--s", pc_o.s, "Points separated by ';'")->capture_default_str();
  pc_cmd->add_option("--N", pc_o.N, "Samples")->capture_default_str();

  MtpOpts mt_o;
  auto* mt_cmd = app.add_subcommand("mtp-check", "Mass-transport identity check");
  mt_cmd->add_option("--model", mt_o.model, "tiling:L=3 or bernoulli:q=0.4[:cap=N]")
      ->capture_default_str();
  mt_cmd->add_option("--s", mt_o.s, "Step s (default: the first generator)");
  mt_cmd->add_option("--N", mt_o.N, "Samples")->capture_default_str();

  Thm54Opts th_o;
  auto* th_cmd = app.add_subcommand("thm54", "Percolation schedule with rising phi_n");
  th_cmd->add_option("--schedule", th_o.schedule,
                     "builtin:doubling[:first=2][:last=10] or a JSON list of {L or q, p}")
      ->capture_default_str();
  th_cmd->add_option("--F-radius", th_o.F_radius, "F = B(e, r)")->capture_default_str();
  th_cmd->add_option("--F-file", th_o.F_file, "JSON list of the elements of F");
  th_cmd->add_option("--N", th_o.N, "Samples per step")->capture_default_str();

  auto* self_cmd = app.add_subcommand("selftest", "Run the invariant suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitValidation;
  }

  const std::vector<std::pair<CLI::App*, std::function<Outcome()>>> commands = {
      {phi_cmd, [&] { return cmd_phi(gl, phi_o); }},
      {dec_cmd, [&] { return cmd_decompose(gl, dec_o); }},
      {sch_cmd, [&] { return cmd_schur(gl, sch_o); }},
      {del_cmd, [&] { return cmd_delta(gl, del_o); }},
      {am_cmd, [&] { return cmd_amenability(gl, am_o); }},
      {pc_cmd, [&] { return cmd_percolate(gl, pc_o); }},
      {mt_cmd, [&] { return cmd_mtp(gl, mt_o); }},
      {th_cmd, [&] { return cmd_thm54(gl, th_o); }},
      {self_cmd, [&] { return cmd_selftest(gl); }},
  };

  try {
    for (const auto& [cmd, fn] : commands) {
      if (!cmd->parsed()) continue;
      const auto start = std::chrono::steady_clock::now();
      const Outcome o = fn();
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      if (gl.output == "-") {
        write_outcome(out, gl, cmd->get_name(), o, ms);
      } else {
        std::ofstream file(gl.output, std::ios::binary);
        if (!file) throw ValidationError("cannot write '" + gl.output + "'");
        write_outcome(file, gl, cmd->get_name(), o, ms);
      }
      return o.exit_code;
    }
  } catch (const StatisticalGuardError& e) {
    err << "schurlab: statistical guard: " << e.what() << '\n';
    return kExitStatisticalGuard;
  } catch (const ValidationError& e) {
    err << "schurlab: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ResourceError& e) {
    err << "schurlab: resource limit: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "schurlab: internal error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace schurlab::cli
