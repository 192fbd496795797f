// Command-line front end. Exit status: 0 success, 1 verification failure,
// 2 usage or input error.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ebcap/ebcap.hpp"

namespace fs = std::filesystem;
using namespace ebcap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

// ---------------------------------------------------------------------------
// Argument parsing helpers

Grid parse_grid(const std::string& text) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (true) {
    const auto end = text.find(':', pos);
    v.push_back(parse_number(text.substr(pos, end == std::string::npos ? end : end - pos)));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  if (v.size() != 3) throw std::invalid_argument("grid must be start:stop:step");
  Grid g{v[0], v[1], v[2]};
  g.points();  // validates
  return g;
}

/// "3,4,5", "3-8" or a mix such as "2,4-6".
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  auto to_int = [&](std::string_view s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      throw std::invalid_argument("not an integer list: '" + text + "'");
    }
    return v;
  };
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    const auto dash = item.find('-', 1);
    if (dash == std::string_view::npos) {
      out.push_back(to_int(item));
    } else {
      const int lo = to_int(item.substr(0, dash));
      const int hi = to_int(item.substr(dash + 1));
      if (lo > hi) throw std::invalid_argument("empty range '" + std::string(item) + "'");
      for (int n = lo; n <= hi; ++n) out.push_back(n);
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

/// Accepts integer or scientific notation ("1e6").
std::uint64_t parse_trials(const std::string& text) {
  const double v = parse_number(text);
  if (!(v >= 1.0 && v <= 1e12) || v != std::floor(v)) {
    throw std::invalid_argument("trials must be a whole number in [1, 1e12]");
  }
  return static_cast<std::uint64_t>(v);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

StabilizerCode builtin_code(const std::string& name) {
  if (name == "shor9") return builtin_shor9();
  if (name.rfind("cat", 0) == 0 && name.size() > 3) {
    const auto n = parse_int_list(name.substr(3));
    if (n.size() == 1) return builtin_cat(n[0]);
  }
  throw std::invalid_argument("unknown built-in code '" + name + "' (expected shor9 or catN)");
}

GateNetwork load_network(const std::string& name_or_path) {
  if (name_or_path == "leung-shor") return leung_shor_network();
  if (name_or_path == "recurrence") return recurrence_network();
  return parse_network_file(read_file(name_or_path));
}

// ---------------------------------------------------------------------------
// Output

struct OutputOptions {
  std::string grid = "0.25:1:0.0025";
  std::string format = "csv";
  std::string path;
};

void add_output_options(CLI::App* cmd, OutputOptions& o, bool with_grid = true) {
  if (with_grid) cmd->add_option("--grid", o.grid, "p grid start:stop:step")->capture_default_str();
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--output,-o", o.path, "output file (default stdout)");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

void emit(const OutputOptions& o, const std::vector<YieldCurve>& curves) {
  write_text(o.path, o.format == "json" ? to_json(curves).dump(2) + "\n" : to_csv(curves));
}

// ---------------------------------------------------------------------------
// Verification reports

std::string report_text(const oracle::McReport& r, double gate) {
  std::string out = "label,count,trials,empirical,analytic,sigma\n";
  for (const auto& c : r.cells) {
    out += c.label + "," + std::to_string(c.count) + "," + std::to_string(c.trials) + "," +
           format_number(c.empirical) + "," + format_number(c.analytic) + "," +
           format_number(c.sigma) + "\n";
  }
  std::cerr << "trials=" << r.trials << " seed=" << r.seed << " cells=" << r.cells.size()
            << " max_sigma=" << format_number(r.max_sigma_deviation, 4) << " gate=" << gate << " "
            << (r.within(gate) ? "PASS" : "FAIL") << "\n";
  return out;
}

int verify_bxor(const std::string& path) {
  const auto table = oracle::statevector_bxor_table();
  std::string out = "source,target,source_out,target_out,statevector_source,statevector_target,match\n";
  int matches = 0;
  for (unsigned s = 0; s < 4; ++s) {
    for (unsigned t = 0; t < 4; ++t) {
      const auto [a, b] = bxor(BellLabel::from_index(s), BellLabel::from_index(t));
      const auto& want = table[4 * s + t];
      const bool ok = static_cast<int>(a.index()) == want.source &&
                      static_cast<int>(b.index()) == want.target;
      matches += ok;
      out += to_string(BellLabel::from_index(s)) + "," + to_string(BellLabel::from_index(t)) + "," +
             to_string(a) + "," + to_string(b) + "," +
             to_string(BellLabel::from_index(static_cast<unsigned>(want.source))) + "," +
             to_string(BellLabel::from_index(static_cast<unsigned>(want.target))) + "," +
             (ok ? "yes" : "no") + "\n";
    }
  }
  write_text(path, out);
  std::cerr << "bxor: " << matches << "/16 match\n";
  return matches == 16 ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lower bounds on E_B and Q_B of the qubit depolarizing channel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ebcap 1.0");

  // cat
  OutputOptions cat_out;
  std::string cat_n;
  bool cat_modified = false;
  bool cat_both = false;
  auto* cat = app.add_subcommand("cat", "n-bit Cat code yield curves");
  cat->add_option("--n", cat_n, "code lengths, e.g. 4 or 3,4,5 or 3-8")->required();
  auto* mod_flag = cat->add_flag("--modified", cat_modified, "modified Cat code");
  cat->add_flag("--both", cat_both, "plain and modified")->excludes(mod_flag);
  add_output_options(cat, cat_out);

  // shor
  OutputOptions shor_out;
  std::string shor_strategy = "auto";
  auto* shor = app.add_subcommand("shor", "9-bit Shor code adaptive yield");
  shor->add_option("--strategy", shor_strategy, "auto or prefix=K")->capture_default_str();
  add_output_options(shor, shor_out);

  // code
  OutputOptions code_out;
  std::string code_name;
  std::string code_file;
  std::string code_strategy = "auto";
  std::string code_trials;
  std::uint64_t code_seed = 1;
  auto* code = app.add_subcommand("code", "adaptive yield of any stabilizer code");
  auto* code_opt = code->add_option("--code", code_name, "built-in code: shor9 or catN");
  auto* file_opt = code->add_option("--code-file", code_file, "code file");
  code_opt->excludes(file_opt);
  file_opt->excludes(code_opt);
  code->add_option("--strategy", code_strategy, "auto (all prefixes) or prefix=K")
      ->capture_default_str();
  code->add_option("--trials", code_trials, "Monte Carlo mode: samples per grid point");
  code->add_option("--seed", code_seed, "Monte Carlo seed")->capture_default_str();
  add_output_options(code, code_out);

  // epp
  OutputOptions epp_out;
  std::string epp_method;
  int epp_rounds = kBuiltinRounds;
  std::string epp_net = "leung-shor";
  auto* epp = app.add_subcommand("epp", "two-way purification yield curves");
  epp->add_option("method", epp_method, "recurrence or leung-shor")
      ->required()
      ->check(CLI::IsMember({"recurrence", "leung-shor"}));
  epp->add_option("--rounds", epp_rounds, "recurrence: maximum rounds")->capture_default_str();
  epp->add_option("--net", epp_net, "leung-shor: preset name or network file")
      ->capture_default_str();
  add_output_options(epp, epp_out);

  // bounds
  OutputOptions bounds_out;
  std::vector<std::string> bounds_inputs;
  auto* bounds = app.add_subcommand("bounds", "E_B envelope and its Q_B transform");
  bounds->add_option("inputs", bounds_inputs, "curve files (CSV or JSON) or all-builtin")
      ->required();
  add_output_options(bounds, bounds_out);

  // threshold
  OutputOptions thr_out;
  std::string thr_n = "1-8";
  auto* thr = app.add_subcommand("threshold", "threshold of the Cat code family (n=1: hashing)");
  thr->add_option("--n", thr_n, "code lengths")->capture_default_str();
  add_output_options(thr, thr_out, false);

  // verify
  std::string ver_suite;
  std::string ver_code = "shor9";
  std::string ver_code_file;
  std::string ver_net = "leung-shor";
  std::optional<double> ver_p;
  std::optional<double> ver_f;
  std::string ver_trials = "1e6";
  std::uint64_t ver_seed = 1;
  double ver_sigma = oracle::kDefaultSigmaGate;
  std::string ver_output;
  auto* ver = app.add_subcommand("verify", "check implementations against independent oracles");
  ver->add_option("suite", ver_suite, "bxor, code or network")
      ->required()
      ->check(CLI::IsMember({"bxor", "code", "network"}));
  auto* vcode = ver->add_option("--code", ver_code, "built-in code")->capture_default_str();
  auto* vfile = ver->add_option("--code-file", ver_code_file, "code file");
  vcode->excludes(vfile);
  vfile->excludes(vcode);
  ver->add_option("--net", ver_net, "preset name or network file")->capture_default_str();
  auto* vp = ver->add_option("--p", ver_p, "channel parameter")->check(CLI::Range(0.0, 1.0));
  auto* vf = ver->add_option("--f", ver_f, "Werner fidelity")->check(CLI::Range(0.25, 1.0));
  vp->excludes(vf);
  vf->excludes(vp);
  ver->add_option("--trials", ver_trials, "sample count")->capture_default_str();
  ver->add_option("--seed", ver_seed, "seed")->capture_default_str();
  ver->add_option("--sigma", ver_sigma, "gate in standard errors")->capture_default_str();
  ver->add_option("--output,-o", ver_output, "report file (default stdout)");

  // figures
  std::string fig_dir;
  std::string fig_grid = "0.25:1:0.0025";
  auto* figs = app.add_subcommand("figures", "write one CSV per figure");
  figs->add_option("--outdir", fig_dir, "output directory")->required();
  figs->add_option("--grid", fig_grid, "p grid start:stop:step")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cat) {
      const auto grid = parse_grid(cat_out.grid);
      std::vector<YieldCurve> curves;
      for (int n : parse_int_list(cat_n)) {
        if (cat_both || !cat_modified) curves.push_back(cat_curve(n, false, grid));
        if (cat_both || cat_modified) curves.push_back(cat_curve(n, true, grid));
      }
      emit(cat_out, curves);
    } else if (*shor) {
      const auto grid = parse_grid(shor_out.grid);
      const auto choice = parse_strategy(shor_strategy);
      const AdaptiveEvaluator ev(builtin_shor9());
      emit(shor_out, {strategy_curve(ev, choice, shor_candidates(), grid)});
      if (!choice.prefix) {
        for (const auto& s : strategy_switches(ev, shor_candidates(), grid)) {
          std::cerr << "region switch k=" << s.from << " -> k=" << s.to
                    << " at p=" << format_number(s.p, 6)
                    << " (F=" << format_number(fidelity_from_p(s.p), 6) << ")\n";
        }
      }
    } else if (*code) {
      if (code_name.empty() && code_file.empty()) {
        throw std::invalid_argument("one of --code or --code-file is required");
      }
      const auto sc = code_file.empty() ? builtin_code(code_name)
                                        : parse_code_file(read_file(code_file));
      const auto grid = parse_grid(code_out.grid);
      const auto choice = parse_strategy(code_strategy);
      if (choice.prefix && (*choice.prefix < 0 || *choice.prefix > sc.num_generators())) {
        throw std::invalid_argument("prefix must lie in 0.." +
                                    std::to_string(sc.num_generators()));
      }
      const auto candidates = all_prefixes(sc);
      if (code_trials.empty()) {
        const AdaptiveEvaluator ev(sc);
        emit(code_out, {strategy_curve(ev, choice, candidates, grid)});
      } else {
        const auto trials = parse_trials(code_trials);
        const auto schedule = uses_schedule(sc);
        // Points run one after another; each sample is itself parallel.
        YieldCurve c;
        c.method = sc.name + (choice.prefix ? ":k=" + std::to_string(*choice.prefix) : ":auto");
        c.metadata["grid"] = grid_string(grid);
        c.metadata["code"] = sc.name;
        c.metadata["mode"] = "monte-carlo";
        c.metadata["trials"] = std::to_string(trials);
        c.metadata["seed"] = std::to_string(code_seed);
        for (double p : grid.points()) {
          const auto table = oracle::sampled_table(sc, DepolarizingChannel(p), trials, code_seed);
          CurvePoint pt{p, -1.0, {}};
          for (int k : choice.prefix ? std::vector<int>{*choice.prefix} : candidates) {
            const double y = adaptive_trace(table, schedule, sc.n, k).yield();
            if (y > pt.yield || (!choice.prefix && y == pt.yield)) {
              pt.yield = y;
              if (!choice.prefix) pt.winner = sc.name + ":k=" + std::to_string(k);
            }
          }
          c.points.push_back(pt);
        }
        emit(code_out, {c});
      }
    } else if (*epp) {
      const auto grid = parse_grid(epp_out.grid);
      if (epp_method == "recurrence") {
        emit(epp_out, {recurrence_curve(epp_rounds, grid)});
      } else {
        emit(epp_out, {leung_shor_curve(grid, load_network(epp_net))});
      }
    } else if (*bounds) {
      std::vector<YieldCurve> inputs;
      if (bounds_inputs.size() == 1 && bounds_inputs[0] == "all-builtin") {
        inputs = builtin_family_curves(parse_grid(bounds_out.grid));
      } else {
        for (const auto& path : bounds_inputs) {
          if (path == "all-builtin") {
            throw std::invalid_argument("all-builtin cannot be mixed with curve files");
          }
          std::vector<YieldCurve> got;
          if (fs::path(path).extension() == ".json") {
            got = from_json(nlohmann::ordered_json::parse(read_file(path)));
          } else {
            std::istringstream in(read_file(path));
            got = read_csv(in, fs::path(path).stem().string());
          }
          inputs.insert(inputs.end(), got.begin(), got.end());
        }
      }
      const auto env = envelope(inputs);
      emit(bounds_out, {env, qb_curve(env)});
    } else if (*thr) {
      const auto rows = cat_thresholds(parse_int_list(thr_n));
      write_text(thr_out.path,
                 thr_out.format == "json" ? thresholds_json(rows).dump(2) + "\n" : thresholds_csv(rows));
    } else if (*ver) {
      if (ver_suite == "bxor") return verify_bxor(ver_output);
      const auto trials = parse_trials(ver_trials);
      if (!(ver_sigma > 0.0)) throw std::invalid_argument("--sigma must be positive");
      oracle::McReport report;
      if (ver_suite == "code") {
        const auto sc = ver_code_file.empty() ? builtin_code(ver_code)
                                              : parse_code_file(read_file(ver_code_file));
        const double p = ver_p ? *ver_p : ver_f ? p_from_fidelity(*ver_f) : 0.8;
        report = oracle::mc_sample_code(sc, DepolarizingChannel(p), trials, ver_seed);
      } else {
        const auto net = load_network(ver_net);
        if (auto err = validate_network(net)) throw std::invalid_argument("network: " + *err);
        const double f = ver_f ? *ver_f : ver_p ? fidelity_from_p(*ver_p) : 0.9;
        report = oracle::mc_sample_network(PairEnsembleDistribution::werner_power(f, net.num_pairs),
                                           net, trials, ver_seed);
      }
      write_text(ver_output, report_text(report, ver_sigma));
      return report.within(ver_sigma) ? kExitOk : kExitVerifyFailed;
    } else if (*figs) {
      const auto grid = parse_grid(fig_grid);
      fs::create_directories(fig_dir);
      for (const auto& f : figure_files(grid)) {
        write_text((fs::path(fig_dir) / f.name).string(), f.contents);
        std::cerr << "wrote " << (fs::path(fig_dir) / f.name).string() << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
