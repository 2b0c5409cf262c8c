// Command-line front end.
//
//   algomc <experiment-id> [--param k=v ...] [--config file] [--seed S] [--out path] [--json|--csv]
//   algomc list
//   algomc walk --q 0.3 --z 0 --steps 20 [--json]
//   algomc mi --x a.bin --y b.bin [--z c.bin] [--compressor name]
//   algomc dsep --graph g.json --S A --T C [--R B]
//   algomc markov-test --graph g.json --data A=a.bin --data B=b.bin ... [--threshold bits]
//   algomc ensemble-test --x xs.txt --y ys.txt [--split k] [--threshold bits]
//
// Exit status: 0 all checks passed / hypothesis accepted, 1 a check failed /
// hypothesis rejected, 2 usage or input error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "algomc/complexity.hpp"
#include "algomc/dag.hpp"
#include "algomc/harness/experiments.hpp"
#include "algomc/inference.hpp"
#include "algomc/io.hpp"
#include "algomc/timeseries.hpp"

namespace {

using nlohmann::json;
using namespace algomc;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw harness::ConfigError("cannot write '" + out + "'");
  f << text;
}

NodeSet split_set(const std::string& s) {
  NodeSet out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = harness::trim(item);
    if (!item.empty()) out.insert(item);
  }
  return out;
}

json estimate_json(const MiEstimate& e) {
  return {{"value_bits", e.value_bits}, {"slack_bits", e.slack_bits}, {"approx_zero", e.approx_zero()}, {"compressor", e.compressor}};
}

json verdict_json(const Verdict& v) {
  json stats = json::array();
  for (const auto& s : v.statistics) stats.push_back({{"label", s.label}, {"value_bits", s.value_bits}, {"threshold_bits", s.threshold_bits}});
  return {{"decision", to_string(v.decision)}, {"detail", v.detail}, {"statistics", stats}};
}

std::vector<Bytes> packed_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::vector<Bytes> out;
  for (const auto& s : io::read_bitstrings(in)) out.push_back(s.pack());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Algorithmic Markov condition toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(harness::kVersion));

  std::vector<std::string> params;
  std::string config_file, out;
  std::uint64_t seed = 0;
  bool as_json = false, as_csv = false;
  std::string chosen_experiment;

  for (const auto& e : harness::experiments()) {
    auto* sub = app.add_subcommand(e.id, e.summary);
    sub->add_option("--param,-p", params, "parameter override key=value (repeatable)");
    sub->add_option("--config", config_file, "INI-style key = value file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out,-o", out, "write the report here instead of stdout");
    auto* j = sub->add_flag("--json", as_json, "JSON report (default)");
    sub->add_flag("--csv", as_csv, "CSV report")->excludes(j);
    std::string footer = "Parameters:\n";
    for (const auto& ps : e.params) {
      footer += "  " + ps.name + " (" + harness::to_string(ps.type) + ", default " + ps.default_value + "): " + ps.help + "\n";
    }
    sub->footer(footer);
    sub->callback([&chosen_experiment, id = e.id] { chosen_experiment = id; });
  }

  auto* list = app.add_subcommand("list", "list experiment ids");

  auto* walk = app.add_subcommand("walk", "random-walk marginals and backward conditionals");
  double q = 0.3;
  int z = 0, steps = 20;
  bool walk_json = false;
  walk->add_option("--q", q, "right-step probability")->check(CLI::Range(0.0, 1.0));
  walk->add_option("--z", z, "start site");
  walk->add_option("--steps", steps, "horizon")->check(CLI::PositiveNumber);
  walk->add_flag("--json", walk_json, "JSON output");

  auto* mi = app.add_subcommand("mi", "algorithmic mutual information of files");
  std::string fx, fy, fz, compressor = "substring-cover";
  mi->add_option("--x", fx, "first file")->required()->check(CLI::ExistingFile);
  mi->add_option("--y", fy, "second file")->required()->check(CLI::ExistingFile);
  mi->add_option("--z", fz, "conditioning file")->check(CLI::ExistingFile);
  mi->add_option("--compressor", compressor, "length estimator");

  auto* dsep = app.add_subcommand("dsep", "d-separation query");
  std::string graph, s_set, t_set, r_set;
  dsep->add_option("--graph", graph, "graph JSON")->required()->check(CLI::ExistingFile);
  dsep->add_option("--S", s_set, "comma-separated nodes")->required();
  dsep->add_option("--T", t_set, "comma-separated nodes")->required();
  dsep->add_option("--R", r_set, "comma-separated conditioning nodes");

  auto* mtest = app.add_subcommand("markov-test", "algorithmic Markov condition on node strings");
  std::vector<std::string> data;
  std::optional<double> threshold;
  mtest->add_option("--graph", graph, "graph JSON")->required()->check(CLI::ExistingFile);
  mtest->add_option("--data", data, "node=file (repeatable)")->required();
  mtest->add_option("--threshold", threshold, "bits (default: slack)");
  mtest->add_option("--compressor", compressor, "length estimator");

  auto* ens = app.add_subcommand("ensemble-test", "resolved-ensemble asymmetry test on two sample files");
  std::size_t split = 0;
  ens->add_option("--x", fx, "x samples, one bit string per line")->required()->check(CLI::ExistingFile);
  ens->add_option("--y", fy, "y samples, one bit string per line")->required()->check(CLI::ExistingFile);
  ens->add_option("--split", split, "block split k (default ceil(m/2))");
  ens->add_option("--threshold", threshold, "bits (default: slack)");
  ens->add_option("--compressor", compressor, "length estimator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (!chosen_experiment.empty()) {
      harness::ExperimentConfig cfg;
      cfg.experiment = chosen_experiment;
      if (!config_file.empty()) harness::load_ini_file(config_file, cfg);
      for (const auto& kv : params) harness::apply_override(kv, cfg);
      if (app.get_subcommand(chosen_experiment)->count("--seed")) cfg.seed = seed;
      cfg.out = out;
      cfg.format = as_csv ? "csv" : "json";
      const auto report = harness::run_experiment(cfg);
      if (cfg.format == "csv") {
        std::ostringstream os;
        report.write_csv(os);
        emit(os.str(), cfg.out);
      } else {
        emit(report.to_json().dump(2) + "\n", cfg.out);
      }
      return report.passed() ? kExitPass : kExitFail;
    }

    if (*list) {
      for (const auto& e : harness::experiments()) std::cout << std::left << std::setw(18) << e.id << e.summary << '\n';
      return kExitPass;
    }

    if (*walk) {
      const RandomWalkModel m(q, z, steps);
      const auto marginal = walk_marginal(m, steps);
      double gap = 0;
      for (int j = 0; j < steps; ++j) gap = std::max(gap, max_abs_difference(backward_conditional(m, j), bayes_backward(m, j)));
      const auto dep = walk_dependence_report(1, 1);
      if (walk_json) {
        json sites = json::array();
        for (std::size_t i = 0; i < marginal.probs.size(); ++i) {
          if (marginal.probs[i] > 0) sites.push_back({{"site", marginal.first_site + static_cast<int>(i)}, {"p", marginal.probs[i]}});
        }
        json objects = json::array();
        for (const auto& o : dep.objects) objects.push_back({{"object", o.object}, {"depends_on_z", o.depends_on_z}, {"depends_on_q", o.depends_on_q}});
        const json j{{"q", q}, {"z", z}, {"steps", steps}, {"marginal", sites},
                     {"max_closed_form_vs_bayes", gap}, {"dependence", objects}};
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "P(X_" << steps << "):\n";
        for (std::size_t i = 0; i < marginal.probs.size(); ++i) {
          if (marginal.probs[i] > 0) std::cout << "  " << marginal.first_site + static_cast<int>(i) << '\t' << marginal.probs[i] << '\n';
        }
        std::cout << "max |closed form - Bayes| over j < " << steps << ": " << gap << '\n';
        for (const auto& o : dep.objects) {
          std::cout << "  " << o.object << " depends on" << (o.depends_on_z ? " z" : "") << (o.depends_on_q ? " q" : "") << '\n';
        }
      }
      return kExitPass;
    }

    if (*mi) {
      const auto c = compressor_by_name(compressor);
      const auto x = io::read_file_bytes(fx), y = io::read_file_bytes(fy);
      const auto e = fz.empty() ? algorithmic_mi(c, x, y) : algorithmic_cmi(c, x, y, io::read_file_bytes(fz));
      std::cout << estimate_json(e).dump(2) << '\n';
      return kExitPass;
    }

    if (*dsep) {
      std::ifstream in(graph);
      const auto g = io::dag_from_json(json::parse(in));
      const bool sep = d_separated(g, split_set(s_set), split_set(t_set), split_set(r_set));
      std::cout << json{{"d_separated", sep}}.dump() << '\n';
      return kExitPass;
    }

    if (*mtest) {
      std::ifstream in(graph);
      const auto g = io::dag_from_json(json::parse(in));
      NodeData nd;
      for (const auto& kv : data) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw harness::ConfigError("--data expects node=file, got '" + kv + "'");
        nd[kv.substr(0, eq)] = io::read_file_bytes(kv.substr(eq + 1));
      }
      const auto v = algorithmic_markov_test(nd, g, compressor_by_name(compressor), threshold);
      std::cout << verdict_json(v).dump(2) << '\n';
      return v.decision == Decision::kRejected ? kExitFail : kExitPass;
    }

    if (*ens) {
      const auto xs = packed_samples(fx), ys = packed_samples(fy);
      const auto k = split == 0 ? default_split(xs.size()) : split;
      const auto r = resolved_ensemble_test(xs, ys, k, compressor_by_name(compressor), threshold);
      const json j{{"split", r.split},
                   {"threshold_bits", r.threshold_bits},
                   {"I(x1:y2|x2)", estimate_json(r.x1_y2_given_x2)},
                   {"I(x2:y1|x1)", estimate_json(r.x2_y1_given_x1)},
                   {"I(y1:x2|y2)", estimate_json(r.y1_x2_given_y2)},
                   {"I(y2:x1|y1)", estimate_json(r.y2_x1_given_y1)},
                   {"direction", r.direction}};
      std::cout << j.dump(2) << '\n';
      return kExitPass;
    }
  } catch (const harness::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
