#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "perturblab/experiment.hpp"
#include "perturblab/snapshot.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void print_lindyn_summary(const nlohmann::json& summary) {
  std::cout << "cell  method  omega   lambda  mean final epsilon   mean final gamma  diverged\n";
  for (const auto& jc : summary.at("cells")) {
    std::printf("%4zu  %-6s  %-6g  %-6g  %-19.6g  %-16.6g  %zu/%zu\n",
                jc.at("index").get<std::size_t>(),
                jc.at("method").get<std::string>().c_str(), jc.at("omega").get<double>(),
                jc.at("lambda").get<double>(), jc.at("mean_final_epsilon").get<double>(),
                jc.at("mean_final_gamma").get<double>(),
                jc.at("diverged_runs").get<std::size_t>(),
                jc.at("runs").size());
  }
}

void print_ctr_summary(const nlohmann::json& summary) {
  std::cout << "Model                 mean NE     seeds  relative NE gain\n";
  for (const auto& jc : summary.at("cells")) {
    const auto& ne = jc.at("mean_final_eval_ne");
    const auto& gain = jc.at("relative_gain_display");
    const std::string ne_text =
        ne.is_null() ? "diverged" : plab::experiment::fmt_short(ne.get<double>());
    const std::string gain_text = gain.is_null() ? "-" : gain.get<std::string>();
    std::printf("%-20s  %-10s  %-5zu  %s\n", jc.at("label").get<std::string>().c_str(),
                ne_text.c_str(), jc.at("runs").size(), gain_text.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perturblab: perturbation-regularization experiment lab"};
  app.require_subcommand(1);

  std::string spec_path, out_flag, dump_path, report_dir, panel = "gamma", plot_out;
  std::size_t lh = 0, steps = 0, jobs = 0;
  bool full = false, dry_run = false;

  auto* lin = app.add_subcommand("lindyn", "run the teacher/student dynamics grid");
  lin->add_option("--spec", spec_path, "experiment spec file (JSON)")->required();
  lin->add_option("--lh", lh, "override the hidden width");
  lin->add_option("--steps", steps, "override the step count");
  lin->add_option("--out", out_flag, "output directory");
  lin->add_option("--jobs", jobs, "max concurrent grid cells (default: hardware)");
  lin->add_flag("--full", full,
                "run the spec's full-scale values instead of the desk-scale default "
                "(lh=1000, steps=20000)");
  lin->add_flag("--dry-run", dry_run, "print the resolved spec and exit");

  auto* ctr_cmd = app.add_subcommand("ctr", "run the CTR training grid");
  ctr_cmd->add_option("--spec", spec_path, "experiment spec file (JSON)")->required();
  ctr_cmd->add_option("--out", out_flag, "output directory");
  ctr_cmd->add_option("--jobs", jobs, "max concurrent grid cells (default: hardware)");
  ctr_cmd->add_option("--dump-dataset", dump_path,
                      "also write the replica-0 dataset as JSONL to this path");
  ctr_cmd->add_flag("--dry-run", dry_run, "print the resolved spec and exit");

  auto* plot = app.add_subcommand("plot", "render a panel from a lindyn report");
  plot->add_option("--report", report_dir, "directory written by a lindyn run")->required();
  plot->add_option("--panel", panel, "gamma or epsilon")
      ->check(CLI::IsMember({"gamma", "epsilon"}));
  plot->add_option("--out", plot_out, "output directory (default: the report dir)");

  CLI11_PARSE(app, argc, argv);

  using namespace plab::experiment;
  using plab::require;
  try {
    if (lin->parsed()) {
      ExperimentSpec spec = parse_spec(slurp(spec_path));
      require(spec.mode == Mode::kLindyn, "lindyn subcommand needs a lindyn-mode spec");
      if (!full) {
        spec.lindyn.lh = 1000;
        spec.lindyn.steps = 20000;
      }
      if (lh) spec.lindyn.lh = lh;
      if (steps) spec.lindyn.steps = steps;
      if (dry_run) {
        std::cout << serialize_spec(spec);
        return 0;
      }
      RunOptions options{resolve_output_dir(spec, out_flag), jobs};
      const RunReport report = run_experiment(spec, options);
      print_lindyn_summary(summarize(report));
      std::cout << report.outcomes.size() << " trajectories written to " << options.output_dir
                << "\n";
      return 0;
    }
    if (ctr_cmd->parsed()) {
      ExperimentSpec spec = parse_spec(slurp(spec_path));
      require(spec.mode == Mode::kCtr, "ctr subcommand needs a ctr-mode spec");
      if (dry_run) {
        std::cout << serialize_spec(spec);
        return 0;
      }
      if (!dump_path.empty()) {
        plab::ctr::DatasetConfig dcfg = spec.ctr.dataset;
        dcfg.seed = dataset_seed(spec.base_seed, 0);
        std::ofstream os(dump_path, std::ios::binary);
        require(os.good(), "cannot write " + dump_path);
        plab::write_examples_jsonl(os, plab::ctr::generate_dataset(dcfg));
        std::cout << "dataset written to " << dump_path << "\n";
      }
      RunOptions options{resolve_output_dir(spec, out_flag), jobs};
      const RunReport report = run_experiment(spec, options);
      print_ctr_summary(summarize(report));
      std::cout << report.outcomes.size() << " runs written to " << options.output_dir << "\n";
      return 0;
    }
    if (plot->parsed()) {
      const RunReport report = load_lindyn_report(report_dir);
      const std::string dir = plot_out.empty() ? report_dir : plot_out;
      const PlotFiles files = emit_plot(report, panel, dir);
      std::cout << "wrote " << files.data_csv << " and " << files.svg << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
