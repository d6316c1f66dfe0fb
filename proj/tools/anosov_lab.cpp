// anosov-lab: experiment runner over the mapping-torus / Bolza laboratory.
//
//   anosov-lab <kind> --config cfg.json [--out DIR] [--seed U64] [--jobs N]
//              [--plots]
//   anosov-lab validate --config cfg.json
//   anosov-lab plot --report out/band_decay.csv --kind band-decay --out DIR
//
// Environment overrides: ANOSOV_LAB_OUT (output directory),
// ANOSOV_LAB_JOBS (worker count). Exit code 0 iff every configured check
// passed.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "experiments.hpp"

using namespace anosov;
using namespace anosov::cli;

namespace {

int cmd_validate(const std::string& config_path) {
  std::vector<std::string> errors;
  auto cfg = load_config(config_path, errors);
  if (!errors.empty()) {
    for (const auto& e : errors) std::fprintf(stderr, "invalid: %s\n", e.c_str());
    return 1;
  }
  std::printf("valid: kind=%s grid=%dx%d seed=%llu\n", cfg.kind.c_str(),
              cfg.grid.n_side, cfg.grid.n_s,
              (unsigned long long)cfg.seed);
  return 0;
}

int cmd_plot(const std::string& report, const std::string& kind,
             const std::string& out_dir) {
  std::ifstream in(report);
  if (!in) {
    std::fprintf(stderr, "error: cannot read report %s\n", report.c_str());
    return 2;
  }
  std::string header;
  if (!std::getline(in, header)) {
    std::fprintf(stderr, "error: nothing to plot (empty report)\n");
    return 2;
  }
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  auto col_index = [&](const std::string& name) {
    for (size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return int(i);
    return -1;
  };
  SvgPlot plot;
  plot.title = kind;
  int xcol = -1, ycol = -1;
  if (kind == "band-decay") {
    xcol = col_index("j");
    ycol = col_index("b_j");
    plot.x_label = "j";
    plot.y_label = "b_j";
    plot.log2_y = true;
  } else if (kind == "sweep") {
    xcol = col_index("h");
    ycol = col_index("ratio");
    plot.x_label = "h";
    plot.y_label = "ratio";
    plot.log2_x = true;
    plot.log2_y = true;
  } else if (kind == "slope") {
    xcol = col_index("eps");
    ycol = col_index("remainder");
    plot.x_label = "eps";
    plot.y_label = "|R|";
    plot.log2_x = true;
    plot.log2_y = true;
  } else {
    std::fprintf(stderr, "error: unknown plot kind %s\n", kind.c_str());
    return 2;
  }
  if (xcol < 0 || ycol < 0) {
    std::fprintf(stderr, "error: report lacks required columns for %s\n",
                 kind.c_str());
    return 2;
  }
  SvgSeries series;
  series.label = cols[size_t(ycol)];
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (int(cells.size()) <= std::max(xcol, ycol)) continue;
    series.x.push_back(std::abs(std::atof(cells[size_t(xcol)].c_str())));
    series.y.push_back(std::abs(std::atof(cells[size_t(ycol)].c_str())));
  }
  if (series.x.empty()) {
    std::fprintf(stderr, "error: nothing to plot\n");
    return 2;
  }
  plot.series.push_back(series);
  std::string out =
      (std::filesystem::path(out_dir) /
       (std::filesystem::path(report).stem().string() + ".svg"))
          .string();
  try {
    write_file(out, plot.render());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anosov-lab: desk-scale experiments on hyperbolic dynamics"};
  app.require_subcommand(1);

  std::string config_path, out_override, report_path, plot_kind = "sweep";
  uint64_t seed_override = 0;
  bool plots = false;
  int jobs = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)")
        ->required();
    sub->add_option("--out", out_override, "output directory override");
    sub->add_option("--seed", seed_override, "seed override");
    sub->add_option("--jobs", jobs, "worker count");
    sub->add_flag("--plots", plots, "emit SVG plots");
  };

  auto* validate = app.add_subcommand("validate", "validate a config file");
  validate->add_option("--config", config_path)->required();

  auto* plot = app.add_subcommand("plot", "render an SVG from a CSV report");
  plot->add_option("--report", report_path)->required();
  plot->add_option("--kind", plot_kind, "band-decay | sweep | slope");
  plot->add_option("--out", out_override);

  std::vector<CLI::App*> kinds;
  for (const auto& k : known_kinds()) {
    auto* sub = app.add_subcommand(k, "run the '" + k + "' experiment");
    add_common(sub);
    kinds.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(config_path);
  if (plot->parsed())
    return cmd_plot(report_path, plot_kind,
                    out_override.empty() ? "." : out_override);

  std::vector<std::string> errors;
  auto cfg = load_config(config_path, errors);
  std::string sub_kind;
  CLI::App* active = nullptr;
  for (auto* sub : kinds)
    if (sub->parsed()) {
      sub_kind = sub->get_name();
      active = sub;
    }
  if (!cfg.kind.empty() && cfg.kind != sub_kind)
    errors.push_back("kind: config says \"" + cfg.kind +
                     "\" but the subcommand is \"" + sub_kind + "\"");
  if (!errors.empty()) {
    for (const auto& e : errors) std::fprintf(stderr, "invalid: %s\n", e.c_str());
    return 2;
  }
  cfg.kind = sub_kind;
  if (active && active->count("--seed") > 0) cfg.seed = seed_override;

  RunContext ctx;
  ctx.cfg = cfg;
  ctx.out_dir = cfg.out_dir;
  if (const char* env = std::getenv("ANOSOV_LAB_OUT")) ctx.out_dir = env;
  if (!out_override.empty()) ctx.out_dir = out_override;
  ctx.jobs = jobs;
  if (const char* env = std::getenv("ANOSOV_LAB_JOBS")) ctx.jobs = std::atoi(env);
  ctx.plots = plots;
  return run_experiment(ctx);
}
