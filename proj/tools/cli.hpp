#pragma once

// Command-line front end. run() takes the argument vector (without the
// program name) and two streams so the whole surface is testable in-process.
//
// Exit codes: 0 success, 1 data or I/O error, 2 usage error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lodd/lodd.hpp"

namespace lodd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string join(const std::vector<Index>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + std::to_string(values[i]);
  return s;
}

/// Validator for a real value v with lo < v and (v <= hi or v < hi).
inline CLI::Validator open_interval(double lo, double hi, bool hi_closed) {
  return CLI::Validator(
      [=](std::string& s) -> std::string {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(s, v)) return "'" + s + "' is not a number";
        const bool ok = v > lo && (hi_closed ? v <= hi : v < hi);
        if (ok) return {};
        return "value " + s + " must lie in (" + fmt(lo) + "," + fmt(hi) + (hi_closed ? "]" : ")");
      },
      "REAL");
}

struct InputOptions {
  std::string path;
  std::string delimiter = ",";
  bool no_header = false;
  bool normalize = false;
  std::optional<std::string> label_col;

  void add(CLI::App& cmd, bool with_normalize = true) {
    cmd.add_option("--input", path, "Input table (.csv, .tsv, .xyz, .pts)")->required();
    cmd.add_option("--delimiter", delimiter, "Field delimiter for tables")
        ->check([](const std::string& s) { return s.size() == 1 || s == "\\t" ? std::string{} : "must be one character"; });
    cmd.add_flag("--no-header", no_header, "Input table has no header row");
    if (with_normalize) cmd.add_flag("--normalize", normalize, "Min-max scale every feature to [0,1]");
  }

  PointSet load() const {
    TableSchema schema;
    schema.delimiter = delimiter == "\\t" ? '\t' : delimiter.front();
    schema.has_header = !no_header;
    schema.label_column = label_col;
    if (path.size() > 4 && path.compare(path.size() - 4, 4, ".tsv") == 0 && delimiter == ",") schema.delimiter = '\t';
    PointSet ps = read_any(path, schema);
    return normalize ? minmax_normalize(ps) : ps;
  }
};

struct DetectOptions {
  int k = 20;
  double omega = kDefaultOmega;
  std::optional<double> ratio;
  bool adaptive = false;
  std::optional<int> clusters;
  unsigned threads = 0;

  void add(CLI::App& cmd, bool with_clusters = true) {
    cmd.add_option("--k", k, "Neighbors per point")->check(CLI::PositiveNumber);
    cmd.add_option("--omega", omega, "Weight in (0,1)")->check(open_interval(0.0, 1.0, false));
    auto* r = cmd.add_option("--ratio", ratio, "Fixed boundary ratio in (0,1]")->check(open_interval(0.0, 1.0, true));
    auto* a = cmd.add_flag("--adaptive", adaptive, "Estimate the ratio from the data (default)");
    r->excludes(a);
    if (with_clusters) {
      cmd.add_option("--clusters", clusters, "Known cluster count for the adaptive ratio")->check(CLI::PositiveNumber);
    }
    cmd.add_option("--threads", threads, "Worker threads, 0 = all cores");
  }

  Params params() const {
    Params p = ratio ? Params::fixed_ratio(k, *ratio, omega) : Params::adaptive_ratio(k, clusters, omega);
    p.threads = threads;
    return p;
  }
};

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LoDD boundary point detection"};
  app.require_subcommand(1);

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "Score points and split boundary from internal points");
  detail::InputOptions detect_in;
  detail::DetectOptions detect_opts;
  std::string detect_out;
  std::string detect_format;
  detect_in.add(*detect_cmd);
  detect_cmd->add_option("--label-col", detect_in.label_col, "Column excluded from features");
  detect_opts.add(*detect_cmd);
  detect_cmd->add_option("--output", detect_out, "Result file")->required();
  detect_cmd->add_option("--format", detect_format, "csv or json (default: from extension)")
      ->check(CLI::IsMember({"csv", "json"}));

  // ratio
  auto* ratio_cmd = app.add_subcommand("ratio", "Report the adaptive boundary ratio estimate");
  detail::InputOptions ratio_in;
  int ratio_k = 20;
  std::optional<int> ratio_clusters;
  ratio_in.add(*ratio_cmd);
  ratio_cmd->add_option("--label-col", ratio_in.label_col, "Column excluded from features");
  ratio_cmd->add_option("--k", ratio_k, "Neighbors per point")->check(CLI::PositiveNumber);
  ratio_cmd->add_option("--clusters", ratio_clusters, "Known cluster count")->check(CLI::PositiveNumber);

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "Peel boundary points, cluster, re-attach");
  detail::InputOptions cluster_in;
  detail::DetectOptions cluster_opts;
  int cluster_c = 0;
  std::string cluster_out;
  cluster_in.add(*cluster_cmd);
  cluster_opts.add(*cluster_cmd, false);
  cluster_cmd->add_option("--truth-col", cluster_in.label_col, "Ground-truth label column for ACC/NMI");
  cluster_cmd->add_option("--clusters", cluster_c, "Number of clusters")->required()->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--output", cluster_out, "Label file (id,label)")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "ACC and NMI of a predicted labeling");
  std::string eval_truth, eval_pred;
  std::optional<std::string> eval_truth_col, eval_pred_col;
  eval_cmd->add_option("--truth", eval_truth, "Ground-truth label file")->required();
  eval_cmd->add_option("--pred", eval_pred, "Predicted label file")->required();
  eval_cmd->add_option("--truth-col", eval_truth_col, "Label column in the truth file");
  eval_cmd->add_option("--pred-col", eval_pred_col, "Label column in the prediction file");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Write a seeded synthetic point set");
  GenSpec gen;
  std::string gen_kind, gen_out;
  std::optional<std::string> gen_truth_out;
  bool gen_no_labels = false;
  gen_cmd->add_option("--kind", gen_kind, "grid | gaussian-mixture | ring-blob | sphere-holes | surface-holes")
      ->required()
      ->check(CLI::IsMember({"grid", "gaussian-mixture", "ring-blob", "sphere-holes", "surface-holes"}));
  gen_cmd->add_option("--seed", gen.seed, "PRNG seed");
  gen_cmd->add_option("--output", gen_out, "Point file")->required();
  gen_cmd->add_option("--truth-output", gen_truth_out, "id,label,boundary ground truth file");
  gen_cmd->add_flag("--no-labels", gen_no_labels, "Omit the label column from the point file");
  gen_cmd->add_option("--rows", gen.rows, "Grid rows")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--cols", gen.cols, "Grid columns")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--spacing", gen.spacing, "Grid spacing")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--n", gen.n, "Sphere lattice size")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--holes", gen.holes, "Number of holes")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--hole-radius", gen.hole_radius, "Hole radius")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--clusters", gen.clusters, "Mixture components")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--per-cluster", gen.per_cluster, "Points per component")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--dim", gen.dim, "Mixture dimension")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--separation", gen.separation, "Distance between component means");
  gen_cmd->add_option("--sigma", gen.sigma, "Component standard deviation")->check(CLI::PositiveNumber);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Time detection on Gaussian data of growing size");
  std::vector<Index> bench_sizes{10000, 20000, 50000, 100000};
  Index bench_dim = 10;
  int bench_k = 20;
  std::uint64_t bench_seed = 7;
  unsigned bench_threads = 0;
  bench_cmd->add_option("--sizes", bench_sizes, "Comma-separated sizes, ascending")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--dim", bench_dim, "Dimension")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--k", bench_k, "Neighbors per point")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench_seed, "PRNG seed");
  bench_cmd->add_option("--threads", bench_threads, "Worker threads, 0 = all cores");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (detect_cmd->parsed()) {
      const PointSet ps = detect_in.load();
      const Params params = detect_opts.params();
      const DetectionReport report = detect_with_report(ps, params);
      ResultFormat format = ResultFormat::Csv;
      if (detect_format == "json" ||
          (detect_format.empty() && detect_out.size() > 5 &&
           detect_out.compare(detect_out.size() - 5, 5, ".json") == 0)) {
        format = ResultFormat::Json;
      }
      write_result(report.result, report.scores, detect_out, format, report.estimate);
      out << "n=" << ps.size() << " d=" << ps.dim() << " ratio=" << detail::fmt(report.result.effective_ratio)
          << " boundary=" << report.result.boundary_count << '\n';
    } else if (ratio_cmd->parsed()) {
      const PointSet ps = ratio_in.load();
      require_valid(ps, Params::adaptive_ratio(ratio_k, ratio_clusters));
      const NeighborIndex index = build_index(ps, ratio_k);
      const RatioEstimate est = estimate_ratio(ps, index, ratio_clusters);
      out << "D=" << est.intrinsic_dim << " components=" << detail::join(est.components)
          << " B=" << detail::fmt(est.boundary_count) << " ratio=" << detail::fmt(est.ratio)
          << " mode=" << to_string(est.mode) << '\n';
    } else if (cluster_cmd->parsed()) {
      const PointSet ps = cluster_in.load();
      Params params = cluster_opts.params();
      if (params.adaptive) params.cluster_count = cluster_c;
      const PeelReport report = peel_cluster_with_report(ps, params, cluster_c);
      write_labels(report.assignment.label_of, cluster_out, report.detection.result.boundary_mask);
      out << "n=" << ps.size() << " clusters=" << cluster_c
          << " ratio=" << detail::fmt(report.detection.result.effective_ratio)
          << " boundary=" << report.detection.result.boundary_count
          << " iterations=" << report.assignment.iterations;
      if (ps.has_labels()) {
        const auto& truth = *ps.labels();
        out << " ACC=" << detail::fmt(acc(truth, report.assignment.label_of))
            << " NMI=" << detail::fmt(nmi(truth, report.assignment.label_of));
      }
      out << '\n';
    } else if (eval_cmd->parsed()) {
      const std::vector<int> truth = read_labels(eval_truth, eval_truth_col);
      const std::vector<int> pred = read_labels(eval_pred, eval_pred_col);
      char buf[64];
      std::snprintf(buf, sizeof buf, "ACC=%.4f NMI=%.4f", acc(truth, pred), nmi(truth, pred));
      out << buf << '\n';
    } else if (gen_cmd->parsed()) {
      gen.kind = *parse_gen_kind(gen_kind);
      const GeneratedSet set = generate(gen);
      write_points_csv(set.points, gen_out, !gen_no_labels);
      if (gen_truth_out) {
        std::vector<int> labels(static_cast<std::size_t>(set.points.size()), 0);
        if (set.points.has_labels()) labels = *set.points.labels();
        std::optional<std::vector<bool>> boundary = set.boundary_truth;
        write_labels(labels, *gen_truth_out, boundary);
      }
      out << "kind=" << gen_kind << " n=" << set.points.size() << " d=" << set.points.dim();
      if (set.boundary_truth) {
        Index count = 0;
        for (bool b : *set.boundary_truth) count += b ? 1 : 0;
        out << " boundary=" << count;
      }
      out << '\n';
    } else if (bench_cmd->parsed()) {
      Params base;
      base.threads = bench_threads;
      const auto rows = scaling_benchmark(bench_sizes, bench_dim, bench_k, base, bench_seed);
      for (const auto& r : rows) {
        out << "n=" << r.n << " seconds=" << detail::fmt(r.seconds) << " boundary=" << r.boundary_count << '\n';
      }
      if (rows.size() >= 2) out << "exponent=" << detail::fmt(fit_loglog_exponent(rows)) << '\n';
    }
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace lodd::cli
