#include "cubeshadow/cli.hpp"

#include "cubeshadow/export.hpp"
#include "cubeshadow/grassmann_lab.hpp"
#include "cubeshadow/random.hpp"
#include "cubeshadow/sampler.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace cubeshadow {

namespace {

constexpr const char* kOutputDirEnv = "CUBESHADOW_OUTPUT_DIR";

struct RunConfig {
  std::string command;
  int n = 10;
  int k = 2;
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::size_t n_samples = 10000;
  std::size_t pairs = 1000;
  std::size_t bins = 40;
  std::string format;
  std::string subspace_file;
  std::string output;
  std::string tiling_output;
  std::string method = "exact";
  std::vector<double> xi;
  std::vector<int> face_fixed;  // 1-based
  std::vector<int> face_signs;
  double threshold = 10.0;
  unsigned threads = 1;
  bool timing = false;
  bool axis = false;
  bool no_per_tile = false;
};

std::string join_args(const std::vector<std::string>& args) {
  std::string s;
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? " " : "") + args[i];
  return s;
}

std::string resolve_output(const std::string& path) {
  if (path.empty() || path == "-") return path;
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir && *dir && std::filesystem::path(path).is_relative())
    return (std::filesystem::path(dir) / path).string();
  return path;
}

void validate(const RunConfig& c) {
  if (c.subspace_file.empty()) {
    if (c.n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
    if (c.k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    if (c.k >= c.n) throw Error(ErrorKind::InvalidArgument, "k must be < n");
  }
  if (!c.format.empty() && c.format != "json" && c.format != "csv")
    throw Error(ErrorKind::InvalidArgument, "format must be json or csv");
  if (c.method != "exact" && c.method != "rejection")
    throw Error(ErrorKind::InvalidArgument, "method must be exact or rejection");
  if (c.threads < 1) throw Error(ErrorKind::InvalidArgument, "threads must be >= 1");
}

Face config_face(const RunConfig& c, int n, int k) {
  if (c.face_fixed.empty() && c.face_signs.empty()) return leading_face(k);
  Face f;
  for (int i : c.face_fixed) f.fixed.push_back(i - 1);
  f.signs = c.face_signs.empty() ? std::vector<int>(c.face_fixed.size(), 1) : c.face_signs;
  validate_face(f, n, k);
  return f;
}

Subspace config_subspace(const RunConfig& c) {
  if (!c.subspace_file.empty()) return load_subspace(c.subspace_file);
  if (c.axis) return axis_subspace(c.n, c.k);
  return haar_subspace(c.n, c.k, c.seed);
}

TilingOptions config_tiling(const RunConfig& c) {
  TilingOptions opts;
  opts.seed = c.seed;
  opts.threads = c.threads;
  if (!c.xi.empty()) opts.direction = Eigen::Map<const Vector>(c.xi.data(), static_cast<Eigen::Index>(c.xi.size()));
  return opts;
}

int cmd_analyze(const RunConfig& c, const RunMeta& meta, std::ostream& out) {
  const Subspace s = config_subspace(c);
  const Tiling t = enumerate_tiling(s, config_tiling(c));
  const MomentReport rep = body_report(t, !c.no_per_tile);
  const std::string fmt = c.format.empty() ? "json" : c.format;
  const std::string content = fmt == "json"
                                  ? dump_json(with_meta(meta, report_to_json(rep, !c.no_per_tile)))
                                  : csv_meta_lines(meta) + report_csv(rep);
  const std::string path = resolve_output(c.output);
  if (path.empty() || path == "-") out << content;
  else write_output(path, content);
  if (!c.tiling_output.empty())
    write_output(resolve_output(c.tiling_output), dump_json(with_meta(meta, tiling_to_json(t))));
  return kExitOk;
}

int cmd_ensemble(const RunConfig& c, const RunMeta& meta, std::ostream& out, std::ostream& err) {
  const std::string fmt = c.format.empty() ? "csv" : c.format;
  const std::string path = resolve_output(c.output);
  std::ofstream file;
  std::ostream* sink = &out;
  if (!path.empty() && path != "-") {
    file.open(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    sink = &file;
  }
  EnsembleOptions opts;
  opts.threads = c.threads;
  opts.timing = c.timing;
  if (fmt == "csv") {
    *sink << csv_meta_lines(meta) << ensemble_csv_header() << std::flush;
    opts.on_record = [&](const EnsembleRecord& r) { *sink << ensemble_csv_row(r) << std::flush; };
  }
  const auto records = ensemble_run(c.n, c.k, c.trials, c.seed, opts);
  const EnsembleSummary sum = summarize(records, c.threshold);
  if (fmt == "json") {
    Json payload;
    payload["summary"] = summary_to_json(sum);
    Json recs = Json::array();
    for (const auto& r : records) recs.push_back(record_to_json(r));
    payload["records"] = recs;
    *sink << dump_json(with_meta(meta, payload)) << std::flush;
  }
  err << "ensemble n=" << c.n << " k=" << c.k << " trials=" << sum.trials
      << " max_ratio=" << format_double(sum.max_ratio) << " median_ratio=" << format_double(sum.median_ratio)
      << " bound_violations=" << sum.bound_violations
      << " fraction_above_threshold=" << format_double(sum.fraction_above_threshold) << '\n';
  return sum.bound_violations == 0 ? kExitOk : kExitFailure;
}

void emit(const RunConfig& c, const std::string& content, std::ostream& out) {
  const std::string path = resolve_output(c.output);
  if (path.empty() || path == "-") out << content;
  else write_output(path, content);
}

int cmd_face_mean(const RunConfig& c, const RunMeta& meta, std::ostream& out) {
  const Face f = config_face(c, c.n, c.k);
  const FaceMeanResult r = face_mean_experiment(c.n, c.k, f, c.trials, c.seed);
  emit(c, dump_json(with_meta(meta, face_mean_to_json(r, c.n, c.k, f))), out);
  return kExitOk;
}

int cmd_lipschitz(const RunConfig& c, const RunMeta& meta, std::ostream& out) {
  const Face f = config_face(c, c.n, c.k);
  const LipschitzProbe p = lipschitz_probe(c.n, c.k, f, c.pairs, c.seed);
  const std::string fmt = c.format.empty() ? "json" : c.format;
  emit(c, fmt == "json" ? dump_json(with_meta(meta, lipschitz_to_json(p, c.n, c.k)))
                        : csv_meta_lines(meta) + lipschitz_csv(p),
       out);
  return p.within_bound() ? kExitOk : kExitFailure;
}

int cmd_histogram(const RunConfig& c, const RunMeta& meta, std::ostream& out) {
  const DeviationHistogram h = deviation_histogram(c.n, c.k, c.trials, c.bins, c.seed, c.threads);
  emit(c, dump_json(with_meta(meta, histogram_to_json(h))), out);
  return kExitOk;
}

int cmd_sample(const RunConfig& c, const RunMeta& meta, std::ostream& out) {
  const Subspace s = config_subspace(c);
  SampleBatch b;
  if (c.method == "exact") {
    const Tiling t = enumerate_tiling(s, config_tiling(c));
    b = sample_uniform(t, c.n_samples, c.seed, c.threads);
  } else {
    b = rejection_sample(s, c.n_samples, c.seed, c.threads);
  }
  const std::string fmt = c.format.empty() ? "csv" : c.format;
  if (fmt == "csv") {
    emit(c, csv_meta_lines(meta) + samples_csv(b), out);
  } else {
    Json payload;
    payload["method"] = to_string(b.method);
    Json pts = Json::array();
    for (std::size_t i = 0; i < b.size(); ++i) {
      Json row = Json::array();
      for (Eigen::Index j = 0; j < b.points.cols(); ++j) row.push_back(b.points(static_cast<Eigen::Index>(i), j));
      pts.push_back(row);
    }
    payload["points"] = pts;
    payload["tile_ids"] = b.tile_ids;
    emit(c, dump_json(with_meta(meta, payload)), out);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Exact moments and tilings of projections of the n-cube", "cubeshadow"};
  app.require_subcommand(1);

  auto add_nk = [&](CLI::App* sub) {
    sub->add_option("--n", c.n, "ambient dimension");
    sub->add_option("--k", c.k, "codimension");
    sub->add_option("--seed", c.seed, "run seed");
    sub->add_option("--output,-o", c.output, "output file (default: stdout)");
    sub->add_option("--format", c.format, "json or csv");
    sub->add_option("--threads", c.threads, "worker threads");
  };
  auto add_face = [&](CLI::App* sub) {
    sub->add_option("--face-fixed", c.face_fixed, "fixed coordinates (1-based)")->delimiter(',');
    sub->add_option("--face-signs", c.face_signs, "signs of the fixed coordinates")->delimiter(',');
  };

  auto* analyze = app.add_subcommand("analyze", "exact moment report for one subspace");
  add_nk(analyze);
  analyze->add_option("--subspace-file", c.subspace_file, "subspace text file");
  analyze->add_flag("--axis", c.axis, "use span{e_1..e_{n-k}}");
  analyze->add_option("--xi", c.xi, "tiling direction in E-perp coordinates")->delimiter(',');
  analyze->add_option("--tiling-output", c.tiling_output, "also write the tiling as JSON");
  analyze->add_flag("--no-per-tile", c.no_per_tile, "omit per-tile statistics");

  auto* ensemble = app.add_subcommand("ensemble", "moment reports over Haar subspaces");
  add_nk(ensemble);
  ensemble->add_option("--trials", c.trials, "number of subspaces");
  ensemble->add_option("--threshold", c.threshold, "ratio threshold for the tail fraction");
  ensemble->add_flag("--timing", c.timing, "record wall times (makes output nondeterministic)");

  auto* face_mean = app.add_subcommand("face-mean", "Grassmannian mean of a face moment");
  add_nk(face_mean);
  add_face(face_mean);
  face_mean->add_option("--trials", c.trials, "number of subspaces");

  auto* lipschitz = app.add_subcommand("lipschitz", "Lipschitz probe of a face moment");
  add_nk(lipschitz);
  add_face(lipschitz);
  lipschitz->add_option("--pairs", c.pairs, "number of subspace pairs");

  auto* histogram = app.add_subcommand("histogram", "deviation histogram of face moments");
  add_nk(histogram);
  histogram->add_option("--trials", c.trials, "number of subspaces");
  histogram->add_option("--bins", c.bins, "number of bins");

  auto* sample = app.add_subcommand("sample", "uniform samples from the projection");
  add_nk(sample);
  sample->add_option("--subspace-file", c.subspace_file, "subspace text file");
  sample->add_flag("--axis", c.axis, "use span{e_1..e_{n-k}}");
  sample->add_option("--samples", c.n_samples, "number of samples");
  sample->add_option("--method", c.method, "exact or rejection");
  sample->add_option("--xi", c.xi, "tiling direction in E-perp coordinates")->delimiter(',');

  auto* selftest = app.add_subcommand("selftest", "run the invariant suites");
  selftest->add_option("--threads", c.threads, "worker threads");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  const RunMeta meta{c.seed, join_args(args)};
  try {
    validate(c);
    if (analyze->parsed()) return cmd_analyze(c, meta, out);
    if (ensemble->parsed()) return cmd_ensemble(c, meta, out, err);
    if (face_mean->parsed()) return cmd_face_mean(c, meta, out);
    if (lipschitz->parsed()) return cmd_lipschitz(c, meta, out);
    if (histogram->parsed()) return cmd_histogram(c, meta, out);
    if (sample->parsed()) return cmd_sample(c, meta, out);
    if (selftest->parsed()) return run_selftest(out, c.threads) ? kExitOk : kExitFailure;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.is_validation() ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitValidation;
}

}  // namespace cubeshadow
