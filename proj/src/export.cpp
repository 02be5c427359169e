#include "cubeshadow/export.hpp"

#include "cubeshadow/random.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cubeshadow {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json meta_json(const RunMeta& meta) {
  Json j;
  j["version"] = kVersion;
  j["seed"] = meta.seed;
  j["generator"] = std::string(Rng::kGeneratorId);
  j["command"] = meta.command;
  return j;
}

std::string csv_meta_lines(const RunMeta& meta) {
  std::ostringstream out;
  out << "# version=" << kVersion << '\n'
      << "# seed=" << meta.seed << '\n'
      << "# generator=" << Rng::kGeneratorId << '\n'
      << "# command=" << meta.command << '\n';
  return out.str();
}

Json with_meta(const RunMeta& meta, const Json& payload) {
  Json j;
  j["meta"] = meta_json(meta);
  for (auto it = payload.begin(); it != payload.end(); ++it) j[it.key()] = it.value();
  return j;
}

Json tiling_to_json(const Tiling& t) {
  Json j;
  j["n"] = t.n();
  j["k"] = t.k();
  Json xi = Json::array();
  for (Eigen::Index i = 0; i < t.direction().size(); ++i) xi.push_back(t.direction()[i]);
  j["xi"] = xi;
  j["total_volume"] = t.total_volume();
  Json tiles = Json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    Json tile;
    Json fixed = Json::array();
    for (int f : t.fixed(i)) fixed.push_back(f + 1);
    Json signs = Json::array();
    for (signed char s : t.signs(i)) signs.push_back(static_cast<int>(s));
    tile["fixed"] = fixed;
    tile["signs"] = signs;
    tile["weight"] = t.weight(i);
    tile["volume"] = t.volume(i);
    const TileGeometry g = t.geometry(i);
    Json shift = Json::array();
    for (Eigen::Index r = 0; r < g.shift.size(); ++r) shift.push_back(g.shift[r]);
    tile["shift"] = shift;
    tiles.push_back(tile);
  }
  j["tiles"] = tiles;
  return j;
}

Json report_to_json(const MomentReport& rep, bool include_per_tile) {
  Json j;
  j["mean_sq"] = rep.mean_sq;
  j["variance"] = rep.variance;
  j["lambda_sq"] = rep.lambda_sq;
  j["ratio"] = rep.ratio;
  Json b;
  b["mean_lower"] = rep.bounds.mean_lower;
  b["mean_upper"] = rep.bounds.mean_upper;
  b["lambda_lower"] = rep.bounds.lambda_lower;
  b["face_dev_ok"] = rep.bounds.face_dev_ok;
  b["max_tile_var_over_n"] = rep.bounds.max_tile_var_over_n;
  j["bounds"] = b;
  Json tiles = Json::array();
  if (include_per_tile) {
    for (const auto& t : rep.per_tile) {
      Json e;
      e["tile"] = t.tile;
      e["mean_sq"] = t.mean_sq;
      e["variance"] = t.variance;
      tiles.push_back(e);
    }
  }
  j["per_tile"] = tiles;
  return j;
}

Json summary_to_json(const EnsembleSummary& s) {
  Json j;
  j["trials"] = s.trials;
  j["max_ratio"] = s.max_ratio;
  j["min_ratio"] = s.min_ratio;
  j["median_ratio"] = s.median_ratio;
  j["q90_ratio"] = s.q90_ratio;
  j["q99_ratio"] = s.q99_ratio;
  j["bound_violations"] = s.bound_violations;
  j["violation_fraction"] = s.violation_fraction;
  j["threshold"] = s.threshold;
  j["fraction_above_threshold"] = s.fraction_above_threshold;
  return j;
}

Json record_to_json(const EnsembleRecord& r) {
  Json j;
  j["seed"] = r.seed;
  j["n"] = r.n;
  j["k"] = r.k;
  j["ratio"] = r.ratio;
  j["mean_sq"] = r.mean_sq;
  j["variance"] = r.variance;
  j["lambda_sq"] = r.lambda_sq;
  j["max_face_dev"] = r.max_face_dev;
  j["l"] = r.l;
  j["wall_time"] = r.wall_time;
  return j;
}

namespace {

Json face_json(const Face& f) {
  Json j;
  Json fixed = Json::array();
  for (int i : f.fixed) fixed.push_back(i + 1);
  j["fixed"] = fixed;
  j["signs"] = f.signs;
  return j;
}

}  // namespace

Json face_mean_to_json(const FaceMeanResult& r, int n, int k, const Face& face) {
  Json j;
  j["n"] = n;
  j["k"] = k;
  j["face"] = face_json(face);
  j["trials"] = r.trials;
  j["empirical_mean"] = r.empirical_mean;
  j["target"] = r.target;
  j["standard_error"] = r.standard_error;
  j["z_score"] = r.z_score;
  return j;
}

Json lipschitz_to_json(const LipschitzProbe& p, int n, int k) {
  Json j;
  j["n"] = n;
  j["k"] = k;
  j["face"] = face_json(p.face);
  j["bound_op"] = p.bound_op;
  j["bound_dist"] = p.bound_dist;
  j["max_ratio_op"] = p.max_ratio_op;
  j["max_ratio_hs"] = p.max_ratio_hs;
  j["excluded"] = p.excluded;
  j["within_bound"] = p.within_bound();
  Json pairs = Json::array();
  for (const auto& q : p.pairs) {
    Json e;
    e["seed1"] = q.seed1;
    e["seed2"] = q.seed2;
    e["delta_f"] = q.delta_f;
    e["op_dist"] = q.op_dist;
    e["hs_dist"] = q.hs_dist;
    e["degenerate"] = q.degenerate;
    pairs.push_back(e);
  }
  j["pairs"] = pairs;
  return j;
}

Json histogram_to_json(const DeviationHistogram& h) {
  Json j;
  j["n"] = h.n;
  j["k"] = h.k;
  j["target"] = h.target;
  j["bin_edges"] = h.bin_edges;
  j["counts"] = h.counts;
  Json tails = Json::array();
  for (std::size_t i = 0; i < h.tail_fractions.size(); ++i) {
    Json e;
    e["t"] = h.tail_multipliers[i];
    e["fraction"] = h.tail_fractions[i];
    tails.push_back(e);
  }
  j["tail_fractions"] = tails;
  j["total"] = h.total;
  j["max_abs_dev"] = h.max_abs_dev;
  j["within_bounds"] = h.face_values_within_bounds && h.deviations_within_width;
  return j;
}

std::string ensemble_csv_header() {
  return "seed,n,k,ratio,mean_sq,variance,lambda_sq,max_face_dev,l,wall_time\n";
}

std::string ensemble_csv_row(const EnsembleRecord& r) {
  std::ostringstream out;
  out << r.seed << ',' << r.n << ',' << r.k << ',' << format_double(r.ratio) << ','
      << format_double(r.mean_sq) << ',' << format_double(r.variance) << ','
      << format_double(r.lambda_sq) << ',' << format_double(r.max_face_dev) << ',' << r.l << ','
      << format_double(r.wall_time) << '\n';
  return out.str();
}

std::string lipschitz_csv(const LipschitzProbe& p) {
  std::ostringstream out;
  out << "seed1,seed2,delta_f,op_dist,hs_dist,degenerate\n";
  for (const auto& q : p.pairs) {
    out << q.seed1 << ',' << q.seed2 << ',' << format_double(q.delta_f) << ','
        << format_double(q.op_dist) << ',' << format_double(q.hs_dist) << ','
        << (q.degenerate ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string report_csv(const MomentReport& rep) {
  std::ostringstream out;
  out << "tile,mean_sq,variance\n";
  for (const auto& t : rep.per_tile)
    out << t.tile << ',' << format_double(t.mean_sq) << ',' << format_double(t.variance) << '\n';
  return out.str();
}

std::string samples_csv(const SampleBatch& b) {
  std::string out;
  const Eigen::Index m = b.points.cols();
  for (Eigen::Index j = 0; j < m; ++j) out += "coord_" + std::to_string(j + 1) + ",";
  out += "tile_id\n";
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out += format_double(b.points(static_cast<Eigen::Index>(i), j));
      out += ',';
    }
    out += std::to_string(b.tile_ids[i]);
    out += '\n';
  }
  return out;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace cubeshadow
