#pragma once

#include "cubeshadow/exact_moments.hpp"
#include "cubeshadow/face_tiling.hpp"
#include "cubeshadow/grassmann_lab.hpp"
#include "cubeshadow/sampler.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace cubeshadow {

using Json = nlohmann::ordered_json;

/// Provenance written at the top of every output file.
struct RunMeta {
  std::uint64_t seed = 0;
  std::string command;  ///< argument list, space separated, without argv[0]
};

Json meta_json(const RunMeta& meta);
/// "# key=value" comment lines for CSV outputs.
std::string csv_meta_lines(const RunMeta& meta);

/// %.17g
std::string format_double(double v);

Json tiling_to_json(const Tiling& t);
Json report_to_json(const MomentReport& rep, bool include_per_tile = true);
Json summary_to_json(const EnsembleSummary& s);
Json record_to_json(const EnsembleRecord& r);
Json face_mean_to_json(const FaceMeanResult& r, int n, int k, const Face& face);
Json lipschitz_to_json(const LipschitzProbe& p, int n, int k);
Json histogram_to_json(const DeviationHistogram& h);

/// Object with "meta" first, then the payload's keys in order.
Json with_meta(const RunMeta& meta, const Json& payload);

std::string ensemble_csv_header();
std::string ensemble_csv_row(const EnsembleRecord& r);
std::string lipschitz_csv(const LipschitzProbe& p);
std::string report_csv(const MomentReport& rep);
/// Header "coord_1,...,coord_m,tile_id" and one row per point.
std::string samples_csv(const SampleBatch& b);

std::string dump_json(const Json& j);

/// Writes `content` to `path`, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& content);

}  // namespace cubeshadow
