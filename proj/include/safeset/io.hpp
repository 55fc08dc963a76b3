#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "safeset/oracle.hpp"
#include "safeset/oss.hpp"
#include "safeset/quantify.hpp"
#include "safeset/scenario.hpp"
#include "safeset/validate.hpp"

namespace safeset {

using Json = nlohmann::ordered_json;

/// Nine significant digits, the float format of every CSV artifact.
std::string format_real(double x);

/// `id,<continuous names>,<discrete names>`, one row per centroid in id order.
void write_centroids_csv(std::ostream& out, const CoveringSet& set);

/// Centroid table with p_hat and M columns appended.
void write_oracle_csv(std::ostream& out, const OracleResult& result);

/// A centroid CSV read back over a known OSS. p_hat is filled when the file
/// carries that column (oracle output).
struct CentroidTable {
    CoveringSet set;
    std::map<CentroidId, double> p_hat;
};

/// Parses a centroid or oracle CSV. Every row is snapped onto its lattice
/// centroid and keeps its id. Throws GridMismatchError when the header or a
/// coordinate does not fit spec, ParseError for malformed rows.
CentroidTable read_centroids_csv(std::istream& in, const OssSpec& spec);

/// `t,<dims>,flag`, one row per recorded state.
void write_trace_csv(std::ostream& out, const OssSpec& spec, const ScenarioRun& run);

Json state_json(const StatePoint& p);
StatePoint state_from_json(const Json& j);

Json run_record_json(const RunRecord& rec);
RunRecord run_record_from_json(const Json& j);

/// One compact JSON object per line.
void write_runs_jsonl(std::ostream& out, std::span<const RunRecord> log);
std::vector<RunRecord> read_runs_jsonl(std::istream& in);

/// Campaign summary; config is echoed verbatim and centroids_file names the CSV.
Json report_json(const CampaignReport& report, const Json& config, const std::string& centroids_file);

/// Verdict with the witness run inline; trace_file, when set, names the
/// witness trace CSV written next to it.
Json verdict_json(const ValidationVerdict& verdict, const Json& config, const std::string& trace_file = "");

Json compare_json(const CompareMetrics& metrics);

}  // namespace safeset
