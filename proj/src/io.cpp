#include "safeset/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "safeset/error.hpp"

namespace safeset {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream s(line);
    while (std::getline(s, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

double parse_real(const std::string& text, std::size_t line_no) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": not a number: '" + text + "'");
    }
    return value;
}

std::int64_t parse_int(const std::string& text, std::size_t line_no) {
    std::int64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": not an integer: '" + text + "'");
    }
    return value;
}

void write_point(std::ostream& out, const StatePoint& p) {
    for (const auto x : p.cont) {
        out << ',' << format_real(x);
    }
    for (const auto q : p.disc) {
        out << ',' << q;
    }
}

void write_header(std::ostream& out, const char* first, const OssSpec& spec) {
    out << first;
    for (const auto& name : spec.dim_names()) {
        out << ',' << name;
    }
}

}  // namespace

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

void write_centroids_csv(std::ostream& out, const CoveringSet& set) {
    write_header(out, "id", set.spec());
    out << '\n';
    for (const auto id : set.ids()) {
        out << id.value;
        write_point(out, set.centroid(id));
        out << '\n';
    }
}

void write_oracle_csv(std::ostream& out, const OracleResult& result) {
    write_header(out, "id", result.grid.spec());
    out << ",p_hat,M\n";
    for (const auto& e : result.entries) {
        out << e.id.value;
        write_point(out, result.grid.centroid(e.id));
        out << ',' << format_real(e.p_hat) << ',' << result.trials << '\n';
    }
}

CentroidTable read_centroids_csv(std::istream& in, const OssSpec& spec) {
    CentroidTable table{CoveringSet(spec), {}};
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("centroid file is empty");
    }
    const auto header = split(strip_cr(line), ',');
    const auto names = spec.dim_names();
    const auto width = names.size() + 1;
    bool has_p_hat = false;
    const bool base_ok = header.size() >= width && header[0] == "id" &&
                         std::equal(names.begin(), names.end(), header.begin() + 1);
    if (base_ok && header.size() == width + 2 && header[width] == "p_hat" && header[width + 1] == "M") {
        has_p_hat = true;
    } else if (!base_ok || header.size() != width) {
        throw GridMismatchError("centroid header '" + strip_cr(line) + "' does not match the OSS dimensions");
    }

    const auto ncont = spec.cont_dims.size();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                             " fields");
        }
        const auto raw_id = parse_int(fields[0], line_no);
        if (raw_id < 0) {
            throw ParseError("line " + std::to_string(line_no) + ": negative centroid id");
        }
        StatePoint p;
        for (std::size_t i = 0; i < ncont; ++i) {
            p.cont.push_back(parse_real(fields[1 + i], line_no));
        }
        for (std::size_t j = 0; j < spec.disc_dims.size(); ++j) {
            p.disc.push_back(parse_int(fields[1 + ncont + j], line_no));
        }
        if (!spec.in_oss(p)) {
            throw GridMismatchError("line " + std::to_string(line_no) + ": centroid outside the OSS");
        }
        const auto snapped = snap_to_cell(spec, p);
        for (std::size_t i = 0; i < ncont; ++i) {
            const double tol = 1e-7 * std::max(1.0, std::abs(snapped.cont[i]));
            if (std::abs(snapped.cont[i] - p.cont[i]) > tol) {
                throw GridMismatchError("line " + std::to_string(line_no) + ": '" + spec.cont_dims[i].name +
                                        "' is not on the lattice of this OSS");
            }
        }
        const CentroidId id{static_cast<std::uint64_t>(raw_id)};
        if (table.set.find_cell(cell_of(spec, snapped))) {
            throw ParseError("line " + std::to_string(line_no) + ": second centroid in one cell");
        }
        table.set.insert_with_id(id, snapped);
        if (has_p_hat) {
            const double p_hat = parse_real(fields[width], line_no);
            if (!(p_hat >= 0.0 && p_hat <= 1.0)) {
                throw ParseError("line " + std::to_string(line_no) + ": p_hat outside [0, 1]");
            }
            table.p_hat[id] = p_hat;
        }
    }
    return table;
}

void write_trace_csv(std::ostream& out, const OssSpec& spec, const ScenarioRun& run) {
    write_header(out, "t", spec);
    out << ",flag\n";
    for (std::size_t t = 0; t < run.recorded.size(); ++t) {
        out << t;
        write_point(out, run.recorded[t]);
        out << ',' << to_string(run.flags[t]) << '\n';
    }
}

Json state_json(const StatePoint& p) {
    return Json{{"cont", p.cont}, {"disc", p.disc}};
}

StatePoint state_from_json(const Json& j) {
    return StatePoint{j.at("cont").get<std::vector<double>>(), j.at("disc").get<std::vector<std::int64_t>>()};
}

Json run_record_json(const RunRecord& rec) {
    Json j;
    j["run_index"] = rec.run_index;
    j["run_seed"] = rec.run_seed;
    j["s0_id"] = rec.s0_id.value;
    j["s0"] = state_json(rec.s0);
    j["source"] = to_string(rec.source);
    j["outcome"] = to_string(rec.outcome);
    if (rec.outcome == Outcome::Failure) {
        j["steps_to_failure"] = rec.steps_to_failure;
    }
    j["held_steps"] = rec.held_steps;
    j["centroids_added"] = rec.centroids_added;
    j["centroids_removed"] = rec.centroids_removed;
    j["buffer_len_after"] = rec.buffer_len_after;
    j["N_after"] = rec.n_after;
    return j;
}

RunRecord run_record_from_json(const Json& j) {
    RunRecord rec;
    try {
        rec.run_index = j.at("run_index").get<std::size_t>();
        rec.run_seed = j.at("run_seed").get<std::uint64_t>();
        rec.s0_id = CentroidId{j.at("s0_id").get<std::uint64_t>()};
        rec.s0 = state_from_json(j.at("s0"));
        const auto source = j.at("source").get<std::string>();
        if (source == "uniform") {
            rec.source = PickSource::Uniform;
        } else if (source == "replay") {
            rec.source = PickSource::Replay;
        } else {
            throw ParseError("unknown pick source '" + source + "'");
        }
        const auto outcome = j.at("outcome").get<std::string>();
        if (outcome == "safe") {
            rec.outcome = Outcome::Safe;
        } else if (outcome == "failure") {
            rec.outcome = Outcome::Failure;
            rec.steps_to_failure = j.at("steps_to_failure").get<int>();
        } else if (outcome == "init_failed") {
            rec.outcome = Outcome::InitFailed;
        } else {
            throw ParseError("unknown outcome '" + outcome + "'");
        }
        rec.held_steps = j.at("held_steps").get<int>();
        rec.centroids_added = j.at("centroids_added").get<std::size_t>();
        rec.centroids_removed = j.at("centroids_removed").get<std::size_t>();
        rec.buffer_len_after = j.at("buffer_len_after").get<std::size_t>();
        rec.n_after = j.at("N_after").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed run record: ") + e.what());
    }
    return rec;
}

void write_runs_jsonl(std::ostream& out, std::span<const RunRecord> log) {
    for (const auto& rec : log) {
        out << run_record_json(rec).dump() << '\n';
    }
}

std::vector<RunRecord> read_runs_jsonl(std::istream& in) {
    std::vector<RunRecord> log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip_cr(line).empty()) {
            continue;
        }
        Json j;
        try {
            j = Json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("run log line " + std::to_string(line_no) + ": " + e.what());
        }
        log.push_back(run_record_from_json(j));
    }
    return log;
}

Json report_json(const CampaignReport& report, const Json& config, const std::string& centroids_file) {
    const auto& c = report.counters;
    Json j;
    j["config"] = config;
    j["verdict"] = to_string(report.verdict);
    j["vacuous"] = report.vacuous;
    j["target_consecutive_safe"] = report.target;
    j["counters"] = Json{{"total_runs", c.total_runs},
                         {"failure_runs", c.failure_runs},
                         {"init_failure_runs", c.init_failure_runs},
                         {"pruned_centroids", c.pruned_centroids},
                         {"added_centroids", c.added_centroids},
                         {"initial_size", c.initial_size},
                         {"final_size", c.final_size},
                         {"final_N", c.final_n}};
    j["centroids"] = centroids_file;
    return j;
}

Json verdict_json(const ValidationVerdict& verdict, const Json& config, const std::string& trace_file) {
    Json j;
    j["config"] = config;
    j["outcome"] = to_string(verdict.outcome);
    j["runs_used"] = verdict.runs_used;
    j["required"] = verdict.required;
    j["epsilon"] = verdict.epsilon;
    j["beta"] = verdict.beta;
    j["confidence"] = verdict.confidence();
    if (verdict.witness) {
        const auto& run = *verdict.witness;
        Json w;
        w["centroid_id"] = verdict.witness_id->value;
        w["run_seed"] = verdict.witness_seed;
        w["initial"] = state_json(run.initial);
        w["outcome"] = to_string(run.outcome);
        w["failure_step"] = run.failure_step;
        w["held_steps"] = run.held_steps;
        Json trace = Json::array();
        for (std::size_t t = 0; t < run.recorded.size(); ++t) {
            Json s = state_json(run.recorded[t]);
            s["flag"] = to_string(run.flags[t]);
            trace.push_back(std::move(s));
        }
        w["trace"] = std::move(trace);
        if (!trace_file.empty()) {
            w["trace_csv"] = trace_file;
        }
        if (verdict.escaping_state) {
            w["escaping_state"] = state_json(*verdict.escaping_state);
            w["escaping_step"] = verdict.escaping_step;
        }
        j["witness"] = std::move(w);
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

Json compare_json(const CompareMetrics& metrics) {
    return Json{{"iou", metrics.iou}, {"unsound_count", metrics.unsound_count}, {"missed_count", metrics.missed_count}};
}

}  // namespace safeset
