#include "safeset/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "safeset/config.hpp"
#include "safeset/error.hpp"
#include "safeset/io.hpp"
#include "safeset/oracle.hpp"
#include "safeset/plot.hpp"
#include "safeset/quantify.hpp"
#include "safeset/validate.hpp"

namespace safeset::cli {

namespace fs = std::filesystem;

namespace {

struct Session {
    CampaignConfig config;
    fs::path out_dir;
};

Session open_session(const CommonOptions& opts) {
    Session s{load_config(opts.config), {}};
    if (opts.seed) {
        s.config.seed = *opts.seed;
    }
    s.out_dir = opts.out ? fs::path(*opts.out) : fs::path(s.config.output_dir);
    fs::create_directories(s.out_dir);
    return s;
}

template <typename Write>
void write_file(const fs::path& path, Write&& write) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error("cannot write '" + path.string() + "'");
    }
    write(file);
    if (!file) {
        throw Error("failed writing '" + path.string() + "'");
    }
}

void write_json(const fs::path& path, const Json& j) {
    write_file(path, [&](std::ostream& f) { f << j.dump(2) << '\n'; });
}

CentroidTable read_set(const std::string& path, const OssSpec& spec) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open centroid file '" + path + "'");
    }
    return read_centroids_csv(in, spec);
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
}

}  // namespace

int cmd_quantify(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto s = open_session(opts);
        const auto sys = make_system(s.config.system, s.config.oss);
        const auto report = quantify(*sys, s.config.oss, s.config.quantify_config());

        write_file(s.out_dir / "centroids.csv", [&](std::ostream& f) { write_centroids_csv(f, report.final_set); });
        write_file(s.out_dir / "runs.jsonl", [&](std::ostream& f) { write_runs_jsonl(f, report.log); });
        write_json(s.out_dir / "report.json", report_json(report, s.config.to_json(), "centroids.csv"));

        out << to_string(report.verdict) << ": " << report.counters.final_size << " centroids after "
            << report.counters.total_runs << " runs (" << report.counters.failure_runs << " failures)\n";
        return report.verdict == Verdict::Certified ? kOk : kBudgetExhausted;
    });
}

int cmd_validate(const CommonOptions& opts, const std::string& candidate, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto s = open_session(opts);
        const auto sys = make_system(s.config.system, s.config.oss);
        const auto table = read_set(candidate, s.config.oss);
        const auto verdict =
            validate(*sys, s.config.oss, table.set, s.config.epsilon, s.config.beta, s.config.seed);

        write_json(s.out_dir / "verdict.json",
                   verdict_json(verdict, s.config.to_json(), verdict.witness ? "witness_trace.csv" : ""));
        if (verdict.witness) {
            write_file(s.out_dir / "witness_trace.csv",
                       [&](std::ostream& f) { write_trace_csv(f, s.config.oss, *verdict.witness); });
        }
        out << to_string(verdict.outcome) << " after " << verdict.runs_used << " of " << verdict.required
            << " runs\n";
        switch (verdict.outcome) {
            case ValidationOutcome::Validated:
                return kOk;
            case ValidationOutcome::Falsified:
                return kFalsified;
            case ValidationOutcome::CoverageViolated:
                return kCoverageViolated;
        }
        return kError;
    });
}

int cmd_oracle(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto s = open_session(opts);
        const auto sys = make_system(s.config.system, s.config.oss);
        const auto result = oracle_safe_set(*sys, s.config.oss, s.config.epsilon, s.config.oracle_trials,
                                            s.config.seed, 0, s.config.capacity);
        write_file(s.out_dir / "oracle.csv", [&](std::ostream& f) { write_oracle_csv(f, result); });
        write_file(s.out_dir / "oracle_safe.csv", [&](std::ostream& f) { write_centroids_csv(f, result.safe_set); });
        out << result.safe_set.size() << " of " << result.grid.size() << " centroids with p_hat <= "
            << format_real(result.epsilon) << " over " << result.trials << " trials\n";
        return kOk;
    });
}

int cmd_compare(const CommonOptions& opts, const std::vector<std::string>& sets, std::ostream& out,
                std::ostream& err) {
    return guarded(err, [&] {
        if (sets.size() < 2) {
            throw Error("compare needs at least two --set files");
        }
        const auto s = open_session(opts);
        std::vector<CellSet> cells;
        for (const auto& path : sets) {
            cells.push_back(read_set(path, s.config.oss).set.cells());
        }
        Json j;
        if (cells.size() == 2) {
            j = compare_json(compare(cells[0], cells[1]));
        } else {
            j = Json{{"iou", iou(cells)}};
        }
        write_json(s.out_dir / "compare.json", j);
        out << j.dump() << '\n';
        return kOk;
    });
}

int cmd_plot(const CommonOptions& opts, const std::string& set, const std::string& dims, const std::string& slice,
             std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto comma = dims.find(',');
        if (comma == std::string::npos || dims.find(',', comma + 1) != std::string::npos) {
            throw Error("--dims takes exactly two names, e.g. --dims x,y");
        }
        PlotRequest request{dims.substr(0, comma), dims.substr(comma + 1),
                            slice.empty() ? std::map<std::string, double>{} : parse_slice(slice)};
        const auto s = open_session(opts);
        const auto table = read_set(set, s.config.oss);
        const auto svg = plot_svg(s.config.oss, table, request);
        write_file(s.out_dir / "plot.svg", [&](std::ostream& f) { f << svg; });
        out << "wrote " << (s.out_dir / "plot.svg").string() << '\n';
        return kOk;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sample-based safe-set quantification for black-box stochastic systems"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::uint64_t seed = 0;
    std::vector<std::string> sets;
    std::string dims;
    std::string slice;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config, "Campaign config (JSON)")->required();
        cmd->add_option_function<std::string>("--out", [&](const std::string& v) { opts.out = v; },
                                              "Output directory (overrides output_dir)");
        cmd->add_option("--seed", seed, "Random seed (overrides seed)");
    };

    auto* quantify_cmd = app.add_subcommand("quantify", "Run the quantification loop");
    add_common(quantify_cmd);
    auto* validate_cmd = app.add_subcommand("validate", "Validate a candidate centroid set");
    add_common(validate_cmd);
    validate_cmd->add_option("--set", sets, "Candidate centroid CSV")->required()->expected(1);
    auto* oracle_cmd = app.add_subcommand("oracle", "Estimate per-centroid failure probabilities");
    add_common(oracle_cmd);
    auto* compare_cmd = app.add_subcommand("compare", "IoU and soundness metrics between centroid sets");
    add_common(compare_cmd);
    compare_cmd->add_option("--set", sets, "Centroid CSV (repeat; first is the quantified set)")->required();
    auto* plot_cmd = app.add_subcommand("plot", "Render a two-dimensional slice as SVG");
    add_common(plot_cmd);
    plot_cmd->add_option("--set", sets, "Centroid or oracle CSV")->required()->expected(1);
    plot_cmd->add_option("--dims", dims, "Plotted dimensions, x,y")->required();
    plot_cmd->add_option("--slice", slice, "Values for the other dimensions, name=value,...");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kError;
    }
    for (auto* cmd : {quantify_cmd, validate_cmd, oracle_cmd, compare_cmd, plot_cmd}) {
        if (cmd->parsed() && cmd->count("--seed") > 0) {
            opts.seed = seed;
        }
    }

    if (quantify_cmd->parsed()) {
        return cmd_quantify(opts, out, err);
    }
    if (validate_cmd->parsed()) {
        return cmd_validate(opts, sets.front(), out, err);
    }
    if (oracle_cmd->parsed()) {
        return cmd_oracle(opts, out, err);
    }
    if (compare_cmd->parsed()) {
        return cmd_compare(opts, sets, out, err);
    }
    return cmd_plot(opts, sets.front(), dims, slice, out, err);
}

}  // namespace safeset::cli
