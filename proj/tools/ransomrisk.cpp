// ransomrisk: command-line front end for the ransomware risk pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ransomrisk/activity.hpp"
#include "ransomrisk/app.hpp"
#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/json_io.hpp"
#include "ransomrisk/cti/extract.hpp"
#include "ransomrisk/cti/prompt.hpp"
#include "ransomrisk/dataset.hpp"
#include "ransomrisk/forest/metrics.hpp"
#include "ransomrisk/forest/model_io.hpp"
#include "ransomrisk/ingest.hpp"
#include "ransomrisk/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ransomrisk;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string config_path;
    bool quiet = false;
    json config = json::object();

    std::uint64_t seed_or(std::uint64_t fallback) const {
        if (seed) return *seed;
        return config.value("seed", fallback);
    }
    json section(const char* name) const { return config.value(name, json()); }
};

Globals g;

void note(const std::string& msg) {
    if (!g.quiet) std::cerr << msg << "\n";
}

// Writes to `path`, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        write_file(path, content);
    }
}

void emit_json(const std::string& path, const json& j) { emit(path, j.dump(2) + "\n"); }

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::usage: return 2;
        case ErrorKind::data: return 3;
        case ErrorKind::model: return 4;
    }
    return 3;
}

std::vector<AttackRecord> load_attacks(const std::string& path) { return attacks_from_json(read_json_file(path)); }

ingest::AdversaryIndex index_from_attacks(const std::vector<AttackRecord>& attacks) {
    std::vector<AdversaryProfile> profiles;
    for (const auto& a : attacks) {
        bool seen = false;
        for (const auto& p : profiles) seen = seen || p.name() == a.adversary.name();
        if (!seen) profiles.push_back(a.adversary);
    }
    return ingest::AdversaryIndex(std::move(profiles));
}

// ---------------------------------------------------------------------------

struct IngestArgs {
    std::string victims, format = "jsonl", directory, cutoff = "2021-01-01", adversaries, out, rejects;
    bool allow_empty_description = false;
};

int run_ingest(const IngestArgs& a) {
    auto directory = ingest::Directory::from_json(read_json_file(a.directory));
    ingest::AdversaryIndex index(app::load_adversaries(a.adversaries));
    std::ifstream in(a.victims, std::ios::binary);
    if (!in) throw Error("FileNotFound", "cannot open " + a.victims);
    auto result = ingest::run_ingest(in, ingest::parse_format(a.format), directory, index,
                                     parse_date_or_throw(a.cutoff), !a.allow_empty_description);
    emit_json(a.out, to_json(result.attacks));
    if (!a.rejects.empty()) write_json_file(a.rejects, ingest::to_json(result.rejections));
    note("ingest: parsed " + std::to_string(result.parsed) + ", retained " + std::to_string(result.retained) +
         ", attacks " + std::to_string(result.attacks.size()) + ", rejected " +
         std::to_string(result.rejections.size()));
    return 0;
}

struct ExtractArgs {
    std::string reports, prompts, client = "fixture", fixtures, store = "store.json", rejects, record, dump_prompts;
    std::size_t part_cap = cti::kDefaultPartCap;
};

int run_extract(const ExtractArgs& a) {
    auto registry = cti::StandardRegistry::defaults();
    auto specs = cti::load_prompt_bundle(a.prompts, registry);
    auto reports = cti::load_reports(a.reports);

    if (!a.dump_prompts.empty()) {
        fs::create_directories(a.dump_prompts);
        json index = json::array();
        for (const auto& r : reports) {
            auto prompt = cti::compile_prompt(specs, r.text);
            auto sha = sha256_hex(prompt);
            write_file((fs::path(a.dump_prompts) / (sha + ".txt")).string(), prompt);
            index.push_back({{"report", r.name}, {"prompt_sha256", sha}});
        }
        write_json_file((fs::path(a.dump_prompts) / "index.json").string(), index);
        note("extract: wrote " + std::to_string(reports.size()) + " prompts to " + a.dump_prompts);
        return 0;
    }

    std::unique_ptr<cti::ChatClient> client;
    if (a.client == "fixture") {
        if (a.fixtures.empty()) throw Error("MissingOption", "--fixtures is required with --client fixture", ErrorKind::usage);
        client = std::make_unique<cti::FixtureClient>(a.fixtures);
    } else if (a.client == "http") {
        client = cti::HttpChatClient::from_environment();
    } else {
        throw Error("UnknownClient", "client must be fixture or http", ErrorKind::usage);
    }

    cti::StixStore store;
    if (fs::exists(a.store)) store = cti::StixStore::load(a.store);
    cti::ExtractionOptions opts;
    opts.seed = g.seed_or(0);
    opts.part_cap = a.part_cap;
    opts.record_dir = a.record;
    auto outcomes = cti::run_extraction(reports, specs, registry, *client, store, opts);
    store.save(a.store);
    if (!a.rejects.empty()) write_json_file(a.rejects, cti::rejects_to_json(outcomes));

    std::size_t failed = 0;
    for (const auto& o : outcomes) {
        if (o.error.empty()) continue;
        ++failed;
        std::cerr << "extract: " << o.report << ": " << o.error << "\n";
    }
    note("extract: " + std::to_string(outcomes.size() - failed) + " of " + std::to_string(outcomes.size()) +
         " reports stored, " + std::to_string(store.size()) + " objects in " + a.store);
    return failed ? 3 : 0;
}

struct EwmaArgs {
    std::string attacks, out;
    std::optional<double> lambda;
};

int run_ewma(const EwmaArgs& a) {
    activity::EwmaParams params;
    params.lambda = a.lambda.value_or(g.section("ewma").value("lambda", 0.2));
    params.validate();
    auto table = activity::EwmaTable::build(load_attacks(a.attacks), params);
    emit_json(a.out, table.to_json());
    note("ewma: " + std::to_string(table.groups().size()) + " groups");
    return 0;
}

struct SynthArgs {
    std::string attacks, ewma, weights, out, noise_out;
    std::optional<int> replicas;
    bool no_originals = false;
};

int run_synthesize(const SynthArgs& a) {
    auto options = g.section("synthesize");
    if (options.is_null()) options = json::object();
    if (a.replicas) options["replicas"] = *a.replicas;
    if (a.no_originals) options["include_originals"] = false;
    if (!a.weights.empty()) {
        // The weights file must carry exactly the five documented keys.
        options["weights"] = synth::FeatureWeights::from_json(read_json_file(a.weights)).to_json();
    }
    auto cfg = app::synthesis_config_from_json(options, g.seed_or(42));

    auto attacks = load_attacks(a.attacks);
    if (!a.ewma.empty()) activity::stamp_ewma(attacks, activity::EwmaTable::from_json(read_json_file(a.ewma)));
    auto result = synth::synthesize(attacks, index_from_attacks(attacks), cfg);
    emit(a.out, dataset::to_csv(result.dataset.records));
    if (!a.noise_out.empty()) write_json_file(a.noise_out, result.noise.to_json());
    note("synthesize: " + std::to_string(result.dataset.unsafe_count) + " unsafe (" +
         std::to_string(result.originals) + " original, " + std::to_string(result.synthetic_unsafe) +
         " synthetic), " + std::to_string(result.dataset.safe_count) + " safe");
    return 0;
}

json metrics_document(const forest::Forest& model, const forest::Metrics& m, std::size_t train_rows,
                      std::size_t test_rows) {
    auto j = m.to_json();
    auto importance = json::array();
    for (const auto& [name, imp] : model.grouped_importance()) importance.push_back({{"feature", name}, {"importance", imp}});
    j["feature_importance"] = importance;
    j["train_rows"] = train_rows;
    j["test_rows"] = test_rows;
    return j;
}

struct TrainArgs {
    std::string dataset, model, metrics;
    std::optional<std::size_t> trees;
    std::optional<double> split;
    std::optional<unsigned> threads;
};

int run_train(const TrainArgs& a) {
    auto options = g.section("train");
    if (options.is_null()) options = json::object();
    if (a.trees) options["n_trees"] = *a.trees;
    if (a.split) options["test_fraction"] = *a.split;
    if (a.threads) options["threads"] = *a.threads;
    auto cfg = app::forest_config_from_json(options, g.seed_or(42));

    auto records = dataset::load_csv(a.dataset);
    auto [train, test] = forest::split_train_test(records, cfg.test_fraction, cfg.seed);
    auto model = forest::train(train, cfg);
    forest::save_model(a.model, model);
    auto metrics = forest::evaluate(model, test);
    if (!a.metrics.empty()) write_json_file(a.metrics, metrics_document(model, metrics, train.size(), test.size()));
    note("train: " + std::to_string(cfg.n_trees) + " trees on " + std::to_string(train.size()) + " rows; held-out F1 " +
         format_double(metrics.f1));
    return 0;
}

struct EvaluateArgs {
    std::string dataset, model, out;
    bool all_rows = false;
};

int run_evaluate(const EvaluateArgs& a) {
    auto model = forest::load_model(a.model);
    auto records = dataset::load_csv(a.dataset);
    std::vector<AttackRecord> test = records;
    std::size_t train_rows = 0;
    if (!a.all_rows) {
        // Same split the model was trained under, so only held-out rows are scored.
        auto split = forest::split_train_test(records, model.config.test_fraction, model.config.seed);
        train_rows = split.first.size();
        test = std::move(split.second);
    }
    auto metrics = forest::evaluate(model, test);
    emit_json(a.out, metrics_document(model, metrics, train_rows, test.size()));
    note("evaluate: precision " + format_double(metrics.precision) + ", recall " + format_double(metrics.recall) +
         ", F1 " + format_double(metrics.f1));
    return 0;
}

struct PredictArgs {
    std::string model, adversaries, ewma, company, as_of = "2024-01", out, format = "json";
    std::vector<std::string> groups;
};

std::vector<forest::RiskAssessment> score_groups(const PredictArgs& a, bool all_when_empty) {
    auto model = forest::load_model(a.model);
    ingest::AdversaryIndex index(app::load_adversaries(a.adversaries));
    auto table = activity::EwmaTable::from_json(read_json_file(a.ewma));
    auto company = victim_from_json(read_json_file(a.company));
    auto month = parse_year_month_or_throw(a.as_of);
    auto groups = a.groups;
    if (groups.empty() && all_when_empty)
        for (const auto& p : index.profiles()) groups.push_back(p.name());
    std::vector<forest::RiskAssessment> out;
    for (const auto& group : groups) out.push_back(app::predict(model, index, table, {company, group, month}));
    return out;
}

int run_predict(const PredictArgs& a) {
    if (a.groups.empty()) throw Error("MissingOption", "--group is required", ErrorKind::usage);
    auto report = app::report_json(score_groups(a, false), json::object());
    emit_json(a.out, report.at("assessments").size() == 1 ? report.at("assessments").at(0) : report.at("assessments"));
    return 0;
}

int run_report(const PredictArgs& a) {
    json provenance = {{"model_sha256", sha256_hex(read_file(a.model))}, {"as_of", a.as_of}};
    if (!g.config_path.empty()) provenance["config_sha256"] = app::config_hash(g.config);
    auto report = app::report_json(score_groups(a, true), provenance);
    if (a.format == "json")
        emit_json(a.out, report);
    else if (a.format == "markdown")
        emit(a.out, app::report_markdown(report));
    else
        throw Error("UnknownFormat", "report format must be json or markdown", ErrorKind::usage);
    return 0;
}

struct PipelineArgs {
    std::string out_dir;
};

int run_pipeline(const PipelineArgs& a) {
    if (g.config_path.empty()) throw Error("MissingOption", "pipeline needs --config", ErrorKind::usage);
    auto config = g.config;
    if (g.seed) config["seed"] = *g.seed;
    auto base = fs::absolute(g.config_path).parent_path().string();
    auto summary = app::run_pipeline(config, base, a.out_dir);
    for (const auto& p : summary.artifacts) note("wrote " + p);
    note("pipeline: held-out precision " + format_double(summary.metrics.precision) + ", recall " +
         format_double(summary.metrics.recall) + ", F1 " + format_double(summary.metrics.f1));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Ransomware risk prediction from threat intelligence and victim data"};
    cli.require_subcommand(1);
    cli.add_option("--seed", g.seed, "Random seed for every stochastic stage");
    cli.add_option("--config", g.config_path, "Pipeline configuration (JSON)");
    cli.add_flag("--quiet,-q", g.quiet, "Suppress progress messages");

    IngestArgs ia;
    auto* ingest_cmd = cli.add_subcommand("ingest", "Parse, filter, enrich and join victim records");
    ingest_cmd->add_option("--victims", ia.victims, "Victim records (jsonl or csv)")->required();
    ingest_cmd->add_option("--format", ia.format, "jsonl or csv");
    ingest_cmd->add_option("--directory", ia.directory, "Company directory (JSON)")->required();
    ingest_cmd->add_option("--cutoff", ia.cutoff, "Drop records discovered before this date");
    ingest_cmd->add_option("--adversaries", ia.adversaries, "STIX store or adversary profile array")->required();
    ingest_cmd->add_option("--out", ia.out, "Attack records (default stdout)");
    ingest_cmd->add_option("--rejects", ia.rejects, "Rejected records report");
    ingest_cmd->add_flag("--allow-empty-description", ia.allow_empty_description);

    ExtractArgs ea;
    auto* extract_cmd = cli.add_subcommand("extract", "Extract adversary profiles from threat reports");
    extract_cmd->add_option("--reports", ea.reports, "Directory of report texts")->required();
    extract_cmd->add_option("--prompts", ea.prompts, "Directory of feature prompt specs")->required();
    extract_cmd->add_option("--client", ea.client, "fixture or http");
    extract_cmd->add_option("--fixtures", ea.fixtures, "Recorded exchanges for the fixture client");
    extract_cmd->add_option("--store", ea.store, "STIX store file (created or extended)");
    extract_cmd->add_option("--rejects", ea.rejects, "Rejected values report");
    extract_cmd->add_option("--part-cap", ea.part_cap, "Maximum reply parts per report");
    extract_cmd->add_option("--record", ea.record, "Write finished exchanges as fixtures here");
    extract_cmd->add_option("--dump-prompts", ea.dump_prompts, "Only write compiled prompts, keyed by hash");

    EwmaArgs wa;
    auto* ewma_cmd = cli.add_subcommand("ewma", "Smoothed monthly activity per group");
    ewma_cmd->add_option("--attacks", wa.attacks, "Attack records")->required();
    ewma_cmd->add_option("--lambda", wa.lambda, "Smoothing factor");
    ewma_cmd->add_option("--out", wa.out, "EWMA table (default stdout)");

    SynthArgs sa;
    auto* synth_cmd = cli.add_subcommand("synthesize", "Build the balanced training dataset");
    synth_cmd->add_option("--attacks", sa.attacks, "Attack records")->required();
    synth_cmd->add_option("--ewma", sa.ewma, "EWMA table used to stamp the records");
    synth_cmd->add_option("--replicas", sa.replicas, "Synthetic victims per real victim");
    synth_cmd->add_option("--weights", sa.weights, "Safe-sample permutation weights (JSON)");
    synth_cmd->add_flag("--no-originals", sa.no_originals, "Leave the real victims out of the dataset");
    synth_cmd->add_option("--out", sa.out, "Dataset CSV (default stdout)");
    synth_cmd->add_option("--noise-out", sa.noise_out, "Noise parameters used");

    TrainArgs ta;
    auto* train_cmd = cli.add_subcommand("train", "Train the random forest");
    train_cmd->add_option("--dataset", ta.dataset, "Dataset CSV")->required();
    train_cmd->add_option("--trees", ta.trees, "Number of trees");
    train_cmd->add_option("--split", ta.split, "Held-out fraction");
    train_cmd->add_option("--threads", ta.threads, "Worker threads (0: all cores)");
    train_cmd->add_option("--model", ta.model, "Model file")->required();
    train_cmd->add_option("--metrics", ta.metrics, "Held-out metrics");

    EvaluateArgs va;
    auto* eval_cmd = cli.add_subcommand("evaluate", "Score a model on a dataset");
    eval_cmd->add_option("--dataset", va.dataset, "Dataset CSV")->required();
    eval_cmd->add_option("--model", va.model, "Model file")->required();
    eval_cmd->add_flag("--all-rows", va.all_rows, "Score every row instead of the held-out split");
    eval_cmd->add_option("--out", va.out, "Metrics (default stdout)");

    PredictArgs pa;
    auto add_scoring = [&](CLI::App* cmd) {
        cmd->add_option("--model", pa.model, "Model file")->required();
        cmd->add_option("--adversaries", pa.adversaries, "STIX store or adversary profile array")->required();
        cmd->add_option("--ewma", pa.ewma, "EWMA table")->required();
        cmd->add_option("--company", pa.company, "Company profile (JSON)")->required();
        cmd->add_option("--as-of", pa.as_of, "Month for the activity lookup (YYYY-MM)");
        cmd->add_option("--out", pa.out, "Output file (default stdout)");
    };
    auto* predict_cmd = cli.add_subcommand("predict", "Risk of one company against named groups");
    add_scoring(predict_cmd);
    predict_cmd->add_option("--group", pa.groups, "Ransomware group")->required();
    auto* report_cmd = cli.add_subcommand("report", "Ranked risk report across groups");
    add_scoring(report_cmd);
    report_cmd->add_option("--groups", pa.groups, "Groups to include (default: all)")->delimiter(',');
    report_cmd->add_option("--format", pa.format, "json or markdown");

    PipelineArgs pl;
    auto* pipeline_cmd = cli.add_subcommand("pipeline", "Run every stage from a config file");
    pipeline_cmd->add_option("--out-dir", pl.out_dir, "Artifact directory (overrides the config)");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (!g.config_path.empty()) g.config = read_json_file(g.config_path);
        if (*ingest_cmd) return run_ingest(ia);
        if (*extract_cmd) return run_extract(ea);
        if (*ewma_cmd) return run_ewma(wa);
        if (*synth_cmd) return run_synthesize(sa);
        if (*train_cmd) return run_train(ta);
        if (*eval_cmd) return run_evaluate(va);
        if (*predict_cmd) return run_predict(pa);
        if (*report_cmd) return run_report(pa);
        if (*pipeline_cmd) return run_pipeline(pl);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
