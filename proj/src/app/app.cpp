#include "ransomrisk/app.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/json_io.hpp"
#include "ransomrisk/cti/extract.hpp"
#include "ransomrisk/cti/stix.hpp"
#include "ransomrisk/dataset.hpp"
#include "ransomrisk/forest/model_io.hpp"

namespace ransomrisk::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (j.is_null()) return;
    if (!j.is_object()) throw Error("UnknownOption", where + " must be an object", ErrorKind::usage);
    for (const auto& [k, v] : j.items())
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
            throw Error("UnknownOption", "unknown key '" + k + "' in " + where, ErrorKind::usage);
}

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (j.is_object() && j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw Error("UnknownOption", std::string("bad value for '") + key + "': " + e.what(), ErrorKind::usage);
        }
    }
}

std::string format_confidence(double c) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << c;
    return s.str();
}

}  // namespace

synth::SynthesisConfig synthesis_config_from_json(const json& j, std::uint64_t seed) {
    reject_unknown(j,
                   {"replicas", "seed", "weights", "include_originals", "safe_per_victim", "retry_cap",
                    "numeric_redraw_cap", "imbalance_tolerance"},
                   "synthesize options");
    synth::SynthesisConfig c;
    c.seed = seed;
    take(j, "replicas", c.replicas);
    take(j, "seed", c.seed);
    take(j, "include_originals", c.include_originals);
    take(j, "retry_cap", c.retry_cap);
    take(j, "numeric_redraw_cap", c.numeric_redraw_cap);
    take(j, "imbalance_tolerance", c.imbalance_tolerance);
    if (j.is_object() && j.contains("safe_per_victim")) {
        int n = 0;
        take(j, "safe_per_victim", n);
        c.safe_per_victim = n;
    }
    if (j.is_object() && j.contains("weights")) {
        auto w = synth::FeatureWeights{}.to_json();
        w.update(j.at("weights"));
        c.weights = synth::FeatureWeights::from_json(w);
    }
    c.validate();
    return c;
}

forest::ForestConfig forest_config_from_json(const json& j, std::uint64_t seed) {
    reject_unknown(j,
                   {"n_trees", "seed", "max_features", "min_samples_leaf", "max_depth", "bootstrap", "test_fraction",
                    "threads"},
                   "train options");
    forest::ForestConfig c;
    c.seed = seed;
    take(j, "n_trees", c.n_trees);
    take(j, "seed", c.seed);
    if (j.is_object() && j.contains("max_features") && !j.at("max_features").is_null()) {
        std::size_t m = 0;
        take(j, "max_features", m);
        c.max_features = m;
    }
    take(j, "min_samples_leaf", c.min_samples_leaf);
    take(j, "max_depth", c.max_depth);
    take(j, "bootstrap", c.bootstrap);
    take(j, "test_fraction", c.test_fraction);
    take(j, "threads", c.threads);
    c.validate();
    return c;
}

std::vector<AdversaryProfile> load_adversaries(const std::string& path) {
    auto j = read_json_file(path);
    if (cti::is_stix_bundle(j)) return cti::StixStore::from_json(j).adversaries();
    if (!j.is_array()) throw Error("FormatError", path + ": expected a STIX bundle or an array of profiles");
    std::vector<AdversaryProfile> out;
    for (const auto& a : j) out.push_back(adversary_from_json(a));
    return out;
}

forest::RiskAssessment predict(const forest::Forest& model, const ingest::AdversaryIndex& adversaries,
                               const activity::EwmaTable& ewma, const PredictionRequest& request) {
    const auto* adversary = adversaries.find(request.group);
    if (!adversary) throw Error("UnknownGroup", "no adversary profile for '" + request.group + "'");

    AttackRecord record{request.company, adversary->name(), Date{request.as_of.year, request.as_of.month, 1},
                        std::nullopt, *adversary, false};
    record.stamp_ewma(ewma.contains(adversary->name()) ? ewma.ewma_at(adversary->name(), request.as_of) : 0.0);

    auto row = model.schema.encode(record);
    double p = model.ensemble.predict_proba(row);
    auto level = forest::risk_level(p);

    forest::RiskAssessment out;
    out.group = adversary->name();
    out.confidence = p;
    out.level = level.level;
    out.label = std::string(level.label);

    auto importance = model.feature_importance();
    auto names = model.schema.column_names();
    std::vector<std::size_t> active;
    for (std::size_t c = 0; c < row.size(); ++c)
        if (row[c] != 0.0) active.push_back(c);
    std::stable_sort(active.begin(), active.end(),
                     [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
    for (std::size_t i = 0; i < active.size() && i < kTopFeatures; ++i)
        out.top_features.emplace_back(names[active[i]], importance[active[i]]);
    return out;
}

void order_assessments(std::vector<forest::RiskAssessment>& assessments) {
    std::sort(assessments.begin(), assessments.end(), [](const auto& a, const auto& b) {
        if (a.level != b.level) return a.level > b.level;
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        return a.group < b.group;
    });
}

json report_json(std::vector<forest::RiskAssessment> assessments, const json& provenance) {
    order_assessments(assessments);
    auto rows = json::array();
    for (const auto& a : assessments) {
        auto feats = json::array();
        for (const auto& [name, imp] : a.top_features) feats.push_back({{"feature", name}, {"importance", imp}});
        rows.push_back({{"group", a.group},
                        {"confidence", a.confidence},
                        {"level", a.level},
                        {"label", a.label},
                        {"top_features", feats}});
    }
    return {{"format", "ransomrisk-report"},
            {"schema_version", kReportSchemaVersion},
            {"assessments", rows},
            {"provenance", provenance.is_null() ? json::object() : provenance}};
}

std::string report_markdown(const json& report) {
    std::ostringstream md;
    md << "# Ransomware risk report\n\n";
    const auto& rows = report.at("assessments");
    if (rows.empty()) {
        md << "No assessments.\n";
    } else {
        md << "| Group | Level | Label | Confidence | Top features |\n";
        md << "|---|---|---|---|---|\n";
        for (const auto& r : rows) {
            std::string feats;
            for (const auto& f : r.at("top_features")) {
                if (!feats.empty()) feats += ", ";
                feats += f.at("feature").get<std::string>();
            }
            md << "| " << r.at("group").get<std::string>() << " | " << r.at("level").get<int>() << " | "
               << r.at("label").get<std::string>() << " | " << format_confidence(r.at("confidence").get<double>())
               << " | " << feats << " |\n";
        }
    }
    const auto& prov = report.value("provenance", json::object());
    if (!prov.empty()) {
        md << "\n## Provenance\n\n";
        for (const auto& [k, v] : prov.items()) md << "- " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
    return md.str();
}

std::string config_hash(const json& config) { return sha256_hex(config.dump()); }

// ---------------------------------------------------------------------------

namespace {

template <typename F>
auto in_stage(const std::string& stage, const std::string& path, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), "stage '" + stage + "' (" + path + "): " + e.what(), e.kind());
    }
}

std::string resolve(const std::string& base, const json& section, const char* key, const std::string& stage) {
    if (!section.is_object() || !section.contains(key) || !section.at(key).is_string())
        throw Error("MissingOption", "stage '" + stage + "': config needs '" + key + "'", ErrorKind::usage);
    fs::path p = section.at(key).get<std::string>();
    return (p.is_absolute() ? p : fs::path(base) / p).lexically_normal().string();
}

}  // namespace

PipelineSummary run_pipeline(const json& config, const std::string& base_dir, const std::string& output_dir) {
    reject_unknown(config, {"seed", "output_dir", "extract", "ingest", "ewma", "synthesize", "train", "report"},
                   "pipeline config");
    std::uint64_t seed = 42;
    take(config, "seed", seed);
    std::string out = output_dir;
    if (out.empty()) {
        std::string rel = "out";
        take(config, "output_dir", rel);
        fs::path p = rel;
        out = (p.is_absolute() ? p : fs::path(base_dir) / p).lexically_normal().string();
    }
    fs::create_directories(out);
    auto artifact = [&](const char* name) { return (fs::path(out) / name).string(); };

    PipelineSummary summary;
    auto hashed = config;
    hashed.erase("output_dir");

    // extract: adversary profiles are needed to filter and join victims.
    const auto& ex = config.value("extract", json::object());
    reject_unknown(ex, {"reports", "prompts", "fixtures", "seed", "part_cap"}, "extract options");
    auto reports_dir = resolve(base_dir, ex, "reports", "extract");
    auto store = in_stage("extract", reports_dir, [&] {
        auto registry = cti::StandardRegistry::defaults();
        auto specs = cti::load_prompt_bundle(resolve(base_dir, ex, "prompts", "extract"), registry);
        cti::FixtureClient client(resolve(base_dir, ex, "fixtures", "extract"));
        cti::ExtractionOptions opts;
        take(ex, "seed", opts.seed);
        take(ex, "part_cap", opts.part_cap);
        cti::StixStore s;
        auto outcomes = cti::run_extraction(cti::load_reports(reports_dir), specs, registry, client, s, opts);
        for (const auto& o : outcomes)
            if (!o.error.empty()) throw Error("ExtractionFailed", "report '" + o.report + "': " + o.error);
        write_json_file(artifact("rejects.json"), cti::rejects_to_json(outcomes));
        return s;
    });
    store.save(artifact("store.json"));
    summary.artifacts.push_back(artifact("store.json"));
    ingest::AdversaryIndex index(store.adversaries());

    // ingest
    const auto& in = config.value("ingest", json::object());
    reject_unknown(in, {"victims", "format", "directory", "cutoff", "require_description"}, "ingest options");
    auto victims_path = resolve(base_dir, in, "victims", "ingest");
    auto ingested = in_stage("ingest", victims_path, [&] {
        std::string format = "jsonl", cutoff = "2021-01-01";
        bool require_description = true;
        take(in, "format", format);
        take(in, "cutoff", cutoff);
        take(in, "require_description", require_description);
        auto directory = ingest::Directory::from_json(read_json_file(resolve(base_dir, in, "directory", "ingest")));
        std::ifstream stream(victims_path, std::ios::binary);
        if (!stream) throw Error("FileNotFound", "cannot open " + victims_path);
        return ingest::run_ingest(stream, ingest::parse_format(format), directory, index, parse_date_or_throw(cutoff),
                                  require_description);
    });

    // ewma
    const auto& ew = config.value("ewma", json::object());
    reject_unknown(ew, {"lambda"}, "ewma options");
    activity::EwmaParams params;
    take(ew, "lambda", params.lambda);
    auto table = in_stage("ewma", victims_path, [&] {
        params.validate();
        auto t = activity::EwmaTable::build(ingested.attacks, params);
        activity::stamp_ewma(ingested.attacks, t);
        return t;
    });
    write_json_file(artifact("attacks.json"), to_json(ingested.attacks));
    write_json_file(artifact("ingest_rejects.json"), ingest::to_json(ingested.rejections));
    write_json_file(artifact("ewma.json"), table.to_json());
    summary.artifacts.push_back(artifact("attacks.json"));
    summary.artifacts.push_back(artifact("ewma.json"));

    // synthesize
    auto synth_cfg = synthesis_config_from_json(config.value("synthesize", json()), seed);
    auto synthesized = in_stage("synthesize", artifact("attacks.json"),
                                [&] { return synth::synthesize(ingested.attacks, index, synth_cfg); });
    write_file(artifact("dataset.csv"), dataset::to_csv(synthesized.dataset.records));
    summary.artifacts.push_back(artifact("dataset.csv"));

    // train + evaluate
    auto forest_cfg = forest_config_from_json(config.value("train", json()), seed);
    auto [train_set, test_set] = in_stage("train", artifact("dataset.csv"), [&] {
        return forest::split_train_test(synthesized.dataset.records, forest_cfg.test_fraction, forest_cfg.seed);
    });
    auto model = in_stage("train", artifact("dataset.csv"), [&] { return forest::train(train_set, forest_cfg); });
    auto model_bytes = forest::serialize_model(model);
    write_file(artifact("model.json"), model_bytes);
    summary.artifacts.push_back(artifact("model.json"));

    summary.metrics = in_stage("evaluate", artifact("model.json"), [&] { return forest::evaluate(model, test_set); });
    auto metrics_json = summary.metrics.to_json();
    auto importance = json::array();
    for (const auto& [name, imp] : model.grouped_importance()) importance.push_back({{"feature", name}, {"importance", imp}});
    metrics_json["feature_importance"] = importance;
    metrics_json["train_rows"] = train_set.size();
    metrics_json["test_rows"] = test_set.size();
    write_json_file(artifact("metrics.json"), metrics_json);
    summary.artifacts.push_back(artifact("metrics.json"));

    summary.provenance = {
        {"seed", seed},
        {"synthesis_seed", synth_cfg.seed},
        {"forest_seed", forest_cfg.seed},
        {"config_sha256", config_hash(hashed)},
        {"model_sha256", sha256_hex(model_bytes)},
        {"attacks", ingested.attacks.size()},
        {"adversaries", index.profiles().size()},
        {"dataset_unsafe", synthesized.dataset.unsafe_count},
        {"dataset_safe", synthesized.dataset.safe_count},
        {"train_rows", train_set.size()},
        {"test_rows", test_set.size()},
    };

    // report (optional)
    if (config.contains("report")) {
        const auto& rp = config.at("report");
        reject_unknown(rp, {"company", "as_of", "groups"}, "report options");
        auto company_path = resolve(base_dir, rp, "company", "report");
        auto report = in_stage("report", company_path, [&] {
            auto company = victim_from_json(read_json_file(company_path));
            std::string as_of = "2024-01";
            take(rp, "as_of", as_of);
            auto month = parse_year_month_or_throw(as_of);
            std::vector<std::string> groups;
            take(rp, "groups", groups);
            if (groups.empty())
                for (const auto& a : index.profiles()) groups.push_back(a.name());
            std::vector<forest::RiskAssessment> assessments;
            for (const auto& g : groups) assessments.push_back(predict(model, index, table, {company, g, month}));
            return report_json(std::move(assessments), summary.provenance);
        });
        write_json_file(artifact("report.json"), report);
        write_file(artifact("report.md"), report_markdown(report));
        summary.artifacts.push_back(artifact("report.json"));
        summary.artifacts.push_back(artifact("report.md"));
    }
    return summary;
}

}  // namespace ransomrisk::app
