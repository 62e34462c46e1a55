// itemaudit command-line driver.
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"

#include "itemaudit/itemaudit.hpp"

namespace ia = itemaudit;

namespace {

struct StageOptions {
    std::string config_path;
    std::map<std::string, std::string> overrides;
    bool quiet = false;
};

// Every config key becomes --key; out_dir also answers to --out-dir.
void add_config_options(CLI::App* app, StageOptions& opts) {
    app->add_option("--config,-c", opts.config_path, "pipeline config file (key = value)");
    for (const auto& k : ia::config_keys()) {
        const std::string name = k.name;
        if (name == "quiet") continue;
        std::string flags = "--" + name;
        if (name == "out_dir") flags += ",--out-dir";
        app->add_option_function<std::string>(
            flags, [&opts, name](const std::string& v) { opts.overrides[name] = v; }, k.help);
    }
    app->add_flag("--quiet,-q", opts.quiet, "suppress progress messages");
}

ia::PipelineConfig resolve(const StageOptions& opts) {
    ia::PipelineConfig cfg = opts.config_path.empty() ? ia::PipelineConfig{} : ia::load_config(opts.config_path);
    for (auto& [k, v] : opts.overrides) cfg.set(k, v);
    if (opts.quiet) cfg.set("quiet", "true");
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audit an exam item bank for demographic-predictive stem language"};
    app.require_subcommand(1);

    std::string spec_path, synth_out, synth_format = "auto";
    std::map<std::string, std::string> synth_overrides;
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with planted structure");
    synth->add_option("--spec", spec_path, "synthetic corpus spec file (key = value)");
    synth->add_option("--out,-o", synth_out, "output corpus path")->required();
    synth->add_option("--format", synth_format, "csv | jsonl | auto (by extension)");
    for (const auto& key : ia::synthetic_keys())
        synth->add_option_function<std::string>("--" + key, [&synth_overrides, key](const std::string& v) {
            synth_overrides[key] = v;
        });

    struct Stage {
        const char* name;
        const char* help;
    };
    const Stage stages[] = {
        {"preprocess", "load and clean the corpus"},
        {"cluster", "vectorize, scan k and cluster"},
        {"predict", "per-cluster gender and age prediction"},
        {"topics", "topic models over correctly predicted items"},
        {"ner", "entity frequencies over correctly predicted items"},
        {"report", "analysis and final report"},
        {"audit", "run every stage end to end"},
    };
    std::map<std::string, std::unique_ptr<StageOptions>> stage_opts;
    std::map<std::string, CLI::App*> stage_apps;
    for (const auto& s : stages) {
        auto opts = std::make_unique<StageOptions>();
        auto* sub = app.add_subcommand(s.name, s.help);
        add_config_options(sub, *opts);
        stage_apps[s.name] = sub;
        stage_opts[s.name] = std::move(opts);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            ia::SyntheticSpec spec =
                spec_path.empty() ? ia::SyntheticSpec{} : ia::parse_synthetic_spec(ia::detail::read_file(spec_path), spec_path);
            for (auto& [k, v] : synth_overrides) ia::set_synthetic_field(spec, k, v);
            const auto corpus = ia::generate_synthetic_corpus(spec);
            auto format = ia::CorpusFormat::RecordPerLine;
            if (synth_format == "auto") {
                const auto ext = ia::detail::to_lower_ascii(std::filesystem::path(synth_out).extension().string());
                if (ext == ".csv") format = ia::CorpusFormat::Delimited;
            } else {
                auto f = ia::parse_corpus_format(synth_format);
                if (!f) throw ia::AuditError("synth: unknown format '" + synth_format + "'");
                format = *f;
            }
            if (auto parent = std::filesystem::path(synth_out).parent_path(); !parent.empty())
                std::filesystem::create_directories(parent);
            ia::save_corpus(corpus, synth_out, format);
            std::cerr << "[itemaudit] synth: " << corpus.size() << " items -> " << synth_out << "\n";
            return 0;
        }
        for (auto& [name, sub] : stage_apps) {
            if (!sub->parsed()) continue;
            const auto cfg = resolve(*stage_opts[name]);
            if (name == "audit") return ia::run_audit(cfg);
            if (name == "preprocess") ia::stage_preprocess(cfg);
            else if (name == "cluster") ia::stage_cluster(cfg);
            else if (name == "predict") ia::stage_predict(cfg);
            else if (name == "topics") ia::stage_topics(cfg);
            else if (name == "ner") ia::stage_ner(cfg);
            else if (name == "report") return ia::stage_report(cfg).flagged_tasks > 0 ? 2 : 0;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "itemaudit: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
