// cmx: command-line front end. One subcommand per library operation.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 I/O error.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmx/cmx.hpp"

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cmx::IoError("cannot open '" + path + "' for reading");
    return in;
}

// Writes through a temporary sibling file and renames it into place, so an
// interrupted run leaves either the old file or the complete new one.
void write_atomic(const std::string& path, const std::function<void(std::ostream&)>& body) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw cmx::IoError("cannot open '" + tmp.string() + "' for writing");
        body(out);
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw cmx::IoError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw cmx::IoError("cannot move output into '" + path + "'");
    }
}

cmx::Dataset read_dataset(const std::string& path, cmx::ReadOptions opts = {}) {
    auto in = open_input(path);
    return cmx::read_jsonl(in, opts);
}

void write_dataset(const std::string& path, const cmx::Dataset& d) {
    write_atomic(path, [&](std::ostream& out) { cmx::write_jsonl(d, out); });
}

cmx::ReadOptions raw_ok() {
    cmx::ReadOptions o;
    o.require_task_schema = false;
    return o;
}

std::map<std::string, std::string> parse_label_map(const std::string& spec) {
    std::map<std::string, std::string> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw cmx::UsageError("label map entry '" + item + "' must look like from=to");
        }
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    if (out.empty()) throw cmx::UsageError("label map is empty");
    return out;
}

struct Common {
    bool quiet = false;
};

void add_quiet(CLI::App* cmd, Common& common) {
    cmd->add_flag("-q,--quiet", common.quiet, "Suppress tables and summaries on stdout");
}

void summary(const Common& c, const std::string& line) {
    if (!c.quiet) std::cout << line << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cmx: toolkit for code-mixed text corpora"};
    app.set_version_flag("--version", std::string(CMX_VERSION));
    app.require_subcommand(1);

    Common common;
    const unsigned threads = cmx::threads_from_env();
    std::function<void()> run;

    // convert
    std::string conv_from, conv_to = "jsonl", conv_task, conv_in, conv_out;
    std::optional<std::string> lang1, lang2;
    bool open_tagset = false;
    auto* convert = app.add_subcommand("convert", "Convert a CoNLL/TSV/JSONL dataset to standard JSONL");
    convert->add_option("--from", conv_from, "Input format")
        ->required()
        ->check(CLI::IsMember({"conll", "tsv", "jsonl"}));
    convert->add_option("--to", conv_to, "Output format")->check(CLI::IsMember({"jsonl"}));
    convert->add_option("--task", conv_task, "Task kind")
        ->required()
        ->check(CLI::IsMember({"tagging", "classification", "generation"}));
    convert->add_option("--input", conv_in, "Input file")->required();
    convert->add_option("--output", conv_out, "Output JSONL file")->required();
    convert->add_option("--lang1", lang1, "External tag code mapped to lang1");
    convert->add_option("--lang2", lang2, "External tag code mapped to lang2");
    convert->add_flag("--allow-open-tagset", open_tagset, "Keep unknown tags as open tags");
    add_quiet(convert, common);
    convert->callback([&] {
        run = [&] {
            const auto task = cmx::parse_task(conv_task);
            cmx::Dataset d;
            auto in = open_input(conv_in);
            if (conv_from == "conll") {
                if (task != cmx::TaskKind::tagging) throw cmx::UsageError("CoNLL input is a tagging format");
                d = cmx::parse_conll(in, cmx::Tagset(lang1, lang2, open_tagset));
            } else if (conv_from == "tsv") {
                if (task != cmx::TaskKind::classification) {
                    throw cmx::UsageError("TSV input is a classification format");
                }
                d = cmx::parse_tsv_classification(in);
            } else {
                cmx::ReadOptions o;
                o.task = task;
                d = cmx::read_jsonl(in, o);
            }
            write_dataset(conv_out, d);
            summary(common, "converted " + std::to_string(d.size()) + " records");
        };
    });

    // lid
    auto* lid = app.add_subcommand("lid", "Token-level language identification");
    lid->require_subcommand(1);
    std::string lid_in, lid_out, lid_model;
    cmx::LidConfig lid_cfg;
    bool lid_overwrite = false;
    auto* train = lid->add_subcommand("train", "Train a LID model on a tagged JSONL dataset");
    train->add_option("--input", lid_in, "Training JSONL with tokens and lid")->required();
    train->add_option("--output", lid_out, "Model file to write")->required();
    train->add_option("--ngram-min", lid_cfg.ngram_min, "Smallest character n-gram")->capture_default_str();
    train->add_option("--ngram-max", lid_cfg.ngram_max, "Largest character n-gram")->capture_default_str();
    train->add_option("--alpha", lid_cfg.alpha, "Add-alpha smoothing")->capture_default_str();
    train->add_option("--lexicon-min-count", lid_cfg.lexicon_min_count,
                      "Occurrences needed for a lexicon decision")
        ->capture_default_str();
    train->add_option("--script-purity", lid_cfg.script_rule_purity,
                      "Tag purity a script needs to become a script rule")
        ->capture_default_str();
    add_quiet(train, common);
    train->callback([&] {
        run = [&] {
            const auto d = read_dataset(lid_in, raw_ok());
            const auto model = cmx::lid_train(d, lid_cfg);
            write_atomic(lid_out, [&](std::ostream& out) { cmx::lid_save(model, out); });
            summary(common, "trained on " + std::to_string(model.total_tokens()) + " tokens");
        };
    });
    auto* tag = lid->add_subcommand("tag", "Fill lid arrays using a trained model");
    tag->add_option("--model", lid_model, "Model file")->required();
    tag->add_option("--input", lid_in, "Input JSONL")->required();
    tag->add_option("--output", lid_out, "Output JSONL")->required();
    tag->add_flag("--overwrite", lid_overwrite, "Replace existing lid arrays");
    add_quiet(tag, common);
    tag->callback([&] {
        run = [&] {
            auto min = open_input(lid_model);
            const auto model = cmx::lid_load(min);
            auto d = cmx::lid_tag_dataset(model, read_dataset(lid_in, raw_ok()), lid_overwrite, threads);
            write_dataset(lid_out, d);
            summary(common, "tagged " + std::to_string(d.size()) + " records");
        };
    });

    // quantify
    std::string q_in, q_model, q_out, q_annotate;
    bool q_per_record = false;
    std::optional<std::string> q_lang1, q_lang2;
    auto* quantify = app.add_subcommand("quantify", "Compute code-mixing metrics");
    quantify->add_option("--input", q_in, "Input JSONL")->required();
    quantify->add_option("--model", q_model, "LID model for records without lid");
    quantify->add_flag("--per-record", q_per_record, "Also print one row per record");
    quantify->add_option("--output", q_out, "Write the JSON report here");
    quantify->add_option("--annotate", q_annotate, "Write the dataset with metrics attached here");
    quantify->add_option("--lang1", q_lang1, "Display name for lang1");
    quantify->add_option("--lang2", q_lang2, "Display name for lang2");
    add_quiet(quantify, common);
    quantify->callback([&] {
        run = [&] {
            const auto d = read_dataset(q_in, raw_ok());
            std::optional<cmx::LidModel> model;
            if (!q_model.empty()) {
                auto min = open_input(q_model);
                model = cmx::lid_load(min);
            }
            const auto report = cmx::quantify_dataset(d, model ? &*model : nullptr, threads);
            if (!q_out.empty()) {
                write_atomic(q_out, [&](std::ostream& out) { out << cmx::to_json(report).dump(2) << '\n'; });
            }
            if (!q_annotate.empty()) write_dataset(q_annotate, cmx::annotate_metrics(d, report));
            if (!common.quiet) {
                std::map<cmx::LangTag, std::string> labels;
                if (q_lang1) labels[cmx::LangTag::Role::lang1] = "lang1 (" + *q_lang1 + ")";
                if (q_lang2) labels[cmx::LangTag::Role::lang2] = "lang2 (" + *q_lang2 + ")";
                cmx::render_table(report, std::cout, q_per_record, labels);
            }
        };
    });

    // augment
    std::string a_in, a_out, a_ops, a_view = "noised";
    std::uint64_t seed = 0;
    bool a_overwrite = false;
    auto* augment = app.add_subcommand("augment", "Add a vowel-noised view to every record");
    augment->add_option("--input", a_in, "Input JSONL")->required();
    augment->add_option("--output", a_out, "Output JSONL")->required();
    augment->add_option("--ops", a_ops, "Noise ops, e.g. drop_vowels:0.1,replace_vowels:0.05")->required();
    augment->add_option("--seed", seed, "Random seed")->capture_default_str();
    augment->add_option("--view", a_view, "View name")->capture_default_str();
    augment->add_flag("--overwrite", a_overwrite, "Replace an existing view of the same name");
    add_quiet(augment, common);
    augment->callback([&] {
        run = [&] {
            const auto policy = cmx::parse_noise_policy(a_ops, seed);
            auto d = read_dataset(a_in, raw_ok());
            d = cmx::make_views(std::move(d), {{a_view, cmx::NoiseView{policy}}}, a_overwrite, threads);
            write_dataset(a_out, d);
            summary(common, "augmented " + std::to_string(d.size()) + " records");
        };
    });

    // translit
    std::string t_table, t_in, t_out, t_view = "translit";
    std::optional<std::string> t_text;
    bool t_overwrite = false;
    auto* translit = app.add_subcommand("translit", "Transliterate text with a mapping table");
    translit->add_option("--table", t_table, "Table file (source<TAB>target)")->required();
    auto* t_text_opt = translit->add_option("--text", t_text, "Transliterate this string to stdout");
    auto* t_in_opt = translit->add_option("--input", t_in, "Input JSONL");
    translit->add_option("--output", t_out, "Output JSONL")->needs(t_in_opt);
    translit->add_option("--view", t_view, "View name")->capture_default_str();
    translit->add_flag("--overwrite", t_overwrite, "Replace an existing view of the same name");
    t_text_opt->excludes(t_in_opt);
    add_quiet(translit, common);
    translit->callback([&] {
        run = [&] {
            auto tin = open_input(t_table);
            auto table = std::make_shared<const cmx::TransliterationTable>(
                cmx::load_translit_table(tin, fs::path(t_table).stem().string()));
            if (t_text) {
                std::cout << table->apply(*t_text) << '\n';
                return;
            }
            if (t_in.empty() || t_out.empty()) {
                throw cmx::UsageError("translit needs --text, or --input with --output");
            }
            auto d = read_dataset(t_in, raw_ok());
            d = cmx::make_views(std::move(d), {{t_view, cmx::TranslitView{table}}}, t_overwrite, threads);
            write_dataset(t_out, d);
            summary(common, "transliterated " + std::to_string(d.size()) + " records");
        };
    });

    // sample
    std::string s_in, s_out, s_metric = "cmi";
    std::optional<double> s_min, s_max;
    std::optional<std::size_t> s_bins;
    std::size_t s_per_bin = 1;
    auto* sample = app.add_subcommand("sample", "Select records by metric value");
    sample->add_option("--input", s_in, "Input JSONL with metrics (see quantify --annotate)")->required();
    sample->add_option("--output", s_out, "Output JSONL")->required();
    sample->add_option("--metric", s_metric, "cmi, i_index, entropy_bits or switch_points")
        ->capture_default_str();
    auto* min_opt = sample->add_option("--min", s_min, "Keep records with metric >= min");
    auto* max_opt = sample->add_option("--max", s_max, "Keep records with metric <= max");
    auto* bins_opt = sample->add_option("--bins", s_bins, "Quantile bins (stratified mode)");
    sample->add_option("--per-bin", s_per_bin, "Records drawn per bin")->capture_default_str();
    sample->add_option("--seed", seed, "Random seed")->capture_default_str();
    bins_opt->excludes(min_opt)->excludes(max_opt);
    add_quiet(sample, common);
    sample->callback([&] {
        run = [&] {
            cmx::SampleSpec spec;
            spec.metric = s_metric;
            spec.seed = seed;
            if (s_bins) {
                spec.mode = cmx::QuantileMode{*s_bins, s_per_bin};
            } else {
                spec.mode = cmx::PredicateMode{s_min, s_max};
            }
            spec.check();
            const auto d = cmx::sample(read_dataset(s_in, raw_ok()), spec);
            write_dataset(s_out, d);
            summary(common, "sampled " + std::to_string(d.size()) + " records");
        };
    });

    // merge-mono
    std::string m_in, m_mono, m_map, m_out;
    double m_ratio = 0.0;
    auto* merge = app.add_subcommand("merge-mono", "Append monolingual records to a classification dataset");
    merge->add_option("--input", m_in, "Main classification JSONL")->required();
    merge->add_option("--mono", m_mono, "Monolingual classification JSONL")->required();
    merge->add_option("--label-map", m_map, "Label mapping, e.g. pos=positive,neg=negative")->required();
    merge->add_option("--ratio", m_ratio, "Monolingual records per main record")->required();
    merge->add_option("--seed", seed, "Random seed")->capture_default_str();
    merge->add_option("--output", m_out, "Output JSONL")->required();
    add_quiet(merge, common);
    merge->callback([&] {
        run = [&] {
            cmx::ReadOptions o;
            o.task = cmx::TaskKind::classification;
            const auto out = cmx::merge_monolingual(read_dataset(m_in, o), read_dataset(m_mono, o),
                                                    parse_label_map(m_map), m_ratio, seed);
            write_dataset(m_out, out);
            summary(common, "merged dataset has " + std::to_string(out.size()) + " records");
        };
    });

    // collate
    std::vector<std::string> c_inputs;
    std::string c_out;
    auto* collate = app.add_subcommand("collate", "Concatenate datasets with uid prefixing");
    collate->add_option("--inputs", c_inputs, "Input JSONL files")->required();
    collate->add_option("--output", c_out, "Output JSONL")->required();
    add_quiet(collate, common);
    collate->callback([&] {
        run = [&] {
            std::vector<cmx::Dataset> inputs;
            for (const auto& p : c_inputs) inputs.push_back(read_dataset(p));
            const auto out = cmx::collate_datasets(inputs);
            write_dataset(c_out, out);
            summary(common, "collated " + std::to_string(out.size()) + " records");
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(cmx::ErrorKind::usage);
    }

    try {
        if (run) run();
    } catch (const cmx::Error& e) {
        std::cerr << "cmx: error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        std::cerr << "cmx: error: " << e.what() << '\n';
        return static_cast<int>(cmx::ErrorKind::io);
    } catch (const std::exception& e) {
        std::cerr << "cmx: error: " << e.what() << '\n';
        return static_cast<int>(cmx::ErrorKind::io);
    }
    return 0;
}
