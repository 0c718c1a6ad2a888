#pragma once

// Code-mixing metrics: CMI, switch points, I-index, language entropy and
// M-index, per utterance and per corpus.
//
// Language-independent tags (ne, univ, other, mixed, open tags) count toward
// u in CMI and are transparent for switching: they are dropped before
// adjacent language pairs are compared.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cmx/error.hpp"
#include "cmx/lang_tag.hpp"
#include "cmx/lid.hpp"
#include "cmx/parallel.hpp"
#include "cmx/record.hpp"

namespace cmx {

using TagSpan = std::span<const LangTag>;

struct LanguageHistogram {
    std::map<LangTag, std::size_t> counts;  // language tokens only
    std::size_t independent = 0;            // u

    std::size_t language_tokens() const {
        std::size_t n = 0;
        for (const auto& [tag, c] : counts) n += c;
        return n;
    }
};

inline LanguageHistogram language_histogram(TagSpan tags) {
    LanguageHistogram h;
    for (const auto& t : tags) {
        if (t.is_language_token()) {
            ++h.counts[t];
        } else {
            ++h.independent;
        }
    }
    return h;
}

// 100 * (1 - max_i w_i / (n - u)) when n > u, else 0.
inline double cmi(TagSpan tags) {
    const auto h = language_histogram(tags);
    const std::size_t n = tags.size();
    if (n <= h.independent) return 0.0;
    std::size_t max_w = 0;
    for (const auto& [tag, c] : h.counts) max_w = std::max(max_w, c);
    return 100.0 * (1.0 - static_cast<double>(max_w) / static_cast<double>(n - h.independent));
}

inline std::size_t switch_points(TagSpan tags) {
    std::size_t s = 0;
    const LangTag* prev = nullptr;
    for (const auto& t : tags) {
        if (!t.is_language_token()) continue;
        if (prev && *prev != t) ++s;
        prev = &t;
    }
    return s;
}

// Switches per adjacent pair of language tokens.
inline double i_index(TagSpan tags) {
    const std::size_t n_lang = language_histogram(tags).language_tokens();
    if (n_lang < 2) return 0.0;
    return static_cast<double>(switch_points(tags)) / static_cast<double>(n_lang - 1);
}

inline double entropy_bits(const std::map<LangTag, std::size_t>& counts) {
    std::size_t total = 0;
    for (const auto& [tag, c] : counts) total += c;
    if (total == 0 || counts.size() < 2) return 0.0;
    double h = 0.0;
    for (const auto& [tag, c] : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

inline double language_entropy(TagSpan tags) { return entropy_bits(language_histogram(tags).counts); }

// (1 - sum p^2) / ((k - 1) * sum p^2) over k = p.size() languages; 0 for
// k <= 1, all-zero input, or a single language.
inline double m_index(std::span<const double> p) {
    const std::size_t k = p.size();
    if (k <= 1) return 0.0;
    double sum_sq = 0.0;
    for (double x : p) sum_sq += x * x;
    if (sum_sq <= 0.0 || sum_sq >= 1.0) return 0.0;
    const double m = (1.0 - sum_sq) / (static_cast<double>(k - 1) * sum_sq);
    return std::clamp(m, 0.0, 1.0);
}

// Proportions of lang1, lang2 among language tokens (all zero if none).
inline std::vector<double> language_proportions(const std::map<LangTag, std::size_t>& counts) {
    std::size_t total = 0;
    for (const auto& [tag, c] : counts) total += c;
    std::vector<double> p;
    for (LangTag::Role r : {LangTag::Role::lang1, LangTag::Role::lang2}) {
        auto it = counts.find(LangTag(r));
        const std::size_t c = it == counts.end() ? 0 : it->second;
        p.push_back(total ? static_cast<double>(c) / static_cast<double>(total) : 0.0);
    }
    return p;
}

inline double m_index(TagSpan tags) {
    const auto p = language_proportions(language_histogram(tags).counts);
    return m_index(std::span<const double>(p));
}

struct UtteranceMetrics {
    double cmi = 0.0;
    double m_index = 0.0;
    double i_index = 0.0;
    double entropy_bits = 0.0;
    std::size_t switch_points = 0;
    std::size_t n_tokens = 0;
    std::size_t n_lang_tokens = 0;
    std::size_t n_indep_tokens = 0;

    friend bool operator==(const UtteranceMetrics&, const UtteranceMetrics&) = default;
};

inline UtteranceMetrics utterance_metrics(TagSpan tags) {
    UtteranceMetrics m;
    const auto h = language_histogram(tags);
    m.n_tokens = tags.size();
    m.n_lang_tokens = h.language_tokens();
    m.n_indep_tokens = h.independent;
    m.cmi = cmi(tags);
    m.switch_points = switch_points(tags);
    m.i_index = i_index(tags);
    m.entropy_bits = entropy_bits(h.counts);
    const auto p = language_proportions(h.counts);
    m.m_index = m_index(std::span<const double>(p));
    return m;
}

struct CorpusMetrics {
    std::size_t n_records = 0;
    std::size_t n_tokens = 0;
    double mean_cmi_all = 0.0;
    double mean_cmi_mixed = 0.0;
    double fraction_mixed = 0.0;
    double m_index = 0.0;
    double language_entropy_bits = 0.0;
    double avg_switch_points = 0.0;
    double avg_switch_points_mixed = 0.0;
    std::map<LangTag, double> token_share;
};

struct MetricsReport {
    std::vector<std::pair<std::string, UtteranceMetrics>> per_record;  // record order
    CorpusMetrics corpus;
};

// Deterministic sequential reduction over per-record results.
inline CorpusMetrics aggregate(const std::vector<std::pair<std::string, UtteranceMetrics>>& per_record,
                               const std::map<LangTag, std::size_t>& all_tags) {
    CorpusMetrics c;
    c.n_records = per_record.size();
    std::size_t mixed = 0;
    double cmi_sum = 0.0;
    double cmi_mixed_sum = 0.0;
    double sp_sum = 0.0;
    double sp_mixed_sum = 0.0;
    for (const auto& [uid, m] : per_record) {
        cmi_sum += m.cmi;
        sp_sum += static_cast<double>(m.switch_points);
        if (m.cmi > 0.0) {
            ++mixed;
            cmi_mixed_sum += m.cmi;
            sp_mixed_sum += static_cast<double>(m.switch_points);
        }
    }
    if (c.n_records > 0) {
        const auto n = static_cast<double>(c.n_records);
        c.mean_cmi_all = cmi_sum / n;
        c.avg_switch_points = sp_sum / n;
        c.fraction_mixed = static_cast<double>(mixed) / n;
    }
    if (mixed > 0) {
        c.mean_cmi_mixed = cmi_mixed_sum / static_cast<double>(mixed);
        c.avg_switch_points_mixed = sp_mixed_sum / static_cast<double>(mixed);
    }

    std::map<LangTag, std::size_t> lang_counts;
    for (const auto& [tag, n] : all_tags) {
        c.n_tokens += n;
        if (tag.is_language_token()) lang_counts[tag] = n;
    }
    if (c.n_tokens > 0) {
        for (const auto& [tag, n] : all_tags) {
            c.token_share[tag] = static_cast<double>(n) / static_cast<double>(c.n_tokens);
        }
    }
    c.language_entropy_bits = entropy_bits(lang_counts);
    const auto p = language_proportions(lang_counts);
    c.m_index = m_index(std::span<const double>(p));
    return c;
}

// Metrics for every record. Records without lid arrays are tagged with
// `model` (tokenizing raw text when needed); without a model that is a
// usage error.
inline MetricsReport quantify_dataset(const Dataset& d, const LidModel* model = nullptr,
                                      unsigned threads = 1) {
    if (!model) {
        for (const auto& r : d.records) {
            if (!r.lid) {
                throw UsageError("record uid '" + r.uid +
                                 "' has no lid tags and no LID model was supplied");
            }
        }
    }
    std::vector<std::vector<LangTag>> tagged(d.records.size());
    parallel_for(d.records.size(), threads, [&](std::size_t i) {
        const auto& r = d.records[i];
        if (r.lid) {
            tagged[i] = *r.lid;
            return;
        }
        const auto tokens = r.tokens ? *r.tokens : tokenize_whitespace(r.text);
        tagged[i].reserve(tokens.size());
        for (const auto& tok : tokens) tagged[i].push_back(model->tag_token(tok).tag);
    });

    MetricsReport report;
    report.per_record.resize(d.records.size());
    parallel_for(d.records.size(), threads, [&](std::size_t i) {
        report.per_record[i] = {d.records[i].uid, utterance_metrics(tagged[i])};
    });

    std::map<LangTag, std::size_t> all_tags;
    for (const auto& tags : tagged) {
        for (const auto& t : tags) ++all_tags[t];
    }
    report.corpus = aggregate(report.per_record, all_tags);
    return report;
}

// Copies per-record metric values into each record's metrics map.
inline Dataset annotate_metrics(Dataset d, const MetricsReport& report) {
    if (report.per_record.size() != d.records.size()) {
        throw UsageError("metrics report does not match the dataset");
    }
    for (std::size_t i = 0; i < d.records.size(); ++i) {
        auto& r = d.records[i];
        const auto& m = report.per_record[i].second;
        if (!r.metrics) r.metrics.emplace();
        auto& dst = *r.metrics;
        dst["cmi"] = m.cmi;
        dst["m_index"] = m.m_index;
        dst["i_index"] = m.i_index;
        dst["entropy_bits"] = m.entropy_bits;
        dst["switch_points"] = static_cast<double>(m.switch_points);
    }
    return d;
}

inline nlohmann::ordered_json to_json(const UtteranceMetrics& m) {
    return {{"cmi", m.cmi},
            {"m_index", m.m_index},
            {"i_index", m.i_index},
            {"entropy_bits", m.entropy_bits},
            {"switch_points", m.switch_points},
            {"n_tokens", m.n_tokens},
            {"n_lang_tokens", m.n_lang_tokens},
            {"n_indep_tokens", m.n_indep_tokens}};
}

inline nlohmann::ordered_json to_json(const MetricsReport& report) {
    const auto& c = report.corpus;
    nlohmann::ordered_json share = nlohmann::ordered_json::object();
    for (const auto& [tag, v] : c.token_share) share[tag.name()] = v;
    nlohmann::ordered_json corpus = {{"n_records", c.n_records},
                                     {"n_tokens", c.n_tokens},
                                     {"mean_cmi_all", c.mean_cmi_all},
                                     {"mean_cmi_mixed", c.mean_cmi_mixed},
                                     {"fraction_mixed", c.fraction_mixed},
                                     {"m_index", c.m_index},
                                     {"language_entropy_bits", c.language_entropy_bits},
                                     {"avg_switch_points", c.avg_switch_points},
                                     {"avg_switch_points_mixed", c.avg_switch_points_mixed},
                                     {"token_share", share}};
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto& [uid, m] : report.per_record) per[uid] = to_json(m);
    return {{"corpus", corpus}, {"per_record", per}};
}

// Aligned two-column corpus table; per-record rows follow when requested.
// `tag_labels` optionally renames tags for display (e.g. lang1 -> "lang1 (hi)").
inline void render_table(const MetricsReport& report, std::ostream& out, bool per_record = false,
                         const std::map<LangTag, std::string>& tag_labels = {}) {
    const auto& c = report.corpus;
    auto num = [](double v) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(4) << v;
        return s.str();
    };
    std::vector<std::pair<std::string, std::string>> rows = {
        {"records", std::to_string(c.n_records)},
        {"tokens", std::to_string(c.n_tokens)},
        {"mean_cmi_all", num(c.mean_cmi_all)},
        {"mean_cmi_mixed", num(c.mean_cmi_mixed)},
        {"fraction_mixed", num(c.fraction_mixed)},
        {"m_index", num(c.m_index)},
        {"language_entropy_bits", num(c.language_entropy_bits)},
        {"avg_switch_points", num(c.avg_switch_points)},
        {"avg_switch_points_mixed", num(c.avg_switch_points_mixed)},
    };
    for (const auto& [tag, v] : c.token_share) {
        auto it = tag_labels.find(tag);
        rows.emplace_back("token_share[" + (it == tag_labels.end() ? tag.name() : it->second) + "]",
                          num(v));
    }
    std::size_t width = 0;
    for (const auto& [k, v] : rows) width = std::max(width, k.size());
    for (const auto& [k, v] : rows) {
        out << std::left << std::setw(static_cast<int>(width)) << k << "  " << v << '\n';
    }
    if (!per_record) return;

    std::size_t uid_width = 3;
    for (const auto& [uid, m] : report.per_record) uid_width = std::max(uid_width, uid.size());
    out << '\n' << std::left << std::setw(static_cast<int>(uid_width)) << "uid";
    for (const char* h : {"cmi", "m_index", "i_index", "entropy_bits", "switch_points"}) {
        out << "  " << std::right << std::setw(13) << h;
    }
    out << '\n';
    for (const auto& [uid, m] : report.per_record) {
        out << std::left << std::setw(static_cast<int>(uid_width)) << uid << std::right;
        out << "  " << std::setw(13) << num(m.cmi) << "  " << std::setw(13) << num(m.m_index)
            << "  " << std::setw(13) << num(m.i_index) << "  " << std::setw(13)
            << num(m.entropy_bits) << "  " << std::setw(13) << m.switch_points << '\n';
    }
}

}  // namespace cmx
