#pragma once

// Token-level language identification: a script rule / lexicon / character
// n-gram Naive Bayes cascade.

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cmx/corpus.hpp"
#include "cmx/error.hpp"
#include "cmx/lang_tag.hpp"
#include "cmx/parallel.hpp"
#include "cmx/record.hpp"
#include "cmx/unicode.hpp"

namespace cmx {

struct LidConfig {
    int ngram_min = 1;
    int ngram_max = 3;
    double alpha = 1.0;             // add-alpha smoothing
    int lexicon_min_count = 2;      // lexicon lookups need at least this many occurrences
    double script_rule_purity = 0.99;  // share of a script's tokens that must carry one tag

    void check() const {
        if (ngram_min < 1 || ngram_max < ngram_min) {
            throw UsageError("n-gram range must satisfy 1 <= ngram_min <= ngram_max");
        }
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw UsageError("alpha must be > 0");
        if (lexicon_min_count < 1) throw UsageError("lexicon_min_count must be >= 1");
        if (!(script_rule_purity > 0.0 && script_rule_purity <= 1.0)) {
            throw UsageError("script_rule_purity must be in (0, 1]");
        }
    }

    friend bool operator==(const LidConfig&, const LidConfig&) = default;
};

enum class PredictionSource { script_rule, lexicon, ngram };

inline std::string_view source_name(PredictionSource s) {
    switch (s) {
        case PredictionSource::script_rule: return "script_rule";
        case PredictionSource::lexicon: return "lexicon";
        case PredictionSource::ngram: return "ngram";
    }
    return "";
}

struct TagPrediction {
    LangTag tag;
    double log_score = 0.0;
    PredictionSource source = PredictionSource::ngram;
};

// Padded character n-grams ("^" + token + "$") for n in [lo, hi], in
// left-to-right order, shorter n first.
inline std::vector<std::string> char_ngrams(std::string_view folded, int lo, int hi) {
    std::vector<char32_t> cps{U'^'};
    for (char32_t c : unicode::code_points(folded)) cps.push_back(c);
    cps.push_back(U'$');
    std::vector<std::string> out;
    for (int n = lo; n <= hi; ++n) {
        const auto len = static_cast<std::size_t>(n);
        if (cps.size() < len) break;
        for (std::size_t i = 0; i + len <= cps.size(); ++i) {
            std::string g;
            for (std::size_t k = i; k < i + len; ++k) unicode::append_utf8(g, cps[k]);
            out.push_back(std::move(g));
        }
    }
    return out;
}

// Lexicon / n-gram key for a token.
inline std::string lid_key(std::string_view token) { return unicode::case_fold(token); }

// Script holding >= 90% of the token's letters, or "" when none does.
inline std::string dominant_script(std::string_view token, double* share = nullptr) {
    std::map<std::string, std::size_t> counts;
    std::size_t letters = 0;
    for (char32_t c : unicode::code_points(token)) {
        if (!unicode::is_script_letter(c)) continue;
        ++letters;
        ++counts[unicode::script_name(c)];
    }
    if (letters == 0) return {};
    for (const auto& [script, n] : counts) {
        const double s = static_cast<double>(n) / static_cast<double>(letters);
        if (s >= 0.9) {
            if (share) *share = s;
            return script;
        }
    }
    return {};
}

class LidModel {
public:
    using Counts = std::map<LangTag, std::uint64_t>;

    LidConfig config;
    std::map<std::string, Counts> lexicon;
    std::map<LangTag, std::map<std::string, std::uint64_t>> ngram_stats;
    Counts tag_priors;
    std::map<std::string, LangTag> script_rules;

    // Must be called after mutating the public tables directly.
    void rebuild_index() {
        tags_.clear();
        for (const auto& [tag, n] : tag_priors) {
            if (n > 0) tags_.push_back(tag);
        }
        total_tokens_ = 0;
        for (const auto& [tag, n] : tag_priors) total_tokens_ += n;
        gram_counts_.clear();
        gram_totals_.assign(tags_.size(), 0);
        for (std::size_t t = 0; t < tags_.size(); ++t) {
            auto it = ngram_stats.find(tags_[t]);
            if (it == ngram_stats.end()) continue;
            for (const auto& [gram, n] : it->second) {
                auto& row = gram_counts_[gram];
                row.resize(tags_.size(), 0);
                row[t] = n;
                gram_totals_[t] += n;
            }
        }
        // Grams seen only under zero-prior tags still belong to the vocabulary.
        for (const auto& [tag, grams] : ngram_stats) {
            for (const auto& [gram, n] : grams) {
                if (n > 0) gram_counts_.try_emplace(gram, std::vector<std::uint64_t>(tags_.size(), 0));
            }
        }
    }

    std::uint64_t total_tokens() const noexcept { return total_tokens_; }
    std::size_t vocabulary_size() const noexcept { return gram_counts_.size(); }

    // Naive Bayes log score of `tag` for a token: log prior plus the smoothed
    // log likelihood of each in-vocabulary n-gram. Grams outside the union
    // vocabulary carry no evidence and are skipped.
    std::vector<double> ngram_log_scores(std::string_view token) const {
        std::vector<double> scores(tags_.size(), 0.0);
        if (tags_.empty()) return scores;
        const double vocab = static_cast<double>(gram_counts_.size());
        for (std::size_t t = 0; t < tags_.size(); ++t) {
            scores[t] = std::log(static_cast<double>(tag_priors.at(tags_[t])) /
                                 static_cast<double>(total_tokens_));
        }
        for (const auto& gram : char_ngrams(lid_key(token), config.ngram_min, config.ngram_max)) {
            auto it = gram_counts_.find(gram);
            if (it == gram_counts_.end()) continue;
            for (std::size_t t = 0; t < tags_.size(); ++t) {
                scores[t] += std::log((static_cast<double>(it->second[t]) + config.alpha) /
                                      (static_cast<double>(gram_totals_[t]) + config.alpha * vocab));
            }
        }
        return scores;
    }

    const std::vector<LangTag>& scored_tags() const noexcept { return tags_; }

    TagPrediction tag_token(std::string_view token) const {
        if (token.empty()) return {LangTag(LangTag::Role::univ), 0.0, PredictionSource::ngram};

        double share = 0.0;
        if (auto script = dominant_script(token, &share); !script.empty()) {
            if (auto it = script_rules.find(script); it != script_rules.end()) {
                return {it->second, std::log(share), PredictionSource::script_rule};
            }
        }

        if (auto it = lexicon.find(lid_key(token)); it != lexicon.end()) {
            std::uint64_t total = 0;
            const LangTag* best = nullptr;
            std::uint64_t best_n = 0;
            for (const auto& [tag, n] : it->second) {
                total += n;
                if (n > best_n) {
                    best_n = n;
                    best = &tag;
                }
            }
            if (best && total >= static_cast<std::uint64_t>(config.lexicon_min_count)) {
                return {*best,
                        std::log(static_cast<double>(best_n) / static_cast<double>(total)),
                        PredictionSource::lexicon};
            }
        }

        if (tags_.empty()) throw UsageError("LID model is untrained");
        const auto scores = ngram_log_scores(token);
        std::size_t best = 0;
        for (std::size_t t = 1; t < scores.size(); ++t) {
            if (scores[t] > scores[best]) best = t;
        }
        return {tags_[best], scores[best], PredictionSource::ngram};
    }

    friend bool operator==(const LidModel& a, const LidModel& b) {
        return a.config == b.config && a.lexicon == b.lexicon && a.ngram_stats == b.ngram_stats &&
               a.tag_priors == b.tag_priors && a.script_rules == b.script_rules;
    }

private:
    std::vector<LangTag> tags_;
    std::uint64_t total_tokens_ = 0;
    std::unordered_map<std::string, std::vector<std::uint64_t>> gram_counts_;
    std::vector<std::uint64_t> gram_totals_;
};

// Counts are taken over case-folded tokens. Language-independent tokens
// feed the lexicon, priors and n-gram tables but never the script rules.
inline LidModel lid_train(const Dataset& d, const LidConfig& config = {}) {
    config.check();
    LidModel m;
    m.config = config;
    std::map<std::string, std::map<LangTag, std::uint64_t>> script_counts;

    std::uint64_t tokens_seen = 0;
    const Tagset any = Tagset::open_tagset();
    for (const auto& r : d.records) {
        if (!r.tokens || !r.lid) throw DataError::at_uid(r.uid, "training record lacks tokens or lid");
        if (auto v = validate_structure(r, any); !v.empty()) {
            throw DataError::at_uid(r.uid, v.front().field + ": " + v.front().reason);
        }
        for (std::size_t i = 0; i < r.tokens->size(); ++i) {
            const std::string& token = (*r.tokens)[i];
            const LangTag& tag = (*r.lid)[i];
            const std::string key = lid_key(token);
            ++m.lexicon[key][tag];
            ++m.tag_priors[tag];
            auto& grams = m.ngram_stats[tag];
            for (auto& g : char_ngrams(key, config.ngram_min, config.ngram_max)) ++grams[g];
            if (tag.is_language_token()) {
                if (auto script = dominant_script(token); !script.empty()) {
                    ++script_counts[script][tag];
                }
            }
            ++tokens_seen;
        }
    }
    if (tokens_seen == 0) throw UsageError("cannot train a LID model on an empty corpus");

    for (const auto& [script, by_tag] : script_counts) {
        std::uint64_t total = 0;
        for (const auto& [tag, n] : by_tag) total += n;
        for (const auto& [tag, n] : by_tag) {
            if (static_cast<double>(n) >= config.script_rule_purity * static_cast<double>(total)) {
                m.script_rules.emplace(script, tag);
                break;
            }
        }
    }
    m.rebuild_index();
    return m;
}

inline TagPrediction lid_tag_token(const LidModel& m, std::string_view token) {
    return m.tag_token(token);
}

// Fills lid arrays, tokenizing records that have no tokens. Existing lid
// arrays are replaced only when `overwrite` is set.
inline Dataset lid_tag_dataset(const LidModel& m, Dataset d, bool overwrite = false,
                               unsigned threads = 1) {
    if (!overwrite) {
        for (const auto& r : d.records) {
            if (r.lid) {
                throw UsageError("record uid '" + r.uid +
                                 "' already has lid tags; pass the overwrite flag to replace them");
            }
        }
    }
    parallel_for(d.records.size(), threads, [&](std::size_t i) {
        auto& r = d.records[i];
        if (!r.tokens) r.tokens = tokenize_whitespace(r.text);
        std::vector<LangTag> tags;
        tags.reserve(r.tokens->size());
        for (const auto& tok : *r.tokens) tags.push_back(m.tag_token(tok).tag);
        r.lid = std::move(tags);
    });
    return d;
}

inline constexpr int lid_model_version = 1;

inline nlohmann::json lid_to_json(const LidModel& m) {
    nlohmann::json j;  // std::map-backed: keys come out sorted
    j["version"] = lid_model_version;
    j["config"] = {{"ngram_min", m.config.ngram_min},
                   {"ngram_max", m.config.ngram_max},
                   {"alpha", m.config.alpha},
                   {"lexicon_min_count", m.config.lexicon_min_count},
                   {"script_rule_purity", m.config.script_rule_purity}};
    auto& lex = j["lexicon"] = nlohmann::json::object();
    for (const auto& [tok, counts] : m.lexicon) {
        auto& e = lex[tok] = nlohmann::json::object();
        for (const auto& [tag, n] : counts) e[tag.name()] = n;
    }
    auto& grams = j["ngram_stats"] = nlohmann::json::object();
    for (const auto& [tag, table] : m.ngram_stats) {
        auto& e = grams[tag.name()] = nlohmann::json::object();
        for (const auto& [g, n] : table) e[g] = n;
    }
    auto& priors = j["tag_priors"] = nlohmann::json::object();
    for (const auto& [tag, n] : m.tag_priors) priors[tag.name()] = n;
    auto& rules = j["script_rules"] = nlohmann::json::object();
    for (const auto& [script, tag] : m.script_rules) rules[script] = tag.name();
    return j;
}

inline void lid_save(const LidModel& m, std::ostream& out) { out << lid_to_json(m).dump() << '\n'; }

namespace detail {

inline std::uint64_t model_count(const nlohmann::json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw DataError("LID model: " + where + " must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

inline const nlohmann::json& model_object(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_object()) {
        throw DataError(std::string("LID model: missing object '") + key + "'");
    }
    return *it;
}

}  // namespace detail

inline LidModel lid_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DataError("LID model: expected a JSON object");
    auto ver = j.find("version");
    if (ver == j.end() || !ver->is_number_integer() || ver->get<int>() != lid_model_version) {
        throw DataError("LID model: unsupported or missing version (expected " +
                        std::to_string(lid_model_version) + ")");
    }
    LidModel m;
    try {
        const auto& cfg = detail::model_object(j, "config");
        m.config.ngram_min = cfg.at("ngram_min").get<int>();
        m.config.ngram_max = cfg.at("ngram_max").get<int>();
        m.config.alpha = cfg.at("alpha").get<double>();
        m.config.lexicon_min_count = cfg.at("lexicon_min_count").get<int>();
        m.config.script_rule_purity = cfg.at("script_rule_purity").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("LID model: bad config: ") + e.what());
    }
    try {
        m.config.check();
    } catch (const UsageError& e) {
        throw DataError(std::string("LID model: ") + e.what());
    }

    for (const auto& [tok, counts] : detail::model_object(j, "lexicon").items()) {
        if (!counts.is_object()) throw DataError("LID model: lexicon entry '" + tok + "' is not an object");
        std::uint64_t total = 0;
        auto& entry = m.lexicon[tok];
        for (const auto& [tag, n] : counts.items()) {
            const auto c = detail::model_count(n, "lexicon count");
            entry[LangTag::from_name(tag)] = c;
            total += c;
        }
        if (total < 1) throw DataError("LID model: lexicon entry '" + tok + "' has zero count");
    }
    for (const auto& [tag, table] : detail::model_object(j, "ngram_stats").items()) {
        if (!table.is_object()) throw DataError("LID model: ngram_stats entry is not an object");
        auto& dst = m.ngram_stats[LangTag::from_name(tag)];
        for (const auto& [g, n] : table.items()) dst[g] = detail::model_count(n, "n-gram count");
    }
    for (const auto& [tag, n] : detail::model_object(j, "tag_priors").items()) {
        m.tag_priors[LangTag::from_name(tag)] = detail::model_count(n, "tag prior");
    }
    for (const auto& [script, tag] : detail::model_object(j, "script_rules").items()) {
        if (!tag.is_string()) throw DataError("LID model: script rule target must be a string");
        m.script_rules.emplace(script, LangTag::from_name(tag.get<std::string>()));
    }
    m.rebuild_index();
    if (m.total_tokens() == 0) throw DataError("LID model: tag_priors are empty");
    return m;
}

inline LidModel lid_load(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("LID model: malformed document: ") + e.what());
    }
    return lid_from_json(j);
}

}  // namespace cmx
