#pragma once

// Standard record format: external-format parsers, validation and the
// canonical JSONL encoding.

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cmx/error.hpp"
#include "cmx/lang_tag.hpp"
#include "cmx/record.hpp"
#include "cmx/unicode.hpp"

namespace cmx {

// Splits on runs of Unicode whitespace. Never yields empty tokens.
inline std::vector<std::string> tokenize_whitespace(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char32_t c : unicode::code_points(text)) {
        if (unicode::is_whitespace(c)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            unicode::append_utf8(current, c);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

struct Violation {
    std::string uid;
    std::string field;
    std::string reason;

    std::string describe() const { return "uid '" + uid + "', field " + field + ": " + reason; }
    friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {

inline void check_tag_array(const StandardRecord& r, std::string_view field, std::size_t size,
                            std::vector<Violation>& out) {
    if (!r.tokens) {
        out.push_back({r.uid, std::string(field), "tag array present without tokens"});
    } else if (size != r.tokens->size()) {
        out.push_back({r.uid, std::string(field),
                       "length " + std::to_string(size) + " != token count " +
                           std::to_string(r.tokens->size())});
    }
}

}  // namespace detail

// Task-independent invariants: uid, text, tag-array alignment, tagset.
inline std::vector<Violation> validate_structure(const StandardRecord& r, const Tagset& tagset) {
    std::vector<Violation> out;
    if (r.uid.empty()) out.push_back({r.uid, "uid", "empty uid"});

    if (!unicode::is_valid_utf8(r.text)) {
        out.push_back({r.uid, "text", "invalid UTF-8"});
    } else if (unicode::nfc(r.text).empty()) {
        out.push_back({r.uid, "text", "empty text"});
    }

    if (r.tokens) {
        for (const auto& t : *r.tokens) {
            if (t.empty()) {
                out.push_back({r.uid, "tokens", "empty token"});
                break;
            }
        }
    }
    if (r.lid) {
        detail::check_tag_array(r, "lid", r.lid->size(), out);
        for (const auto& tag : *r.lid) {
            if (!tagset.admits(tag)) {
                out.push_back({r.uid, "lid", "tag '" + tag.name() + "' outside tagset"});
                break;
            }
        }
    }
    if (r.pos) detail::check_tag_array(r, "pos", r.pos->size(), out);
    if (r.ner) detail::check_tag_array(r, "ner", r.ner->size(), out);

    if (r.metrics) {
        for (const auto& [name, value] : *r.metrics) {
            if (!std::isfinite(value)) {
                out.push_back({r.uid, "metrics", "non-finite value for '" + name + "'"});
            }
        }
    }

    return out;
}

// Fields the task kind requires.
inline std::vector<Violation> validate_task(const StandardRecord& r, TaskKind task) {
    std::vector<Violation> out;
    switch (task) {
        case TaskKind::classification:
            if (!r.label) out.push_back({r.uid, "label", "classification record without label"});
            break;
        case TaskKind::tagging:
            if (!r.tokens) {
                out.push_back({r.uid, "tokens", "tagging record without tokens"});
            } else if (!r.lid && !r.pos && !r.ner) {
                out.push_back({r.uid, "lid", "tagging record without any tag array"});
            }
            break;
        case TaskKind::generation:
            if (!r.target_text) {
                out.push_back({r.uid, "target_text", "generation record without target_text"});
            }
            break;
    }
    return out;
}

// Empty iff the record satisfies the schema for `task` under `tagset`.
inline std::vector<Violation> validate(const StandardRecord& r, TaskKind task,
                                       const Tagset& tagset) {
    auto out = validate_structure(r, tagset);
    auto t = validate_task(r, task);
    out.insert(out.end(), t.begin(), t.end());
    return out;
}

// Record-level violations plus duplicate uids.
inline std::vector<Violation> validate(const Dataset& d, const Tagset& tagset) {
    std::vector<Violation> out;
    std::set<std::string_view> seen;
    for (const auto& r : d.records) {
        auto v = validate(r, d.task, tagset);
        out.insert(out.end(), v.begin(), v.end());
        if (!seen.insert(r.uid).second) out.push_back({r.uid, "uid", "duplicate uid"});
    }
    return out;
}

namespace detail {

inline bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

inline bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t") == std::string_view::npos;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string nfc_at(std::string_view s, std::size_t line) {
    try {
        return unicode::nfc(s);
    } catch (const DataError& e) {
        throw DataError::at_line(line, e.what());
    }
}

// "# uid = X" -> X; nullopt for other comments.
inline std::optional<std::string> uid_comment(std::string_view line) {
    std::string body = trim(line.substr(1));
    if (body.rfind("uid", 0) != 0) return std::nullopt;
    std::string rest = trim(std::string_view(body).substr(3));
    if (rest.empty() || rest.front() != '=') return std::nullopt;
    return trim(std::string_view(rest).substr(1));
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace detail

// Two-column tab-separated token/tag lines, blank line between sentences.
// A line starting with '#' and holding no tab is a comment; "# uid = X"
// names the next sentence. Unnamed sentences get their zero-based index.
inline Dataset parse_conll(std::istream& in, const Tagset& tagset) {
    Dataset d;
    d.task = TaskKind::tagging;
    std::set<std::string> uids;

    std::optional<std::string> pending_uid;
    std::size_t pending_uid_line = 0;
    std::vector<std::string> tokens;
    std::vector<LangTag> tags;
    std::size_t block_start = 0;
    std::size_t sentence_index = 0;

    auto flush = [&] {
        if (tokens.empty()) return;
        StandardRecord r;
        r.uid = pending_uid ? *pending_uid : std::to_string(sentence_index);
        if (!uids.insert(r.uid).second) {
            throw DataError::at_line(pending_uid ? pending_uid_line : block_start,
                                     "duplicate uid '" + r.uid + "'");
        }
        r.text = detail::join(tokens, " ");
        r.tokens = std::move(tokens);
        r.lid = std::move(tags);
        d.records.push_back(std::move(r));
        tokens = {};
        tags = {};
        pending_uid.reset();
        ++sentence_index;
    };

    std::string line;
    std::size_t line_no = 0;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) {
            flush();
            continue;
        }
        if (line.front() == '#' && line.find('\t') == std::string::npos) {
            if (auto uid = detail::uid_comment(line)) {
                if (!tokens.empty()) {
                    throw DataError::at_line(line_no, "uid comment inside a sentence block");
                }
                if (uid->empty()) throw DataError::at_line(line_no, "empty uid");
                pending_uid = detail::nfc_at(*uid, line_no);
                pending_uid_line = line_no;
            }
            continue;
        }
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 2) {
            throw DataError::at_line(line_no, "expected 2 tab-separated fields, found " +
                                                  std::to_string(fields.size()));
        }
        if (fields[0].empty() || fields[1].empty()) {
            throw DataError::at_line(line_no, "empty token or tag");
        }
        auto tag = tagset.resolve(fields[1]);
        if (!tag) {
            throw DataError::at_line(line_no, "tag '" + std::string(fields[1]) + "' outside tagset");
        }
        if (tokens.empty()) block_start = line_no;
        tokens.push_back(detail::nfc_at(fields[0], line_no));
        tags.push_back(*tag);
    }
    flush();
    return d;
}

// Header "uid<TAB>text<TAB>label", then one classification record per row.
inline Dataset parse_tsv_classification(std::istream& in) {
    Dataset d;
    d.task = TaskKind::classification;
    std::string line;
    if (!detail::read_line(in, line) || line != "uid\ttext\tlabel") {
        throw UsageError("TSV input must start with the header 'uid<TAB>text<TAB>label'");
    }
    std::set<std::string> uids;
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 3) {
            throw DataError::at_line(line_no, "expected 3 tab-separated fields, found " +
                                                  std::to_string(fields.size()));
        }
        StandardRecord r;
        r.uid = detail::nfc_at(fields[0], line_no);
        r.text = detail::nfc_at(fields[1], line_no);
        r.label = detail::nfc_at(fields[2], line_no);
        if (auto v = validate(r, d.task, Tagset{}); !v.empty()) {
            throw DataError::at_line(line_no, v.front().describe());
        }
        if (!uids.insert(r.uid).second) {
            throw DataError::at_line(line_no, "duplicate uid '" + r.uid + "'");
        }
        d.records.push_back(std::move(r));
    }
    return d;
}

// Canonical encoding: fields in declaration order, absent fields omitted.
inline nlohmann::ordered_json to_json(const StandardRecord& r) {
    nlohmann::ordered_json j;
    j["uid"] = r.uid;
    j["text"] = r.text;
    if (r.tokens) j["tokens"] = *r.tokens;
    if (r.lid) {
        auto& arr = j["lid"] = nlohmann::ordered_json::array();
        for (const auto& t : *r.lid) arr.push_back(t.name());
    }
    if (r.pos) j["pos"] = *r.pos;
    if (r.ner) j["ner"] = *r.ner;
    if (r.label) j["label"] = *r.label;
    if (r.target_text) j["target_text"] = *r.target_text;
    if (r.views) j["views"] = *r.views;
    if (r.metrics) j["metrics"] = *r.metrics;
    if (r.meta) {
        auto& obj = j["meta"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : *r.meta) obj[k] = nlohmann::ordered_json::parse(v.dump());
    }
    return j;
}

inline std::string to_jsonl_line(const StandardRecord& r) { return to_json(r).dump(); }

inline void write_jsonl(const Dataset& d, std::ostream& out) {
    for (const auto& r : d.records) out << to_jsonl_line(r) << '\n';
}

namespace detail {

[[noreturn]] inline void field_error(const std::string& uid, std::string_view field,
                                     const std::string& reason) {
    throw DataError::at_uid(uid, "field " + std::string(field) + ": " + reason);
}

inline std::string json_string(const nlohmann::json& v, const std::string& uid,
                               std::string_view field) {
    if (!v.is_string()) field_error(uid, field, "expected a string");
    try {
        return unicode::nfc(v.get_ref<const std::string&>());
    } catch (const DataError& e) {
        field_error(uid, field, e.what());
    }
}

inline std::vector<std::string> json_strings(const nlohmann::json& v, const std::string& uid,
                                             std::string_view field) {
    if (!v.is_array()) field_error(uid, field, "expected an array of strings");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(json_string(e, uid, field));
    return out;
}

inline StandardRecord record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DataError("expected a JSON object");
    StandardRecord r;
    auto uid_it = j.find("uid");
    if (uid_it == j.end()) throw DataError("missing field uid");
    if (!uid_it->is_string()) throw DataError("field uid: expected a string");
    r.uid = uid_it->get<std::string>();
    const std::string& uid = r.uid;

    bool has_text = false;
    for (const auto& [key, v] : j.items()) {
        if (key == "uid") continue;
        if (v.is_null()) field_error(uid, key, "null is not allowed; omit the field");
        if (key == "text") {
            r.text = json_string(v, uid, key);
            has_text = true;
        } else if (key == "tokens") {
            r.tokens = json_strings(v, uid, key);
        } else if (key == "lid") {
            std::vector<LangTag> tags;
            for (auto& s : json_strings(v, uid, key)) tags.push_back(LangTag::from_name(s));
            r.lid = std::move(tags);
        } else if (key == "pos") {
            r.pos = json_strings(v, uid, key);
        } else if (key == "ner") {
            r.ner = json_strings(v, uid, key);
        } else if (key == "label") {
            r.label = json_string(v, uid, key);
        } else if (key == "target_text") {
            r.target_text = json_string(v, uid, key);
        } else if (key == "views") {
            if (!v.is_object()) field_error(uid, key, "expected an object");
            std::map<std::string, std::string> views;
            for (const auto& [name, text] : v.items()) views[name] = json_string(text, uid, key);
            r.views = std::move(views);
        } else if (key == "metrics") {
            if (!v.is_object()) field_error(uid, key, "expected an object");
            std::map<std::string, double> metrics;
            for (const auto& [name, value] : v.items()) {
                if (!value.is_number()) field_error(uid, key, "metric '" + name + "' is not a number");
                metrics[name] = value.get<double>();
            }
            r.metrics = std::move(metrics);
        } else if (key == "meta") {
            if (!v.is_object()) field_error(uid, key, "expected an object");
            std::map<std::string, nlohmann::json> meta;
            for (const auto& [name, value] : v.items()) meta[name] = value;
            r.meta = std::move(meta);
        } else {
            field_error(uid, key, "unknown field");
        }
    }
    if (!has_text) field_error(uid, "text", "missing");
    return r;
}

inline std::optional<TaskKind> infer_task(const std::vector<StandardRecord>& records) {
    if (records.empty()) return TaskKind::tagging;
    auto all = [&](auto pred) { return std::all_of(records.begin(), records.end(), pred); };
    if (all([](const StandardRecord& r) { return r.label.has_value(); })) {
        return TaskKind::classification;
    }
    if (all([](const StandardRecord& r) { return r.target_text.has_value(); })) {
        return TaskKind::generation;
    }
    if (all([](const StandardRecord& r) {
            return r.tokens.has_value() && (r.lid || r.pos || r.ner);
        })) {
        return TaskKind::tagging;
    }
    return std::nullopt;
}

}  // namespace detail

struct ReadOptions {
    // Task kind to validate against; inferred from the records when unset.
    std::optional<TaskKind> task;
    // When false, records only need to satisfy the task-independent schema
    // (raw text corpora headed for tokenization and tagging).
    bool require_task_schema = true;
};

inline Dataset read_jsonl(std::istream& in, const ReadOptions& opts = {}) {
    Dataset d;
    std::vector<std::size_t> lines;
    std::string line;
    std::size_t line_no = 0;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError::at_line(line_no, std::string("malformed JSON: ") + e.what());
        }
        try {
            d.records.push_back(detail::record_from_json(j));
        } catch (const DataError& e) {
            throw DataError::at_line(line_no, e.what());
        }
        lines.push_back(line_no);
    }

    std::optional<TaskKind> task = opts.task ? opts.task : detail::infer_task(d.records);
    if (!task) {
        if (opts.require_task_schema) {
            throw DataError(
                "cannot infer task kind: records carry neither labels, target texts nor tag "
                "arrays uniformly");
        }
        task = TaskKind::tagging;
    }
    d.task = *task;

    const Tagset any = Tagset::open_tagset();
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < d.records.size(); ++i) {
        const auto& r = d.records[i];
        auto violations = opts.require_task_schema ? validate(r, d.task, any)
                                                   : validate_structure(r, any);
        if (!violations.empty()) {
            throw DataError::at_line(lines[i], "schema violation: " + violations.front().describe());
        }
        if (!seen.insert(r.uid).second) {
            throw DataError::at_line(lines[i], "duplicate uid '" + r.uid + "'");
        }
    }
    return d;
}

}  // namespace cmx
