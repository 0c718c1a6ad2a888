#pragma once

// Data augmentation: vowel noising, table-driven transliteration, view
// generation, monolingual merging and dataset collation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "cmx/corpus.hpp"
#include "cmx/error.hpp"
#include "cmx/parallel.hpp"
#include "cmx/record.hpp"
#include "cmx/rng.hpp"
#include "cmx/unicode.hpp"

namespace cmx {

// ---------------------------------------------------------------- noising

enum class NoiseKind { drop_vowels, replace_vowels };

struct NoiseOp {
    NoiseKind kind;
    double probability;
};

struct NoisePolicy {
    std::vector<NoiseOp> ops;
    std::uint64_t seed = 0;

    void check() const {
        if (ops.empty()) throw UsageError("noise policy needs at least one op");
        for (const auto& op : ops) {
            if (!(op.probability >= 0.0 && op.probability <= 1.0)) {
                throw UsageError("noise probability must be within [0, 1]");
            }
        }
    }
};

// "drop_vowels:0.1,replace_vowels:0.05"
inline NoisePolicy parse_noise_policy(std::string_view spec, std::uint64_t seed) {
    NoisePolicy policy;
    policy.seed = seed;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto comma = spec.find(',', start);
        const auto item = spec.substr(start, comma == std::string_view::npos ? comma : comma - start);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) {
            throw UsageError("noise op '" + std::string(item) + "' must look like kind:probability");
        }
        const auto kind = item.substr(0, colon);
        NoiseOp op{};
        if (kind == "drop_vowels") {
            op.kind = NoiseKind::drop_vowels;
        } else if (kind == "replace_vowels") {
            op.kind = NoiseKind::replace_vowels;
        } else {
            throw UsageError("unknown noise op '" + std::string(kind) + "'");
        }
        const std::string prob(item.substr(colon + 1));
        std::size_t used = 0;
        try {
            op.probability = std::stod(prob, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != prob.size()) {
            throw UsageError("bad probability '" + prob + "' in noise op");
        }
        policy.ops.push_back(op);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    policy.check();
    return policy;
}

namespace detail {

inline bool is_latin_vowel(char32_t c) {
    switch (c) {
        case U'a': case U'e': case U'i': case U'o': case U'u':
        case U'A': case U'E': case U'I': case U'O': case U'U':
            return true;
        default:
            return false;
    }
}

// a->e->i->o->u->a, case preserved.
inline char32_t next_vowel(char32_t c) {
    switch (c) {
        case U'a': return U'e';
        case U'e': return U'i';
        case U'i': return U'o';
        case U'o': return U'u';
        case U'u': return U'a';
        case U'A': return U'E';
        case U'E': return U'I';
        case U'I': return U'O';
        case U'O': return U'U';
        case U'U': return U'A';
        default: return c;
    }
}

}  // namespace detail

// The apply/skip draw for op j at character index i is keyed by
// (seed, uid, i, j), so the result is a pure function of its inputs.
inline std::string noise_text(std::string_view text, const NoisePolicy& policy,
                              std::string_view record_uid) {
    const std::uint64_t base = rng::mix(policy.seed, rng::fnv1a64(record_uid));
    std::string out;
    out.reserve(text.size());
    const auto cps = unicode::code_points(text);
    for (std::size_t i = 0; i < cps.size(); ++i) {
        char32_t c = cps[i];
        bool dropped = false;
        const std::uint64_t at = rng::mix(base, i);
        for (std::size_t j = 0; j < policy.ops.size() && detail::is_latin_vowel(c); ++j) {
            const auto& op = policy.ops[j];
            if (!(rng::to_unit(rng::mix(at, j)) < op.probability)) continue;
            if (op.kind == NoiseKind::drop_vowels) {
                dropped = true;
                break;
            }
            c = detail::next_vowel(c);
        }
        if (!dropped) unicode::append_utf8(out, c);
    }
    return out;
}

// ------------------------------------------------------- transliteration

struct TranslitEntry {
    std::string source;
    std::string target;
};

// Ordered source -> target mapping applied greedily, longest source first;
// equal lengths fall back to entry order.
class TransliterationTable {
public:
    TransliterationTable() = default;

    TransliterationTable(std::vector<TranslitEntry> entries, std::string name = {})
        : name_(std::move(name)) {
        std::set<std::string> seen;
        for (auto& e : entries) {
            if (e.source.empty()) throw DataError("transliteration entry with empty source");
            e.source = unicode::nfc(e.source);
            e.target = unicode::nfc(e.target);
            if (!seen.insert(e.source).second) {
                throw DataError("duplicate transliteration source '" + e.source + "'");
            }
        }
        entries_ = std::move(entries);
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            by_first_[unicode::code_points(entries_[i].source).front()].push_back(i);
        }
        for (auto& [cp, idx] : by_first_) {
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                return entries_[a].source.size() > entries_[b].source.size();
            });
        }
    }

    const std::string& name() const noexcept { return name_; }
    const std::vector<TranslitEntry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

    std::string apply(std::string_view raw) const {
        const std::string text = unicode::nfc(raw);
        std::string out;
        out.reserve(text.size());
        const auto* p = reinterpret_cast<const uint8_t*>(text.data());
        const auto n = static_cast<int32_t>(text.size());
        int32_t i = 0;
        while (i < n) {
            const int32_t start = i;
            UChar32 c;
            U8_NEXT(p, i, n, c);
            const TranslitEntry* hit = nullptr;
            if (auto it = by_first_.find(static_cast<char32_t>(c)); it != by_first_.end()) {
                const std::string_view rest(text.data() + start, text.size() - start);
                for (std::size_t idx : it->second) {
                    if (rest.substr(0, entries_[idx].source.size()) == entries_[idx].source) {
                        hit = &entries_[idx];
                        break;
                    }
                }
            }
            if (hit) {
                out += hit->target;
                i = start + static_cast<int32_t>(hit->source.size());
            } else {
                out.append(text, static_cast<std::size_t>(start), static_cast<std::size_t>(i - start));
            }
        }
        return unicode::nfc(out);
    }

private:
    std::string name_;
    std::vector<TranslitEntry> entries_;
    std::unordered_map<char32_t, std::vector<std::size_t>> by_first_;
};

inline std::string transliterate(std::string_view text, const TransliterationTable& table) {
    return table.apply(text);
}

// "source<TAB>target" per line; blank lines and '#' comments are skipped.
inline TransliterationTable load_translit_table(std::istream& in, std::string name = {}) {
    std::vector<TranslitEntry> entries;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 2) {
            throw DataError::at_line(line_no, "expected 'source<TAB>target'");
        }
        if (fields[0].empty()) throw DataError::at_line(line_no, "empty source");
        TranslitEntry e{detail::nfc_at(fields[0], line_no), detail::nfc_at(fields[1], line_no)};
        if (!seen.insert(e.source).second) {
            throw DataError::at_line(line_no, "duplicate source '" + e.source + "'");
        }
        entries.push_back(std::move(e));
    }
    return TransliterationTable(std::move(entries), std::move(name));
}

// ------------------------------------------------------------------ views

struct IdentityView {};
struct TranslitView {
    std::shared_ptr<const TransliterationTable> table;
};
struct NoiseView {
    NoisePolicy policy;
};

struct ViewSpec {
    std::string name;
    std::variant<IdentityView, TranslitView, NoiseView> transform;
};

namespace detail {

inline void check_view_specs(const std::vector<ViewSpec>& specs) {
    std::set<std::string_view> names;
    for (const auto& s : specs) {
        if (s.name.empty()) throw UsageError("view name must not be empty");
        if (!names.insert(s.name).second) throw UsageError("duplicate view name '" + s.name + "'");
        if (const auto* t = std::get_if<TranslitView>(&s.transform); t && !t->table) {
            throw UsageError("transliteration view '" + s.name + "' has no table");
        }
        if (const auto* n = std::get_if<NoiseView>(&s.transform)) n->policy.check();
    }
}

inline void check_view_collisions(const StandardRecord& r, const std::vector<ViewSpec>& specs,
                                  bool overwrite) {
    if (overwrite || !r.views) return;
    for (const auto& s : specs) {
        if (r.views->count(s.name)) {
            throw UsageError("record uid '" + r.uid + "' already has view '" + s.name +
                             "'; pass the overwrite flag to replace it");
        }
    }
}

inline std::string render_view(const StandardRecord& r, const ViewSpec& spec) {
    struct Visitor {
        const StandardRecord& r;
        std::string operator()(const IdentityView&) const { return r.text; }
        std::string operator()(const TranslitView& v) const { return v.table->apply(r.text); }
        std::string operator()(const NoiseView& v) const { return noise_text(r.text, v.policy, r.uid); }
    };
    return std::visit(Visitor{r}, spec.transform);
}

}  // namespace detail

inline StandardRecord make_views(StandardRecord r, const std::vector<ViewSpec>& specs,
                                 bool overwrite = false) {
    detail::check_view_specs(specs);
    detail::check_view_collisions(r, specs, overwrite);
    if (specs.empty()) return r;
    if (!r.views) r.views.emplace();
    for (const auto& s : specs) (*r.views)[s.name] = detail::render_view(r, s);
    return r;
}

inline Dataset make_views(Dataset d, const std::vector<ViewSpec>& specs, bool overwrite = false,
                          unsigned threads = 1) {
    detail::check_view_specs(specs);
    for (const auto& r : d.records) detail::check_view_collisions(r, specs, overwrite);
    parallel_for(d.records.size(), threads, [&](std::size_t i) {
        d.records[i] = make_views(std::move(d.records[i]), specs, overwrite);
    });
    return d;
}

// ---------------------------------------------------- dataset combinators

// Appends floor(ratio * |main|) monolingual records (all of them if fewer),
// drawn without replacement by a seeded shuffle and kept in their original
// relative order. Labels are rewritten through `label_map` and uids get a
// "mono-" prefix.
inline Dataset merge_monolingual(const Dataset& main, const Dataset& mono,
                                 const std::map<std::string, std::string>& label_map, double ratio,
                                 std::uint64_t seed) {
    if (main.task != TaskKind::classification || mono.task != TaskKind::classification) {
        throw UsageError("merge_monolingual needs two classification datasets");
    }
    if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw UsageError("ratio must be a finite value >= 0");
    for (const auto& r : mono.records) {
        if (!r.label || !label_map.count(*r.label)) {
            throw DataError::at_uid(r.uid, "label '" + r.label.value_or("") + "' missing from label map");
        }
    }

    // The 1e-9 guard keeps decimal ratios such as 0.29 * 100 from flooring
    // one below the intended count.
    const double wanted = std::floor(ratio * static_cast<double>(main.size()) + 1e-9);
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(wanted), mono.size());

    auto order = rng::shuffled_indices(mono.size(), rng::mix(seed, rng::fnv1a64("merge-mono")));
    order.resize(take);
    std::sort(order.begin(), order.end());

    Dataset out = main;
    std::set<std::string> uids;
    for (const auto& r : main.records) uids.insert(r.uid);
    for (std::size_t idx : order) {
        StandardRecord r = mono.records[idx];
        r.uid = "mono-" + r.uid;
        r.label = label_map.at(*r.label);
        if (!uids.insert(r.uid).second) throw DataError::at_uid(r.uid, "uid collides after prefixing");
        out.records.push_back(std::move(r));
    }
    return out;
}

// Concatenation with every uid prefixed by its input index ("0-", "1-", ...).
inline Dataset collate_datasets(const std::vector<Dataset>& inputs) {
    Dataset out;
    if (inputs.empty()) return out;
    out.task = inputs.front().task;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].task != out.task) {
            throw UsageError("cannot collate a " + std::string(task_name(inputs[i].task)) +
                             " dataset with a " + std::string(task_name(out.task)) + " dataset");
        }
    }
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const std::string prefix = std::to_string(i) + "-";
        for (auto r : inputs[i].records) {
            r.uid = prefix + r.uid;
            out.records.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace cmx
