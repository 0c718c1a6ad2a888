#pragma once

// Metric-based subset selection: predicate filters and stratified quantile
// bins over per-record metric values.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cmx/error.hpp"
#include "cmx/record.hpp"
#include "cmx/rng.hpp"

namespace cmx {

inline bool is_sample_metric(std::string_view name) {
    return name == "cmi" || name == "i_index" || name == "entropy_bits" || name == "switch_points";
}

struct PredicateMode {
    std::optional<double> min;
    std::optional<double> max;
};

struct QuantileMode {
    std::size_t bins = 2;
    std::size_t per_bin = 1;
};

struct SampleSpec {
    std::string metric = "cmi";
    std::variant<PredicateMode, QuantileMode> mode;
    std::uint64_t seed = 0;

    void check() const {
        if (!is_sample_metric(metric)) throw UsageError("unknown sampling metric '" + metric + "'");
        if (const auto* p = std::get_if<PredicateMode>(&mode)) {
            if (p->min && p->max && *p->min > *p->max) throw UsageError("min must not exceed max");
        } else {
            const auto& q = std::get<QuantileMode>(mode);
            if (q.bins < 2) throw UsageError("quantile sampling needs at least 2 bins");
            if (q.per_bin < 1) throw UsageError("per_bin must be >= 1");
        }
    }
};

namespace detail {

inline std::vector<double> metric_column(const Dataset& d, const std::string& metric) {
    std::vector<double> values;
    values.reserve(d.size());
    for (const auto& r : d.records) {
        if (r.metrics) {
            if (auto it = r.metrics->find(metric); it != r.metrics->end()) {
                values.push_back(it->second);
                continue;
            }
        }
        throw UsageError("record uid '" + r.uid + "' has no '" + metric +
                         "' metric; run quantify first");
    }
    return values;
}

}  // namespace detail

// Records with min <= value <= max, input order kept.
inline Dataset sample_by_predicate(const Dataset& d, const SampleSpec& spec) {
    spec.check();
    const auto& pred = std::get<PredicateMode>(spec.mode);
    const auto values = detail::metric_column(d, spec.metric);
    Dataset out;
    out.task = d.task;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (pred.min && values[i] < *pred.min) continue;
        if (pred.max && values[i] > *pred.max) continue;
        out.records.push_back(d.records[i]);
    }
    return out;
}

// Rank by (value, uid); bin b holds ranks [floor(bN/bins), floor((b+1)N/bins)).
// Returns the bin index of every record, in input order.
inline std::vector<std::size_t> quantile_bins(const Dataset& d, const std::vector<double>& values,
                                              std::size_t bins) {
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return d.records[a].uid < d.records[b].uid;
    });
    std::vector<std::size_t> bin_of(n);
    for (std::size_t b = 0; b < bins; ++b) {
        for (std::size_t rank = b * n / bins; rank < (b + 1) * n / bins; ++rank) {
            bin_of[order[rank]] = b;
        }
    }
    return bin_of;
}

// From each bin, per_bin records picked by a shuffle keyed on (seed, bin).
// Output is grouped by bin, original order within a bin; meta.bin records
// the bin index.
inline Dataset sample_quantiles(const Dataset& d, const SampleSpec& spec) {
    spec.check();
    const auto& q = std::get<QuantileMode>(spec.mode);
    const auto values = detail::metric_column(d, spec.metric);
    if (q.bins > d.size()) {
        throw UsageError("cannot split " + std::to_string(d.size()) + " records into " +
                         std::to_string(q.bins) + " bins");
    }
    const auto bin_of = quantile_bins(d, values, q.bins);
    std::vector<std::vector<std::size_t>> members(q.bins);
    for (std::size_t i = 0; i < d.size(); ++i) members[bin_of[i]].push_back(i);

    Dataset out;
    out.task = d.task;
    for (std::size_t b = 0; b < q.bins; ++b) {
        auto& m = members[b];
        auto pick = rng::shuffled_indices(m.size(), rng::mix(spec.seed, b));
        if (pick.size() > q.per_bin) pick.resize(q.per_bin);
        std::sort(pick.begin(), pick.end());
        for (std::size_t k : pick) {
            StandardRecord r = d.records[m[k]];
            if (!r.meta) r.meta.emplace();
            (*r.meta)["bin"] = b;
            out.records.push_back(std::move(r));
        }
    }
    return out;
}

inline Dataset sample(const Dataset& d, const SampleSpec& spec) {
    if (std::holds_alternative<PredicateMode>(spec.mode)) return sample_by_predicate(d, spec);
    return sample_quantiles(d, spec);
}

}  // namespace cmx
