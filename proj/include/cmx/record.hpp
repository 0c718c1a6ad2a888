#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cmx/error.hpp"
#include "cmx/lang_tag.hpp"

namespace cmx {

enum class TaskKind { classification, tagging, generation };

inline std::string_view task_name(TaskKind k) {
    switch (k) {
        case TaskKind::classification: return "classification";
        case TaskKind::tagging: return "tagging";
        case TaskKind::generation: return "generation";
    }
    return "";
}

inline TaskKind parse_task(std::string_view name) {
    if (name == "classification") return TaskKind::classification;
    if (name == "tagging") return TaskKind::tagging;
    if (name == "generation") return TaskKind::generation;
    throw UsageError("unknown task kind '" + std::string(name) + "'");
}

// One utterance in the standard dataset format. Optional fields that are
// absent are omitted from the JSONL encoding, never written as null.
struct StandardRecord {
    std::string uid;
    std::string text;
    std::optional<std::vector<std::string>> tokens;
    std::optional<std::vector<LangTag>> lid;
    std::optional<std::vector<std::string>> pos;
    std::optional<std::vector<std::string>> ner;
    std::optional<std::string> label;
    std::optional<std::string> target_text;
    std::optional<std::map<std::string, std::string>> views;
    std::optional<std::map<std::string, double>> metrics;
    std::optional<std::map<std::string, nlohmann::json>> meta;

    friend bool operator==(const StandardRecord&, const StandardRecord&) = default;
};

struct Dataset {
    TaskKind task = TaskKind::tagging;
    std::vector<StandardRecord> records;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

}  // namespace cmx
