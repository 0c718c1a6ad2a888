#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cmx/error.hpp"

namespace cmx {

// Token language label. The six closed roles are ordered; the order is the
// tie-break order used wherever an argmax over tags is taken. Open tags
// carry an arbitrary name and sort after every closed role.
class LangTag {
public:
    enum class Role : std::uint8_t { lang1, lang2, ne, univ, other, mixed, open };

    static constexpr std::array<Role, 6> closed_roles{Role::lang1, Role::lang2, Role::ne,
                                                      Role::univ,  Role::other, Role::mixed};

    LangTag() = default;
    LangTag(Role role) : role_(role) {}  // NOLINT: implicit from a closed role

    static LangTag open(std::string name) {
        LangTag t;
        t.role_ = Role::open;
        t.open_name_ = std::move(name);
        return t;
    }

    // Exact canonical closed name ("lang1", "ne", ...), otherwise nullopt.
    static std::optional<LangTag> from_canonical(std::string_view name) {
        for (Role r : closed_roles) {
            if (role_name(r) == name) return LangTag(r);
        }
        return std::nullopt;
    }

    // Canonical name for closed roles; otherwise an open tag.
    static LangTag from_name(std::string_view name) {
        if (auto t = from_canonical(name)) return *t;
        return open(std::string(name));
    }

    static constexpr std::string_view role_name(Role r) {
        switch (r) {
            case Role::lang1: return "lang1";
            case Role::lang2: return "lang2";
            case Role::ne: return "ne";
            case Role::univ: return "univ";
            case Role::other: return "other";
            case Role::mixed: return "mixed";
            case Role::open: break;
        }
        return "";
    }

    Role role() const noexcept { return role_; }
    bool is_open() const noexcept { return role_ == Role::open; }

    std::string name() const {
        return is_open() ? open_name_ : std::string(role_name(role_));
    }

    // lang1 and lang2 are the mixing languages; everything else is
    // language-independent for the metrics.
    bool is_language_token() const noexcept {
        return role_ == Role::lang1 || role_ == Role::lang2;
    }

    friend bool operator==(const LangTag&, const LangTag&) = default;
    friend std::strong_ordering operator<=>(const LangTag& a, const LangTag& b) {
        if (auto c = a.role_ <=> b.role_; c != 0) return c;
        return a.open_name_ <=> b.open_name_;
    }

private:
    Role role_ = Role::univ;
    std::string open_name_;
};

namespace detail {
inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}
}  // namespace detail

// Maps the tag spellings found in external files onto LangTag roles.
// Language codes bound to lang1/lang2 and the common synonym spellings are
// matched case-insensitively.
class Tagset {
public:
    Tagset() = default;
    Tagset(std::optional<std::string> lang1_code, std::optional<std::string> lang2_code,
           bool allow_open = false)
        : allow_open_(allow_open) {
        if (lang1_code) lang1_code_ = detail::ascii_lower(*lang1_code);
        if (lang2_code) lang2_code_ = detail::ascii_lower(*lang2_code);
        if (lang1_code_ && lang2_code_ && *lang1_code_ == *lang2_code_) {
            throw UsageError("lang1 and lang2 codes must differ");
        }
    }

    static Tagset open_tagset() { return Tagset(std::nullopt, std::nullopt, true); }

    bool allows_open() const noexcept { return allow_open_; }
    const std::optional<std::string>& lang1_code() const noexcept { return lang1_code_; }
    const std::optional<std::string>& lang2_code() const noexcept { return lang2_code_; }

    // nullopt when the spelling is unknown and open tags are not allowed.
    std::optional<LangTag> resolve(std::string_view raw) const {
        const std::string key = detail::ascii_lower(raw);
        if (lang1_code_ && key == *lang1_code_) return LangTag(LangTag::Role::lang1);
        if (lang2_code_ && key == *lang2_code_) return LangTag(LangTag::Role::lang2);
        if (key == "lang1") return LangTag(LangTag::Role::lang1);
        if (key == "lang2") return LangTag(LangTag::Role::lang2);
        if (key == "ne" || key == "name") return LangTag(LangTag::Role::ne);
        if (key == "univ" || key == "other-univ" || key == "unk-univ") {
            return LangTag(LangTag::Role::univ);
        }
        if (key == "other") return LangTag(LangTag::Role::other);
        if (key == "mixed") return LangTag(LangTag::Role::mixed);
        if (allow_open_) return LangTag::open(std::string(raw));
        return std::nullopt;
    }

    bool admits(const LangTag& tag) const noexcept { return !tag.is_open() || allow_open_; }

private:
    std::optional<std::string> lang1_code_;
    std::optional<std::string> lang2_code_;
    bool allow_open_ = false;
};

}  // namespace cmx
