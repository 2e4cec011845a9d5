#pragma once

// Finitely presented groups: words, free reduction, the text format and the
// builtin presentations used throughout the library.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aga/error.hpp"

namespace aga {

/// One signed generator letter g^{+1} or g^{-1}.
struct Letter {
    std::string generator;
    int exponent = 1;

    bool operator==(const Letter&) const = default;
    auto operator<=>(const Letter&) const = default;
};

inline bool is_valid_generator_name(std::string_view name) {
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) return false;
    return std::all_of(name.begin(), name.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
    });
}

/// Freely reduces a raw letter list. Exponents other than +1/-1 are rejected.
inline std::vector<Letter> free_reduce(const std::vector<Letter>& raw) {
    std::vector<Letter> out;
    out.reserve(raw.size());
    for (const Letter& l : raw) {
        if (l.exponent != 1 && l.exponent != -1)
            throw PreconditionError("letter exponent must be +1 or -1");
        if (!out.empty() && out.back().generator == l.generator &&
            out.back().exponent == -l.exponent) {
            out.pop_back();
        } else {
            out.push_back(l);
        }
    }
    return out;
}

/// A freely reduced word. The empty word is the identity.
class Word {
public:
    Word() = default;

    /// Reduces on construction.
    explicit Word(const std::vector<Letter>& letters) : letters_(free_reduce(letters)) {}

    Word(std::initializer_list<Letter> letters) : Word(std::vector<Letter>(letters)) {}

    const std::vector<Letter>& letters() const noexcept { return letters_; }
    std::size_t size() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }

    auto begin() const noexcept { return letters_.begin(); }
    auto end() const noexcept { return letters_.end(); }

    bool operator==(const Word&) const = default;

    /// Concatenation followed by free reduction.
    friend Word operator*(const Word& lhs, const Word& rhs) {
        std::vector<Letter> joined = lhs.letters_;
        joined.insert(joined.end(), rhs.letters_.begin(), rhs.letters_.end());
        return Word(joined);
    }

private:
    std::vector<Letter> letters_;
};

inline Word invert_word(const Word& w) {
    std::vector<Letter> out;
    out.reserve(w.size());
    for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it)
        out.push_back({it->generator, -it->exponent});
    return Word(out);
}

/// Word for g^k, k may be negative.
inline Word power(const std::string& generator, int k) {
    std::vector<Letter> out(static_cast<std::size_t>(k < 0 ? -k : k), Letter{generator, k < 0 ? -1 : 1});
    return Word(out);
}

/// x y x^-1 y^-1
inline Word commutator_word(const std::string& x, const std::string& y) {
    return Word({{x, 1}, {y, 1}, {x, -1}, {y, -1}});
}

/// Renders letters with run-length exponents, e.g. "a^2 c^-1". Empty word renders as "".
inline std::string to_string(const Word& w) {
    std::ostringstream os;
    const auto& ls = w.letters();
    for (std::size_t i = 0; i < ls.size();) {
        std::size_t j = i;
        while (j < ls.size() && ls[j] == ls[i]) ++j;
        const int run = static_cast<int>(j - i) * ls[i].exponent;
        if (i > 0) os << ' ';
        os << ls[i].generator;
        if (run != 1) os << '^' << run;
        i = j;
    }
    return os.str();
}

class GroupPresentation {
public:
    GroupPresentation() = default;

    /// Validates generator names, uniqueness, letter references and non-empty relators.
    GroupPresentation(std::string name, std::vector<std::string> generators, std::vector<Word> relators)
        : name_(std::move(name)), generators_(std::move(generators)), relators_(std::move(relators)) {
        std::set<std::string> seen;
        for (const auto& g : generators_) {
            if (!is_valid_generator_name(g))
                throw PreconditionError("invalid generator name '" + g + "'");
            if (!seen.insert(g).second)
                throw PreconditionError("duplicate generator '" + g + "'");
        }
        for (std::size_t j = 0; j < relators_.size(); ++j) {
            if (relators_[j].empty())
                throw PreconditionError("relator " + std::to_string(j) + " is the empty word");
            for (const Letter& l : relators_[j])
                if (!seen.count(l.generator))
                    throw PreconditionError("relator " + std::to_string(j) +
                                            " uses undeclared generator '" + l.generator + "'");
        }
    }

    const std::string& name() const noexcept { return name_; }
    const std::vector<std::string>& generators() const noexcept { return generators_; }
    const std::vector<Word>& relators() const noexcept { return relators_; }

    std::optional<std::size_t> index_of(std::string_view generator) const {
        auto it = std::find(generators_.begin(), generators_.end(), generator);
        if (it == generators_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - generators_.begin());
    }

    bool operator==(const GroupPresentation&) const = default;

private:
    std::string name_;
    std::vector<std::string> generators_;
    std::vector<Word> relators_;
};

// ---------------------------------------------------------------------------
// Text format

namespace detail {

struct Token {
    std::string text;
    std::size_t column;  // 1-based
};

inline std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size()) break;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

inline std::vector<Letter> parse_letter(const Token& tok, std::size_t line_no,
                                        const std::set<std::string>& declared) {
    const auto caret = tok.text.find('^');
    const std::string id = tok.text.substr(0, caret);
    if (!is_valid_generator_name(id))
        throw ParseError(line_no, tok.column, "invalid generator identifier '" + id + "'");
    if (!declared.count(id))
        throw ParseError(line_no, tok.column, "undeclared generator '" + id + "'");
    long k = 1;
    if (caret != std::string::npos) {
        const std::string exp = tok.text.substr(caret + 1);
        const std::size_t exp_col = tok.column + caret + 1;
        std::size_t pos = 0;
        bool neg = false;
        if (pos < exp.size() && (exp[pos] == '-' || exp[pos] == '+')) {
            neg = exp[pos] == '-';
            ++pos;
        }
        if (pos >= exp.size())
            throw ParseError(line_no, exp_col, "missing exponent");
        long value = 0;
        for (; pos < exp.size(); ++pos) {
            if (!std::isdigit(static_cast<unsigned char>(exp[pos])))
                throw ParseError(line_no, exp_col + pos, "invalid exponent '" + exp + "'");
            value = value * 10 + (exp[pos] - '0');
            if (value > 1000000)
                throw ParseError(line_no, exp_col, "exponent too large");
        }
        if (value == 0) throw ParseError(line_no, exp_col, "exponent must be nonzero");
        k = neg ? -value : value;
    }
    return std::vector<Letter>(static_cast<std::size_t>(k < 0 ? -k : k),
                               Letter{id, k < 0 ? -1 : 1});
}

}  // namespace detail

/// Parses the line-oriented presentation format:
///   group <name>
///   gens <id> ...
///   rel <letter> ...        (letter = id | id^<signed nonzero int>)
/// Blank lines and lines starting with '#' are skipped.
inline GroupPresentation parse_presentation(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    enum class Stage { group, gens, rels } stage = Stage::group;

    std::string name;
    std::vector<std::string> gens;
    std::set<std::string> declared;
    std::vector<Word> rels;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto toks = detail::tokenize(line);
        if (toks.empty() || toks.front().text.front() == '#') continue;
        const detail::Token& head = toks.front();

        switch (stage) {
        case Stage::group:
            if (head.text != "group")
                throw ParseError(line_no, head.column, "expected 'group'");
            if (toks.size() != 2)
                throw ParseError(line_no, toks.size() < 2 ? line.size() + 1 : toks[2].column,
                                 "expected exactly one group name");
            name = toks[1].text;
            stage = Stage::gens;
            break;
        case Stage::gens:
            if (head.text != "gens")
                throw ParseError(line_no, head.column, "expected 'gens'");
            if (toks.size() < 2)
                throw ParseError(line_no, line.size() + 1, "at least one generator required");
            for (std::size_t i = 1; i < toks.size(); ++i) {
                if (!is_valid_generator_name(toks[i].text))
                    throw ParseError(line_no, toks[i].column,
                                     "invalid generator identifier '" + toks[i].text + "'");
                if (!declared.insert(toks[i].text).second)
                    throw ParseError(line_no, toks[i].column,
                                     "duplicate generator '" + toks[i].text + "'");
                gens.push_back(toks[i].text);
            }
            stage = Stage::rels;
            break;
        case Stage::rels: {
            if (head.text != "rel")
                throw ParseError(line_no, head.column, "expected 'rel'");
            std::vector<Letter> raw;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto ls = detail::parse_letter(toks[i], line_no, declared);
                raw.insert(raw.end(), ls.begin(), ls.end());
            }
            Word w(raw);
            if (w.empty())
                throw ParseError(line_no, head.column, "empty relator after free reduction");
            rels.push_back(std::move(w));
            break;
        }
        }
    }
    if (stage == Stage::group) throw ParseError(line_no + 1, 1, "missing 'group' line");
    if (stage == Stage::gens) throw ParseError(line_no + 1, 1, "missing 'gens' line");
    return GroupPresentation(std::move(name), std::move(gens), std::move(rels));
}

inline std::string serialize(const GroupPresentation& p) {
    std::ostringstream os;
    os << "group " << p.name() << '\n' << "gens";
    for (const auto& g : p.generators()) os << ' ' << g;
    os << '\n';
    for (const auto& r : p.relators()) os << "rel " << to_string(r) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Builtins

enum class BuiltinKey { surface, gamma_no_aga, h_infinite_dihedral, free_abelian, free };

inline std::optional<BuiltinKey> builtin_key_from_string(std::string_view s) {
    if (s == "surface") return BuiltinKey::surface;
    if (s == "gamma_no_aga") return BuiltinKey::gamma_no_aga;
    if (s == "h_infinite_dihedral") return BuiltinKey::h_infinite_dihedral;
    if (s == "free_abelian") return BuiltinKey::free_abelian;
    if (s == "free") return BuiltinKey::free;
    return std::nullopt;
}

/// Builtin presentations. surface(m) and free_abelian(k) / free(k) need a parameter >= 1;
/// gamma_no_aga and h_infinite_dihedral take none.
inline GroupPresentation builtin_presentation(BuiltinKey key, std::optional<int> parameter = std::nullopt) {
    auto need = [&](const char* what) {
        if (!parameter) throw PreconditionError(std::string(what) + " needs a parameter");
        if (*parameter < 1) throw PreconditionError(std::string(what) + " parameter must be >= 1");
        return *parameter;
    };
    auto none = [&](const char* what) {
        if (parameter) throw PreconditionError(std::string(what) + " takes no parameter");
    };

    switch (key) {
    case BuiltinKey::surface: {
        const int m = need("surface");
        std::vector<std::string> gens;
        Word rel;
        for (int i = 1; i <= m; ++i) {
            const std::string a = "a" + std::to_string(i), b = "b" + std::to_string(i);
            gens.push_back(a);
            gens.push_back(b);
            rel = rel * commutator_word(a, b);
        }
        return GroupPresentation("surface" + std::to_string(m), gens, {rel});
    }
    case BuiltinKey::gamma_no_aga:
        none("gamma_no_aga");
        return GroupPresentation("Gamma", {"a", "b", "c"},
                                 {commutator_word("a", "c"), power("b", 2),
                                  Word({{"a", 1}, {"b", 1}, {"a", 1}, {"b", 1}})});
    case BuiltinKey::h_infinite_dihedral:
        none("h_infinite_dihedral");
        return GroupPresentation("H", {"a", "b"},
                                 {power("b", 2), Word({{"a", 1}, {"b", 1}, {"a", 1}, {"b", 1}})});
    case BuiltinKey::free_abelian: {
        const int k = need("free_abelian");
        std::vector<std::string> gens;
        std::vector<Word> rels;
        for (int i = 1; i <= k; ++i) gens.push_back("x" + std::to_string(i));
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) rels.push_back(commutator_word(gens[i], gens[j]));
        return GroupPresentation("Z" + std::to_string(k), gens, rels);
    }
    case BuiltinKey::free: {
        const int k = need("free");
        std::vector<std::string> gens;
        for (int i = 1; i <= k; ++i) gens.push_back("g" + std::to_string(i));
        return GroupPresentation("F" + std::to_string(k), gens, {});
    }
    }
    throw PreconditionError("unknown builtin presentation");
}

/// Parses "key" or "key:param", e.g. "surface:2", "gamma_no_aga".
inline GroupPresentation builtin_presentation(std::string_view spec) {
    const auto colon = spec.find(':');
    const auto key = builtin_key_from_string(spec.substr(0, colon));
    if (!key) throw PreconditionError("unknown builtin presentation '" + std::string(spec) + "'");
    std::optional<int> param;
    if (colon != std::string_view::npos) {
        const std::string digits(spec.substr(colon + 1));
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit) || digits.size() > 6)
            throw PreconditionError("bad builtin parameter '" + digits + "'");
        param = std::stoi(digits);
    }
    return builtin_presentation(*key, param);
}

// ---------------------------------------------------------------------------
// Morphisms

/// Assigns to every target generator a word over the source generators.
class PresentationMorphism {
public:
    PresentationMorphism(GroupPresentation source, GroupPresentation target, std::map<std::string, Word> images)
        : source_(std::move(source)), target_(std::move(target)), images_(std::move(images)) {
        for (const auto& h : target_.generators())
            if (!images_.count(h))
                throw PreconditionError("no image for target generator '" + h + "'");
        for (const auto& [h, w] : images_) {
            if (!target_.index_of(h))
                throw PreconditionError("image given for unknown target generator '" + h + "'");
            for (const Letter& l : w)
                if (!source_.index_of(l.generator))
                    throw PreconditionError("image of '" + h + "' uses unknown source generator '" +
                                            l.generator + "'");
        }
    }

    const GroupPresentation& source() const noexcept { return source_; }
    const GroupPresentation& target() const noexcept { return target_; }
    const std::map<std::string, Word>& images() const noexcept { return images_; }
    const Word& image(const std::string& h) const { return images_.at(h); }

    /// Substitutes images letter by letter into a word over the target generators.
    Word apply(const Word& w) const {
        Word out;
        for (const Letter& l : w) {
            const Word& img = image(l.generator);
            out = out * (l.exponent > 0 ? img : invert_word(img));
        }
        return out;
    }

private:
    GroupPresentation source_;
    GroupPresentation target_;
    std::map<std::string, Word> images_;
};

inline PresentationMorphism identity_morphism(const GroupPresentation& p) {
    std::map<std::string, Word> images;
    for (const auto& g : p.generators()) images[g] = Word({{g, 1}});
    return PresentationMorphism(p, p, images);
}

/// first: A -> B, second: B -> C; result: A -> C (images of C's generators as words over A).
inline PresentationMorphism compose(const PresentationMorphism& first, const PresentationMorphism& second) {
    if (!(second.source() == first.target()))
        throw PreconditionError("compose: intermediate presentations differ");
    std::map<std::string, Word> images;
    for (const auto& [h, w] : second.images()) images[h] = first.apply(w);
    return PresentationMorphism(first.source(), second.target(), images);
}

/// One factor a^{-1} r_j^{sign} a of a relator expressed as a product of conjugated relators.
struct ConjugatedRelator {
    Word conjugator;
    std::size_t relator = 0;
    int sign = 1;
};

/// User-supplied witness that a word lies in the normal closure of the relators.
/// Never searched for; only checked and used for the a-priori bound.
struct RelatorDecomposition {
    std::vector<ConjugatedRelator> factors;

    Word expand(const GroupPresentation& p) const {
        Word out;
        for (const auto& f : factors) {
            if (f.relator >= p.relators().size())
                throw PreconditionError("decomposition references relator out of range");
            const Word& r = p.relators()[f.relator];
            out = out * invert_word(f.conjugator) * (f.sign > 0 ? r : invert_word(r)) * f.conjugator;
        }
        return out;
    }

    bool witnesses(const GroupPresentation& p, const Word& w) const { return expand(p) == w; }

    /// m_q (M + 1) with M the longest conjugator: the defect multiplier of the witnessed word.
    double defect_multiplier() const {
        std::size_t longest = 0;
        for (const auto& f : factors) longest = std::max(longest, f.conjugator.size());
        return static_cast<double>(factors.size()) * static_cast<double>(longest + 1);
    }
};

}  // namespace aga
