// SPDX-License-Identifier: Apache-2.0
#include "core/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <unordered_set>

#include "core/error.hpp"

namespace mlcspace {

Symbol Symbol::nonterminal(std::string name)
{
    Symbol s;
    s.kind = SymbolKind::NonTerminal;
    s.text = std::move(name);
    return s;
}

Symbol Symbol::terminal(std::string token)
{
    Symbol s;
    s.kind = SymbolKind::Terminal;
    s.text = std::move(token);
    return s;
}

bool Symbol::operator==(Symbol const& o) const
{
    return kind == o.kind && text == o.text && alternatives == o.alternatives && lo == o.lo && hi == o.hi
        && lo_open == o.lo_open && hi_open == o.hi_open && scaled == o.scaled && scale == o.scale;
}

std::string_view to_string(TierLabel t)
{
    switch (t) {
    case TierLabel::Small: return "Small";
    case TierLabel::Medium: return "Medium";
    case TierLabel::Large: return "Large";
    case TierLabel::Custom: return "Custom";
    }
    return "Custom";
}

Grammar::Grammar(std::vector<Production> productions, TierLabel tier)
    : productions_(std::move(productions))
    , tier_(tier)
{
    for (std::size_t i = 0; i < productions_.size(); ++i) {
        if (!index_.emplace(productions_[i].name, i).second) { throw DuplicateProduction(productions_[i].name); }
    }
    if (!productions_.empty()) { start_ = productions_.front().name; }
}

Production const* Grammar::find(std::string_view name) const
{
    auto i = index_of(name);
    return i == npos ? nullptr : &productions_[i];
}

std::size_t Grammar::index_of(std::string_view name) const
{
    auto it = index_.find(std::string(name));
    return it == index_.end() ? npos : it->second;
}

namespace {

enum class Tok : std::uint8_t { NonTerminal, Terminal, Range, Bar, LBracket, RBracket, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
    Symbol range; // Tok::Range only
};

bool is_meta(char c)
{
    return c == '<' || c == '>' || c == '|' || c == '[' || c == ']' || c == '(' || c == ')' || c == '#';
}

bool is_space(char c)
{
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string rtrim(std::string_view s)
{
    auto e = s.size();
    while (e > 0 && is_space(s[e - 1])) { --e; }
    return std::string(s.substr(0, e));
}

std::string_view trim(std::string_view s, std::size_t& offset)
{
    std::size_t b = 0;
    while (b < s.size() && is_space(s[b])) { ++b; }
    auto e = s.size();
    while (e > b && is_space(s[e - 1])) { --e; }
    offset += b;
    return s.substr(b, e - b);
}

BoundExpr parse_bound(std::string_view text, int line, int column)
{
    try {
        return BoundExpr::parse(text);
    } catch (SyntaxError const& e) {
        throw SyntaxError(line, column + e.column() - 1, e.expected());
    }
}

// Lexes one line segment (comment already removed). col0 is the 1-based column of seg[0].
void lex_segment(std::string_view seg, int line, int col0, std::vector<Token>& out)
{
    std::size_t i = 0;
    auto col = [&](std::size_t p) { return col0 + static_cast<int>(p); };
    while (i < seg.size()) {
        char const c = seg[i];
        if (is_space(c)) { ++i; continue; }
        switch (c) {
        case '|': out.push_back({Tok::Bar, "|", line, col(i), {}}); ++i; continue;
        case '[': out.push_back({Tok::LBracket, "[", line, col(i), {}}); ++i; continue;
        case ']': out.push_back({Tok::RBracket, "]", line, col(i), {}}); ++i; continue;
        case '(': out.push_back({Tok::LParen, "(", line, col(i), {}}); ++i; continue;
        case ')': out.push_back({Tok::RParen, ")", line, col(i), {}}); ++i; continue;
        case '>': throw SyntaxError(line, col(i), "symbol");
        case '<': {
            auto j = i + 1;
            while (j < seg.size() && seg[j] != '>' && seg[j] != '<' && !is_space(seg[j])) { ++j; }
            if (j >= seg.size() || seg[j] != '>' || j == i + 1) { throw SyntaxError(line, col(j), "nonterminal name closed by '>'"); }
            out.push_back({Tok::NonTerminal, std::string(seg.substr(i + 1, j - i - 1)), line, col(i), {}});
            i = j + 1;
            continue;
        }
        default: break;
        }
        bool const is_int = seg.substr(i, 11) == "RANDOM-INT(";
        bool const is_real = seg.substr(i, 12) == "RANDOM-REAL(";
        if (is_int || is_real) {
            auto const open = i + (is_int ? 10 : 11);
            int depth = 0;
            std::size_t close = std::string_view::npos;
            std::size_t comma = std::string_view::npos;
            for (auto j = open; j < seg.size(); ++j) {
                if (seg[j] == '(') { ++depth; }
                else if (seg[j] == ')') {
                    if (--depth == 0) { close = j; break; }
                } else if (seg[j] == ',' && depth == 1) {
                    if (comma != std::string_view::npos) { throw SyntaxError(line, col(j), "')' after two range bounds"); }
                    comma = j;
                }
            }
            if (close == std::string_view::npos) { throw SyntaxError(line, col(seg.size()), "')' closing the range"); }
            if (comma == std::string_view::npos) { throw SyntaxError(line, col(close), "',' between range bounds"); }
            Symbol s;
            s.kind = is_int ? SymbolKind::IntRange : SymbolKind::RealRange;
            std::size_t lo_off = open + 1;
            auto lo_text = trim(seg.substr(open + 1, comma - open - 1), lo_off);
            std::size_t hi_off = comma + 1;
            auto hi_text = trim(seg.substr(comma + 1, close - comma - 1), hi_off);
            if (is_real && !lo_text.empty() && lo_text.front() == '>') {
                s.lo_open = true;
                lo_text.remove_prefix(1);
                ++lo_off;
            }
            if (is_real && !hi_text.empty() && hi_text.front() == '<') {
                s.hi_open = true;
                hi_text.remove_prefix(1);
                ++hi_off;
            }
            s.lo = parse_bound(lo_text, line, col(lo_off));
            s.hi = parse_bound(hi_text, line, col(hi_off));
            i = close + 1;
            auto j = i;
            while (j < seg.size() && is_space(seg[j])) { ++j; }
            if (j < seg.size() && seg[j] == '*') {
                if (!is_real) { throw SyntaxError(line, col(j), "'|', symbol or end of production"); }
                ++j;
                while (j < seg.size() && is_space(seg[j])) { ++j; }
                auto const start = j;
                if (j < seg.size() && seg[j] == '(') {
                    int d = 0;
                    for (; j < seg.size(); ++j) {
                        if (seg[j] == '(') { ++d; }
                        else if (seg[j] == ')' && --d == 0) { ++j; break; }
                    }
                } else {
                    while (j < seg.size() && (std::isalnum(static_cast<unsigned char>(seg[j])) != 0 || seg[j] == '_' || seg[j] == '.')) { ++j; }
                }
                if (j == start) { throw SyntaxError(line, col(j), "scale factor after '*'"); }
                s.scaled = true;
                s.scale = parse_bound(seg.substr(start, j - start), line, col(start));
                i = j;
            }
            out.push_back({Tok::Range, std::string(seg.substr(i, 0)), line, col(i), std::move(s)});
            continue;
        }
        auto j = i;
        while (j < seg.size() && !is_space(seg[j]) && !is_meta(seg[j])) { ++j; }
        auto word = seg.substr(i, j - i);
        if (word == "::=") { throw SyntaxError(line, col(i), "production head '<name> ::=' at line start"); }
        out.push_back({Tok::Terminal, std::string(word), line, col(i), {}});
        i = j;
    }
}

struct PendingProduction {
    std::string name;
    int line;
    int column;
    std::vector<Token> tokens;
    std::vector<std::string> comments;
};

class BodyParser {
public:
    BodyParser(std::vector<Token> const& toks, int end_line, int end_column)
        : toks_(toks), end_ {Tok::End, "", end_line, end_column, {}} { }

    std::vector<Alternative> parse()
    {
        auto alts = alternatives();
        if (peek().kind != Tok::End) { fail("'|', symbol or end of production"); }
        return alts;
    }

private:
    Token const& peek() const { return pos_ < toks_.size() ? toks_[pos_] : end_; }

    [[noreturn]] void fail(std::string const& expected) const
    {
        auto const& t = peek();
        throw SyntaxError(t.line, t.column, expected);
    }

    std::vector<Alternative> alternatives()
    {
        std::vector<Alternative> alts;
        alts.push_back(sequence());
        while (peek().kind == Tok::Bar) {
            ++pos_;
            alts.push_back(sequence());
        }
        return alts;
    }

    Alternative sequence()
    {
        Alternative a;
        for (;;) {
            auto const& t = peek();
            switch (t.kind) {
            case Tok::NonTerminal: a.symbols.push_back(Symbol::nonterminal(t.text)); ++pos_; break;
            case Tok::Terminal: a.symbols.push_back(Symbol::terminal(t.text)); ++pos_; break;
            case Tok::Range: a.symbols.push_back(t.range); ++pos_; break;
            case Tok::LBracket:
            case Tok::LParen: {
                bool const opt = t.kind == Tok::LBracket;
                ++pos_;
                Symbol s;
                s.kind = opt ? SymbolKind::Optional : SymbolKind::Group;
                s.alternatives = alternatives();
                if (peek().kind != (opt ? Tok::RBracket : Tok::RParen)) { fail(opt ? "']'" : "')'"); }
                ++pos_;
                a.symbols.push_back(std::move(s));
                break;
            }
            default:
                if (a.symbols.empty()) { fail("symbol"); }
                return a;
            }
        }
    }

    std::vector<Token> const& toks_;
    Token end_;
    std::size_t pos_ {0};
};

// "<name> ::=" at the start of a line (leading blanks allowed); returns offset after "::=".
std::size_t production_head(std::string_view line, std::string& name)
{
    std::size_t i = 0;
    while (i < line.size() && is_space(line[i])) { ++i; }
    if (i >= line.size() || line[i] != '<') { return std::string_view::npos; }
    auto j = i + 1;
    while (j < line.size() && line[j] != '>' && line[j] != '<' && !is_space(line[j])) { ++j; }
    if (j >= line.size() || line[j] != '>' || j == i + 1) { return std::string_view::npos; }
    auto k = j + 1;
    while (k < line.size() && is_space(line[k])) { ++k; }
    if (line.substr(k, 3) != "::=") { return std::string_view::npos; }
    name = std::string(line.substr(i + 1, j - i - 1));
    return k + 3;
}

} // namespace

Grammar parse_grammar(std::string_view text, TierLabel tier)
{
    std::vector<PendingProduction> pending;
    int line_no = 0;
    std::size_t pos = 0;
    int last_line = 1;
    int last_col = 1;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (!line.empty() && line.back() == '\r') { line.remove_suffix(1); }
        ++line_no;
        std::optional<std::string> comment;
        auto hash = line.find('#');
        if (hash != std::string_view::npos) {
            comment = rtrim(line.substr(hash + 1));
            line = line.substr(0, hash);
        }
        std::string name;
        auto body_at = production_head(line, name);
        if (body_at != std::string_view::npos) {
            auto lt = line.find('<');
            pending.push_back({name, line_no, static_cast<int>(lt) + 1, {}, {}});
            lex_segment(line.substr(body_at), line_no, static_cast<int>(body_at) + 1, pending.back().tokens);
        } else {
            std::size_t first = 0;
            while (first < line.size() && is_space(line[first])) { ++first; }
            if (first < line.size()) {
                if (pending.empty()) { throw SyntaxError(line_no, static_cast<int>(first) + 1, "production head '<name> ::='"); }
                lex_segment(line, line_no, 1, pending.back().tokens);
            }
        }
        if (comment && !pending.empty()) { pending.back().comments.push_back(*comment); }
        if (!pending.empty()) {
            last_line = line_no;
            last_col = static_cast<int>(line.size()) + 1;
        }
        if (nl == std::string_view::npos) { break; }
        pos = nl + 1;
    }

    std::vector<Production> productions;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        auto& p = pending[i];
        if (!seen.insert(p.name).second) { throw DuplicateProduction(p.name); }
        int end_line = last_line;
        int end_col = last_col;
        if (!p.tokens.empty()) {
            end_line = p.tokens.back().line;
            end_col = p.tokens.back().column + static_cast<int>(std::max<std::size_t>(1, p.tokens.back().text.size()));
        } else {
            end_line = p.line;
            end_col = p.column;
        }
        Production prod;
        prod.name = p.name;
        prod.alternatives = BodyParser(p.tokens, end_line, end_col).parse();
        prod.comments = std::move(p.comments);
        productions.push_back(std::move(prod));
    }
    if (productions.empty()) { throw SyntaxError(line_no, 1, "at least one production"); }
    Grammar g(std::move(productions), tier);

    // bounds must be non-empty for every admissible context
    for (auto const& p : g.productions()) {
        for_each_symbol(p.alternatives, [&](Symbol const& s) {
            if (s.kind != SymbolKind::RealRange) { return; }
            auto check = [&](DatasetContext const& ctx) {
                double const lo = s.lo.evaluate(ctx);
                double const hi = s.hi.evaluate(ctx);
                if (lo > hi || ((s.lo_open || s.hi_open) && lo == hi)) {
                    throw Error("empty real range " + print_symbol(s) + " in <" + p.name + ">");
                }
            };
            bool const dyn_l = s.lo.references_labels() || s.hi.references_labels();
            bool const dyn_a = s.lo.references_attributes() || s.hi.references_attributes();
            if (!dyn_l && !dyn_a) { check({2, 1}); return; }
            for (std::int64_t l = 2; l <= 1000; l += dyn_l ? 1 : 1000) {
                for (std::int64_t a = 1; a <= 10000; a += dyn_a ? 1 : 10000) { check({l, a}); }
            }
        });
    }
    return g;
}

std::string print_alternatives(std::vector<Alternative> const& alts)
{
    std::string out;
    for (std::size_t i = 0; i < alts.size(); ++i) {
        if (i > 0) { out += " | "; }
        auto const& syms = alts[i].symbols;
        for (std::size_t j = 0; j < syms.size(); ++j) {
            if (j > 0) { out += ' '; }
            out += print_symbol(syms[j]);
        }
    }
    return out;
}

std::string print_symbol(Symbol const& s)
{
    switch (s.kind) {
    case SymbolKind::NonTerminal: return "<" + s.text + ">";
    case SymbolKind::Terminal: return s.text;
    case SymbolKind::Optional: return "[" + print_alternatives(s.alternatives) + "]";
    case SymbolKind::Group: return "(" + print_alternatives(s.alternatives) + ")";
    case SymbolKind::IntRange: return "RANDOM-INT(" + s.lo.to_string() + ", " + s.hi.to_string() + ")";
    case SymbolKind::RealRange: {
        std::string out = "RANDOM-REAL(";
        if (s.lo_open) { out += '>'; }
        out += s.lo.to_string() + ", ";
        if (s.hi_open) { out += '<'; }
        out += s.hi.to_string() + ")";
        if (s.scaled) {
            auto f = s.scale.to_string();
            if (f.find(' ') != std::string::npos) { f = "(" + f + ")"; }
            out += " * " + f;
        }
        return out;
    }
    }
    return {};
}

std::string print_grammar(Grammar const& g)
{
    std::string out;
    for (auto const& p : g.productions()) {
        out += "<" + p.name + "> ::= " + print_alternatives(p.alternatives);
        for (std::size_t i = 0; i < p.comments.size(); ++i) {
            out += i == 0 ? "  #" : "\n    #";
            out += p.comments[i];
        }
        out += '\n';
    }
    return out;
}

std::vector<std::string> unresolved_references(Grammar const& g)
{
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (auto const& p : g.productions()) {
        for_each_symbol(p.alternatives, [&](Symbol const& s) {
            if (s.kind == SymbolKind::NonTerminal && g.find(s.text) == nullptr && seen.insert(s.text).second) {
                out.push_back(s.text);
            }
        });
    }
    return out;
}

std::vector<std::string> supplemented_productions(Grammar const& g)
{
    std::vector<std::string> out;
    for (auto const& p : g.productions()) {
        for (auto const& c : p.comments) {
            if (c.find("supplemented") != std::string::npos) {
                out.push_back(p.name);
                break;
            }
        }
    }
    return out;
}

GrammarStats grammar_stats(Grammar const& g)
{
    GrammarStats st;
    std::set<std::string> terminals;
    for (auto const& p : g.productions()) {
        for_each_symbol(p.alternatives, [&](Symbol const& s) {
            if (s.kind == SymbolKind::Terminal) {
                terminals.insert(s.text);
                ++st.terminal_occurrences;
            } else if (s.kind == SymbolKind::IntRange || s.kind == SymbolKind::RealRange) {
                ++st.numeric_leaf_count;
            }
        });
    }
    st.rule_count = g.productions().size();
    st.unresolved_count = unresolved_references(g).size();
    st.nonterminal_count = st.rule_count + st.unresolved_count;
    st.terminal_count = terminals.size();
    return st;
}

} // namespace mlcspace
