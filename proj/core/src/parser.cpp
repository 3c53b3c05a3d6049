#include "oraclelog/parser.hpp"

#include <cassert>
#include <charconv>
#include <map>
#include <set>

namespace oraclelog {

namespace {

enum class Tok {
    Ident,     // lowercase identifier
    Variable,  // uppercase or underscore start
    Integer,
    String,
    Hash,
    LParen,
    RParen,
    Comma,
    Dot,
    ColonDash,
    Star,
    Minus,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t int_value = 0;
    int line = 1;
    int col = 1;
    int end_col = 1; // column one past the token
};

[[noreturn]] void fail(ParseError::Kind kind, const std::string& message, const Token& at) {
    throw ParseError(kind, message, at.line, at.col);
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            Token t = next();
            bool end = t.kind == Tok::End;
            out.push_back(std::move(t));
            if (end)
                break;
        }
        return out;
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    bool done() const { return pos_ >= src_.size(); }

    void skip_trivia() {
        while (!done()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '%') {
                while (!done() && peek() != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    static bool ident_start(char c) { return (c >= 'a' && c <= 'z'); }
    static bool variable_start(char c) { return (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool ident_tail(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_';
    }
    static bool digit(char c) { return c >= '0' && c <= '9'; }

    Token next() {
        skip_trivia();
        Token t;
        t.line = line_;
        t.col = col_;
        if (done()) {
            t.kind = Tok::End;
            t.end_col = col_;
            return t;
        }
        char c = peek();
        if (ident_start(c) || variable_start(c)) {
            std::string name;
            while (!done() && ident_tail(peek()))
                name += advance();
            t.kind = ident_start(c) ? Tok::Ident : Tok::Variable;
            t.text = std::move(name);
        } else if (digit(c) || (c == '-' && digit(peek(1)))) {
            std::string digits;
            if (c == '-')
                digits += advance();
            while (!done() && digit(peek()))
                digits += advance();
            std::int64_t value = 0;
            auto [ptr, ec] =
                std::from_chars(digits.data(), digits.data() + digits.size(), value);
            if (ec != std::errc() || ptr != digits.data() + digits.size())
                fail(ParseError::Kind::Syntax,
                     "integer literal '" + digits + "' out of 64-bit range", t);
            t.kind = Tok::Integer;
            t.int_value = value;
            t.text = std::move(digits);
        } else if (c == '"') {
            advance();
            std::string value;
            while (true) {
                if (done() || peek() == '\n')
                    fail(ParseError::Kind::Syntax, "unterminated string literal", t);
                char d = advance();
                if (d == '"')
                    break;
                if (d == '\\') {
                    if (done())
                        fail(ParseError::Kind::Syntax, "unterminated string literal", t);
                    char e = advance();
                    switch (e) {
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    default:
                        fail(ParseError::Kind::Syntax,
                             std::string("unknown escape '\\") + e + "' in string literal", t);
                    }
                } else {
                    value += d;
                }
            }
            t.kind = Tok::String;
            t.text = std::move(value);
        } else if (c == ':' && peek(1) == '-') {
            advance();
            advance();
            t.kind = Tok::ColonDash;
            t.text = ":-";
        } else {
            advance();
            switch (c) {
            case '#': t.kind = Tok::Hash; break;
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case ',': t.kind = Tok::Comma; break;
            case '.': t.kind = Tok::Dot; break;
            case '*': t.kind = Tok::Star; break;
            case '-': t.kind = Tok::Minus; break;
            default:
                fail(ParseError::Kind::Syntax,
                     std::string("unexpected character '") + c + "'", t);
            }
            t.text = std::string(1, c);
        }
        t.end_col = col_;
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// Marker prefix for anonymous variables while a rule is being parsed; the
// control character cannot appear in lexed variable names.
const std::string kAnonPrefix = "\x01anon";

class Parser {
public:
    Parser(std::string_view src, Warnings* warnings)
        : tokens_(Lexer(src).run()), warnings_(warnings) {}

    Program parse_program() {
        Program program;
        bool seen_rule = false;
        while (!at(Tok::End)) {
            if (at_directive()) {
                if (seen_rule)
                    fail(ParseError::Kind::ImportAfterRule,
                         "import directives must precede all rules", cur());
                program.imports.push_back(parse_directive());
            } else {
                program.rules.push_back(parse_rule());
                seen_rule = true;
            }
        }
        return program;
    }

    Rule parse_single_rule() {
        if (at_directive())
            fail(ParseError::Kind::Syntax, "expected a rule, found an import directive", cur());
        Rule rule = parse_rule();
        if (!at(Tok::End))
            fail(ParseError::Kind::Syntax, "trailing input after rule", cur());
        return rule;
    }

private:
    const Token& cur() const { return tokens_[index_]; }
    const Token& peek(std::size_t ahead = 1) const {
        std::size_t i = index_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    bool at(Tok kind) const { return cur().kind == kind; }
    Token take() { return tokens_[index_++]; }

    // Whether `b` starts exactly where `a` ended; dotted names must be
    // written without internal whitespace, which keeps the statement
    // terminator `.` distinguishable from a qualifier dot.
    static bool adjacent(const Token& a, const Token& b) {
        return a.line == b.line && a.end_col == b.col;
    }

    Token expect(Tok kind, const std::string& what) {
        if (!at(kind))
            fail(ParseError::Kind::Syntax, "expected " + what + ", found '" + cur().text + "'",
                 cur());
        return take();
    }

    bool at_directive() const {
        return at(Tok::Hash) && peek().kind == Tok::Ident &&
               (peek().text == "import" || peek().text == "include") &&
               adjacent(cur(), peek());
    }

    ImportDirective parse_directive() {
        Token hash = take();
        Token keyword = take();
        if (keyword.text == "include" && warnings_)
            warnings_->push_back({Warning::Kind::DeprecatedDirective,
                                  "'#include' is deprecated; use '#import'", "", keyword.line});
        ImportDirective directive;
        directive.line = hash.line;
        directive.path.push_back(expect(Tok::Ident, "a package name").text);
        Token last = tokens_[index_ - 1];
        while (at(Tok::Dot) && adjacent(last, cur())) {
            const Token& after = peek();
            if (!adjacent(cur(), after))
                break;
            if (after.kind == Tok::Star) {
                take();
                take();
                directive.wildcard = true;
                return directive;
            }
            if (after.kind != Tok::Ident)
                break;
            take();
            directive.path.push_back(take().text);
            last = tokens_[index_ - 1];
        }
        return directive;
    }

    Rule parse_rule() {
        Rule rule;
        anon_count_ = 0;
        rule.line = cur().line;
        if (at(Tok::ColonDash)) {
            take();
            rule.body = parse_body();
        } else {
            Atom head = parse_atom(/*in_head=*/true);
            rule.head = std::move(head);
            if (at(Tok::ColonDash)) {
                take();
                rule.body = parse_body();
            } else {
                expect(Tok::Dot, "'.' or ':-' after rule head");
                finish_rule(rule);
                return rule;
            }
        }
        expect(Tok::Dot, "'.' at end of rule");
        finish_rule(rule);
        return rule;
    }

    std::vector<Literal> parse_body() {
        std::vector<Literal> body;
        body.push_back(parse_literal());
        while (at(Tok::Comma)) {
            take();
            body.push_back(parse_literal());
        }
        return body;
    }

    Literal parse_literal() {
        if (at(Tok::Minus)) {
            Token minus = cur();
            if (peek().kind == Tok::Hash)
                fail(ParseError::Kind::ClassicallyNegatedExternal,
                     "external atoms cannot be classically negated", minus);
            fail(ParseError::Kind::Syntax, "classical negation is not supported", minus);
        }
        Literal literal;
        if (at(Tok::Ident) && cur().text == "not") {
            take();
            literal.negated = true;
            if (at(Tok::Ident) && cur().text == "not")
                fail(ParseError::Kind::Syntax, "doubled default negation", cur());
            if (at(Tok::Minus))
                fail(peek().kind == Tok::Hash ? ParseError::Kind::ClassicallyNegatedExternal
                                              : ParseError::Kind::Syntax,
                     "classical negation is not supported", cur());
        }
        literal.atom = parse_atom(/*in_head=*/false);
        return literal;
    }

    Atom parse_atom(bool in_head) {
        Atom atom;
        Token start = cur();
        if (at(Tok::Hash)) {
            if (in_head)
                fail(ParseError::Kind::ExternalInHead,
                     "external atoms may appear inside bodies and constraints only", start);
            Token hash = take();
            if (!at(Tok::Ident) || !adjacent(hash, cur()))
                fail(ParseError::Kind::Syntax, "expected a predicate name after '#'", cur());
            atom.external = true;
            std::vector<std::string> segments;
            segments.push_back(take().text);
            Token last = tokens_[index_ - 1];
            while (at(Tok::Dot) && adjacent(last, cur()) && peek().kind == Tok::Ident &&
                   adjacent(cur(), peek())) {
                take();
                segments.push_back(take().text);
                last = tokens_[index_ - 1];
            }
            atom.predicate = segments.back();
            segments.pop_back();
            for (std::size_t i = 0; i < segments.size(); ++i)
                atom.package += (i > 0 ? "." : "") + segments[i];
        } else {
            Token name = expect(Tok::Ident, "a predicate name");
            if (name.text == "not")
                fail(ParseError::Kind::Syntax, "'not' is reserved for default negation", name);
            if (at(Tok::Dot) && adjacent(name, cur()) && peek().kind == Tok::Ident &&
                adjacent(cur(), peek()))
                fail(ParseError::Kind::Syntax,
                     "qualified names are only valid for external atoms (missing '#'?)", name);
            atom.predicate = name.text;
        }
        if (at(Tok::LParen)) {
            take();
            if (!at(Tok::RParen)) {
                atom.args.push_back(parse_term());
                while (at(Tok::Comma)) {
                    take();
                    atom.args.push_back(parse_term());
                }
            }
            expect(Tok::RParen, "')'");
        }
        check_arity(atom, start);
        return atom;
    }

    Term parse_term() {
        Token t = cur();
        switch (t.kind) {
        case Tok::Integer:
            take();
            return Term::integer(t.int_value);
        case Tok::String:
            take();
            return Term::string(t.text);
        case Tok::Ident:
            take();
            return Term::symbol(t.text);
        case Tok::Variable:
            take();
            if (t.text == "_")
                return Term::variable(kAnonPrefix + std::to_string(anon_count_++));
            return Term::variable(t.text);
        case Tok::Minus:
            if (peek().kind == Tok::Integer) {
                take();
                Token value = take();
                return Term::integer(-value.int_value);
            }
            fail(ParseError::Kind::Syntax, "expected a term", t);
        default:
            fail(ParseError::Kind::Syntax, "expected a term, found '" + t.text + "'", t);
        }
    }

    void check_arity(const Atom& atom, const Token& at_token) {
        std::string key = (atom.external ? "#" : "") + atom.qualified_name();
        auto [it, inserted] = arities_.emplace(key, atom.arity());
        if (!inserted && it->second != atom.arity())
            fail(ParseError::Kind::ArityMismatch,
                 "predicate '" + key + "' used with arity " + std::to_string(atom.arity()) +
                     " but previously with arity " + std::to_string(it->second),
                 at_token);
    }

    // Renames the anonymous-variable markers of a finished rule to `_1`,
    // `_2`, ... skipping names the rule already uses.
    void finish_rule(Rule& rule) {
        if (anon_count_ == 0)
            return;
        std::set<std::string> used;
        for (const std::string& name : rule_variables(rule))
            used.insert(name);
        std::map<std::string, std::string> renames;
        int next = 1;
        for (int i = 0; i < anon_count_; ++i) {
            std::string fresh;
            do {
                fresh = "_" + std::to_string(next++);
            } while (used.count(fresh));
            used.insert(fresh);
            renames[kAnonPrefix + std::to_string(i)] = fresh;
        }
        auto rename_atom = [&](Atom& atom) {
            for (Term& term : atom.args) {
                if (!term.is_variable())
                    continue;
                auto it = renames.find(term.text());
                if (it != renames.end())
                    term = Term::variable(it->second);
            }
        };
        if (rule.head)
            rename_atom(*rule.head);
        for (Literal& literal : rule.body)
            rename_atom(literal.atom);
    }

    std::vector<Token> tokens_;
    std::size_t index_ = 0;
    Warnings* warnings_;
    std::map<std::string, std::size_t> arities_;
    int anon_count_ = 0;
};

} // namespace

Program parse_program(std::string_view text, Warnings* warnings) {
    return Parser(text, warnings).parse_program();
}

Rule parse_rule(std::string_view text) {
    return Parser(text, nullptr).parse_single_rule();
}

} // namespace oraclelog
