#include "amcs/asp/parser.hpp"

#include "amcs/error.hpp"
#include "plan.hpp"

#include <cctype>
#include <charconv>
#include <limits>

namespace amcs::asp {

namespace {

enum class Tok {
    Ident,
    Variable,
    Integer,
    String,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    Colon,
    Dot,
    DotDot,
    If,  // :-
    Bar,
    Plus,
    Minus,
    Star,
    Slash,
    Backslash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Not,
    Directive,  // #max, #maximize, ...
    End,
};

struct Token {
    Tok kind;
    std::string text;
    std::int64_t value = 0;
    std::size_t line = 1;
    std::size_t col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.col = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            lex_one(t);
            out.push_back(std::move(t));
        }
    }

private:
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

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

    [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(line_, col_, what); }

    void skip_space() {
        for (;;) {
            while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(peek()))) advance();
            if (peek() == '%' && peek(1) == '*') {
                advance();
                advance();
                while (!(peek() == '*' && peek(1) == '%')) {
                    if (pos_ >= src_.size()) fail("unterminated block comment");
                    advance();
                }
                advance();
                advance();
                continue;
            }
            if (peek() == '%') {
                while (pos_ < src_.size() && peek() != '\n') advance();
                continue;
            }
            return;
        }
    }

    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    std::string take_word() {
        std::string w;
        while (ident_char(peek())) w += advance();
        return w;
    }

    void lex_one(Token& t) {
        char c = peek();
        if (std::islower(static_cast<unsigned char>(c)) ||
            (c == '_' && peek(1) == '_' && std::islower(static_cast<unsigned char>(peek(2))))) {
            t.text = take_word();
            t.kind = t.text == "not" ? Tok::Not : Tok::Ident;
            return;
        }
        if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
            t.text = take_word();
            t.kind = Tok::Variable;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (std::isdigit(static_cast<unsigned char>(peek()))) t.text += advance();
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
            if (ec != std::errc{}) fail("integer out of range: " + t.text);
            t.kind = Tok::Integer;
            return;
        }
        if (c == '"') {
            advance();
            for (;;) {
                if (pos_ >= src_.size()) fail("unterminated string");
                char d = advance();
                if (d == '"') break;
                if (d == '\\') {
                    char e = pos_ < src_.size() ? advance() : '\0';
                    switch (e) {
                    case 'n': t.text += '\n'; break;
                    case 't': t.text += '\t'; break;
                    case '"': t.text += '"'; break;
                    case '\\': t.text += '\\'; break;
                    default: fail("bad escape in string");
                    }
                } else {
                    t.text += d;
                }
            }
            t.kind = Tok::String;
            return;
        }
        if (c == '#') {
            advance();
            t.text = "#" + take_word();
            t.kind = Tok::Directive;
            return;
        }
        advance();
        switch (c) {
        case '(': t.kind = Tok::LParen; return;
        case ')': t.kind = Tok::RParen; return;
        case '[': t.kind = Tok::LBracket; return;
        case ']': t.kind = Tok::RBracket; return;
        case '{': t.kind = Tok::LBrace; return;
        case '}': t.kind = Tok::RBrace; return;
        case ',': t.kind = Tok::Comma; return;
        case ';': t.kind = Tok::Semicolon; return;
        case '|': t.kind = Tok::Bar; return;
        case '+': t.kind = Tok::Plus; return;
        case '-': t.kind = Tok::Minus; return;
        case '*': t.kind = Tok::Star; return;
        case '/': t.kind = Tok::Slash; return;
        case '\\': t.kind = Tok::Backslash; return;
        case '=':
            if (peek() == '=') advance();
            t.kind = Tok::Eq;
            return;
        case '.':
            if (peek() == '.') {
                advance();
                t.kind = Tok::DotDot;
            } else {
                t.kind = Tok::Dot;
            }
            return;
        case ':':
            if (peek() == '-') {
                advance();
                t.kind = Tok::If;
            } else {
                t.kind = Tok::Colon;
            }
            return;
        case '!':
            if (peek() == '=') {
                advance();
                t.kind = Tok::Ne;
                return;
            }
            break;
        case '<':
            if (peek() == '=') {
                advance();
                t.kind = Tok::Le;
            } else {
                t.kind = Tok::Lt;
            }
            return;
        case '>':
            if (peek() == '=') {
                advance();
                t.kind = Tok::Ge;
            } else {
                t.kind = Tok::Gt;
            }
            return;
        default:
            break;
        }
        --col_;
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

std::optional<std::int64_t> fold(ArithOp op, std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    switch (op) {
    case ArithOp::Add:
        if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
        return r;
    case ArithOp::Sub:
        if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
        return r;
    case ArithOp::Mul:
        if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
        return r;
    default:
        return std::nullopt;  // division and modulo are left to the grounder
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

    Program program() {
        Program p;
        while (cur().kind != Tok::End) statement(p);
        for (std::size_t i = 0; i < p.rules.size(); ++i) {
            if (auto v = detail::unsafe_variable(p.rules[i])) throw UnsafeRule(i, *v);
        }
        for (std::size_t i = 0; i < p.optimize.size(); ++i) {
            if (auto v = detail::unsafe_variable(p.optimize[i])) throw UnsafeRule(p.rules.size() + i, *v);
        }
        return p;
    }

    Term single_term() {
        Term t = term();
        expect(Tok::End, "end of input");
        return t;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& ahead(std::size_t n) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }
    bool at(Tok k) const { return cur().kind == k; }

    bool accept(Tok k) {
        if (!at(k)) return false;
        ++pos_;
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(cur().line, cur().col, what); }

    const Token& expect(Tok k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what);
        return toks_[pos_++];
    }

    void statement(Program& p) {
        if (accept(Tok::If)) {
            Rule r{NoHead{}, {}};
            if (!at(Tok::Dot)) r.body = literals();
            expect(Tok::Dot, "'.'");
            p.rules.push_back(std::move(r));
            return;
        }
        if (at(Tok::Directive) && (cur().text == "#maximize" || cur().text == "#minimize")) {
            OptimizeStatement o{cur().text == "#maximize" ? OptimizeSense::Maximize : OptimizeSense::Minimize, {}};
            ++pos_;
            o.elements = aggregate_elements();
            expect(Tok::Dot, "'.'");
            p.optimize.push_back(std::move(o));
            return;
        }
        Rule r;
        if (at(Tok::LBrace) || (at(Tok::Integer) && ahead(1).kind == Tok::LBrace)) {
            r.head = choice_head();
        } else {
            r.head = NormalHead{atom()};
        }
        if (accept(Tok::If) && !at(Tok::Dot)) r.body = literals();
        expect(Tok::Dot, "'.'");
        p.rules.push_back(std::move(r));
    }

    ChoiceHead choice_head() {
        ChoiceHead h;
        if (at(Tok::Integer)) h.lower = toks_[pos_++].value;
        expect(Tok::LBrace, "'{'");
        if (!at(Tok::RBrace)) {
            do {
                ChoiceElement e{atom(), {}};
                if (accept(Tok::Colon)) e.condition = literals();
                h.elements.push_back(std::move(e));
            } while (accept(Tok::Semicolon));
        }
        expect(Tok::RBrace, "'}'");
        if (at(Tok::Integer)) h.upper = toks_[pos_++].value;
        return h;
    }

    std::vector<AggregateElement> aggregate_elements() {
        expect(Tok::LBrace, "'{'");
        std::vector<AggregateElement> out;
        if (!at(Tok::RBrace)) {
            do {
                AggregateElement e;
                e.tuple.push_back(term());
                while (accept(Tok::Comma)) e.tuple.push_back(term());
                if (accept(Tok::Colon)) e.condition = literals();
                out.push_back(std::move(e));
            } while (accept(Tok::Semicolon));
        }
        expect(Tok::RBrace, "'}'");
        return out;
    }

    std::vector<Literal> literals() {
        std::vector<Literal> out;
        out.push_back(literal());
        while (accept(Tok::Comma)) out.push_back(literal());
        return out;
    }

    static std::optional<CompareOp> compare_op(Tok k) {
        switch (k) {
        case Tok::Lt: return CompareOp::Lt;
        case Tok::Le: return CompareOp::Le;
        case Tok::Gt: return CompareOp::Gt;
        case Tok::Ge: return CompareOp::Ge;
        case Tok::Eq: return CompareOp::Eq;
        case Tok::Ne: return CompareOp::Ne;
        default: return std::nullopt;
        }
    }

    Literal literal() {
        if (accept(Tok::Not)) return Literal{NafLiteral{atom()}};
        std::size_t line = cur().line, col = cur().col;
        Term lhs = term();
        if (at(Tok::Eq) && ahead(1).kind == Tok::Directive) {
            ++pos_;
            const std::string kind = cur().text;
            AggregateKind k;
            if (kind == "#max") k = AggregateKind::Max;
            else if (kind == "#min") k = AggregateKind::Min;
            else if (kind == "#count") k = AggregateKind::Count;
            else fail("unsupported aggregate " + kind);
            ++pos_;
            return Literal{AggAssign{lhs, k, aggregate_elements()}};
        }
        if (auto op = compare_op(cur().kind)) {
            ++pos_;
            Term rhs = term();
            if (*op == CompareOp::Eq && accept(Tok::DotDot)) {
                if (lhs.kind() != TermKind::Variable) throw SyntaxError(line, col, "range must bind a variable");
                return Literal{RangeBind{lhs, rhs, term()}};
            }
            return Literal{Comparison{*op, lhs, rhs}};
        }
        return Literal{PosLiteral{to_atom(lhs, line, col)}};
    }

    static Atom to_atom(const Term& t, std::size_t line, std::size_t col) {
        if ((t.kind() == TermKind::Constant && !t.is_nil()) ||
            (t.kind() == TermKind::Function && !t.is_list_cell()))
            return Atom::from_term(t);
        throw SyntaxError(line, col, "expected an atom, got " + to_string(t));
    }

    Atom atom() {
        std::size_t line = cur().line, col = cur().col;
        if (!at(Tok::Ident)) fail("expected an atom");
        return to_atom(primary(), line, col);
    }

    Term term() { return additive(); }

    Term binary(ArithOp op, Term a, Term b) {
        if (a.kind() == TermKind::Integer && b.kind() == TermKind::Integer) {
            if (auto v = fold(op, a.int_value(), b.int_value())) return Term::integer(*v);
        }
        return Term::arith(op, {std::move(a), std::move(b)});
    }

    Term additive() {
        Term t = multiplicative();
        for (;;) {
            if (accept(Tok::Plus)) t = binary(ArithOp::Add, t, multiplicative());
            else if (accept(Tok::Minus)) t = binary(ArithOp::Sub, t, multiplicative());
            else return t;
        }
    }

    Term multiplicative() {
        Term t = unary();
        for (;;) {
            if (accept(Tok::Star)) t = binary(ArithOp::Mul, t, unary());
            else if (accept(Tok::Slash)) t = binary(ArithOp::Div, t, unary());
            else if (accept(Tok::Backslash)) t = binary(ArithOp::Mod, t, unary());
            else return t;
        }
    }

    Term unary() {
        if (accept(Tok::Minus)) {
            Term t = unary();
            if (t.kind() == TermKind::Integer && t.int_value() != std::numeric_limits<std::int64_t>::min())
                return Term::integer(-t.int_value());
            return Term::arith(ArithOp::Neg, {t});
        }
        return primary();
    }

    Term primary() {
        const Token& t = cur();
        switch (t.kind) {
        case Tok::Integer:
            ++pos_;
            return Term::integer(t.value);
        case Tok::String:
            ++pos_;
            return Term::string(t.text);
        case Tok::Variable: {
            ++pos_;
            if (t.text == "_") return Term::variable("_anon" + std::to_string(anon_++));
            return Term::variable(t.text);
        }
        case Tok::Ident: {
            std::string name = t.text;
            ++pos_;
            if (!accept(Tok::LParen)) return Term::constant(name);
            std::vector<Term> args;
            args.push_back(term());
            while (accept(Tok::Comma)) args.push_back(term());
            expect(Tok::RParen, "')'");
            return Term::function(name, std::move(args));
        }
        case Tok::LParen: {
            ++pos_;
            Term inner = term();
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::LBracket:
            return list();
        default:
            fail("expected a term");
        }
    }

    Term list() {
        expect(Tok::LBracket, "'['");
        if (accept(Tok::RBracket)) return Term::nil();
        std::vector<Term> items;
        items.push_back(term());
        while (accept(Tok::Comma)) items.push_back(term());
        Term tail = Term::nil();
        if (accept(Tok::Bar)) tail = term();
        expect(Tok::RBracket, "']'");
        for (auto it = items.rbegin(); it != items.rend(); ++it) tail = Term::cell(*it, tail);
        return tail;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t anon_ = 0;
};

} // namespace

Program parse(std::string_view text) { return Parser(text).program(); }

Term parse_term(std::string_view text) { return Parser(text).single_term(); }

std::vector<Atom> parse_facts(std::string_view text) {
    Program p = parse(text);
    if (!p.optimize.empty()) throw SyntaxError(1, 1, "optimization statement in fact input");
    std::vector<Atom> out;
    for (const auto& r : p.rules) {
        if (!r.is_fact()) throw SyntaxError(1, 1, "not a fact: " + to_string(r));
        const auto& a = std::get<NormalHead>(r.head).atom;
        if (!a.as_term().is_ground()) throw SyntaxError(1, 1, "fact is not ground: " + to_string(a));
        out.push_back(a);
    }
    return out;
}

} // namespace amcs::asp
