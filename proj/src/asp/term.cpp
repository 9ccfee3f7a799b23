#include "amcs/asp/term.hpp"

#include "amcs/error.hpp"

#include <algorithm>

namespace amcs::asp {

struct Term::Node {
    TermKind kind = TermKind::Integer;
    ArithOp op = ArithOp::Add;
    std::int64_t value = 0;
    std::string name;
    std::vector<Term> args;
    std::size_t hash = 0;
    std::size_t depth = 1;
    bool ground = true;
    bool arith = false;
};

namespace {

const std::string kCell = "__cell";
const std::string kNil = "__nil";

} // namespace

std::shared_ptr<const Term::Node> Term::make_node(Node n) {
    std::size_t h = std::hash<int>{}(static_cast<int>(n.kind));
    switch (n.kind) {
    case TermKind::Integer:
        h = hash_combine(h, std::hash<std::int64_t>{}(n.value));
        break;
    case TermKind::Arith:
        h = hash_combine(h, static_cast<std::size_t>(n.op));
        n.arith = true;
        n.ground = false;
        break;
    case TermKind::Variable:
        n.ground = false;
        h = hash_combine(h, std::hash<std::string>{}(n.name));
        break;
    default:
        h = hash_combine(h, std::hash<std::string>{}(n.name));
        break;
    }
    std::size_t depth = 0;
    for (const auto& a : n.args) {
        h = hash_combine(h, a.hash());
        depth = std::max(depth, a.depth());
        n.ground = n.ground && a.is_ground();
        n.arith = n.arith || a.has_arith();
    }
    n.depth = n.args.empty() ? 1 : depth + 1;
    n.hash = h;
    return std::make_shared<const Term::Node>(std::move(n));
}

namespace {

int kind_rank(TermKind k) {
    switch (k) {
    case TermKind::Integer: return 0;
    case TermKind::Constant: return 1;
    case TermKind::String: return 2;
    case TermKind::Function: return 3;
    case TermKind::Variable: return 4;
    case TermKind::Arith: return 5;
    }
    return 6;
}

void escape_into(std::string& out, const std::string& text) {
    out += '"';
    for (char c : text) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '"';
}

void render(std::string& out, const Term& t);

void render_list(std::string& out, const Term& t) {
    out += '[';
    const Term* cur = &t;
    bool first = true;
    while (cur->is_list_cell()) {
        if (!first) out += ',';
        first = false;
        render(out, cur->args()[0]);
        cur = &cur->args()[1];
    }
    if (!cur->is_nil()) {
        out += '|';
        render(out, *cur);
    }
    out += ']';
}

int precedence(ArithOp op) {
    switch (op) {
    case ArithOp::Add:
    case ArithOp::Sub: return 1;
    case ArithOp::Mul:
    case ArithOp::Div:
    case ArithOp::Mod: return 2;
    case ArithOp::Neg: return 3;
    }
    return 0;
}

void render_operand(std::string& out, const Term& t, int parent_prec, bool right) {
    bool paren = t.kind() == TermKind::Arith &&
                 (precedence(t.op()) < parent_prec || (right && precedence(t.op()) == parent_prec));
    if (paren) out += '(';
    render(out, t);
    if (paren) out += ')';
}

void render(std::string& out, const Term& t) {
    switch (t.kind()) {
    case TermKind::Integer:
        out += std::to_string(t.int_value());
        return;
    case TermKind::Constant:
        if (t.is_nil()) {
            out += "[]";
        } else {
            out += t.name();
        }
        return;
    case TermKind::Variable:
        out += t.name();
        return;
    case TermKind::String:
        escape_into(out, t.name());
        return;
    case TermKind::Function:
        if (t.is_list_cell()) {
            render_list(out, t);
            return;
        }
        out += t.name();
        out += '(';
        for (std::size_t i = 0; i < t.args().size(); ++i) {
            if (i) out += ',';
            render(out, t.args()[i]);
        }
        out += ')';
        return;
    case TermKind::Arith: {
        int prec = precedence(t.op());
        if (t.op() == ArithOp::Neg) {
            out += '-';
            render_operand(out, t.args()[0], prec, false);
            return;
        }
        static constexpr const char* symbols[] = {"+", "-", "*", "/", "\\"};
        render_operand(out, t.args()[0], prec, false);
        out += symbols[static_cast<int>(t.op())];
        render_operand(out, t.args()[1], prec, true);
        return;
    }
    }
}

} // namespace

std::size_t hash_combine(std::size_t seed, std::size_t value) noexcept {
    return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

Term::Term() : Term(integer(0)) {}

Term::Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Term Term::integer(std::int64_t value) {
    Node n;
    n.kind = TermKind::Integer;
    n.value = value;
    return Term(make_node(std::move(n)));
}

Term Term::constant(std::string name) {
    Node n;
    n.kind = TermKind::Constant;
    n.name = std::move(name);
    return Term(make_node(std::move(n)));
}

Term Term::string(std::string text) {
    Node n;
    n.kind = TermKind::String;
    n.name = std::move(text);
    return Term(make_node(std::move(n)));
}

Term Term::function(std::string name, std::vector<Term> args) {
    if (args.empty()) return constant(std::move(name));
    Node n;
    n.kind = TermKind::Function;
    n.name = std::move(name);
    n.args = std::move(args);
    return Term(make_node(std::move(n)));
}

Term Term::variable(std::string name) {
    Node n;
    n.kind = TermKind::Variable;
    n.name = std::move(name);
    return Term(make_node(std::move(n)));
}

Term Term::arith(ArithOp op, std::vector<Term> operands) {
    Node n;
    n.kind = TermKind::Arith;
    n.op = op;
    n.args = std::move(operands);
    return Term(make_node(std::move(n)));
}

Term Term::cell(Term head, Term tail) { return function(kCell, {std::move(head), std::move(tail)}); }

Term Term::nil() {
    static const Term t = constant(kNil);
    return t;
}

TermKind Term::kind() const noexcept { return node_->kind; }
std::int64_t Term::int_value() const noexcept { return node_->value; }
const std::string& Term::name() const noexcept { return node_->name; }
const std::vector<Term>& Term::args() const noexcept { return node_->args; }
ArithOp Term::op() const noexcept { return node_->op; }
std::size_t Term::arity() const noexcept { return node_->args.size(); }
bool Term::is_ground() const noexcept { return node_->ground; }
bool Term::has_arith() const noexcept { return node_->arith; }
std::size_t Term::depth() const noexcept { return node_->depth; }
std::size_t Term::hash() const noexcept { return node_->hash; }

bool Term::is_list_cell() const noexcept {
    return node_->kind == TermKind::Function && node_->args.size() == 2 && node_->name == kCell;
}

bool Term::is_nil() const noexcept { return node_->kind == TermKind::Constant && node_->name == kNil; }

void Term::collect_variables(std::set<std::string>& out) const {
    if (node_->kind == TermKind::Variable) {
        out.insert(node_->name);
        return;
    }
    for (const auto& a : node_->args) a.collect_variables(out);
}

bool operator==(const Term& a, const Term& b) noexcept {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
    return compare_unchecked(a, b) == 0;
}

std::strong_ordering compare_unchecked(const Term& a, const Term& b) noexcept {
    if (a.kind() != b.kind()) return kind_rank(a.kind()) <=> kind_rank(b.kind());
    switch (a.kind()) {
    case TermKind::Integer:
        return a.int_value() <=> b.int_value();
    case TermKind::Constant:
    case TermKind::String:
    case TermKind::Variable:
        return a.name().compare(b.name()) <=> 0;
    case TermKind::Function:
    case TermKind::Arith: {
        if (auto c = a.arity() <=> b.arity(); c != 0) return c;
        if (a.kind() == TermKind::Arith) {
            if (auto c = a.op() <=> b.op(); c != 0) return c;
        } else if (auto c = a.name().compare(b.name()) <=> 0; c != 0) {
            return c;
        }
        for (std::size_t i = 0; i < a.arity(); ++i) {
            if (auto c = compare_unchecked(a.args()[i], b.args()[i]); c != 0) return c;
        }
        return std::strong_ordering::equal;
    }
    }
    return std::strong_ordering::equal;
}

std::strong_ordering compare_terms(const Term& a, const Term& b) {
    if (!a.is_ground()) throw NonGround("term is not ground: " + to_string(a));
    if (!b.is_ground()) throw NonGround("term is not ground: " + to_string(b));
    return compare_unchecked(a, b);
}

std::string to_string(const Term& t) {
    std::string out;
    render(out, t);
    return out;
}

} // namespace amcs::asp
