// SPDX-License-Identifier: Apache-2.0
#include "core/bound_expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "core/error.hpp"
#include "core/numfmt.hpp"

namespace mlcspace {

void check_context(DatasetContext const& ctx)
{
    if (ctx.labels < 2) { throw ContextError("label count must be >= 2, got " + std::to_string(ctx.labels)); }
    if (ctx.attributes < 1) { throw ContextError("attribute count must be >= 1, got " + std::to_string(ctx.attributes)); }
}

class BoundParser {
public:
    explicit BoundParser(std::string_view text) : text_(text) { }

    BoundExpr run()
    {
        BoundExpr e;
        e.nodes_.clear();
        out_ = &e;
        e.root_ = expr();
        skip();
        if (pos_ != text_.size()) { fail("end of bound expression"); }
        return e;
    }

private:
    int add(BoundExpr::Op op, double v = 0, int l = -1, int r = -1)
    {
        out_->nodes_.push_back({op, v, l, r});
        return static_cast<int>(out_->nodes_.size()) - 1;
    }

    [[noreturn]] void fail(std::string const& what) const
    {
        throw SyntaxError(1, static_cast<int>(pos_) + 1, what);
    }

    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) { ++pos_; }
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) { fail(std::string("'") + c + "'"); }
    }

    bool at_word(std::string_view w)
    {
        skip();
        if (text_.substr(pos_, w.size()) != w) { return false; }
        auto const after = pos_ + w.size();
        if (after < text_.size()) {
            auto const c = static_cast<unsigned char>(text_[after]);
            if (std::isalnum(c) != 0 || c == '_') { return false; }
        }
        return true;
    }

    int expr()
    {
        int lhs = term();
        for (;;) {
            if (accept('+')) { lhs = add(BoundExpr::Op::Add, 0, lhs, term()); }
            else if (accept('-')) { lhs = add(BoundExpr::Op::Sub, 0, lhs, term()); }
            else { return lhs; }
        }
    }

    int term()
    {
        int lhs = unary();
        for (;;) {
            if (accept('*')) { lhs = add(BoundExpr::Op::Mul, 0, lhs, unary()); }
            else if (accept('/')) { lhs = add(BoundExpr::Op::Div, 0, lhs, unary()); }
            else { return lhs; }
        }
    }

    int unary()
    {
        if (accept('-')) { return add(BoundExpr::Op::Neg, 0, unary()); }
        return primary();
    }

    int primary()
    {
        skip();
        if (pos_ >= text_.size()) { fail("number, L, n_attributes, SQRT, min or '('"); }
        char const c = text_[pos_];
        if ((std::isdigit(static_cast<unsigned char>(c)) != 0) || c == '.') {
            int n = number();
            // implicit multiplication: 2L, 2(…), 2SQRT(…)
            if (pos_ < text_.size()) {
                char const d = text_[pos_];
                if (d == '(' || d == '_' || (std::isalpha(static_cast<unsigned char>(d)) != 0)) {
                    n = add(BoundExpr::Op::Mul, 0, n, primary());
                }
            }
            return n;
        }
        if (accept('(')) {
            int e = expr();
            expect(')');
            return e;
        }
        if (at_word("n_attributes")) { pos_ += 12; return add(BoundExpr::Op::Attributes); }
        if (at_word("L")) { pos_ += 1; return add(BoundExpr::Op::Labels); }
        if (at_word("SQRT") || at_word("sqrt")) {
            pos_ += 4;
            expect('(');
            int e = expr();
            expect(')');
            return add(BoundExpr::Op::Sqrt, 0, e);
        }
        if (at_word("min") || at_word("MIN")) {
            pos_ += 3;
            expect('(');
            int a = expr();
            expect(',');
            int b = expr();
            expect(')');
            return add(BoundExpr::Op::Min, 0, a, b);
        }
        fail("number, L, n_attributes, SQRT, min or '('");
    }

    int number()
    {
        auto const start = pos_;
        while (pos_ < text_.size() && ((std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) || text_[pos_] == '.')) { ++pos_; }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            auto save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) { ++pos_; }
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) { ++pos_; }
            } else {
                pos_ = save;
            }
        }
        auto v = parse_real(text_.substr(start, pos_ - start));
        if (!v) { pos_ = start; fail("numeric literal"); }
        return add(BoundExpr::Op::Number, *v);
    }

    std::string_view text_;
    std::size_t pos_ {0};
    BoundExpr* out_ {nullptr};
};

BoundExpr BoundExpr::constant(double v)
{
    BoundExpr e;
    e.nodes_[0].value = v;
    return e;
}

BoundExpr BoundExpr::parse(std::string_view text)
{
    return BoundParser(text).run();
}

double BoundExpr::evaluate(DatasetContext const& ctx) const
{
    return eval(root_, ctx);
}

double BoundExpr::eval(int i, DatasetContext const& ctx) const
{
    auto const& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.op) {
    case Op::Number: return n.value;
    case Op::Labels: return static_cast<double>(ctx.labels);
    case Op::Attributes: return static_cast<double>(ctx.attributes);
    case Op::Add: return eval(n.lhs, ctx) + eval(n.rhs, ctx);
    case Op::Sub: return eval(n.lhs, ctx) - eval(n.rhs, ctx);
    case Op::Mul: return eval(n.lhs, ctx) * eval(n.rhs, ctx);
    case Op::Div: {
        double d = eval(n.rhs, ctx);
        return d == 0 ? 0.0 : eval(n.lhs, ctx) / d;
    }
    case Op::Neg: return -eval(n.lhs, ctx);
    case Op::Sqrt: return std::sqrt(std::max(0.0, eval(n.lhs, ctx)));
    case Op::Min: return std::min(eval(n.lhs, ctx), eval(n.rhs, ctx));
    }
    return 0;
}

namespace {
int precedence(BoundExpr::Op op)
{
    switch (op) {
    case BoundExpr::Op::Add:
    case BoundExpr::Op::Sub: return 1;
    case BoundExpr::Op::Mul:
    case BoundExpr::Op::Div: return 2;
    case BoundExpr::Op::Neg: return 3;
    default: return 4;
    }
}
} // namespace

std::string BoundExpr::to_string() const
{
    std::string out;
    print(root_, out);
    return out;
}

void BoundExpr::print(int i, std::string& out) const
{
    auto const& n = nodes_[static_cast<std::size_t>(i)];
    auto child = [&](int c, bool paren) {
        if (paren) { out += '('; }
        print(c, out);
        if (paren) { out += ')'; }
    };
    switch (n.op) {
    case Op::Number: out += format_real(n.value); return;
    case Op::Labels: out += 'L'; return;
    case Op::Attributes: out += "n_attributes"; return;
    case Op::Neg:
        out += '-';
        child(n.lhs, precedence(nodes_[static_cast<std::size_t>(n.lhs)].op) < 4);
        return;
    case Op::Sqrt:
        out += "SQRT(";
        print(n.lhs, out);
        out += ')';
        return;
    case Op::Min:
        out += "min(";
        print(n.lhs, out);
        out += ", ";
        print(n.rhs, out);
        out += ')';
        return;
    default: break;
    }
    int const p = precedence(n.op);
    int const pl = precedence(nodes_[static_cast<std::size_t>(n.lhs)].op);
    int const pr = precedence(nodes_[static_cast<std::size_t>(n.rhs)].op);
    bool const non_assoc = n.op == Op::Sub || n.op == Op::Div;
    child(n.lhs, pl < p);
    switch (n.op) {
    case Op::Add: out += " + "; break;
    case Op::Sub: out += " - "; break;
    case Op::Mul: out += " * "; break;
    case Op::Div: out += " / "; break;
    default: break;
    }
    child(n.rhs, pr < p || (non_assoc && pr == p));
}

bool BoundExpr::is_constant() const
{
    return !references_labels() && !references_attributes();
}

bool BoundExpr::references_labels() const
{
    return std::any_of(nodes_.begin(), nodes_.end(), [](Node const& n) { return n.op == Op::Labels; });
}

bool BoundExpr::references_attributes() const
{
    return std::any_of(nodes_.begin(), nodes_.end(), [](Node const& n) { return n.op == Op::Attributes; });
}

IntBounds int_bounds(BoundExpr const& lo, BoundExpr const& hi, DatasetContext const& ctx)
{
    // small epsilon guards against 2.9999999 from inexact arithmetic
    constexpr double eps = 1e-9;
    auto const l = static_cast<std::int64_t>(std::ceil(lo.evaluate(ctx) - eps));
    auto const h = static_cast<std::int64_t>(std::floor(hi.evaluate(ctx) + eps));
    return {l, std::max(l, h)};
}

std::int64_t scaled_round(double p, double scale)
{
    return std::max<std::int64_t>(1, std::llround(p * scale));
}

IntBounds scaled_bounds(BoundExpr const& lo, BoundExpr const& hi, BoundExpr const& scale, DatasetContext const& ctx)
{
    double const s = scale.evaluate(ctx);
    auto const l = scaled_round(lo.evaluate(ctx), s);
    auto const h = scaled_round(hi.evaluate(ctx), s);
    return {l, std::max(l, h)};
}

} // namespace mlcspace
