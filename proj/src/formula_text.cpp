// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <cctype>

#include "eta/errors.hpp"
#include "eta/formula.hpp"

namespace eta {

namespace {

enum class Tok { end, number, ident, op };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    std::size_t pos = 0;
};

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            std::size_t j = i;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) {
                ++j;
            }
            t.kind = Tok::number;
            t.text = std::string(s.substr(i, j - i));
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\'')) {
                ++j;
            }
            t.kind = Tok::ident;
            t.text = std::string(s.substr(i, j - i));
            i = j;
        } else {
            t.kind = Tok::op;
            const std::string_view two = s.substr(i, 2);
            if (two == "<=" || two == ">=" || two == "==") {
                t.text = std::string(two);
                i += 2;
            } else if (std::string_view("&|!().+-*/<>=,").find(c) != std::string_view::npos) {
                t.text = std::string(1, c);
                ++i;
            } else {
                throw InputError("unexpected character '" + std::string(1, c) + "' at column " +
                                 std::to_string(i + 1));
            }
        }
        out.push_back(std::move(t));
    }
    Token e;
    e.pos = s.size();
    out.push_back(e);
    return out;
}

class Parser {
  public:
    Parser(std::string_view text, const ParseOptions& options) : toks_(lex(text)), options_(options) {}

    Formula formula_at_end() {
        Formula f = formula();
        if (peek().kind != Tok::end) {
            fail("unexpected '" + peek().text + "'");
        }
        return f;
    }

    LinearTerm term_at_end() {
        LinearTerm t = expr();
        if (peek().kind != Tok::end) {
            fail("unexpected '" + peek().text + "'");
        }
        return t;
    }

  private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool is_op(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::op && peek(k).text == s; }
    bool accept(const char* s) {
        if (is_op(s)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(const char* s) {
        if (!accept(s)) {
            fail(std::string("expected '") + s + "'");
        }
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError("formula syntax error at column " + std::to_string(peek().pos + 1) + ": " + msg);
    }

    bool at_quantifier() const {
        return peek().kind == Tok::ident && (peek().text == "E" || peek().text == "A") &&
               peek(1).kind == Tok::ident && is_op(".", 2);
    }

    Formula formula() {
        std::vector<Formula> parts{conjunction()};
        while (accept("|")) {
            parts.push_back(conjunction());
        }
        return Formula::disj(std::move(parts));
    }

    Formula conjunction() {
        std::vector<Formula> parts{unary()};
        while (accept("&")) {
            parts.push_back(unary());
        }
        return Formula::conj(std::move(parts));
    }

    Formula unary() {
        if (accept("!")) {
            return Formula::negation(unary());
        }
        if (at_quantifier()) {
            const bool ex = peek().text == "E";
            Variable v(peek(1).text);
            pos_ += 3;
            Formula body = formula();
            return ex ? Formula::exists(v, body) : Formula::forall(v, body);
        }
        if (peek().kind == Tok::ident && (peek().text == "true" || peek().text == "false")) {
            const bool value = peek().text == "true";
            ++pos_;
            return value ? Formula::top() : Formula::bottom();
        }
        if (is_op("(")) {
            const std::size_t save = pos_;
            try {
                ++pos_;
                Formula f = formula();
                expect(")");
                if (!starts_comparison_tail()) {
                    return f;
                }
            } catch (const InputError&) {
            }
            pos_ = save;
        }
        return comparison();
    }

    bool starts_comparison_tail() const {
        for (const char* s : {"<=", ">=", "<", ">", "=", "==", "+", "-", "*", "/"}) {
            if (is_op(s)) {
                return true;
            }
        }
        return false;
    }

    std::optional<std::string> relop() {
        for (const char* s : {"<=", ">=", "<", ">", "==", "="}) {
            if (is_op(s)) {
                ++pos_;
                return std::string(s);
            }
        }
        return std::nullopt;
    }

    Formula comparison() {
        LinearTerm lhs = expr();
        auto op = relop();
        if (!op) {
            fail("expected a comparison operator");
        }
        std::vector<Formula> parts;
        while (op) {
            if ((*op == "<" || *op == ">") && !options_.allow_strict) {
                fail("strict comparisons are not supported");
            }
            LinearTerm rhs = expr();
            if (*op == "<=") {
                parts.emplace_back(Atom::le(lhs, rhs));
            } else if (*op == ">=") {
                parts.emplace_back(Atom::ge(lhs, rhs));
            } else if (*op == "<") {
                parts.emplace_back(Atom::lt(lhs, rhs));
            } else if (*op == ">") {
                parts.emplace_back(Atom::lt(rhs, lhs));
            } else {
                parts.emplace_back(Atom::eq(lhs, rhs));
            }
            lhs = rhs;
            op = relop();
        }
        return Formula::conj(std::move(parts));
    }

    LinearTerm expr() {
        LinearTerm t = product();
        for (;;) {
            if (accept("+")) {
                t += product();
            } else if (accept("-")) {
                t -= product();
            } else {
                return t;
            }
        }
    }

    LinearTerm product() {
        if (accept("-")) {
            return -product();
        }
        if (accept("+")) {
            return product();
        }
        LinearTerm t = factor();
        for (;;) {
            if (accept("*")) {
                LinearTerm u = factor();
                if (t.is_constant()) {
                    t = u * t.constant();
                } else if (u.is_constant()) {
                    t *= u.constant();
                } else {
                    fail("nonlinear product");
                }
            } else if (accept("/")) {
                LinearTerm u = factor();
                if (!u.is_constant() || u.constant().is_zero()) {
                    fail("division by a non-constant or zero");
                }
                t *= Rational(1) / u.constant();
            } else {
                return t;
            }
        }
    }

    LinearTerm factor() {
        const Token& t = peek();
        if (t.kind == Tok::number) {
            ++pos_;
            auto r = Rational::try_parse(t.text);
            if (!r) {
                fail("bad number '" + t.text + "'");
            }
            return LinearTerm(*r);
        }
        if (t.kind == Tok::ident) {
            ++pos_;
            return LinearTerm(Variable(t.text));
        }
        if (accept("(")) {
            LinearTerm e = expr();
            expect(")");
            return e;
        }
        if (accept("-")) {
            return -factor();
        }
        fail(t.kind == Tok::end ? "unexpected end of input" : "unexpected '" + t.text + "'");
    }

    std::vector<Token> toks_;
    ParseOptions options_;
    std::size_t pos_ = 0;
};

std::string print(const Formula& f);

std::string wrap(const Formula& f, bool parent_is_and) {
    const auto k = f.kind();
    const bool paren = k == Formula::Kind::exists || k == Formula::Kind::forall ||
                       (parent_is_and && k == Formula::Kind::disj);
    return paren ? "(" + print(f) + ")" : print(f);
}

std::string print(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::truth: return "true";
    case K::falsity: return "false";
    case K::atom: return f.atom().to_string();
    case K::conj:
    case K::disj: {
        const bool is_and = f.kind() == K::conj;
        std::string out;
        for (const auto& c : f.children()) {
            if (!out.empty()) {
                out += is_and ? " & " : " | ";
            }
            out += wrap(c, is_and);
        }
        return out;
    }
    case K::neg: {
        const auto ck = f.body().kind();
        if (ck == K::atom || ck == K::truth || ck == K::falsity || ck == K::neg) {
            return "!" + (ck == K::atom ? "(" + print(f.body()) + ")" : print(f.body()));
        }
        return "!(" + print(f.body()) + ")";
    }
    case K::exists:
    case K::forall:
        return std::string(f.kind() == K::exists ? "E " : "A ") + f.bound().name + ". " + print(f.body());
    }
    return "";
}

} // namespace

std::string Formula::to_string() const { return print(*this); }

Formula parse_formula(std::string_view text, const ParseOptions& options) {
    return Parser(text, options).formula_at_end();
}

LinearTerm parse_term(std::string_view text) { return Parser(text, {}).term_at_end(); }

} // namespace eta
