#include "pistab/poly_parser.hpp"

#include <cctype>
#include <cmath>

namespace pistab {

double evaluate_double(const PolyQ& p, double s, double eta, double theta) {
    double acc = 0.0;
    const double vals[3] = {s, eta, theta};
    for (const auto& [e, c] : p.terms()) {
        double m = to_double(c);
        for (int vi = 0; vi < 3; ++vi)
            for (int k = 0; k < e[vi]; ++k) m *= vals[vi];
        acc += m;
    }
    return acc;
}

std::string to_string(const PolyQ& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
        Rational a = c;
        bool neg = a < 0;
        if (neg) a = -a;
        if (first) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        first = false;
        bool has_vars = e[0] + e[1] + e[2] > 0;
        bool unit = (a == 1);
        if (!unit || !has_vars) out += to_string(a);
        bool printed = !unit || !has_vars;
        for (int vi = 0; vi < 3; ++vi) {
            if (e[vi] == 0) continue;
            if (printed) out += "*";
            out += var_name(static_cast<Var>(vi));
            if (e[vi] > 1) out += "^" + std::to_string(e[vi]);
            printed = true;
        }
    }
    return out;
}

namespace {

struct Lexer {
    const std::string& text;
    size_t pos = 0;

    explicit Lexer(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    char take() {
        char c = peek();
        if (pos < text.size()) ++pos;
        return c;
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw ParseError("polynomial parse error at position " + std::to_string(pos) + " in '" + text +
                         "': " + what);
    }
};

struct Parser {
    Lexer lex;
    const PolyGrammar& grammar;

    Parser(const std::string& t, const PolyGrammar& g) : lex(t), grammar(g) {}

    PolyQ parse() {
        PolyQ p = expr();
        if (lex.peek() != '\0') lex.fail("trailing input");
        return p;
    }

    PolyQ expr() {
        PolyQ p = lex.accept('-') ? -term() : (lex.accept('+'), term());
        for (;;) {
            if (lex.accept('+'))
                p += term();
            else if (lex.accept('-'))
                p -= term();
            else
                return p;
        }
    }

    PolyQ term() {
        PolyQ p = factor();
        while (lex.accept('*')) p = p * factor();
        return p;
    }

    PolyQ factor() {
        PolyQ base = primary();
        if (lex.accept('^')) {
            int e = integer();
            PolyQ r(Rational(1));
            for (int k = 0; k < e; ++k) r = r * base;
            return r;
        }
        return base;
    }

    PolyQ primary() {
        char c = lex.peek();
        if (c == '(') {
            lex.take();
            PolyQ p = expr();
            if (!lex.accept(')')) lex.fail("expected ')'");
            return p;
        }
        if (c == '-') {
            lex.take();
            return -factor();
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        lex.fail("expected number, variable or '('");
    }

    int integer() {
        lex.skip_ws();
        size_t start = lex.pos;
        while (lex.pos < lex.text.size() && std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
            ++lex.pos;
        if (lex.pos == start) lex.fail("expected integer exponent");
        return std::stoi(lex.text.substr(start, lex.pos - start));
    }

    PolyQ number() {
        lex.skip_ws();
        size_t start = lex.pos;
        auto digits = [&] {
            while (lex.pos < lex.text.size() && std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
                ++lex.pos;
        };
        digits();
        if (lex.pos < lex.text.size() && lex.text[lex.pos] == '.') {
            ++lex.pos;
            digits();
        }
        if (lex.pos < lex.text.size() && (lex.text[lex.pos] == 'e' || lex.text[lex.pos] == 'E')) {
            size_t mark = lex.pos;
            ++lex.pos;
            if (lex.pos < lex.text.size() && (lex.text[lex.pos] == '+' || lex.text[lex.pos] == '-')) ++lex.pos;
            size_t ds = lex.pos;
            digits();
            if (lex.pos == ds) lex.pos = mark;  // not an exponent, e.g. "2*eta"
        }
        Rational value = rational_from_string(lex.text.substr(start, lex.pos - start));
        // fraction written inline: 1/3
        size_t save = lex.pos;
        lex.skip_ws();
        if (lex.pos < lex.text.size() && lex.text[lex.pos] == '/') {
            ++lex.pos;
            lex.skip_ws();
            size_t dstart = lex.pos;
            digits();
            if (lex.pos < lex.text.size() && lex.text[lex.pos] == '.') {
                ++lex.pos;
                digits();
            }
            if (lex.pos == dstart) lex.fail("expected denominator");
            Rational den = rational_from_string(lex.text.substr(dstart, lex.pos - dstart));
            if (den == 0) lex.fail("zero denominator");
            value /= den;
        } else {
            lex.pos = save;
        }
        return PolyQ(value);
    }

    PolyQ identifier() {
        lex.skip_ws();
        size_t start = lex.pos;
        while (lex.pos < lex.text.size() &&
               (std::isalnum(static_cast<unsigned char>(lex.text[lex.pos])) || lex.text[lex.pos] == '_'))
            ++lex.pos;
        std::string name = lex.text.substr(start, lex.pos - start);
        if (auto it = grammar.variables.find(name); it != grammar.variables.end())
            return PolyQ::variable(it->second);
        if (auto it = grammar.parameters.find(name); it != grammar.parameters.end())
            return PolyQ(it->second);
        lex.fail("unknown identifier '" + name + "'");
    }
};

}  // namespace

PolyQ parse_poly(const std::string& text, const PolyGrammar& grammar) {
    return Parser(text, grammar).parse();
}

}  // namespace pistab
