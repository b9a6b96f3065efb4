#include "cbat/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <set>

namespace cbat {

// ---------------------------------------------------------------------------
// lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok : uint8_t { Ident, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceSpan span;
};

const char* kPuncts[] = {"<->", "->", "||", ":=", "==", "<=", ">=", "{", "}",
                         "(",   ")", ",", ";", ".",  ":",  "=",  "<", ">",
                         "!",   "&", "|", "*", "/",  "?",  "-",  "+", "[", "]"};

bool is_ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum((unsigned char)c) || c == '_'; }

std::vector<Token> lex(std::string_view text, const std::string& file) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto bump = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (text[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            bump(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') bump(1);
            continue;
        }
        SourceSpan span{file, line, col, 1};
        if (is_ident_start(c)) {
            size_t j = i;
            while (j < text.size() && is_ident_char(text[j])) ++j;
            span.length = (int)(j - i);
            out.push_back(Token{Tok::Ident, std::string(text.substr(i, j - i)), span});
            bump(j - i);
            continue;
        }
        if (std::isdigit((unsigned char)c)) {
            size_t j = i;
            while (j < text.size() && std::isdigit((unsigned char)text[j])) ++j;
            span.length = (int)(j - i);
            out.push_back(Token{Tok::Number, std::string(text.substr(i, j - i)), span});
            bump(j - i);
            continue;
        }
        bool matched = false;
        for (const char* p : kPuncts) {
            size_t len = std::strlen(p);
            if (text.substr(i, len) == p) {
                span.length = (int)len;
                out.push_back(Token{Tok::Punct, p, span});
                bump(len);
                matched = true;
                break;
            }
        }
        if (!matched)
            throw ParseError(std::string("unexpected character '") + c + "'", span);
    }
    out.push_back(Token{Tok::End, "", SourceSpan{file, line, col, 0}});
    return out;
}

const std::set<std::string> kReserved = {
    "a",    "wait",     "bat",    "general", "objects", "rigids",  "actions",
    "fluents", "clocks", "numerics", "init",  "poss",    "ssa",     "reset",
    "nssa", "case",     "true",   "false",   "exists",  "forall",  "test",
    "pick", "nil",      "while",  "do",      "done",    "if",      "then",
    "else", "fi"};

// ---------------------------------------------------------------------------
// token cursor
// ---------------------------------------------------------------------------

struct Cursor {
    std::vector<Token> tokens;
    size_t pos = 0;

    const Token& peek(size_t ahead = 0) const {
        size_t p = pos + ahead;
        return p < tokens.size() ? tokens[p] : tokens.back();
    }
    const Token& next() {
        const Token& t = peek();
        if (t.kind != Tok::End) ++pos;
        return t;
    }
    bool at_punct(const char* p, size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Punct && t.text == p;
    }
    bool at_ident(const char* name, size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Ident && t.text == name;
    }
    bool eat_punct(const char* p) {
        if (!at_punct(p)) return false;
        ++pos;
        return true;
    }
    bool eat_ident(const char* name) {
        if (!at_ident(name)) return false;
        ++pos;
        return true;
    }
    void expect_punct(const char* p) {
        if (!eat_punct(p))
            throw ParseError(std::string("expected '") + p + "', found '" +
                                 peek().text + "'",
                             peek().span);
    }
    std::string expect_ident(const char* what) {
        const Token& t = peek();
        if (t.kind != Tok::Ident)
            throw ParseError(std::string("expected ") + what + ", found '" + t.text + "'",
                             t.span);
        ++pos;
        return t.text;
    }
    std::string expect_name(const char* what) {
        const Token& t = peek();
        std::string name = expect_ident(what);
        if (kReserved.count(name))
            throw ParseError("'" + name + "' is reserved", t.span);
        return name;
    }
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, peek().span);
    }
};

Rat parse_rational(Cursor& cur, bool allow_negative) {
    bool neg = false;
    if (cur.at_punct("-")) {
        if (!allow_negative) cur.fail("negative constant not allowed here");
        cur.next();
        neg = true;
    }
    const Token& numTok = cur.peek();
    if (numTok.kind != Tok::Number) cur.fail("expected a number");
    cur.next();
    std::string text = numTok.text;
    if (cur.at_punct("/")) {
        cur.next();
        const Token& den = cur.peek();
        if (den.kind != Tok::Number) cur.fail("expected denominator");
        cur.next();
        text += "/" + den.text;
    } else if (cur.at_punct(".")) {
        // Decimal literals are rejected with a hint; exact rationals only.
        throw ParseError("decimal literals are not supported, write p/q", numTok.span);
    }
    auto q = rat_parse((neg ? "-" : "") + text);
    if (!q) throw ParseError("malformed rational '" + text + "'", numTok.span);
    return *q;
}

// ---------------------------------------------------------------------------
// formula parsing
// ---------------------------------------------------------------------------

struct FormulaCtx {
    const BAT* bat;
    std::vector<std::string> scope;  // bound variables (params, quantifiers, picks)
    bool allow_act_eq = false;
    bool natural_bounds = true;

    bool bound(const std::string& name) const {
        return std::find(scope.begin(), scope.end(), name) != scope.end();
    }
};

Formula parse_formula_expr(Cursor& cur, FormulaCtx& ctx);

Term parse_term(Cursor& cur, FormulaCtx& ctx) {
    const Token& t = cur.peek();
    std::string name = cur.expect_ident("a term");
    if (kReserved.count(name))
        throw ParseError("'" + name + "' is reserved", t.span);
    if (ctx.bound(name)) return Term::make_var(name);
    int32_t obj = ctx.bat->object_index(name);
    if (obj < 0) throw ParseError("unknown symbol '" + name + "'", t.span);
    return Term::make_obj(obj);
}

std::vector<Term> parse_term_list(Cursor& cur, FormulaCtx& ctx) {
    std::vector<Term> args;
    cur.expect_punct("(");
    if (!cur.at_punct(")")) {
        args.push_back(parse_term(cur, ctx));
        while (cur.eat_punct(",")) args.push_back(parse_term(cur, ctx));
    }
    cur.expect_punct(")");
    return args;
}

std::optional<CmpOp> peek_cmp_op(Cursor& cur) {
    if (cur.at_punct("<=")) return CmpOp::Le;
    if (cur.at_punct(">=")) return CmpOp::Ge;
    if (cur.at_punct("<")) return CmpOp::Lt;
    if (cur.at_punct(">")) return CmpOp::Gt;
    if (cur.at_punct("==") || cur.at_punct("=")) return CmpOp::Eq;
    return std::nullopt;
}

Formula parse_atom(Cursor& cur, FormulaCtx& ctx) {
    const BAT& bat = *ctx.bat;
    const Token& tok = cur.peek();

    if (cur.eat_ident("true")) return Formula::truth(true).with_span(tok.span);
    if (cur.eat_ident("false")) return Formula::truth(false).with_span(tok.span);
    if (cur.eat_punct("(")) {
        Formula inner = parse_formula_expr(cur, ctx);
        cur.expect_punct(")");
        return inner;
    }

    // Ground arithmetic comparison v ~ v' folds immediately.
    if (tok.kind == Tok::Number || cur.at_punct("-")) {
        Rat lhs = parse_rational(cur, !ctx.natural_bounds);
        auto op = peek_cmp_op(cur);
        if (!op) cur.fail("expected a comparison operator");
        cur.next();
        Rat rhs = parse_rational(cur, !ctx.natural_bounds);
        return Formula::truth(cmp_eval(lhs, *op, rhs)).with_span(tok.span);
    }

    // Action equality: a == A(args) (wait takes no arguments).
    if (cur.at_ident("a")) {
        if (!ctx.allow_act_eq)
            throw ParseError("action equality is only allowed in SSA and reset bodies",
                             tok.span);
        cur.next();
        if (!cur.eat_punct("==") && !cur.eat_punct("="))
            cur.fail("expected '==' after 'a'");
        const Token& nameTok = cur.peek();
        if (cur.eat_ident("wait")) {
            if (cur.eat_punct("(")) cur.expect_punct(")");
            return Formula::act_eq(bat.wait_schema, {}).with_span(tok.span);
        }
        std::string name = cur.expect_ident("an action name");
        int32_t schema = bat.schema_index(name);
        if (schema < 0 || bat.schemas[schema].is_wait)
            throw ParseError("unknown action '" + name + "'", nameTok.span);
        std::vector<Term> args = parse_term_list(cur, ctx);
        if ((int)args.size() != bat.schemas[schema].arity)
            throw ParseError("arity mismatch for action '" + name + "'", nameTok.span);
        return Formula::act_eq(schema, std::move(args)).with_span(tok.span);
    }

    if (tok.kind != Tok::Ident) cur.fail("expected an atom");
    std::string name = tok.text;
    if (kReserved.count(name))
        throw ParseError("'" + name + "' is reserved", tok.span);
    cur.next();

    if (cur.at_punct("(")) {
        std::vector<Term> args = parse_term_list(cur, ctx);
        auto arity_check = [&](int declared) {
            if ((int)args.size() != declared)
                throw ParseError("arity mismatch for '" + name + "'", tok.span);
        };
        if (int32_t func = bat.func_index(name); func >= 0) {
            arity_check(bat.funcs[func].arity);
            auto op = peek_cmp_op(cur);
            if (!op)
                throw ParseError("clock term '" + name +
                                     "' must be compared to a constant",
                                 tok.span);
            cur.next();
            const Token& boundTok = cur.peek();
            Rat bound = parse_rational(cur, !ctx.natural_bounds);
            if (ctx.natural_bounds && !rat_is_natural(bound))
                throw ParseError("clock bound must be a natural number", boundTok.span);
            return Formula::fn_cmp(func, std::move(args), *op, std::move(bound))
                .with_span(tok.span);
        }
        Formula atom;
        if (int32_t fl = bat.fluent_index(name); fl >= 0) {
            arity_check(bat.fluents[fl].arity);
            atom = Formula::rel(fl, std::move(args));
        } else if (int32_t rg = bat.rigid_index(name); rg >= 0) {
            arity_check(bat.rigids[rg].arity);
            atom = Formula::rigid(rg, std::move(args));
        } else {
            throw ParseError("unknown predicate '" + name + "'", tok.span);
        }
        if (peek_cmp_op(cur))
            throw ParseError("only clocks may be compared to constants", cur.peek().span);
        return atom.with_span(tok.span);
    }

    // Bare identifier: object equality t1 == t2.
    Term lhs;
    if (ctx.bound(name)) {
        lhs = Term::make_var(name);
    } else if (int32_t obj = bat.object_index(name); obj >= 0) {
        lhs = Term::make_obj(obj);
    } else {
        throw ParseError("unknown symbol '" + name + "'", tok.span);
    }
    if (!cur.eat_punct("==") && !cur.eat_punct("="))
        cur.fail("expected '==' after a term");
    Term rhs = parse_term(cur, ctx);
    return Formula::obj_eq(std::move(lhs), std::move(rhs)).with_span(tok.span);
}

Formula parse_unary(Cursor& cur, FormulaCtx& ctx) {
    const Token& tok = cur.peek();
    if (cur.eat_punct("!"))
        return Formula::lnot(parse_unary(cur, ctx)).with_span(tok.span);
    if (cur.at_ident("exists") || cur.at_ident("forall")) {
        bool ex = tok.text == "exists";
        cur.next();
        std::string var = cur.expect_name("a variable");
        cur.expect_punct(".");
        ctx.scope.push_back(var);
        Formula body = parse_formula_expr(cur, ctx);
        ctx.scope.pop_back();
        return (ex ? Formula::exists(var, std::move(body))
                   : Formula::forall(var, std::move(body)))
            .with_span(tok.span);
    }
    return parse_atom(cur, ctx);
}

Formula parse_and(Cursor& cur, FormulaCtx& ctx) {
    Formula f = parse_unary(cur, ctx);
    while (cur.at_punct("&")) {
        cur.next();
        f = Formula::land(std::move(f), parse_unary(cur, ctx));
    }
    return f;
}

Formula parse_or(Cursor& cur, FormulaCtx& ctx) {
    Formula f = parse_and(cur, ctx);
    while (cur.at_punct("|") && !cur.at_punct("||")) {
        cur.next();
        f = Formula::lor(std::move(f), parse_and(cur, ctx));
    }
    return f;
}

Formula parse_implies(Cursor& cur, FormulaCtx& ctx) {
    Formula f = parse_or(cur, ctx);
    if (cur.eat_punct("->"))
        return Formula::implies(std::move(f), parse_implies(cur, ctx));  // right-assoc
    return f;
}

Formula parse_formula_expr(Cursor& cur, FormulaCtx& ctx) {
    Formula f = parse_implies(cur, ctx);
    while (cur.eat_punct("<->"))
        f = Formula::equiv(std::move(f), parse_implies(cur, ctx));
    return f;
}

// ---------------------------------------------------------------------------
// theory parsing
// ---------------------------------------------------------------------------

struct Decl {
    std::string name;
    int arity;
    SourceSpan span;
};

std::vector<Decl> parse_decl_list(Cursor& cur, bool with_arity) {
    std::vector<Decl> out;
    cur.expect_punct("{");
    if (!cur.at_punct("}")) {
        do {
            const Token& tok = cur.peek();
            std::string name = cur.expect_name("a declaration");
            int arity = 0;
            if (with_arity) {
                cur.expect_punct("/");
                const Token& num = cur.peek();
                if (num.kind != Tok::Number) cur.fail("expected an arity");
                cur.next();
                arity = std::stoi(num.text);
            }
            out.push_back(Decl{std::move(name), arity, tok.span});
        } while (cur.eat_punct(","));
    }
    cur.expect_punct("}");
    return out;
}

std::vector<std::string> parse_params(Cursor& cur) {
    std::vector<std::string> params;
    cur.expect_punct("(");
    if (!cur.at_punct(")")) {
        do {
            params.push_back(cur.expect_name("a parameter"));
        } while (cur.eat_punct(","));
    }
    cur.expect_punct(")");
    for (size_t i = 0; i < params.size(); ++i)
        for (size_t j = i + 1; j < params.size(); ++j)
            if (params[i] == params[j])
                cur.fail("duplicate parameter '" + params[i] + "'");
    return params;
}

NumCase parse_num_case(Cursor& cur, FormulaCtx& ctx, int32_t func) {
    const BAT& bat = *ctx.bat;
    if (!cur.eat_ident("case")) cur.fail("expected 'case'");
    Formula cond = parse_formula_expr(cur, ctx);
    cur.expect_punct(":");
    NumCase out;
    out.cond = std::move(cond);
    const Token& tok = cur.peek();
    if (tok.kind == Tok::Number) {
        // constant forms: "2 * f()" or a plain constant
        Rat value = parse_rational(cur, false);
        if (cur.eat_punct("*")) {
            std::string name = cur.expect_ident("a numeric fluent");
            if (bat.func_index(name) != func || value != 2)
                throw ParseError("only '2 * " + bat.funcs[func].name +
                                     "()' is supported here",
                                 tok.span);
            cur.expect_punct("(");
            cur.expect_punct(")");
            out.update = NumUpdateKind::Double;
        } else {
            out.update = NumUpdateKind::Const;
            out.value = std::move(value);
        }
        cur.expect_punct(";");
        return out;
    }
    std::string name = cur.expect_ident("a numeric fluent");
    if (bat.func_index(name) != func)
        throw ParseError("update must mention the axiom's own fluent", tok.span);
    cur.expect_punct("(");
    cur.expect_punct(")");
    if (cur.eat_punct("+")) {
        const Token& one = cur.peek();
        if (parse_rational(cur, false) != 1)
            throw ParseError("only +1 updates are supported", one.span);
        out.update = NumUpdateKind::AddOne;
    } else if (cur.eat_punct("-")) {
        const Token& one = cur.peek();
        if (parse_rational(cur, false) != 1)
            throw ParseError("only -1 updates are supported", one.span);
        out.update = NumUpdateKind::SubOne;
    } else if (cur.eat_punct("/")) {
        const Token& two = cur.peek();
        if (parse_rational(cur, false) != 2)
            throw ParseError("only /2 updates are supported", two.span);
        out.update = NumUpdateKind::Half;
    } else {
        out.update = NumUpdateKind::Keep;
    }
    cur.expect_punct(";");
    return out;
}

BAT parse_bat_impl(Cursor& cur) {
    BAT bat;
    if (cur.eat_ident("general")) {
        cur.expect_punct(":");
        if (!cur.eat_ident("true")) cur.fail("expected 'true' after 'general:'");
        bat.general = true;
    }
    if (!cur.eat_ident("bat")) cur.fail("expected 'bat'");
    if (cur.peek().kind == Tok::Ident && !kReserved.count(cur.peek().text))
        bat.name = cur.next().text;
    cur.expect_punct("{");

    bool saw_objects = false, saw_actions = false;

    // First pass collects declarations so axiom bodies can resolve symbols.
    struct PendingAxiom {
        std::string kind;  // poss | ssa | reset | nssa
        std::string name;
        SourceSpan span;
        std::vector<std::string> params;
        size_t token_pos;  // body start
    };
    std::vector<PendingAxiom> axioms;
    std::vector<std::pair<std::string, SourceSpan>> init_atoms_raw;  // re-parsed later
    size_t init_pos = SIZE_MAX;

    while (!cur.at_punct("}")) {
        const Token& tok = cur.peek();
        if (cur.eat_ident("objects")) {
            saw_objects = true;
            for (auto& d : parse_decl_list(cur, false))
                bat.objects.push_back(ObjectConst{d.name});
        } else if (cur.eat_ident("rigids")) {
            for (auto& d : parse_decl_list(cur, true))
                bat.rigids.push_back(PredDecl{d.name, d.arity});
        } else if (cur.eat_ident("actions")) {
            saw_actions = true;
            for (auto& d : parse_decl_list(cur, true))
                bat.schemas.push_back(ActionSchema{d.name, d.arity, false});
        } else if (cur.eat_ident("fluents")) {
            for (auto& d : parse_decl_list(cur, true))
                bat.fluents.push_back(PredDecl{d.name, d.arity});
        } else if (cur.eat_ident("clocks")) {
            if (bat.general)
                throw ParseError("general theories declare numerics, not clocks",
                                 tok.span);
            for (auto& d : parse_decl_list(cur, true))
                bat.funcs.push_back(FuncDecl{d.name, d.arity});
        } else if (cur.eat_ident("numerics")) {
            if (!bat.general)
                throw ParseError("numerics require the 'general: true' header", tok.span);
            for (auto& d : parse_decl_list(cur, true))
                bat.funcs.push_back(FuncDecl{d.name, d.arity});
        } else if (cur.at_ident("init")) {
            cur.next();
            init_pos = cur.pos;
            // skip the block; entries are parsed after declarations are known
            cur.expect_punct("{");
            int depth = 1;
            while (depth > 0) {
                if (cur.peek().kind == Tok::End) cur.fail("unterminated init block");
                if (cur.at_punct("{")) ++depth;
                if (cur.at_punct("}")) --depth;
                cur.next();
            }
        } else if (cur.at_ident("poss") || cur.at_ident("ssa") || cur.at_ident("reset") ||
                   cur.at_ident("nssa")) {
            PendingAxiom ax;
            ax.kind = cur.next().text;
            ax.span = cur.peek().span;
            ax.name = cur.expect_ident("a symbol");
            ax.params = parse_params(cur);
            cur.expect_punct(":=");
            ax.token_pos = cur.pos;
            // skip to the closing ';' of the axiom (nssa bodies carry braces)
            int depth = 0;
            while (!(depth == 0 && cur.at_punct(";"))) {
                if (cur.peek().kind == Tok::End) cur.fail("unterminated axiom body");
                if (cur.at_punct("{")) ++depth;
                if (cur.at_punct("}")) --depth;
                cur.next();
            }
            cur.next();  // ';'
            axioms.push_back(std::move(ax));
        } else {
            cur.fail("expected a section (objects, actions, fluents, clocks, init, "
                     "poss, ssa, reset)");
        }
    }
    cur.expect_punct("}");
    if (cur.peek().kind != Tok::End) cur.fail("trailing input after theory");
    if (!saw_objects) cur.fail("missing objects block");
    if (!saw_actions) cur.fail("missing actions block");

    // wait is implicit.
    bat.wait_schema = (int32_t)bat.schemas.size();
    bat.schemas.push_back(ActionSchema{"wait", 0, true});

    // Cross-namespace duplicate checks happen in validate_bat; here only the
    // per-namespace ones that break symbol resolution.
    auto dup_guard = [&](const auto& decls, const char* what) {
        std::set<std::string> seen;
        for (const auto& d : decls)
            if (!seen.insert(d.name).second)
                throw ParseError(std::string("duplicate ") + what + " '" + d.name + "'",
                                 SourceSpan{});
    };
    dup_guard(bat.objects, "object");
    dup_guard(bat.schemas, "action");
    dup_guard(bat.fluents, "fluent");
    dup_guard(bat.rigids, "rigid");
    dup_guard(bat.funcs, "functional fluent");

    bat.init_fluents.assign(bat.num_fluent_atoms(), false);
    bat.init_rigids.assign(bat.num_rigid_atoms(), false);
    bat.init_funcs.assign(bat.num_func_terms(), Rat(0));
    bat.preconditions.resize(bat.schemas.size());
    bat.precond_params.resize(bat.schemas.size());
    bat.preconditions[bat.wait_schema] = Formula::truth(true);
    bat.ssas.resize(bat.fluents.size());
    bat.ssa_params.resize(bat.fluents.size());
    bat.resets.resize(bat.funcs.size());
    bat.reset_params.resize(bat.funcs.size());
    bat.num_ssas.resize(bat.funcs.size());

    // init block
    if (init_pos != SIZE_MAX) {
        Cursor ic{cur.tokens, init_pos};
        ic.expect_punct("{");
        FormulaCtx ctx{&bat, {}, false, !bat.general};
        while (!ic.at_punct("}")) {
            const Token& tok = ic.peek();
            std::string name = ic.expect_name("a ground atom");
            std::vector<Term> terms = parse_term_list(ic, ctx);
            std::vector<int32_t> args;
            for (const auto& t : terms) args.push_back(t.obj);  // ground by context
            if (ic.eat_punct("=") || ic.eat_punct("==")) {
                int32_t func = bat.func_index(name);
                if (func < 0) throw ParseError("unknown numeric fluent '" + name + "'",
                                               tok.span);
                if (!bat.general)
                    throw ParseError("clocks are implicitly zero in the initial "
                                     "situation",
                                     tok.span);
                if ((int)args.size() != bat.funcs[func].arity)
                    throw ParseError("arity mismatch for '" + name + "'", tok.span);
                bat.init_funcs[bat.func_term_index(func, args)] =
                    parse_rational(ic, true);
            } else if (int32_t fl = bat.fluent_index(name); fl >= 0) {
                if ((int)args.size() != bat.fluents[fl].arity)
                    throw ParseError("arity mismatch for '" + name + "'", tok.span);
                bat.init_fluents[bat.fluent_atom_index(fl, args)] = true;
            } else if (int32_t rg = bat.rigid_index(name); rg >= 0) {
                if ((int)args.size() != bat.rigids[rg].arity)
                    throw ParseError("arity mismatch for '" + name + "'", tok.span);
                bat.init_rigids[bat.rigid_atom_index(rg, args)] = true;
            } else {
                throw ParseError("unknown predicate '" + name + "'", tok.span);
            }
            if (!ic.eat_punct(";")) ic.eat_punct(",");
        }
    }

    // axiom bodies
    for (const auto& ax : axioms) {
        Cursor ac{cur.tokens, ax.token_pos};
        FormulaCtx ctx{&bat, ax.params, ax.kind != "poss", !bat.general};
        if (ax.kind == "poss") {
            int32_t schema = bat.schema_index(ax.name);
            if (schema < 0)
                throw ParseError("unknown action '" + ax.name + "'", ax.span);
            if (schema == bat.wait_schema)
                throw ParseError("the wait precondition is fixed", ax.span);
            if (bat.preconditions[schema].valid())
                throw ParseError("duplicate precondition for '" + ax.name + "'", ax.span);
            if ((int)ax.params.size() != bat.schemas[schema].arity)
                throw ParseError("parameter count differs from arity of '" + ax.name + "'",
                                 ax.span);
            bat.preconditions[schema] = parse_formula_expr(ac, ctx);
            bat.precond_params[schema] = ax.params;
        } else if (ax.kind == "ssa") {
            int32_t fl = bat.fluent_index(ax.name);
            if (fl < 0) throw ParseError("unknown fluent '" + ax.name + "'", ax.span);
            if (bat.ssas[fl].valid())
                throw ParseError("duplicate SSA for '" + ax.name + "'", ax.span);
            if ((int)ax.params.size() != bat.fluents[fl].arity)
                throw ParseError("parameter count differs from arity of '" + ax.name + "'",
                                 ax.span);
            bat.ssas[fl] = parse_formula_expr(ac, ctx);
            bat.ssa_params[fl] = ax.params;
        } else if (ax.kind == "reset") {
            if (bat.general)
                throw ParseError("general theories use nssa, not reset", ax.span);
            int32_t func = bat.func_index(ax.name);
            if (func < 0) throw ParseError("unknown clock '" + ax.name + "'", ax.span);
            if (bat.resets[func].valid())
                throw ParseError("duplicate reset for '" + ax.name + "'", ax.span);
            if ((int)ax.params.size() != bat.funcs[func].arity)
                throw ParseError("parameter count differs from arity of '" + ax.name + "'",
                                 ax.span);
            bat.resets[func] = parse_formula_expr(ac, ctx);
            bat.reset_params[func] = ax.params;
        } else {  // nssa
            if (!bat.general)
                throw ParseError("nssa requires the 'general: true' header", ax.span);
            int32_t func = bat.func_index(ax.name);
            if (func < 0)
                throw ParseError("unknown numeric fluent '" + ax.name + "'", ax.span);
            if (!ax.params.empty())
                throw ParseError("numeric fluents are parameterless here", ax.span);
            ac.expect_punct("{");
            NumSSA ssa;
            while (!ac.at_punct("}")) ssa.cases.push_back(parse_num_case(ac, ctx, func));
            ac.expect_punct("}");
            bat.num_ssas[func] = std::move(ssa);
        }
    }

    return bat;
}

}  // namespace

BAT parse_bat(std::string_view text, const std::string& filename) {
    Cursor cur{lex(text, filename), 0};
    return parse_bat_impl(cur);
}

Formula parse_formula(std::string_view text, const BAT& bat,
                      const std::string& filename) {
    Cursor cur{lex(text, filename), 0};
    FormulaCtx ctx{&bat, {}, false, !bat.general};
    Formula f = parse_formula_expr(cur, ctx);
    if (cur.peek().kind != Tok::End) cur.fail("trailing input after formula");
    return f;
}

// ---------------------------------------------------------------------------
// situation parsing
// ---------------------------------------------------------------------------

namespace {

GroundAction parse_ground_action(Cursor& cur, const BAT& bat) {
    const Token& tok = cur.peek();
    if (cur.eat_ident("wait")) {
        cur.expect_punct("(");
        Rat d = parse_rational(cur, false);
        cur.expect_punct(")");
        return bat.make_wait(std::move(d));
    }
    std::string name = cur.expect_ident("an action");
    int32_t schema = bat.schema_index(name);
    if (schema < 0) throw ParseError("unknown action '" + name + "'", tok.span);
    GroundAction act;
    act.schema = schema;
    cur.expect_punct("(");
    if (!cur.at_punct(")")) {
        do {
            const Token& argTok = cur.peek();
            std::string arg = cur.expect_ident("an object");
            int32_t obj = bat.object_index(arg);
            if (obj < 0) throw ParseError("unknown object '" + arg + "'", argTok.span);
            act.args.push_back(obj);
        } while (cur.eat_punct(","));
    }
    cur.expect_punct(")");
    if ((int)act.args.size() != bat.schemas[schema].arity)
        throw ParseError("arity mismatch for action '" + name + "'", tok.span);
    return act;
}

}  // namespace

Situation parse_situation(std::string_view text, const BAT& bat,
                          const std::string& filename) {
    Cursor cur{lex(text, filename), 0};
    Situation s;
    bool bracket = cur.eat_punct("[");
    if (cur.peek().kind != Tok::End && !(bracket && cur.at_punct("]"))) {
        s.actions.push_back(parse_ground_action(cur, bat));
        while (cur.eat_punct(";") || cur.eat_punct(",")) {
            if (cur.peek().kind == Tok::End || (bracket && cur.at_punct("]"))) break;
            s.actions.push_back(parse_ground_action(cur, bat));
        }
    }
    if (bracket) cur.expect_punct("]");
    if (cur.peek().kind != Tok::End) cur.fail("trailing input after situation");
    return s;
}

// ---------------------------------------------------------------------------
// program parsing
// ---------------------------------------------------------------------------

namespace {

Program parse_program_expr(Cursor& cur, FormulaCtx& ctx);

Program parse_program_primary(Cursor& cur, FormulaCtx& ctx) {
    const BAT& bat = *ctx.bat;
    const Token& tok = cur.peek();
    if (cur.eat_punct("(")) {
        Program p = parse_program_expr(cur, ctx);
        cur.expect_punct(")");
        return p;
    }
    if (cur.eat_ident("nil")) return Program::nil().with_span(tok.span);
    if (cur.eat_ident("test")) {
        cur.expect_punct("(");
        Formula f = parse_formula_expr(cur, ctx);
        cur.expect_punct(")");
        return Program::test(std::move(f)).with_span(tok.span);
    }
    if (cur.eat_ident("pick")) {
        std::string var = cur.expect_name("a variable");
        cur.expect_punct(".");
        ctx.scope.push_back(var);
        Program body = parse_program_expr(cur, ctx);
        ctx.scope.pop_back();
        return Program::pick(var, std::move(body)).with_span(tok.span);
    }
    if (cur.eat_ident("while")) {
        Formula cond = parse_formula_expr(cur, ctx);
        if (!cur.eat_ident("do")) cur.fail("expected 'do'");
        Program body = parse_program_expr(cur, ctx);
        if (!cur.eat_ident("done")) cur.fail("expected 'done'");
        // while phi do delta done := [phi?; delta]*; !phi?
        return Program::seq(
                   Program::star(Program::seq(Program::test(cond), std::move(body))),
                   Program::test(Formula::lnot(cond)))
            .with_span(tok.span);
    }
    if (cur.eat_ident("if")) {
        Formula cond = parse_formula_expr(cur, ctx);
        if (!cur.eat_ident("then")) cur.fail("expected 'then'");
        Program then_branch = parse_program_expr(cur, ctx);
        if (!cur.eat_ident("else")) cur.fail("expected 'else'");
        Program else_branch = parse_program_expr(cur, ctx);
        if (!cur.eat_ident("fi")) cur.fail("expected 'fi'");
        // if phi then d1 else d2 fi := [phi?; d1] | [!phi?; d2]
        return Program::choice(
                   Program::seq(Program::test(cond), std::move(then_branch)),
                   Program::seq(Program::test(Formula::lnot(cond)),
                                std::move(else_branch)))
            .with_span(tok.span);
    }
    if (cur.eat_ident("wait")) {
        cur.expect_punct("(");
        if (!cur.at_punct(")"))
            throw ParseError("wait actions in programs carry no duration", tok.span);
        cur.expect_punct(")");
        return Program::act(bat.wait_schema, {}).with_span(tok.span);
    }
    std::string name = cur.expect_ident("a program");
    if (kReserved.count(name)) throw ParseError("'" + name + "' is reserved", tok.span);
    int32_t schema = bat.schema_index(name);
    if (schema < 0) throw ParseError("unknown action '" + name + "'", tok.span);
    std::vector<Term> args = parse_term_list(cur, ctx);
    if ((int)args.size() != bat.schemas[schema].arity)
        throw ParseError("arity mismatch for action '" + name + "'", tok.span);
    return Program::act(schema, std::move(args)).with_span(tok.span);
}

Program parse_program_postfix(Cursor& cur, FormulaCtx& ctx) {
    Program p = parse_program_primary(cur, ctx);
    while (cur.eat_punct("*")) p = Program::star(std::move(p));
    return p;
}

Program parse_program_seq(Cursor& cur, FormulaCtx& ctx) {
    Program p = parse_program_postfix(cur, ctx);
    while (cur.eat_punct(";")) p = Program::seq(std::move(p), parse_program_postfix(cur, ctx));
    return p;
}

Program parse_program_choice(Cursor& cur, FormulaCtx& ctx) {
    Program p = parse_program_seq(cur, ctx);
    while (cur.at_punct("|") && !cur.at_punct("||")) {
        cur.next();
        p = Program::choice(std::move(p), parse_program_seq(cur, ctx));
    }
    return p;
}

Program parse_program_expr(Cursor& cur, FormulaCtx& ctx) {
    Program p = parse_program_choice(cur, ctx);
    while (cur.eat_punct("||"))
        p = Program::conc(std::move(p), parse_program_choice(cur, ctx));
    return p;
}

}  // namespace

Program parse_program(std::string_view text, const BAT& bat,
                      const std::string& filename) {
    Cursor cur{lex(text, filename), 0};
    FormulaCtx ctx{&bat, {}, false, !bat.general};
    Program p = parse_program_expr(cur, ctx);
    if (cur.peek().kind != Tok::End) cur.fail("trailing input after program");
    return p;
}

// ---------------------------------------------------------------------------
// machine formats
// ---------------------------------------------------------------------------

TwoCounterMachine parse_2cm(std::string_view text, const std::string& filename) {
    Cursor cur{lex(text, filename), 0};
    TwoCounterMachine m;
    while (cur.peek().kind != Tok::End) {
        const Token& tok = cur.peek();
        std::string label = cur.expect_ident("an instruction label");
        cur.expect_punct(":");
        if (cur.eat_ident("HALT")) {
            m.instructions.emplace_back(label, TwoCounterMachine::Halt{});
            continue;
        }
        auto counter = [&]() -> int {
            const Token& c = cur.peek();
            std::string name = cur.expect_ident("a counter (c1 or c2)");
            if (name == "c1") return 1;
            if (name == "c2") return 2;
            throw ParseError("expected counter c1 or c2", c.span);
        };
        if (cur.eat_ident("inc")) {
            TwoCounterMachine::Inc inc;
            inc.counter = counter();
            if (!cur.eat_ident("goto")) cur.fail("expected 'goto'");
            inc.next = cur.expect_ident("a label");
            m.instructions.emplace_back(label, inc);
        } else if (cur.eat_ident("dec")) {
            TwoCounterMachine::Dec dec;
            dec.counter = counter();
            if (!cur.eat_ident("goto")) cur.fail("expected 'goto'");
            dec.next_pos = cur.expect_ident("a label");
            if (!cur.eat_ident("else")) cur.fail("expected 'else'");
            dec.next_zero = cur.expect_ident("a label");
            m.instructions.emplace_back(label, dec);
        } else {
            throw ParseError("expected 'inc', 'dec' or 'HALT'", tok.span);
        }
    }
    auto problems = m.validate();
    if (!problems.empty()) throw ParseError(problems.front(), SourceSpan{filename});
    return m;
}

TimedAutomaton parse_ta(std::string_view text, const std::string& filename) {
    Cursor cur{lex(text, filename), 0};
    TimedAutomaton ta;
    while (cur.peek().kind != Tok::End) {
        const Token& tok = cur.peek();
        if (cur.eat_ident("location")) {
            std::string name = cur.expect_ident("a location");
            ta.locations.push_back(name);
            while (!cur.at_punct(";")) {
                if (cur.eat_ident("init")) {
                    if (!ta.initial.empty())
                        throw ParseError("second initial location", tok.span);
                    ta.initial = name;
                } else if (cur.eat_ident("final")) {
                    ta.finals.push_back(name);
                } else {
                    cur.fail("expected 'init', 'final' or ';'");
                }
            }
            cur.expect_punct(";");
        } else if (cur.eat_ident("clock")) {
            ta.clocks.push_back(cur.expect_ident("a clock"));
            cur.expect_punct(";");
        } else if (cur.eat_ident("switch")) {
            TASwitch sw;
            sw.from = cur.expect_ident("a location");
            cur.expect_punct("->");
            sw.to = cur.expect_ident("a location");
            if (!cur.eat_ident("on")) cur.fail("expected 'on'");
            sw.label = cur.expect_ident("a label");
            if (cur.eat_ident("when")) {
                do {
                    TAGuardAtom g;
                    const Token& ctok = cur.peek();
                    g.clock = cur.expect_ident("a clock");
                    auto op = peek_cmp_op(cur);
                    if (!op) cur.fail("expected a comparison operator");
                    cur.next();
                    g.op = *op;
                    const Token& btok = cur.peek();
                    Rat bound = parse_rational(cur, false);
                    if (!rat_is_natural(bound))
                        throw ParseError("guard bound must be a natural number",
                                         btok.span);
                    g.bound = (uint32_t)bound.get_num().get_ui();
                    (void)ctok;
                    sw.guard.push_back(std::move(g));
                } while (cur.eat_punct("&"));
            }
            if (cur.eat_ident("reset")) {
                cur.expect_punct("{");
                if (!cur.at_punct("}")) {
                    do {
                        sw.resets.push_back(cur.expect_ident("a clock"));
                    } while (cur.eat_punct(","));
                }
                cur.expect_punct("}");
            }
            cur.expect_punct(";");
            ta.switches.push_back(std::move(sw));
        } else {
            cur.fail("expected 'location', 'clock' or 'switch'");
        }
    }
    auto problems = ta.validate();
    if (!problems.empty()) throw ParseError(problems.front(), SourceSpan{filename});
    return ta;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

std::string term_str(const Term& t, const BAT& bat) {
    return t.is_var() ? t.var : bat.objects[t.obj].name;
}

std::string args_str(const std::vector<Term>& args, const BAT& bat) {
    std::string s = "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) s += ", ";
        s += term_str(args[i], bat);
    }
    return s + ")";
}

// precedence: equiv 1 < implies 2 < or 3 < and 4 < unary 5
std::string formula_str(const Formula& f, const BAT& bat, int min_level) {
    auto wrap = [&](const std::string& s, int level) {
        return level < min_level ? "(" + s + ")" : s;
    };
    switch (f.kind()) {
        case FKind::True: return "true";
        case FKind::False: return "false";
        case FKind::Rel:
            return bat.fluents[f.sym()].name + args_str(f.args(), bat);
        case FKind::Rigid:
            return bat.rigids[f.sym()].name + args_str(f.args(), bat);
        case FKind::FnCmp:
            return bat.funcs[f.sym()].name + args_str(f.args(), bat) + " " +
                   cmp_op_str(f.op()) + " " + rat_str(f.bound());
        case FKind::ObjEq:
            return term_str(f.args()[0], bat) + " == " + term_str(f.args()[1], bat);
        case FKind::ActEq: {
            const auto& schema = bat.schemas[f.sym()];
            if (schema.is_wait) return "a == wait";
            return "a == " + schema.name + args_str(f.args(), bat);
        }
        case FKind::Not:
            return "!" + formula_str(f.kid(0), bat, 5);
        case FKind::And:
            return wrap(formula_str(f.kid(0), bat, 4) + " & " +
                            formula_str(f.kid(1), bat, 5),
                        4);
        case FKind::Or:
            return wrap(formula_str(f.kid(0), bat, 3) + " | " +
                            formula_str(f.kid(1), bat, 4),
                        3);
        case FKind::Implies:
            return wrap(formula_str(f.kid(0), bat, 3) + " -> " +
                            formula_str(f.kid(1), bat, 2),
                        2);
        case FKind::Equiv:
            return wrap(formula_str(f.kid(0), bat, 1) + " <-> " +
                            formula_str(f.kid(1), bat, 2),
                        1);
        case FKind::Exists:
            return "(exists " + f.var() + ". " + formula_str(f.kid(0), bat, 1) + ")";
        case FKind::Forall:
            return "(forall " + f.var() + ". " + formula_str(f.kid(0), bat, 1) + ")";
    }
    return "?";
}

}  // namespace

std::string serialize_formula(const Formula& f, const BAT& bat) {
    return formula_str(f, bat, 1);
}

namespace {

// precedence: conc 1 < choice 2 < seq 3 < postfix 4 < primary 5
std::string program_str(const Program& p, const BAT& bat, int min_level) {
    auto wrap = [&](const std::string& s, int level) {
        return level < min_level ? "(" + s + ")" : s;
    };
    switch (p.kind()) {
        case PKind::Act: {
            const auto& schema = bat.schemas[p.schema()];
            if (schema.is_wait) return "wait()";
            return schema.name + args_str(p.args(), bat);
        }
        case PKind::Test:
            if (p.is_nil()) return "nil";
            return "test(" + serialize_formula(p.test_formula(), bat) + ")";
        case PKind::Seq:
            return wrap(program_str(p.left(), bat, 3) + "; " +
                            program_str(p.right(), bat, 4),
                        3);
        case PKind::Choice:
            return wrap(program_str(p.left(), bat, 2) + " | " +
                            program_str(p.right(), bat, 3),
                        2);
        case PKind::Pick:
            return "(pick " + p.var() + " . " + program_str(p.left(), bat, 1) + ")";
        case PKind::Star:
            return program_str(p.left(), bat, 5) + "*";
        case PKind::Conc:
            return wrap(program_str(p.left(), bat, 1) + " || " +
                            program_str(p.right(), bat, 2),
                        1);
    }
    return "?";
}

}  // namespace

std::string serialize_program(const Program& p, const BAT& bat) {
    return program_str(p, bat, 1);
}

std::string serialize_situation(const Situation& s, const BAT& bat) {
    std::string out = "[";
    for (size_t i = 0; i < s.actions.size(); ++i) {
        if (i) out += "; ";
        out += bat.action_str(s.actions[i]);
    }
    return out + "]";
}

namespace {

std::string name_list(const std::vector<ObjectConst>& decls) {
    std::string s;
    for (size_t i = 0; i < decls.size(); ++i) {
        if (i) s += ", ";
        s += decls[i].name;
    }
    return s;
}

std::string decl_list(const auto& decls) {
    std::string s;
    for (size_t i = 0; i < decls.size(); ++i) {
        if (i) s += ", ";
        s += decls[i].name + "/" + std::to_string(decls[i].arity);
    }
    return s;
}

std::string params_str(const std::vector<std::string>& params) {
    std::string s = "(";
    for (size_t i = 0; i < params.size(); ++i) {
        if (i) s += ", ";
        s += params[i];
    }
    return s + ")";
}

}  // namespace

std::string serialize_bat(const BAT& bat) {
    std::string out;
    if (bat.general) out += "general: true\n";
    out += "bat";
    if (!bat.name.empty()) out += " " + bat.name;
    out += " {\n";
    out += "  objects { " + name_list(bat.objects) + " }\n";
    if (!bat.rigids.empty())
        out += "  rigids { " + decl_list(bat.rigids) + " }\n";
    {
        std::string s;
        bool first = true;
        for (const auto& schema : bat.schemas) {
            if (schema.is_wait) continue;
            if (!first) s += ", ";
            s += schema.name + "/" + std::to_string(schema.arity);
            first = false;
        }
        out += "  actions { " + s + " }\n";
    }
    if (!bat.fluents.empty())
        out += "  fluents { " + decl_list(bat.fluents) + " }\n";
    if (!bat.funcs.empty())
        out += std::string("  ") + (bat.general ? "numerics" : "clocks") + " { " +
               decl_list(bat.funcs) + " }\n";
    {
        std::string s;
        for (size_t i = 0; i < bat.init_fluents.size(); ++i)
            if (bat.init_fluents[i]) s += "    " + bat.fluent_atom_name(i) + ";\n";
        for (size_t i = 0; i < bat.init_rigids.size(); ++i)
            if (bat.init_rigids[i]) s += "    " + bat.rigid_atom_name(i) + ";\n";
        if (bat.general)
            for (size_t i = 0; i < bat.init_funcs.size(); ++i)
                if (bat.init_funcs[i] != 0)
                    s += "    " + bat.func_term_name(i) + " = " +
                         rat_str(bat.init_funcs[i]) + ";\n";
        out += "  init {\n" + s + "  }\n";
    }
    for (size_t i = 0; i < bat.schemas.size(); ++i) {
        if ((int32_t)i == bat.wait_schema) continue;
        if (!bat.preconditions[i].valid()) continue;
        out += "  poss " + bat.schemas[i].name + params_str(bat.precond_params[i]) +
               " := " + serialize_formula(bat.preconditions[i], bat) + ";\n";
    }
    for (size_t i = 0; i < bat.fluents.size(); ++i) {
        if (!bat.ssas[i].valid()) continue;
        out += "  ssa " + bat.fluents[i].name + params_str(bat.ssa_params[i]) + " := " +
               serialize_formula(bat.ssas[i], bat) + ";\n";
    }
    if (!bat.general) {
        for (size_t i = 0; i < bat.funcs.size(); ++i) {
            if (!bat.resets[i].valid()) continue;
            out += "  reset " + bat.funcs[i].name + params_str(bat.reset_params[i]) +
                   " := " + serialize_formula(bat.resets[i], bat) + ";\n";
        }
    } else {
        for (size_t i = 0; i < bat.funcs.size(); ++i) {
            out += "  nssa " + bat.funcs[i].name + "() := {";
            for (const auto& cs : bat.num_ssas[i].cases) {
                out += " case " + serialize_formula(cs.cond, bat) + " : ";
                const std::string fn = bat.funcs[i].name + "()";
                switch (cs.update) {
                    case NumUpdateKind::Keep: out += fn; break;
                    case NumUpdateKind::AddOne: out += fn + " + 1"; break;
                    case NumUpdateKind::SubOne: out += fn + " - 1"; break;
                    case NumUpdateKind::Half: out += fn + " / 2"; break;
                    case NumUpdateKind::Double: out += "2 * " + fn; break;
                    case NumUpdateKind::Const: out += rat_str(cs.value); break;
                }
                out += ";";
            }
            out += " };\n";
        }
    }
    out += "}\n";
    return out;
}

}  // namespace cbat
