// Copyright 2026 The qlife Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qlife/ir.hpp"

namespace qlife {

struct SourceUnit {
    std::string text;
    std::string path = "<input>";
};

enum class Severity { error, warning };

struct SourceSpan {
    int line = 0;
    int col = 0;
    int end_line = 0;
    int end_col = 0;
};

struct Diagnostic {
    Severity severity = Severity::error;
    std::string code;
    SourceSpan span;
    std::string message;

    /// `path:line:col: severity[code]: message`
    [[nodiscard]] std::string format(const std::string& path) const {
        std::ostringstream os;
        os << path << ":";
        if (span.line > 0)
            os << span.line << ":" << span.col << ":";
        os << " " << (severity == Severity::error ? "error" : "warning") << "[" << code << "]: " << message;
        return os.str();
    }
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
    return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::error; });
}

struct ParseResult {
    std::optional<Program> program;
    std::vector<Diagnostic> diagnostics;

    [[nodiscard]] bool ok() const { return program.has_value() && !has_errors(diagnostics); }
};

namespace detail {

enum class Tok { ident, lparen, rparen, lbrace, rbrace, lbracket, rbracket, comma, semi, equals, end };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    int line = 1;
    int col = 1;
};

struct SyntaxError {
    Diagnostic diag;
};

inline std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    size_t i = 0;
    auto advance = [&](size_t k) {
        for (size_t j = 0; j < k; ++j) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n')
                advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            t.kind = Tok::ident;
            t.text = text.substr(i, j - i);
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        switch (c) {
            case '(': t.kind = Tok::lparen; break;
            case ')': t.kind = Tok::rparen; break;
            case '{': t.kind = Tok::lbrace; break;
            case '}': t.kind = Tok::rbrace; break;
            case '[': t.kind = Tok::lbracket; break;
            case ']': t.kind = Tok::rbracket; break;
            case ',': t.kind = Tok::comma; break;
            case ';': t.kind = Tok::semi; break;
            case '=': t.kind = Tok::equals; break;
            default:
                throw SyntaxError{{Severity::error, "syntax", {line, col, line, col + 1},
                                   std::string("unexpected character '") + c + "'"}};
        }
        t.text = std::string(1, c);
        advance(1);
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

struct Ident {
    std::string name;
    int line = 0;
    int col = 0;
};

struct Stmt {
    enum class Kind { decl, alias, gate, call, measure, ret, block } kind = Kind::block;
    int line = 0;
    int col = 0;
    bool adj = false;
    std::string callee;
    std::vector<Ident> args;
    std::vector<Stmt> body;
};

struct FuncAst {
    std::string return_type;
    Ident name;
    std::vector<std::pair<Ident, bool>> params;
    Stmt body;
};

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : m_toks(std::move(toks)) {}

    std::vector<FuncAst> unit() {
        std::vector<FuncAst> fns;
        while (peek().kind != Tok::end)
            fns.push_back(funcdef());
        if (fns.empty())
            fail(peek(), "expected a function definition");
        return fns;
    }

  private:
    const Token& peek(size_t k = 0) const { return m_toks[std::min(m_pos + k, m_toks.size() - 1)]; }
    const Token& next() {
        const Token& t = peek();
        if (m_pos < m_toks.size() - 1)
            ++m_pos;
        return t;
    }
    bool is_word(const char* w, size_t k = 0) const { return peek(k).kind == Tok::ident && peek(k).text == w; }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        int len = std::max<int>(1, static_cast<int>(t.text.size()));
        throw SyntaxError{{Severity::error, "syntax", {t.line, t.col, t.line, t.col + len}, msg}};
    }

    const Token& expect(Tok kind, const char* what) {
        if (peek().kind != kind)
            fail(peek(), std::string("expected ") + what);
        return next();
    }

    Ident ident(const char* what = "identifier") {
        const Token& t = expect(Tok::ident, what);
        return {t.text, t.line, t.col};
    }

    FuncAst funcdef() {
        FuncAst f;
        if (is_word("void")) {
            next();
            f.return_type = "void";
        } else if (is_word("qubit")) {
            next();
            f.return_type = "qubit";
            if (peek().kind == Tok::lbracket) {
                next();
                expect(Tok::rbracket, "']'");
                f.return_type = "qubit[]";
            }
        } else {
            fail(peek(), "expected return type 'void' or 'qubit[]'");
        }
        f.name = ident("function name");
        expect(Tok::lparen, "'('");
        if (peek().kind != Tok::rparen) {
            do {
                bool by_ref = false;
                if (is_word("ref")) {
                    next();
                    by_ref = true;
                }
                if (!is_word("qubit"))
                    fail(peek(), "expected 'qubit' parameter");
                next();
                f.params.emplace_back(ident("parameter name"), by_ref);
            } while (peek().kind == Tok::comma && (next(), true));
        }
        expect(Tok::rparen, "')'");
        f.body = block();
        return f;
    }

    Stmt block() {
        Stmt b;
        const Token& open = expect(Tok::lbrace, "'{'");
        b.kind = Stmt::Kind::block;
        b.line = open.line;
        b.col = open.col;
        while (peek().kind != Tok::rbrace) {
            if (peek().kind == Tok::end)
                fail(peek(), "unterminated block");
            b.body.push_back(stmt());
        }
        next();
        return b;
    }

    std::vector<Ident> ident_list(Tok terminator) {
        std::vector<Ident> out;
        if (peek().kind == terminator)
            return out;
        out.push_back(ident());
        while (peek().kind == Tok::comma) {
            next();
            out.push_back(ident());
        }
        return out;
    }

    Stmt stmt() {
        Stmt s;
        s.line = peek().line;
        s.col = peek().col;
        if (peek().kind == Tok::lbrace)
            return block();
        if (is_word("qubit")) {
            next();
            s.kind = Stmt::Kind::decl;
            s.args = ident_list(Tok::semi);
            if (s.args.empty())
                fail(peek(), "expected identifier");
            expect(Tok::semi, "';'");
            return s;
        }
        if (is_word("alias")) {
            next();
            s.kind = Stmt::Kind::alias;
            s.args.push_back(ident());
            expect(Tok::equals, "'='");
            s.args.push_back(ident());
            expect(Tok::semi, "';'");
            return s;
        }
        if (is_word("measure")) {
            next();
            s.kind = Stmt::Kind::measure;
            s.args.push_back(ident());
            expect(Tok::semi, "';'");
            return s;
        }
        if (is_word("return")) {
            next();
            s.kind = Stmt::Kind::ret;
            expect(Tok::lbracket, "'['");
            s.args = ident_list(Tok::rbracket);
            expect(Tok::rbracket, "']'");
            expect(Tok::semi, "';'");
            return s;
        }
        if (is_word("adj")) {
            next();
            s.adj = true;
        }
        const Token& head = expect(Tok::ident, "statement");
        s.callee = head.text;
        if (canonical_gate_name(head.text)) {
            s.kind = Stmt::Kind::gate;
            s.args = ident_list(Tok::semi);
            if (s.args.empty())
                fail(peek(), "expected gate operand");
            expect(Tok::semi, "';'");
            return s;
        }
        if (peek().kind != Tok::lparen)
            fail(head, "unknown gate or statement '" + head.text + "'");
        next();
        s.kind = Stmt::Kind::call;
        s.args = ident_list(Tok::rparen);
        expect(Tok::rparen, "')'");
        expect(Tok::semi, "';'");
        return s;
    }

    std::vector<Token> m_toks;
    size_t m_pos = 0;
};

/// Lowers one function AST into a Program. Call operand roles and qfree
/// flags are provisional until the whole unit is known.
class Lowerer {
  public:
    Lowerer(const FuncAst& fn, const std::map<std::string, const FuncAst*>& sigs, std::vector<Diagnostic>& diags)
        : m_fn(fn), m_sigs(sigs), m_diags(diags) {}

    Program run() {
        m_prog.signature.name = m_fn.name.name;
        m_prog.signature.return_type = m_fn.return_type;
        m_prog.scopes.push_back(Scope{0, -1, {}, 1, 0});
        m_stack.push_back({0, {}});
        for (const auto& [id, by_ref] : m_fn.params) {
            if (m_stack.back().names.count(id.name)) {
                error(id, "duplicate", "duplicate declaration of '" + id.name + "'");
                continue;
            }
            ResourceId rid = declare(id.name, ResourceKind::input);
            if (by_ref) {
                auto& r = m_prog.resources[rid];
                r.kind = ResourceKind::parameter;
                r.persistent = true;
            }
            m_prog.signature.params.push_back({id.name, by_ref, rid});
        }
        for (const auto& s : m_fn.body.body)
            stmt(s);
        m_prog.scopes[0].exit = m_prog.size();
        return std::move(m_prog);
    }

  private:
    struct Frame {
        int scope_id;
        std::map<std::string, ResourceId> names;
    };

    void error(const Ident& at, const char* code, const std::string& msg) {
        int len = static_cast<int>(at.name.size());
        m_diags.push_back({Severity::error, code, {at.line, at.col, at.line, at.col + len}, msg});
    }
    void error(const Stmt& at, const char* code, const std::string& msg) {
        m_diags.push_back({Severity::error, code, {at.line, at.col, at.line, at.col + 1}, msg});
    }

    ResourceId declare(const std::string& name, ResourceKind kind) {
        Resource r;
        r.id = m_prog.next_resource_id();
        r.name = name;
        r.kind = kind;
        r.scope_id = m_stack.back().scope_id;
        r.aliases = {name};
        m_prog.resources[r.id] = r;
        for (auto& s : m_prog.scopes)
            if (s.id == r.scope_id)
                s.declared.push_back(r.id);
        m_stack.back().names[name] = r.id;
        return r.id;
    }

    std::optional<ResourceId> lookup(const Ident& id) {
        for (auto it = m_stack.rbegin(); it != m_stack.rend(); ++it) {
            auto f = it->names.find(id.name);
            if (f != it->names.end())
                return f->second;
        }
        error(id, "undeclared", "use of undeclared identifier '" + id.name + "'");
        return std::nullopt;
    }

    std::optional<std::vector<Operand>> operands(const Stmt& s) {
        std::vector<Operand> ops;
        bool ok = true;
        for (const auto& a : s.args) {
            auto id = lookup(a);
            if (!id) {
                ok = false;
                continue;
            }
            for (const auto& o : ops) {
                if (o.resource == *id) {
                    error(a, "operand", "operand '" + a.name + "' repeats a register already used by this operation");
                    ok = false;
                }
            }
            ops.push_back({*id, Role::control, a.name});
        }
        if (!ok)
            return std::nullopt;
        return ops;
    }

    void emit(Operation op) {
        op.point = m_prog.size() + 1;
        m_prog.operations.push_back(std::move(op));
    }

    void stmt(const Stmt& s) {
        using K = Stmt::Kind;
        switch (s.kind) {
            case K::block: {
                int id = m_prog.next_scope_id();
                m_prog.scopes.push_back(Scope{id, m_stack.back().scope_id, {}, m_prog.size() + 1, 0});
                m_stack.push_back({id, {}});
                for (const auto& inner : s.body)
                    stmt(inner);
                m_stack.pop_back();
                for (auto& sc : m_prog.scopes)
                    if (sc.id == id)
                        sc.exit = m_prog.size();
                break;
            }
            case K::decl:
                for (const auto& a : s.args) {
                    if (m_stack.back().names.count(a.name)) {
                        error(a, "duplicate", "duplicate declaration of '" + a.name + "' in this scope");
                        continue;
                    }
                    declare(a.name, ResourceKind::temporary);
                }
                break;
            case K::alias: {
                const Ident& name = s.args[0];
                const Ident& referent = s.args[1];
                if (m_stack.back().names.count(name.name)) {
                    error(name, "duplicate", "duplicate declaration of '" + name.name + "' in this scope");
                    break;
                }
                auto target = lookup(referent);
                if (!target)
                    break;
                m_stack.back().names[name.name] = *target;
                m_prog.alias_bindings.push_back({name.name, referent.name, *target, m_stack.back().scope_id});
                break;
            }
            case K::gate: {
                std::string gname = *canonical_gate_name(s.callee);
                const GateInfo* g = find_gate(gname);
                if (static_cast<int>(s.args.size()) != g->arity) {
                    error(s, "arity",
                          "gate " + gname + " expects " + std::to_string(g->arity) + " operand(s), got " +
                              std::to_string(s.args.size()));
                    break;
                }
                auto ops = operands(s);
                if (!ops)
                    break;
                auto roles = gate_roles(*g);
                for (size_t i = 0; i < ops->size(); ++i)
                    (*ops)[i].role = roles[i];
                Operation op;
                op.kind = s.adj ? OpKind::adjoint_gate : OpKind::gate;
                op.gate_name = gname;
                op.operands = std::move(*ops);
                op.qfree = g->qfree;
                emit(std::move(op));
                break;
            }
            case K::call: {
                auto sig = m_sigs.find(s.callee);
                if (sig == m_sigs.end()) {
                    error(s, "undefined", "call of undefined function '" + s.callee + "'");
                    break;
                }
                if (sig->second->params.size() != s.args.size()) {
                    error(s, "arity",
                          "function " + s.callee + " expects " + std::to_string(sig->second->params.size()) +
                              " argument(s), got " + std::to_string(s.args.size()));
                    break;
                }
                auto ops = operands(s);
                if (!ops)
                    break;
                Operation op;
                op.kind = s.adj ? OpKind::adjoint_call : OpKind::call;
                op.gate_name = s.callee;
                op.operands = std::move(*ops);
                emit(std::move(op));
                break;
            }
            case K::measure: {
                auto ops = operands(s);
                if (!ops)
                    break;
                (*ops)[0].role = Role::target;
                Operation op;
                op.kind = OpKind::measure;
                op.gate_name = "measure";
                op.operands = std::move(*ops);
                emit(std::move(op));
                auto& r = m_prog.resources[m_prog.operations.back().operands[0].resource];
                if (!r.measured_at)
                    r.measured_at = m_prog.size();
                break;
            }
            case K::ret:
                for (const auto& a : s.args) {
                    auto id = lookup(a);
                    if (!id)
                        continue;
                    auto& r = m_prog.resources[*id];
                    r.persistent = true;
                    if (r.kind == ResourceKind::input)
                        r.kind = ResourceKind::output;
                    m_prog.signature.returns.push_back(a.name);
                }
                break;
        }
    }

    const FuncAst& m_fn;
    const std::map<std::string, const FuncAst*>& m_sigs;
    std::vector<Diagnostic>& m_diags;
    Program m_prog;
    std::vector<Frame> m_stack;
};

}  // namespace detail

/// Rebuilds each Resource's alias set from the alias bindings and checks
/// that every binding and operand resolves. Idempotent.
inline Program resolve_aliases(const Program& program) {
    Program out = program;
    for (auto& [id, r] : out.resources)
        r.aliases = {r.name};
    for (const auto& b : out.alias_bindings) {
        auto it = out.resources.find(b.target);
        if (it == out.resources.end())
            throw Error(ErrorKind::validate, "alias '" + b.name + "' of undeclared name '" + b.referent + "'");
        if (it->second.kind == ResourceKind::input)
            throw Error(ErrorKind::validate, "alias '" + b.name + "' crosses the function boundary: '" + b.referent +
                                                 "' is a by-value parameter (declare it ref)");
        auto& names = it->second.aliases;
        if (std::find(names.begin(), names.end(), b.name) == names.end())
            names.push_back(b.name);
    }
    for (const auto& op : out.operations)
        for (const auto& o : op.operands)
            if (!out.resources.count(o.resource))
                throw Error(ErrorKind::validate, "operand '" + o.name + "' at p" + std::to_string(op.point) +
                                                     " references a dangling identifier");
    return out;
}

/// Parses a `.qls` unit. The last function defined is the program; all
/// functions (including it) are available as callable blocks.
inline ParseResult parse(const SourceUnit& src) {
    ParseResult result;
    bool blank = std::all_of(src.text.begin(), src.text.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (blank) {
        result.diagnostics.push_back({Severity::error, "empty", {1, 1, 1, 1}, "empty source"});
        return result;
    }
    std::vector<detail::FuncAst> fns;
    try {
        detail::Parser parser(detail::lex(src.text));
        fns = parser.unit();
    } catch (const detail::SyntaxError& e) {
        result.diagnostics.push_back(e.diag);
        return result;
    }

    auto& diags = result.diagnostics;
    std::map<std::string, const detail::FuncAst*> sigs;
    for (const auto& f : fns) {
        if (canonical_gate_name(f.name.name) || f.name.name == "measure") {
            diags.push_back({Severity::error, "reserved", {f.name.line, f.name.col, f.name.line, f.name.col + 1},
                             "function name '" + f.name.name + "' is reserved"});
            continue;
        }
        if (!sigs.emplace(f.name.name, &f).second)
            diags.push_back({Severity::error, "duplicate", {f.name.line, f.name.col, f.name.line, f.name.col + 1},
                             "duplicate definition of function '" + f.name.name + "'"});
    }

    std::vector<Program> bodies;
    for (const auto& f : fns)
        bodies.push_back(detail::Lowerer(f, sigs, diags).run());
    if (has_errors(diags))
        return result;

    for (size_t i = 0; i < bodies.size(); ++i) {
        std::vector<std::string> path = {bodies[i].signature.name};
        std::function<bool(const Program&)> visit = [&](const Program& b) {
            for (const auto& op : b.operations) {
                if (!op.is_call())
                    continue;
                path.push_back(op.gate_name);
                if (op.gate_name == path.front())
                    return true;
                if (std::count(path.begin(), path.end(), op.gate_name) == 1) {
                    for (const auto& c : bodies)
                        if (c.signature.name == op.gate_name && visit(c))
                            return true;
                }
                path.pop_back();
            }
            return false;
        };
        if (visit(bodies[i])) {
            std::string cycle;
            for (const auto& n : path)
                cycle += (cycle.empty() ? "" : " -> ") + n;
            const auto& f = fns[i];
            diags.push_back({Severity::error, "recursion", {f.name.line, f.name.col, f.name.line, f.name.col + 1},
                             "recursive call cycle: " + cycle});
            return result;
        }
    }

    // Parameter write effects and qfree flags propagate through calls.
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < bodies.size(); ++i)
        index[bodies[i].signature.name] = i;
    std::vector<std::vector<bool>> written(bodies.size());
    std::vector<bool> qfree(bodies.size(), true);
    for (size_t i = 0; i < bodies.size(); ++i)
        written[i].assign(bodies[i].signature.params.size(), false);
    auto param_index = [](const Program& b, ResourceId r) -> int {
        for (size_t k = 0; k < b.signature.params.size(); ++k)
            if (b.signature.params[k].resource == r)
                return static_cast<int>(k);
        return -1;
    };
    // A by-value input whose writes undo each other in qfree pairs keeps its
    // basis value across the call and acts as a control for the caller.
    using Writer = std::pair<const Operation*, bool>;
    auto restores = [](const std::vector<Writer>& ws) {
        std::vector<const Operation*> stack;
        for (const auto& [op, op_qfree] : ws) {
            if (!op_qfree)
                return false;
            if (!stack.empty() && inverts(*stack.back(), *op))
                stack.pop_back();
            else
                stack.push_back(op);
        }
        return stack.empty();
    };
    for (bool changed = true; changed;) {
        changed = false;
        auto next = written;
        for (size_t i = 0; i < bodies.size(); ++i) {
            std::vector<std::vector<Writer>> writers(bodies[i].signature.params.size());
            for (const auto& op : bodies[i].operations) {
                bool op_qfree = op.qfree;
                if (op.is_call())
                    op_qfree = qfree[index.at(op.gate_name)];
                if (op.kind == OpKind::measure)
                    op_qfree = false;
                for (size_t j = 0; j < op.operands.size(); ++j) {
                    bool writes = op.operands[j].role == Role::target;
                    if (op.is_call())
                        writes = written[index.at(op.gate_name)][j];
                    int k = param_index(bodies[i], op.operands[j].resource);
                    if (writes && k >= 0)
                        writers[static_cast<size_t>(k)].push_back({&op, op_qfree});
                }
                if (!op_qfree && qfree[i]) {
                    qfree[i] = false;
                    changed = true;
                }
            }
            for (size_t k = 0; k < writers.size(); ++k) {
                const auto& param = bodies[i].signature.params[k];
                bool by_value = !param.by_ref && bodies[i].resource(param.resource).kind == ResourceKind::input;
                bool w = !writers[k].empty() && !(by_value && restores(writers[k]));
                if (w && !next[i][k]) {
                    next[i][k] = true;
                    changed = true;
                }
            }
        }
        written = std::move(next);
    }
    for (auto& b : bodies) {
        for (auto& op : b.operations) {
            if (!op.is_call())
                continue;
            size_t callee = index.at(op.gate_name);
            for (size_t j = 0; j < op.operands.size(); ++j)
                op.operands[j].role = written[callee][j] ? Role::target : Role::control;
            op.qfree = qfree[callee];
        }
    }

    std::vector<std::shared_ptr<const FunctionDef>> defs;
    for (size_t i = 0; i < bodies.size(); ++i) {
        auto def = std::make_shared<FunctionDef>();
        def->name = bodies[i].signature.name;
        def->params = bodies[i].signature.params;
        for (bool w : written[i])
            def->param_roles.push_back(w ? Role::target : Role::control);
        def->qfree = qfree[i];
        def->returns = bodies[i].signature.returns;
        try {
            def->body = resolve_aliases(bodies[i]);
        } catch (const Error& e) {
            const auto& f = fns[i];
            diags.push_back({Severity::error, "alias", {f.name.line, f.name.col, f.name.line, f.name.col + 1}, e.what()});
            continue;
        }
        defs.push_back(std::move(def));
    }
    if (has_errors(diags))
        return result;

    Program entry = defs.back()->body;
    entry.functions = defs;
    result.program = std::move(entry);
    return result;
}

// ---------------------------------------------------------------------------
// Pretty printing

namespace detail {

inline void print_op(std::ostream& os, const Operation& op) {
    if (op.kind == OpKind::measure) {
        os << "measure " << op.operands[0].name << ";";
        return;
    }
    if (op.is_adjoint())
        os << "adj ";
    os << op.gate_name;
    if (op.is_call()) {
        os << "(";
        for (size_t i = 0; i < op.operands.size(); ++i)
            os << (i ? ", " : "") << op.operands[i].name;
        os << ");";
    } else {
        for (size_t i = 0; i < op.operands.size(); ++i)
            os << (i ? ", " : " ") << op.operands[i].name;
        os << ";";
    }
}

inline void print_scope(std::ostream& os, const Program& p, const Scope& s, int depth) {
    std::string pad(static_cast<size_t>(depth) * 4, ' ');
    std::vector<std::string> temps;
    for (ResourceId id : s.declared)
        if (p.resource(id).kind == ResourceKind::temporary)
            temps.push_back(p.resource(id).name);
    if (!temps.empty()) {
        os << pad << "qubit ";
        for (size_t i = 0; i < temps.size(); ++i)
            os << (i ? ", " : "") << temps[i];
        os << ";\n";
    }
    for (const auto& b : p.alias_bindings)
        if (b.scope_id == s.id)
            os << pad << "alias " << b.name << " = " << b.referent << ";\n";

    std::vector<const Scope*> children;
    for (const auto& c : p.scopes)
        if (c.parent == s.id)
            children.push_back(&c);
    std::stable_sort(children.begin(), children.end(),
                     [](const Scope* a, const Scope* b) { return a->entry < b->entry; });
    size_t ci = 0;
    Point last = s.parent < 0 ? p.size() : s.exit;
    for (Point q = s.entry; q <= last + 1; ++q) {
        while (ci < children.size() && children[ci]->entry == q) {
            os << pad << "{\n";
            print_scope(os, p, *children[ci], depth + 1);
            os << pad << "}\n";
            if (children[ci]->exit >= q)
                q = children[ci]->exit + 1;
            ++ci;
        }
        if (q > last)
            break;
        if (p.uncompute_phase_start && q == *p.uncompute_phase_start)
            os << pad << "// uncompute\n";
        os << pad;
        print_op(os, p.op(q));
        os << "\n";
    }
}

}  // namespace detail

/// Source form of one function body.
inline std::string print_function(const Program& p) {
    std::ostringstream os;
    const auto& sig = p.signature;
    os << sig.return_type << " " << sig.name << "(";
    for (size_t i = 0; i < sig.params.size(); ++i)
        os << (i ? ", " : "") << (sig.params[i].by_ref ? "ref " : "") << "qubit " << sig.params[i].name;
    os << ") {\n";
    detail::print_scope(os, p, p.scope(0), 1);
    if (!sig.returns.empty()) {
        os << "    return [";
        for (size_t i = 0; i < sig.returns.size(); ++i)
            os << (i ? ", " : "") << sig.returns[i];
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

/// Callee definitions in source order followed by the program itself.
inline std::string print_unit(const Program& p) {
    std::string out;
    for (const auto& f : p.functions) {
        if (f->name == p.signature.name)
            continue;
        out += print_function(f->body);
        out += "\n";
    }
    out += print_function(p);
    return out;
}

inline ParseResult parse_text(const std::string& text, const std::string& path = "<input>") {
    return parse(SourceUnit{text, path});
}

}  // namespace qlife
