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

#include <map>
#include <string>
#include <vector>

#include "qlife/ir.hpp"

namespace qlife {

struct InlineResult {
    Program program;
    /// provenance[q - 1] is the original point that produced inlined point q.
    std::vector<Point> provenance;
};

namespace detail {

struct TaggedOp {
    Operation op;
    int scope_id;
};

class Inliner {
  public:
    explicit Inliner(Program& out) : m_out(out) {}

    void check_acyclic(const Program& prog) {
        std::vector<std::string> stack;
        for (const auto& op : prog.operations)
            if (op.is_call())
                visit(prog, op.gate_name, stack);
    }

    /// Maps a body resource to the caller resource and the identifier to
    /// print for it (empty keeps the original spelling).
    using Binding = std::map<ResourceId, std::pair<ResourceId, std::string>>;

    void expand(const Operation& op, const Binding& binding, int scope_id, std::vector<TaggedOp>& sink) {
        if (!op.is_call()) {
            Operation copy = op;
            for (auto& o : copy.operands) {
                const auto& [id, name] = binding.at(o.resource);
                o.resource = id;
                if (!name.empty())
                    o.name = name;
            }
            sink.push_back({std::move(copy), scope_id});
            return;
        }
        auto fn = m_out.function(op.gate_name);
        if (!fn)
            throw Error(ErrorKind::undefined_function, "undefined function '" + op.gate_name + "'");
        if (fn->params.size() != op.operands.size())
            throw Error(ErrorKind::validate, "arity mismatch calling '" + op.gate_name + "'");

        Binding inner;
        for (size_t i = 0; i < fn->params.size(); ++i)
            inner[fn->params[i].resource] = {binding.at(op.operands[i].resource).first, op.operands[i].name};

        int body_scope = scope_id;
        for (const auto& [id, r] : fn->body.resources) {
            if (inner.count(id))
                continue;
            if (body_scope == scope_id) {
                body_scope = m_out.next_scope_id();
                m_out.scopes.push_back(Scope{body_scope, scope_id, {}, 1, 0});
                new_scopes.push_back(body_scope);
            }
            Resource fresh = r;
            fresh.id = m_out.next_resource_id();
            fresh.name = fn->name + "#" + std::to_string(++m_counter) + "." + r.name;
            fresh.aliases = {fresh.name};
            fresh.kind = ResourceKind::temporary;
            fresh.scope_id = body_scope;
            fresh.persistent = false;
            fresh.measured_at.reset();
            m_out.resources[fresh.id] = fresh;
            m_out.scopes.back().declared.push_back(fresh.id);
            inner[id] = {fresh.id, fresh.name};
        }

        std::vector<TaggedOp> body;
        for (const auto& bop : fn->body.operations)
            expand(bop, inner, body_scope, body);
        if (op.kind == OpKind::adjoint_call) {
            std::vector<Operation> ops;
            for (auto& t : body)
                ops.push_back(t.op);
            auto inv = adjoint_of(ops);
            std::vector<TaggedOp> reversed;
            for (size_t i = 0; i < inv.size(); ++i)
                reversed.push_back({inv[i], body[body.size() - 1 - i].scope_id});
            body = std::move(reversed);
        }
        for (auto& t : body) {
            t.op.inverse_of.reset();
            sink.push_back(std::move(t));
        }
    }

    std::vector<int> new_scopes;

  private:
    void visit(const Program& prog, const std::string& name, std::vector<std::string>& stack) {
        auto it = std::find(stack.begin(), stack.end(), name);
        if (it != stack.end()) {
            std::string cycle;
            for (; it != stack.end(); ++it)
                cycle += *it + " -> ";
            throw Error(ErrorKind::recursion, "recursive call cycle: " + cycle + name);
        }
        auto fn = prog.function(name);
        if (!fn)
            throw Error(ErrorKind::undefined_function, "undefined function '" + name + "'");
        stack.push_back(name);
        for (const auto& op : fn->body.operations)
            if (op.is_call())
                visit(prog, op.gate_name, stack);
        stack.pop_back();
    }

    Program& m_out;
    int m_counter = 0;
};

}  // namespace detail

/// Replaces every call by its callee body (adjoint calls by the mirrored
/// adjoint body). Callee locals become fresh temporaries in a new child
/// scope of the call site.
inline InlineResult inline_program(const Program& program) {
    InlineResult result;
    Program& out = result.program;
    out = program;
    out.operations.clear();

    detail::Inliner inliner(out);
    inliner.check_acyclic(program);

    detail::Inliner::Binding identity;
    for (const auto& [id, r] : program.resources)
        identity[id] = {id, std::string()};

    const int n = program.size();
    std::vector<detail::TaggedOp> flat;
    // before[p] = number of inlined ops produced by points < p.
    std::vector<int> before(static_cast<size_t>(n) + 2, 0);
    for (Point p = 1; p <= n; ++p) {
        before[static_cast<size_t>(p)] = static_cast<int>(flat.size());
        const auto& op = program.op(p);
        size_t start = flat.size();
        inliner.expand(op, identity, innermost_scope_at(program, p), flat);
        for (size_t i = start; i < flat.size(); ++i)
            result.provenance.push_back(p);
    }
    before[static_cast<size_t>(n) + 1] = static_cast<int>(flat.size());

    for (size_t i = 0; i < flat.size(); ++i) {
        Operation op = flat[i].op;
        op.point = static_cast<Point>(i) + 1;
        Point origin = result.provenance[i];
        const auto& src = program.op(origin);
        if (!src.is_call() && src.inverse_of)
            op.inverse_of = before[static_cast<size_t>(*src.inverse_of)] + 1;
        out.operations.push_back(std::move(op));
    }

    const int total = static_cast<int>(flat.size());
    auto map_entry = [&](Point e) { return e > n ? total + 1 : before[static_cast<size_t>(std::max(e, 1))] + 1; };
    auto map_exit = [&](Point x) { return x < 1 ? 0 : before[static_cast<size_t>(std::min(x, n)) + 1]; };

    auto is_new = [&](int id) {
        return std::find(inliner.new_scopes.begin(), inliner.new_scopes.end(), id) != inliner.new_scopes.end();
    };
    for (auto& s : out.scopes) {
        if (is_new(s.id))
            continue;
        s.entry = map_entry(s.entry);
        s.exit = map_exit(s.exit);
    }
    for (auto& s : out.scopes) {
        if (!is_new(s.id))
            continue;
        Point lo = total + 1;
        Point hi = 0;
        for (size_t i = 0; i < flat.size(); ++i) {
            if (out.is_ancestor_scope(s.id, flat[i].scope_id)) {
                lo = std::min(lo, static_cast<Point>(i) + 1);
                hi = std::max(hi, static_cast<Point>(i) + 1);
            }
        }
        s.entry = lo;
        s.exit = hi;
        if (lo > hi) {
            s.entry = 1;
            s.exit = 0;
        }
    }
    for (auto& [id, r] : out.resources)
        r.measured_at.reset();
    for (const auto& op : out.operations)
        if (op.kind == OpKind::measure) {
            auto& r = out.resources.at(op.operands.front().resource);
            if (!r.measured_at)
                r.measured_at = op.point;
        }
    for (auto& rest : out.restorations) {
        rest.first = map_entry(rest.first);
        rest.last = map_exit(rest.last);
    }
    if (out.uncompute_phase_start)
        out.uncompute_phase_start = map_entry(*out.uncompute_phase_start);
    return result;
}

}  // namespace qlife
