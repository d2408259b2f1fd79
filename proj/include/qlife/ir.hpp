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
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qlife {

using ResourceId = int;
using Point = int;

enum class ErrorKind {
    parse,
    validate,
    undefined_function,
    recursion,
    irreversible,
    unknown_resource,
    out_of_range,
    stale_plan,
    budget,
    internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), m_kind(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return m_kind; }

  private:
    ErrorKind m_kind;
};

enum class ResourceKind { input, output, temporary, parameter };
enum class OpKind { gate, call, adjoint_gate, adjoint_call, measure };
enum class Role { control, target };

inline std::string_view to_string(ResourceKind k) {
    switch (k) {
        case ResourceKind::input: return "input";
        case ResourceKind::output: return "output";
        case ResourceKind::temporary: return "temporary";
        case ResourceKind::parameter: return "parameter";
    }
    return "?";
}

inline std::string_view to_string(OpKind k) {
    switch (k) {
        case OpKind::gate: return "gate";
        case OpKind::call: return "call";
        case OpKind::adjoint_gate: return "adjoint_gate";
        case OpKind::adjoint_call: return "adjoint_call";
        case OpKind::measure: return "measure";
    }
    return "?";
}

/// A physical quantum register. Every source identifier (declared name or
/// alias) resolves to exactly one Resource.
struct Resource {
    ResourceId id = -1;
    std::string name;
    ResourceKind kind = ResourceKind::temporary;
    int scope_id = 0;
    bool persistent = false;
    std::optional<Point> measured_at;
    /// All identifiers bound to this register, declared name first.
    std::vector<std::string> aliases;

    [[nodiscard]] bool is_interface() const { return kind != ResourceKind::temporary; }
};

struct Operand {
    ResourceId resource = -1;
    Role role = Role::control;
    /// Identifier spelled at the use site; differs from the resource name
    /// when the operand goes through an alias.
    std::string name;

    friend bool operator==(const Operand&, const Operand&) = default;
};

struct Operation {
    Point point = 0;
    OpKind kind = OpKind::gate;
    std::string gate_name;
    std::vector<Operand> operands;
    bool qfree = false;
    /// For adjoint_* ops produced by adjoint_of: the forward op inverted.
    std::optional<Point> inverse_of;

    [[nodiscard]] bool is_adjoint() const {
        return kind == OpKind::adjoint_gate || kind == OpKind::adjoint_call;
    }
    [[nodiscard]] bool is_call() const { return kind == OpKind::call || kind == OpKind::adjoint_call; }
    [[nodiscard]] bool touches(ResourceId r) const {
        return std::any_of(operands.begin(), operands.end(), [r](const Operand& o) { return o.resource == r; });
    }
    [[nodiscard]] bool writes(ResourceId r) const {
        return std::any_of(operands.begin(), operands.end(),
                           [r](const Operand& o) { return o.resource == r && o.role == Role::target; });
    }
    [[nodiscard]] bool reads(ResourceId r) const {
        return std::any_of(operands.begin(), operands.end(),
                           [r](const Operand& o) { return o.resource == r && o.role == Role::control; });
    }
};

struct Scope {
    int id = 0;
    int parent = -1;
    std::vector<ResourceId> declared;
    /// First and last program point inside the scope; entry == exit + 1 for
    /// an empty scope.
    Point entry = 1;
    Point exit = 0;

    [[nodiscard]] bool contains(Point p) const { return entry <= p && p <= exit; }
};

struct AliasBinding {
    std::string name;
    std::string referent;
    ResourceId target = -1;
    int scope_id = 0;
};

struct Param {
    std::string name;
    bool by_ref = false;
    ResourceId resource = -1;
};

struct Signature {
    std::string name;
    std::string return_type = "void";
    std::vector<Param> params;
    std::vector<std::string> returns;
};

/// Adjoint segment inserted by a transformation; resources listed are back
/// in |0> after `last`.
struct Restoration {
    Point first = 0;
    Point last = 0;
    std::vector<ResourceId> resources;
};

struct FunctionDef;

struct Program {
    Signature signature;
    std::vector<Operation> operations;
    std::vector<Scope> scopes;
    std::vector<std::shared_ptr<const FunctionDef>> functions;
    std::map<ResourceId, Resource> resources;
    std::vector<AliasBinding> alias_bindings;
    std::vector<Restoration> restorations;
    /// Set by the global baseline: ops at or after this point form the
    /// trailing uncompute phase.
    std::optional<Point> uncompute_phase_start;

    [[nodiscard]] int size() const { return static_cast<int>(operations.size()); }
    [[nodiscard]] const Operation& op(Point p) const { return operations.at(static_cast<size_t>(p - 1)); }

    [[nodiscard]] const Resource& resource(ResourceId id) const {
        auto it = resources.find(id);
        if (it == resources.end())
            throw Error(ErrorKind::unknown_resource, "unknown resource id " + std::to_string(id));
        return it->second;
    }

    [[nodiscard]] std::optional<ResourceId> find_resource(std::string_view name) const {
        for (const auto& [id, r] : resources)
            if (r.name == name)
                return id;
        return std::nullopt;
    }

    [[nodiscard]] ResourceId resource_id(std::string_view name) const {
        if (auto id = find_resource(name))
            return *id;
        throw Error(ErrorKind::unknown_resource, "unknown resource '" + std::string(name) + "'");
    }

    [[nodiscard]] const Scope& scope(int id) const {
        for (const auto& s : scopes)
            if (s.id == id)
                return s;
        throw Error(ErrorKind::validate, "unknown scope " + std::to_string(id));
    }

    [[nodiscard]] std::shared_ptr<const FunctionDef> function(std::string_view name) const;

    [[nodiscard]] bool is_ancestor_scope(int ancestor, int scope_id) const {
        for (int s = scope_id; s >= 0; s = scope(s).parent)
            if (s == ancestor)
                return true;
        return false;
    }

    [[nodiscard]] ResourceId next_resource_id() const {
        return resources.empty() ? 0 : resources.rbegin()->first + 1;
    }

    [[nodiscard]] int next_scope_id() const {
        int m = -1;
        for (const auto& s : scopes)
            m = std::max(m, s.id);
        return m + 1;
    }

    /// Points touching `r`, ascending.
    [[nodiscard]] std::vector<Point> uses(ResourceId r) const {
        std::vector<Point> out;
        for (const auto& o : operations)
            if (o.touches(r))
                out.push_back(o.point);
        return out;
    }
};

struct FunctionDef {
    std::string name;
    std::vector<Param> params;
    /// Target iff the body (transitively) writes the parameter.
    std::vector<Role> param_roles;
    bool qfree = true;
    Program body;
    std::vector<std::string> returns;
};

inline std::shared_ptr<const FunctionDef> Program::function(std::string_view name) const {
    for (const auto& f : functions)
        if (f && f->name == name)
            return f;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Primitive gates

struct GateInfo {
    std::string_view name;
    int arity;
    int controls;
    bool qfree;
    bool self_inverse;
};

inline constexpr GateInfo kGates[] = {
    {"X", 1, 0, true, true},  {"H", 1, 0, false, true},   {"S", 1, 0, false, false},
    {"T", 1, 0, false, false}, {"CX", 2, 1, true, true},  {"CCX", 3, 2, true, true},
    {"SWAP", 2, 0, true, true},
};

inline const GateInfo* find_gate(std::string_view name) {
    for (const auto& g : kGates)
        if (g.name == name)
            return &g;
    return nullptr;
}

/// Canonical spelling: CNOT and TOFFOLI are accepted as synonyms.
inline std::optional<std::string> canonical_gate_name(std::string_view spelled) {
    if (spelled == "CNOT")
        return std::string("CX");
    if (spelled == "TOFFOLI")
        return std::string("CCX");
    if (find_gate(spelled))
        return std::string(spelled);
    return std::nullopt;
}

/// Operand roles of a primitive gate: SWAP writes both operands, all other
/// gates write the last operand and read the rest.
inline std::vector<Role> gate_roles(const GateInfo& g) {
    std::vector<Role> roles(static_cast<size_t>(g.arity), Role::control);
    if (g.name == "SWAP")
        std::fill(roles.begin(), roles.end(), Role::target);
    else
        roles.back() = Role::target;
    return roles;
}

inline bool is_self_inverse_gate(const Operation& op) {
    if (op.kind != OpKind::gate && op.kind != OpKind::adjoint_gate)
        return false;
    const auto* g = find_gate(op.gate_name);
    return g && g->self_inverse;
}

/// Text form used in reports and plans, e.g. "CX(t1, t2)" or "g†(x1, t2)".
inline std::string describe(const Operation& op) {
    std::string s = op.kind == OpKind::measure ? "measure" : op.gate_name;
    if (op.is_adjoint() && !is_self_inverse_gate(op))
        s += "†";
    s += "(";
    for (size_t i = 0; i < op.operands.size(); ++i) {
        if (i)
            s += ", ";
        s += op.operands[i].name;
    }
    s += ")";
    return s;
}

// ---------------------------------------------------------------------------
// Adjoints

/// Reverse-ordered sequence with every op replaced by its inverse. New ops
/// carry point 0 and reference the op they invert.
inline std::vector<Operation> adjoint_of(std::span<const Operation> ops) {
    std::vector<Operation> out;
    out.reserve(ops.size());
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        const Operation& op = *it;
        Operation inv = op;
        inv.point = 0;
        inv.inverse_of = op.point;
        switch (op.kind) {
            case OpKind::gate: inv.kind = OpKind::adjoint_gate; break;
            case OpKind::adjoint_gate: inv.kind = OpKind::gate; break;
            case OpKind::call: inv.kind = OpKind::adjoint_call; break;
            case OpKind::adjoint_call: inv.kind = OpKind::call; break;
            case OpKind::measure:
                throw Error(ErrorKind::irreversible,
                            "irreversible history: measurement at p" + std::to_string(op.point));
        }
        out.push_back(std::move(inv));
    }
    return out;
}

/// True iff `b` undoes `a`: same name and operands, opposite direction (or
/// the same self-inverse gate).
inline bool inverts(const Operation& a, const Operation& b) {
    if (a.gate_name != b.gate_name || a.operands.size() != b.operands.size())
        return false;
    for (size_t i = 0; i < a.operands.size(); ++i)
        if (a.operands[i].resource != b.operands[i].resource)
            return false;
    if (a.kind == OpKind::measure || b.kind == OpKind::measure)
        return false;
    if (is_self_inverse_gate(a) && is_self_inverse_gate(b))
        return true;
    return a.is_adjoint() != b.is_adjoint() && a.is_call() == b.is_call();
}

// ---------------------------------------------------------------------------
// Structural checks

/// Returns a list of violated invariants; empty when the program is valid.
inline std::vector<std::string> validate(const Program& p) {
    std::vector<std::string> problems;
    const int n = p.size();
    for (int i = 0; i < n; ++i) {
        const auto& op = p.operations[static_cast<size_t>(i)];
        if (op.point != i + 1)
            problems.push_back("op " + std::to_string(i) + " has point " + std::to_string(op.point));
        std::set<ResourceId> seen;
        for (const auto& o : op.operands) {
            if (!p.resources.count(o.resource))
                problems.push_back("p" + std::to_string(op.point) + " references unknown resource");
            if (!seen.insert(o.resource).second)
                problems.push_back("p" + std::to_string(op.point) + " repeats an operand");
        }
        if (op.kind == OpKind::measure && (op.operands.size() != 1 || op.operands[0].role != Role::target))
            problems.push_back("p" + std::to_string(op.point) + " measure needs exactly one target");
        if (op.is_adjoint() && op.inverse_of && (*op.inverse_of < 1 || *op.inverse_of > n))
            problems.push_back("p" + std::to_string(op.point) + " inverts an out-of-range point");
    }
    for (const auto& [id, r] : p.resources) {
        if (r.measured_at && (*r.measured_at < 1 || *r.measured_at > n))
            problems.push_back(r.name + " measured at invalid point");
        int declaring = 0;
        for (const auto& s : p.scopes)
            declaring += static_cast<int>(std::count(s.declared.begin(), s.declared.end(), id));
        if (declaring != 1)
            problems.push_back(r.name + " declared in " + std::to_string(declaring) + " scopes");
    }
    for (const auto& s : p.scopes) {
        if (s.parent >= 0) {
            const Scope* parent = nullptr;
            for (const auto& q : p.scopes)
                if (q.id == s.parent)
                    parent = &q;
            if (!parent)
                problems.push_back("scope " + std::to_string(s.id) + " has unknown parent");
            else if (s.entry <= s.exit && (s.entry < parent->entry || s.exit > parent->exit))
                problems.push_back("scope " + std::to_string(s.id) + " escapes its parent");
        }
        for (const auto& t : p.scopes) {
            if (s.id >= t.id || s.entry > s.exit || t.entry > t.exit)
                continue;
            bool overlap = !(s.exit < t.entry || t.exit < s.entry);
            bool nested = (s.entry <= t.entry && t.exit <= s.exit) || (t.entry <= s.entry && s.exit <= t.exit);
            if (overlap && !nested)
                problems.push_back("scopes " + std::to_string(s.id) + " and " + std::to_string(t.id) +
                                   " partially overlap");
        }
        for (ResourceId id : s.declared) {
            if (!p.resources.count(id))
                continue;
            for (Point u : p.uses(id)) {
                if (p.uncompute_phase_start && u >= *p.uncompute_phase_start)
                    continue;
                if (!s.contains(u))
                    problems.push_back(p.resource(id).name + " used at p" + std::to_string(u) +
                                       " outside its scope");
            }
        }
    }
    return problems;
}

/// Stable FNV-1a digest of the op sequence; plans carry it to detect reuse
/// against a different program.
inline std::uint64_t fingerprint(const Program& p) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    };
    for (const auto& op : p.operations) {
        mix(to_string(op.kind));
        mix(op.gate_name);
        for (const auto& o : op.operands) {
            mix(std::to_string(o.resource));
            mix(o.role == Role::target ? "t" : "c");
        }
    }
    return h;
}

/// Innermost scope whose range contains `p` (the root scope when none do).
inline int innermost_scope_at(const Program& prog, Point p) {
    int best = 0;
    int best_len = INT32_MAX;
    for (const auto& s : prog.scopes) {
        if (s.contains(p) && s.exit - s.entry <= best_len) {
            best = s.id;
            best_len = s.exit - s.entry;
        }
    }
    return best;
}

}  // namespace qlife
