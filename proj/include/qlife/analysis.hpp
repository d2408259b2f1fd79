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
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qlife/ir.hpp"

namespace qlife {

// ---------------------------------------------------------------------------
// Dependence graph

enum class Access { write_read, write_write, read_write };

inline std::string_view to_string(Access a) {
    switch (a) {
        case Access::write_read: return "write->read";
        case Access::write_write: return "write->write";
        case Access::read_write: return "read->write";
    }
    return "?";
}

struct DependenceEdge {
    Point from = 0;
    Point to = 0;
    ResourceId resource = -1;
    Access access = Access::write_read;
};

struct DependenceGraph {
    int n = 0;
    /// Sorted by (from, to); one edge per ordered pair, reason taken from
    /// the lowest shared resource id.
    std::vector<DependenceEdge> edges;

    [[nodiscard]] bool has_edge(Point i, Point j) const {
        return std::any_of(edges.begin(), edges.end(),
                           [&](const DependenceEdge& e) { return e.from == i && e.to == j; });
    }
    [[nodiscard]] std::vector<Point> predecessors(Point j) const {
        std::vector<Point> out;
        for (const auto& e : edges)
            if (e.to == j)
                out.push_back(e.from);
        return out;
    }
    [[nodiscard]] std::vector<Point> successors(Point i) const {
        std::vector<Point> out;
        for (const auto& e : edges)
            if (e.from == i)
                out.push_back(e.to);
        return out;
    }
};

inline DependenceGraph build_dependence_graph(const Program& program) {
    DependenceGraph g;
    g.n = program.size();
    for (Point j = 1; j <= g.n; ++j) {
        const auto& b = program.op(j);
        for (Point i = 1; i < j; ++i) {
            const auto& a = program.op(i);
            std::optional<DependenceEdge> best;
            for (const auto& oa : a.operands) {
                for (const auto& ob : b.operands) {
                    if (oa.resource != ob.resource)
                        continue;
                    bool wa = oa.role == Role::target;
                    bool wb = ob.role == Role::target;
                    if (!wa && !wb)
                        continue;
                    Access acc = wa ? (wb ? Access::write_write : Access::write_read) : Access::read_write;
                    if (!best || oa.resource < best->resource)
                        best = DependenceEdge{i, j, oa.resource, acc};
                }
            }
            if (best)
                g.edges.push_back(*best);
        }
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const DependenceEdge& x, const DependenceEdge& y) { return std::pair(x.from, x.to) < std::pair(y.from, y.to); });
    return g;
}

// ---------------------------------------------------------------------------
// Entanglement trace

struct EntanglementEdge {
    ResourceId a = -1;
    ResourceId b = -1;
    Point introduced = 0;
};

/// Edges incident to `resources` that exist at `after` are gone from
/// after + 1 onward.
struct RestorationMark {
    std::vector<ResourceId> resources;
    Point after = 0;
};

struct EntanglementTrace {
    int n = 0;
    std::vector<EntanglementEdge> edges;
    std::vector<RestorationMark> marks;

    [[nodiscard]] bool present(const EntanglementEdge& e, Point p) const {
        if (e.introduced > p)
            return false;
        for (const auto& m : marks) {
            if (m.after < e.introduced || m.after >= p)
                continue;
            for (ResourceId r : m.resources)
                if (r == e.a || r == e.b)
                    return false;
        }
        return true;
    }

    /// E_E(p).
    [[nodiscard]] std::vector<EntanglementEdge> edges_at(Point p) const {
        std::vector<EntanglementEdge> out;
        for (const auto& e : edges)
            if (present(e, p))
                out.push_back(e);
        return out;
    }

    /// Connected components of E_E(p) restricted to resources with an edge.
    [[nodiscard]] std::vector<std::set<ResourceId>> components_at(Point p) const {
        std::map<ResourceId, ResourceId> parent;
        std::function<ResourceId(ResourceId)> find = [&](ResourceId x) {
            while (parent[x] != x)
                x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& e : edges_at(p)) {
            parent.try_emplace(e.a, e.a);
            parent.try_emplace(e.b, e.b);
            parent[find(e.a)] = find(e.b);
        }
        std::map<ResourceId, std::set<ResourceId>> groups;
        for (const auto& [r, _] : parent)
            groups[find(r)].insert(r);
        std::vector<std::set<ResourceId>> out;
        for (auto& [_, s] : groups)
            out.push_back(std::move(s));
        return out;
    }
};

/// Resources written by at least one op of the program.
inline std::set<ResourceId> written_resources(const Program& program) {
    std::set<ResourceId> out;
    for (const auto& op : program.operations)
        for (const auto& o : op.operands)
            if (o.role == Role::target)
                out.insert(o.resource);
    return out;
}

/// Restoration records of a transformed program as trace marks.
inline std::vector<RestorationMark> restoration_marks(const Program& program) {
    std::vector<RestorationMark> out;
    for (const auto& r : program.restorations)
        out.push_back({r.resources, r.last});
    return out;
}

/// Every operand pair of a multi-qubit op gets an edge unless one side is
/// never written anywhere in the program.
/// Marks from the program's own restorations are always applied; `extra`
/// adds virtual ones (a plan evaluated on the untransformed program).
inline EntanglementTrace build_entanglement_trace(const Program& program,
                                                  const std::vector<RestorationMark>& extra = {}) {
    EntanglementTrace t;
    t.n = program.size();
    auto written = written_resources(program);
    for (const auto& op : program.operations) {
        for (size_t i = 0; i < op.operands.size(); ++i) {
            for (size_t j = i + 1; j < op.operands.size(); ++j) {
                ResourceId a = op.operands[i].resource;
                ResourceId b = op.operands[j].resource;
                if (!written.count(a) || !written.count(b))
                    continue;
                t.edges.push_back({std::min(a, b), std::max(a, b), op.point});
            }
        }
    }
    t.marks = restoration_marks(program);
    t.marks.insert(t.marks.end(), extra.begin(), extra.end());
    return t;
}

// ---------------------------------------------------------------------------
// Liveness

struct Interval {
    Point lo = 1;
    Point hi = 0;

    [[nodiscard]] bool contains(Point p) const { return lo <= p && p <= hi; }
    [[nodiscard]] bool within(const Interval& o) const { return o.lo <= lo && hi <= o.hi; }
    [[nodiscard]] bool overlaps(const Interval& o) const { return !(hi < o.lo || o.hi < lo); }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Liveness {
    int n = 0;
    /// table[r][p - 1]
    std::map<ResourceId, std::vector<char>> table;

    [[nodiscard]] bool live(ResourceId r, Point p) const {
        auto it = table.find(r);
        if (it == table.end() || p < 1 || p > n)
            return false;
        return it->second[static_cast<size_t>(p - 1)] != 0;
    }

    [[nodiscard]] std::optional<Interval> interval(ResourceId r) const {
        std::optional<Interval> out;
        for (Point p = 1; p <= n; ++p) {
            if (!live(r, p))
                continue;
            if (!out)
                out = Interval{p, p};
            out->hi = p;
        }
        return out;
    }

    [[nodiscard]] std::vector<ResourceId> live_set(Point p) const {
        std::vector<ResourceId> out;
        for (const auto& [r, row] : table)
            if (live(r, p))
                out.push_back(r);
        return out;
    }

    /// True iff every resource's live points form one interval.
    [[nodiscard]] bool contiguous() const {
        for (const auto& [r, row] : table) {
            auto iv = interval(r);
            if (!iv)
                continue;
            for (Point p = iv->lo; p <= iv->hi; ++p)
                if (!live(r, p))
                    return false;
        }
        return true;
    }
};

/// Least fixpoint of direct use plus propagation along E_E(p). A
/// temporary is directly live from its first to its last touch; interface
/// resources belong to the caller and are live on [1, n]; persistent
/// resources stay live to n. Holes left by propagation are closed so every
/// live range is an interval.
inline Liveness compute_liveness(const Program& program, const DependenceGraph& ddg, const EntanglementTrace& trace) {
    (void)ddg;
    Liveness lv;
    const int n = program.size();
    lv.n = n;
    for (const auto& [id, r] : program.resources) {
        auto& row = lv.table[id];
        row.assign(static_cast<size_t>(n), 0);
        auto uses = program.uses(id);
        Point lo = 0;
        Point hi = -1;
        if (r.is_interface()) {
            lo = 1;
            hi = n;
        } else if (!uses.empty()) {
            lo = uses.front();
            hi = r.persistent ? n : uses.back();
        }
        for (Point p = lo; p <= hi; ++p)
            row[static_cast<size_t>(p - 1)] = 1;
    }
    for (Point p = 1; p <= n; ++p) {
        auto edges = trace.edges_at(p);
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& e : edges) {
                char& la = lv.table[e.a][static_cast<size_t>(p - 1)];
                char& lb = lv.table[e.b][static_cast<size_t>(p - 1)];
                if (la != lb) {
                    la = lb = 1;
                    changed = true;
                }
            }
        }
    }
    for (auto& [id, row] : lv.table) {
        auto iv = lv.interval(id);
        if (iv)
            for (Point p = iv->lo; p <= iv->hi; ++p)
                row[static_cast<size_t>(p - 1)] = 1;
    }
    return lv;
}

// ---------------------------------------------------------------------------
// Lifetimes

struct LifetimeRow {
    ResourceId resource = -1;
    std::string name;
    ResourceKind kind = ResourceKind::temporary;
    std::optional<Interval> conservative;
    std::optional<Interval> effective;
};

struct LifetimeTable {
    int n = 0;
    std::vector<LifetimeRow> rows;
    /// live_*[p - 1] = L(p)
    std::vector<std::vector<ResourceId>> live_conservative;
    std::vector<std::vector<ResourceId>> live_effective;
    int wmax_conservative = 0;
    int wmax_effective = 0;

    [[nodiscard]] const LifetimeRow& row(ResourceId r) const {
        for (const auto& x : rows)
            if (x.resource == r)
                return x;
        throw Error(ErrorKind::unknown_resource, "no lifetime row for resource " + std::to_string(r));
    }
};

/// `effective` is the liveness after the plan's edge removals; pass
/// nullptr when there is no plan.
inline LifetimeTable compute_lifetimes(const Program& program, const Liveness& conservative,
                                       const Liveness* effective = nullptr) {
    const Liveness& eff = effective ? *effective : conservative;
    LifetimeTable t;
    t.n = program.size();
    for (const auto& [id, r] : program.resources) {
        LifetimeRow row{id, r.name, r.kind, conservative.interval(id), eff.interval(id)};
        if (row.effective && row.conservative && !row.effective->within(*row.conservative))
            throw Error(ErrorKind::internal, "effective lifetime of " + r.name + " escapes its conservative one");
        t.rows.push_back(std::move(row));
    }
    for (Point p = 1; p <= t.n; ++p) {
        t.live_conservative.push_back(conservative.live_set(p));
        t.live_effective.push_back(eff.live_set(p));
        t.wmax_conservative = std::max(t.wmax_conservative, static_cast<int>(t.live_conservative.back().size()));
        t.wmax_effective = std::max(t.wmax_effective, static_cast<int>(t.live_effective.back().size()));
    }
    return t;
}

/// Bundle of the static analyses for one program.
struct Analysis {
    DependenceGraph ddg;
    EntanglementTrace trace;
    Liveness liveness;
};

inline Analysis analyze(const Program& program, const std::vector<RestorationMark>& extra = {}) {
    Analysis a;
    a.ddg = build_dependence_graph(program);
    a.trace = build_entanglement_trace(program, extra);
    a.liveness = compute_liveness(program, a.ddg, a.trace);
    return a;
}

// ---------------------------------------------------------------------------
// Critical path

struct CriticalPath {
    int length = 0;
    std::vector<Point> path;
};

/// Longest cost-weighted path; ties prefer the lowest point index.
inline CriticalPath critical_path(const DependenceGraph& ddg, const std::function<int(Point)>& cost) {
    CriticalPath out;
    const int n = ddg.n;
    std::vector<int> dist(static_cast<size_t>(n) + 1, 0);
    std::vector<Point> prev(static_cast<size_t>(n) + 1, 0);
    std::vector<std::vector<Point>> preds(static_cast<size_t>(n) + 1);
    for (const auto& e : ddg.edges)
        preds[static_cast<size_t>(e.to)].push_back(e.from);
    for (auto& ps : preds)
        std::sort(ps.begin(), ps.end());
    Point end = 0;
    for (Point j = 1; j <= n; ++j) {
        int best = 0;
        for (Point i : preds[static_cast<size_t>(j)]) {
            if (dist[static_cast<size_t>(i)] > best) {
                best = dist[static_cast<size_t>(i)];
                prev[static_cast<size_t>(j)] = i;
            }
        }
        dist[static_cast<size_t>(j)] = best + cost(j);
        if (end == 0 || dist[static_cast<size_t>(j)] > dist[static_cast<size_t>(end)])
            end = j;
    }
    if (end == 0)
        return out;
    out.length = dist[static_cast<size_t>(end)];
    for (Point p = end; p != 0; p = prev[static_cast<size_t>(p)])
        out.path.push_back(p);
    std::reverse(out.path.begin(), out.path.end());
    return out;
}

inline CriticalPath critical_path(const DependenceGraph& ddg) {
    return critical_path(ddg, [](Point) { return 1; });
}

// ---------------------------------------------------------------------------
// Sub-blocks

/// The ops of scope `scope_id` (and its descendants) as a standalone
/// program, points shifted to start at 1. Resources keep their kinds;
/// those declared outside the block are attached to the new root scope.
inline Program extract_scope(const Program& program, int scope_id) {
    const Scope& root = program.scope(scope_id);
    Program out;
    out.signature = program.signature;
    out.signature.name = program.signature.name + "#scope" + std::to_string(scope_id);
    out.functions = program.functions;
    const Point shift = root.entry - 1;
    for (Point p = root.entry; p <= root.exit; ++p) {
        Operation op = program.op(p);
        op.point = p - shift;
        if (op.inverse_of)
            op.inverse_of = root.contains(*op.inverse_of) ? std::optional<Point>(*op.inverse_of - shift) : std::nullopt;
        out.operations.push_back(std::move(op));
    }
    std::set<ResourceId> used;
    for (const auto& op : out.operations)
        for (const auto& o : op.operands)
            used.insert(o.resource);
    for (const auto& s : program.scopes) {
        if (!program.is_ancestor_scope(scope_id, s.id))
            continue;
        Scope c = s;
        if (s.id == scope_id)
            c.parent = -1;
        if (c.entry <= c.exit) {
            c.entry -= shift;
            c.exit -= shift;
        } else {
            c.entry = std::max(1, c.entry - shift);
            c.exit = c.entry - 1;
        }
        for (ResourceId r : s.declared)
            used.insert(r);
        out.scopes.push_back(std::move(c));
    }
    for (ResourceId r : used) {
        Resource res = program.resource(r);
        if (res.measured_at)
            res.measured_at = root.contains(*res.measured_at) ? std::optional<Point>(*res.measured_at - shift) : std::nullopt;
        bool declared_inside = program.is_ancestor_scope(scope_id, res.scope_id);
        if (!declared_inside) {
            res.scope_id = scope_id;
            for (auto& s : out.scopes)
                if (s.id == scope_id)
                    s.declared.push_back(r);
        }
        out.resources[r] = res;
    }
    for (const auto& b : program.alias_bindings)
        if (program.is_ancestor_scope(scope_id, b.scope_id))
            out.alias_bindings.push_back(b);
    for (const auto& rest : program.restorations)
        if (root.contains(rest.first) && root.contains(rest.last))
            out.restorations.push_back({rest.first - shift, rest.last - shift, rest.resources});
    return out;
}

}  // namespace qlife
