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
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "qlife/analysis.hpp"
#include "qlife/inline.hpp"
#include "qlife/reclaim.hpp"

namespace qlife {

enum class Granularity { block, gate };

inline std::string_view to_string(Granularity g) { return g == Granularity::block ? "block" : "gate"; }

struct Schedule {
    Granularity granularity = Granularity::block;
    std::vector<std::vector<Point>> layers;
    /// layer_of[p - 1], 0-based.
    std::vector<int> layer_of;
    /// Distinct resources touched per layer.
    std::vector<int> active;

    [[nodiscard]] int depth() const { return static_cast<int>(layers.size()); }
};

/// Cycle-driven list scheduling on the DDG. At each layer the ready ops
/// are taken in priority order: forward ops before uncompute ops, then
/// longest remaining path, then lowest point. At gate granularity an op is
/// skipped when one of its operands is already busy in the layer; at block
/// granularity ops that only share controls may share a layer, so every op
/// lands at its ASAP layer. Ops from the uncompute phase start after every
/// forward op.
inline Schedule schedule_asap(const Program& program, const DependenceGraph& ddg, Granularity granularity) {
    if (granularity == Granularity::gate)
        for (const auto& op : program.operations)
            if (op.is_call())
                throw Error(ErrorKind::validate, "gate granularity requires an inlined program (call at p" +
                                                     std::to_string(op.point) + ")");
    const int n = program.size();
    const auto at = [](Point j) { return static_cast<size_t>(j); };
    Schedule s;
    s.granularity = granularity;
    s.layer_of.assign(at(n), -1);
    std::vector<std::vector<Point>> preds(at(n) + 1);
    std::vector<std::vector<Point>> succs(at(n) + 1);
    for (const auto& e : ddg.edges) {
        preds[at(e.to)].push_back(e.from);
        succs[at(e.from)].push_back(e.to);
    }
    const Point phase = program.uncompute_phase_start.value_or(n + 1);
    std::vector<char> uncompute(at(n) + 1, 0);
    for (Point j = phase; j <= n; ++j)
        uncompute[at(j)] = 1;
    for (const auto& r : program.restorations)
        for (Point j = std::max(1, r.first); j <= std::min(n, r.last); ++j)
            uncompute[at(j)] = 1;
    // Remaining path length; forward ops only count forward successors.
    std::vector<int> remaining(at(n) + 1, 1);
    for (Point j = n; j >= 1; --j)
        for (Point k : succs[at(j)])
            if (uncompute[at(j)] || !uncompute[at(k)])
                remaining[at(j)] = std::max(remaining[at(j)], remaining[at(k)] + 1);

    std::vector<int> waiting(at(n) + 1, 0);
    std::vector<Point> ready;
    for (Point j = 1; j <= n; ++j) {
        waiting[at(j)] = static_cast<int>(preds[at(j)].size());
        if (waiting[at(j)] == 0)
            ready.push_back(j);
    }
    const auto before = [&](Point a, Point b) {
        return std::tuple(uncompute[at(a)], -remaining[at(a)], a) < std::tuple(uncompute[at(b)], -remaining[at(b)], b);
    };
    int forward_left = std::min(n, phase - 1);
    int placed = 0;
    for (int layer = 0; placed < n; ++layer) {
        const bool phase_open = forward_left == 0;
        std::sort(ready.begin(), ready.end(), before);
        std::set<ResourceId> busy;
        std::vector<Point> now;
        std::vector<Point> later;
        for (Point j : ready) {
            const auto& op = program.op(j);
            bool ok = phase_open || j < phase;
            for (Point i : preds[at(j)])
                ok = ok && s.layer_of[at(i - 1)] < layer;
            if (ok && granularity == Granularity::gate)
                ok = std::none_of(op.operands.begin(), op.operands.end(),
                                  [&](const Operand& o) { return busy.count(o.resource) > 0; });
            if (!ok) {
                later.push_back(j);
                continue;
            }
            for (const auto& o : op.operands)
                busy.insert(o.resource);
            s.layer_of[at(j - 1)] = layer;
            now.push_back(j);
        }
        for (Point j : now) {
            ++placed;
            if (j < phase)
                --forward_left;
            for (Point k : succs[at(j)])
                if (--waiting[at(k)] == 0)
                    later.push_back(k);
        }
        ready = std::move(later);
    }
    int depth = 0;
    for (int l : s.layer_of)
        depth = std::max(depth, l + 1);
    s.layers.assign(static_cast<size_t>(depth), {});
    for (Point j = 1; j <= n; ++j)
        s.layers[static_cast<size_t>(s.layer_of[static_cast<size_t>(j - 1)])].push_back(j);
    for (const auto& layer : s.layers) {
        std::set<ResourceId> touched;
        for (Point j : layer)
            for (const auto& o : program.op(j).operands)
                touched.insert(o.resource);
        s.active.push_back(static_cast<int>(touched.size()));
    }
    return s;
}

inline Schedule schedule_asap(const Program& program, Granularity granularity) {
    return schedule_asap(program, build_dependence_graph(program), granularity);
}

// ---------------------------------------------------------------------------
// Register pooling

struct RegisterMap {
    std::map<ResourceId, int> qubit;
    int peak = 0;

    [[nodiscard]] int at(ResourceId r) const {
        auto it = qubit.find(r);
        if (it == qubit.end())
            throw Error(ErrorKind::unknown_resource, "resource " + std::to_string(r) + " has no physical qubit");
        return it->second;
    }
};

/// Linear scan over effective lifetimes, ordered by (start, id). A qubit
/// is reused once its previous holder's interval has ended; the lowest
/// free index wins.
inline RegisterMap allocate_registers(const LifetimeTable& lifetimes) {
    struct Item {
        Interval iv;
        ResourceId id;
    };
    std::vector<Item> items;
    for (const auto& row : lifetimes.rows)
        if (row.effective)
            items.push_back({*row.effective, row.resource});
    std::sort(items.begin(), items.end(),
              [](const Item& a, const Item& b) { return std::pair(a.iv.lo, a.id) < std::pair(b.iv.lo, b.id); });
    RegisterMap m;
    std::vector<Point> free_after;
    for (const auto& it : items) {
        int chosen = -1;
        for (size_t q = 0; q < free_after.size(); ++q) {
            if (free_after[q] < it.iv.lo) {
                chosen = static_cast<int>(q);
                break;
            }
        }
        if (chosen < 0) {
            chosen = static_cast<int>(free_after.size());
            free_after.push_back(0);
        }
        free_after[static_cast<size_t>(chosen)] = it.iv.hi;
        m.qubit[it.id] = chosen;
    }
    m.peak = static_cast<int>(free_after.size());
    return m;
}

/// Lifetimes of a (possibly transformed) program; restorations recorded in
/// the program are honoured.
inline LifetimeTable program_lifetimes(const Program& program) {
    auto a = analyze(program);
    return compute_lifetimes(program, a.liveness);
}

// ---------------------------------------------------------------------------
// Strategy comparison

enum class Strategy { none, global, early };

inline std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::none: return "none";
        case Strategy::global: return "global";
        case Strategy::early: return "early";
    }
    return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
    if (s == "none")
        return Strategy::none;
    if (s == "global")
        return Strategy::global;
    if (s == "early")
        return Strategy::early;
    return std::nullopt;
}

struct Compiled {
    Strategy strategy = Strategy::none;
    Program program;
    ReclamationPlan plan;
    std::vector<Diagnostic> warnings;
    /// Temporaries restored by the transformation.
    std::vector<ResourceId> restored;
};

inline Compiled compile(const Program& program, Strategy strategy) {
    Compiled c;
    c.strategy = strategy;
    switch (strategy) {
        case Strategy::none:
            c.program = program;
            break;
        case Strategy::global: {
            auto g = insert_global_uncompute(program);
            c.program = std::move(g.program);
            c.warnings = std::move(g.warnings);
            c.restored = std::move(g.restored);
            break;
        }
        case Strategy::early: {
            c.plan = plan_early_reclamation(program);
            c.program = insert_early_uncompute(program, c.plan);
            for (const auto& g : c.plan.groups)
                c.restored.insert(c.restored.end(), g.certificate.temps.begin(), g.certificate.temps.end());
            std::sort(c.restored.begin(), c.restored.end());
            break;
        }
    }
    return c;
}

struct StrategyMetrics {
    Strategy strategy = Strategy::none;
    int depth_block = 0;
    int depth_gate = 0;
    int wmax = 0;
    int peak_qubits = 0;
    int restored = 0;
    int ops = 0;
};

struct StrategyReport {
    StrategyMetrics none;
    StrategyMetrics global;
    StrategyMetrics early;

    [[nodiscard]] int depth_none(Granularity g = Granularity::block) const { return pick(none, g); }
    [[nodiscard]] int depth_global(Granularity g = Granularity::block) const { return pick(global, g); }
    [[nodiscard]] int depth_early(Granularity g = Granularity::block) const { return pick(early, g); }
    [[nodiscard]] int wmax_none() const { return none.wmax; }
    [[nodiscard]] int wmax_global() const { return global.wmax; }
    [[nodiscard]] int wmax_early() const { return early.wmax; }

  private:
    static int pick(const StrategyMetrics& m, Granularity g) {
        return g == Granularity::block ? m.depth_block : m.depth_gate;
    }
};

inline StrategyMetrics measure(const Compiled& c) {
    StrategyMetrics m;
    m.strategy = c.strategy;
    m.depth_block = schedule_asap(c.program, Granularity::block).depth();
    auto flat = inline_program(c.program).program;
    m.depth_gate = schedule_asap(flat, Granularity::gate).depth();
    auto lt = program_lifetimes(c.program);
    m.wmax = lt.wmax_conservative;
    m.peak_qubits = allocate_registers(lt).peak;
    m.restored = static_cast<int>(c.restored.size());
    m.ops = c.program.size();
    return m;
}

/// Metrics under all three strategies at both granularities. Throws an
/// internal error if early reclamation loses to the global baseline.
inline StrategyReport compare_strategies(const Program& program) {
    StrategyReport r;
    r.none = measure(compile(program, Strategy::none));
    r.global = measure(compile(program, Strategy::global));
    r.early = measure(compile(program, Strategy::early));
    auto fail = [&](const std::string& what) {
        throw Error(ErrorKind::internal, "strategy invariant violated on '" + program.signature.name + "': " + what);
    };
    if (r.early.depth_block > r.global.depth_block)
        fail("block depth_early > depth_global");
    if (r.early.depth_gate > r.global.depth_gate)
        fail("gate depth_early > depth_global");
    if (r.early.wmax > r.global.wmax)
        fail("wmax_early > wmax_global");
    return r;
}

}  // namespace qlife
