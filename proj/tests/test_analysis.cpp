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


#include <gtest/gtest.h>

#include <set>
#include <tuple>

#include "support.hpp"

namespace qlife {
namespace {

using testing::load;
using testing::parse_or_throw;

std::set<std::pair<Point, Point>> edge_set(const DependenceGraph& g) {
    std::set<std::pair<Point, Point>> out;
    for (const auto& e : g.edges)
        out.insert({e.from, e.to});
    return out;
}

std::set<std::tuple<std::string, std::string, Point>> ent_set(const Program& p, const EntanglementTrace& t) {
    std::set<std::tuple<std::string, std::string, Point>> out;
    for (const auto& e : t.edges) {
        auto a = p.resource(e.a).name;
        auto b = p.resource(e.b).name;
        if (b < a)
            std::swap(a, b);
        out.insert({a, b, e.introduced});
    }
    return out;
}

TEST(Dependence, RunningExampleEdges) {
    Program p = load("running");
    auto g = build_dependence_graph(p);
    std::set<std::pair<Point, Point>> want = {{1, 3}, {2, 3}, {2, 4}, {3, 4}, {5, 7},
                                              {6, 8}, {7, 8}, {7, 9}, {8, 9}};
    EXPECT_EQ(edge_set(g), want);
    EXPECT_FALSE(g.has_edge(1, 2));
    EXPECT_FALSE(g.has_edge(5, 6));
}

TEST(Dependence, AccessKinds) {
    Program p = load("running");
    auto g = build_dependence_graph(p);
    for (const auto& e : g.edges) {
        if (e.from == 1 && e.to == 3) {
            EXPECT_EQ(p.resource(e.resource).name, "t1");
            EXPECT_EQ(e.access, Access::write_read);
        }
        if (e.from == 2 && e.to == 3) {
            EXPECT_EQ(p.resource(e.resource).name, "t2");
            EXPECT_EQ(e.access, Access::write_write);
        }
    }
    Program q = parse_or_throw("void m(ref qubit a, ref qubit b) { CX a, b; X a; }");
    auto h = build_dependence_graph(q);
    ASSERT_EQ(h.edges.size(), 1u);
    EXPECT_EQ(h.edges[0].access, Access::read_write);
}

TEST(Dependence, SharedControlsIndependent) {
    Program p = parse_or_throw("void m(qubit c, ref qubit a, ref qubit b) { CX c, a; CX c, b; }");
    EXPECT_TRUE(build_dependence_graph(p).edges.empty());
}

TEST(Entanglement, RunningExampleEdges) {
    Program p = load("running");
    auto t = build_entanglement_trace(p);
    std::set<std::tuple<std::string, std::string, Point>> want = {
        {"t1", "t2", 3}, {"t2", "y1", 4}, {"t3", "y2", 7}, {"t4", "y2", 8}};
    EXPECT_EQ(ent_set(p, t), want);
}

TEST(Entanglement, ComponentsGrow) {
    Program p = load("running");
    auto t = build_entanglement_trace(p);
    auto at = [&](Point q, const std::string& a, const std::string& b) {
        for (const auto& c : t.components_at(q))
            if (c.count(p.resource_id(a)) && c.count(p.resource_id(b)))
                return true;
        return false;
    };
    EXPECT_FALSE(at(2, "t1", "t2"));
    EXPECT_TRUE(at(3, "t1", "t2"));
    EXPECT_TRUE(at(4, "t1", "y1"));
    EXPECT_TRUE(at(9, "t3", "y2"));
    EXPECT_FALSE(at(9, "t1", "y2"));
}

TEST(Entanglement, RestorationMarkCutsEdges) {
    Program p = load("running");
    auto plan = plan_early_reclamation(p);
    auto t = build_entanglement_trace(p, plan.marks());
    for (const auto& e : t.edges) {
        EXPECT_TRUE(t.present(e, e.introduced));
        EXPECT_FALSE(t.present(e, 9)) << p.resource(e.a).name << "-" << p.resource(e.b).name;
    }
}

TEST(Liveness, ConservativeRunningExample) {
    Program p = load("running");
    auto a = analyze(p);
    auto lt = compute_lifetimes(p, a.liveness);
    auto is = [&](const std::string& n, Point lo, Point hi) {
        auto iv = lt.row(p.resource_id(n)).conservative;
        ASSERT_TRUE(iv) << n;
        EXPECT_EQ(iv->lo, lo) << n;
        EXPECT_EQ(iv->hi, hi) << n;
    };
    is("t1", 1, 9);
    is("t2", 2, 9);
    is("t3", 5, 9);
    is("t4", 6, 9);
    is("x1", 1, 9);
    is("y2", 1, 9);
    EXPECT_EQ(lt.wmax_conservative, 8);
    EXPECT_FALSE(a.liveness.live(p.resource_id("t3"), 4));
    EXPECT_TRUE(a.liveness.live(p.resource_id("t3"), 5));
}

TEST(Liveness, EffectiveRunningExample) {
    auto la = analyze_lifetimes(load("running"));
    Program p = load("running");
    auto eff = [&](const std::string& n) { return *la.table.row(p.resource_id(n)).effective; };
    EXPECT_EQ(eff("t1").lo, 1);
    EXPECT_EQ(eff("t1").hi, 4);
    EXPECT_EQ(eff("t2").lo, 2);
    EXPECT_EQ(eff("t2").hi, 4);
    EXPECT_EQ(eff("t3").lo, 5);
    EXPECT_EQ(eff("t4").lo, 6);
    EXPECT_EQ(la.table.wmax_effective, 6);
    EXPECT_EQ(la.table.live_effective[4].size(), 5u);
}

TEST(Liveness, UnusedTempNeverLive) {
    Program p = parse_or_throw("qubit[] m(qubit a, qubit y) { qubit t; CX a, y; return [y]; }");
    auto a = analyze(p);
    EXPECT_FALSE(a.liveness.interval(p.resource_id("t")));
}

TEST(Liveness, PersistentTempLiveToEnd) {
    Program p = parse_or_throw("qubit[] m(qubit a, qubit y) { qubit t; CX a, t; CX a, y; return [y, t]; }");
    auto a = analyze(p);
    auto iv = a.liveness.interval(p.resource_id("t"));
    ASSERT_TRUE(iv);
    EXPECT_EQ(iv->hi, 2);
}

TEST(Liveness, ContiguousAndWithinOnRandomPrograms) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        Program p = testing::random_program(seed);
        auto la = analyze_lifetimes(p);
        EXPECT_TRUE(la.analysis.liveness.contiguous()) << seed;
        for (const auto& row : la.table.rows) {
            if (row.effective) {
                ASSERT_TRUE(row.conservative) << seed;
                EXPECT_TRUE(row.effective->within(*row.conservative)) << seed << " " << row.name;
            }
        }
        EXPECT_LE(la.table.wmax_effective, la.table.wmax_conservative) << seed;
    }
}

TEST(Liveness, EffectiveWithinConservativeEnforced) {
    Program p = load("running");
    auto a = analyze(p);
    Liveness wider = a.liveness;
    auto& row = wider.table[p.resource_id("t3")];
    row[3] = 1;
    EXPECT_THROW(compute_lifetimes(p, a.liveness, &wider), Error);
}

TEST(CriticalPath, RunningExample) {
    auto cp = critical_path(build_dependence_graph(load("running")));
    EXPECT_EQ(cp.length, 4);
    EXPECT_EQ(cp.path, (std::vector<Point>{5, 7, 8, 9}));
}

TEST(CriticalPath, Chain) {
    Program p = parse_or_throw("void m(ref qubit a) { X a; X a; X a; X a; X a; }");
    EXPECT_EQ(critical_path(build_dependence_graph(p)).length, 5);
}

TEST(CriticalPath, WeightedCost) {
    Program p = load("running");
    auto g = build_dependence_graph(p);
    auto cp = critical_path(g, [&](Point q) { return q == 2 ? 10 : 1; });
    EXPECT_EQ(cp.length, 12);
    EXPECT_EQ(cp.path.front(), 2);
}

TEST(Compositionality, LifetimeMonotonicity) {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Program p = testing::random_program(5000 + seed, testing::nesting_options());
        EXPECT_EQ(testing::monotonicity_violation(p, &checked), std::nullopt) << seed;
    }
    EXPECT_GT(checked, 200);
}

TEST(Compositionality, NestedScopeIndependence) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto n = testing::nesting_case(seed);
        EXPECT_EQ(testing::independence_violation(n), std::nullopt) << seed << "\n" << n.with_block;
    }
}

}  // namespace
}  // namespace qlife
