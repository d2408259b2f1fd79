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

#include "support.hpp"

namespace qlife {
namespace {

using testing::load;
using testing::parse_or_throw;

std::vector<std::string> segment_text(const PlannedGroup& g) {
    std::vector<std::string> out;
    for (const auto& op : g.segment)
        out.push_back(describe(op));
    return out;
}

std::vector<std::string> names(const Program& p, const std::vector<ResourceId>& ids) {
    std::vector<std::string> out;
    for (ResourceId r : ids)
        out.push_back(p.resource(r).name);
    return out;
}

RefusalReason refusal_reason(const Program& p, const std::string& temp) {
    auto plan = plan_early_reclamation(p);
    auto r = plan.refusal(p.resource_id(temp));
    EXPECT_TRUE(r) << temp;
    return r ? r->reason : RefusalReason::used_later;
}

TEST(Plan, RunningExampleSegments) {
    Program p = load("running");
    auto plan = plan_early_reclamation(p);
    EXPECT_TRUE(plan.refusals.empty());
    ASSERT_EQ(plan.groups.size(), 2u);
    const auto& g1 = plan.groups[0];
    EXPECT_EQ(names(p, g1.certificate.temps), (std::vector<std::string>{"t1", "t2"}));
    EXPECT_EQ(g1.certificate.boundary, 4);
    EXPECT_EQ(g1.insertion_point, 4);
    EXPECT_EQ(segment_text(g1), (std::vector<std::string>{"CX(t1, t2)", "g†(x1, t2)", "f†(x1, t1)"}));
    const auto& g2 = plan.groups[1];
    EXPECT_EQ(names(p, g2.certificate.temps), (std::vector<std::string>{"t3", "t4"}));
    EXPECT_EQ(g2.insertion_point, 8);
    EXPECT_EQ(segment_text(g2), (std::vector<std::string>{"h†(x2, t4)", "h†(x1, t3)"}));
}

TEST(Plan, RunningExampleCertificate) {
    Program p = load("running");
    auto a = analyze(p);
    auto cert = certify_isolability(p, a.trace, testing::ids(p, {"t1", "t2"}), 4);
    auto* c = std::get_if<IsolabilityCertificate>(&cert);
    ASSERT_TRUE(c);
    EXPECT_EQ(c->defining_ops, (std::vector<Point>{1, 2, 3}));
    EXPECT_EQ(c->transfer_ops, (std::vector<Point>{4}));
    for (const auto& w : c->control_stability)
        EXPECT_EQ(p.resource(w.control).name, "x1");
    EXPECT_FALSE(c->control_stability.empty());
}

TEST(Plan, TempGroups) {
    Program p = load("running");
    auto groups = temp_groups(p, build_entanglement_trace(p));
    ASSERT_EQ(groups.size(), 2u);
    EXPECT_EQ(names(p, groups[0]), (std::vector<std::string>{"t1", "t2"}));
    EXPECT_EQ(names(p, groups[1]), (std::vector<std::string>{"t3", "t4"}));
}

TEST(Certify, UsedLater) {
    Program p = load("running");
    auto a = analyze(p);
    auto cert = certify_isolability(p, a.trace, testing::ids(p, {"t1", "t2"}), 3);
    auto* r = std::get_if<Refusal>(&cert);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->reason, RefusalReason::used_later);
    EXPECT_EQ(r->point, 4);
}

TEST(Certify, OutOfRange) {
    Program p = load("running");
    auto a = analyze(p);
    try {
        certify_isolability(p, a.trace, testing::ids(p, {"t1", "t2"}), 12);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::out_of_range);
    }
}

TEST(Constraints, Measured) {
    Program p = load("measured");
    EXPECT_EQ(refusal_reason(p, "t"), RefusalReason::measured);
    EXPECT_EQ(to_string(RefusalReason::measured), "measured");
}

TEST(Constraints, AliasedLive) {
    Program p = load("alias_live");
    EXPECT_EQ(refusal_reason(p, "t"), RefusalReason::aliased_live);
    EXPECT_EQ(to_string(RefusalReason::aliased_live), "aliased-live");
}

TEST(Constraints, NonQfree) {
    Program p = load("nonqfree");
    EXPECT_EQ(refusal_reason(p, "t"), RefusalReason::non_qfree_history);
    EXPECT_EQ(to_string(RefusalReason::non_qfree_history), "non-qfree-history");
}

TEST(Constraints, CrossBoundary) {
    Program p = load("cross_boundary");
    EXPECT_EQ(refusal_reason(p, "t"), RefusalReason::cross_boundary_entangled);
    EXPECT_EQ(to_string(RefusalReason::cross_boundary_entangled), "cross-boundary-entangled");
}

TEST(Constraints, ControlRewritten) {
    Program p = parse_or_throw(
        "qubit[] m(qubit a, qubit y, qubit z) { qubit t; CX z, t; CX t, y; CX a, z; return [y, z]; }");
    auto plan = plan_early_reclamation(p);
    auto r = plan.refusal(p.resource_id("t"));
    ASSERT_TRUE(r);
    EXPECT_EQ(r->reason, RefusalReason::control_rewritten);
    EXPECT_EQ(r->point, 3);
}

TEST(Constraints, AliasUsedBeforeLastUseIsFine) {
    Program p = parse_or_throw(
        "qubit[] m(qubit x, qubit y, qubit z) { qubit t; alias u = t; CX x, u; CX u, z; CX t, y; return [y, z]; }");
    auto plan = plan_early_reclamation(p);
    EXPECT_TRUE(plan.reclaimed(p.resource_id("t")));
}

TEST(Constraints, UnusedTempIgnored) {
    Program p = parse_or_throw("qubit[] m(qubit a, qubit y) { qubit t, u; CX a, t; CX t, y; return [y]; }");
    auto plan = plan_early_reclamation(p);
    EXPECT_TRUE(plan.reclaimed(p.resource_id("t")));
    EXPECT_FALSE(plan.reclaimed(p.resource_id("u")));
    EXPECT_FALSE(plan.refusal(p.resource_id("u")));
}

TEST(Plan, DependentGroupsMerge) {
    Program p = load("nested");
    auto plan = plan_early_reclamation(p);
    EXPECT_TRUE(plan.refusals.empty());
    const PlannedGroup* uv = nullptr;
    for (const auto& g : plan.groups)
        if (names(p, g.certificate.temps) == std::vector<std::string>{"u", "v"})
            uv = &g;
    ASSERT_TRUE(uv);
    EXPECT_EQ(segment_text(*uv), (std::vector<std::string>{"CX(u, v)", "CX(a, u)"}));
    EXPECT_EQ(uv->scope_id, p.resource(p.resource_id("v")).scope_id);
}

TEST(Insert, EarlyRunningExample) {
    Program p = load("running");
    auto plan = plan_early_reclamation(p);
    Program e = insert_early_uncompute(p, plan);
    EXPECT_TRUE(validate(e).empty());
    ASSERT_EQ(e.size(), 14);
    EXPECT_EQ(describe(e.op(5)), "CX(t1, t2)");
    EXPECT_EQ(describe(e.op(6)), "g†(x1, t2)");
    EXPECT_EQ(describe(e.op(7)), "f†(x1, t1)");
    EXPECT_EQ(describe(e.op(8)), "h(x1, t3)");
    ASSERT_EQ(e.restorations.size(), 2u);
    EXPECT_EQ(e.restorations[0].first, 5);
    EXPECT_EQ(e.restorations[0].last, 7);
    EXPECT_EQ(e.op(6).inverse_of, std::optional<Point>(2));
    EXPECT_FALSE(e.uncompute_phase_start);
}

TEST(Insert, StalePlanRejected) {
    Program p = load("running");
    auto plan = plan_early_reclamation(p);
    Program other = load("nested");
    try {
        insert_early_uncompute(other, plan);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::stale_plan);
    }
}

TEST(Insert, GlobalRunningExample) {
    Program p = load("running");
    auto g = insert_global_uncompute(p);
    EXPECT_TRUE(validate(g.program).empty());
    EXPECT_TRUE(g.warnings.empty());
    ASSERT_EQ(g.program.size(), 14);
    EXPECT_EQ(g.program.uncompute_phase_start, std::optional<Point>(10));
    std::vector<std::string> suffix;
    for (Point j = 10; j <= 14; ++j)
        suffix.push_back(describe(g.program.op(j)));
    EXPECT_EQ(suffix, (std::vector<std::string>{"h†(x2, t4)", "h†(x1, t3)", "CX(t1, t2)",
                                                "g†(x1, t2)", "f†(x1, t1)"}));
    EXPECT_EQ(names(p, g.restored), (std::vector<std::string>{"t1", "t2", "t3", "t4"}));
}

TEST(Insert, GlobalExcludesDirtyTemps) {
    for (const char* name : {"measured", "nonqfree", "cross_boundary"}) {
        Program p = load(name);
        auto g = insert_global_uncompute(p);
        EXPECT_TRUE(g.restored.empty()) << name;
        ASSERT_FALSE(g.warnings.empty()) << name;
        EXPECT_EQ(g.warnings[0].code, "dirty-temporary") << name;
    }
}

TEST(Insert, ForcedPlanSkipsMeasurement) {
    Program p = load("measured");
    auto plan = forced_plan(p, testing::ids(p, {"t"}), 3);
    ASSERT_EQ(plan.groups.size(), 1u);
    EXPECT_EQ(segment_text(plan.groups[0]), (std::vector<std::string>{"H(t)"}));
}

TEST(Params, ByValueViolation) {
    Program p = load("param_violation");
    auto ds = enforce_param_semantics(p);
    ASSERT_TRUE(has_errors(ds));
    EXPECT_EQ(ds[0].code, "pass-by-value");
    EXPECT_NE(ds[0].message.find("'flip'"), std::string::npos);
}

TEST(Params, RefAndRestoredValueAccepted) {
    for (const char* name : {"param_ref", "param_value", "running", "running_ref"})
        EXPECT_FALSE(has_errors(enforce_param_semantics(load(name)))) << name;
}

TEST(Params, RestoredByValueIsControlForCaller) {
    Program p = load("param_value");
    const auto& call = p.op(2);
    EXPECT_EQ(call.gate_name, "twiddle");
    EXPECT_EQ(call.operands[0].role, Role::control);
    EXPECT_EQ(call.operands[1].role, Role::target);
}

TEST(Params, ResidualEntanglementWarning) {
    Program p = load("cross_boundary");
    auto ds = enforce_param_semantics(p);
    EXPECT_FALSE(has_errors(ds));
    ASSERT_FALSE(ds.empty());
    EXPECT_EQ(ds[0].code, "residual-entanglement");
}

TEST(Plan, RandomProgramInvariants) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        Program p = testing::random_program(seed);
        auto plan = plan_early_reclamation(p);
        std::set<ResourceId> seen;
        for (const auto& g : plan.groups) {
            for (ResourceId t : g.certificate.temps) {
                EXPECT_TRUE(seen.insert(t).second) << seed;
                EXPECT_FALSE(plan.refusal(t)) << seed;
            }
            std::vector<Operation> history;
            for (Point d : g.certificate.defining_ops)
                history.push_back(p.op(d));
            auto inv = adjoint_of(history);
            ASSERT_EQ(inv.size(), g.segment.size()) << seed;
            for (size_t i = 0; i < inv.size(); ++i)
                EXPECT_TRUE(inverts(history[history.size() - 1 - i], g.segment[i])) << seed;
            for (ResourceId t : g.certificate.temps)
                for (Point u : p.uses(t))
                    EXPECT_LE(u, g.insertion_point) << seed;
        }
        for (const auto& [id, r] : p.resources) {
            if (r.kind == ResourceKind::temporary && !p.uses(id).empty()) {
                EXPECT_TRUE(plan.reclaimed(id) || plan.refusal(id)) << seed << " " << r.name;
            }
        }
        Program e = insert_early_uncompute(p, plan);
        EXPECT_TRUE(validate(e).empty()) << seed;
        Program g = insert_global_uncompute(p).program;
        EXPECT_TRUE(validate(g).empty()) << seed;
    }
}

}  // namespace
}  // namespace qlife
