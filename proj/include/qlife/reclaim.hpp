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
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qlife/analysis.hpp"
#include "qlife/frontend.hpp"
#include "qlife/ir.hpp"

namespace qlife {

enum class RefusalReason {
    measured,
    aliased_live,
    non_qfree_history,
    cross_boundary_entangled,
    used_later,
    control_rewritten,
};

inline std::string_view to_string(RefusalReason r) {
    switch (r) {
        case RefusalReason::measured: return "measured";
        case RefusalReason::aliased_live: return "aliased-live";
        case RefusalReason::non_qfree_history: return "non-qfree-history";
        case RefusalReason::cross_boundary_entangled: return "cross-boundary-entangled";
        case RefusalReason::used_later: return "used-later";
        case RefusalReason::control_rewritten: return "control-rewritten";
    }
    return "?";
}

struct Refusal {
    ResourceId resource = -1;
    RefusalReason reason = RefusalReason::used_later;
    Point point = 0;
    std::string detail;
};

struct ControlWitness {
    Point defining_op = 0;
    ResourceId control = -1;
};

struct IsolabilityCertificate {
    std::vector<ResourceId> temps;
    Point boundary = 0;
    std::vector<Point> defining_ops;
    std::vector<Point> transfer_ops;
    /// Controls of defining ops not written in (defining_op, boundary].
    std::vector<ControlWitness> control_stability;
};

using Certification = std::variant<IsolabilityCertificate, Refusal>;

inline std::vector<Point> defining_ops(const Program& program, const std::vector<ResourceId>& temps, Point upto) {
    std::vector<Point> out;
    for (Point q = 1; q <= std::min(upto, program.size()); ++q) {
        const auto& op = program.op(q);
        if (std::any_of(temps.begin(), temps.end(), [&](ResourceId t) { return op.writes(t); }))
            out.push_back(q);
    }
    return out;
}

/// Static output-isolability check of `temps` at boundary `p`.
inline Certification certify_isolability(const Program& program, const EntanglementTrace& trace,
                                         const std::vector<ResourceId>& temps, Point p) {
    (void)trace;
    for (ResourceId t : temps)
        (void)program.resource(t);
    if (p < 1 || p > program.size())
        throw Error(ErrorKind::out_of_range, "point p" + std::to_string(p) + " outside 1.." + std::to_string(program.size()));
    std::set<ResourceId> T(temps.begin(), temps.end());
    auto in_T = [&](ResourceId r) { return T.count(r) > 0; };

    for (Point q = p + 1; q <= program.size(); ++q)
        for (const auto& o : program.op(q).operands)
            if (in_T(o.resource))
                return Refusal{o.resource, RefusalReason::used_later, q,
                               program.resource(o.resource).name + " is touched again at p" + std::to_string(q)};

    IsolabilityCertificate cert;
    cert.temps = temps;
    cert.boundary = p;
    for (Point q = 1; q <= p; ++q) {
        const auto& op = program.op(q);
        bool touches = std::any_of(op.operands.begin(), op.operands.end(), [&](const Operand& o) { return in_T(o.resource); });
        if (!touches)
            continue;
        bool defines = std::any_of(op.operands.begin(), op.operands.end(),
                                   [&](const Operand& o) { return in_T(o.resource) && o.role == Role::target; });
        (defines ? cert.defining_ops : cert.transfer_ops).push_back(q);
    }
    auto first_target = [&](const Operation& op) {
        for (const auto& o : op.operands)
            if (in_T(o.resource) && o.role == Role::target)
                return o.resource;
        return temps.front();
    };
    for (Point d : cert.defining_ops) {
        const auto& op = program.op(d);
        if (!op.qfree)
            return Refusal{first_target(op), RefusalReason::non_qfree_history, d,
                           describe(op) + " is not a basis permutation"};
    }
    for (Point d : cert.defining_ops) {
        const auto& op = program.op(d);
        for (const auto& o : op.operands) {
            if (in_T(o.resource))
                continue;
            if (o.role == Role::target)
                return Refusal{first_target(op), RefusalReason::cross_boundary_entangled, d,
                               describe(op) + " also writes " + program.resource(o.resource).name};
            for (Point q = d + 1; q <= p; ++q)
                if (program.op(q).writes(o.resource))
                    return Refusal{first_target(op), RefusalReason::cross_boundary_entangled, q,
                                   "control " + program.resource(o.resource).name + " of " + describe(op) +
                                       " is rewritten at p" + std::to_string(q)};
            cert.control_stability.push_back({d, o.resource});
        }
    }
    return cert;
}

/// Non-persistent temporaries that can be reclaimed at all.
inline bool reclaimable_temp(const Resource& r) {
    return r.kind == ResourceKind::temporary && !r.persistent;
}

inline std::optional<Interval> touch_interval(const Program& program, ResourceId r) {
    auto uses = program.uses(r);
    if (uses.empty())
        return std::nullopt;
    return Interval{uses.front(), uses.back()};
}

/// Same-scope temporaries that share a component of the final entanglement
/// graph and whose touch intervals overlap (closed transitively). Groups
/// are ordered by their last touch, then lowest id.
inline std::vector<std::vector<ResourceId>> temp_groups(const Program& program, const EntanglementTrace& trace) {
    std::vector<ResourceId> temps;
    for (const auto& [id, r] : program.resources)
        if (reclaimable_temp(r) && touch_interval(program, id))
            temps.push_back(id);
    std::map<ResourceId, int> component;
    int next = 0;
    for (const auto& comp : trace.components_at(program.size())) {
        for (ResourceId r : comp)
            component[r] = next;
        ++next;
    }
    std::map<ResourceId, ResourceId> parent;
    for (ResourceId t : temps)
        parent[t] = t;
    auto find = [&](ResourceId x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (size_t i = 0; i < temps.size(); ++i) {
        for (size_t j = i + 1; j < temps.size(); ++j) {
            ResourceId a = temps[i];
            ResourceId b = temps[j];
            if (program.resource(a).scope_id != program.resource(b).scope_id)
                continue;
            if (!component.count(a) || !component.count(b) || component[a] != component[b])
                continue;
            if (!touch_interval(program, a)->overlaps(*touch_interval(program, b)))
                continue;
            parent[find(a)] = find(b);
        }
    }
    std::map<ResourceId, std::vector<ResourceId>> by_root;
    for (ResourceId t : temps)
        by_root[find(t)].push_back(t);
    std::vector<std::vector<ResourceId>> out;
    for (auto& [_, g] : by_root)
        out.push_back(std::move(g));
    auto last = [&](const std::vector<ResourceId>& g) {
        Point hi = 0;
        for (ResourceId t : g)
            hi = std::max(hi, touch_interval(program, t)->hi);
        return hi;
    };
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        return std::pair(last(a), a.front()) < std::pair(last(b), b.front());
    });
    return out;
}

inline Point group_boundary(const Program& program, const std::vector<ResourceId>& group) {
    Point hi = 0;
    for (ResourceId t : group)
        if (auto iv = touch_interval(program, t))
            hi = std::max(hi, iv->hi);
    return hi;
}

/// Last point touching `r` through the identifier `name`.
inline std::optional<Point> last_use_by_name(const Program& program, ResourceId r, const std::string& name) {
    std::optional<Point> out;
    for (const auto& op : program.operations)
        for (const auto& o : op.operands)
            if (o.resource == r && o.name == name)
                out = op.point;
    return out;
}

/// Constraint refusals: measured temporaries, temporaries with an alias
/// still in use after the last use of the declared name, and groups
/// entangled with resources outside their scope that fail certification.
inline std::vector<Refusal> check_constraints(const Program& program, const Liveness& liveness,
                                              const EntanglementTrace& trace) {
    std::vector<Refusal> out;
    std::set<ResourceId> refused;
    for (const auto& [id, r] : program.resources) {
        if (!reclaimable_temp(r))
            continue;
        if (r.measured_at) {
            out.push_back({id, RefusalReason::measured, *r.measured_at,
                           r.name + " is measured at p" + std::to_string(*r.measured_at)});
            refused.insert(id);
            continue;
        }
        auto own = last_use_by_name(program, id, r.name);
        if (!own)
            continue;
        for (const auto& alias : r.aliases) {
            if (alias == r.name)
                continue;
            auto other = last_use_by_name(program, id, alias);
            if (other && *other > *own && liveness.live(id, *own + 1)) {
                out.push_back({id, RefusalReason::aliased_live, *own,
                               "alias " + alias + " of " + r.name + " is used at p" + std::to_string(*other)});
                refused.insert(id);
                break;
            }
        }
    }
    for (const auto& group : temp_groups(program, trace)) {
        if (std::any_of(group.begin(), group.end(), [&](ResourceId t) { return refused.count(t) > 0; }))
            continue;
        Point p = group_boundary(program, group);
        int scope_id = program.resource(group.front()).scope_id;
        bool crosses = false;
        for (const auto& e : trace.edges_at(p)) {
            for (auto [mine, other] : {std::pair(e.a, e.b), std::pair(e.b, e.a)}) {
                if (std::find(group.begin(), group.end(), mine) == group.end())
                    continue;
                if (!program.is_ancestor_scope(scope_id, program.resource(other).scope_id) ||
                    program.resource(other).is_interface())
                    crosses = true;
            }
        }
        if (!crosses)
            continue;
        auto cert = certify_isolability(program, trace, group, p);
        if (auto* ref = std::get_if<Refusal>(&cert); ref && ref->reason == RefusalReason::cross_boundary_entangled)
            for (ResourceId t : group)
                out.push_back({t, RefusalReason::cross_boundary_entangled, ref->point, ref->detail});
    }
    return out;
}

struct PlannedGroup {
    IsolabilityCertificate certificate;
    int scope_id = 0;
    /// Segment is spliced right after this point.
    Point insertion_point = 0;
    std::vector<Operation> segment;
};

struct ReclamationPlan {
    std::uint64_t program_fingerprint = 0;
    std::vector<PlannedGroup> groups;
    std::vector<Refusal> refusals;

    [[nodiscard]] bool reclaimed(ResourceId r) const {
        for (const auto& g : groups)
            if (std::find(g.certificate.temps.begin(), g.certificate.temps.end(), r) != g.certificate.temps.end())
                return true;
        return false;
    }

    [[nodiscard]] std::optional<Refusal> refusal(ResourceId r) const {
        for (const auto& x : refusals)
            if (x.resource == r)
                return x;
        return std::nullopt;
    }

    /// Virtual restorations on the planned program.
    [[nodiscard]] std::vector<RestorationMark> marks() const {
        std::vector<RestorationMark> out;
        for (const auto& g : groups)
            out.push_back({g.certificate.temps, g.insertion_point});
        return out;
    }
};

namespace detail {

/// Innermost declaring scope of `temps`, if their scopes form a chain.
inline std::optional<int> innermost_scope(const Program& program, const std::vector<ResourceId>& temps) {
    int best = program.resource(temps.front()).scope_id;
    for (ResourceId t : temps) {
        int s = program.resource(t).scope_id;
        if (program.is_ancestor_scope(best, s))
            best = s;
        else if (!program.is_ancestor_scope(s, best))
            return std::nullopt;
    }
    return best;
}

}  // namespace detail

inline PlannedGroup make_group(const Program& program, IsolabilityCertificate cert) {
    PlannedGroup g;
    g.scope_id = detail::innermost_scope(program, cert.temps).value_or(program.resource(cert.temps.front()).scope_id);
    g.insertion_point = cert.boundary;
    std::vector<Operation> history;
    for (Point d : cert.defining_ops)
        history.push_back(program.op(d));
    g.segment = adjoint_of(history);
    g.certificate = std::move(cert);
    return g;
}

inline ReclamationPlan plan_early_reclamation(const Program& program, const DependenceGraph& ddg,
                                              const EntanglementTrace& trace, const Liveness& liveness) {
    (void)ddg;
    ReclamationPlan plan;
    plan.program_fingerprint = fingerprint(program);
    auto forced = check_constraints(program, liveness, trace);
    std::map<ResourceId, Refusal> forced_by;
    for (const auto& r : forced)
        forced_by.try_emplace(r.resource, r);

    auto refuse_all = [&](const std::vector<ResourceId>& temps, const Refusal& why) {
        for (ResourceId t : temps) {
            Refusal r = why;
            r.resource = t;
            plan.refusals.push_back(r);
        }
    };
    auto rewritten_control = [&](const IsolabilityCertificate& c) -> std::optional<Refusal> {
        for (const auto& w : c.control_stability)
            for (Point q = c.boundary + 1; q <= program.size(); ++q)
                if (program.op(q).writes(w.control))
                    return Refusal{c.temps.front(), RefusalReason::control_rewritten, q,
                                   "control " + program.resource(w.control).name + " of " +
                                       describe(program.op(w.defining_op)) + " is rewritten at p" +
                                       std::to_string(q)};
        return std::nullopt;
    };

    for (const auto& group : temp_groups(program, trace)) {
        Point p = group_boundary(program, group);
        std::optional<Refusal> first;
        for (ResourceId t : group)
            if (forced_by.count(t) && !first)
                first = forced_by.at(t);
        if (first) {
            for (ResourceId t : group) {
                Refusal r = forced_by.count(t) ? forced_by.at(t) : *first;
                if (!forced_by.count(t))
                    r.detail = "grouped with " + program.resource(first->resource).name + ": " + first->detail;
                r.resource = t;
                plan.refusals.push_back(r);
            }
            continue;
        }
        auto cert = certify_isolability(program, trace, group, p);
        if (auto* ref = std::get_if<Refusal>(&cert)) {
            refuse_all(group, *ref);
            continue;
        }
        auto& c = std::get<IsolabilityCertificate>(cert);
        if (auto rewritten = rewritten_control(c)) {
            refuse_all(group, *rewritten);
            continue;
        }
        plan.groups.push_back(make_group(program, std::move(c)));
    }

    // A group whose temps control the history of a later group must wait
    // for it: the later adjoint reads them.
    for (bool changed = true; changed;) {
        changed = false;
        std::sort(plan.groups.begin(), plan.groups.end(), [](const PlannedGroup& a, const PlannedGroup& b) {
            return a.insertion_point < b.insertion_point;
        });
        for (size_t i = 0; i < plan.groups.size() && !changed; ++i) {
            for (size_t j = i + 1; j < plan.groups.size() && !changed; ++j) {
                const auto& early = plan.groups[i];
                const auto& late = plan.groups[j];
                if (early.insertion_point >= late.insertion_point)
                    continue;
                std::optional<std::pair<ResourceId, Point>> link;
                for (Point d : late.certificate.defining_ops)
                    for (const auto& o : program.op(d).operands)
                        if (!link && o.role == Role::control &&
                            std::find(early.certificate.temps.begin(), early.certificate.temps.end(), o.resource) !=
                                early.certificate.temps.end())
                            link = std::pair(o.resource, d);
                if (!link)
                    continue;
                changed = true;
                std::vector<ResourceId> merged = early.certificate.temps;
                merged.insert(merged.end(), late.certificate.temps.begin(), late.certificate.temps.end());
                std::sort(merged.begin(), merged.end());
                const Point p = late.certificate.boundary;
                auto cert = certify_isolability(program, trace, merged, p);
                auto* c = std::get_if<IsolabilityCertificate>(&cert);
                if (c && detail::innermost_scope(program, merged) && !rewritten_control(*c)) {
                    auto g = make_group(program, std::move(*c));
                    plan.groups.erase(plan.groups.begin() + static_cast<std::ptrdiff_t>(j));
                    plan.groups[i] = std::move(g);
                } else {
                    refuse_all(late.certificate.temps,
                               Refusal{late.certificate.temps.front(), RefusalReason::control_rewritten,
                                       early.insertion_point,
                                       "control " + program.resource(link->first).name + " of " +
                                           describe(program.op(link->second)) + " is restored after p" +
                                           std::to_string(early.insertion_point)});
                    plan.groups.erase(plan.groups.begin() + static_cast<std::ptrdiff_t>(j));
                }
            }
        }
    }
    std::sort(plan.refusals.begin(), plan.refusals.end(),
              [](const Refusal& a, const Refusal& b) { return a.resource < b.resource; });
    return plan;
}

inline ReclamationPlan plan_early_reclamation(const Program& program) {
    auto a = analyze(program);
    return plan_early_reclamation(program, a.ddg, a.trace, a.liveness);
}

/// Uncertified plan reclaiming `temps` after `p`: the unitary part of
/// their history up to `p` reversed. Negative controls only.
inline ReclamationPlan forced_plan(const Program& program, const std::vector<ResourceId>& temps, Point p) {
    ReclamationPlan plan;
    plan.program_fingerprint = fingerprint(program);
    PlannedGroup g;
    g.certificate.temps = temps;
    g.certificate.boundary = p;
    g.scope_id = program.resource(temps.front()).scope_id;
    g.insertion_point = p;
    std::vector<Operation> history;
    for (Point d : defining_ops(program, temps, p)) {
        if (program.op(d).kind == OpKind::measure)
            continue;
        g.certificate.defining_ops.push_back(d);
        history.push_back(program.op(d));
    }
    g.segment = adjoint_of(history);
    plan.groups.push_back(std::move(g));
    return plan;
}

// ---------------------------------------------------------------------------
// Transformations

namespace detail {

struct Insertion {
    Point after = 0;
    int scope_id = 0;
    std::vector<ResourceId> temps;
    std::vector<Operation> segment;
};

/// Splices segments after the given points and renumbers. Segment ops keep
/// `inverse_of` pointing at original points; they are remapped here.
inline Program splice(const Program& program, std::vector<Insertion> insertions) {
    std::stable_sort(insertions.begin(), insertions.end(),
                     [](const Insertion& a, const Insertion& b) { return a.after < b.after; });
    const int n = program.size();
    Program out = program;
    out.operations.clear();
    std::vector<Point> moved(static_cast<size_t>(n) + 1, 0);
    std::vector<int> added_after(static_cast<size_t>(n) + 1, 0);
    std::vector<Restoration> fresh;
    size_t k = 0;
    auto flush = [&](Point p) {
        for (; k < insertions.size() && insertions[k].after == p; ++k) {
            Restoration r;
            r.first = out.size() + 1;
            for (const auto& op : insertions[k].segment) {
                Operation copy = op;
                copy.point = out.size() + 1;
                if (copy.inverse_of)
                    copy.inverse_of = moved.at(static_cast<size_t>(*copy.inverse_of));
                out.operations.push_back(std::move(copy));
            }
            r.last = out.size();
            r.resources = insertions[k].temps;
            fresh.push_back(std::move(r));
            added_after[static_cast<size_t>(p)] += static_cast<int>(insertions[k].segment.size());
        }
    };
    flush(0);
    for (Point p = 1; p <= n; ++p) {
        Operation op = program.op(p);
        op.point = out.size() + 1;
        moved[static_cast<size_t>(p)] = op.point;
        if (op.inverse_of)
            op.inverse_of = moved.at(static_cast<size_t>(*op.inverse_of));
        out.operations.push_back(std::move(op));
        flush(p);
    }
    if (k != insertions.size())
        throw Error(ErrorKind::out_of_range, "insertion point beyond program end");

    auto shift_before = [&](Point q) {
        int s = 0;
        for (Point p = 0; p < q && p <= n; ++p)
            s += added_after[static_cast<size_t>(p)];
        return s;
    };
    auto map_point = [&](Point q) { return q < 1 ? q : q + shift_before(q); };

    for (auto& s : out.scopes) {
        const Scope& old = program.scope(s.id);
        if (old.entry > old.exit) {
            s.entry = old.entry + shift_before(old.entry);
            s.exit = s.entry - 1;
            continue;
        }
        s.entry = map_point(old.entry);
        s.exit = old.exit + shift_before(old.exit);
        for (const auto& ins : insertions)
            if (ins.after == old.exit && out.is_ancestor_scope(s.id, ins.scope_id))
                s.exit += static_cast<int>(ins.segment.size());
    }
    if (auto& root = out.scopes.front(); root.parent < 0)
        root.exit = std::max(root.exit, out.size());
    for (auto& [id, r] : out.resources)
        if (r.measured_at)
            r.measured_at = moved.at(static_cast<size_t>(*r.measured_at));
    for (auto& r : out.restorations) {
        r.first = moved.at(static_cast<size_t>(r.first));
        r.last = moved.at(static_cast<size_t>(r.last));
    }
    out.restorations.insert(out.restorations.end(), fresh.begin(), fresh.end());
    if (out.uncompute_phase_start)
        out.uncompute_phase_start = map_point(*out.uncompute_phase_start);
    return out;
}

}  // namespace detail

inline Program insert_early_uncompute(const Program& program, const ReclamationPlan& plan) {
    if (plan.program_fingerprint != fingerprint(program))
        throw Error(ErrorKind::stale_plan, "stale plan: program fingerprint mismatch");
    std::vector<detail::Insertion> ins;
    for (const auto& g : plan.groups)
        ins.push_back({g.insertion_point, g.scope_id, g.certificate.temps, g.segment});
    return detail::splice(program, std::move(ins));
}

struct GlobalUncompute {
    Program program;
    std::vector<ResourceId> restored;
    std::vector<Diagnostic> warnings;
};

/// Appends the reversed history of every restorable temporary after p_n.
/// Temporaries that are measured, have non-qfree history, share a defining
/// op with a non-temporary target, or depend on a control rewritten later
/// outside the suffix stay dirty with a warning.
inline GlobalUncompute insert_global_uncompute(const Program& program) {
    GlobalUncompute out;
    std::set<ResourceId> included;
    std::map<ResourceId, std::string> why;
    for (const auto& [id, r] : program.resources) {
        if (!reclaimable_temp(r))
            continue;
        auto defs = defining_ops(program, {id}, program.size());
        if (defs.empty())
            continue;
        if (r.measured_at) {
            why[id] = "measured at p" + std::to_string(*r.measured_at);
            continue;
        }
        included.insert(id);
    }
    for (bool changed = true; changed;) {
        changed = false;
        std::set<Point> suffix;
        for (ResourceId t : included)
            for (Point d : defining_ops(program, {t}, program.size()))
                suffix.insert(d);
        for (ResourceId t : std::set<ResourceId>(included)) {
            std::string reason;
            for (Point d : defining_ops(program, {t}, program.size())) {
                const auto& op = program.op(d);
                if (!op.qfree)
                    reason = describe(op) + " is not a basis permutation";
                for (const auto& o : op.operands) {
                    if (!reason.empty())
                        break;
                    if (o.role == Role::target && !included.count(o.resource))
                        reason = describe(op) + " also writes " + program.resource(o.resource).name;
                    if (o.role == Role::control && !included.count(o.resource))
                        for (Point q = d + 1; q <= program.size(); ++q)
                            if (!suffix.count(q) && program.op(q).writes(o.resource)) {
                                reason = "control " + program.resource(o.resource).name + " is rewritten at p" +
                                         std::to_string(q);
                                break;
                            }
                }
                if (!reason.empty())
                    break;
            }
            if (!reason.empty()) {
                included.erase(t);
                why[t] = reason;
                changed = true;
            }
        }
    }
    for (const auto& [id, reason] : why)
        out.warnings.push_back({Severity::warning, "dirty-temporary", {}, program.resource(id).name +
                                                                              " left dirty: " + reason});
    out.program = program;
    out.restored.assign(included.begin(), included.end());
    std::vector<Operation> history;
    for (const auto& op : program.operations)
        if (std::any_of(included.begin(), included.end(), [&](ResourceId t) { return op.writes(t); }))
            history.push_back(op);
    if (history.empty())
        return out;
    const int n = program.size();
    for (auto& op : adjoint_of(history)) {
        op.point = out.program.size() + 1;
        out.program.operations.push_back(std::move(op));
    }
    out.program.restorations.push_back({n + 1, out.program.size(), out.restored});
    out.program.uncompute_phase_start = n + 1;
    for (auto& s : out.program.scopes)
        if (s.parent < 0)
            s.exit = out.program.size();
    return out;
}

// ---------------------------------------------------------------------------
// Parameter semantics

namespace detail {

/// True iff the ops writing `x` cancel pairwise as a stack of inverses.
inline bool writes_cancel(const Program& body, ResourceId x) {
    std::vector<const Operation*> stack;
    for (const auto& op : body.operations) {
        if (!op.writes(x))
            continue;
        if (!stack.empty() && inverts(*stack.back(), op))
            stack.pop_back();
        else
            stack.push_back(&op);
    }
    return stack.empty();
}

/// First op read-controlled by `x` that targets a temporary the plan does
/// not reclaim.
inline std::optional<std::pair<Point, ResourceId>> residual_entanglement(const Program& body,
                                                                         const ReclamationPlan& plan, ResourceId x) {
    for (const auto& op : body.operations) {
        if (!op.reads(x))
            continue;
        for (const auto& o : op.operands)
            if (o.role == Role::target && reclaimable_temp(body.resource(o.resource)) && !plan.reclaimed(o.resource))
                return std::pair(op.point, o.resource);
    }
    return std::nullopt;
}

}  // namespace detail

/// Errors for by-value parameters whose body history is not undone by body
/// end; warnings when a control-only parameter drives an unreclaimed
/// temporary of the body.
inline std::vector<Diagnostic> enforce_param_semantics(const Program& program) {
    std::vector<Diagnostic> out;
    std::vector<std::shared_ptr<const FunctionDef>> fns = program.functions;
    if (fns.empty()) {
        auto self = std::make_shared<FunctionDef>();
        self->name = program.signature.name;
        self->params = program.signature.params;
        self->body = program;
        fns.push_back(self);
    }
    for (const auto& fn : fns) {
        const Program& body = fn->body;
        std::optional<ReclamationPlan> plan;
        for (const auto& param : fn->params) {
            if (param.by_ref)
                continue;
            const auto& r = body.resource(param.resource);
            if (r.kind != ResourceKind::input)
                continue;
            bool writes = std::any_of(body.operations.begin(), body.operations.end(),
                                      [&](const Operation& op) { return op.writes(param.resource); });
            if (writes) {
                if (!detail::writes_cancel(body, param.resource))
                    out.push_back({Severity::error, "pass-by-value", {},
                                   "pass-by-value violation: '" + fn->name + "' modifies by-value parameter '" +
                                       param.name + "' without restoring it (declare it ref)"});
                continue;
            }
            if (!plan)
                plan = plan_early_reclamation(body);
            if (auto w = detail::residual_entanglement(body, *plan, param.resource))
                out.push_back({Severity::warning, "residual-entanglement", {},
                               "'" + fn->name + "': by-value parameter '" + param.name + "' controls " +
                                   describe(body.op(w->first)) + " on unreclaimed temporary '" +
                                   body.resource(w->second).name + "'"});
        }
    }
    return out;
}

}  // namespace qlife
