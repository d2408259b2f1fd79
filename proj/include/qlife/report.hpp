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

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qlife/analysis.hpp"
#include "qlife/inline.hpp"
#include "qlife/reclaim.hpp"
#include "qlife/schedule.hpp"
#include "qlife/sim.hpp"

namespace qlife {

using json = nlohmann::ordered_json;

/// Conservative analysis, early plan and the lifetimes it implies.
struct LifetimeAnalysis {
    Analysis analysis;
    ReclamationPlan plan;
    LifetimeTable table;
};

inline LifetimeAnalysis analyze_lifetimes(const Program& program) {
    LifetimeAnalysis out;
    out.analysis = analyze(program);
    out.plan = plan_early_reclamation(program, out.analysis.ddg, out.analysis.trace, out.analysis.liveness);
    auto eff = analyze(program, out.plan.marks());
    out.table = compute_lifetimes(program, out.analysis.liveness, &eff.liveness);
    return out;
}

namespace detail {

inline json interval_json(const std::optional<Interval>& iv) {
    if (!iv)
        return nullptr;
    return json::array({iv->lo, iv->hi});
}

inline json names_json(const Program& p, const std::vector<ResourceId>& ids) {
    json a = json::array();
    for (ResourceId r : ids)
        a.push_back(p.resource(r).name);
    return a;
}

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const Program& p, const LifetimeTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"resource", r.name},
                        {"kind", to_string(r.kind)},
                        {"conservative", detail::interval_json(r.conservative)},
                        {"effective", detail::interval_json(r.effective)}});
    json cons = json::array();
    json eff = json::array();
    for (Point q = 1; q <= t.n; ++q) {
        cons.push_back(t.live_conservative[static_cast<size_t>(q - 1)].size());
        eff.push_back(t.live_effective[static_cast<size_t>(q - 1)].size());
    }
    return {{"program", p.signature.name},
            {"points", t.n},
            {"lifetimes", rows},
            {"live_counts", {{"conservative", cons}, {"effective", eff}}},
            {"wmax", {{"conservative", t.wmax_conservative}, {"effective", t.wmax_effective}}}};
}

inline json to_json(const Program& p, const DependenceGraph& g) {
    json edges = json::array();
    for (const auto& e : g.edges)
        edges.push_back({{"from", e.from}, {"to", e.to}, {"resource", p.resource(e.resource).name},
                         {"access", to_string(e.access)}});
    return {{"points", g.n}, {"edges", edges}};
}

inline json to_json(const Program& p, const EntanglementTrace& t) {
    json edges = json::array();
    for (const auto& e : t.edges)
        edges.push_back({{"a", p.resource(e.a).name}, {"b", p.resource(e.b).name}, {"introduced", e.introduced}});
    return {{"points", t.n}, {"edges", edges}};
}

inline json to_json(const Program& p, const ReclamationPlan& plan) {
    json groups = json::array();
    for (const auto& g : plan.groups) {
        json seg = json::array();
        for (const auto& op : g.segment)
            seg.push_back(describe(op));
        groups.push_back({{"temps", detail::names_json(p, g.certificate.temps)},
                          {"boundary", g.certificate.boundary},
                          {"segment", seg},
                          {"insertion_point", g.insertion_point}});
    }
    json refusals = json::array();
    for (const auto& r : plan.refusals)
        refusals.push_back({{"resource", p.resource(r.resource).name},
                            {"reason", to_string(r.reason)},
                            {"point", r.point},
                            {"detail", r.detail}});
    return {{"groups", groups}, {"refusals", refusals}};
}

inline json to_json(const StrategyMetrics& m) {
    return {{"strategy", to_string(m.strategy)},
            {"depth_block", m.depth_block},
            {"depth_gate", m.depth_gate},
            {"wmax", m.wmax},
            {"peak_qubits", m.peak_qubits},
            {"restored", m.restored},
            {"ops", m.ops}};
}

inline json to_json(const StrategyReport& r) {
    return {{"strategies", json::array({to_json(r.none), to_json(r.global), to_json(r.early)})}};
}

inline json to_json(const EquivalenceReport& r) {
    return {{"check", r.check}, {"inputs", r.inputs}, {"max_trace_distance", r.max_trace_distance}, {"pass", r.pass}};
}

inline json to_json(const RestorationReport& r) {
    return {{"check", r.check},
            {"inputs", r.inputs},
            {"min_zero_population", r.min_zero_population},
            {"min_purity", r.min_purity},
            {"pass", r.pass}};
}

// ---------------------------------------------------------------------------
// Text

inline std::string metrics_table(const StrategyReport& r) {
    const std::vector<std::string> head = {"strategy", "depth_block", "depth_gate", "wmax", "peak_qubits",
                                           "restored", "ops"};
    std::vector<std::vector<std::string>> rows;
    for (const auto* m : {&r.none, &r.global, &r.early})
        rows.push_back({std::string(to_string(m->strategy)), std::to_string(m->depth_block),
                        std::to_string(m->depth_gate), std::to_string(m->wmax), std::to_string(m->peak_qubits),
                        std::to_string(m->restored), std::to_string(m->ops)});
    std::vector<size_t> w(head.size());
    for (size_t c = 0; c < head.size(); ++c) {
        w[c] = head[c].size();
        for (const auto& row : rows)
            w[c] = std::max(w[c], row[c].size());
    }
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (size_t c = 0; c < cells.size(); ++c) {
            if (c == 0)
                os << std::left << std::setw(static_cast<int>(w[c])) << cells[c];
            else
                os << "  " << std::right << std::setw(static_cast<int>(w[c])) << cells[c];
        }
        os << "\n";
    };
    line(head);
    for (const auto& row : rows)
        line(row);
    return os.str();
}

inline std::string lifetime_table_text(const LifetimeTable& t) {
    auto fmt = [](const std::optional<Interval>& iv) {
        return iv ? "[" + std::to_string(iv->lo) + "," + std::to_string(iv->hi) + "]" : std::string("-");
    };
    size_t wn = 8;
    for (const auto& r : t.rows)
        wn = std::max(wn, r.name.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(wn)) << "resource" << "  " << std::setw(10) << "kind" << "  "
       << std::setw(12) << "conservative" << "  " << "effective" << "\n";
    for (const auto& r : t.rows)
        os << std::left << std::setw(static_cast<int>(wn)) << r.name << "  " << std::setw(10) << to_string(r.kind)
           << "  " << std::setw(12) << fmt(r.conservative) << "  " << fmt(r.effective) << "\n";
    os << "wmax conservative " << t.wmax_conservative << " effective " << t.wmax_effective << "\n";
    return os.str();
}

/// point,live_count rows using effective liveness.
inline std::string width_profile_csv(const LifetimeTable& t) {
    std::ostringstream os;
    os << "point,live_count\n";
    for (Point q = 1; q <= t.n; ++q)
        os << q << "," << t.live_effective[static_cast<size_t>(q - 1)].size() << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// DOT

inline std::string dependence_dot(const Program& p, const DependenceGraph& g) {
    std::ostringstream os;
    os << "digraph dependence {\n  rankdir=LR;\n";
    for (Point q = 1; q <= g.n; ++q)
        os << "  p" << q << " [label=\"p" << q << ": " << detail::dot_escape(describe(p.op(q))) << "\"];\n";
    for (const auto& e : g.edges)
        os << "  p" << e.from << " -> p" << e.to << " [label=\"" << detail::dot_escape(p.resource(e.resource).name)
           << "\"];\n";
    os << "}\n";
    return os.str();
}

inline std::string entanglement_dot(const Program& p, const EntanglementTrace& t) {
    std::ostringstream os;
    os << "graph entanglement {\n";
    for (const auto& [id, r] : p.resources)
        os << "  r" << id << " [label=\"" << detail::dot_escape(r.name) << "\"];\n";
    for (const auto& e : t.edges)
        os << "  r" << e.a << " -- r" << e.b << " [label=\"p" << e.introduced << "\"];\n";
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Flat gate list

/// One gate per line over physical qubits from linear-scan allocation.
/// Calls must already be inlined.
inline std::string export_gate_list(const Program& flat, const RegisterMap& map) {
    std::ostringstream os;
    os << "// qubits " << map.peak << "\n";
    for (const auto& op : flat.operations) {
        if (op.is_call())
            throw Error(ErrorKind::validate, "export requires an inlined program (call at p" +
                                                 std::to_string(op.point) + ")");
        std::string name = op.kind == OpKind::measure ? "MEASURE" : op.gate_name;
        if (op.kind == OpKind::adjoint_gate && !is_self_inverse_gate(op))
            name += "_dg";
        os << name;
        for (size_t i = 0; i < op.operands.size(); ++i)
            os << (i == 0 ? " " : ", ") << "q[" << map.at(op.operands[i].resource) << "]";
        os << "\n";
    }
    return os.str();
}

inline std::string export_gate_list(const Program& program) {
    Program flat = inline_program(program).program;
    return export_gate_list(flat, allocate_registers(program_lifetimes(flat)));
}

}  // namespace qlife
