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

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qlife/inline.hpp"
#include "qlife/ir.hpp"
#include "qlife/schedule.hpp"

namespace qlife {

using Amplitude = std::complex<double>;

inline constexpr int kQubitBudget = 12;
inline constexpr std::uint64_t kDefaultSeed = 20240917;
inline constexpr double kEquivalenceTolerance = 1e-9;
inline constexpr double kRestorationTolerance = 1e-12;

/// Dense state over m qubits; qubit i is bit i of the basis index.
struct StateVector {
    int qubits = 0;
    std::vector<Amplitude> amps;
    /// Resource id -> qubit index.
    std::map<ResourceId, int> index;

    [[nodiscard]] double norm() const {
        double s = 0;
        for (const auto& a : amps)
            s += std::norm(a);
        return std::sqrt(s);
    }

    [[nodiscard]] int qubit_of(ResourceId r) const {
        auto it = index.find(r);
        if (it == index.end())
            throw Error(ErrorKind::unknown_resource, "resource " + std::to_string(r) + " is not mapped in the state");
        return it->second;
    }
};

struct Branch {
    double probability = 1.0;
    StateVector state;
    std::vector<std::pair<ResourceId, int>> outcomes;
};

using Ensemble = std::vector<Branch>;

/// Single-qubit input states per interface resource; unspecified resources
/// start in |0>.
struct InputState {
    std::map<ResourceId, std::array<Amplitude, 2>> qubits;
    std::string label;
};

struct ReducedState {
    std::vector<ResourceId> subset;
    Eigen::MatrixXcd rho;
};

namespace detail {

inline void apply_1q(StateVector& s, int q, const std::array<Amplitude, 4>& m) {
    const size_t bit = size_t{1} << q;
    for (size_t i = 0; i < s.amps.size(); ++i) {
        if (i & bit)
            continue;
        Amplitude a0 = s.amps[i];
        Amplitude a1 = s.amps[i | bit];
        s.amps[i] = m[0] * a0 + m[1] * a1;
        s.amps[i | bit] = m[2] * a0 + m[3] * a1;
    }
}

/// Flips `target` on basis states where every control bit is set.
inline void apply_controlled_x(StateVector& s, const std::vector<int>& controls, int target) {
    size_t cmask = 0;
    for (int c : controls)
        cmask |= size_t{1} << c;
    const size_t tbit = size_t{1} << target;
    for (size_t i = 0; i < s.amps.size(); ++i)
        if ((i & cmask) == cmask && !(i & tbit))
            std::swap(s.amps[i], s.amps[i | tbit]);
}

inline void apply_swap(StateVector& s, int a, int b) {
    const size_t ba = size_t{1} << a;
    const size_t bb = size_t{1} << b;
    for (size_t i = 0; i < s.amps.size(); ++i)
        if ((i & ba) && !(i & bb))
            std::swap(s.amps[i], s.amps[(i & ~ba) | bb]);
}

inline void apply_gate(StateVector& s, const Operation& op) {
    std::vector<int> q;
    for (const auto& o : op.operands)
        q.push_back(s.qubit_of(o.resource));
    const double r = 1.0 / std::sqrt(2.0);
    const bool dg = op.kind == OpKind::adjoint_gate;
    const Amplitude i1(0, 1);
    const std::string& g = op.gate_name;
    if (g == "X")
        apply_controlled_x(s, {}, q[0]);
    else if (g == "H")
        apply_1q(s, q[0], {r, r, r, -r});
    else if (g == "S")
        apply_1q(s, q[0], {1, 0, 0, dg ? -i1 : i1});
    else if (g == "T")
        apply_1q(s, q[0], {1, 0, 0, std::polar(1.0, (dg ? -1 : 1) * M_PI / 4)});
    else if (g == "CX")
        apply_controlled_x(s, {q[0]}, q[1]);
    else if (g == "CCX")
        apply_controlled_x(s, {q[0], q[1]}, q[2]);
    else if (g == "SWAP")
        apply_swap(s, q[0], q[1]);
    else
        throw Error(ErrorKind::undefined_function, "unresolved opaque operation '" + g + "'");
}

inline void measure(Ensemble& ens, const Operation& op) {
    Ensemble next;
    for (auto& b : ens) {
        const int q = b.state.qubit_of(op.operands[0].resource);
        const size_t bit = size_t{1} << q;
        for (int outcome = 0; outcome < 2; ++outcome) {
            double p = 0;
            for (size_t i = 0; i < b.state.amps.size(); ++i)
                if (((i & bit) != 0) == (outcome == 1))
                    p += std::norm(b.state.amps[i]);
            if (p < 1e-15)
                continue;
            Branch nb;
            nb.probability = b.probability * p;
            nb.state = b.state;
            nb.outcomes = b.outcomes;
            nb.outcomes.emplace_back(op.operands[0].resource, outcome);
            const double scale = 1.0 / std::sqrt(p);
            for (size_t i = 0; i < nb.state.amps.size(); ++i)
                nb.state.amps[i] = (((i & bit) != 0) == (outcome == 1)) ? nb.state.amps[i] * scale : Amplitude(0);
            next.push_back(std::move(nb));
        }
    }
    ens = std::move(next);
}

}  // namespace detail

/// Called after each op with its point and the current ensemble.
using Observer = std::function<void(Point, const Ensemble&)>;

/// Runs the program (calls are inlined first). Without a register map
/// every resource gets its own qubit in id order; with one, resources
/// share physical qubits as the map says.
inline Ensemble simulate(const Program& program, const InputState& input, const Observer& observer = nullptr,
                         const RegisterMap* mapping = nullptr) {
    bool has_calls = std::any_of(program.operations.begin(), program.operations.end(),
                                 [](const Operation& op) { return op.is_call(); });
    Program flat = has_calls ? inline_program(program).program : program;

    StateVector s;
    if (mapping) {
        s.index = mapping->qubit;
        s.qubits = mapping->peak;
    } else {
        for (const auto& [id, r] : flat.resources)
            s.index[id] = s.qubits++;
    }
    if (s.qubits > kQubitBudget)
        throw Error(ErrorKind::budget, "program needs " + std::to_string(s.qubits) + " qubits; budget is " +
                                           std::to_string(kQubitBudget));
    s.amps.assign(size_t{1} << s.qubits, Amplitude(0));
    s.amps[0] = 1;
    for (const auto& [id, amp] : input.qubits) {
        if (!s.index.count(id))
            continue;
        if (flat.resources.count(id) && !flat.resource(id).is_interface())
            continue;
        const int q = s.qubit_of(id);
        detail::apply_1q(s, q, {amp[0], -std::conj(amp[1]), amp[1], std::conj(amp[0])});
    }

    Ensemble ens{Branch{1.0, std::move(s), {}}};
    for (const auto& op : flat.operations) {
        if (op.kind == OpKind::measure) {
            detail::measure(ens, op);
        } else {
            for (auto& b : ens) {
                detail::apply_gate(b.state, op);
                if (std::abs(b.state.norm() - 1.0) > 1e-12)
                    throw Error(ErrorKind::internal, "norm drift after p" + std::to_string(op.point));
            }
        }
        if (observer)
            observer(op.point, ens);
    }
    return ens;
}

inline ReducedState reduced_state(const StateVector& state, const std::vector<ResourceId>& subset) {
    std::vector<int> qs;
    for (ResourceId r : subset)
        qs.push_back(state.qubit_of(r));
    const size_t k = qs.size();
    const size_t dim = size_t{1} << k;
    size_t sub_mask = 0;
    for (int q : qs)
        sub_mask |= size_t{1} << q;
    std::map<size_t, Eigen::VectorXcd> by_rest;
    for (size_t i = 0; i < state.amps.size(); ++i) {
        if (state.amps[i] == Amplitude(0))
            continue;
        size_t sub = 0;
        for (size_t b = 0; b < k; ++b)
            if (i & (size_t{1} << qs[b]))
                sub |= size_t{1} << b;
        auto [it, fresh] = by_rest.try_emplace(i & ~sub_mask, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim)));
        it->second[static_cast<Eigen::Index>(sub)] = state.amps[i];
    }
    ReducedState out;
    out.subset = subset;
    out.rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& [_, v] : by_rest)
        out.rho += v * v.adjoint();
    return out;
}

/// Probability-weighted mixture over the ensemble's branches.
inline ReducedState reduced_state(const Ensemble& ens, const std::vector<ResourceId>& subset) {
    ReducedState out;
    out.subset = subset;
    for (const auto& b : ens) {
        auto r = reduced_state(b.state, subset);
        if (out.rho.size() == 0)
            out.rho = Eigen::MatrixXcd::Zero(r.rho.rows(), r.rho.cols());
        out.rho += b.probability * r.rho;
    }
    return out;
}

inline double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd d = a - b;
    d = 0.5 * (d + d.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const ReducedState& a, const ReducedState& b) { return trace_distance(a.rho, b.rho); }

inline double purity(const ReducedState& r) { return (r.rho * r.rho).trace().real(); }

/// <0...0| rho |0...0>
inline double zero_population(const ReducedState& r) { return r.rho(0, 0).real(); }

inline Eigen::MatrixXcd zero_projector(size_t qubits) {
    const auto dim = static_cast<Eigen::Index>(size_t{1} << qubits);
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(dim, dim);
    z(0, 0) = 1;
    return z;
}

// ---------------------------------------------------------------------------
// Input sampling

/// All basis assignments of the interface qubits, then `random_products`
/// Haar-random product states drawn from a generator seeded with `seed`.
struct SamplingPolicy {
    bool exhaustive_basis = true;
    int random_products = 16;
    std::uint64_t seed = kDefaultSeed;
};

inline std::vector<ResourceId> interface_resources(const Program& program) {
    std::vector<ResourceId> out;
    for (const auto& [id, r] : program.resources)
        if (r.is_interface())
            out.push_back(id);
    return out;
}

/// Persistent resources: outputs, ref parameters, and returned values.
inline std::vector<ResourceId> persistent_resources(const Program& program) {
    std::vector<ResourceId> out;
    for (const auto& [id, r] : program.resources)
        if (r.persistent)
            out.push_back(id);
    return out;
}

inline std::vector<InputState> sample_inputs(const Program& program, const SamplingPolicy& policy) {
    auto iface = interface_resources(program);
    std::vector<InputState> out;
    if (iface.size() > static_cast<size_t>(kQubitBudget))
        throw Error(ErrorKind::budget, "too many interface qubits to sample");
    if (policy.exhaustive_basis) {
        for (size_t bits = 0; bits < (size_t{1} << iface.size()); ++bits) {
            InputState in;
            in.label = "basis:";
            for (size_t i = 0; i < iface.size(); ++i) {
                bool one = (bits >> i) & 1;
                in.qubits[iface[i]] = one ? std::array<Amplitude, 2>{0, 1} : std::array<Amplitude, 2>{1, 0};
                in.label += one ? '1' : '0';
            }
            out.push_back(std::move(in));
        }
    }
    std::mt19937_64 rng(policy.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < policy.random_products; ++k) {
        InputState in;
        in.label = "product:" + std::to_string(k);
        for (ResourceId r : iface) {
            Amplitude a(gauss(rng), gauss(rng));
            Amplitude b(gauss(rng), gauss(rng));
            double nrm = std::sqrt(std::norm(a) + std::norm(b));
            in.qubits[r] = {a / nrm, b / nrm};
        }
        out.push_back(std::move(in));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Checks

struct EquivalenceReport {
    std::string check = "equivalence";
    int inputs = 0;
    double max_trace_distance = 0;
    std::string worst_input;
    bool pass = true;
};

inline EquivalenceReport verify_equivalence(const Program& p1, const Program& p2, const std::vector<ResourceId>& observed,
                                            const SamplingPolicy& policy = {}, const RegisterMap* map2 = nullptr) {
    EquivalenceReport rep;
    for (ResourceId r : observed) {
        (void)p1.resource(r);
        (void)p2.resource(r);
    }
    for (const auto& in : sample_inputs(p1, policy)) {
        auto a = reduced_state(simulate(p1, in), observed);
        auto b = reduced_state(simulate(p2, in, nullptr, map2), observed);
        double d = trace_distance(a, b);
        ++rep.inputs;
        if (d > rep.max_trace_distance || rep.worst_input.empty()) {
            rep.max_trace_distance = std::max(rep.max_trace_distance, d);
            rep.worst_input = in.label;
        }
    }
    rep.pass = rep.max_trace_distance <= kEquivalenceTolerance;
    return rep;
}

struct RestorationReport {
    std::string check = "restoration";
    int inputs = 0;
    double min_zero_population = 1.0;
    double min_purity = 1.0;
    /// Largest trace distance of a temp's reduced state from |0><0|.
    double max_distance_from_zero = 0;
    std::vector<std::string> failures;
    bool pass = true;
};

/// Release point of each temp: the end of the restoration segment that
/// lists it, or program end when none does.
inline std::map<ResourceId, Point> release_points(const Program& flat, const std::vector<ResourceId>& temps) {
    std::map<ResourceId, Point> out;
    for (ResourceId t : temps) {
        Point at = flat.size();
        for (const auto& r : flat.restorations)
            if (std::find(r.resources.begin(), r.resources.end(), t) != r.resources.end())
                at = r.last;
        out[t] = at;
    }
    return out;
}

inline RestorationReport verify_restoration(const Program& program, const std::vector<ResourceId>& temps,
                                            const SamplingPolicy& policy = {}) {
    RestorationReport rep;
    Program flat = inline_program(program).program;
    auto release = release_points(flat, temps);
    for (const auto& in : sample_inputs(flat, policy)) {
        ++rep.inputs;
        std::map<ResourceId, ReducedState> at_release;
        auto capture = [&](Point p, const Ensemble& ens) {
            for (const auto& [t, q] : release)
                if (q == p)
                    at_release[t] = reduced_state(ens, {t});
        };
        auto final = simulate(flat, in, capture);
        for (const auto& [t, q] : release)
            if (q < 1)
                at_release[t] = reduced_state(final, {t});
        for (const auto& [t, rs] : at_release) {
            double z = zero_population(rs);
            double pur = purity(rs);
            double d = trace_distance(rs.rho, zero_projector(1));
            rep.min_zero_population = std::min(rep.min_zero_population, z);
            rep.min_purity = std::min(rep.min_purity, pur);
            rep.max_distance_from_zero = std::max(rep.max_distance_from_zero, d);
            if (z < 1 - kRestorationTolerance || pur < 1 - kRestorationTolerance)
                rep.failures.push_back(flat.resource(t).name + " on " + in.label);
        }
    }
    rep.pass = rep.failures.empty();
    return rep;
}

/// Forced reclamation versus the original: the larger of the output trace
/// distance and the reclaimed temps' distance from |0><0|.
struct NegativeControlReport {
    double output_distance = 0;
    double restoration_distance = 0;

    [[nodiscard]] double violation() const { return std::max(output_distance, restoration_distance); }
};

inline NegativeControlReport negative_control(const Program& original, const std::vector<ResourceId>& temps, Point p,
                                              const SamplingPolicy& policy = {}) {
    auto plan = forced_plan(original, temps, p);
    Program forced = insert_early_uncompute(original, plan);
    NegativeControlReport rep;
    rep.output_distance = verify_equivalence(original, forced, persistent_resources(original), policy).max_trace_distance;
    rep.restoration_distance = verify_restoration(forced, temps, policy).max_distance_from_zero;
    return rep;
}

}  // namespace qlife
