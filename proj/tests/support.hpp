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

#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qlife.hpp"

namespace qlife::testing {

inline std::string corpus_dir() { return QLIFE_CORPUS_DIR; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> corpus_files() {
    return {"alias_live",  "cross_boundary", "depth_chain",     "measured", "nested",      "nonqfree",
            "param_ref",   "param_value",    "param_violation", "running",  "running_ref", "width_disjoint"};
}

inline ParseResult parse_corpus(const std::string& name) {
    const std::string path = corpus_dir() + "/" + name + ".qls";
    return parse({read_file(path), path});
}

inline Program load(const std::string& name) {
    auto r = parse_corpus(name);
    if (!r.ok()) {
        std::string msg;
        for (const auto& d : r.diagnostics)
            msg += d.format(name) + "\n";
        throw std::runtime_error(msg);
    }
    return *r.program;
}

inline Program parse_or_throw(const std::string& src) {
    auto r = parse_text(src);
    if (!r.ok()) {
        std::string msg = src + "\n";
        for (const auto& d : r.diagnostics)
            msg += d.format("<generated>") + "\n";
        throw std::runtime_error(msg);
    }
    return *r.program;
}

struct GenOptions {
    int max_inputs = 3;
    int max_outputs = 2;
    int max_blocks = 4;
    int max_depth = 2;
    int max_temps = 7;
    double nonqfree = 0.08;
    double measure = 0.04;
    double alias = 0.08;
    double helper_calls = 0.25;
    double nest = 0.35;
};

/// Seeded random structured program: scoped blocks that compute temps from
/// inputs and outer temps, then copy them into outputs.
class ProgramGenerator {
  public:
    ProgramGenerator(std::uint64_t seed, GenOptions o = {}) : m_rng(seed), m_o(o) {}

    std::string source() {
        const int ni = uniform(1, m_o.max_inputs);
        const int no = uniform(1, m_o.max_outputs);
        for (int i = 0; i < ni; ++i)
            m_inputs.push_back("x" + std::to_string(i));
        for (int i = 0; i < no; ++i)
            m_outputs.push_back("y" + std::to_string(i));
        std::ostringstream os;
        os << "void ha(qubit c, ref qubit t) { CX c, t; }\n";
        os << "void hb(qubit c, ref qubit t) { X t; CX c, t; }\n";
        os << "qubit[] gen(";
        bool first = true;
        for (const auto& n : m_inputs) {
            os << (first ? "" : ", ") << "qubit " << n;
            first = false;
        }
        for (const auto& n : m_outputs)
            os << ", qubit " << n;
        os << ") {\n";
        std::vector<std::string> visible;
        const int blocks = uniform(1, m_o.max_blocks);
        for (int b = 0; b < blocks && m_temps < m_o.max_temps; ++b) {
            if (chance(0.3))
                emit_block(os, 1, visible, false);
            else
                emit_block(os, 1, visible, true);
        }
        if (chance(0.5))
            os << "    X " << pick(m_outputs) << ";\n";
        os << "    return [";
        for (size_t i = 0; i < m_outputs.size(); ++i)
            os << (i ? ", " : "") << m_outputs[i];
        os << "];\n}\n";
        return os.str();
    }

  private:
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(m_rng); }
    bool chance(double p) { return std::bernoulli_distribution(p)(m_rng); }
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
    }

    std::string control_for(const std::vector<std::string>& visible, const std::string& not_this) {
        std::vector<std::string> pool = m_inputs;
        for (const auto& v : visible)
            if (v != not_this)
                pool.push_back(v);
        return pick(pool);
    }

    void emit_block(std::ostringstream& os, int depth, std::vector<std::string> visible, bool braces) {
        std::string pad(static_cast<size_t>(depth) * 4, ' ');
        std::string inner = pad;
        if (braces) {
            os << pad << "{\n";
            inner += "    ";
        }
        const int k = std::min(uniform(1, 2), m_o.max_temps - m_temps);
        if (k <= 0) {
            if (braces)
                os << pad << "}\n";
            return;
        }
        std::vector<std::string> mine;
        os << inner << "qubit ";
        for (int i = 0; i < k; ++i) {
            mine.push_back("t" + std::to_string(m_temps++));
            os << (i ? ", " : "") << mine.back();
        }
        os << ";\n";
        std::vector<std::string> names = mine;
        if (chance(m_o.alias)) {
            std::string a = "a" + std::to_string(m_temps);
            os << inner << "alias " << a << " = " << mine.front() << ";\n";
            names.push_back(a);
        }
        for (const auto& t : mine) {
            const int steps = uniform(1, 3);
            for (int s = 0; s < steps; ++s) {
                const double r = std::uniform_real_distribution<double>(0, 1)(m_rng);
                if (r < m_o.nonqfree) {
                    os << inner << "H " << t << ";\n";
                } else if (r < m_o.nonqfree + m_o.helper_calls) {
                    os << inner << (chance(0.5) ? "ha(" : "hb(") << control_for(visible, t) << ", " << t << ");\n";
                } else if (r < 0.55) {
                    os << inner << "CX " << control_for(visible, t) << ", " << t << ";\n";
                } else if (r < 0.75) {
                    std::string c1 = control_for(visible, t);
                    std::string c2 = control_for(visible, t);
                    if (c1 == c2)
                        os << inner << "CX " << c1 << ", " << t << ";\n";
                    else
                        os << inner << "CCX " << c1 << ", " << c2 << ", " << t << ";\n";
                } else {
                    os << inner << "X " << t << ";\n";
                }
            }
            visible.push_back(t);
        }
        if (mine.size() == 2 && chance(0.5))
            os << inner << "CX " << mine[0] << ", " << mine[1] << ";\n";
        if (chance(m_o.measure))
            os << inner << "measure " << mine.front() << ";\n";
        if (depth < m_o.max_depth && chance(m_o.nest) && m_temps < m_o.max_temps)
            emit_block(os, depth + 1, visible, true);
        const int transfers = uniform(1, 2);
        for (int i = 0; i < transfers; ++i) {
            const std::string& src = pick(names);
            os << inner << "CX " << src << ", " << pick(m_outputs) << ";\n";
        }
        if (braces)
            os << pad << "}\n";
    }

    std::mt19937_64 m_rng;
    GenOptions m_o;
    std::vector<std::string> m_inputs;
    std::vector<std::string> m_outputs;
    int m_temps = 0;
};

inline std::string random_source(std::uint64_t seed, GenOptions o = {}) { return ProgramGenerator(seed, o).source(); }

inline Program random_program(std::uint64_t seed, GenOptions o = {}) { return parse_or_throw(random_source(seed, o)); }

/// Strict-improvement family: d ops building t from a, one transfer into
/// y, then d ops on y alone.
inline std::string chain_source(int d) {
    std::ostringstream os;
    os << "qubit[] chain(qubit a, qubit y) {\n    qubit t;\n    CX a, t;\n";
    for (int i = 1; i < d; ++i)
        os << (i % 2 ? "    X t;\n" : "    CX a, t;\n");
    os << "    CX t, y;\n";
    for (int i = 0; i < d; ++i)
        os << "    X y;\n";
    os << "    return [y];\n}\n";
    return os.str();
}

/// Width family: k temps, each computed from a and copied into y in turn.
inline std::string width_source(int k) {
    std::ostringstream os;
    os << "qubit[] width(qubit a, qubit y) {\n    qubit ";
    for (int i = 0; i < k; ++i)
        os << (i ? ", " : "") << "t" << i;
    os << ";\n";
    for (int i = 0; i < k; ++i)
        os << "    CX a, t" << i << ";\n    CX t" << i << ", y;\n";
    os << "    return [y];\n}\n";
    return os.str();
}

inline std::vector<ResourceId> ids(const Program& p, const std::vector<std::string>& names) {
    std::vector<ResourceId> out;
    for (const auto& n : names)
        out.push_back(p.resource_id(n));
    return out;
}

/// Random programs with deep block nesting.
inline GenOptions nesting_options() {
    GenOptions o;
    o.nest = 0.7;
    o.max_depth = 3;
    o.max_blocks = 5;
    return o;
}

/// Every block's own lifetimes, shifted to whole-program points, lie
/// within the whole-program lifetimes. Returns the first violation.
inline std::optional<std::string> monotonicity_violation(const Program& p, int* checked = nullptr) {
    auto whole = analyze(p).liveness;
    for (const auto& s : p.scopes) {
        if (s.id == 0 || s.entry > s.exit)
            continue;
        Program sub = extract_scope(p, s.id);
        auto part = analyze(sub).liveness;
        const Point shift = s.entry - 1;
        for (const auto& [id, r] : sub.resources) {
            auto iv = part.interval(id);
            if (!iv)
                continue;
            auto outer = whole.interval(id);
            if (!outer || !Interval{iv->lo + shift, iv->hi + shift}.within(*outer))
                return "scope " + std::to_string(s.id) + " " + r.name;
            if (checked)
                ++*checked;
        }
    }
    return std::nullopt;
}

/// Source with a self-contained inner block inserted at a random line of
/// the entry function, plus the block's length in ops.
struct Nesting {
    std::string original;
    std::string with_block;
    int block_ops = 3;
};

inline Nesting nesting_case(std::uint64_t seed) {
    static const std::string block = "{ qubit nn0, nn1; CX x0, nn0; CX nn0, nn1; CX x0, nn0; }\n";
    Nesting out;
    out.original = random_source(7000 + seed, nesting_options());
    std::vector<std::string> lines;
    std::stringstream ss(out.original);
    for (std::string l; std::getline(ss, l);)
        lines.push_back(l);
    size_t header = 0;
    while (lines[header].rfind("qubit[] gen(", 0) != 0)
        ++header;
    size_t ret = header;
    while (lines[ret].find("return [") == std::string::npos)
        ++ret;
    std::mt19937 rng(static_cast<unsigned>(seed));
    size_t at = std::uniform_int_distribution<size_t>(header + 1, ret)(rng);
    for (size_t i = 0; i < lines.size(); ++i) {
        if (i == at)
            out.with_block += block;
        out.with_block += lines[i] + "\n";
    }
    return out;
}

/// Outer resources keep their liveness pointwise (under the point shift)
/// after the inner block is inserted. Returns the first violation.
inline std::optional<std::string> independence_violation(const Nesting& n) {
    Program p = parse_or_throw(n.original);
    Program q = parse_or_throw(n.with_block);
    auto uses = q.uses(q.resource_id("nn0"));
    if (uses.size() != 3)
        return std::string("inner block not found");
    const Point k = uses.front() - 1;
    auto map = [&](Point x) { return x <= k ? x : x + n.block_ops; };
    auto lp = analyze(p).liveness;
    auto lq = analyze(q).liveness;
    for (const auto& [id, r] : p.resources) {
        const ResourceId rq = q.resource_id(r.name);
        for (Point x = 1; x <= p.size(); ++x)
            if (lp.live(id, x) != lq.live(rq, map(x)))
                return r.name + " at p" + std::to_string(x);
        if (lp.interval(id).has_value() != lq.interval(rq).has_value())
            return r.name + " interval";
    }
    return std::nullopt;
}

}  // namespace qlife::testing
