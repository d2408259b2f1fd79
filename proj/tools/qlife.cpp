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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qlife.hpp"

namespace {

enum Exit : int { ok = 0, invalid = 1, refused = 2, verify_failed = 3, over_budget = 4, internal = 5 };

struct CliConfig {
    std::string command;
    std::string input;
    std::string strategy;
    std::string emit;
    std::string granularity = "block";
    std::string out;
    std::uint64_t seed = qlife::kDefaultSeed;
    bool strict = false;
    bool profile = false;
};

struct Failure {
    int code;
    std::string message;
};

class Runner {
  public:
    explicit Runner(CliConfig cfg) : m_cfg(std::move(cfg)) {}

    int run() {
        try {
            load();
            if (m_cfg.command == "check")
                check();
            else if (m_cfg.command == "analyze")
                analyze();
            else if (m_cfg.command == "compile")
                compile();
            else if (m_cfg.command == "report")
                report();
            else if (m_cfg.command == "verify")
                verify();
            else if (m_cfg.command == "export")
                export_gates();
            flush();
            return m_exit;
        } catch (const Failure& f) {
            flush();
            std::cerr << "qlife: " << f.message << "\n";
            return f.code;
        } catch (const qlife::Error& e) {
            flush();
            std::cerr << "qlife: " << e.what() << "\n";
            switch (e.kind()) {
                case qlife::ErrorKind::budget: return over_budget;
                case qlife::ErrorKind::internal: return internal;
                default: return invalid;
            }
        }
    }

  private:
    void load() {
        std::ifstream in(m_cfg.input, std::ios::binary);
        if (!in)
            throw Failure{invalid, "cannot read '" + m_cfg.input + "'"};
        std::stringstream ss;
        ss << in.rdbuf();
        auto parsed = qlife::parse({ss.str(), m_cfg.input});
        for (const auto& d : parsed.diagnostics)
            std::cerr << d.format(m_cfg.input) << "\n";
        if (!parsed.ok())
            throw Failure{invalid, "input rejected"};
        m_program = std::move(*parsed.program);
        bool bad = false;
        for (const auto& d : qlife::enforce_param_semantics(m_program)) {
            std::cerr << d.format(m_cfg.input) << "\n";
            bad = bad || d.severity == qlife::Severity::error;
        }
        if (bad)
            throw Failure{invalid, "input rejected"};
    }

    qlife::Strategy strategy(qlife::Strategy fallback) const {
        if (m_cfg.strategy.empty())
            return fallback;
        return *qlife::parse_strategy(m_cfg.strategy);
    }

    std::string emit(const std::string& fallback) const { return m_cfg.emit.empty() ? fallback : m_cfg.emit; }

    void unsupported_emit(const std::string& e) const {
        throw Failure{invalid, "'" + m_cfg.command + "' cannot emit " + e};
    }

    void refusals(const qlife::ReclamationPlan& plan) {
        for (const auto& r : plan.refusals)
            std::cerr << m_cfg.input << ": note[refusal]: " << m_program.resource(r.resource).name << ": "
                      << qlife::to_string(r.reason) << " at p" << r.point << (r.detail.empty() ? "" : ": ")
                      << r.detail << "\n";
        if (m_cfg.strict && !plan.refusals.empty())
            m_exit = refused;
    }

    void check() {
        auto plan = qlife::plan_early_reclamation(m_program);
        refusals(plan);
        m_out << m_cfg.input << ": ok (" << m_program.size() << " ops, " << m_program.resources.size()
              << " resources)\n";
    }

    void analyze() {
        auto la = qlife::analyze_lifetimes(m_program);
        refusals(la.plan);
        if (m_cfg.profile) {
            m_out << qlife::width_profile_csv(la.table);
            return;
        }
        const auto e = emit("json");
        if (e == "json") {
            auto j = qlife::to_json(m_program, la.table);
            j["dependence"] = qlife::to_json(m_program, la.analysis.ddg);
            j["entanglement"] = qlife::to_json(m_program, la.analysis.trace);
            auto cp = qlife::critical_path(la.analysis.ddg);
            j["critical_path"] = {{"length", cp.length}, {"path", cp.path}};
            j["plan"] = qlife::to_json(m_program, la.plan);
            m_out << j.dump(2) << "\n";
        } else if (e == "dot") {
            m_out << qlife::dependence_dot(m_program, la.analysis.ddg)
                  << qlife::entanglement_dot(m_program, la.analysis.trace);
        } else if (e == "table") {
            m_out << qlife::lifetime_table_text(la.table);
        } else {
            unsupported_emit(e);
        }
    }

    void compile() {
        auto c = qlife::compile(m_program, strategy(qlife::Strategy::early));
        for (const auto& w : c.warnings)
            std::cerr << w.format(m_cfg.input) << "\n";
        refusals(c.plan);
        const auto e = emit("table");
        if (e == "table")
            m_out << qlife::print_unit(c.program);
        else if (e == "json")
            m_out << qlife::to_json(m_program, c.plan).dump(2) << "\n";
        else if (e == "qasm")
            m_out << qlife::export_gate_list(c.program);
        else
            unsupported_emit(e);
    }

    void report() {
        auto r = qlife::compare_strategies(m_program);
        const auto g = m_cfg.granularity == "gate" ? qlife::Granularity::gate : qlife::Granularity::block;
        const auto e = emit("table");
        if (e == "table") {
            m_out << qlife::metrics_table(r);
        } else if (e == "json") {
            auto j = qlife::to_json(r);
            j["granularity"] = qlife::to_string(g);
            j["depth"] = {{"none", r.depth_none(g)}, {"global", r.depth_global(g)}, {"early", r.depth_early(g)}};
            j["wmax"] = {{"none", r.wmax_none()}, {"global", r.wmax_global()}, {"early", r.wmax_early()}};
            m_out << j.dump(2) << "\n";
        } else {
            unsupported_emit(e);
        }
    }

    void verify() {
        if (m_cfg.strategy.empty())
            throw Failure{invalid, "verify requires --strategy"};
        auto c = qlife::compile(m_program, strategy(qlife::Strategy::early));
        refusals(c.plan);
        qlife::SamplingPolicy policy;
        policy.seed = m_cfg.seed;
        auto eq = qlife::verify_equivalence(m_program, c.program, qlife::persistent_resources(m_program), policy);
        auto rs = qlife::verify_restoration(c.program, c.restored, policy);
        qlife::json j = qlife::json::array({qlife::to_json(eq), qlife::to_json(rs)});
        m_out << j.dump(2) << "\n";
        if (!eq.pass || !rs.pass)
            m_exit = verify_failed;
    }

    void export_gates() {
        const auto e = emit("qasm");
        if (e != "qasm")
            unsupported_emit(e);
        auto c = qlife::compile(m_program, strategy(qlife::Strategy::none));
        m_out << qlife::export_gate_list(c.program);
    }

    void flush() {
        const std::string text = m_out.str();
        m_out.str({});
        if (text.empty())
            return;
        if (m_cfg.out.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(m_cfg.out, std::ios::binary);
        if (!f)
            throw Failure{invalid, "cannot write '" + m_cfg.out + "'"};
        f << text;
    }

    CliConfig m_cfg;
    qlife::Program m_program;
    std::ostringstream m_out;
    int m_exit = ok;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qlife: scope-bounded liveness-guided uncomputation for .qls programs"};
    app.footer(
        "Exit codes:\n"
        "  0  success\n"
        "  1  parse, validation or usage error\n"
        "  2  reclamation refused (with --strict)\n"
        "  3  verification failed\n"
        "  4  simulator qubit budget exceeded\n"
        "  5  internal invariant violated");
    app.require_subcommand(1);

    CliConfig cfg;
    const std::vector<std::string> strategies = {"none", "global", "early"};
    const std::vector<std::string> emits = {"json", "dot", "table", "qasm"};

    struct Subcommand {
        const char* name;
        const char* help;
    };
    const Subcommand subcommands[] = {
        {"check", "parse and validate only"},
        {"analyze", "lifetimes, dependence and entanglement graphs"},
        {"compile", "emit the transformed program"},
        {"report", "compare strategies by depth and width"},
        {"verify", "statevector checks of equivalence and restoration"},
        {"export", "flat gate list over physical qubits"},
    };
    for (const auto& s : subcommands) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("input", cfg.input, "source file (.qls)")->required();
        sub->add_option("--strategy", cfg.strategy, "none, global or early")->check(CLI::IsMember(strategies));
        sub->add_option("--emit", cfg.emit, "json, dot, table or qasm")->check(CLI::IsMember(emits));
        sub->add_option("--granularity", cfg.granularity, "block or gate")
            ->check(CLI::IsMember({"block", "gate"}));
        sub->add_option("--seed", cfg.seed, "seed for random product inputs");
        sub->add_option("--out", cfg.out, "write output here instead of stdout");
        sub->add_flag("--strict", cfg.strict, "exit 2 when any temporary is refused");
        sub->add_flag("--profile", cfg.profile, "analyze: per-point width profile as CSV");
        sub->callback([&cfg, &s] { cfg.command = s.name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    return Runner(cfg).run();
}
