#include "gputherm/powertrace.hpp"
#include "gputherm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace gputherm {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_watts(const std::string& s, std::size_t lineno) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size() || !std::isfinite(v) || v < 0.0)
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad power value: " + s, lineno);
    }
}

void check_order(const ComponentPower& e) {
    if (!(e.min_W <= e.avg_W && e.avg_W <= e.max_W))
        throw OrderViolation("component " + e.component + ": min <= avg <= max violated (" +
                             fmt_double(e.min_W) + ", " + fmt_double(e.avg_W) + ", " +
                             fmt_double(e.max_W) + ")");
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace

PowerReport parse_power_report(const std::string& text) {
    PowerReport report;
    struct Triple {
        std::optional<double> min, avg, max;
        std::size_t order = 0;
    };
    std::map<std::string, Triple> triples;
    std::size_t next_order = 0;

    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() < 3 || toks[1] != "=")
            throw ParseError("expected `<name> = <values>`: " + line, lineno);
        const std::string& key = toks[0];

        auto triple_kind = [&](const char* prefix) {
            return key.size() > 8 && key.rfind(prefix, 0) == 0;
        };
        if (triple_kind("gpu_min_") || triple_kind("gpu_avg_") || triple_kind("gpu_max_")) {
            if (toks.size() != 3) throw ParseError("expected one value: " + line, lineno);
            const std::string comp = key.substr(8);
            auto& t = triples[comp];
            if (t.min == std::nullopt && t.avg == std::nullopt && t.max == std::nullopt)
                t.order = next_order++;
            const double v = parse_watts(toks[2], lineno);
            if (key[4] == 'm' && key[5] == 'i')
                t.min = v;
            else if (key[4] == 'a')
                t.avg = v;
            else
                t.max = v;
            continue;
        }

        if (toks.size() != 5)
            throw ParseError("expected `<component> = <min> <avg> <max>`: " + line, lineno);
        ComponentPower e;
        e.component = key;
        e.min_W = parse_watts(toks[2], lineno);
        e.avg_W = parse_watts(toks[3], lineno);
        e.max_W = parse_watts(toks[4], lineno);
        check_order(e);
        for (const auto& prev : report.entries)
            if (prev.component == e.component)
                throw ParseError("duplicate component " + e.component, lineno);
        report.entries.push_back(std::move(e));
    }

    std::vector<std::pair<std::size_t, std::string>> ordered;
    for (const auto& [comp, t] : triples) ordered.emplace_back(t.order, comp);
    std::sort(ordered.begin(), ordered.end());
    for (const auto& [order, comp] : ordered) {
        const Triple& t = triples[comp];
        if (!t.min || !t.avg || !t.max) throw IncompleteTriple(comp);
        ComponentPower e{comp, *t.min, *t.avg, *t.max};
        check_order(e);
        report.entries.push_back(std::move(e));
    }
    return report;
}

std::string serialize_power_report(const PowerReport& report) {
    std::string out;
    for (const auto& e : report.entries)
        out += e.component + " = " + fmt_double(e.min_W) + " " + fmt_double(e.avg_W) + " " +
               fmt_double(e.max_W) + "\n";
    return out;
}

ExpandedSamples expand_samples(double min_W, double avg_W, double max_W) {
    ExpandedSamples out;
    double v = (4.0 * avg_W - min_W - max_W) / 2.0;
    if (v < 0.0) {
        v = 0.0;
        out.mean_preserved = false;
    }
    out.values = {min_W, v, avg_W, v, max_W};
    return out;
}

ComponentMapping default_mapping(const Floorplan& fp0) {
    ComponentMapping m;
    auto sm = [](const char* kind) {
        return MappingTarget{MappingTarget::Kind::PerSm, "", kind, {}};
    };
    auto unit = [](const char* name) {
        return MappingTarget{MappingTarget::Kind::Unit, name, "", {}};
    };
    m.rules["RFP"] = sm("RF");
    for (const char* c : {"SHRDP", "DCP", "CCP", "TCP", "ICP", "IBP"}) m.rules[c] = sm("L1SHM");
    for (const char* c : {"FPUP", "SPP", "PIPEP", "IDLE_COREP", "CONSTP"}) m.rules[c] = sm("EXE");
    m.rules["SCHEDP"] = sm("SCHED");
    for (const char* c : {"SFUP", "LDSTP"}) m.rules[c] = sm("LDST");
    for (const char* c : {"L2CP", "MCP", "NOCP"}) m.rules[c] = unit("L2");

    std::vector<std::pair<std::string, double>> drams;
    for (const auto& u : fp0.units)
        if (!u.is_void && u.name.rfind("DRAM", 0) == 0) drams.emplace_back(u.name, 0.0);
    if (!drams.empty()) {
        for (auto& [name, w] : drams) w = 1.0 / static_cast<double>(drams.size());
        m.rules["DRAMP"] = MappingTarget{MappingTarget::Kind::Weighted, "", "", drams};
    }
    return m;
}

namespace {

MappingTarget parse_target(const std::string& spec, std::size_t lineno) {
    MappingTarget t;
    if (spec.rfind("unit:", 0) == 0) {
        t.kind = MappingTarget::Kind::Unit;
        t.unit = spec.substr(5);
        if (t.unit.empty()) throw ParseError("empty unit name", lineno);
        return t;
    }
    if (spec.rfind("sm:", 0) == 0) {
        t.kind = MappingTarget::Kind::PerSm;
        t.sm_kind = spec.substr(3);
        if (t.sm_kind.empty()) throw ParseError("empty sm kind", lineno);
        return t;
    }
    if (spec.rfind("split:", 0) == 0) {
        t.kind = MappingTarget::Kind::Weighted;
        std::istringstream in(spec.substr(6));
        std::string item;
        double sum = 0.0;
        while (std::getline(in, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ParseError("bad split item: " + item, lineno);
            double w;
            try {
                std::size_t pos = 0;
                w = std::stod(item.substr(eq + 1), &pos);
                if (pos != item.size() - eq - 1 || w < 0.0) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw ParseError("bad split weight: " + item, lineno);
            }
            t.weights.emplace_back(item.substr(0, eq), w);
            sum += w;
        }
        if (t.weights.empty()) throw ParseError("empty split target", lineno);
        if (std::abs(sum - 1.0) > 1e-12) throw ParseError("split weights must sum to 1", lineno);
        return t;
    }
    throw ParseError("unknown target spec: " + spec, lineno);
}

std::string target_to_string(const MappingTarget& t) {
    switch (t.kind) {
    case MappingTarget::Kind::Unit:
        return "unit:" + t.unit;
    case MappingTarget::Kind::PerSm:
        return "sm:" + t.sm_kind;
    case MappingTarget::Kind::Weighted: {
        std::string out = "split:";
        bool first = true;
        for (const auto& [name, w] : t.weights) {
            if (!first) out += ',';
            out += name + "=" + fmt_double(w);
            first = false;
        }
        return out;
    }
    }
    return {};
}

} // namespace

ComponentMapping parse_mapping(const std::string& text) {
    ComponentMapping m;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 3 || toks[1] != "->")
            throw ParseError("expected `<component> -> <target>`: " + line, lineno);
        m.rules[toks[0]] = parse_target(toks[2], lineno);
    }
    return m;
}

std::string serialize_mapping(const ComponentMapping& mapping) {
    std::string out;
    for (const auto& [comp, target] : mapping.rules)
        out += comp + " -> " + target_to_string(target) + "\n";
    return out;
}

MapResult map_to_units(const PowerReport& report, const ComponentMapping& mapping,
                       const Floorplan& fp0, const Floorplan& fp2) {
    MapResult result;
    PowerTrace& trace = result.trace;
    trace.unit_names = fp0.nonvoid_names();
    for (auto& n : fp2.nonvoid_names()) trace.unit_names.push_back(n);

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < trace.unit_names.size(); ++i)
        index[trace.unit_names[i]] = i;

    trace.rows.assign(5, std::vector<double>(trace.unit_names.size(), 0.0));

    // column indices per SM sub-unit kind, e.g. EXE -> all SM<i>_EXE columns
    auto sm_columns = [&](const std::string& kind) {
        std::vector<std::size_t> cols;
        const std::string suffix = "_" + kind;
        for (std::size_t i = 0; i < trace.unit_names.size(); ++i) {
            const std::string& n = trace.unit_names[i];
            if (n.rfind("SM", 0) == 0 && n.size() > suffix.size() &&
                n.compare(n.size() - suffix.size(), suffix.size(), suffix) == 0)
                cols.push_back(i);
        }
        return cols;
    };

    for (const auto& e : report.entries) {
        check_order(e);
        const auto expanded = expand_samples(e.min_W, e.avg_W, e.max_W);
        if (!expanded.mean_preserved)
            result.warnings.push_back("MeanNotPreserved: component " + e.component);

        const MappingTarget* target = nullptr;
        if (auto it = mapping.rules.find(e.component); it != mapping.rules.end()) {
            target = &it->second;
        } else if (mapping.default_target) {
            target = &*mapping.default_target;
            result.warnings.push_back("UnmappedComponent: " + e.component +
                                      " routed to default target");
        } else {
            throw UnknownComponent(e.component);
        }

        std::vector<std::pair<std::size_t, double>> dist; // (column, share)
        switch (target->kind) {
        case MappingTarget::Kind::Unit: {
            auto it = index.find(target->unit);
            if (it == index.end()) throw UnknownUnit(target->unit);
            dist.emplace_back(it->second, 1.0);
            break;
        }
        case MappingTarget::Kind::PerSm: {
            auto cols = sm_columns(target->sm_kind);
            if (cols.empty()) throw UnknownUnit("SM*_" + target->sm_kind);
            for (auto c : cols) dist.emplace_back(c, 1.0 / static_cast<double>(cols.size()));
            break;
        }
        case MappingTarget::Kind::Weighted:
            for (const auto& [name, w] : target->weights) {
                auto it = index.find(name);
                if (it == index.end()) throw UnknownUnit(name);
                dist.emplace_back(it->second, w);
            }
            break;
        }

        for (int k = 0; k < 5; ++k)
            for (const auto& [col, share] : dist)
                trace.rows[k][col] += expanded.values[k] * share;
    }
    return result;
}

std::string serialize_ptrace(const PowerTrace& trace) {
    std::string out;
    for (std::size_t i = 0; i < trace.unit_names.size(); ++i) {
        if (i) out += '\t';
        out += trace.unit_names[i];
    }
    out += '\n';
    for (const auto& row : trace.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += '\t';
            out += fmt_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

PowerTrace parse_ptrace(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty ptrace", 1);
    PowerTrace trace;
    trace.unit_names = split_ws(line);
    if (trace.unit_names.empty()) throw ParseError("ptrace header has no unit names", 1);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != trace.unit_names.size())
            throw RowLengthMismatch("line " + std::to_string(lineno) + ": expected " +
                                    std::to_string(trace.unit_names.size()) + " values, got " +
                                    std::to_string(toks.size()));
        std::vector<double> row;
        for (const auto& t : toks) row.push_back(parse_watts(t, lineno));
        trace.rows.push_back(std::move(row));
    }
    return trace;
}

} // namespace gputherm
