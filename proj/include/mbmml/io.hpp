#ifndef MBMML_IO_HPP
#define MBMML_IO_HPP

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbmml/common.hpp"
#include "mbmml/core.hpp"
#include "mbmml/search.hpp"

namespace mbmml {

namespace detail {

// Shortest round-trip representation, deterministic across runs.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << bytes;
}

}  // namespace detail

// ---- network JSON ----------------------------------------------------------

inline std::string network_to_json(const BayesianNetwork& bn) {
    bn.validate();
    nlohmann::ordered_json j;
    j["variables"] = nlohmann::ordered_json::array();
    for (const auto& v : bn.dag.variables())
        j["variables"].push_back({{"name", v.name}, {"arity", v.arity}});
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& [p, c] : bn.dag.edges())  // std::set: sorted, deterministic
        j["edges"].push_back({bn.dag.variable(p).name, bn.dag.variable(c).name});
    j["cpts"] = nlohmann::ordered_json::object();
    for (int i = 0; i < bn.dag.size(); ++i) {
        auto parents = bn.dag.parents(i);
        std::sort(parents.begin(), parents.end());
        nlohmann::ordered_json entry;
        entry["parent_order"] = nlohmann::ordered_json::array();
        for (int p : parents) entry["parent_order"].push_back(bn.dag.variable(p).name);
        entry["rows"] = bn.cpts[static_cast<std::size_t>(i)];
        j["cpts"][bn.dag.variable(i).name] = std::move(entry);
    }
    return j.dump(2) + "\n";
}

inline BayesianNetwork network_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("network JSON parse error: ") + e.what());
    }
    try {
        std::vector<Variable> vars;
        for (const auto& v : j.at("variables"))
            vars.push_back({v.at("name").get<std::string>(), v.at("arity").get<int>()});
        Dag dag(std::move(vars));
        for (const auto& e : j.at("edges"))
            dag.add_edge(dag.index_of(e.at(0).get<std::string>()), dag.index_of(e.at(1).get<std::string>()));
        BayesianNetwork bn;
        bn.dag = std::move(dag);
        bn.cpts.resize(static_cast<std::size_t>(bn.dag.size()));
        const auto& cpts = j.at("cpts");
        for (int i = 0; i < bn.dag.size(); ++i) {
            const auto& entry = cpts.at(bn.dag.variable(i).name);
            auto expected = bn.dag.parents(i);
            std::sort(expected.begin(), expected.end());
            std::vector<std::string> order = entry.at("parent_order").get<std::vector<std::string>>();
            if (static_cast<int>(order.size()) != static_cast<int>(expected.size()))
                throw DataError("parent_order size mismatch for '" + bn.dag.variable(i).name + "'");
            for (std::size_t k = 0; k < order.size(); ++k)
                if (bn.dag.index_of(order[k]) != expected[k])
                    throw DataError("parent_order must list parents in ascending index order for '" +
                                    bn.dag.variable(i).name + "'");
            bn.cpts[static_cast<std::size_t>(i)] = entry.at("rows").get<std::vector<std::vector<double>>>();
        }
        bn.validate();
        return bn;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("network JSON field error: ") + e.what());
    }
}

// ---- dataset CSV ------------------------------------------------------------

// dataset_csv (core.hpp) provides the canonical bytes. Arities are recovered
// from a network when given, else declared as max observed state + 1 (>= 2).
inline DiscreteDataset dataset_from_csv(const std::string& text,
                                        const std::vector<Variable>* declared = nullptr) {
    DiscreteDataset out;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("dataset CSV: missing header");
    std::istringstream hs(line);
    std::string field;
    while (std::getline(hs, field, ',')) out.variables.push_back({field, 2});
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<int> rec;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) {
            int v = 0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (res.ec != std::errc() || res.ptr != field.data() + field.size() || v < 0)
                throw DataError("dataset CSV line " + std::to_string(line_no) + ": bad state value '" +
                                field + "'");
            rec.push_back(v);
        }
        if (rec.size() != out.variables.size())
            throw DataError("dataset CSV line " + std::to_string(line_no) + ": wrong field count");
        for (std::size_t j = 0; j < rec.size(); ++j)
            out.variables[j].arity = std::max(out.variables[j].arity, rec[j] + 1);
        out.records.push_back(std::move(rec));
    }
    if (declared) {
        if (declared->size() != out.variables.size())
            throw DataError("dataset/network variable count mismatch");
        for (std::size_t j = 0; j < out.variables.size(); ++j) {
            if ((*declared)[j].name != out.variables[j].name)
                throw DataError("dataset/network variable name mismatch at column " + std::to_string(j));
            if ((*declared)[j].arity < out.variables[j].arity)
                throw DataError("dataset state exceeds declared arity for '" + out.variables[j].name + "'");
            out.variables[j].arity = (*declared)[j].arity;
        }
    }
    out.validate();
    return out;
}

// ---- Markov Blanket set JSON -------------------------------------------------

inline std::string mbs_to_json(const MarkovBlanketSet& mbs, const std::vector<Variable>& vars) {
    nlohmann::ordered_json j;
    j["method"] = mbs.method;
    j["seed"] = mbs.seed;
    j["alpha"] = mbs.alpha;
    j["symmetry"] = mbs.symmetry;
    j["dataset_hash"] = mbs.dataset_hash;
    j["blankets"] = nlohmann::ordered_json::object();
    for (const auto& mb : mbs.blankets) {
        std::vector<std::string> names;
        for (int m : mb.members) names.push_back(vars[static_cast<std::size_t>(m)].name);
        std::sort(names.begin(), names.end());
        j["blankets"][vars[static_cast<std::size_t>(mb.target)].name] = names;
    }
    return j.dump(2) + "\n";
}

inline MarkovBlanketSet mbs_from_json(const std::string& text, const std::vector<Variable>& vars) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("MB set JSON parse error: ") + e.what());
    }
    auto index_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i].name == name) return static_cast<int>(i);
        throw DataError("MB set JSON: unknown variable '" + name + "'");
    };
    try {
        MarkovBlanketSet out;
        out.method = j.at("method").get<std::string>();
        out.seed = j.at("seed").get<std::uint64_t>();
        out.alpha = j.at("alpha").get<double>();
        out.symmetry = j.at("symmetry").get<std::string>();
        out.dataset_hash = j.value("dataset_hash", std::string());
        out.blankets.resize(vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i)
            out.blankets[i].target = static_cast<int>(i);
        for (const auto& [name, members] : j.at("blankets").items()) {
            auto& mb = out.blankets[static_cast<std::size_t>(index_of(name))];
            for (const auto& m : members) mb.members.insert(index_of(m.get<std::string>()));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("MB set JSON field error: ") + e.what());
    }
}

}  // namespace mbmml

#endif
