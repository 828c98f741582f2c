#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "toposwitch/model.hpp"

namespace toposwitch {

// ---------- native JSON case format ----------

inline Network parse_case(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw model_error(std::string("case document is not valid JSON: ") + e.what());
    }
    Network net;
    if (!doc.contains("buses") || !doc.contains("lines") || !doc.contains("generators"))
        throw model_error("case document needs buses, lines and generators arrays");
    for (const auto& jb : doc["buses"]) {
        Bus b;
        b.id = jb.at("id").get<int>();
        b.load_mw = jb.value("load_mw", 0.0);
        net.buses.push_back(b);
    }
    for (const auto& jl : doc["lines"]) {
        Line l;
        l.id = jl.at("id").get<int>();
        l.from = jl.at("from").get<int>();
        l.to = jl.at("to").get<int>();
        l.susceptance = jl.at("susceptance").get<double>();
        l.capacity_mw = jl.at("capacity_mw").get<double>();
        if (jl.contains("status")) {
            std::string s = jl["status"].get<std::string>();
            l.in_service = (s == "in");
            if (s != "in" && s != "out")
                throw model_error("line " + std::to_string(l.id) + " has bad status '" + s + "'");
        }
        net.lines.push_back(l);
    }
    for (const auto& jg : doc["generators"]) {
        Generator g;
        g.id = jg.at("id").get<int>();
        g.bus = jg.at("bus").get<int>();
        g.cost_per_mwh = jg.at("cost_per_mwh").get<double>();
        g.pmin_mw = jg.value("pmin_mw", 0.0);
        g.pmax_mw = jg.at("pmax_mw").get<double>();
        net.generators.push_back(g);
    }
    if (doc.contains("reference_bus")) net.reference_bus = doc["reference_bus"].get<int>();
    net.finalize();
    return net;
}

inline std::string emit_case(const Network& net) {
    nlohmann::json doc;
    doc["buses"] = nlohmann::json::array();
    for (const Bus& b : net.buses)
        doc["buses"].push_back({{"id", b.id}, {"load_mw", b.load_mw}});
    doc["lines"] = nlohmann::json::array();
    for (const Line& l : net.lines)
        doc["lines"].push_back({{"id", l.id}, {"from", l.from}, {"to", l.to},
                                {"susceptance", l.susceptance},
                                {"capacity_mw", l.capacity_mw},
                                {"status", l.in_service ? "in" : "out"}});
    doc["generators"] = nlohmann::json::array();
    for (const Generator& g : net.generators)
        doc["generators"].push_back({{"id", g.id}, {"bus", g.bus},
                                     {"cost_per_mwh", g.cost_per_mwh},
                                     {"pmin_mw", g.pmin_mw}, {"pmax_mw", g.pmax_mw}});
    doc["reference_bus"] = net.reference_bus;
    return doc.dump(2) + "\n";
}

// ---------- legacy (MATPOWER-style) import ----------

namespace detail {

inline std::vector<std::vector<double>> read_matrix(const std::string& text,
                                                    const std::string& name) {
    std::string key = name + " = [";
    size_t p = text.find(key);
    if (p == std::string::npos) {
        key = name + "=[";
        p = text.find(key);
    }
    if (p == std::string::npos)
        throw model_error("legacy case is missing table " + name);
    size_t start = p + key.size();
    size_t end = text.find("];", start);
    if (end == std::string::npos)
        throw model_error("unterminated table " + name);
    std::string body = text.substr(start, end - start);
    std::vector<std::vector<double>> rows;
    std::string row_text;
    auto flush_row = [&]() {
        std::istringstream rs(row_text);
        std::vector<double> row;
        double x;
        while (rs >> x) row.push_back(x);
        if (!row.empty()) rows.push_back(row);
        row_text.clear();
    };
    for (size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c == '%') {   // comment to end of line
            while (i < body.size() && body[i] != '\n') ++i;
            flush_row();
        } else if (c == ';' || c == '\n') {
            flush_row();
        } else {
            row_text.push_back(c);
        }
    }
    flush_row();
    return rows;
}

}  // namespace detail

inline Network import_legacy_case(const std::string& text) {
    auto bus = detail::read_matrix(text, "mpc.bus");
    auto gen = detail::read_matrix(text, "mpc.gen");
    auto branch = detail::read_matrix(text, "mpc.branch");
    auto gencost = detail::read_matrix(text, "mpc.gencost");
    if (gencost.size() != gen.size())
        throw model_error("gencost rows do not match gen rows");

    Network net;
    for (const auto& r : bus) {
        if (r.size() < 3) throw model_error("short bus row");
        Bus b;
        b.id = (int)std::lround(r[0]);
        b.load_mw = r[2];   // Pd
        net.buses.push_back(b);
    }
    for (size_t i = 0; i < branch.size(); ++i) {
        const auto& r = branch[i];
        if (r.size() < 11) throw model_error("short branch row");
        Line l;
        l.id = (int)i + 1;
        l.from = (int)std::lround(r[0]);
        l.to = (int)std::lround(r[1]);
        double x = r[3];
        if (!(x > 0.0)) throw model_error("branch " + std::to_string(l.id) +
                                          " needs reactance > 0");
        l.susceptance = 1.0 / x;
        double rate_a = r[5];
        l.capacity_mw = rate_a > 0.0 ? rate_a : 1e9;   // 0 = unlimited in the source
        l.in_service = r[10] > 0.5;
        net.lines.push_back(l);
    }
    for (size_t i = 0; i < gen.size(); ++i) {
        const auto& r = gen[i];
        if (r.size() < 10) throw model_error("short gen row");
        Generator g;
        g.id = (int)i + 1;
        g.bus = (int)std::lround(r[0]);
        g.pmax_mw = r[8];
        g.pmin_mw = std::max(0.0, r[9]);
        const auto& c = gencost[i];
        // polynomial rows: model startup shutdown n cn-1 ... c0
        if (c.size() < 4 || (int)std::lround(c[0]) != 2)
            throw model_error("generator " + std::to_string(g.id) +
                              " has an unsupported cost model");
        int ncoef = (int)std::lround(c[3]);
        if ((int)c.size() < 4 + ncoef)
            throw model_error("generator " + std::to_string(g.id) + " has a short cost row");
        std::vector<double> coef(c.begin() + 4, c.begin() + 4 + ncoef);
        // accept only costs that reduce to linear: higher-order terms must be 0
        for (int k = 0; k + 2 < ncoef; ++k) {
            if (std::abs(coef[k]) > 1e-12)
                throw model_error("generator " + std::to_string(g.id) +
                                  " has a nonlinear cost term");
        }
        g.cost_per_mwh = ncoef >= 2 ? coef[ncoef - 2] : 0.0;
        net.generators.push_back(g);
    }
    net.finalize();
    return net;
}

inline Network load_case_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw model_error("cannot open case file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    if (path.size() > 2 && path.substr(path.size() - 2) == ".m")
        return import_legacy_case(text);
    return parse_case(text);
}

}  // namespace toposwitch
