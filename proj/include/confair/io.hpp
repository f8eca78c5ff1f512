#pragma once

// Canonical text formats for instances and allocations. The serialized form
// is bit-exact: fixed key order, edges sorted lexicographically, bundles
// sorted ascending, rationals as "p" or "p/q" strings (integers stay plain
// JSON numbers when they fit).

#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "confair/errors.hpp"
#include "confair/model.hpp"

namespace confair {

using json = nlohmann::ordered_json;

namespace detail {

inline json rational_to_json(const Rational& r) {
    if (denominator(r) == 1) {
        BigInt num = numerator(r);
        // keep small integers as numbers, large or fractional values as text
        if (num >= std::numeric_limits<std::int64_t>::min() &&
            num <= std::numeric_limits<std::int64_t>::max())
            return static_cast<std::int64_t>(num);
    }
    return to_string(r);
}

inline Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw InvalidInstance("valuation entries must be integers or rational strings");
}

}  // namespace detail

inline json instance_to_json(const Instance& inst) {
    json j;
    j["agents"] = inst.n_agents;
    j["items"] = inst.n_items;
    json vals = json::array();
    for (const auto& row : inst.valuations) {
        json r = json::array();
        for (const Rational& v : row) r.push_back(detail::rational_to_json(v));
        vals.push_back(std::move(r));
    }
    j["valuations"] = std::move(vals);
    json edges = json::array();
    for (auto [a, b] : inst.edges) edges.push_back(json::array({a, b}));
    j["edges"] = std::move(edges);
    return j;
}

inline Instance instance_from_json(const json& j) {
    if (!j.is_object() || !j.contains("agents") || !j.contains("items") ||
        !j.contains("valuations") || !j.contains("edges"))
        throw InvalidInstance("instance document must have agents, items, valuations, edges");
    int n = j.at("agents").get<int>();
    int m = j.at("items").get<int>();
    std::vector<std::vector<Rational>> vals;
    for (const json& row : j.at("valuations")) {
        std::vector<Rational> r;
        for (const json& v : row) r.push_back(detail::rational_from_json(v));
        vals.push_back(std::move(r));
    }
    std::vector<std::pair<int, int>> edges;
    for (const json& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw InvalidInstance("edges must be pairs");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return validate_instance(n, m, std::move(vals), std::move(edges));
}

inline json allocation_to_json(const Allocation& alloc) {
    Allocation a = alloc;
    a.normalize();
    json bundles = json::array();
    for (const ItemSet& b : a.bundles) bundles.push_back(b);
    json j;
    j["bundles"] = std::move(bundles);
    return j;
}

inline Allocation allocation_from_json(const json& j) {
    if (!j.is_object() || !j.contains("bundles"))
        throw InvalidInstance("allocation document must have bundles");
    Allocation a;
    for (const json& b : j.at("bundles")) a.bundles.push_back(b.get<ItemSet>());
    a.normalize();
    return a;
}

inline std::string instance_to_text(const Instance& inst) {
    return instance_to_json(inst).dump(2) + "\n";
}

inline std::string allocation_to_text(const Allocation& alloc) {
    return allocation_to_json(alloc).dump(2) + "\n";
}

inline json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInstance(std::string("malformed document: ") + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInstance("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

inline Instance load_instance(const std::string& path) {
    return instance_from_json(parse_document(read_file(path)));
}

inline Allocation load_allocation(const std::string& path) {
    return allocation_from_json(parse_document(read_file(path)));
}

}  // namespace confair
