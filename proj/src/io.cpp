#include "anonprice/io.hpp"

#include "anonprice/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace anonprice {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("instance json: " + what); }

void only_fields(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) bad(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) bad("unknown field '" + key + "' in " + where);
    }
}

double number(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) bad("missing field '" + std::string(key) + "' in " + where);
    if (!it->is_number()) bad("field '" + std::string(key) + "' in " + where + " must be a number");
    return it->get<double>();
}

Distribution parse_dist(const json& j, std::size_t index) {
    const std::string where = "distributions[" + std::to_string(index) + "]";
    if (!j.is_object()) bad(where + " must be an object");
    auto t = j.find("type");
    if (t == j.end() || !t->is_string()) bad(where + " needs a string 'type'");
    const auto type = t->get<std::string>();
    if (type == "triangular") {
        only_fields(j, {"type", "v", "q"}, where);
        return triangular(number(j, "v", where), number(j, "q", where));
    }
    if (type == "tri_infinity") {
        only_fields(j, {"type", "r0"}, where);
        return tri_infinity(number(j, "r0", where));
    }
    if (type == "piecewise_rq") {
        only_fields(j, {"type", "knots"}, where);
        auto k = j.find("knots");
        if (k == j.end() || !k->is_array()) bad(where + " needs a 'knots' array");
        std::vector<PiecewiseRQDist::Knot> knots;
        for (const auto& pt : *k) {
            if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
                bad(where + " knots must be [q, r] number pairs");
            knots.emplace_back(pt[0].get<double>(), pt[1].get<double>());
        }
        return piecewise_rq(std::move(knots));
    }
    bad(where + " has unknown type '" + type + "'");
}

json dist_to_json(const Distribution& d) {
    if (const auto* t = std::get_if<TriangularDist>(&d)) return {{"type", "triangular"}, {"v", t->v}, {"q", t->q}};
    if (const auto* t = std::get_if<TriInfinityDist>(&d)) return {{"type", "tri_infinity"}, {"r0", t->r0}};
    if (const auto* p = std::get_if<PiecewiseRQDist>(&d)) {
        json knots = json::array();
        for (const auto& [q, r] : p->knots()) knots.push_back({q, r});
        return {{"type", "piecewise_rq"}, {"knots", knots}};
    }
    throw unsupported_error("instance json: potential-shifted distributions are not serializable");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string(what) + ": " + e.what());
    }
}

}  // namespace

Instance parse_instance(const std::string& text) {
    const json j = parse_json(text, "instance json");
    only_fields(j, {"distributions", "gamma"}, "instance");
    auto ds = j.find("distributions");
    if (ds == j.end() || !ds->is_array()) bad("missing 'distributions' array");
    Instance inst;
    for (std::size_t i = 0; i < ds->size(); ++i) inst.dists.push_back(parse_dist((*ds)[i], i));
    if (auto g = j.find("gamma"); g != j.end() && !g->is_null()) {
        if (!g->is_number()) bad("'gamma' must be a number or null");
        const double gamma = g->get<double>();
        if (!(gamma >= 1.0)) bad("'gamma' must be >= 1");
        inst.gamma = gamma;
    }
    return inst;
}

Instance read_instance_file(const std::string& path) { return parse_instance(slurp(path)); }

std::string instance_to_json(const Instance& inst) {
    json ds = json::array();
    for (const auto& d : inst.dists) ds.push_back(dist_to_json(d));
    json j = {{"distributions", ds}, {"gamma", inst.gamma ? json(*inst.gamma) : json(nullptr)}};
    return j.dump();
}

RunConfig parse_config(const std::string& text) {
    const json j = parse_json(text, "config json");
    auto fail = [](const std::string& m) { throw std::invalid_argument("config json: " + m); };
    if (!j.is_object()) fail("top level must be an object");
    RunConfig cfg;
    for (const auto& [key, val] : j.items()) {
        if (key == "quadrature") {
            if (!val.is_object()) fail("'quadrature' must be an object");
            for (const auto& [qk, qv] : val.items()) {
                if (!qv.is_number()) fail("quadrature." + qk + " must be a number");
                if (qk == "abs_tol") cfg.quad.abs_tol = qv.get<double>();
                else if (qk == "rel_tol") cfg.quad.rel_tol = qv.get<double>();
                else if (qk == "tail_cutoff") cfg.quad.tail_cutoff = qv.get<double>();
                else if (qk == "max_subdivisions") {
                    if (!qv.is_number_unsigned()) fail("quadrature.max_subdivisions must be a positive integer");
                    cfg.quad.max_subdivisions = qv.get<unsigned>();
                } else fail("unknown field 'quadrature." + qk + "'");
            }
        } else if (key == "grid_points") {
            if (!val.is_number_unsigned() || val.get<std::size_t>() < 2) fail("'grid_points' must be an integer >= 2");
            cfg.grid_points = val.get<std::size_t>();
        } else if (key == "mc_shards") {
            if (!val.is_number_unsigned() || val.get<unsigned>() < 1) fail("'mc_shards' must be a positive integer");
            cfg.mc_shards = val.get<unsigned>();
        } else {
            fail("unknown field '" + key + "'");
        }
    }
    cfg.quad.validate();
    return cfg;
}

RunConfig read_config_file(const std::string& path) { return parse_config(slurp(path)); }

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

}  // namespace anonprice
