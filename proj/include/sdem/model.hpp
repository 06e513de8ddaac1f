#pragma once
// Polynomial SDE models dX = b(X) dt + sigma(X) dW and their JSON file format.

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdem/parser.hpp"
#include "sdem/polynomial.hpp"

namespace sdem {

class ModelError : public Error {
public:
    using Error::Error;
};

/// Raised when a moment table lacks an index that the closure needs.
class MissingMomentError : public ModelError {
public:
    explicit MissingMomentError(Monomial index)
        : ModelError("initial moment table has no entry for " + index.to_tuple()), index_(std::move(index)) {}
    const Monomial& index() const { return index_; }

private:
    Monomial index_;
};

struct InitialCondition {
    enum class Kind { point, moments };

    Kind kind = Kind::point;
    std::vector<Rational> point;                       // Kind::point
    std::map<Monomial, Rational, GrlexLess> table;     // Kind::moments

    static InitialCondition at_point(std::vector<Rational> x0) {
        InitialCondition ic;
        ic.point = std::move(x0);
        return ic;
    }
    static InitialCondition from_table(std::map<Monomial, Rational, GrlexLess> t) {
        InitialCondition ic;
        ic.kind = Kind::moments;
        ic.table = std::move(t);
        return ic;
    }
};

/// E[X_0^beta]. The empty multi-index always yields 1.
inline Rational initial_moment(const InitialCondition& ic, const Monomial& beta) {
    if (beta.is_constant()) return 1;
    if (ic.kind == InitialCondition::Kind::point) return beta.eval(ic.point);
    auto it = ic.table.find(beta);
    if (it == ic.table.end()) throw MissingMomentError(beta);
    return it->second;
}

struct SdeModel {
    std::string name;
    std::vector<std::string> variables;
    std::size_t brownian_dim = 1;
    std::vector<Polynomial> drift;                  // b, length n
    std::vector<std::vector<Polynomial>> diffusion; // sigma, n rows x m columns
    InitialCondition initial;

    std::size_t dim() const { return variables.size(); }

    /// Highest total degree over all drift and diffusion entries.
    std::uint64_t degree() const {
        std::uint64_t d = 0;
        for (const auto& b : drift) d = std::max(d, b.degree());
        for (const auto& row : diffusion)
            for (const auto& s : row) d = std::max(d, s.degree());
        return d;
    }

    /// Throws ModelError unless all shape and naming invariants hold.
    void validate() const {
        const std::size_t n = dim();
        if (n == 0) throw ModelError("model has no variables");
        std::set<std::string> seen;
        for (const auto& v : variables) {
            if (v.empty() || !(std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_'))
                throw ModelError("invalid variable name '" + v + "'");
            for (char c : v)
                if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
                    throw ModelError("invalid variable name '" + v + "'");
            if (v == "t") throw ModelError("'t' is reserved for time; models must be time-homogeneous");
            if (!seen.insert(v).second) throw ModelError("duplicate variable name '" + v + "'");
        }
        if (brownian_dim == 0) throw ModelError("brownian_dim must be at least 1");
        if (drift.size() != n)
            throw ModelError("drift has " + std::to_string(drift.size()) + " entries, expected " + std::to_string(n));
        if (diffusion.size() != n)
            throw ModelError("diffusion has " + std::to_string(diffusion.size()) + " rows, expected " +
                             std::to_string(n));
        for (std::size_t i = 0; i < n; ++i) {
            if (drift[i].dim() != n) throw ModelError("drift polynomial has wrong dimension");
            if (diffusion[i].size() != brownian_dim)
                throw ModelError("diffusion row " + std::to_string(i + 1) + " has " +
                                 std::to_string(diffusion[i].size()) + " columns, expected " +
                                 std::to_string(brownian_dim));
            for (const auto& s : diffusion[i])
                if (s.dim() != n) throw ModelError("diffusion polynomial has wrong dimension");
        }
        if (initial.kind == InitialCondition::Kind::point) {
            if (initial.point.size() != n)
                throw ModelError("initial point has " + std::to_string(initial.point.size()) + " values, expected " +
                                 std::to_string(n));
        } else {
            for (const auto& [m, v] : initial.table) {
                if (m.dim() != n) throw ModelError("moment table key " + m.to_tuple() + " has wrong length");
                if (m.is_constant() && v != 1) throw ModelError("moment table must map the empty index to 1");
            }
        }
    }
};

namespace detail {

inline Rational rational_field(const nlohmann::json& j, const std::string& where) {
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const Error& e) {
            throw ModelError(where + ": " + e.what());
        }
    }
    if (j.is_number_integer()) return Rational(std::to_string(j.get<long long>()), 10);
    throw ModelError(where + ": expected a rational string such as \"-11/8\" or \"0.3\"");
}

inline Monomial parse_tuple(const std::string& key, std::size_t n) {
    std::string body = key;
    auto strip = [](std::string s) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    body = strip(body);
    if (body.size() < 2 || body.front() != '(' || body.back() != ')')
        throw ModelError("moment table key '" + key + "' must look like (i,j,...)");
    std::vector<Monomial::Exponent> exps;
    std::stringstream ss(body.substr(1, body.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = strip(item);
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
            throw ModelError("moment table key '" + key + "' has a non-integer entry");
        exps.push_back(static_cast<Monomial::Exponent>(std::stoul(item)));
    }
    if (exps.size() != n) throw ModelError("moment table key '" + key + "' has wrong length");
    return Monomial(std::move(exps));
}

inline const nlohmann::json& require(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ModelError(std::string("model is missing required field '") + key + "'");
    return j.at(key);
}

}  // namespace detail

inline SdeModel model_from_json(const nlohmann::json& j) {
    using detail::require;
    if (!j.is_object()) throw ModelError("model must be a JSON object");
    SdeModel m;
    const auto& name = require(j, "name");
    if (!name.is_string()) throw ModelError("'name' must be a string");
    m.name = name.get<std::string>();

    const auto& vars = require(j, "variables");
    if (!vars.is_array()) throw ModelError("'variables' must be an array of strings");
    for (const auto& v : vars) {
        if (!v.is_string()) throw ModelError("'variables' must be an array of strings");
        m.variables.push_back(v.get<std::string>());
    }
    const std::size_t n = m.variables.size();

    const auto& bdim = require(j, "brownian_dim");
    if (!bdim.is_number_integer() || bdim.get<long long>() < 1)
        throw ModelError("'brownian_dim' must be a positive integer");
    m.brownian_dim = bdim.get<std::size_t>();

    auto poly = [&](const nlohmann::json& e, const std::string& where) {
        if (!e.is_string()) throw ModelError(where + " must be a polynomial string");
        try {
            return parse_polynomial(e.get<std::string>(), m.variables);
        } catch (const ParseError& err) {
            throw ModelError(where + ": " + err.what());
        }
    };

    const auto& drift = require(j, "drift");
    if (!drift.is_array()) throw ModelError("'drift' must be an array");
    for (std::size_t i = 0; i < drift.size(); ++i) m.drift.push_back(poly(drift[i], "drift[" + std::to_string(i) + "]"));

    const auto& diff = require(j, "diffusion");
    if (!diff.is_array()) throw ModelError("'diffusion' must be an array of rows");
    for (std::size_t i = 0; i < diff.size(); ++i) {
        if (!diff[i].is_array()) throw ModelError("'diffusion' must be an array of rows");
        std::vector<Polynomial> row;
        for (std::size_t k = 0; k < diff[i].size(); ++k)
            row.push_back(poly(diff[i][k], "diffusion[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
        m.diffusion.push_back(std::move(row));
    }

    const auto& init = require(j, "initial");
    if (!init.is_object() || !init.contains("kind") || !init["kind"].is_string())
        throw ModelError("'initial' must be an object with a 'kind'");
    const auto kind = init["kind"].get<std::string>();
    if (kind == "point") {
        const auto& values = require(init, "values");
        if (!values.is_array()) throw ModelError("'initial.values' must be an array");
        std::vector<Rational> x0;
        for (std::size_t i = 0; i < values.size(); ++i)
            x0.push_back(detail::rational_field(values[i], "initial.values[" + std::to_string(i) + "]"));
        m.initial = InitialCondition::at_point(std::move(x0));
    } else if (kind == "moments") {
        const auto& table = require(init, "table");
        if (!table.is_object()) throw ModelError("'initial.table' must be an object");
        std::map<Monomial, Rational, GrlexLess> t;
        for (const auto& [key, value] : table.items()) {
            Monomial idx = detail::parse_tuple(key, n);
            if (!t.emplace(idx, detail::rational_field(value, "initial.table" + key)).second)
                throw ModelError("duplicate moment table key " + idx.to_tuple());
        }
        m.initial = InitialCondition::from_table(std::move(t));
    } else {
        throw ModelError("unknown initial kind '" + kind + "' (expected 'point' or 'moments')");
    }

    m.validate();
    return m;
}

inline SdeModel load_model(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError(std::string("model is not valid JSON: ") + e.what());
    }
    return model_from_json(j);
}

inline SdeModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_model(buf.str());
}

inline nlohmann::json model_to_json(const SdeModel& m) {
    nlohmann::json j;
    j["name"] = m.name;
    j["variables"] = m.variables;
    j["brownian_dim"] = m.brownian_dim;
    j["drift"] = nlohmann::json::array();
    for (const auto& b : m.drift) j["drift"].push_back(b.to_string(m.variables));
    j["diffusion"] = nlohmann::json::array();
    for (const auto& row : m.diffusion) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& s : row) r.push_back(s.to_string(m.variables));
        j["diffusion"].push_back(r);
    }
    if (m.initial.kind == InitialCondition::Kind::point) {
        nlohmann::json values = nlohmann::json::array();
        for (const auto& v : m.initial.point) values.push_back(v.get_str());
        j["initial"] = {{"kind", "point"}, {"values", values}};
    } else {
        nlohmann::json table = nlohmann::json::object();
        for (const auto& [idx, v] : m.initial.table) table[idx.to_tuple()] = v.get_str();
        j["initial"] = {{"kind", "moments"}, {"table", table}};
    }
    return j;
}

}  // namespace sdem
