// netfile.cpp: .qnet parsing, serialization and component construction.

#include "lqfn/netfile.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace lqfn {

namespace {

// 1-based line/column of a byte offset.
std::pair<int, int> locate(std::string_view text, std::size_t offset) {
    int line = 1, column = 1;
    for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

const Json& require(const Json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(where + ": missing field '" + key + "'");
    return *it;
}

void only_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ValidationError(where + ": unknown field '" + it.key() + "'");
    }
}

std::string require_string(const Json& j, const std::string& where) {
    if (!j.is_string()) throw ValidationError(where + ": expected a string");
    return j.get<std::string>();
}

double require_number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ValidationError(where + ": expected a number");
    return j.get<double>();
}

// Parameter reader that rejects keys it was never asked for.
class Params {
public:
    Params(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ValidationError(where_ + ": params must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double real(const std::string& key) {
        return require_number(require(j_, mark(key), where_), where_ + "." + key);
    }
    double real_or(const std::string& key, double fallback) { return has(key) ? real(key) : fallback; }

    Complex complex(const std::string& key) {
        return complex_from_json(require(j_, mark(key), where_), where_ + "." + key);
    }
    ComplexMatrix matrix(const std::string& key) {
        return matrix_from_json(require(j_, mark(key), where_), where_ + "." + key);
    }
    DoubledMatrix doubled(const std::string& key) {
        return doubled_from_json(require(j_, mark(key), where_), where_ + "." + key);
    }
    Index count(const std::string& key, Index fallback) {
        if (!has(key)) return fallback;
        const Json& v = j_.at(mark(key));
        if (!v.is_number_integer()) throw ValidationError(where_ + "." + key + ": expected an integer");
        return v.get<Index>();
    }
    std::string label(const std::string& key, const std::string& fallback) {
        return has(key) ? require_string(j_.at(mark(key)), where_ + "." + key) : fallback;
    }
    std::optional<ModeLabels> labels(const std::string& key) {
        if (!has(key)) return std::nullopt;
        const Json& v = j_.at(mark(key));
        if (!v.is_array()) throw ValidationError(where_ + "." + key + ": expected an array of strings");
        ModeLabels out;
        for (const auto& e : v) out.push_back(require_string(e, where_ + "." + key));
        return out;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) throw ValidationError(where_ + ": unknown parameter '" + it.key() + "'");
        }
    }

private:
    const std::string& mark(const std::string& key) {
        used_.insert(key);
        return key;
    }

    const Json& j_;
    std::string where_;
    std::set<std::string> used_;
};

}  // namespace

// ---- value conversion -------------------------------------------------------

Complex complex_from_json(const Json& j, const std::string& what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ValidationError(what + ": expected a number or [re, im]");
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& what) {
    if (j.is_number()) return ComplexMatrix::Constant(1, 1, complex_from_json(j, what));
    if (!j.is_array()) throw ValidationError(what + ": expected a matrix (nested arrays)");
    if (j.empty()) return ComplexMatrix(0, 0);
    const Index rows = static_cast<Index>(j.size());
    if (!j[0].is_array()) throw ValidationError(what + ": expected a matrix (nested arrays)");
    const Index cols = static_cast<Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            throw ValidationError(what + ": rows have different lengths");
        }
        for (Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], what);
    }
    return m;
}

DoubledMatrix doubled_from_json(const Json& j, const std::string& what) {
    if (!j.is_object()) throw ValidationError(what + ": expected {\"minus\": ..., \"plus\": ...}");
    only_keys(j, {"minus", "plus"}, what);
    ComplexMatrix minus = matrix_from_json(require(j, "minus", what), what + ".minus");
    ComplexMatrix plus = j.contains("plus") ? matrix_from_json(j.at("plus"), what + ".plus")
                                            : ComplexMatrix::Zero(minus.rows(), minus.cols());
    try {
        return DoubledMatrix(std::move(minus), std::move(plus));
    } catch (const DimensionError& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexMatrix& m) {
    Json out = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

Json to_json(const ComplexVector& v) {
    Json out = Json::array();
    for (Index k = 0; k < v.size(); ++k) out.push_back(to_json(v(k)));
    return out;
}

Json to_json(const DoubledMatrix& d) {
    Json out = Json::object();
    out["minus"] = to_json(d.minus());
    out["plus"] = to_json(d.plus());
    return out;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

bool is_flat_array(const Json& j) {
    if (!j.is_array()) return false;
    for (const auto& e : j) {
        if (e.is_structured()) {
            // [re, im] pairs stay inline too
            if (!(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())) return false;
        }
    }
    return true;
}

void dump_to(std::ostringstream& os, const Json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case Json::value_t::number_float:
            os << format_double(j.get<double>());
            return;
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad << Json(it.key()).dump() << ": ";
                dump_to(os, it.value(), indent, depth + 1);
            }
            os << "\n" << close << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            if (is_flat_array(j)) {
                os << "[";
                for (std::size_t k = 0; k < j.size(); ++k) {
                    if (k) os << ", ";
                    dump_to(os, j[k], indent, depth + 1);
                }
                os << "]";
                return;
            }
            os << "[\n";
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k) os << ",\n";
                os << pad;
                dump_to(os, j[k], indent, depth + 1);
            }
            os << "\n" << close << "]";
            return;
        }
        default:
            os << j.dump();
    }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::ostringstream os;
    dump_to(os, j, indent, 0);
    return os.str();
}

// ---- file format ------------------------------------------------------------

NetworkFile parse_network_text(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, column] = locate(text, at);
        throw ParseError("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + e.what(),
                         line, column);
    }
    if (!j.is_object()) throw ValidationError("network file: top level must be an object");
    only_keys(j, {"version", "description", "components", "connections", "external"}, "network file");

    NetworkFile f;
    const Json& version = require(j, "version", "network file");
    if (!version.is_number_integer() || version.get<int>() != 1) {
        throw ValidationError("network file: unsupported version (expected 1)");
    }
    if (j.contains("description")) f.description = require_string(j.at("description"), "description");

    const Json& comps = require(j, "components", "network file");
    if (!comps.is_array()) throw ValidationError("components: expected an array");
    for (const auto& c : comps) {
        if (!c.is_object()) throw ValidationError("components: entries must be objects");
        only_keys(c, {"name", "kind", "params"}, "component");
        ComponentDecl d;
        d.name = require_string(require(c, "name", "component"), "component.name");
        d.kind = require_string(require(c, "kind", "component '" + d.name + "'"), "component.kind");
        if (c.contains("params")) d.params = c.at("params");
        if (!d.params.is_object()) throw ValidationError("component '" + d.name + "': params must be an object");
        f.components.push_back(std::move(d));
    }

    if (j.contains("connections")) {
        const Json& conns = j.at("connections");
        if (!conns.is_array()) throw ValidationError("connections: expected an array");
        for (const auto& c : conns) {
            if (!c.is_object()) throw ValidationError("connections: entries must be objects");
            only_keys(c, {"from", "to", "delay"}, "connection");
            ConnectionDecl d;
            d.from = require_string(require(c, "from", "connection"), "connection.from");
            d.to = require_string(require(c, "to", "connection"), "connection.to");
            if (c.contains("delay")) d.delay = require_number(c.at("delay"), "connection.delay");
            f.connections.push_back(std::move(d));
        }
    }

    const Json& ext = require(j, "external", "network file");
    if (!ext.is_object()) throw ValidationError("external: expected an object");
    only_keys(ext, {"inputs", "outputs"}, "external");
    for (const char* key : {"inputs", "outputs"}) {
        const Json& list = require(ext, key, "external");
        if (!list.is_array()) throw ValidationError(std::string("external.") + key + ": expected an array");
        for (const auto& p : list) {
            (std::string(key) == "inputs" ? f.inputs : f.outputs).push_back(require_string(p, key));
        }
    }
    return f;
}

NetworkFile load_network(const std::string& source) {
    if (!source.empty() && source[0] == '@') {
        for (const auto& b : bundled_networks()) {
            if (source.substr(1) == b.name) return parse_network_text(b.text);
        }
        throw ValidationError("unknown bundled network '" + source + "'");
    }
    std::ifstream in(source, std::ios::binary);
    if (!in) throw Error("cannot read file '" + source + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network_text(buf.str());
}

std::string serialize(const NetworkFile& f) {
    Json j = Json::object();
    j["version"] = f.version;
    if (!f.description.empty()) j["description"] = f.description;
    Json comps = Json::array();
    for (const auto& c : f.components) {
        Json e = Json::object();
        e["name"] = c.name;
        e["kind"] = c.kind;
        e["params"] = c.params;
        comps.push_back(std::move(e));
    }
    j["components"] = std::move(comps);
    Json conns = Json::array();
    for (const auto& c : f.connections) {
        Json e = Json::object();
        e["from"] = c.from;
        e["to"] = c.to;
        if (c.delay) e["delay"] = *c.delay;
        conns.push_back(std::move(e));
    }
    j["connections"] = std::move(conns);
    j["external"] = Json::object();
    j["external"]["inputs"] = f.inputs;
    j["external"]["outputs"] = f.outputs;
    return dump_json(j) + "\n";
}

PortRef parse_port(const std::string& text, bool input) {
    const std::string dir = input ? "in" : "out";
    const auto dot = text.rfind('.');
    if (dot == std::string::npos || dot == 0) {
        throw ValidationError("port '" + text + "': expected <node>." + dir + "<k>");
    }
    const std::string node = text.substr(0, dot), tail = text.substr(dot + 1);
    if (tail.rfind(dir, 0) != 0 || tail.size() == dir.size()) {
        throw ValidationError("port '" + text + "': expected an " + (input ? "input" : "output") + " port <node>." +
                              dir + "<k>");
    }
    const std::string digits = tail.substr(dir.size());
    for (char ch : digits) {
        if (ch < '0' || ch > '9') throw ValidationError("port '" + text + "': port number must be a positive integer");
    }
    const long k = std::stol(digits);
    if (k < 1) throw ValidationError("port '" + text + "': port numbers start at 1");
    return {node, static_cast<Index>(k - 1)};
}

LinearComponent make_component(const std::string& kind, const Json& params, const std::string& name) {
    Params p(params, "component '" + name + "'");
    auto done = [&](LinearComponent g) {
        p.finish();
        return g;
    };

    if (kind == "static") return done(static_component(SymplecticMatrix(p.doubled("s"))));
    if (kind == "identity") return done(identity_component(p.count("n", 1)));
    if (kind == "cavity") {
        const double gamma = p.real("gamma"), omega = p.real_or("omega", 0.0);
        return done(cavity(gamma, omega, p.label("mode", name)));
    }
    if (kind == "dpa") {
        const double kappa = p.real("kappa"), epsilon = p.real("epsilon");
        return done(dpa(kappa, epsilon, p.label("mode", name)));
    }
    if (kind == "squeezer") {
        if (p.has("r") == p.has("cosh_r")) {
            throw ValidationError("component '" + name + "': squeezer needs exactly one of r, cosh_r");
        }
        return done(p.has("r") ? squeezer(p.real("r")) : squeezer_cosh(p.real("cosh_r")));
    }
    if (kind == "beamsplitter") {
        if (p.has("epsilon")) {
            if (p.has("alpha") || p.has("beta")) {
                throw ValidationError("component '" + name + "': give either epsilon or (alpha, beta)");
            }
            return done(beamsplitter(p.real("epsilon")));
        }
        const Complex alpha = p.complex("alpha"), beta = p.complex("beta");
        return done(beamsplitter(alpha, beta));
    }
    if (kind == "phase_shift") return done(phase_shift(p.real("theta")));
    if (kind == "custom") {
        const ComplexMatrix cm = p.matrix("c_minus");
        const Index n = cm.rows(), m = cm.cols();
        const ComplexMatrix cp = p.has("c_plus") ? p.matrix("c_plus") : ComplexMatrix::Zero(n, m);
        const ComplexMatrix om = p.has("omega_minus") ? p.matrix("omega_minus") : ComplexMatrix::Zero(m, m);
        const ComplexMatrix op = p.has("omega_plus") ? p.matrix("omega_plus") : ComplexMatrix::Zero(m, m);
        const DoubledMatrix s = p.has("s") ? p.doubled("s") : DoubledMatrix::identity(n);
        ModeLabels labels = p.labels("modes").value_or(default_labels(name, m));
        if (cp.rows() != n || cp.cols() != m || om.rows() != m || om.cols() != m || op.rows() != m ||
            op.cols() != m || s.rows() != n || s.cols() != n) {
            throw ValidationError("component '" + name + "': custom matrices have inconsistent shapes");
        }
        return done(custom(SymplecticMatrix(s), cm, cp, om, op, std::move(labels)));
    }
    throw ValidationError("component '" + name + "': unknown kind '" + kind + "'");
}

NetworkGraph build_graph(const NetworkFile& f) {
    NetworkGraph g;
    for (const auto& c : f.components) {
        if (c.name.empty() || c.name.find('.') != std::string::npos) {
            throw ValidationError("component name '" + c.name + "' must be nonempty and contain no '.'");
        }
        g.nodes.push_back({c.name, make_component(c.kind, c.params, c.name)});
    }
    for (const auto& c : f.connections) {
        g.edges.push_back({parse_port(c.from, false), parse_port(c.to, true), c.delay});
    }
    for (const auto& p : f.inputs) g.inputs.push_back(parse_port(p, true));
    for (const auto& p : f.outputs) g.outputs.push_back(parse_port(p, false));
    return g;
}

NetworkGraph parse_network(const std::string& source) { return build_graph(load_network(source)); }

}  // namespace lqfn
