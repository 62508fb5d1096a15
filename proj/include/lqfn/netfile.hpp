// netfile.hpp: the JSON network description format (".qnet"), component
// construction by kind name, and deterministic JSON emission.
//
// {
//   "version": 1,
//   "components":  [{"name": "bs", "kind": "beamsplitter", "params": {"epsilon": 0.25}}, ...],
//   "connections": [{"from": "bs.out2", "to": "sq.in1", "delay": 0.1}, ...],
//   "external":    {"inputs": ["bs.in1"], "outputs": ["bs.out1"]}
// }
//
// Complex scalars are numbers or [re, im]; matrices are row-major nested
// arrays; doubled matrices are {"minus": ..., "plus": ...}. Ports are 1-based.

#pragma once

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lqfn/network.hpp"

namespace lqfn {

using Json = nlohmann::ordered_json;

struct ComponentDecl {
    std::string name;
    std::string kind;
    Json params = Json::object();

    bool operator==(const ComponentDecl&) const = default;
};

struct ConnectionDecl {
    std::string from;
    std::string to;
    std::optional<double> delay;

    bool operator==(const ConnectionDecl&) const = default;
};

struct NetworkFile {
    int version = 1;
    std::string description;
    std::vector<ComponentDecl> components;
    std::vector<ConnectionDecl> connections;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    bool operator==(const NetworkFile&) const = default;
};

// Syntax errors raise ParseError with 1-based line and column; schema errors
// raise ValidationError.
NetworkFile parse_network_text(std::string_view text);

// "@name" selects a bundled file; anything else is a filesystem path.
NetworkFile load_network(const std::string& source);

std::string serialize(const NetworkFile& f);

NetworkGraph build_graph(const NetworkFile& f);
NetworkGraph parse_network(const std::string& source);

LinearComponent make_component(const std::string& kind, const Json& params, const std::string& name);

// "node.in2" / "node.out1" -> 0-based PortRef; direction is checked.
PortRef parse_port(const std::string& text, bool input);

struct BundledNetwork {
    const char* name;
    const char* text;
};
std::span<const BundledNetwork> bundled_networks();

// ---- value conversion -------------------------------------------------------

Complex complex_from_json(const Json& j, const std::string& what);
ComplexMatrix matrix_from_json(const Json& j, const std::string& what);
DoubledMatrix doubled_from_json(const Json& j, const std::string& what);

Json to_json(Complex z);
Json to_json(const ComplexMatrix& m);
Json to_json(const ComplexVector& v);
Json to_json(const DoubledMatrix& d);

// Deterministic text: floats at 17 significant digits, NaN/inf as null.
std::string dump_json(const Json& j, int indent = 2);
std::string format_double(double v);

}  // namespace lqfn
