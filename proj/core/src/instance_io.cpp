#include "dsq/instance_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dsq {

using nlohmann::json;

namespace {

Rational rational_field(const json& value, std::string_view name) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.get<long>());
  throw Error(ErrorKind::parse_error, std::string(name) + " must be a rational string or an integer");
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::parse_error, "malformed " + std::string(what) + " '" + std::string(text) + "'");
  }
  return out;
}

WeightFunction parse_weights(const json& node, std::string_view name) {
  if (!node.is_object()) throw Error(ErrorKind::parse_error, std::string(name) + " must be an object");
  std::map<std::uint64_t, Rational> table;
  for (const auto& [key, value] : node.items()) {
    table[parse_u64(key, name)] = rational_field(value, name);
  }
  return WeightFunction(table);
}

MultiplicativeFunction parse_multiplicative(const json& node, std::string_view name) {
  if (node.is_string()) {
    if (node.get<std::string>() == "totient") return MultiplicativeFunction::totient();
    throw Error(ErrorKind::parse_error, std::string(name) + ": unknown preset '" + node.get<std::string>() + "'");
  }
  if (!node.is_object()) throw Error(ErrorKind::parse_error, std::string(name) + " must be \"totient\" or an object");
  MultiplicativeFunction::Table table;
  for (const auto& [key, value] : node.items()) {
    const auto caret = key.find('^');
    if (caret == std::string::npos) {
      throw Error(ErrorKind::parse_error, std::string(name) + ": key '" + key + "' is not of the form p^a");
    }
    const std::uint64_t p = parse_u64(std::string_view(key).substr(0, caret), "prime");
    const std::uint64_t a = parse_u64(std::string_view(key).substr(caret + 1), "exponent");
    table[{p, static_cast<int>(a)}] = rational_field(value, name);
  }
  return MultiplicativeFunction::from_table(std::move(table));
}

json weights_json(const WeightFunction& w) {
  json out = json::object();
  for (const auto& e : w.entries()) out[std::to_string(e.n.value())] = format_rational(e.value);
  return out;
}

json multiplicative_json(const MultiplicativeFunction& f) {
  if (f.is_totient()) return "totient";
  json out = json::object();
  for (const auto& [key, value] : f.table()) {
    out[std::to_string(key.first) + "^" + std::to_string(key.second)] = format_rational(value);
  }
  return out;
}

Params params_from_json(const json& node) {
  Params params;
  if (node.is_null()) return params;
  if (!node.is_object()) throw Error(ErrorKind::parse_error, "params must be an object");
  if (node.contains("epsilon")) params.epsilon = rational_field(node["epsilon"], "epsilon");
  if (node.contains("C")) params.C = rational_field(node["C"], "C");
  if (node.contains("t")) params.t = rational_field(node["t"], "t");
  if (node.contains("K")) params.K = rational_field(node["K"], "K");
  if (node.contains("p0")) params.p0 = node["p0"].get<std::uint64_t>();
  if (node.contains("precision_bits")) params.precision_bits = node["precision_bits"].get<unsigned>();
  if (node.contains("precision_cap")) params.precision_cap = node["precision_cap"].get<unsigned>();
  return params;
}

json params_json(const Params& params) {
  return json{{"epsilon", format_rational(params.epsilon)},
              {"C", format_rational(params.C)},
              {"t", format_rational(params.t)},
              {"K", format_rational(params.K)},
              {"p0", params.p0},
              {"precision_bits", params.precision_bits},
              {"precision_cap", params.precision_cap}};
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, e.what());
  }
}

}  // namespace

Instance parse_instance(std::string_view json_text) {
  const json doc = parse_document(json_text);
  try {
    Params params = params_from_json(doc.value("params", json()));
    WeightFunction psi = parse_weights(doc.at("psi"), "psi");
    WeightFunction theta = parse_weights(doc.at("theta"), "theta");
    MultiplicativeFunction f = parse_multiplicative(doc.value("f", json("totient")), "f");
    MultiplicativeFunction g = parse_multiplicative(doc.value("g", json("totient")), "g");
    const json edges_node = doc.value("edges", json("auto"));
    if (edges_node.is_string()) {
      if (edges_node.get<std::string>() != "auto") throw Error(ErrorKind::parse_error, "edges must be \"auto\" or a list");
      EdgeSet edges = build_edge_set(psi, theta, params.t, params.K);
      return {PairSystem(std::move(psi), std::move(theta), std::move(f), std::move(g), std::move(edges)), params,
              true};
    }
    std::vector<Edge> edges;
    for (const auto& pair : edges_node) {
      if (!pair.is_array() || pair.size() != 2) throw Error(ErrorKind::parse_error, "edges must be [v, w] pairs");
      edges.emplace_back(pair[0].get<std::uint64_t>(), pair[1].get<std::uint64_t>());
    }
    return {PairSystem(std::move(psi), std::move(theta), std::move(f), std::move(g), EdgeSet(std::move(edges))),
            params, false};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, e.what());
  }
}

std::string serialize_instance(const Instance& instance) {
  json doc;
  doc["psi"] = weights_json(instance.system.psi());
  doc["theta"] = weights_json(instance.system.theta());
  doc["f"] = multiplicative_json(instance.system.f());
  doc["g"] = multiplicative_json(instance.system.g());
  if (instance.edges_auto) {
    doc["edges"] = "auto";
  } else {
    json edges = json::array();
    for (const auto& [v, w] : instance.system.edges()) edges.push_back({v, w});
    doc["edges"] = std::move(edges);
  }
  doc["params"] = params_json(instance.params);
  return doc.dump(2) + "\n";
}

Params parse_params(std::string_view json_text) {
  const json doc = parse_document(json_text);
  try {
    return params_from_json(doc.contains("params") ? doc["params"] : doc);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, e.what());
  }
}

std::string serialize_params(const Params& params) { return params_json(params).dump(); }

std::string serialize_edges(const EdgeSet& edges) {
  std::string out = "[";
  bool first = true;
  for (const auto& [v, w] : edges) {
    if (!first) out += ',';
    first = false;
    out += '[' + std::to_string(v) + ',' + std::to_string(w) + ']';
  }
  out += ']';
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse_error, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::parse_error, "cannot write " + path.string());
  out << text;
}

Instance load_instance(const std::filesystem::path& path) { return parse_instance(read_text_file(path)); }

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  write_text_file(path, serialize_instance(instance));
}

}  // namespace dsq
