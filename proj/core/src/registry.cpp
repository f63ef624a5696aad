#include "adiabat/registry.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "adiabat/error.hpp"
#include "json.hpp"

namespace adiabat {

namespace {

using nlohmann::json;

constexpr const char kBundled[] =
#include "bundled_registry.inc"
    ;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

std::pair<double, double> range(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) bad(where, "expected [lo, hi]");
  return {number(j[0], where), number(j[1], where)};
}

Expr expression(const json& j, const std::string& where) {
  const std::string src = text(j, where);
  try {
    return parse(src);
  } catch (const SyntaxError& e) {
    bad(where, std::string("cannot parse '") + src + "': " + e.what());
  }
}

json document(std::string_view src, const std::string& origin) {
  try {
    return json::parse(src);
  } catch (const json::parse_error& e) {
    bad(origin, std::string("malformed JSON: ") + e.what());
  }
}

SimpleState component(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected a component object");
  SimpleState s;
  s.space = text(field(j, "space", where), where + ".space");
  s.scale = j.contains("scale") ? number(j["scale"], where + ".scale") : 1.0;
  s.energy = number(field(j, "U", where), where + ".U");
  s.volume = number(field(j, "V", where), where + ".V");
  if (!(s.scale > 0)) bad(where, "scale must be positive");
  return s;
}

CompoundState compound(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected a list of components");
  CompoundState c;
  for (std::size_t i = 0; i < j.size(); ++i) {
    c.components.push_back(component(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return c;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<EosSpec> parse_registry(std::string_view src, const std::string& origin) {
  const json doc = document(src, origin);
  if (!doc.is_object()) bad(origin, "top level must be an object");
  const json& spaces = field(doc, "spaces", origin);
  if (!spaces.is_array()) bad(origin + ".spaces", "expected a list");
  std::vector<EosSpec> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    const json& s = spaces[i];
    std::string where = origin + ".spaces[" + std::to_string(i) + "]";
    if (!s.is_object()) bad(where, "expected an object");
    EosSpec spec;
    spec.id = text(field(s, "id", where), where + ".id");
    where += " ('" + spec.id + "')";
    if (!seen.insert(spec.id).second) bad(where, "duplicate space id");
    spec.energy = expression(field(s, "U", where), where + ".U");
    spec.pressure = expression(field(s, "P", where), where + ".P");
    if (s.contains("constants")) {
      const json& c = s["constants"];
      if (!c.is_object()) bad(where + ".constants", "expected an object");
      for (const auto& [name, value] : c.items()) {
        spec.constants[name] = number(value, where + ".constants." + name);
      }
    }
    const json& dom = field(s, "domain", where);
    std::tie(spec.domain.theta_min, spec.domain.theta_max) =
        range(field(dom, "theta", where + ".domain"), where + ".domain.theta");
    std::tie(spec.domain.v_min, spec.domain.v_max) =
        range(field(dom, "v", where + ".domain"), where + ".domain.v");
    const json& ref = field(s, "reference", where);
    spec.theta_ref = number(field(ref, "theta", where + ".reference"), where + ".reference.theta");
    spec.v_ref = number(field(ref, "v", where + ".reference"), where + ".reference.v");
    if (ref.contains("entropy")) {
      spec.reference_entropy = number(ref["entropy"], where + ".reference.entropy");
    }
    if (s.contains("units")) {
      spec.units = text(s["units"], where + ".units");
      if (spec.units != "si" && spec.units != "reduced") bad(where + ".units", "must be si or reduced");
    }
    if (s.contains("anchor_temperature")) {
      spec.anchor_temperature = number(s["anchor_temperature"], where + ".anchor_temperature");
      if (!(*spec.anchor_temperature > 0)) bad(where, "anchor_temperature must be positive");
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<EosSpec> load_registry(const std::filesystem::path& path) {
  return parse_registry(read_file(path), path.string());
}

std::string_view bundled_registry_json() { return kBundled; }

std::vector<EosSpec> bundled_registry() { return parse_registry(kBundled, "bundled registry"); }

ProcessGraph parse_process_graph(std::string_view src, const std::string& origin) {
  const json doc = document(src, origin);
  if (!doc.is_object()) bad(origin, "top level must be an object");
  ProcessGraph g;
  if (doc.contains("nodes")) {
    const json& nodes = doc["nodes"];
    if (!nodes.is_array()) bad(origin + ".nodes", "expected a list");
    for (const auto& n : nodes) g.nodes.push_back(text(n, origin + ".nodes"));
  }
  const json& procs = field(doc, "processes", origin);
  if (!procs.is_array()) bad(origin + ".processes", "expected a list");
  for (std::size_t i = 0; i < procs.size(); ++i) {
    const json& p = procs[i];
    const std::string where = origin + ".processes[" + std::to_string(i) + "]";
    if (!p.is_object()) bad(where, "expected an object");
    ProcessDecl d;
    d.id = p.contains("id") ? text(p["id"], where + ".id") : "p" + std::to_string(i);
    d.source = compound(field(p, "source", where), where + ".source");
    d.target = compound(field(p, "target", where), where + ".target");
    if (d.source.empty() || d.target.empty()) bad(where, "source and target must be nonempty");
    if (p.contains("note")) d.note = text(p["note"], where + ".note");
    g.processes.push_back(std::move(d));
  }
  return g;
}

ProcessGraph load_process_graph(const std::filesystem::path& path) {
  return parse_process_graph(read_file(path), path.string());
}

}  // namespace adiabat
