#include "tnm/persistence.hpp"

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <utility>

#include "tnm/error.hpp"

namespace tnm {

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(Errc::invalid_argument, "unformattable number");
  return std::string(buf, end);
}

namespace {

// ---- writing ---------------------------------------------------------------

std::string escape_attr(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out += c;
    }
  }
  return out;
}

class XmlWriter {
 public:
  explicit XmlWriter(std::ostream& out) : out_(out) {}

  XmlWriter& open(std::string_view name) {
    out_ << std::string(depth_ * 2, ' ') << '<' << name;
    return *this;
  }
  XmlWriter& attr(std::string_view key, std::string_view value) {
    out_ << ' ' << key << "=\"" << escape_attr(value) << '"';
    return *this;
  }
  XmlWriter& attr(std::string_view key, std::uint64_t value) { return attr(key, std::to_string(value)); }
  XmlWriter& attr(std::string_view key, double value) { return attr(key, format_number(value)); }
  XmlWriter& attr(std::string_view key, bool value) { return attr(key, std::string_view(value ? "true" : "false")); }
  void close_empty() { out_ << "/>\n"; }
  void begin_children() {
    out_ << ">\n";
    ++depth_;
  }
  void end(std::string_view name) {
    --depth_;
    out_ << std::string(depth_ * 2, ' ') << "</" << name << ">\n";
  }

 private:
  std::ostream& out_;
  int depth_ = 0;
};

void write_object(XmlWriter& w, const Model& model, ObjectId id) {
  const ModelObject& obj = model.object(id);
  w.open("object").attr("id", obj.id.value).attr("kind", to_string(obj.kind)).attr("name", obj.name);
  w.begin_children();
  for (InterfaceId iid : obj.interfaces) {
    w.open("interface").attr("id", iid.value).attr("name", model.interface(iid).name).close_empty();
  }
  for (ObjectId kid : obj.children) write_object(w, model, kid);
  w.end("object");
}

void write_scenario(XmlWriter& w, const ScenarioSpec& s) {
  w.open("scenario").attr("name", s.name).attr("duration", s.duration).attr("seed", s.seed);
  if (s.resources.empty() && s.tasks.empty() && s.services.empty()) {
    w.close_empty();
    return;
  }
  w.begin_children();
  for (const auto& r : s.resources) {
    w.open("resource")
        .attr("object", r.object.value)
        .attr("capacity", static_cast<std::uint64_t>(r.capacity))
        .attr("delay", r.delay)
        .close_empty();
  }
  for (const auto& t : s.tasks) {
    w.open("task")
        .attr("label", t.label)
        .attr("source", t.source.value)
        .attr("destination", t.destination.value)
        .attr("start", t.start)
        .attr("repeats", static_cast<std::uint64_t>(t.repeats))
        .attr("interval-mean", t.interval_mean)
        .attr("interval-sigma", t.interval_sigma)
        .attr("routed", t.routed)
        .attr("request-ack", t.request_ack)
        .attr("send-offset-max", t.send_offset_max)
        .close_empty();
  }
  for (const auto& v : s.services) {
    w.open("service")
        .attr("object", v.object.value)
        .attr("kind", to_string(v.kind))
        .attr("per-message-delay", v.per_message_delay)
        .close_empty();
  }
  w.end("scenario");
}

// ---- reading ---------------------------------------------------------------

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<std::unique_ptr<Element>> children;
  unsigned long line = 0;
};

struct ParseState {
  XML_Parser parser;
  std::unique_ptr<Element> root;
  std::vector<Element*> stack;
  std::string error;
};

void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto* st = static_cast<ParseState*>(user);
  auto el = std::make_unique<Element>();
  el->name = name;
  el->line = XML_GetCurrentLineNumber(st->parser);
  for (int i = 0; attrs[i] != nullptr; i += 2) el->attrs.emplace_back(attrs[i], attrs[i + 1]);
  Element* raw = el.get();
  if (st->stack.empty()) {
    st->root = std::move(el);
  } else {
    st->stack.back()->children.push_back(std::move(el));
  }
  st->stack.push_back(raw);
}

void on_end(void* user, const XML_Char*) { static_cast<ParseState*>(user)->stack.pop_back(); }

void on_text(void* user, const XML_Char* text, int len) {
  auto* st = static_cast<ParseState*>(user);
  for (int i = 0; i < len; ++i) {
    char c = text[i];
    if (c != ' ' && c != '\n' && c != '\r' && c != '\t' && st->error.empty()) {
      st->error = "line " + std::to_string(XML_GetCurrentLineNumber(st->parser)) + ": unexpected text content";
      XML_StopParser(st->parser, XML_FALSE);
      return;
    }
  }
}

std::unique_ptr<Element> parse_dom(std::string_view doc) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                                        &XML_ParserFree);
  if (!parser) throw Error(Errc::parse_error, "cannot create XML parser");
  ParseState st{parser.get(), nullptr, {}, {}};
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  if (XML_Parse(parser.get(), doc.data(), static_cast<int>(doc.size()), XML_TRUE) == XML_STATUS_ERROR) {
    if (!st.error.empty()) throw Error(Errc::parse_error, st.error);
    throw Error(Errc::parse_error, "line " + std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                                       XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!st.root) throw Error(Errc::parse_error, "empty document");
  return std::move(st.root);
}

[[noreturn]] void schema_error(const Element& el, const std::string& message) {
  throw Error(Errc::parse_error, "line " + std::to_string(el.line) + ": <" + el.name + "> " + message);
}

// Attribute access that enforces the schema's closed attribute sets.
class Attrs {
 public:
  Attrs(const Element& el, std::initializer_list<std::string_view> allowed) : el_(el) {
    for (const auto& [key, value] : el.attrs) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        schema_error(el, "has unknown attribute '" + key + "'");
      }
    }
  }

  const std::string& str(std::string_view key) const {
    for (const auto& [k, v] : el_.attrs) {
      if (k == key) return v;
    }
    schema_error(el_, "is missing attribute '" + std::string(key) + "'");
  }

  std::uint64_t u64(std::string_view key) const {
    const std::string& text = str(key);
    std::uint64_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
      schema_error(el_, "attribute '" + std::string(key) + "' is not a non-negative integer: " + text);
    }
    return value;
  }

  double number(std::string_view key) const {
    const std::string& text = str(key);
    double value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
      schema_error(el_, "attribute '" + std::string(key) + "' is not a number: " + text);
    }
    return value;
  }

  bool boolean(std::string_view key) const {
    const std::string& text = str(key);
    if (text == "true") return true;
    if (text == "false") return false;
    schema_error(el_, "attribute '" + std::string(key) + "' must be true or false");
  }

 private:
  const Element& el_;
};

struct Loader {
  ModelState state;
  std::set<std::uint64_t> ids;
  std::vector<Violation> violations;

  void claim(const Element& el, std::uint64_t id) {
    if (id == 0 || !ids.insert(id).second) {
      violations.push_back({Errc::integrity_error, "line " + std::to_string(el.line) + ": id " + std::to_string(id) +
                                                       " is reserved or used more than once"});
    }
  }

  void object(const Element& el, ObjectId parent) {
    Attrs a(el, {"id", "kind", "name"});
    ObjectId id{a.u64("id")};
    auto kind = parse_object_kind(a.str("kind"));
    if (!kind) schema_error(el, "has unknown kind '" + a.str("kind") + "'");
    claim(el, id.value);
    ModelObject obj{id, *kind, a.str("name"), parent, {}, {}};
    for (const auto& child : el.children) {
      if (child->name == "interface") {
        Attrs ia(*child, {"id", "name"});
        InterfaceId iid{ia.u64("id")};
        claim(*child, iid.value);
        state.interfaces.emplace(iid, Interface{iid, id, ia.str("name")});
        obj.interfaces.push_back(iid);
      } else if (child->name == "object") {
        obj.children.push_back(ObjectId{Attrs(*child, {"id", "kind", "name"}).u64("id")});
        object(*child, id);
      } else {
        schema_error(*child, "is not allowed inside <object>");
      }
    }
    state.objects.emplace(id, std::move(obj));
  }

  void connections(const Element& el) {
    Attrs check(el, {});
    for (const auto& child : el.children) {
      if (child->name != "connection") schema_error(*child, "is not allowed inside <connections>");
      Attrs a(*child, {"id", "a-interface", "b-interface"});
      ConnectionId cid{a.u64("id")};
      claim(*child, cid.value);
      state.connections.emplace(cid, Connection{cid, InterfaceId{a.u64("a-interface")}, InterfaceId{a.u64("b-interface")}});
    }
  }

  ScenarioSpec scenario(const Element& el) {
    Attrs a(el, {"name", "duration", "seed"});
    ScenarioSpec s;
    s.name = a.str("name");
    s.duration = a.number("duration");
    s.seed = a.u64("seed");
    for (const auto& child : el.children) {
      const Element& c = *child;
      if (c.name == "resource") {
        Attrs r(c, {"object", "capacity", "delay"});
        s.resources.push_back({ObjectId{r.u64("object")}, static_cast<int>(r.u64("capacity")), r.number("delay")});
      } else if (c.name == "task") {
        Attrs t(c, {"label", "source", "destination", "start", "repeats", "interval-mean", "interval-sigma", "routed",
                    "request-ack", "send-offset-max"});
        MessageTaskSpec task;
        task.label = t.str("label");
        task.source = ObjectId{t.u64("source")};
        task.destination = ObjectId{t.u64("destination")};
        task.start = t.number("start");
        task.repeats = static_cast<std::uint32_t>(t.u64("repeats"));
        task.interval_mean = t.number("interval-mean");
        task.interval_sigma = t.number("interval-sigma");
        task.routed = t.boolean("routed");
        task.request_ack = t.boolean("request-ack");
        task.send_offset_max = t.number("send-offset-max");
        s.tasks.push_back(std::move(task));
      } else if (c.name == "service") {
        Attrs v(c, {"object", "kind", "per-message-delay"});
        auto kind = parse_service_kind(v.str("kind"));
        if (!kind) schema_error(c, "has unknown kind '" + v.str("kind") + "'");
        s.services.push_back({ObjectId{v.u64("object")}, v.number("per-message-delay"), *kind});
      } else {
        schema_error(c, "is not allowed inside <scenario>");
      }
    }
    return s;
  }
};

}  // namespace

void check_references(const Model& model, const std::vector<ScenarioSpec>& scenarios) {
  std::vector<Violation> violations;
  std::set<std::string_view> names;
  for (const auto& s : scenarios) {
    auto missing = [&](ObjectId id, const std::string& what) {
      if (!model.contains(id)) {
        violations.push_back(
            {Errc::integrity_error, "scenario '" + s.name + "' " + what + " references missing object " + id.str()});
      }
    };
    if (!names.insert(s.name).second) {
      violations.push_back({Errc::integrity_error, "scenario name '" + s.name + "' is used more than once"});
    }
    for (const auto& r : s.resources) missing(r.object, "resource");
    for (const auto& v : s.services) missing(v.object, "service");
    for (const auto& t : s.tasks) {
      missing(t.source, "task '" + t.label + "'");
      missing(t.destination, "task '" + t.label + "'");
    }
  }
  if (!violations.empty()) {
    std::string first = violations.front().message;
    throw Error(Errc::integrity_error, first, std::move(violations));
  }
}

std::string save(const Project& project) {
  const Model& model = project.model;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  XmlWriter w(out);
  w.open("tnm-model")
      .attr("name", model.name())
      .attr("format-version", static_cast<std::uint64_t>(kFormatVersion))
      .attr("next-id", model.state().next_id);
  const auto& roots = model.children(kRootId);
  if (roots.empty() && model.connection_count() == 0 && project.scenarios.empty()) {
    w.close_empty();
    return out.str();
  }
  w.begin_children();
  for (ObjectId id : roots) write_object(w, model, id);
  if (model.connection_count() > 0) {
    w.open("connections").begin_children();
    for (ConnectionId cid : model.connections()) {
      const Connection& c = model.connection(cid);
      w.open("connection")
          .attr("id", c.id.value)
          .attr("a-interface", c.endpoint_a.value)
          .attr("b-interface", c.endpoint_b.value)
          .close_empty();
    }
    w.end("connections");
  }
  for (const auto& s : project.scenarios) write_scenario(w, s);
  w.end("tnm-model");
  return out.str();
}

Project load(std::string_view document) {
  const auto root = parse_dom(document);
  if (root->name != "tnm-model") schema_error(*root, "is not a tnm-model document");
  Attrs ra(*root, {"name", "format-version", "next-id"});
  const std::string& version = ra.str("format-version");
  if (version != std::to_string(kFormatVersion)) {
    throw Error(Errc::format_version, "document format-version " + version + " is not supported (expected " +
                                          std::to_string(kFormatVersion) + ")");
  }
  Loader loader;
  loader.state.name = ra.str("name");
  loader.state.next_id = ra.u64("next-id");
  std::vector<ScenarioSpec> scenarios;
  bool seen_connections = false;
  for (const auto& child : root->children) {
    if (child->name == "object") {
      if (seen_connections || !scenarios.empty()) schema_error(*child, "must precede <connections> and <scenario>");
      loader.state.root_children.push_back(ObjectId{Attrs(*child, {"id", "kind", "name"}).u64("id")});
      loader.object(*child, kRootId);
    } else if (child->name == "connections") {
      if (seen_connections || !scenarios.empty()) schema_error(*child, "may appear once, before <scenario>");
      seen_connections = true;
      loader.connections(*child);
    } else if (child->name == "scenario") {
      scenarios.push_back(loader.scenario(*child));
    } else {
      schema_error(*child, "is not allowed inside <tnm-model>");
    }
  }
  if (!loader.violations.empty()) {
    std::string first = loader.violations.front().message;
    throw Error(Errc::integrity_error, first, std::move(loader.violations));
  }
  Model model = Model::from_state(std::move(loader.state));
  check_references(model, scenarios);
  return Project(std::move(model), std::move(scenarios));
}

Project load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::io_error, "cannot read " + path.string());
  return load(buf.str());
}

void save_file(const Project& project, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << save(project);
  out.flush();
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
}

}  // namespace tnm
