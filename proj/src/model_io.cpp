#include "hyq/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hyq::io {

const ConfigEntry* ConfigSection::find(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

std::string ConfigSection::require(const std::string& key) const {
  if (const auto* e = find(key)) return e->value;
  throw ParseError("missing required key '" + key + "' in [" + name + "]", line, key);
}

std::optional<std::string> ConfigSection::get(const std::string& key) const {
  if (const auto* e = find(key)) return e->value;
  return std::nullopt;
}

const ConfigSection* ConfigDoc::find(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<const ConfigSection*> ConfigDoc::all(const std::string& name) const {
  std::vector<const ConfigSection*> out;
  for (const auto& s : sections)
    if (s.name == name) out.push_back(&s);
  return out;
}

namespace {

std::string strip(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

ConfigDoc parse_config(std::istream& is) {
  ConfigDoc doc;
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    std::string text = strip(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError("unterminated section header", lineno);
      ConfigSection section;
      section.name = strip(text.substr(1, text.size() - 2));
      if (section.name.empty()) throw ParseError("empty section name", lineno);
      section.line = lineno;
      doc.sections.push_back(std::move(section));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
    if (doc.sections.empty()) throw ParseError("entry before any [section]", lineno);
    ConfigEntry entry;
    entry.key = strip(text.substr(0, eq));
    entry.value = strip(text.substr(eq + 1));
    entry.line = lineno;
    if (entry.key.empty()) throw ParseError("empty key", lineno);
    doc.sections.back().entries.push_back(std::move(entry));
  }
  return doc;
}

ConfigDoc parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open file: " + path);
  return parse_config(is);
}

std::vector<double> parse_numbers(const std::string& text, int line, const std::string& key) {
  std::vector<double> out;
  std::istringstream iss(text);
  std::string token;
  while (iss >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw ParseError("bad number '" + token + "'", line, key);
    }
    if (used != token.size()) throw ParseError("bad number '" + token + "'", line, key);
    out.push_back(v);
  }
  return out;
}

double parse_number(const std::string& text, int line, const std::string& key) {
  const auto nums = parse_numbers(text, line, key);
  if (nums.size() != 1) throw ParseError("expected a single number", line, key);
  return nums[0];
}

long parse_integer(const std::string& text, int line, const std::string& key) {
  const double v = parse_number(text, line, key);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v) throw ParseError("expected an integer", line, key);
  return n;
}

namespace {

Mat parse_matrix(const ConfigSection& section, const std::string& name, int d) {
  Mat out(d, d);
  for (int r = 0; r < d; ++r) {
    const std::string key = name + ".row" + std::to_string(r);
    const auto* entry = section.find(key);
    if (!entry) throw ParseError("missing matrix row '" + key + "'", section.line, key);
    const auto row = parse_numbers(entry->value, entry->line, key);
    if (static_cast<int>(row.size()) != d)
      throw ParseError("matrix row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(d),
                       entry->line, key);
    for (int c = 0; c < d; ++c) out(r, c) = row[c];
  }
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = v[i];
  return out;
}

}  // namespace

HybridModel parse_model(const ConfigDoc& doc) {
  const ConfigSection* model = doc.find("model");
  if (!model) throw ParseError("missing [model] section", 1);
  const int n = static_cast<int>(parse_integer(model->require("n"), model->line, "n"));
  const int s = static_cast<int>(parse_integer(model->require("s"), model->line, "s"));
  const Dims dims = make_dims(n, s);
  const Mat Z = parse_matrix(*model, "Z", dims.d);
  const Mat A = parse_matrix(*model, "A", dims.d);
  const auto* alpha_entry = model->find("alpha");
  if (!alpha_entry) throw ParseError("missing 'alpha'", model->line, "alpha");
  const auto alpha = parse_numbers(alpha_entry->value, alpha_entry->line, "alpha");
  if (static_cast<int>(alpha.size()) != dims.d)
    throw ParseError("alpha must have d entries", alpha_entry->line, "alpha");

  GeneratingTriplet triplet;
  triplet.A = A;
  triplet.alpha = to_vec(alpha);
  for (const auto* section : doc.all("nu.atom")) {
    Atom atom;
    atom.weight = parse_number(section->require("weight"), section->line, "weight");
    const auto eta = parse_numbers(section->require("eta"), section->line, "eta");
    if (static_cast<int>(eta.size()) != dims.d)
      throw ParseError("eta must have d entries", section->line, "eta");
    atom.eta = to_vec(eta);
    triplet.nu.atoms.push_back(std::move(atom));
  }
  for (const auto* section : doc.all("nu.line")) {
    LineMeasure line;
    const auto dir = parse_numbers(section->require("direction"), section->line, "direction");
    if (static_cast<int>(dir.size()) != dims.d)
      throw ParseError("direction must have d entries", section->line, "direction");
    line.direction = to_vec(dir);
    const auto nodes = parse_numbers(section->require("nodes"), section->line, "nodes");
    if (nodes.empty() || nodes.size() % 2 != 0)
      throw ParseError("nodes must be a nonempty list of v w pairs", section->line, "nodes");
    for (std::size_t i = 0; i < nodes.size(); i += 2) line.nodes.push_back({nodes[i], nodes[i + 1]});
    triplet.nu.lines.push_back(std::move(line));
  }
  return HybridModel::build(dims, Z, std::move(triplet));
}

HybridModel load_model(const std::string& path) {
  const ConfigDoc doc = parse_config_file(path);
  return parse_model(doc);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_matrix(std::ostream& os, const std::string& name, const Mat& m) {
  for (int r = 0; r < m.rows(); ++r) {
    os << name << ".row" << r << " =";
    for (int c = 0; c < m.cols(); ++c) os << ' ' << format_double(m(r, c));
    os << '\n';
  }
}

void write_vector(std::ostream& os, const std::string& name, const Vec& v) {
  os << name << " =";
  for (int i = 0; i < v.size(); ++i) os << ' ' << format_double(v(i));
  os << '\n';
}

}  // namespace

void write_model(const HybridModel& model, std::ostream& os) {
  os << "[model]\n";
  os << "n = " << model.dims.n << '\n';
  os << "s = " << model.dims.s << '\n';
  write_matrix(os, "Z", model.Z.Z);
  write_matrix(os, "A", model.triplet.A);
  write_vector(os, "alpha", model.triplet.alpha);
  for (const auto& atom : model.triplet.nu.atoms) {
    os << "\n[nu.atom]\n";
    os << "weight = " << format_double(atom.weight) << '\n';
    write_vector(os, "eta", atom.eta);
  }
  for (const auto& line : model.triplet.nu.lines) {
    os << "\n[nu.line]\n";
    write_vector(os, "direction", line.direction);
    os << "nodes =";
    for (const auto& node : line.nodes)
      os << ' ' << format_double(node.v) << ' ' << format_double(node.weight);
    os << '\n';
  }
}

std::string model_to_string(const HybridModel& model) {
  std::ostringstream oss;
  write_model(model, oss);
  return oss.str();
}

bool models_equal(const HybridModel& a, const HybridModel& b, double tol) {
  if (a.dims.n != b.dims.n || a.dims.s != b.dims.s) return false;
  auto close = [tol](const Mat& x, const Mat& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() &&
           (x.size() == 0 || (x - y).cwiseAbs().maxCoeff() <= tol);
  };
  if (!close(a.Z.Z, b.Z.Z) || !close(a.triplet.A, b.triplet.A)) return false;
  if (!close(a.triplet.alpha, b.triplet.alpha)) return false;
  if (a.triplet.nu.atoms.size() != b.triplet.nu.atoms.size()) return false;
  for (std::size_t i = 0; i < a.triplet.nu.atoms.size(); ++i) {
    if (std::abs(a.triplet.nu.atoms[i].weight - b.triplet.nu.atoms[i].weight) > tol) return false;
    if (!close(a.triplet.nu.atoms[i].eta, b.triplet.nu.atoms[i].eta)) return false;
  }
  if (a.triplet.nu.lines.size() != b.triplet.nu.lines.size()) return false;
  for (std::size_t i = 0; i < a.triplet.nu.lines.size(); ++i) {
    const auto& la = a.triplet.nu.lines[i];
    const auto& lb = b.triplet.nu.lines[i];
    if (!close(la.direction, lb.direction) || la.nodes.size() != lb.nodes.size()) return false;
    for (std::size_t j = 0; j < la.nodes.size(); ++j)
      if (std::abs(la.nodes[j].v - lb.nodes[j].v) > tol ||
          std::abs(la.nodes[j].weight - lb.nodes[j].weight) > tol)
        return false;
  }
  return true;
}

}  // namespace hyq::io
