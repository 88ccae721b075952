#include "aharm/mesh.hpp"

#include <fstream>
#include <sstream>

namespace aharm {

namespace {

/* Reads the next content line (skipping blanks and '#' comments); returns
 * false at EOF. `lineno` tracks the 1-based physical line number. */
bool next_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    size_t pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    bool blank = true;
    for (char c : line)
      if (!isspace(static_cast<unsigned char>(c))) { blank = false; break; }
    if (!blank) return true;
  }
  return false;
}

[[noreturn]] void parse_fail(const std::string& path, int lineno, const std::string& what) {
  fail("%s:%d: %s", path.c_str(), lineno, what.c_str());
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> toks;
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

double to_double(const std::string& s, const std::string& path, int lineno) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    parse_fail(path, lineno, "expected a number, got '" + s + "'");
  }
  if (pos != s.size()) parse_fail(path, lineno, "expected a number, got '" + s + "'");
  if (!std::isfinite(v)) parse_fail(path, lineno, "non-finite coordinate '" + s + "'");
  return v;
}

long to_long(const std::string& s, const std::string& path, int lineno) {
  size_t pos = 0;
  long v;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    parse_fail(path, lineno, "expected an integer, got '" + s + "'");
  }
  if (pos != s.size()) parse_fail(path, lineno, "expected an integer, got '" + s + "'");
  return v;
}

} // namespace

DomainMesh load_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open mesh file '%s'", path.c_str());
  std::string line;
  int lineno = 0;
  if (!next_line(in, line, lineno)) fail("%s: empty file", path.c_str());
  {
    auto toks = tokens_of(line);
    if (toks.size() != 1 || toks[0] != "OFF")
      parse_fail(path, lineno, "expected 'OFF' header");
  }
  if (!next_line(in, line, lineno)) parse_fail(path, lineno, "missing counts line");
  auto counts = tokens_of(line);
  if (counts.size() != 3) parse_fail(path, lineno, "counts line must be 'V F E'");
  long V = to_long(counts[0], path, lineno);
  long F = to_long(counts[1], path, lineno);
  (void)to_long(counts[2], path, lineno);
  if (V < 3 || F < 1) parse_fail(path, lineno, "need at least 3 vertices and 1 face");
  DomainMesh mesh;
  mesh.embed_dim = 3;
  mesh.vertices.reserve(V);
  for (long i = 0; i < V; ++i) {
    if (!next_line(in, line, lineno))
      parse_fail(path, lineno, strformat("expected %ld vertex lines, file ended", V));
    auto toks = tokens_of(line);
    if (toks.size() != 3) parse_fail(path, lineno, "vertex line must have 3 coordinates");
    Vec p(3);
    for (int k = 0; k < 3; ++k) p[k] = to_double(toks[k], path, lineno);
    mesh.vertices.push_back(p);
  }
  for (long f = 0; f < F; ++f) {
    if (!next_line(in, line, lineno))
      parse_fail(path, lineno, strformat("expected %ld face lines, file ended", F));
    auto toks = tokens_of(line);
    if (toks.empty() || to_long(toks[0], path, lineno) != 3)
      parse_fail(path, lineno, "only triangular faces are supported (leading count must be 3)");
    if (toks.size() != 4) parse_fail(path, lineno, "face line must be '3 i j k'");
    std::array<int, 3> fc;
    for (int k = 0; k < 3; ++k) {
      long idx = to_long(toks[k + 1], path, lineno);
      if (idx < 0 || idx >= V)
        parse_fail(path, lineno, strformat("vertex index %ld out of range [0, %ld)", idx, V));
      fc[k] = static_cast<int>(idx);
    }
    mesh.faces.push_back(fc);
  }
  if (next_line(in, line, lineno)) parse_fail(path, lineno, "unexpected trailing content");
  mesh.finalize();
  return mesh;
}

DomainMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open mesh file '%s'", path.c_str());
  DomainMesh mesh;
  mesh.embed_dim = 3;
  std::string line;
  int lineno = 0;
  while (next_line(in, line, lineno)) {
    auto toks = tokens_of(line);
    if (toks[0] == "v") {
      if (toks.size() != 4) parse_fail(path, lineno, "'v' record must have 3 coordinates");
      Vec p(3);
      for (int k = 0; k < 3; ++k) p[k] = to_double(toks[k + 1], path, lineno);
      mesh.vertices.push_back(p);
    } else if (toks[0] == "f") {
      if (toks.size() != 4) parse_fail(path, lineno, "'f' record must reference 3 vertices");
      std::array<int, 3> fc;
      for (int k = 0; k < 3; ++k) {
        const std::string& ref = toks[k + 1];
        if (ref.find('/') != std::string::npos)
          parse_fail(path, lineno, "face references with '/' are not supported");
        long idx = to_long(ref, path, lineno);
        if (idx < 1 || idx > static_cast<long>(mesh.vertices.size()))
          parse_fail(path, lineno, strformat("vertex index %ld out of range [1, %zu]", idx,
                                             mesh.vertices.size()));
        fc[k] = static_cast<int>(idx - 1);
      }
      mesh.faces.push_back(fc);
    } else {
      parse_fail(path, lineno, "unsupported record '" + toks[0] + "' (only 'v' and 'f')");
    }
  }
  mesh.finalize();
  return mesh;
}

DomainMesh load_mesh_file(const std::string& path) {
  auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(tolower(c));
  if (ext == "off") return load_off(path);
  if (ext == "obj") return load_obj(path);
  fail("unsupported mesh extension '.%s' (use .off or .obj)", ext.c_str());
}

} // namespace aharm
