#include "hyprec/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "hyprec/errors.hpp"

namespace hyprec {

namespace {

// Reads the next line without its terminator; strips a trailing CR.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

bool skippable(std::string_view line) { return line.empty() || line.front() == '#'; }

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open file");
  return in;
}

}  // namespace

KnowledgeGraph parse_triples(std::istream& in, const std::string& source) {
  KnowledgeGraph g;
  std::string line;
  std::size_t lineno = 0;
  while (next_line(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto f = split(line, '\t');
    if (f.size() != 3) {
      throw InputError(source, lineno, "expected 3 tab-separated fields, found " + std::to_string(f.size()));
    }
    for (const auto& field : f) {
      if (field.empty()) throw InputError(source, lineno, "empty field");
    }
    g.add(f[0], f[1], f[2]);
  }
  if (in.bad()) throw InputError(source, lineno, "read error");
  return g;
}

KnowledgeGraph read_triple_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_triples(in, path.string());
}

void write_triples(std::ostream& out, const KnowledgeGraph& g, std::span<const Triple> triples) {
  for (const auto& t : triples) {
    out << g.entities.name(t.head) << '\t' << g.relations.name(t.relation) << '\t'
        << g.entities.name(t.tail) << '\n';
  }
}

ItemEmbeddingTable parse_embeddings(std::istream& in, const std::string& source) {
  ItemEmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (next_line(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    if (dim == 0) {
      constexpr std::string_view key = "dim=";
      if (!line.starts_with(key)) throw InputError(source, lineno, "expected header 'dim=<d>'");
      const std::string_view digits = std::string_view(line).substr(key.size());
      const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), dim);
      if (ec != std::errc() || p != digits.data() + digits.size() || dim == 0) {
        throw InputError(source, lineno, "invalid dimension in header");
      }
      table.dim = dim;
      continue;
    }
    const auto f = split(line, '\t');
    if (f.size() != 2 || f[0].empty()) throw InputError(source, lineno, "expected '<item>\\t<floats>'");
    const auto parts = split(f[1], ',');
    if (parts.size() != dim) {
      throw InputError(source, lineno,
                       "expected " + std::to_string(dim) + " values, found " + std::to_string(parts.size()));
    }
    std::vector<double> v(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const auto [p, ec] = std::from_chars(parts[k].data(), parts[k].data() + parts[k].size(), v[k]);
      if (ec != std::errc() || p != parts[k].data() + parts[k].size() || parts[k].empty()) {
        throw InputError(source, lineno, "invalid number '" + std::string(parts[k]) + "'");
      }
      if (!std::isfinite(v[k])) throw InputError(source, lineno, "non-finite value");
    }
    table.add(f[0], std::move(v));
  }
  if (in.bad()) throw InputError(source, lineno, "read error");
  if (dim == 0) throw InputError(source, lineno, "missing 'dim=<d>' header");
  return pool_item_embeddings(std::move(table));
}

ItemEmbeddingTable read_embedding_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_embeddings(in, path.string());
}

void write_embeddings(std::ostream& out, std::size_t dim,
                      const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  out << "dim=" << dim << '\n';
  for (const auto& [id, v] : rows) {
    out << id << '\t';
    for (std::size_t k = 0; k < v.size(); ++k) out << (k ? "," : "") << format_double(v[k]);
    out << '\n';
  }
}

KnowledgeGraph filter_relations(const KnowledgeGraph& g, std::span<const std::string> keep) {
  if (keep.empty()) return g;
  std::unordered_set<RelationId> ids;
  for (const auto& name : keep) {
    const auto id = g.relations.find(name);
    if (!id) throw InputError("relation '" + name + "' does not occur in the triples");
    ids.insert(*id);
  }
  KnowledgeGraph out = g.empty_copy();
  for (const auto& t : g.triples()) {
    if (ids.contains(t.relation)) out.add(t);
  }
  return out;
}

std::string format_double(double x) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path.string(), 0, "cannot open file for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError(path.string(), 0, "write failed");
}

}  // namespace hyprec
