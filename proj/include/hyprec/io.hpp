#pragma once

// Text formats: tab-separated triple files and item embedding files.
//
//   triples:     head <TAB> relation <TAB> tail      ('#' comments, blank lines ignored)
//   embeddings:  dim=<d>, then item <TAB> x1,x2,...,xd (repeated items accumulate)

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyprec/knowledge_graph.hpp"
#include "hyprec/semantic.hpp"

namespace hyprec {

// Parsers throw InputError carrying the source name and 1-based line number.
KnowledgeGraph parse_triples(std::istream& in, const std::string& source = "<triples>");
KnowledgeGraph read_triple_file(const std::filesystem::path& path);
void write_triples(std::ostream& out, const KnowledgeGraph& g, std::span<const Triple> triples);

ItemEmbeddingTable parse_embeddings(std::istream& in, const std::string& source = "<embeddings>");
ItemEmbeddingTable read_embedding_file(const std::filesystem::path& path);
void write_embeddings(std::ostream& out, std::size_t dim,
                      const std::vector<std::pair<std::string, std::vector<double>>>& rows);

// Keeps only triples whose relation is listed. Throws InputError for names that
// do not occur in g. An empty list keeps everything.
KnowledgeGraph filter_relations(const KnowledgeGraph& g, std::span<const std::string> keep);

// Shortest text that parses back to exactly `x`.
std::string format_double(double x);

// Whole file as bytes; throws InputError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace hyprec
