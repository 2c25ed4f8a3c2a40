#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "membed/embed.hpp"
#include "membed/inhom.hpp"
#include "membed/models.hpp"

namespace membed {

using Json = nlohmann::ordered_json;

// Malformed input; line is 1-based (0 when unknown).
class InputError : public std::runtime_error {
 public:
  InputError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct MatrixDocument {
  Mat m;
  std::optional<std::string> label;
  Tolerances tol;  // defaults overridden by an optional "tolerances" object
};

// Accepts a JSON document {"dim", "rows", "label"?, "tolerances"?}, a bare JSON
// array of rows, or whitespace-separated plain rows ('#' starts a comment).
MatrixDocument parse_matrix(const std::string& text);
Schedule parse_schedule(const std::string& text);
Json parse_json(const std::string& text);

// %.17g rendering; JSON output never uses any other float format.
std::string format_double(double x);
std::string dump(const Json& j, int indent = 2);

Json matrix_json(const Mat& m);
Json matrix_document_json(const Mat& m, const std::optional<std::string>& label = std::nullopt);
Json case_tag_json(const CaseTag& tag);
Json result_json(const EmbeddingResult& r);
Json verdict_document(const MatrixDocument& in, const EmbeddingResult& r);
Json classify_document(const MatrixDocument& in, const CaseTag& tag, const NecessaryReport& nec,
                       const std::set<ModelTag>& models);
Json greport_json(const GReport& g);

std::string table_text(const EmbeddingResult& r);

}  // namespace membed
