#include "membed/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace membed {
namespace {

int line_of_offset(const std::string& text, size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Line on which the k-th inner array of the array under `key` opens; falls back to the key's line.
int locate_row(const std::string& text, const std::string& key, int k) {
  size_t pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 1;
  size_t open = text.find('[', pos);
  if (open == std::string::npos) return line_of_offset(text, pos);
  int depth = 0, seen = -1;
  for (size_t i = open; i < text.size(); ++i) {
    if (text[i] == '[') {
      if (++depth == 2 && ++seen == k) return line_of_offset(text, i);
    } else if (text[i] == ']') {
      if (--depth == 0) break;
    }
  }
  return line_of_offset(text, pos);
}

int locate_key(const std::string& text, const std::string& key) {
  size_t pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 1 : line_of_offset(text, pos);
}

Mat rows_to_mat(const std::vector<std::vector<double>>& rows, const std::function<int(int)>& line_of_row) {
  const int n = static_cast<int>(rows.size());
  if (n < 2 || n > 4) throw InputError(line_of_row(0), "matrix must have 2, 3 or 4 rows, got " + std::to_string(n));
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw InputError(line_of_row(i), "row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                                           " entries, expected " + std::to_string(n));
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(rows[i][j])) throw InputError(line_of_row(i), "non-finite entry");
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

Mat json_matrix(const Json& rows, const std::function<int(int)>& line_of_row) {
  if (!rows.is_array()) throw InputError(line_of_row(0), "rows must be an array of arrays");
  std::vector<std::vector<double>> v;
  for (size_t i = 0; i < rows.size(); ++i) {
    const Json& r = rows[i];
    if (!r.is_array()) throw InputError(line_of_row(static_cast<int>(i)), "row is not an array");
    std::vector<double> row;
    for (auto& x : r) {
      if (!x.is_number()) throw InputError(line_of_row(static_cast<int>(i)), "matrix entries must be numbers");
      row.push_back(x.get<double>());
    }
    v.push_back(std::move(row));
  }
  return rows_to_mat(v, line_of_row);
}

void apply_tolerances(const Json& t, Tolerances& tol, int line) {
  if (!t.is_object()) throw InputError(line, "tolerances must be an object");
  for (auto& [k, v] : t.items()) {
    if (!v.is_number()) throw InputError(line, "tolerance " + k + " must be a number");
    double x = v.get<double>();
    if (k == "spec_cluster") tol.spec_cluster = x;
    else if (k == "nonneg") tol.nonneg = x;
    else if (k == "rowsum") tol.rowsum = x;
    else if (k == "residual") tol.residual = x;
    else if (k == "rank") tol.rank = x;
    else throw InputError(line, "unknown tolerance " + k);
  }
  try {
    tol.validate();
  } catch (const Error& e) {
    throw InputError(line, e.what());
  }
}

bool looks_like_json(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' || c == '[';
  }
  return false;
}

MatrixDocument parse_plain(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::vector<int> lines;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    for (char& c : line)
      if (c == ',' || c == ';') c = ' ';
    std::vector<double> row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
      if (p == end) break;
      const char* start = p;
      if (*p == '+') ++p;
      double x;
      auto [q, ec] = std::from_chars(p, end, x);
      if (ec != std::errc() || (q < end && !std::isspace(static_cast<unsigned char>(*q)))) {
        const char* tok_end = start;
        while (tok_end < end && !std::isspace(static_cast<unsigned char>(*tok_end))) ++tok_end;
        throw InputError(lineno, "cannot parse number '" + std::string(start, tok_end) + "'");
      }
      row.push_back(x);
      p = q;
    }
    if (row.empty()) continue;
    rows.push_back(std::move(row));
    lines.push_back(lineno);
  }
  if (rows.empty()) throw InputError(lineno > 0 ? lineno : 1, "no matrix rows found");
  MatrixDocument doc;
  doc.m = rows_to_mat(rows, [&](int i) { return lines.at(std::min<size_t>(i, lines.size() - 1)); });
  return doc;
}

void write_json(std::string& out, const Json& j, int indent, int level) {
  auto nl = [&](int lv) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<size_t>(lv * indent), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto& [k, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        nl(level + 1);
        out += Json(k).dump();
        out += indent < 0 ? ":" : ": ";
        write_json(out, v, indent, level + 1);
      }
      nl(level);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // numeric rows stay on one line
      bool flat = std::all_of(j.begin(), j.end(), [](const Json& x) { return x.is_number(); });
      out += '[';
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat ? ", " : ",";
        if (!flat) nl(level + 1);
        write_json(out, j[i], indent, level + 1);
      }
      if (!flat) nl(level);
      out += ']';
      return;
    }
    case Json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

Json eigen_json(const CaseTag& tag) {
  const auto& e = tag.eigen;
  Json j = Json::object();
  auto cx = [](cplx z) { return Json::array({z.real(), z.imag()}); };
  switch (tag.pattern) {
    case Pattern::D2_IDENTITY:
    case Pattern::D3_IDENTITY:
    case Pattern::D4_IDENTITY: break;
    case Pattern::D3_SIMPLE_REAL:
    case Pattern::D4_DEG3_TWO_ONES_DISTINCT:
    case Pattern::D4_DEG3_DOUBLE_L2_POS:
    case Pattern::D4_DEG3_DOUBLE_L2_NEG:
    case Pattern::D4_MIXED_JORDAN2:
      j["lambda1"] = e.lambda1;
      j["lambda2"] = e.lambda2;
      break;
    case Pattern::D4_SIMPLE_REAL:
      j["lambda1"] = e.lambda1;
      j["lambda2"] = e.lambda2;
      j["lambda3"] = e.lambda3;
      break;
    case Pattern::D3_COMPLEX_PAIR:
    case Pattern::D4_DEG3_COMPLEX: j["theta"] = cx(e.theta); break;
    case Pattern::D4_SIMPLE_COMPLEX:
      j["lambda"] = e.lambda;
      j["theta"] = cx(e.theta);
      break;
    default: j["lambda"] = e.lambda; break;
  }
  return j;
}

}  // namespace

std::string format_double(double x) {
  if (x == 0) return std::signbit(x) ? "-0.0" : "0.0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  // keep the token a JSON float
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string dump(const Json& j, int indent) {
  std::string out;
  write_json(out, j, indent, 0);
  return out;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::string msg = e.what();
    if (auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw InputError(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), msg);
  }
}

MatrixDocument parse_matrix(const std::string& text) {
  if (!looks_like_json(text)) return parse_plain(text);
  Json j = parse_json(text);
  MatrixDocument doc;
  if (j.is_array()) {
    doc.m = json_matrix(j, [&](int i) {
      int depth = 0, seen = -1;
      for (size_t p = 0; p < text.size(); ++p) {
        if (text[p] == '[' && ++depth == 2 && ++seen == i) return line_of_offset(text, p);
        if (text[p] == ']') --depth;
      }
      return 1;
    });
    return doc;
  }
  if (!j.is_object()) throw InputError(1, "expected a JSON object or array");
  if (!j.contains("rows")) throw InputError(1, "missing \"rows\"");
  doc.m = json_matrix(j["rows"], [&](int i) { return locate_row(text, "rows", i); });
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer() || j["dim"].get<int>() != doc.m.rows())
      throw InputError(locate_key(text, "dim"), "\"dim\" does not match the number of rows");
  }
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw InputError(locate_key(text, "label"), "\"label\" must be a string");
    doc.label = j["label"].get<std::string>();
  }
  if (j.contains("tolerances")) apply_tolerances(j["tolerances"], doc.tol, locate_key(text, "tolerances"));
  return doc;
}

Schedule parse_schedule(const std::string& text) {
  Json j = parse_json(text);
  if (j.is_object() && j.contains("segments")) j = j["segments"];
  if (!j.is_array() || j.empty()) throw InputError(1, "schedule must be a non-empty array of segments");
  Schedule s;
  // locate the i-th top-level object for error messages
  auto seg_line = [&](size_t i) {
    int depth = 0;
    size_t seen = 0;
    for (size_t p = 0; p < text.size(); ++p) {
      char c = text[p];
      if (c == '[' || c == '{') {
        if (c == '{' && depth == 1 && seen++ == i) return line_of_offset(text, p);
        ++depth;
      } else if (c == ']' || c == '}') {
        --depth;
      }
    }
    return 1;
  };
  for (size_t i = 0; i < j.size(); ++i) {
    const Json& e = j[i];
    int line = seg_line(i);
    if (!e.is_object()) throw InputError(line, "segment must be an object");
    auto rowline = [&](int) { return line; };
    if (e.contains("Q")) {
      if (!e.contains("duration") || !e["duration"].is_number())
        throw InputError(line, "constant segment needs a numeric \"duration\"");
      s.segments.push_back(ConstantSegment{json_matrix(e["Q"], rowline), e["duration"].get<double>()});
    } else if (e.contains("samples")) {
      if (!e.contains("step") || !e["step"].is_number()) throw InputError(line, "sampled segment needs \"step\"");
      SampledSegment sm;
      sm.step = e["step"].get<double>();
      if (!e["samples"].is_array()) throw InputError(line, "\"samples\" must be an array of matrices");
      for (auto& q : e["samples"]) sm.samples.push_back(json_matrix(q, rowline));
      s.segments.push_back(std::move(sm));
    } else {
      throw InputError(line, "segment needs \"Q\" and \"duration\" or \"samples\" and \"step\"");
    }
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw InputError(1, e.what());
  }
  return s;
}

Json matrix_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (int k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(std::move(r));
  }
  return rows;
}

Json matrix_document_json(const Mat& m, const std::optional<std::string>& label) {
  Json j;
  j["dim"] = m.rows();
  j["rows"] = matrix_json(m);
  if (label) j["label"] = *label;
  return j;
}

Json case_tag_json(const CaseTag& tag) {
  Json j;
  j["pattern"] = to_string(tag.pattern);
  j["dim"] = tag.dim;
  j["min_poly_degree"] = tag.min_poly_degree;
  j["eigen"] = eigen_json(tag);
  Json blocks = Json::array();
  for (auto& b : tag.jordan.blocks) {
    Json bj;
    bj["eigenvalue"] = Json::array({b.eigenvalue.real(), b.eigenvalue.imag()});
    bj["sizes"] = b.sizes;
    blocks.push_back(std::move(bj));
  }
  j["jordan"] = std::move(blocks);
  return j;
}

Json result_json(const EmbeddingResult& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["reason"] = to_string(r.reason);
  j["uniqueness"] = to_string(r.uniqueness);
  j["case_tag"] = r.tag ? case_tag_json(*r.tag) : Json(nullptr);
  Json gens = Json::array();
  for (auto& g : r.generators) {
    Json gj;
    gj["branch"] = g.branch;
    gj["construction"] = to_string(g.construction);
    gj["residual"] = g.residual;
    gj["matrix"] = matrix_json(g.matrix);
    gens.push_back(std::move(gj));
  }
  j["generators"] = std::move(gens);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json verdict_document(const MatrixDocument& in, const EmbeddingResult& r) {
  Json j;
  j["input"] = matrix_document_json(in.m, in.label);
  Json body = result_json(r);
  for (auto& [k, v] : body.items()) j[k] = v;
  return j;
}

Json classify_document(const MatrixDocument& in, const CaseTag& tag, const NecessaryReport& nec,
                       const std::set<ModelTag>& models) {
  Json j;
  j["input"] = matrix_document_json(in.m, in.label);
  j["case_tag"] = case_tag_json(tag);
  j["necessary"] = {{"diag_positive", nec.diag_positive},
                    {"det_positive", nec.det_positive},
                    {"unit_circle_ok", nec.unit_circle_ok},
                    {"culver_ok", nec.culver_ok},
                    {"transitivity_ok", nec.transitivity_ok}};
  Json mj = Json::array();
  for (auto t : models) mj.push_back(to_string(t));
  j["models"] = std::move(mj);
  return j;
}

Json greport_json(const GReport& g) {
  Json j;
  j["verdict"] = to_string(g.verdict);
  j["necessary_ok"] = g.necessary_ok;
  j["b_quantity"] = g.b_quantity ? Json(*g.b_quantity) : Json(nullptr);
  j["factor_bound"] = g.factor_bound ? Json(*g.factor_bound) : Json(nullptr);
  if (!g.note.empty()) j["note"] = g.note;
  return j;
}

std::string table_text(const EmbeddingResult& r) {
  std::ostringstream os;
  os << "verdict     " << to_string(r.verdict) << '\n';
  if (r.tag) os << "case        " << to_string(r.tag->pattern) << '\n';
  if (r.reason != Reason::NONE) os << "reason      " << to_string(r.reason) << '\n';
  if (r.verdict == Verdict::Embeddable) os << "uniqueness  " << to_string(r.uniqueness) << '\n';
  for (auto& g : r.generators) {
    os << "generator   branch " << g.branch << ", " << to_string(g.construction) << ", residual "
       << format_double(g.residual) << '\n';
    for (int i = 0; i < g.matrix.rows(); ++i) {
      os << "   ";
      for (int k = 0; k < g.matrix.cols(); ++k) os << ' ' << format_double(g.matrix(i, k));
      os << '\n';
    }
  }
  if (!r.note.empty()) os << "note        " << r.note << '\n';
  return os.str();
}

}  // namespace membed
