// membed: command-line front end.
// Exit codes: 0 embeddable/success, 1 not embeddable, 2 undecided, 64 input error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "membed/io.hpp"

using namespace membed;

namespace {

constexpr int kExitInput = 64;

struct Common {
  std::string file = "-";
  bool timing = false;
  bool table = false;
  bool all_branches = false;
  std::optional<double> tol_spec_cluster, tol_nonneg, tol_rowsum, tol_residual, tol_rank;
};

std::string read_input(const std::string& file) {
  if (file == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(file);
  if (!in) throw InputError(0, "cannot open " + file);
  return {std::istreambuf_iterator<char>(in), {}};
}

MatrixDocument load(const Common& c) {
  MatrixDocument doc = parse_matrix(read_input(c.file));
  if (c.tol_spec_cluster) doc.tol.spec_cluster = *c.tol_spec_cluster;
  if (c.tol_nonneg) doc.tol.nonneg = *c.tol_nonneg;
  if (c.tol_rowsum) doc.tol.rowsum = *c.tol_rowsum;
  if (c.tol_residual) doc.tol.residual = *c.tol_residual;
  if (c.tol_rank) doc.tol.rank = *c.tol_rank;
  try {
    doc.tol.validate();
  } catch (const Error& e) {
    throw InputError(0, e.what());
  }
  return doc;
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Embeddable: return 0;
    case Verdict::NotEmbeddable: return 1;
    case Verdict::Undecided: return 2;
  }
  return 2;
}

void emit(Json j, const Common& c, std::chrono::steady_clock::time_point t0) {
  if (c.timing)
    j["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  std::cout << dump(j) << '\n';
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError(0, "cannot parse number '" + tok + "'");
    }
  }
  return out;
}

void add_tolerance_flags(CLI::App* sub, Common& c) {
  sub->add_option("--tol-spec-cluster", c.tol_spec_cluster, "eigenvalue clustering tolerance");
  sub->add_option("--tol-nonneg", c.tol_nonneg, "nonnegativity tolerance");
  sub->add_option("--tol-rowsum", c.tol_rowsum, "row-sum tolerance");
  sub->add_option("--tol-residual", c.tol_residual, "exp(Q) residual tolerance");
  sub->add_option("--tol-rank", c.tol_rank, "relative rank cutoff");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov matrix embedding toolkit"};
  app.require_subcommand(1);
  Common c;
  app.add_flag("--timing", c.timing, "add wall-clock timing to JSON output");

  auto* classify_cmd = app.add_subcommand("classify", "case tag, necessary conditions and model classes");
  classify_cmd->add_option("input", c.file, "matrix file or - for stdin");
  add_tolerance_flags(classify_cmd, c);

  auto* embed_cmd = app.add_subcommand("embed", "decide embeddability and recover generators");
  embed_cmd->add_option("input", c.file, "matrix file or - for stdin");
  embed_cmd->add_flag("--all-branches", c.all_branches, "search non-principal branches even when the principal one works");
  embed_cmd->add_flag("--table", c.table, "human-readable table instead of JSON");
  embed_cmd->add_flag("--json", [&](int64_t) { c.table = false; }, "JSON output (default)");
  add_tolerance_flags(embed_cmd, c);

  auto* exp_cmd = app.add_subcommand("exp", "matrix exponential");
  exp_cmd->add_option("input", c.file, "matrix file or - for stdin");
  auto* log_cmd = app.add_subcommand("log", "principal matrix logarithm");
  log_cmd->add_option("input", c.file, "matrix file or - for stdin");
  add_tolerance_flags(log_cmd, c);

  std::string kind, cvec, avec, kvec;
  double px = 0, py = 0, pz = 0;
  int dim = 4;
  auto* model_cmd = app.add_subcommand("model", "closed-form deciders for substitution models");
  model_cmd->add_option("kind", kind, "equal-input | tn | k3st | jc | k2p")
      ->required()
      ->check(CLI::IsMember({"equal-input", "tn", "k3st", "jc", "k2p"}));
  model_cmd->add_option("--c", cvec, "equal-input c_1,...,c_d (or the summatory c for jc)");
  model_cmd->add_option("--dim", dim, "dimension for jc")->check(CLI::Range(2, 4));
  model_cmd->add_option("--a", avec, "TN a1,a2,a3,a4");
  model_cmd->add_option("--kappa", kvec, "TN kappa1,kappa2");
  model_cmd->add_option("--x", px, "K3ST / K2P x");
  model_cmd->add_option("--y", py, "K3ST / K2P y");
  model_cmd->add_option("--z", pz, "K3ST z");
  model_cmd->add_flag("--table", c.table, "human-readable table instead of JSON");

  std::string sched_file;
  double t_end = -1;
  bool use_pbs = false, use_product = false, det_check = false;
  auto* sim_cmd = app.add_subcommand("simulate", "evolve a piecewise generator schedule");
  sim_cmd->add_option("schedule", sched_file, "schedule JSON file or - for stdin")->required();
  sim_cmd->add_option("--t", t_end, "final time (default: whole schedule)");
  sim_cmd->add_flag("--pbs", use_pbs, "Peano-Baker series");
  sim_cmd->add_flag("--product", use_product, "product of exponentials (default)");
  sim_cmd->add_flag("--det-check", det_check, "compare det with the Liouville formula");

  auto* g_cmd = app.add_subcommand("gcheck", "d=3 g-embeddability tests");
  g_cmd->add_option("input", c.file, "matrix file or - for stdin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  auto t0 = std::chrono::steady_clock::now();
  std::string where = c.file == "-" ? "<stdin>" : c.file;
  try {
    if (*classify_cmd) {
      MatrixDocument doc = load(c);
      if (!is_markov(doc.m, doc.tol)) throw Error(ErrorCode::NotMarkov, "input is not a Markov matrix");
      emit(classify_document(doc, classify(doc.m, doc.tol), necessary_checks(doc.m, doc.tol),
                             model_recognize(doc.m, doc.tol)),
           c, t0);
      return 0;
    }
    if (*embed_cmd) {
      MatrixDocument doc = load(c);
      DecideOptions opt;
      opt.all_branches = c.all_branches;
      EmbeddingResult r = decide(doc.m, doc.tol, opt);
      if (c.table)
        std::cout << table_text(r);
      else
        emit(verdict_document(doc, r), c, t0);
      return verdict_exit(r.verdict);
    }
    if (*exp_cmd) {
      MatrixDocument doc = load(c);
      emit(matrix_document_json(mat_exp(doc.m), doc.label), c, t0);
      return 0;
    }
    if (*log_cmd) {
      MatrixDocument doc = load(c);
      try {
        emit(matrix_document_json(principal_log(doc.m, doc.tol), doc.label), c, t0);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SpectrumOnCut) throw;
        std::cerr << "membed: " << where << ": " << to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
      }
      return 0;
    }
    if (*model_cmd) {
      where = "model parameters";
      Tolerances tol;
      EmbeddingResult r;
      Mat m;
      if (kind == "equal-input" || kind == "jc") {
        EqualInputParams p;
        auto v = parse_list(cvec);
        if (kind == "jc") {
          if (v.size() != 1) throw InputError(0, "jc needs --c with the summatory parameter");
          p.c_vec.assign(dim, v[0] / dim);
        } else {
          p.c_vec = v;
        }
        m = equal_input_matrix(p);
        r = embed_equal_input(p, static_cast<int>(p.c_vec.size()), tol);
      } else if (kind == "tn") {
        auto a = parse_list(avec), k = parse_list(kvec);
        if (a.size() != 4 || k.size() != 2) throw InputError(0, "tn needs --a a1,a2,a3,a4 and --kappa k1,k2");
        TNParams p{a[0], a[1], a[2], a[3], k[0], k[1]};
        m = tn_matrix(p);
        r = embed_tn(p, tol);
      } else {
        K3STParams p{px, py, kind == "k2p" ? py : pz};
        m = k3st_matrix(p);
        r = embed_k3st(p, tol);
      }
      if (c.table) {
        std::cout << table_text(r);
      } else {
        MatrixDocument doc;
        doc.m = m;
        doc.label = kind;
        emit(verdict_document(doc, r), c, t0);
      }
      return verdict_exit(r.verdict);
    }
    if (*sim_cmd) {
      where = sched_file == "-" ? "<stdin>" : sched_file;
      Schedule s = parse_schedule(read_input(sched_file));
      double t = t_end < 0 ? s.span() : t_end;
      Mat m;
      if (use_pbs) {
        m = peano_baker(s, t);
      } else {
        if (t_end >= 0 && std::abs(t_end - s.span()) > 1e-12 * std::max(1.0, s.span()))
          throw InputError(0, "--t other than the full span needs --pbs");
        m = evolve(s);
      }
      Json j = matrix_document_json(m);
      j["method"] = use_pbs ? "peano-baker" : "product";
      j["t"] = t;
      if (det_check) {
        double d = m.determinant(), l = liouville_det(s, t);
        j["determinant"] = {{"det", d}, {"liouville", l}, {"difference", std::abs(d - l)}};
      }
      emit(j, c, t0);
      return 0;
    }
    if (*g_cmd) {
      MatrixDocument doc = load(c);
      GReport g = g_embed_d3(doc.m, doc.tol);
      Json j;
      j["input"] = matrix_document_json(doc.m, doc.label);
      Json body = greport_json(g);
      for (auto& [k, v] : body.items()) j[k] = v;
      emit(j, c, t0);
      return g.verdict == GVerdict::GEmbeddable ? 0 : g.verdict == GVerdict::NotGEmbeddable ? 1 : 2;
    }
  } catch (const InputError& e) {
    std::cerr << "membed: " << where << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "membed: " << where << ": " << to_string(e.code()) << ": " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::NotMarkov:
      case ErrorCode::RejectsDimension:
      case ErrorCode::NonFinite:
      case ErrorCode::InfeasibleParams:
      case ErrorCode::InvalidArgument:
      case ErrorCode::NonpositiveParameter:
      case ErrorCode::NotTotallyPositive: return kExitInput;
      default: return 2;
    }
  }
  return kExitInput;
}
