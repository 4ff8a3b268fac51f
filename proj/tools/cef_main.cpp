// Command-line front end. Every subcommand prints one JSON document on
// standard output. Exit codes: 0 success, 1 usage or parse error, 2 the input
// is outside what the library can decide, 3 corpus checks failed.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cef/cells.hpp"
#include "cef/corpus.hpp"
#include "cef/dsl.hpp"
#include "cef/fourier.hpp"
#include "cef/json.hpp"

using namespace cef;
using nlohmann::json;

namespace {

bool g_pretty = false;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int emit(json j, int code = 0) {
  j["schema"] = kJsonSchemaVersion;
  std::cout << (g_pretty ? j.dump(2) : j.dump()) << "\n";
  return code;
}

// A path to an existing file, or DSL text.
std::string source_text(const std::string& arg) {
  std::ifstream in(arg);
  if (!in) return arg;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CExp load(const std::string& arg) { return parse(source_text(arg)); }

json value_json(const CExp& e) { return {{"value", print_expr(e)}, {"ast", to_json(e)}}; }

json result_json(const IntegrationResult& r) {
  json j = value_json(r.value);
  j["status"] = status_name(r.status);
  json div = json::array();
  for (const auto& conj : r.divergent) {
    std::string s;
    for (const auto& a : conj) s += (s.empty() ? "" : ", ") + a.str();
    div.push_back("[" + s + "]");
  }
  if (!div.empty()) j["divergent"] = div;
  if (!r.opaque.empty()) j["opaque"] = r.opaque;
  return j;
}

int exit_for(const IntegrationResult& r) { return r.status == IntegrationStatus::NonIntegrable ? 2 : 0; }

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

int64_t to_int(const std::string& s) {
  try {
    size_t used = 0;
    int64_t v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("not an integer: " + s);
}

// "x: vmin=-2; j: lo=0, hi=3"
void parse_box(const std::string& text, IntegrationBox& box) {
  for (const auto& item : split(text, ';')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("box entry without ':' in " + item);
    std::string var = trim(item.substr(0, colon));
    std::map<std::string, int64_t> kv;
    for (const auto& f : split(item.substr(colon + 1), ',')) {
      auto eq = f.find('=');
      if (eq == std::string::npos) throw UsageError("box field without '=' in " + f);
      kv[trim(f.substr(0, eq))] = to_int(trim(f.substr(eq + 1)));
    }
    if (kv.count("vmin"))
      box.vf.push_back({var, kv["vmin"]});
    else if (kv.count("lo") && kv.count("hi"))
      box.ints.push_back({var, kv["lo"], kv["hi"]});
    else
      throw UsageError("box entry for " + var + " needs vmin or lo, hi");
  }
}

// name=value; valued variables take an element "v=2 digits=[3,0,1]".
Point parse_point(const std::vector<std::string>& at, const CExp& e, const LocalField& K) {
  Point pt;
  for (const auto& a : at) {
    auto eq = a.find('=');
    if (eq == std::string::npos) throw UsageError("expected name=value, got " + a);
    std::string n = trim(a.substr(0, eq)), v = trim(a.substr(eq + 1));
    Sort s = Sort::Int;
    if (auto it = e.ctx.find(n); it != e.ctx.end()) s = it->second;
    for (const auto& t : e.terms) {
      if (free_vf(t).count(n)) s = Sort::VF;
      if (free_res(t).count(n)) s = Sort::Res;
    }
    if (s == Sort::VF)
      pt.vf[n] = Element::parse(K, v);
    else if (s == Sort::Res)
      pt.res[n] = to_int(v);
    else
      pt.ints[n] = to_int(v);
  }
  return pt;
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

FieldKind field_kind(const std::string& f) {
  if (f == "qp") return FieldKind::PadicQ;
  if (f == "fpt") return FieldKind::LaurentF;
  throw UsageError("field must be qp or fpt");
}

bool pure_constant(const CExp& e) {
  for (const auto& t : e.terms)
    if (!t.conds.empty() || !t.sums.empty() || !t.expArg.is_zero() || !t.resExpArg.is_zero() || !t.lexp.is_constant())
      return false;
  return true;
}

json cells_json(const CExp& e, const std::string& var) {
  json out = json::array();
  for (const auto& t : e.terms) {
    std::vector<CondAtom> with, base;
    for (const auto& c : t.conds) {
      CExpTerm probe;
      probe.conds = {c};
      (free_vf(probe).count(var) ? with : base).push_back(c);
    }
    std::set<std::string> used = all_names(t);
    Decomposition d = decompose(with, targets_of(t, var), var, base, used);
    json cells = json::array(), lines = json::array();
    for (size_t k = 0; k < d.cells.size(); ++k) {
      const Cell& c = d.cells[k];
      json conds = json::array();
      std::string line;
      for (const auto& a : c.conds) {
        conds.push_back(cond_str(a));
        line += (line.empty() ? "" : ", ") + cond_str(a);
      }
      json prepared = json::array();
      for (const auto& p : d.prepared[k]) {
        json pj = {{"target", p.target.str()}, {"ord", p.ord.str()}};
        pj["ac"] = p.ac ? json(p.ac->str()) : json(nullptr);
        prepared.push_back(pj);
      }
      std::string center = d.centers[c.center].str();
      lines.push_back("center " + center + ": [" + line + "]");
      cells.push_back({{"center", center},
                       {"order_var", c.order_var},
                       {"ac_var", c.ac_var},
                       {"conds", conds},
                       {"prepared", prepared}});
    }
    out.push_back({{"term", print_term(t)}, {"lines", lines}, {"cells", cells}});
  }
  return out;
}

json check_json(const CheckResult& r) {
  return {{"check", r.check}, {"passed", r.passed}, {"delta", r.delta}, {"detail", r.detail}};
}

template <class F>
int run(F body) {
  try {
    return body();
  } catch (const UsageError& ex) {
    return emit({{"error", {{"kind", "usage"}, {"message", ex.what()}}}}, 1);
  } catch (const SyntaxError& ex) {
    return emit({{"error", {{"kind", "syntax"}, {"message", ex.what()}}}}, 1);
  } catch (const CorpusError& ex) {
    return emit({{"error", {{"kind", "corpus"}, {"message", ex.what()}}}}, 1);
  } catch (const SortError& ex) {
    return emit({{"error", {{"kind", "sort"}, {"message", ex.what()}}}}, 1);
  } catch (const std::invalid_argument& ex) {
    return emit({{"error", {{"kind", "invalid"}, {"message", ex.what()}}}}, 1);
  } catch (const std::exception& ex) {
    return emit({{"error", {{"kind", "unsupported"}, {"message", ex.what()}}}}, 2);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constructible exponential functions: integration, Fourier transforms and p-adic checks"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_flag("--pretty", g_pretty, "Indented JSON");
  app.add_option("--threads", threads, "Worker threads (work runs on one)")->check(CLI::PositiveNumber);

  std::string src, src2;
  std::vector<std::string> vars, at, files;
  std::string var, field = "qp", box_text;
  int64_t alpha0 = 0, q = 0, p = 5;
  int depth = 6, twist_depth = 0, dim = 0;
  bool residue = false, with_transfer = false;
  std::vector<int64_t> primes = {5, 7, 11};

  auto* c_parse = app.add_subcommand("parse", "Parse and print the canonical text and AST");
  c_parse->add_option("source", src, "DSL text or file")->required();

  auto* c_int = app.add_subcommand("integrate", "Integrate out variables in order");
  c_int->add_option("--bind", vars, "Variables to integrate, in order")->delimiter(',')->required();
  c_int->add_option("source", src, "DSL text or file")->required();

  auto* c_four = app.add_subcommand("fourier", "Fourier transform in the given variables");
  c_four->add_option("--vars", vars, "Transform variables")->delimiter(',');
  c_four->add_option("--dim", dim, "Use x1..xd when --vars is absent");
  c_four->add_flag("--res", residue, "Residue-field transform");
  c_four->add_option("source", src, "DSL text or file")->required();

  auto* c_conv = app.add_subcommand("convolve", "Convolution f * g");
  c_conv->add_option("--vars", vars, "Variables")->delimiter(',')->required();
  c_conv->add_option("f", src, "DSL text or file")->required();
  c_conv->add_option("g", src2, "DSL text or file")->required();

  auto* c_sb = app.add_subcommand("sb-check", "Schwartz-Bruhat test at a given alpha0");
  c_sb->add_option("--vars", vars, "Variables")->delimiter(',')->required();
  c_sb->add_option("--alpha0", alpha0, "Ball exponent")->required();
  c_sb->add_option("source", src, "DSL text or file")->required();

  auto* c_cells = app.add_subcommand("cells", "Cell decomposition of each term in one variable");
  c_cells->add_option("--var", var, "Variable")->required();
  c_cells->add_option("source", src, "DSL text or file")->required();

  auto* c_spec = app.add_subcommand("specialize", "Value with L = q");
  c_spec->add_option("--q", q, "Residue field size (prime unless the input is a constant)")->required();
  c_spec->add_option("--at", at, "name=value for free variables");
  c_spec->add_option("source", src, "DSL text or file")->required();

  auto* c_orc = app.add_subcommand("oracle", "Integral over a box by coset enumeration");
  c_orc->add_option("--p", p, "Prime")->required();
  c_orc->add_option("--field", field, "qp or fpt");
  c_orc->add_option("--depth", depth, "Refinement depth");
  c_orc->add_option("--box", box_text, "\"x: vmin=-2; j: lo=0, hi=3\"")->required();
  c_orc->add_option("--twist-depth", twist_depth, "Report all twists mod w^k");
  c_orc->add_option("--at", at, "name=value for free variables");
  c_orc->add_option("source", src, "DSL text or file")->required();

  auto* c_tr = app.add_subcommand("transfer", "Compare Q_p and F_p((t)) over character twists");
  c_tr->add_option("--primes", primes, "Primes")->delimiter(',');
  c_tr->add_option("--twist-depth", twist_depth, "Twists mod w^k")->required();
  c_tr->add_option("--depth", depth, "Refinement depth");
  c_tr->add_option("--box", box_text, "\"x: vmin=-2\"")->required();
  c_tr->add_option("source", src, "DSL text or file")->required();

  auto* c_corpus = app.add_subcommand("corpus", "Corpus runner");
  auto* c_run = c_corpus->add_subcommand("run", "Run every check on the given corpus files");
  c_corpus->require_subcommand(1);
  c_run->add_option("files", files, "Corpus JSON files")->required();
  c_run->add_flag("--transfer", with_transfer, "Include the Q_p / F_p((t)) comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit({{"error", {{"kind", "usage"}, {"message", e.what()}}}}, 1);
  }

  if (*c_parse) return run([&] { return emit(value_json(load(src))); });

  if (*c_int) return run([&] {
      auto r = integrate_all(load(src), vars);
      return emit(result_json(r), exit_for(r));
    });

  if (*c_four) return run([&] {
      if (vars.empty())
        for (int i = 1; i <= dim; ++i) vars.push_back("x" + std::to_string(i));
      if (vars.empty()) throw UsageError("give --vars or --dim");
      CExp e = load(src);
      if (residue) return emit(value_json(fourier_res(e, vars)));
      auto r = fourier_vf(e, vars);
      return emit(result_json(r), exit_for(r));
    });

  if (*c_conv) return run([&] {
      auto r = convolve(load(src), load(src2), vars);
      return emit(result_json(r), exit_for(r));
    });

  if (*c_sb) return run([&] {
      auto r = schwartz_bruhat(load(src), vars, alpha0);
      return emit({{"compact", r.compact}, {"locally_constant", r.locally_constant}, {"schwartz_bruhat", r.holds()}});
    });

  if (*c_cells) return run([&] { return emit({{"terms", cells_json(load(src), var)}}); });

  if (*c_spec) return run([&] {
      if (q < 2) throw UsageError("q must be at least 2");
      CExp e = normalize(load(src));
      if (pure_constant(e)) {
        LRat sum;
        for (const auto& t : e.terms) sum += t.coeff * LRat::L(static_cast<int>(t.lexp.constant.num()));
        return emit({{"value", sum.specialize(Rational(q)).str()}});
      }
      if (!is_prime(q)) throw UsageError("q must be prime for non-constant input");
      LocalField K(FieldKind::PadicQ, q);
      Point pt = parse_point(at, e, K);
      if (auto x = interpret_exact(e, K, pt)) return emit({{"value", x->str()}});
      return emit({{"value", complex_json(interpret(e, Character(K), pt))}});
    });

  if (*c_orc) return run([&] {
      if (!is_prime(p)) throw UsageError("p must be prime");
      CExp e = load(src);
      IntegrationBox box;
      box.depth = depth;
      parse_box(box_text, box);
      LocalField K(field_kind(field), p);
      Point pt = parse_point(at, e, K);
      std::vector<Character> chars = twist_depth > 0 ? character_family(K, twist_depth) : std::vector<Character>{Character(K)};
      json rows = json::array();
      for (const auto& ch : chars) {
        OracleResult r = numeric_integrate(e, ch, box, pt);
        std::string tw = "[";
        for (int i = 0; i < std::max(twist_depth, 1); ++i) tw += (i ? "," : "") + std::to_string(ch.twist.digit_at(i));
        json row = {{"p", p}, {"field", K.name()}, {"twist", tw + "]"}, {"value", complex_json(r.value)},
                    {"delta", r.delta}, {"truncated", r.truncated}};
        if (r.exact) row["exact"] = r.exact->str();
        rows.push_back(row);
      }
      return emit({{"rows", rows}});
    });

  if (*c_tr) return run([&] {
      IntegrationBox box;
      box.depth = depth;
      parse_box(box_text, box);
      TransferReport r = transfer_compare(load(src), primes, twist_depth, box);
      json rows = json::array();
      for (const auto& row : r.rows)
        rows.push_back({{"p", row.p}, {"field", row.field}, {"twist", row.twist}, {"value", complex_json(row.value)},
                        {"delta", row.delta}});
      return emit({{"rows", rows},
                   {"max_discrepancy", r.max_discrepancy},
                   {"pattern_agrees", r.pattern_agrees},
                   {"twist_stable", r.twist_stable}});
    });

  if (*c_run) return run([&] {
      json cases = json::array();
      int failed = 0;
      for (const auto& f : files)
        for (const auto& c : load_corpus(f)) {
          json checks = json::array();
          bool ok = true;
          for (const auto& r : run_case(c, with_transfer)) {
            checks.push_back(check_json(r));
            ok = ok && r.passed;
          }
          failed += !ok;
          cases.push_back({{"file", f}, {"name", c.name}, {"kind", c.kind}, {"passed", ok}, {"checks", checks}});
        }
      return emit({{"cases", cases}, {"failed", failed}, {"total", cases.size()}}, failed ? 3 : 0);
    });

  return 1;
}
