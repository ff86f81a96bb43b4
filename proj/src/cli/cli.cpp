#include "fman/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "fman/errors.hpp"

namespace fman::cli {

namespace {

using Json = nlohmann::ordered_json;

bool report_passed(const CheckResult& r) { return !r.precondition && r.report.passed(); }

std::string overall(const CheckResult& r) {
  if (r.precondition) return "precondition";
  return r.report.passed() ? "pass" : "fail";
}

std::string witness_text(const IdentityRecord& rec) {
  std::string s;
  for (const auto& [label, i] : rec.witness) s += (s.empty() ? "" : " ") + label + "=" + std::to_string(i + 1);
  return s;
}

}  // namespace

std::string render_text(const CheckResult& r) {
  std::ostringstream os;
  os << r.command;
  if (!r.model.empty()) os << " " << r.model;
  if (!r.report.title.empty()) os << ": " << r.report.title;
  os << "\n";
  for (const auto& rec : r.report.records) {
    std::string v = rec.verdict == Verdict::pass ? "pass" : rec.verdict == Verdict::fail ? "FAIL" : "skip";
    os << "  " << v << "  " << rec.identity << "  [" << rec.anchor << "]\n";
    if (rec.verdict == Verdict::fail) {
      if (!rec.condition.empty()) os << "        condition: " << rec.condition << "\n";
      if (!rec.witness.empty()) os << "        witness: " << witness_text(rec) << "\n";
      if (!rec.residual.empty()) os << "        residual: " << rec.residual << "\n";
    }
    if (!rec.note.empty()) os << "        note: " << rec.note << "\n";
  }
  for (const auto& n : r.report.notes) os << "  note: " << n << "\n";
  if (r.precondition) os << "  precondition: " << *r.precondition << "\n";
  os << "verdict: " << overall(r) << "\n";
  return os.str();
}

std::string render_json(const CheckResult& r) {
  Json j;
  j["command"] = r.command;
  j["model"] = r.model;
  j["title"] = r.report.title;
  j["verdict"] = overall(r);
  Json recs = Json::array();
  for (const auto& rec : r.report.records) {
    Json o;
    o["identity"] = rec.identity;
    o["anchor"] = rec.anchor;
    o["verdict"] = to_string(rec.verdict);
    if (!rec.condition.empty()) o["condition"] = rec.condition;
    if (!rec.witness.empty()) {
      Json w = Json::array();
      for (const auto& [label, i] : rec.witness) w.push_back(Json{{"label", label}, {"index", i + 1}});
      o["witness"] = w;
    }
    if (!rec.residual.empty()) o["residual"] = rec.residual;
    if (!rec.note.empty()) o["note"] = rec.note;
    recs.push_back(o);
  }
  j["records"] = recs;
  j["notes"] = r.report.notes;
  if (r.precondition) j["precondition"] = *r.precondition;
  j["timing"] = Json{{"seconds", r.seconds}};
  return j.dump(2) + "\n";
}

namespace {

struct Options {
  bool json = false;
  std::string connection;
  std::string candidate;
  std::string out;
  std::string model;
  std::string kind;
};

class Runner {
 public:
  Runner(const Options& o, std::istream& in, std::ostream& out) : o_(o), in_(in), out_(out) {}

  ModelFile load(const std::string& path) {
    if (path == "-") return parse_model(in_, "<stdin>");
    return load_model(path);
  }

  Connection connection(const ModelFile& m) {
    if (!o_.connection.empty()) {
      ModelFile c = load(o_.connection);
      if (!c.connection) throw InputError("'" + o_.connection + "' has no [connection] section");
      if (c.chart.base_names() != m.chart.base_names())
        throw InputError("connection file base coordinates differ from the model");
      return *c.connection;
    }
    if (!m.connection) throw InputError("command needs a connection: add a [connection] section or pass --connection");
    return *m.connection;
  }

  void write_model(const ModelFile& m) {
    std::string text = save_model(m);
    if (o_.out.empty()) {
      out_ << text;
    } else {
      std::ofstream f(o_.out);
      if (!f) throw InputError("cannot write '" + o_.out + "'");
      f << text;
    }
  }

  int finish(CheckResult r) {
    std::string text = o_.json ? render_json(r) : render_text(r);
    if (o_.out.empty()) {
      out_ << text;
    } else {
      std::ofstream f(o_.out);
      if (!f) throw InputError("cannot write '" + o_.out + "'");
      f << text;
    }
    if (r.precondition) return kPreconditionError;
    return report_passed(r) ? kPass : kCheckFailure;
  }

  template <class F>
  int check(const std::string& command, F&& body) {
    auto start = std::chrono::steady_clock::now();
    CheckResult r;
    r.command = command;
    ModelFile m = load(o_.model);
    r.model = m.name.empty() ? o_.model : m.name;
    try {
      r.report = body(m);
    } catch (const PreconditionError& e) {
      r.precondition = e.what();
      IdentityRecord rec;
      rec.identity = "precondition";
      rec.anchor = "inputs satisfy the command's preconditions";
      rec.verdict = Verdict::fail;
      rec.note = e.what();
      r.report.records.push_back(rec);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return finish(std::move(r));
  }

  int cmd_check() {
    return check("check", [&](const ModelFile& m) {
      if (m.chart.k() == 0) {
        BaseFManifold b = m.base();
        Report r = b.verify();
        r.title = "base F-manifold";
        if (m.connection || !o_.connection.empty()) {
          std::optional<Vec> E;
          if (!o_.candidate.empty()) E = m.candidate(o_.candidate).beta;
          Report f = check_flat_f(b, connection(m), E);
          r.append(f);
          r.title = "flat F-manifold";
        }
        return r;
      }
      Report r = check_fmanifold(m.components, m.require_unit());
      r.title = "linear F-manifold";
      return r;
    });
  }

  const LinearVectorField& pick_candidate(const ModelFile& m) {
    if (!o_.candidate.empty()) return m.candidate(o_.candidate);
    if (m.euler.size() == 1) return m.euler.front().second;
    throw InputError(m.euler.empty() ? "model has no [euler.NAME] section" : "several Euler candidates: pass --candidate");
  }

  int cmd_euler() {
    return check("euler-check", [&](const ModelFile& m) {
      Report r = check_euler(m.components, m.require_unit(), pick_candidate(m));
      r.title = "Euler field";
      return r;
    });
  }

  int cmd_dualize() {
    ModelFile m = load(o_.model);
    Connection nabla = connection(m);
    DualData d = dualize(m.components, m.require_unit(), nabla);
    ModelFile o = make_model(m.name.empty() ? "dual" : m.name + "-dual", d.c, d.e);
    o.description = "dual under the model connection";
    for (const auto& [key, f] : m.euler) o.euler.emplace_back(key, dualize(f));
    o.connection = nabla;
    write_model(o);
    return kPass;
  }

  int cmd_prolong() {
    ModelFile m = load(o_.model);
    BaseFManifold b = m.base();
    ModelFile o;
    std::string stem = m.name.empty() ? "base" : m.name;
    if (o_.kind == "tangent") {
      ProlongedStructure p = tangent_prolongation(b);
      o = make_model(stem + "-tangent", p.components, p.unit);
      for (const auto& [key, f] : m.euler) o.euler.emplace_back(key, tangent_lift(p.components.chart, f.beta));
      if (m.connection) o.connection = m.connection;
    } else {
      Connection nabla = connection(m);
      ProlongedStructure p = o_.kind == "cotangent" ? cotangent_prolongation(b, nabla) : generalized_prolongation(b, nabla);
      o = make_model(stem + "-" + o_.kind, p.components, p.unit);
      Chart tc = tangent_chart(b.chart);
      for (const auto& [key, f] : m.euler) {
        LinearVectorField lift = tangent_lift(tc, f.beta);
        o.euler.emplace_back(key, o_.kind == "cotangent" ? dualize(lift) : direct_sum(lift, dualize(lift)));
      }
      o.connection = nabla;
      if (m.gamma) o.gamma = m.gamma;
      if (m.H) o.H = m.H;
    }
    o.description = o_.kind + " prolongation";
    write_model(o);
    return kPass;
  }

  int cmd_bfield() {
    ModelFile m = load(o_.model);
    if (!m.gamma) throw InputError("bfield needs a [gamma] section");
    DualData d = bfield_transform(m.components, m.require_unit(), *m.gamma);
    ModelFile o = make_model(m.name.empty() ? "bfield" : m.name + "-bfield", d.c, d.e);
    o.description = "B-field transform";
    Matrix I = bfield_matrix(*m.gamma);
    for (const auto& [key, f] : m.euler) o.euler.emplace_back(key, conjugate(f, I));
    o.connection = m.connection;
    o.H = m.H;
    write_model(o);
    return kPass;
  }

  int cmd_courant() {
    return check("courant-classify", [&](const ModelFile& m) {
      CourantClassification cl = classify_exact_courant(m.components, m.require_unit(), connection(m), m.H);
      cl.report.notes.push_back(cl.exact ? "exact Courant F-manifold" : "not an exact Courant F-manifold");
      return cl.report;
    });
  }

  int cmd_five_field() {
    return check("lemma53", [&](const ModelFile& m) { return check_five_field_identity(m.base()); });
  }

 private:
  const Options& o_;
  std::istream& in_;
  std::ostream& out_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Verification of F-manifold structures on vector bundles", "fman"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_flag("--json", o.json, "machine-readable report");
  app.add_option("--connection", o.connection, "model file whose [connection] overrides the model's");
  app.add_option("--candidate", o.candidate, "Euler candidate name");
  app.add_option("--out", o.out, "write output to a file instead of stdout");

  auto model_arg = [&](CLI::App* sub) { sub->add_option("model", o.model, "model file, - for stdin")->required(); };
  auto* check = app.add_subcommand("check", "run the F-manifold battery");
  model_arg(check);
  auto* euler = app.add_subcommand("euler-check", "check an Euler candidate");
  model_arg(euler);
  auto* dual = app.add_subcommand("dualize", "dual multiplication under the connection");
  model_arg(dual);
  auto* prolong = app.add_subcommand("prolong", "tangent, cotangent or generalized prolongation of a base model");
  prolong->add_option("kind", o.kind)->required()->check(CLI::IsMember({"tangent", "cotangent", "generalized"}));
  model_arg(prolong);
  auto* bfield = app.add_subcommand("bfield", "B-field transform by the model's [gamma]");
  model_arg(bfield);
  auto* courant = app.add_subcommand("courant-classify", "exact Courant F-manifold classification");
  model_arg(courant);
  auto* five = app.add_subcommand("lemma53", "five-field identity on a base model");
  five->alias("five-field");
  model_arg(five);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "fman: " << e.what() << "\n";
    return kInputError;
  }

  Runner r(o, in, out);
  try {
    if (check->parsed()) return r.cmd_check();
    if (euler->parsed()) return r.cmd_euler();
    if (dual->parsed()) return r.cmd_dualize();
    if (prolong->parsed()) return r.cmd_prolong();
    if (bfield->parsed()) return r.cmd_bfield();
    if (courant->parsed()) return r.cmd_courant();
    if (five->parsed()) return r.cmd_five_field();
  } catch (const PreconditionError& e) {
    err << "fman: precondition: " << e.what() << "\n";
    return kPreconditionError;
  } catch (const InputError& e) {
    err << "fman: " << e.what() << "\n";
    return kInputError;
  } catch (const DivisionByZero& e) {
    err << "fman: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace fman::cli
