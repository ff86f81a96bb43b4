#include "fman/model.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "fman/errors.hpp"

namespace fman {

namespace {

struct Line {
  int number;
  std::string text;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::string strip_offset(const std::string& what) {
  auto p = what.rfind(" at byte ");
  return p == std::string::npos ? what : what.substr(0, p);
}

class Parser {
 public:
  Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw InputError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  RatFunc expr(const Line& l, const std::string& text, const std::vector<std::string>& names) const {
    try {
      return parse_expr(text, names);
    } catch (const ParseError& e) {
      throw ParseError(source_ + ":" + std::to_string(l.number) + ": " + strip_offset(e.what()), e.offset());
    }
  }

  // "i j k = expr" with 1-based indices bounded by dims.
  std::pair<std::vector<int>, std::string> entry(const Line& l, const std::vector<int>& dims) const {
    auto eq = l.text.find('=');
    if (eq == std::string::npos) fail(l.number, "expected 'indices = expression'");
    auto idx = words(l.text.substr(0, eq));
    if (idx.size() != dims.size())
      fail(l.number, "expected " + std::to_string(dims.size()) + " indices, got " + std::to_string(idx.size()));
    std::vector<int> out;
    for (std::size_t r = 0; r < idx.size(); ++r) {
      int v = 0;
      try {
        std::size_t used = 0;
        v = std::stoi(idx[r], &used);
        if (used != idx[r].size()) throw std::invalid_argument("index");
      } catch (const std::exception&) {
        fail(l.number, "bad index '" + idx[r] + "'");
      }
      if (v < 1 || v > dims[r]) fail(l.number, "index " + idx[r] + " out of range 1.." + std::to_string(dims[r]));
      out.push_back(v - 1);
    }
    return {out, trim(l.text.substr(eq + 1))};
  }

  std::pair<std::string, std::string> assignment(const Line& l) const {
    auto eq = l.text.find('=');
    if (eq == std::string::npos) fail(l.number, "expected 'key = value'");
    return {trim(l.text.substr(0, eq)), trim(l.text.substr(eq + 1))};
  }

 private:
  std::string source_;
};

LinearVectorField parse_field(const Parser& p, const Chart& chart, const std::vector<Line>& lines, int header) {
  auto names = chart.all_names();
  std::vector<RatFunc> comps(names.size());
  std::vector<bool> seen(names.size(), false);
  for (const auto& l : lines) {
    auto [key, value] = p.assignment(l);
    auto it = std::find(names.begin(), names.end(), key);
    if (it == names.end()) p.fail(l.number, "unknown coordinate '" + key + "'");
    auto i = static_cast<std::size_t>(it - names.begin());
    if (seen[i]) p.fail(l.number, "duplicate component '" + key + "'");
    seen[i] = true;
    comps[i] = p.expr(l, value, names);
  }
  try {
    return LinearVectorField::from_tensor(TensorField::vector_field(chart, comps));
  } catch (const InputError& e) {
    p.fail(header, e.what());
  }
}

void write_field(std::ostream& os, const Chart& chart, const LinearVectorField& f) {
  TensorField t = f.to_tensor();
  auto names = chart.all_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!t[i].is_zero()) os << names[i] << " = " << t[i].to_string() << "\n";
}

void write_entries(std::ostream& os, const Table& t, bool (*keep)(const std::vector<int>&) = nullptr) {
  for (std::size_t f = 0; f < t.size(); ++f) {
    if (t[f].is_zero()) continue;
    auto idx = t.unflatten(f);
    if (keep && !keep(idx)) continue;
    for (std::size_t r = 0; r < idx.size(); ++r) os << (r ? " " : "") << idx[r] + 1;
    os << " = " << t[f].to_string() << "\n";
  }
}

}  // namespace

BaseFManifold ModelFile::base() const {
  if (chart.k() != 0) throw InputError("expected a base model (empty fiber)");
  return BaseFManifold(chart, components.star, require_unit().beta);
}

const LinearVectorField& ModelFile::require_unit() const {
  if (!unit) throw InputError("model has no [unit] section");
  return *unit;
}

const LinearVectorField& ModelFile::candidate(const std::string& n) const {
  for (const auto& [key, f] : euler)
    if (key == n) return f;
  throw InputError("no Euler candidate named '" + n + "'");
}

ModelFile parse_model(std::istream& in, const std::string& source) {
  Parser p(source);
  std::vector<std::pair<std::string, int>> order;
  std::map<std::string, std::vector<Line>> sections;
  std::string current;
  int number = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++number;
    auto hash = raw.find('#');
    std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') p.fail(number, "unterminated section header");
      current = trim(text.substr(1, text.size() - 2));
      static const std::vector<std::string> known{"meta", "chart", "star", "l", "D", "unit", "connection", "gamma", "H"};
      if (std::find(known.begin(), known.end(), current) == known.end() && current.rfind("euler.", 0) != 0)
        p.fail(number, "unknown section [" + current + "]");
      if (current == "euler.") p.fail(number, "Euler candidate needs a name");
      if (sections.count(current)) p.fail(number, "duplicate section [" + current + "]");
      sections[current];
      order.emplace_back(current, number);
      continue;
    }
    if (current.empty()) p.fail(number, "entry outside of a section");
    sections[current].push_back(Line{number, text});
  }

  ModelFile m;
  for (const auto& l : sections["meta"]) {
    auto [key, value] = p.assignment(l);
    if (key == "name") m.name = value;
    else if (key == "description") m.description = value;
    else p.fail(l.number, "unknown meta key '" + key + "'");
  }
  if (!sections.count("chart")) throw InputError(source + ": missing [chart] section");
  std::vector<std::string> base, fiber;
  for (const auto& l : sections["chart"]) {
    auto [key, value] = p.assignment(l);
    if (key == "base") base = words(value);
    else if (key == "fiber") fiber = words(value);
    else p.fail(l.number, "unknown chart key '" + key + "'");
  }
  if (base.empty()) throw InputError(source + ": chart declares no base coordinates");
  try {
    m.chart = Chart(base, fiber);
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
  int n = m.chart.n(), k = m.chart.k();
  auto names = m.chart.all_names();
  auto base_names = m.chart.base_chart().all_names();
  m.components = MultComponents::zero(m.chart);

  auto fill = [&](const std::string& sec, const std::vector<int>& dims, const std::vector<std::string>& vars,
                  auto&& store) {
    for (const auto& l : sections[sec]) {
      auto [idx, text] = p.entry(l, dims);
      store(l, idx, p.expr(l, text, vars));
    }
  };
  fill("star", {n, n, n}, names, [&](const Line&, const std::vector<int>& i, RatFunc v) {
    m.components.star.at({i[1], i[2], i[0]}) = std::move(v);
  });
  fill("l", {n, k, k}, names, [&](const Line&, const std::vector<int>& i, RatFunc v) {
    m.components.l.at({i[0], i[1], i[2]}) = std::move(v);
  });
  fill("D", {n, n, k, k}, names, [&](const Line&, const std::vector<int>& i, RatFunc v) {
    m.components.D.at({i[0], i[1], i[2], i[3]}) = std::move(v);
  });
  try {
    m.components.validate();
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }

  if (sections.count("unit")) {
    int header = 0;
    for (const auto& [s, line] : order)
      if (s == "unit") header = line;
    m.unit = parse_field(p, m.chart, sections["unit"], header);
  }
  for (const auto& [s, line] : order)
    if (s.rfind("euler.", 0) == 0) m.euler.emplace_back(s.substr(6), parse_field(p, m.chart, sections[s], line));

  if (sections.count("connection")) {
    Table g({n, n, n});
    fill("connection", {n, n, n}, base_names,
         [&](const Line&, const std::vector<int>& i, RatFunc v) { g.at({i[1], i[2], i[0]}) = std::move(v); });
    m.connection = Connection(m.chart.base_chart(), g);
  }
  if (sections.count("gamma")) {
    Table g({n, n});
    fill("gamma", {n, n}, base_names, [&](const Line& l, const std::vector<int>& i, RatFunc v) {
      if (i[0] >= i[1]) p.fail(l.number, "two-form entries need i < j");
      g.at({i[1], i[0]}) = -v;
      g.at({i[0], i[1]}) = std::move(v);
    });
    m.gamma = TwoForm(m.chart.base_chart(), g);
  }
  if (sections.count("H")) {
    Table h({n, n, n});
    fill("H", {n, n, n}, base_names, [&](const Line& l, const std::vector<int>& i, RatFunc v) {
      if (!(i[0] < i[1] && i[1] < i[2])) p.fail(l.number, "three-form entries need i < j < k");
      int a = i[0], b = i[1], c = i[2];
      h.at({a, b, c}) = v;
      h.at({b, c, a}) = v;
      h.at({c, a, b}) = v;
      h.at({b, a, c}) = -v;
      h.at({a, c, b}) = -v;
      h.at({c, b, a}) = -v;
    });
    m.H = ThreeForm(m.chart.base_chart(), h);
  }
  return m;
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_model(in, path);
}

std::string save_model(const ModelFile& m) {
  std::ostringstream os;
  if (!m.name.empty() || !m.description.empty()) {
    os << "[meta]\n";
    if (!m.name.empty()) os << "name = " << m.name << "\n";
    if (!m.description.empty()) os << "description = " << m.description << "\n";
    os << "\n";
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& w : v) s += (s.empty() ? "" : " ") + w;
    return s;
  };
  os << "[chart]\nbase = " << join(m.chart.base_names()) << "\n";
  if (m.chart.k() > 0) os << "fiber = " << join(m.chart.fiber_names()) << "\n";
  // star is stored as at({i, j, a}) and written as "a i j"
  os << "\n[star]\n";
  const Table& s = m.components.star;
  for (std::size_t f = 0; f < s.size(); ++f) {
    if (s[f].is_zero()) continue;
    auto i = s.unflatten(f);
    os << i[2] + 1 << " " << i[0] + 1 << " " << i[1] + 1 << " = " << s[f].to_string() << "\n";
  }
  if (m.chart.k() > 0) {
    os << "\n[l]\n";
    write_entries(os, m.components.l);
    if (!m.components.D.is_zero()) {
      os << "\n[D]\n";
      write_entries(os, m.components.D);
    }
  }
  if (m.unit) {
    os << "\n[unit]\n";
    write_field(os, m.chart, *m.unit);
  }
  for (const auto& [key, f] : m.euler) {
    os << "\n[euler." << key << "]\n";
    write_field(os, m.chart, f);
  }
  if (m.connection) {
    os << "\n[connection]\n";
    const Table& g = m.connection->gamma;
    for (std::size_t f = 0; f < g.size(); ++f) {
      if (g[f].is_zero()) continue;
      auto i = g.unflatten(f);
      os << i[2] + 1 << " " << i[0] + 1 << " " << i[1] + 1 << " = " << g[f].to_string() << "\n";
    }
  }
  if (m.gamma) {
    os << "\n[gamma]\n";
    write_entries(os, m.gamma->g, [](const std::vector<int>& i) { return i[0] < i[1]; });
  }
  if (m.H) {
    os << "\n[H]\n";
    write_entries(os, m.H->h, [](const std::vector<int>& i) { return i[0] < i[1] && i[1] < i[2]; });
  }
  return os.str();
}

ModelFile make_model(std::string name, const MultComponents& c, const LinearVectorField& e) {
  ModelFile m;
  m.name = std::move(name);
  m.chart = c.chart;
  m.components = c;
  m.unit = e;
  return m;
}

}  // namespace fman
