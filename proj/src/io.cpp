#include "mclp/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace mclp {

namespace {

using nlohmann::json;

std::string position(const std::string& text, size_t offset) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// Offset of the first occurrence of "key" at or after `from`; falls back to `from`.
size_t key_offset(const std::string& text, const std::string& key, size_t from = 0) {
  size_t p = text.find("\"" + key + "\"", from);
  return p == std::string::npos ? from : p;
}

class Reader {
 public:
  Reader(const std::string& text, size_t base) : text_(text), base_(base) {}

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ParseError(position(text_, key_offset(text_, key, base_)) + ": " + key + ": " + msg);
  }

  Rational rational(const json& v, const std::string& key) const {
    try {
      if (v.is_string()) return Rational::parse(v.get<std::string>());
      if (v.is_number_integer()) return Rational(v.get<long>());
      if (v.is_number_unsigned()) return Rational::parse(std::to_string(v.get<unsigned long>()));
    } catch (const std::exception& e) {
      fail(key, e.what());
    }
    fail(key, "expected an integer or a \"p/q\" string");
  }

  const json& field(const json& obj, const std::string& key) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(key, "missing");
    return *it;
  }

  RatVector vector(const json& obj, const std::string& key, size_t n) const {
    const json& v = field(obj, key);
    if (!v.is_array() || v.size() != n) fail(key, "expected an array of length " + std::to_string(n));
    RatVector out;
    for (const auto& x : v) out.push_back(rational(x, key));
    return out;
  }

  size_t count(const json& obj, const std::string& key) const {
    const json& v = field(obj, key);
    if (!v.is_number_integer() || v.get<long>() < 1) fail(key, "expected a positive integer");
    return v.get<size_t>();
  }

  BoundaryParams params(const json& obj, size_t K, size_t J) const {
    BoundaryParams r;
    r.beta = vector(obj, "beta", K);
    r.gamma = vector(obj, "gamma", J);
    r.T = rational(field(obj, "T"), "T");
    r.lambda = vector(obj, "lambda", K);
    r.mu = vector(obj, "mu", J);
    return r;
  }

 private:
  const std::string& text_;
  size_t base_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    auto p = msg.find("- ");
    throw ParseError(position(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                     (p == std::string::npos ? msg : msg.substr(p + 2)));
  }
}

json rat(const Rational& r) {
  if (r.is_integer() && r.num().fits_slong_p()) return r.num().get_si();
  return r.str();
}

json vec(const RatVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(rat(x));
  return a;
}

void put_params(json& j, const BoundaryParams& r) {
  j["beta"] = vec(r.beta);
  j["gamma"] = vec(r.gamma);
  j["T"] = rat(r.T);
  j["lambda"] = vec(r.lambda);
  j["mu"] = vec(r.mu);
}

std::string vtext(const RatVector& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].str();
  return s + ")";
}

std::string fmt(const Rational& r) {
  std::ostringstream os;
  os.precision(12);
  os << r.to_double();
  return os.str();
}

struct SeqParser {
  const std::string& s;
  size_t i = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("base sequence, column " + std::to_string(i + 1) + ": " + what);
  }
  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool peek(char c) {
    ws();
    return i < s.size() && s[i] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++i;
  }
  IndexSet set() {
    IndexSet out;
    expect('{');
    if (peek('}')) {
      ++i;
      return out;
    }
    while (true) {
      ws();
      size_t start = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (start == i) fail("expected an index");
      long v = std::stol(s.substr(start, i - start));
      if (v < 1) fail("indices are 1-based");
      out.insert(static_cast<size_t>(v - 1));
      if (peek('}')) {
        ++i;
        return out;
      }
      expect(',');
    }
  }
  std::pair<IndexSet, IndexSet> pair() {
    expect('(');
    IndexSet a = set();
    expect(',');
    IndexSet b = set();
    expect(')');
    return {a, b};
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<size_t> kept_indices(const SolutionH& H) {
  std::vector<size_t> keep = {0};
  for (size_t n = 1; n <= H.layout.N(); ++n)
    if (H.tau(n).sign() > 0) keep.push_back(n);
  return keep;
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
  json j = parse_json(text);
  Reader rd(text, 0);
  if (!j.is_object()) throw ParseError(position(text, 0) + ": expected an object");
  ProblemFile p;
  p.data.K = rd.count(j, "K");
  p.data.J = rd.count(j, "J");
  const size_t K = p.data.K, J = p.data.J;
  const json& A = rd.field(j, "A");
  if (!A.is_array() || A.size() != K) rd.fail("A", "expected " + std::to_string(K) + " rows");
  p.data.A = RatMatrix(K, J);
  for (size_t k = 0; k < K; ++k) {
    if (!A[k].is_array() || A[k].size() != J) rd.fail("A", "row " + std::to_string(k + 1) + " needs " +
                                                          std::to_string(J) + " entries");
    for (size_t jj = 0; jj < J; ++jj) p.data.A(k, jj) = rd.rational(A[k][jj], "A");
  }
  p.data.b = rd.vector(j, "b", K);
  p.data.c = rd.vector(j, "c", J);
  p.rho = rd.params(j, K, J);
  if (auto it = j.find("initial"); it != j.end()) {
    Reader ri(text, key_offset(text, "initial"));
    p.initial = ri.params(*it, K, J);
  }
  return p;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

BoundaryParams parse_params_file(const std::string& text, size_t K, size_t J) {
  json j = parse_json(text);
  Reader rd(text, 0);
  // A full problem file may be given; its "initial" block wins over the goal fields.
  if (auto it = j.find("initial"); it != j.end())
    return Reader(text, key_offset(text, "initial")).params(*it, K, J);
  return rd.params(j, K, J);
}

std::string write_problem(const ProblemFile& p) {
  json j;
  j["K"] = p.data.K;
  j["J"] = p.data.J;
  json A = json::array();
  for (size_t k = 0; k < p.data.K; ++k) {
    RatVector row;
    for (size_t jj = 0; jj < p.data.J; ++jj) row.push_back(p.data.A(k, jj));
    A.push_back(vec(row));
  }
  j["A"] = A;
  j["b"] = vec(p.data.b);
  j["c"] = vec(p.data.c);
  put_params(j, p.rho);
  if (p.initial) {
    json ini;
    put_params(ini, *p.initial);
    j["initial"] = ini;
  }
  return j.dump(2) + "\n";
}

BaseSequence parse_sequence(const std::string& text) {
  SeqParser p{text};
  BaseSequence seq;
  std::tie(seq.K0, seq.J0) = p.pair();
  p.expect('[');
  while (!p.peek(']')) {
    auto [k, j] = p.pair();
    seq.bases.push_back({k, j});
  }
  p.expect(']');
  std::tie(seq.KN1, seq.JN1) = p.pair();
  p.ws();
  if (p.i != text.size()) p.fail("trailing characters");
  return seq;
}

std::string write_trace(const std::vector<IterationRecord>& trace) {
  std::ostringstream os;
  os << "# mclp trace\n";
  for (const auto& r : trace) {
    std::string shrink;
    for (size_t i = 0; i < r.shrinking.size(); ++i) shrink += (i ? "," : "") + r.shrinking[i];
    os << "ell=" << r.ell << "\tline=" << r.line << "\ttheta=" << r.theta
       << "\ttheta_bar=" << (r.theta_bar ? r.theta_bar->str() : "inf")
       << "\tv=" << (r.vkind ? to_string(*r.vkind) : "-") << "\tw=" << (r.wkind ? to_string(*r.wkind) : "-")
       << "\tpivot=" << to_string(r.pivot) << "\tshrinking=" << shrink << "\tobjective=" << r.objective
       << "\tratio=" << (r.ratio ? r.ratio->str() : "-") << "\tseq=" << to_string(r.seq) << "\tnote=" << r.note
       << "\n";
  }
  return os.str();
}

std::vector<IterationRecord> parse_trace(const std::string& text) {
  std::vector<IterationRecord> out;
  size_t lineno = 0;
  for (const auto& line : split(text, '\n')) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::map<std::string, std::string> f;
    for (const auto& part : split(line, '\t')) {
      auto eq = part.find('=');
      if (eq == std::string::npos) throw ParseError("trace line " + std::to_string(lineno) + ": bad field");
      f[part.substr(0, eq)] = part.substr(eq + 1);
    }
    auto get = [&](const std::string& k) -> const std::string& {
      auto it = f.find(k);
      if (it == f.end()) throw ParseError("trace line " + std::to_string(lineno) + ": missing " + k);
      return it->second;
    };
    IterationRecord r;
    r.ell = std::stoul(get("ell"));
    r.line = std::stoul(get("line"));
    r.theta = Rational::parse(get("theta"));
    if (get("theta_bar") != "inf") r.theta_bar = Rational::parse(get("theta_bar"));
    if (get("v") != "-") r.vkind = collision_kind_from_string(get("v"));
    if (get("w") != "-") r.wkind = collision_kind_from_string(get("w"));
    const std::string& pk = get("pivot");
    for (auto k : {PivotKind::None, PivotKind::Internal, PivotKind::TypeI, PivotKind::TypeII})
      if (pk == to_string(k)) r.pivot = k;
    if (!get("shrinking").empty()) r.shrinking = split(get("shrinking"), ',');
    r.objective = Rational::parse(get("objective"));
    if (get("ratio") != "-") r.ratio = Rational::parse(get("ratio"));
    r.seq = parse_sequence(get("seq"));
    r.note = get("note");
    out.push_back(r);
  }
  return out;
}

CompactSolution compact(const ProblemData& d, const SolveResult& res) {
  const SolutionH& H = res.H;
  CompactSolution c;
  const RatVector times = H.times();
  for (size_t n : kept_indices(H)) {
    c.breakpoints.push_back(times[n]);
    c.x.push_back(H.x_at(n));
    c.q.push_back(H.q_at(n));
    if (n > 0) {
      c.bases.push_back(res.seq.bases[n - 1]);
      c.rates.push_back(res.rates[n - 1]);
    }
  }
  c.u0 = H.block(HBlock::U0);
  c.uN = H.block(HBlock::UN);
  c.p0 = H.block(HBlock::P0);
  c.pN = H.block(HBlock::PN);
  c.value = objectives(d, res.rates, H, res.goal);
  return c;
}

std::string format_report(const ProblemData& d, const SolveResult& res) {
  std::ostringstream os;
  os << "status: " << to_string(res.status) << "\n";
  os << "restarts: " << res.restarts << "\n";
  os << "iterations: " << res.trace.size() << "\n";
  if (res.status != SolveStatus::Optimal) {
    if (!res.message.empty()) os << "message: " << res.message << "\n";
    return os.str();
  }
  CompactSolution c = compact(d, res);
  const SolutionH& H = res.H;
  os << "base sequence: " << to_string(res.seq) << "\n";
  os << "intervals: " << c.rates.size() << "\n";
  os << "breakpoints: " << vtext(c.breakpoints) << "\n";
  RatVector tau;
  for (size_t n = 1; n < c.breakpoints.size(); ++n) tau.push_back(c.breakpoints[n] - c.breakpoints[n - 1]);
  os << "tau: " << vtext(tau) << "\n";
  os << "u0: " << vtext(c.u0) << "\n";
  os << "uN: " << vtext(c.uN) << "\n";
  os << "p0: " << vtext(c.p0) << "\n";
  os << "pN: " << vtext(c.pN) << "\n";
  for (size_t n = 0; n < c.rates.size(); ++n) {
    os << "interval " << n + 1 << ": basis " << to_string(c.bases[n]) << " u=" << vtext(c.rates[n].u)
       << " p=" << vtext(c.rates[n].p) << " xdot=" << vtext(c.rates[n].xdot) << " qdot=" << vtext(c.rates[n].qdot)
       << "\n";
  }
  for (size_t n = 0; n < c.x.size(); ++n) os << "x(" << c.breakpoints[n] << "): " << vtext(c.x[n]) << "\n";
  os << "xN: " << vtext(H.block(HBlock::XN)) << "\n";
  for (size_t n = 0; n < c.q.size(); ++n) os << "q(" << c.breakpoints[n] << "): " << vtext(c.q[n]) << "\n";
  os << "q0: " << vtext(H.block(HBlock::Q0)) << "\n";
  os << "primal objective: " << c.value.primal << "\n";
  os << "dual objective: " << c.value.dual << "\n";
  return os.str();
}

std::vector<SampleRow> sample_solution(const ProblemData& d, const SolveResult& res, size_t samples) {
  RatVector times = res.H.times();
  const Rational T = times.back();
  for (size_t i = 0; samples > 0 && i <= samples; ++i) times.push_back(T * Rational(static_cast<long>(i)) /
                                                                       Rational(static_cast<long>(samples)));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  auto nonzero = [](const RatVector& v) {
    return std::any_of(v.begin(), v.end(), [](const Rational& x) { return !x.is_zero(); });
  };
  const bool at0 = nonzero(res.H.block(HBlock::U0)) || nonzero(res.H.block(HBlock::P0));
  const bool atT = nonzero(res.H.block(HBlock::UN)) || nonzero(res.H.block(HBlock::PN));
  std::vector<SampleRow> rows;
  for (const auto& t : times) {
    SampleRow r{t, evaluate(d, res.seq, res.rates, res.H, t), false};
    r.impulse = (t.is_zero() && at0) || (t == T && atT);
    rows.push_back(r);
  }
  return rows;
}

std::string write_csv(const ProblemData& d, const std::vector<SampleRow>& rows) {
  std::ostringstream os;
  os << "t";
  for (size_t k = 0; k < d.K; ++k) os << ",x_" << k + 1;
  for (size_t j = 0; j < d.J; ++j) os << ",q_" << j + 1;
  for (size_t j = 0; j < d.J; ++j) os << ",u_" << j + 1;
  for (size_t k = 0; k < d.K; ++k) os << ",p_" << k + 1;
  os << ",impulse_flag\n";
  for (const auto& r : rows) {
    os << fmt(r.t);
    for (const auto* v : {&r.e.x, &r.e.q, &r.e.U, &r.e.P})
      for (const auto& x : *v) os << "," << fmt(x);
    os << "," << (r.impulse ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string write_svg(const ProblemData& d, const SolveResult& res) {
  CompactSolution c = compact(d, res);
  const SolutionH& H = res.H;
  const double W = 720, Hh = 480, pad = 40;
  const double T = c.breakpoints.back().to_double();
  double top = 1e-9, bottom = 1e-9;
  for (const auto& v : c.x)
    for (const auto& x : v) top = std::max(top, x.to_double());
  for (const auto& x : H.block(HBlock::XN)) top = std::max(top, x.to_double());
  for (const auto& v : c.q)
    for (const auto& x : v) bottom = std::max(bottom, x.to_double());
  for (const auto& x : H.block(HBlock::Q0)) bottom = std::max(bottom, x.to_double());
  const double axis = pad + (Hh - 2 * pad) * top / (top + bottom);
  const double scale = (Hh - 2 * pad) / (top + bottom);
  auto px = [&](double t) { return pad + (W - 2 * pad) * t / T; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << axis << "\" x2=\"" << W - pad << "\" y2=\"" << axis
     << "\" stroke=\"black\"/>\n";
  for (const auto& t : c.breakpoints)
    os << "<line x1=\"" << px(t.to_double()) << "\" y1=\"" << pad << "\" x2=\"" << px(t.to_double()) << "\" y2=\""
       << Hh - pad << "\" stroke=\"#ccc\" stroke-dasharray=\"4 4\"/>\n";
  auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const char* color, const std::string& label) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [t, y] : pts) os << px(t) << "," << y << " ";
    os << "\"><title>" << label << "</title></polyline>\n";
  };
  for (size_t k = 0; k < d.K; ++k) {
    std::vector<std::pair<double, double>> pts;
    for (size_t n = 0; n < c.x.size(); ++n)
      pts.push_back({c.breakpoints[n].to_double(), axis - scale * c.x[n][k].to_double()});
    pts.push_back({T, axis - scale * H.block(HBlock::XN)[k].to_double()});
    polyline(pts, colors[k % 6], "x_" + std::to_string(k + 1));
  }
  for (size_t j = 0; j < d.J; ++j) {
    std::vector<std::pair<double, double>> pts;
    pts.push_back({0, axis + scale * H.block(HBlock::Q0)[j].to_double()});
    for (size_t n = 0; n < c.q.size(); ++n)
      pts.push_back({c.breakpoints[n].to_double(), axis + scale * c.q[n][j].to_double()});
    polyline(pts, colors[(d.K + j) % 6], "q_" + std::to_string(j + 1));
  }
  os << "</svg>\n";
  return os.str();
}

RatVector uniform_grid(const Rational& T, size_t n) {
  if (n == 0) throw std::invalid_argument("grid needs at least one step");
  RatVector g;
  for (size_t i = 0; i <= n; ++i) g.push_back(T * Rational(static_cast<long>(i)) / Rational(static_cast<long>(n)));
  return g;
}

RatVector breakpoint_grid(const SolveResult& res) {
  RatVector t = res.H.times();
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

OracleResult oracle(const ProblemData& d, const BoundaryParams& rho, const RatVector& grid) {
  const size_t K = d.K, J = d.J;
  const Rational& T = rho.T;
  if (grid.size() < 2 || !grid.front().is_zero() || grid.back() != T)
    throw std::invalid_argument("grid must run from 0 to T");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i - 1] < grid[i])) throw std::invalid_argument("grid must be strictly increasing");
  const size_t n = grid.size() - 1;
  // Variables: u0, then rates r_1..r_n, then uN; J each.
  const size_t nv = J * (n + 2);
  auto u0 = [&](size_t j) { return j; };
  auto r = [&](size_t i, size_t j) { return J * i + j; };  // i = 1..n
  auto uN = [&](size_t j) { return J * (n + 1) + j; };

  LpInstance lp;
  lp.sense = Sense::Max;
  lp.objective.assign(nv, Rational());
  for (size_t j = 0; j < J; ++j) {
    lp.objective[u0(j)] = rho.mu[j] + rho.gamma[j] + d.c[j] * T;
    lp.objective[uN(j)] = rho.gamma[j];
    for (size_t i = 1; i <= n; ++i) {
      const Rational a = T - grid[i - 1], b = T - grid[i];
      lp.objective[r(i, j)] = rho.gamma[j] * (grid[i] - grid[i - 1]) + d.c[j] * (a * a - b * b) / 2;
    }
  }
  // A U(s_i) <= beta + b s_i for i = 0..n (the last one is U(T-)), then the jump condition at T.
  const size_t rows = K * (n + 2);
  lp.matrix = RatMatrix(rows, nv);
  for (size_t i = 0; i <= n + 1; ++i)
    for (size_t k = 0; k < K; ++k) {
      const size_t row = K * i + k;
      const size_t upto = std::min(i, n);
      for (size_t j = 0; j < J; ++j) {
        lp.matrix(row, u0(j)) = d.A(k, j);
        for (size_t m = 1; m <= upto; ++m) lp.matrix(row, r(m, j)) = d.A(k, j) * (grid[m] - grid[m - 1]);
        if (i == n + 1) lp.matrix(row, uN(j)) = d.A(k, j);
      }
      lp.rhs.push_back(rho.beta[k] + d.b[k] * grid[upto] + (i == n + 1 ? rho.lambda[k] : Rational()));
      lp.relations.push_back(Relation::LE);
    }
  lp.classes.assign(nv, SignClass::P);
  LpOutcome out = solve_lp(lp);
  return {out.status, out.objective};
}

}  // namespace mclp
