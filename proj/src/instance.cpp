#include "milplab/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "milplab/errors.hpp"

namespace milplab {

namespace {

bool is_integral(double v) { return std::floor(v) == v; }

void fail(const std::string& msg) { throw InvariantError(msg); }

}  // namespace

void MilpInstance::validate() const {
  const int n = n_vars;
  const int m = n_cons;
  if (n <= 0) fail(name + ": no variables");
  if (static_cast<int>(objective.size()) != n || static_cast<int>(lower.size()) != n ||
      static_cast<int>(upper.size()) != n || static_cast<int>(is_integer.size()) != n)
    fail(name + ": variable array size mismatch");
  if (rows.rows() != m || static_cast<int>(rhs.size()) != m)
    fail(name + ": row array size mismatch");
  for (int j = 0; j < n; ++j) {
    if (!(lower[j] <= upper[j])) fail(name + ": lower > upper at var " + std::to_string(j));
    if (std::isnan(objective[j]) || std::isinf(objective[j]))
      fail(name + ": non-finite objective at var " + std::to_string(j));
    if (is_integer[j]) {
      if (std::isfinite(lower[j]) && !is_integral(lower[j]))
        fail(name + ": fractional lower bound on integer var " + std::to_string(j));
      if (std::isfinite(upper[j]) && !is_integral(upper[j]))
        fail(name + ": fractional upper bound on integer var " + std::to_string(j));
    }
  }
  for (int i = 0; i < m; ++i) {
    if (rows.row_size(i) < 1) fail(name + ": empty row " + std::to_string(i));
    if (!std::isfinite(rhs[i])) fail(name + ": non-finite rhs at row " + std::to_string(i));
    for (auto k = rows.begin(i); k < rows.end(i); ++k) {
      if (rows.col[k] < 0 || rows.col[k] >= n)
        fail(name + ": column index out of range in row " + std::to_string(i));
      if (k > rows.begin(i) && rows.col[k] <= rows.col[k - 1])
        fail(name + ": row " + std::to_string(i) + " not sorted by column");
      const double v = rows.val[k];
      if (!std::isfinite(v) || v == 0.0)
        fail(name + ": zero or non-finite coefficient in row " + std::to_string(i));
    }
  }
}

namespace {

// COO triplet builder that emits canonical CSR (rows in order, columns
// sorted, duplicates forbidden).
class RowBuilder {
 public:
  explicit RowBuilder(int n_vars) : n_vars_(n_vars) {}

  void add_row(std::vector<std::pair<int, double>> entries, double rhs) {
    std::sort(entries.begin(), entries.end());
    for (std::size_t k = 1; k < entries.size(); ++k)
      if (entries[k].first == entries[k - 1].first)
        throw InvariantError("duplicate column in generated row");
    starts_.push_back(static_cast<std::int64_t>(cols_.size()));
    for (auto& [c, v] : entries) {
      cols_.push_back(c);
      vals_.push_back(v);
    }
    rhs_.push_back(rhs);
  }

  void finish(MilpInstance& inst) {
    starts_.push_back(static_cast<std::int64_t>(cols_.size()));
    inst.n_cons = static_cast<int>(rhs_.size());
    inst.rows.row_start = std::move(starts_);
    inst.rows.col = std::move(cols_);
    inst.rows.val = std::move(vals_);
    inst.rhs = std::move(rhs_);
    inst.n_vars = n_vars_;
  }

 private:
  int n_vars_;
  std::vector<std::int64_t> starts_;
  std::vector<int> cols_;
  std::vector<double> vals_;
  std::vector<double> rhs_;
};

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void set_binary_vars(MilpInstance& inst, int n) {
  inst.lower.assign(n, 0.0);
  inst.upper.assign(n, 1.0);
  inst.is_integer.assign(n, 1);
}

}  // namespace

MilpInstance generate_set_cover(int rows, int cols, double density,
                                int max_cost, RngSeed seed) {
  if (rows < 1 || cols < rows) throw InvariantError("set_cover: need rows >= 1, cols >= rows");
  if (cols < 2) throw InvariantError("set_cover: coverage repair needs >= 2 columns");
  if (!(density > 0.0 && density <= 1.0)) throw InvariantError("set_cover: density in (0,1]");
  if (max_cost < 1) throw InvariantError("set_cover: max_cost >= 1");

  Rng rng(seed);
  // membership[i] = sorted columns covering row i
  std::vector<std::vector<int>> membership(rows);
  std::vector<int> col_degree(cols, 0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (rng.uniform() < density) {
        membership[i].push_back(j);
        ++col_degree[j];
      }
  // Repair pass 1: every column covers at least one row.
  for (int j = 0; j < cols; ++j)
    if (col_degree[j] == 0) {
      int i = static_cast<int>(rng.pick(static_cast<std::size_t>(rows)));
      membership[i].push_back(j);
      ++col_degree[j];
    }
  // Repair pass 2: every row covered by at least two columns.
  for (int i = 0; i < rows; ++i) {
    std::sort(membership[i].begin(), membership[i].end());
    while (static_cast<int>(membership[i].size()) < 2) {
      int j = static_cast<int>(rng.pick(static_cast<std::size_t>(cols)));
      if (!std::binary_search(membership[i].begin(), membership[i].end(), j)) {
        membership[i].insert(
            std::upper_bound(membership[i].begin(), membership[i].end(), j), j);
        ++col_degree[j];
      }
    }
  }

  MilpInstance inst;
  inst.name = "setcover_" + std::to_string(rows) + "x" + std::to_string(cols) +
              "_d" + format_g(density) + "_c" + std::to_string(max_cost) +
              "_s" + std::to_string(seed.value);
  RowBuilder rb(cols);
  for (int i = 0; i < rows; ++i) {
    std::vector<std::pair<int, double>> entries;
    entries.reserve(membership[i].size());
    for (int j : membership[i]) entries.emplace_back(j, -1.0);
    rb.add_row(std::move(entries), -1.0);  // cover row: -sum x_j <= -1
  }
  rb.finish(inst);
  inst.objective.resize(cols);
  for (int j = 0; j < cols; ++j)
    inst.objective[j] = static_cast<double>(rng.uniform_int(1, max_cost));
  set_binary_vars(inst, cols);
  inst.validate();
  return inst;
}

MilpInstance generate_cauction(int items, int bids, RngSeed seed,
                               const CauctionConfig& cfg) {
  if (items < 1 || bids < 1) throw InvariantError("cauction: need items >= 1, bids >= 1");

  Rng rng(seed);
  std::vector<double> common_value(items);
  for (auto& v : common_value) v = rng.uniform(cfg.value_lo, cfg.value_hi);
  // Symmetric item compatibility weights; diagonal zero.
  std::vector<double> compat(static_cast<std::size_t>(items) * items, 0.0);
  for (int a = 0; a < items; ++a)
    for (int b = a + 1; b < items; ++b)
      compat[static_cast<std::size_t>(a) * items + b] =
          compat[static_cast<std::size_t>(b) * items + a] = rng.uniform();

  // Bundles grown by weighted random walks over the compatibility matrix.
  std::vector<std::vector<int>> bundle(bids);
  std::vector<double> deviation(bids);
  const int cap = std::min(items, cfg.max_bundle);
  std::vector<double> weights(items);
  std::vector<std::uint8_t> in_bundle(items);
  for (int b = 0; b < bids; ++b) {
    std::fill(in_bundle.begin(), in_bundle.end(), 0);
    int start = static_cast<int>(rng.pick(static_cast<std::size_t>(items)));
    bundle[b].push_back(start);
    in_bundle[start] = 1;
    while (static_cast<int>(bundle[b].size()) < cap && rng.uniform() < cfg.add_prob) {
      double total = 0.0;
      for (int i = 0; i < items; ++i) {
        if (in_bundle[i]) {
          weights[i] = 0.0;
          continue;
        }
        double w = 0.0;
        for (int k : bundle[b]) w += compat[static_cast<std::size_t>(k) * items + i];
        weights[i] = w;
        total += w;
      }
      if (total <= 0.0) break;  // single-item universe
      bundle[b].push_back(static_cast<int>(rng.pick_weighted(weights)));
      in_bundle[bundle[b].back()] = 1;
    }
    std::sort(bundle[b].begin(), bundle[b].end());
    deviation[b] = rng.uniform(-cfg.price_dev, cfg.price_dev);
  }
  // Repair: every item must appear in at least one bid so each packing row
  // is nonempty.
  std::vector<int> item_count(items, 0);
  for (int b = 0; b < bids; ++b)
    for (int i : bundle[b]) ++item_count[i];
  for (int i = 0; i < items; ++i)
    if (item_count[i] == 0) {
      int b = static_cast<int>(rng.pick(static_cast<std::size_t>(bids)));
      bundle[b].insert(std::upper_bound(bundle[b].begin(), bundle[b].end(), i), i);
      ++item_count[i];
    }

  MilpInstance inst;
  inst.name = "cauction_" + std::to_string(items) + "x" + std::to_string(bids) +
              "_s" + std::to_string(seed.value);
  // Packing row per item over the bids containing it.
  std::vector<std::vector<int>> item_bids(items);
  for (int b = 0; b < bids; ++b)
    for (int i : bundle[b]) item_bids[i].push_back(b);
  RowBuilder rb(bids);
  for (int i = 0; i < items; ++i) {
    std::vector<std::pair<int, double>> entries;
    entries.reserve(item_bids[i].size());
    for (int b : item_bids[i]) entries.emplace_back(b, 1.0);
    rb.add_row(std::move(entries), 1.0);
  }
  rb.finish(inst);
  inst.objective.resize(bids);
  for (int b = 0; b < bids; ++b) {
    double price = 0.0;
    for (int i : bundle[b]) price += common_value[i];
    price *= 1.0 + deviation[b];
    inst.objective[b] = -price;  // maximization negated into min form
  }
  set_binary_vars(inst, bids);
  inst.validate();
  return inst;
}

MilpInstance generate_cfl(int customers, int facilities, double ratio,
                          RngSeed seed, const CflConfig& cfg) {
  if (customers < 1 || facilities < 1)
    throw InvariantError("cfl: need customers >= 1, facilities >= 1");
  if (!(ratio > 0.0)) throw InvariantError("cfl: ratio > 0");

  Rng rng(seed);
  std::vector<double> cx(customers), cy(customers), fx(facilities), fy(facilities);
  for (int j = 0; j < customers; ++j) {
    cx[j] = rng.uniform();
    cy[j] = rng.uniform();
  }
  for (int k = 0; k < facilities; ++k) {
    fx[k] = rng.uniform();
    fy[k] = rng.uniform();
  }
  std::vector<double> demand(customers), capacity(facilities), fixed(facilities);
  double total_demand = 0.0, total_cap = 0.0;
  for (int j = 0; j < customers; ++j) {
    demand[j] = static_cast<double>(rng.uniform_int(cfg.demand_lo, cfg.demand_hi));
    total_demand += demand[j];
  }
  for (int k = 0; k < facilities; ++k) {
    capacity[k] = rng.uniform(cfg.cap_lo, cfg.cap_hi);
    total_cap += capacity[k];
  }
  const double scale = ratio * total_demand / total_cap;
  for (int k = 0; k < facilities; ++k) {
    capacity[k] *= scale;
    fixed[k] = rng.uniform(cfg.fixed_lo, cfg.fixed_hi) * std::sqrt(capacity[k]);
  }

  // Columns: y_0..y_{F-1} (binary open flags), then x_{jk} (fraction of
  // customer j served by facility k), j-major.
  const int n = facilities + customers * facilities;
  auto xcol = [&](int j, int k) { return facilities + j * facilities + k; };

  MilpInstance inst;
  inst.name = "cfl_" + std::to_string(customers) + "x" + std::to_string(facilities) +
              "_r" + format_g(ratio) + "_s" + std::to_string(seed.value);
  RowBuilder rb(n);
  // Demand satisfaction: sum_k x_jk == 1, as a <= pair.
  for (int j = 0; j < customers; ++j) {
    std::vector<std::pair<int, double>> le, ge;
    for (int k = 0; k < facilities; ++k) {
      le.emplace_back(xcol(j, k), 1.0);
      ge.emplace_back(xcol(j, k), -1.0);
    }
    rb.add_row(std::move(le), 1.0);
    rb.add_row(std::move(ge), -1.0);
  }
  // Capacity: sum_j d_j x_jk - cap_k y_k <= 0.
  for (int k = 0; k < facilities; ++k) {
    std::vector<std::pair<int, double>> entries;
    entries.emplace_back(k, -capacity[k]);
    for (int j = 0; j < customers; ++j) entries.emplace_back(xcol(j, k), demand[j]);
    rb.add_row(std::move(entries), 0.0);
  }
  // Linking: x_jk - y_k <= 0.
  for (int j = 0; j < customers; ++j)
    for (int k = 0; k < facilities; ++k)
      rb.add_row({{k, -1.0}, {xcol(j, k), 1.0}}, 0.0);
  rb.finish(inst);

  inst.objective.assign(n, 0.0);
  for (int k = 0; k < facilities; ++k) inst.objective[k] = fixed[k];
  for (int j = 0; j < customers; ++j)
    for (int k = 0; k < facilities; ++k) {
      const double dx = cx[j] - fx[k], dy = cy[j] - fy[k];
      inst.objective[xcol(j, k)] = cfg.transport_scale * std::sqrt(dx * dx + dy * dy);
    }
  inst.lower.assign(n, 0.0);
  inst.upper.assign(n, 1.0);
  inst.is_integer.assign(n, 0);
  for (int k = 0; k < facilities; ++k) inst.is_integer[k] = 1;
  inst.validate();
  return inst;
}

MilpInstance generate_indset(int nodes, int affinity, RngSeed seed) {
  if (!(nodes > affinity && affinity >= 1))
    throw InvariantError("indset: need nodes > affinity >= 1");

  Rng rng(seed);
  // Preferential attachment: the first `affinity` nodes form a clique; each
  // later node attaches to `affinity` distinct existing nodes sampled with
  // probability proportional to degree + 1.
  std::vector<std::vector<int>> adj(nodes);
  std::vector<std::pair<int, int>> edges;
  auto add_edge = [&](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
    edges.emplace_back(std::min(a, b), std::max(a, b));
  };
  for (int v = 1; v < affinity; ++v)
    for (int u = 0; u < v; ++u) add_edge(u, v);
  std::vector<double> weights;
  for (int v = affinity; v < nodes; ++v) {
    weights.assign(static_cast<std::size_t>(v), 0.0);
    for (int u = 0; u < v; ++u) weights[u] = static_cast<double>(adj[u].size()) + 1.0;
    int added = 0;
    while (added < affinity) {
      int u = static_cast<int>(rng.pick_weighted(weights));
      if (weights[u] == 0.0) continue;
      weights[u] = 0.0;  // distinct targets
      add_edge(u, v);
      ++added;
    }
  }

  // Greedy maximal-clique edge cover: one packing row per clique.
  for (auto& a : adj) std::sort(a.begin(), a.end());
  auto adjacent = [&](int a, int b) {
    return std::binary_search(adj[a].begin(), adj[a].end(), b);
  };
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<std::uint8_t> covered(edges.size(), 0);
  std::vector<std::vector<int>> cliques;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (covered[e]) continue;
    std::vector<int> clique = {edges[e].first, edges[e].second};
    // Extend to a maximal clique, scanning candidate vertices in index order.
    for (int v = 0; v < nodes; ++v) {
      if (v == edges[e].first || v == edges[e].second) continue;
      bool ok = true;
      for (int u : clique)
        if (!adjacent(u, v)) {
          ok = false;
          break;
        }
      if (ok) clique.push_back(v);
    }
    std::sort(clique.begin(), clique.end());
    // Mark all edges inside the clique as covered.
    for (std::size_t a = 0; a < clique.size(); ++a)
      for (std::size_t b = a + 1; b < clique.size(); ++b) {
        auto it = std::lower_bound(edges.begin(), edges.end(),
                                   std::make_pair(clique[a], clique[b]));
        if (it != edges.end() && *it == std::make_pair(clique[a], clique[b]))
          covered[static_cast<std::size_t>(it - edges.begin())] = 1;
      }
    cliques.push_back(std::move(clique));
  }

  MilpInstance inst;
  inst.name = "indset_" + std::to_string(nodes) + "_a" + std::to_string(affinity) +
              "_s" + std::to_string(seed.value);
  RowBuilder rb(nodes);
  for (const auto& clique : cliques) {
    std::vector<std::pair<int, double>> entries;
    entries.reserve(clique.size());
    for (int v : clique) entries.emplace_back(v, 1.0);
    rb.add_row(std::move(entries), 1.0);
  }
  rb.finish(inst);
  inst.objective.assign(nodes, -1.0);  // max |S| negated into min form
  set_binary_vars(inst, nodes);
  inst.validate();
  return inst;
}

// ---------------------------------------------------------------------------
// Text format. Reals are written as C hexadecimal float literals so the
// round trip is bit-exact; +-infinity spelled "inf"/"-inf".

namespace {

constexpr const char* kMagic = "milplab instance 1";

std::string hexf(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_real(const std::string& tok, int line_no) {
  if (tok == "inf") return kInf;
  if (tok == "-inf") return -kInf;
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw IoError("instance parse error at line " + std::to_string(line_no) +
                  ": bad real '" + tok + "'");
  return v;
}

}  // namespace

std::string instance_to_string(const MilpInstance& inst) {
  std::ostringstream out;
  out << kMagic << "\n";
  out << "name " << inst.name << "\n";
  out << "dims " << inst.n_vars << " " << inst.n_cons << "\n";
  auto emit_reals = [&](const char* key, const std::vector<double>& v) {
    out << key;
    for (double x : v) out << " " << hexf(x);
    out << "\n";
  };
  emit_reals("objective", inst.objective);
  emit_reals("lower", inst.lower);
  emit_reals("upper", inst.upper);
  out << "integer";
  for (auto f : inst.is_integer) out << " " << (f ? 1 : 0);
  out << "\n";
  emit_reals("rhs", inst.rhs);
  for (int i = 0; i < inst.n_cons; ++i) {
    out << "row " << inst.rows.row_size(i);
    for (auto k = inst.rows.begin(i); k < inst.rows.end(i); ++k)
      out << " " << inst.rows.col[k] << " " << hexf(inst.rows.val[k]);
    out << "\n";
  }
  return out.str();
}

MilpInstance instance_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line))
      throw IoError("instance parse error: unexpected end of file after line " +
                    std::to_string(line_no));
    ++line_no;
  };
  next_line();
  if (line != kMagic) throw IoError("instance format/version mismatch: '" + line + "'");

  MilpInstance inst;
  next_line();
  if (line.rfind("name ", 0) != 0) throw IoError("instance parse error: expected name");
  inst.name = line.substr(5);
  next_line();
  {
    std::istringstream ls(line);
    std::string key;
    ls >> key >> inst.n_vars >> inst.n_cons;
    if (key != "dims" || ls.fail())
      throw IoError("instance parse error at line " + std::to_string(line_no) + ": dims");
  }
  auto read_reals = [&](const char* key, std::vector<double>& v, int count) {
    next_line();
    std::istringstream ls(line);
    std::string k, tok;
    ls >> k;
    if (k != key)
      throw IoError("instance parse error at line " + std::to_string(line_no) +
                    ": expected '" + key + "'");
    v.clear();
    v.reserve(static_cast<std::size_t>(count));
    while (ls >> tok) v.push_back(parse_real(tok, line_no));
    if (static_cast<int>(v.size()) != count)
      throw IoError("instance parse error at line " + std::to_string(line_no) +
                    ": expected " + std::to_string(count) + " values for " + key);
  };
  read_reals("objective", inst.objective, inst.n_vars);
  read_reals("lower", inst.lower, inst.n_vars);
  read_reals("upper", inst.upper, inst.n_vars);
  {
    next_line();
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != "integer")
      throw IoError("instance parse error at line " + std::to_string(line_no) + ": integer");
    int flag;
    while (ls >> flag) inst.is_integer.push_back(static_cast<std::uint8_t>(flag != 0));
    if (static_cast<int>(inst.is_integer.size()) != inst.n_vars)
      throw IoError("instance parse error at line " + std::to_string(line_no) +
                    ": integer flag count");
  }
  read_reals("rhs", inst.rhs, inst.n_cons);
  inst.rows.row_start.push_back(0);
  for (int i = 0; i < inst.n_cons; ++i) {
    next_line();
    std::istringstream ls(line);
    std::string k, tok;
    int nnz;
    ls >> k >> nnz;
    if (k != "row" || ls.fail())
      throw IoError("instance parse error at line " + std::to_string(line_no) + ": row");
    for (int t = 0; t < nnz; ++t) {
      int col;
      if (!(ls >> col >> tok))
        throw IoError("instance parse error at line " + std::to_string(line_no) +
                      ": truncated row record");
      inst.rows.col.push_back(col);
      inst.rows.val.push_back(parse_real(tok, line_no));
    }
    inst.rows.row_start.push_back(static_cast<std::int64_t>(inst.rows.col.size()));
  }
  inst.validate();
  return inst;
}

void save_instance(const MilpInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  out << instance_to_string(inst);
  if (!out) throw IoError("write failed: " + path);
}

MilpInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for read: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return instance_from_string(buf.str());
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace milplab
