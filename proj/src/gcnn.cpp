#include "milplab/gcnn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

#include "milplab/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "model/shard formats assume a little-endian host");

namespace milplab {

namespace {

using Mat = Eigen::MatrixXd;
using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

RowMajorMap map_w(const Dense2& d) { return RowMajorMap(d.data.data(), d.rows, d.cols); }

Eigen::Map<const Eigen::VectorXd> map_v(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct MlpCache {
  Mat x;     // input
  Mat hpre;  // pre-activation hidden
  Mat h;     // relu(hpre)
};

Mat mlp_apply(const Mlp2& m, Mat x, MlpCache* cache) {
  Mat hpre = (x * map_w(m.w1)).rowwise() + map_v(m.b1).transpose();
  Mat h = hpre.cwiseMax(0.0);
  Mat y = (h * map_w(m.w2)).rowwise() + map_v(m.b2).transpose();
  if (cache) {
    cache->x = std::move(x);
    cache->hpre = std::move(hpre);
    cache->h = std::move(h);
  }
  return y;
}

void add_to(std::vector<double>& dst, const Mat& src_rowmajor_view) {
  // src is (rows x cols); dst stores row-major
  const int r = static_cast<int>(src_rowmajor_view.rows());
  const int c = static_cast<int>(src_rowmajor_view.cols());
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) dst[static_cast<std::size_t>(i) * c + j] += src_rowmajor_view(i, j);
}

void add_vec(std::vector<double>& dst, const Eigen::RowVectorXd& v) {
  for (int j = 0; j < v.size(); ++j) dst[j] += v[j];
}

// Backprop through one MLP; accumulates parameter grads, returns dX.
Mat mlp_backprop(const Mlp2& m, const MlpCache& c, const Mat& dy, Mlp2& g) {
  add_to(g.w2.data, c.h.transpose() * dy);
  add_vec(g.b2, dy.colwise().sum());
  Mat dh = dy * map_w(m.w2).transpose();
  dh = (c.hpre.array() > 0.0).select(dh, 0.0);
  add_to(g.w1.data, c.x.transpose() * dh);
  add_vec(g.b1, dh.colwise().sum());
  return dh * map_w(m.w1).transpose();
}

struct ForwardCache {
  MlpCache embc, embv, gc, fc, gv, fv, head;
  Mat c0, v0, s_raw, c1, t_raw;
  std::vector<int> row_deg, col_deg;
  std::vector<double> probs;
};

void aggregate_post(const Prenorm& pre, ConvMode mode, const std::vector<int>& deg, Mat& s) {
  if (mode == ConvMode::kMean) {
    for (int i = 0; i < s.rows(); ++i) s.row(i) /= std::max(deg[i], 1);
  } else if (mode == ConvMode::kSumPrenorm) {
    s.rowwise() -= map_v(pre.beta).transpose();
    s *= map_v(pre.sigma).cwiseInverse().asDiagonal();
  }
}

void aggregate_back(const Prenorm& pre, ConvMode mode, const std::vector<int>& deg, Mat& ds) {
  if (mode == ConvMode::kMean) {
    for (int i = 0; i < ds.rows(); ++i) ds.row(i) /= std::max(deg[i], 1);
  } else if (mode == ConvMode::kSumPrenorm) {
    ds *= map_v(pre.sigma).cwiseInverse().asDiagonal();
  }
}

// Full pipeline up to logits; fills the cache for the backward pass.
Eigen::VectorXd run_forward(const BipartiteState& st, const GcnnParams& p, ForwardCache& c,
                            bool stop_after_s_raw = false, bool stop_after_t_raw = false) {
  const int w = p.width;
  const int m = st.m, n = st.n;
  const int ne = static_cast<int>(st.edges.size());
  if (m * BipartiteState::kConsFeats != static_cast<int>(st.cons_feats.size()) ||
      n * BipartiteState::kVarFeats != static_cast<int>(st.var_feats.size()))
    throw InvariantError("forward: state feature shape mismatch");
  if (p.embed_c.in() != BipartiteState::kConsFeats || p.embed_v.in() != BipartiteState::kVarFeats)
    throw InvariantError("forward: model dimensions do not match the state encoding");

  c.row_deg.assign(static_cast<std::size_t>(m), 0);
  c.col_deg.assign(static_cast<std::size_t>(n), 0);
  for (const auto& e : st.edges) {
    ++c.row_deg[e.row];
    ++c.col_deg[e.col];
  }

  Mat cons = RowMajorMap(st.cons_feats.data(), m, BipartiteState::kConsFeats);
  Mat vars = RowMajorMap(st.var_feats.data(), n, BipartiteState::kVarFeats);
  c.c0 = mlp_apply(p.embed_c, std::move(cons), &c.embc);
  c.v0 = mlp_apply(p.embed_v, std::move(vars), &c.embv);

  Mat xg(ne, 2 * w + 1);
  for (int e = 0; e < ne; ++e) {
    xg.block(e, 0, 1, w) = c.c0.row(st.edges[e].row);
    xg.block(e, w, 1, w) = c.v0.row(st.edges[e].col);
    xg(e, 2 * w) = st.edges[e].coef;
  }
  Mat m1 = mlp_apply(p.g_c, std::move(xg), &c.gc);
  c.s_raw = Mat::Zero(m, w);
  for (int e = 0; e < ne; ++e) c.s_raw.row(st.edges[e].row) += m1.row(e);
  if (stop_after_s_raw) return {};

  Mat s_post = c.s_raw;
  aggregate_post(p.pre_c, p.conv_mode, c.row_deg, s_post);
  Mat fin_c(m, 2 * w);
  fin_c << c.c0, s_post;
  c.c1 = mlp_apply(p.f_c, std::move(fin_c), &c.fc);

  Mat xh(ne, 2 * w + 1);
  for (int e = 0; e < ne; ++e) {
    xh.block(e, 0, 1, w) = c.c1.row(st.edges[e].row);
    xh.block(e, w, 1, w) = c.v0.row(st.edges[e].col);
    xh(e, 2 * w) = st.edges[e].coef;
  }
  Mat m2 = mlp_apply(p.g_v, std::move(xh), &c.gv);
  c.t_raw = Mat::Zero(n, w);
  for (int e = 0; e < ne; ++e) c.t_raw.row(st.edges[e].col) += m2.row(e);
  if (stop_after_t_raw) return {};

  Mat t_post = c.t_raw;
  aggregate_post(p.pre_v, p.conv_mode, c.col_deg, t_post);
  Mat fin_v(n, 2 * w);
  fin_v << c.v0, t_post;
  Mat v1 = mlp_apply(p.f_v, std::move(fin_v), &c.fv);
  Mat logits = mlp_apply(p.head, std::move(v1), &c.head);
  return logits.col(0);
}

std::vector<double> masked_softmax(const Eigen::VectorXd& logits,
                                   const std::vector<std::uint8_t>& mask) {
  const int n = static_cast<int>(logits.size());
  std::vector<double> probs(static_cast<std::size_t>(n), 0.0);
  double mx = -kInf;
  for (int j = 0; j < n; ++j)
    if (mask[j]) mx = std::max(mx, logits[j]);
  if (mx == -kInf) throw InvariantError("masked softmax: empty candidate mask");
  double total = 0.0;
  for (int j = 0; j < n; ++j)
    if (mask[j]) {
      probs[j] = std::exp(logits[j] - mx);
      total += probs[j];
    }
  for (int j = 0; j < n; ++j) probs[j] /= total;
  return probs;
}

// Reverse pass for one sample; accumulates into g.
void run_backward(const BipartiteState& st, const GcnnParams& p, ForwardCache& c,
                  const Eigen::VectorXd& dlogits, GcnnParams& g) {
  const int w = p.width;
  const int m = st.m, n = st.n;
  const int ne = static_cast<int>(st.edges.size());

  Mat dl = dlogits;
  dl.resize(n, 1);
  Mat dv1 = mlp_backprop(p.head, c.head, dl, g.head);
  Mat dfin_v = mlp_backprop(p.f_v, c.fv, dv1, g.f_v);
  Mat dv0 = dfin_v.leftCols(w);
  Mat dt = dfin_v.rightCols(w);
  aggregate_back(p.pre_v, p.conv_mode, c.col_deg, dt);

  Mat dm2(ne, w);
  for (int e = 0; e < ne; ++e) dm2.row(e) = dt.row(st.edges[e].col);
  Mat dxh = mlp_backprop(p.g_v, c.gv, dm2, g.g_v);
  Mat dc1 = Mat::Zero(m, w);
  for (int e = 0; e < ne; ++e) {
    dc1.row(st.edges[e].row) += dxh.block(e, 0, 1, w);
    dv0.row(st.edges[e].col) += dxh.block(e, w, 1, w);
  }

  Mat dfin_c = mlp_backprop(p.f_c, c.fc, dc1, g.f_c);
  Mat dc0 = dfin_c.leftCols(w);
  Mat ds = dfin_c.rightCols(w);
  aggregate_back(p.pre_c, p.conv_mode, c.row_deg, ds);

  Mat dm1(ne, w);
  for (int e = 0; e < ne; ++e) dm1.row(e) = ds.row(st.edges[e].row);
  Mat dxg = mlp_backprop(p.g_c, c.gc, dm1, g.g_c);
  for (int e = 0; e < ne; ++e) {
    dc0.row(st.edges[e].row) += dxg.block(e, 0, 1, w);
    dv0.row(st.edges[e].col) += dxg.block(e, w, 1, w);
  }

  mlp_backprop(p.embed_c, c.embc, dc0, g.embed_c);
  mlp_backprop(p.embed_v, c.embv, dv0, g.embed_v);
}

std::vector<std::vector<double>*> tensor_list(GcnnParams& p) {
  std::vector<std::vector<double>*> out;
  p.for_each_tensor([&](std::vector<double>& t) { out.push_back(&t); });
  return out;
}

GcnnParams zeros_like(const GcnnParams& p) {
  GcnnParams z = p;
  z.for_each_tensor([](std::vector<double>& t) { std::fill(t.begin(), t.end(), 0.0); });
  return z;
}

void check_finite(double v) {
  if (!std::isfinite(v)) throw InvariantError("gcnn: non-finite activation");
}

int resolve_workers(int requested, std::size_t work_items) {
  int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  w = std::max(1, w);
  return static_cast<int>(std::min<std::size_t>(w, std::max<std::size_t>(work_items, 1)));
}

}  // namespace

const char* to_string(ConvMode m) {
  switch (m) {
    case ConvMode::kSum: return "sum";
    case ConvMode::kSumPrenorm: return "sum_prenorm";
    case ConvMode::kMean: return "mean";
  }
  return "?";
}

ConvMode conv_mode_from_string(const std::string& s) {
  if (s == "sum") return ConvMode::kSum;
  if (s == "sum_prenorm") return ConvMode::kSumPrenorm;
  if (s == "mean") return ConvMode::kMean;
  throw InvariantError("unknown conv mode: " + s);
}

GcnnParams init_params(int width, ConvMode mode, RngSeed seed) {
  Rng rng(seed);
  auto make_mlp = [&](int in, int hidden, int out) {
    Mlp2 m;
    m.w1 = Dense2::zeros(in, hidden);
    m.b1.assign(static_cast<std::size_t>(hidden), 0.0);
    m.w2 = Dense2::zeros(hidden, out);
    m.b2.assign(static_cast<std::size_t>(out), 0.0);
    return m;
  };
  GcnnParams p;
  p.width = width;
  p.conv_mode = mode;
  p.embed_c = make_mlp(BipartiteState::kConsFeats, width, width);
  p.embed_v = make_mlp(BipartiteState::kVarFeats, width, width);
  p.g_c = make_mlp(2 * width + 1, width, width);
  p.f_c = make_mlp(2 * width, width, width);
  p.g_v = make_mlp(2 * width + 1, width, width);
  p.f_v = make_mlp(2 * width, width, width);
  p.head = make_mlp(width, width, 1);
  p.pre_c.beta.assign(static_cast<std::size_t>(width), 0.0);
  p.pre_c.sigma.assign(static_cast<std::size_t>(width), 1.0);
  p.pre_v = p.pre_c;
  // Glorot-uniform draws in a fixed tensor order independent of conv_mode.
  for (Mlp2* mlp : {&p.embed_c, &p.embed_v, &p.g_c, &p.f_c, &p.g_v, &p.f_v, &p.head}) {
    for (Dense2* wt : {&mlp->w1, &mlp->w2}) {
      const double limit = std::sqrt(6.0 / (wt->rows + wt->cols));
      for (auto& v : wt->data) v = rng.uniform(-limit, limit);
    }
  }
  return p;
}

ForwardResult forward(const BipartiteState& state, const GcnnParams& params) {
  ForwardCache cache;
  Eigen::VectorXd logits = run_forward(state, params, cache);
  for (int j = 0; j < logits.size(); ++j) check_finite(logits[j]);
  ForwardResult out;
  out.logits.assign(logits.data(), logits.data() + logits.size());
  out.probs = masked_softmax(logits, state.candidate_mask);
  return out;
}

double loss_and_grad(std::span<const Sample> batch, const GcnnParams& params,
                     GcnnParams& grads, int workers) {
  if (batch.empty()) throw InvariantError("loss_and_grad: empty batch");
  grads = zeros_like(params);

  const int nw = resolve_workers(workers, batch.size());
  std::vector<GcnnParams> slots(batch.size());
  std::vector<double> losses(batch.size(), 0.0);

  std::atomic<std::size_t> next{0};
  auto body = [&]() {
    ForwardCache cache;
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= batch.size()) break;
      const Sample& s = batch[k];
      const BipartiteState& st = *s.state;
      if (s.action < 0 || s.action >= st.n || !st.candidate_mask[s.action])
        throw InvariantError("loss_and_grad: expert action outside candidate mask");
      slots[k] = zeros_like(params);
      Eigen::VectorXd logits = run_forward(st, params, cache);
      std::vector<double> probs = masked_softmax(logits, st.candidate_mask);
      losses[k] = -std::log(std::max(probs[s.action], 1e-300));
      check_finite(losses[k]);
      Eigen::VectorXd dlogits = Eigen::VectorXd::Zero(st.n);
      for (int j = 0; j < st.n; ++j)
        if (st.candidate_mask[j]) dlogits[j] = probs[j] - (j == s.action ? 1.0 : 0.0);
      run_backward(st, params, cache, dlogits, slots[k]);
    }
  };
  if (nw == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int t = 0; t < nw; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }

  // Ordered reduction: summing per-sample slots in index order keeps the
  // result identical for any worker count.
  auto dst = tensor_list(grads);
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    loss += losses[k];
    auto src = tensor_list(slots[k]);
    for (std::size_t t = 0; t < dst.size(); ++t) {
      const auto& s = *src[t];
      auto& d = *dst[t];
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
    }
  }
  for (auto* t : dst)
    for (auto& v : *t) v *= scale;
  return loss * scale;
}

double dataset_loss(std::span<const Sample> samples, const GcnnParams& params, int workers) {
  if (samples.empty()) throw InvariantError("dataset_loss: empty sample set");
  const int nw = resolve_workers(workers, samples.size());
  std::vector<double> losses(samples.size(), 0.0);
  std::atomic<std::size_t> next{0};
  auto body = [&]() {
    ForwardCache cache;
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= samples.size()) break;
      const Sample& s = samples[k];
      Eigen::VectorXd logits = run_forward(*s.state, params, cache);
      std::vector<double> probs = masked_softmax(logits, s.state->candidate_mask);
      losses[k] = -std::log(std::max(probs[s.action], 1e-300));
    }
  };
  if (nw == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nw; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  double total = 0.0;
  for (double l : losses) total += l;
  return total / static_cast<double>(samples.size());
}

void prenorm_pretrain(std::span<const BipartiteState* const> dataset, GcnnParams& params) {
  if (params.conv_mode != ConvMode::kSumPrenorm)
    throw InvariantError("prenorm_pretrain: conv_mode must be sum_prenorm");
  if (dataset.empty()) throw InvariantError("prenorm_pretrain: empty dataset");
  const int w = params.width;

  auto fit = [&](Prenorm& pre, bool variable_side) {
    std::vector<double> sum(static_cast<std::size_t>(w), 0.0);
    std::vector<double> sumsq(static_cast<std::size_t>(w), 0.0);
    std::int64_t count = 0;
    ForwardCache cache;
    for (const BipartiteState* st : dataset) {
      run_forward(*st, params, cache, /*stop_after_s_raw=*/!variable_side,
                  /*stop_after_t_raw=*/variable_side);
      const Mat& agg = variable_side ? cache.t_raw : cache.s_raw;
      count += agg.rows();
      for (int i = 0; i < agg.rows(); ++i)
        for (int j = 0; j < w; ++j) {
          sum[j] += agg(i, j);
          sumsq[j] += agg(i, j) * agg(i, j);
        }
    }
    for (int j = 0; j < w; ++j) {
      const double mean = sum[j] / static_cast<double>(count);
      const double var = std::max(0.0, sumsq[j] / static_cast<double>(count) - mean * mean);
      pre.beta[j] = mean;
      pre.sigma[j] = std::max(std::sqrt(var), 1e-8);
    }
    pre.frozen = true;
  };

  // Constraint side first: its statistics do not depend on any prenorm.
  // The variable side is fitted with the constraint prenorm in place.
  fit(params.pre_c, /*variable_side=*/false);
  fit(params.pre_v, /*variable_side=*/true);
}

AdamState make_adam_state(const GcnnParams& params) {
  return AdamState{zeros_like(params), zeros_like(params), 0};
}

void adam_step(GcnnParams& params, const GcnnParams& grads, AdamState& state, double lr,
               const TrainConfig& cfg) {
  ++state.t;
  auto pt = tensor_list(params);
  auto gt = tensor_list(const_cast<GcnnParams&>(grads));
  auto mt = tensor_list(state.m);
  auto vt = tensor_list(state.v);
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t t = 0; t < pt.size(); ++t) {
    auto& p = *pt[t];
    const auto& g = *gt[t];
    auto& m = *mt[t];
    auto& v = *vt[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.adam_eps);
    }
  }
}

TrainResult train(std::span<const Sample> train_set, std::span<const Sample> valid_set,
                  const TrainConfig& cfg, ConvMode mode, int width) {
  if (train_set.empty() || valid_set.empty())
    throw InvariantError("train: empty train or validation set");

  GcnnParams params = init_params(width, mode, cfg.seed);
  if (mode == ConvMode::kSumPrenorm) {
    std::vector<const BipartiteState*> states;
    states.reserve(train_set.size());
    for (const auto& s : train_set) states.push_back(s.state);
    prenorm_pretrain(states, params);
  }

  AdamState adam = make_adam_state(params);
  GcnnParams grads = zeros_like(params);
  Rng rng(derive_seed(cfg.seed, 0x7261696eULL));
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  result.params = params;
  double best_valid = kInf;
  double lr = cfg.lr0;
  int since_improve = 0;
  std::vector<Sample> batch;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double train_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.push_back(train_set[order[k]]);
      const double loss = loss_and_grad(batch, params, grads, cfg.workers);
      adam_step(params, grads, adam, lr, cfg);
      train_loss += loss * static_cast<double>(batch.size());
      seen += batch.size();
    }
    train_loss /= static_cast<double>(seen);
    const double valid_loss = dataset_loss(valid_set, params, cfg.workers);
    result.history.push_back({epoch, train_loss, valid_loss, lr});
    if (cfg.progress) cfg.progress(epoch, train_loss, valid_loss, lr);

    if (valid_loss < best_valid - 1e-9) {
      best_valid = valid_loss;
      result.params = params;
      since_improve = 0;
    } else {
      ++since_improve;
      if (since_improve >= cfg.patience_stop) break;
      if (since_improve % cfg.patience_decay == 0) lr /= cfg.lr_decay;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Model file format (little-endian): magic, version, dims, then every
// tensor (learnables in traversal order, then prenorm) as u64 length +
// raw doubles.

namespace {

constexpr char kModelMagic[8] = {'M', 'L', 'G', 'C', 'N', 'N', '0', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_vec(std::ostream& out, const std::vector<double>& v) {
  const std::uint64_t len = v.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(len * sizeof(double)));
}

void read_vec(std::istream& in, std::vector<double>& v) {
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || len != v.size()) throw IoError("model file: tensor length mismatch");
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(len * sizeof(double)));
  if (!in) throw IoError("model file: truncated tensor payload");
}

}  // namespace

void save_model(const GcnnParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  out.write(kModelMagic, sizeof kModelMagic);
  write_u32(out, static_cast<std::uint32_t>(params.width));
  write_u32(out, static_cast<std::uint32_t>(params.conv_mode));
  write_u32(out, BipartiteState::kConsFeats);
  write_u32(out, BipartiteState::kVarFeats);
  write_u32(out, BipartiteState::kEdgeFeats);
  params.for_each_tensor([&](const std::vector<double>& t) { write_vec(out, t); });
  write_vec(out, params.pre_c.beta);
  write_vec(out, params.pre_c.sigma);
  write_u32(out, params.pre_c.frozen ? 1 : 0);
  write_vec(out, params.pre_v.beta);
  write_vec(out, params.pre_v.sigma);
  write_u32(out, params.pre_v.frozen ? 1 : 0);
  if (!out) throw IoError("write failed: " + path);
}

GcnnParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for read: " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kModelMagic, sizeof magic) != 0)
    throw IoError("model file: bad magic/version: " + path);
  const int width = static_cast<int>(read_u32(in));
  const auto mode = static_cast<ConvMode>(read_u32(in));
  if (read_u32(in) != BipartiteState::kConsFeats || read_u32(in) != BipartiteState::kVarFeats ||
      read_u32(in) != BipartiteState::kEdgeFeats)
    throw IoError("model file: feature dimensions do not match this build");
  GcnnParams params = init_params(width, mode, RngSeed{0});
  params.for_each_tensor([&](std::vector<double>& t) { read_vec(in, t); });
  read_vec(in, params.pre_c.beta);
  read_vec(in, params.pre_c.sigma);
  params.pre_c.frozen = read_u32(in) != 0;
  read_vec(in, params.pre_v.beta);
  read_vec(in, params.pre_v.sigma);
  params.pre_v.frozen = read_u32(in) != 0;
  if (!in) throw IoError("model file: truncated: " + path);
  return params;
}

}  // namespace milplab
